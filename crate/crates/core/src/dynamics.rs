//! Time-domain integrator for the coupled-mode equations, used as an
//! independent oracle for every steady-state closed form in this crate.
//!
//! Integration happens in the co-rotating frame of the drives, where the
//! driven steady state is a fixed point instead of an oscillation. With the
//! optical drive detuned by `Delta_a` and the microwave drive by `Delta_b`
//! from their resonances, the frame equations are
//!
//! ```text
//! da/dt = (i Delta_a - gamma_a/2) a + i G b e^{ i (Delta_a - Delta_b) t}
//!         - sqrt(gamma_ac) A_in
//! db/dt = (i Delta_b - gamma_b/2) b + i G a e^{-i (Delta_a - Delta_b) t}
//!         - sqrt(gamma_bc) B_in
//! ```
//!
//! with `G = g_eo sqrt(n_p)` the pump-enhanced coupling (taken real; the
//! overall drive phase cannot affect any |amplitude|). When both drives
//! share one detuning the coupling phase factor is constant and a true
//! fixed point exists; that is the configuration every steady-state check
//! uses.
//!
//! The dispersive variant integrates the interaction-picture equations of
//! the qubit-shifted cavity after removing the `e^{i chi t}` drive rotation
//! by the co-rotating substitution, so its steady state is again a fixed
//! point whose value is the complex amplitude of the `e^{i chi t}`
//! component.
//!
//! Stepping is embedded Dormand-Prince 4(5) with PI step-size control and
//! an absolute floor of 1e-14 on the normalized step-error estimate.
//! Convergence is declared when the state change over one linewidth time
//! `2 / min(gamma_a, gamma_b)` drops below the requested tolerance for both
//! modes.

use num_complex::Complex64;

use crate::converter;
use crate::csvout;
use crate::error::{Error, Result};
use crate::model::OperatingPoint;

/// One coherent input tone: amplitude in sqrt(photon flux) units
/// (s^-1/2), detuning relative to the mode's rotating frame (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveTone {
    amplitude: Complex64,
    detuning: f64,
}

impl DriveTone {
    pub fn new(amplitude: Complex64, detuning: f64) -> Result<Self> {
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::invalid(
                "drive amplitude",
                amplitude.norm_sqr(),
                "must be finite",
            ));
        }
        if !detuning.is_finite() {
            return Err(Error::invalid("drive detuning", detuning, "must be finite"));
        }
        Ok(Self {
            amplitude,
            detuning,
        })
    }

    /// Silent tone.
    pub fn off() -> Self {
        Self {
            amplitude: Complex64::new(0.0, 0.0),
            detuning: 0.0,
        }
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }
}

/// Recorded trajectory plus the extracted steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub times: Vec<f64>,
    pub a_amplitude: Vec<Complex64>,
    pub b_amplitude: Vec<Complex64>,
    pub steady_state_a: Option<Complex64>,
    pub steady_state_b: Option<Complex64>,
    pub converged: bool,
}

impl TrajectoryResult {
    /// Trajectory dump in the `time_s,re_a,im_a,re_b,im_b` format.
    pub fn to_csv_string(&self) -> String {
        csvout::csv_document(
            "time_s,re_a,im_a,re_b,im_b",
            self.times
                .iter()
                .zip(&self.a_amplitude)
                .zip(&self.b_amplitude)
                .map(|((&t, a), b)| {
                    vec![
                        csvout::fmt_float(t),
                        csvout::fmt_float(a.re),
                        csvout::fmt_float(a.im),
                        csvout::fmt_float(b.re),
                        csvout::fmt_float(b.im),
                    ]
                }),
        )
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [Complex64; 2];

#[derive(Clone, Copy)]
struct FrameEquations {
    half_gamma_a: f64,
    half_gamma_b: f64,
    rot_a: f64,
    rot_b: f64,
    coupling: f64,
    /// Oscillation rate of the coupling phase factor; zero when both drives
    /// share one detuning.
    beat: f64,
    drive_a: Complex64,
    drive_b: Complex64,
}

impl FrameEquations {
    #[inline]
    fn derivative(&self, t: f64, y: &State) -> State {
        let phase = if self.beat == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, self.beat * t)
        };
        let ig = Complex64::new(0.0, self.coupling);
        let da = Complex64::new(-self.half_gamma_a, self.rot_a) * y[0] + ig * y[1] * phase
            - self.drive_a;
        let db = Complex64::new(-self.half_gamma_b, self.rot_b) * y[1] + ig * y[0] * phase.conj()
            - self.drive_b;
        [da, db]
    }
}

fn dopri5_step(eq: &FrameEquations, t: f64, y: &State, h: f64, k1: &State) -> (State, State, f64) {
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];
    k[0] = *k1;
    for stage in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage - 1][j];
            if a != 0.0 {
                ys[0] += h * a * kj[0];
                ys[1] += h * a * kj[1];
            }
        }
        k[stage] = eq.derivative(t + C[stage] * h, &ys);
    }
    // Stage 7 evaluates at the 5th-order solution (FSAL), so k[6] is both
    // the last stage and the first stage of the next step.
    let y_new = {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                ys[0] += h * a * kj[0];
                ys[1] += h * a * kj[1];
            }
        }
        ys
    };
    let mut err = [Complex64::new(0.0, 0.0); 2];
    for (j, kj) in k.iter().enumerate() {
        if E[j] != 0.0 {
            err[0] += h * E[j] * kj[0];
            err[1] += h * E[j] * kj[1];
        }
    }
    let k_next = k[6];
    let mut norm = 0.0;
    for i in 0..2 {
        let scale = 1e-30 + y[i].norm().max(y_new[i].norm());
        let e = err[i].norm() / scale;
        norm = f64::max(norm, e);
    }
    (y_new, k_next, norm)
}

struct Recorder {
    times: Vec<f64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    stride: usize,
    counter: usize,
}

const RECORD_CAP: usize = 8192;

impl Recorder {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            a: Vec::new(),
            b: Vec::new(),
            stride: 1,
            counter: 0,
        }
    }

    fn push(&mut self, t: f64, y: &State) {
        if self.counter.is_multiple_of(self.stride) {
            self.times.push(t);
            self.a.push(y[0]);
            self.b.push(y[1]);
            if self.times.len() >= RECORD_CAP {
                let keep = |v: &mut Vec<_>| {
                    let mut i = 0;
                    v.retain(|_| {
                        let k = i % 2 == 0;
                        i += 1;
                        k
                    });
                };
                let mut i = 0;
                self.times.retain(|_| {
                    let k = i % 2 == 0;
                    i += 1;
                    k
                });
                keep(&mut self.a);
                keep(&mut self.b);
                self.stride *= 2;
            }
        }
        self.counter += 1;
    }
}

struct AdaptiveRun {
    eq: FrameEquations,
    rtol: f64,
    t: f64,
    y: State,
    k1: State,
    h: f64,
    err_prev: f64,
    recorder: Recorder,
}

impl AdaptiveRun {
    fn new(eq: FrameEquations, y0: State, step_tol: f64) -> Self {
        let rate_scale = eq
            .half_gamma_a
            .max(eq.half_gamma_b)
            .max(eq.rot_a.abs())
            .max(eq.rot_b.abs())
            .max(eq.coupling)
            .max(eq.beat.abs())
            .max(f64::MIN_POSITIVE);
        let k1 = eq.derivative(0.0, &y0);
        let mut recorder = Recorder::new();
        recorder.push(0.0, &y0);
        Self {
            eq,
            rtol: step_tol,
            t: 0.0,
            y: y0,
            k1,
            h: 0.01 / rate_scale,
            err_prev: 1.0,
            recorder,
        }
    }

    /// Advance to exactly `t_target`, adapting steps. Errors out on
    /// non-finite state.
    fn advance_to(&mut self, t_target: f64) -> Result<()> {
        while self.t < t_target {
            let h = self.h.min(t_target - self.t);
            let (y_new, k_next, raw_err) = dopri5_step(&self.eq, self.t, &self.y, h, &self.k1);
            let err = (raw_err / self.rtol).max(1e-14);
            if err <= 1.0 {
                self.t += h;
                self.y = y_new;
                self.k1 = k_next;
                if !self.y[0].is_finite() || !self.y[1].is_finite() {
                    return Err(Error::Divergence { time_s: self.t });
                }
                self.recorder.push(self.t, &self.y);
                let fac = 0.9 * err.powf(-0.17) * self.err_prev.powf(0.04);
                self.h = h * fac.clamp(0.2, 5.0);
                self.err_prev = err;
            } else {
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        Ok(())
    }
}

fn run_to_steady_state(
    eq: FrameEquations,
    y0: State,
    slowest_rate: f64,
    horizon: f64,
    tolerance: f64,
    char_amp: f64,
) -> Result<TrajectoryResult> {
    let step_tol = (tolerance * 1e-2).clamp(1e-13, 1e-6);
    let window = 2.0 / slowest_rate;
    let mut run = AdaptiveRun::new(eq, y0, step_tol);
    let mut prev = y0;
    let mut converged = false;
    while run.t < horizon {
        let target = (run.t + window).min(horizon);
        run.advance_to(target)?;
        let ok = (0..2).all(|i| {
            let change = (run.y[i] - prev[i]).norm();
            change <= tolerance * run.y[i].norm() + 1e-9 * char_amp
        });
        if ok {
            converged = true;
            break;
        }
        prev = run.y;
    }
    Ok(TrajectoryResult {
        times: run.recorder.times,
        a_amplitude: run.recorder.a,
        b_amplitude: run.recorder.b,
        steady_state_a: converged.then_some(run.y[0]),
        steady_state_b: converged.then_some(run.y[1]),
        converged,
    })
}

fn validate_horizon_tolerance(horizon: f64, tolerance: f64) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::invalid("horizon", horizon, "must be > 0"));
    }
    if !(tolerance > 0.0 && tolerance <= 1e-3) {
        return Err(Error::invalid(
            "tolerance",
            tolerance,
            "must lie in (0, 1e-3]",
        ));
    }
    Ok(())
}

fn characteristic_amplitude(eq: &FrameEquations, y0: &State) -> f64 {
    // Single-mode steady magnitudes set the "effectively zero" floor.
    let a_scale = if eq.half_gamma_a > 0.0 {
        eq.drive_a.norm() / eq.half_gamma_a
    } else {
        0.0
    };
    let b_scale = if eq.half_gamma_b > 0.0 {
        eq.drive_b.norm() / eq.half_gamma_b
    } else {
        0.0
    };
    a_scale.max(b_scale).max(y0[0].norm()).max(y0[1].norm())
}

fn conversion_frame(
    op: &OperatingPoint,
    optical_drive: &DriveTone,
    microwave_drive: &DriveTone,
) -> FrameEquations {
    FrameEquations {
        half_gamma_a: 0.5 * op.optical_signal().total_rate(),
        half_gamma_b: 0.5 * op.microwave().total_rate(),
        rot_a: optical_drive.detuning(),
        rot_b: microwave_drive.detuning(),
        coupling: converter::pumped_coupling_squared(op).sqrt(),
        beat: optical_drive.detuning() - microwave_drive.detuning(),
        drive_a: op.optical_signal().coupling_rate().sqrt() * optical_drive.amplitude(),
        drive_b: op.microwave().coupling_rate().sqrt() * microwave_drive.amplitude(),
    }
}

/// Integrate the coupled-mode equations from zero initial amplitudes until
/// the steady state is reached (or `horizon` seconds have elapsed, in which
/// case `converged` is false).
pub fn integrate(
    op: &OperatingPoint,
    optical_drive: &DriveTone,
    microwave_drive: &DriveTone,
    horizon: f64,
    tolerance: f64,
) -> Result<TrajectoryResult> {
    integrate_from(
        op,
        optical_drive,
        microwave_drive,
        [Complex64::new(0.0, 0.0); 2],
        horizon,
        tolerance,
    )
}

/// [`integrate`] with explicit initial amplitudes (decay tests).
pub fn integrate_from(
    op: &OperatingPoint,
    optical_drive: &DriveTone,
    microwave_drive: &DriveTone,
    initial: [Complex64; 2],
    horizon: f64,
    tolerance: f64,
) -> Result<TrajectoryResult> {
    validate_horizon_tolerance(horizon, tolerance)?;
    let eq = conversion_frame(op, optical_drive, microwave_drive);
    let slowest = op
        .optical_signal()
        .total_rate()
        .min(op.microwave().total_rate());
    let char_amp = characteristic_amplitude(&eq, &initial);
    run_to_steady_state(eq, initial, slowest, horizon, tolerance, char_amp)
}

/// Integrate the dispersive-readout equations: the microwave resonance is
/// shifted by `chi` while a weak readout tone drives the microwave port.
/// Steady-state amplitudes are reported in the co-rotating `e^{i chi t}`
/// frame of the converted output.
pub fn integrate_dispersive(
    op: &OperatingPoint,
    chi: f64,
    microwave_drive: &DriveTone,
    horizon: f64,
    tolerance: f64,
) -> Result<TrajectoryResult> {
    validate_horizon_tolerance(horizon, tolerance)?;
    if !chi.is_finite() {
        return Err(Error::invalid("chi", chi, "must be finite"));
    }
    let detuning = microwave_drive.detuning();
    let eq = FrameEquations {
        half_gamma_a: 0.5 * op.optical_signal().total_rate(),
        half_gamma_b: 0.5 * op.microwave().total_rate(),
        rot_a: detuning,
        rot_b: detuning - chi,
        coupling: converter::pumped_coupling_squared(op).sqrt(),
        beat: 0.0,
        drive_a: Complex64::new(0.0, 0.0),
        drive_b: op.microwave().coupling_rate().sqrt() * microwave_drive.amplitude(),
    };
    let slowest = op
        .optical_signal()
        .total_rate()
        .min(op.microwave().total_rate());
    let y0 = [Complex64::new(0.0, 0.0); 2];
    let char_amp = characteristic_amplitude(&eq, &y0);
    run_to_steady_state(eq, y0, slowest, horizon, tolerance, char_amp)
}

/// Conversion efficiency extracted from a converged run driven through the
/// microwave port: `|sqrt(gamma_ac) a_ss / B_in|^2`. `None` until the run
/// converged or when the drive is silent.
pub fn steady_conversion_efficiency(
    op: &OperatingPoint,
    result: &TrajectoryResult,
    microwave_drive: &DriveTone,
) -> Option<f64> {
    let a_ss = result.steady_state_a?;
    let input = microwave_drive.amplitude().norm_sqr();
    if input == 0.0 {
        return None;
    }
    Some(op.optical_signal().coupling_rate() * a_ss.norm_sqr() / input)
}

/// Fixed-step integration to exactly `t_end` with step `h`, same tableau,
/// no adaptivity. Exists so convergence-order measurements can halve the
/// step deterministically.
pub fn integrate_fixed_step(
    op: &OperatingPoint,
    optical_drive: &DriveTone,
    microwave_drive: &DriveTone,
    t_end: f64,
    h: f64,
) -> Result<[Complex64; 2]> {
    if !(t_end > 0.0) || !(h > 0.0) {
        return Err(Error::invalid("t_end/h", h, "must be > 0"));
    }
    let eq = conversion_frame(op, optical_drive, microwave_drive);
    let n = (t_end / h).round().max(1.0) as u64;
    let h = t_end / n as f64;
    let mut y = [Complex64::new(0.0, 0.0); 2];
    let mut t = 0.0;
    let mut k1 = eq.derivative(t, &y);
    for _ in 0..n {
        let (y_new, k_next, _) = dopri5_step(&eq, t, &y, h, &k1);
        y = y_new;
        k1 = k_next;
        t += h;
        if !y[0].is_finite() || !y[1].is_finite() {
            return Err(Error::Divergence { time_s: t });
        }
    }
    Ok(y)
}
