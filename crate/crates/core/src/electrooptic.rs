//! Electro-optic coupling rate and the microwave quality-factor budget.
//!
//! The single-photon coupling rate between the pump, signal, and microwave
//! modes follows from the overlap of the microwave electric field with the
//! whispering-gallery mode. With the field assumed uniform over the small
//! optical mode cross-section, the overlap collapses to a closed azimuthal
//! line integral of the tabulated field correction profile:
//!
//! ```text
//! g_eo = (1 / 16 pi) n^2 r33 sqrt(w_p w_a) sqrt(hbar w_b / W)
//!        * integral_0^2pi E_rf(phi) dphi
//! ```
//!
//! where `W` is the total stored microwave energy used to normalize the
//! field to the single-photon level. The integral is evaluated with the
//! periodic trapezoidal rule (including the wrap-around segment from the
//! last sample back to the first), which is spectrally accurate for smooth
//! 2pi-periodic data.
//!
//! The microwave loss budget combines dielectric loss, the two coupler Qs
//! and the bare-cavity intrinsic Q in parallel:
//!
//! ```text
//! 1/Q_L = 1/Q_d + 1/Q_1 + 1/Q_2 + 1/Q_0,    Q_d = 1 / (p tan_delta)
//! ```
//!
//! The dielectric term is counted once. A variant that counts it twice is
//! available through [`DielectricCounting`] for sensitivity checks (see
//! [`loaded_q_with`]).

use std::f64::consts::{PI, TAU};

use crate::constants::REDUCED_PLANCK;
use crate::error::{Error, Result};

/// Tabulated azimuthal microwave field at the optical-mode radius, plus the
/// stored energy `W` used for single-photon normalization.
///
/// Samples are `(phi, field)` with `phi` in radians, strictly increasing in
/// `[0, 2pi)`, and `field` in V/m. The profile is treated as 2pi-periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    samples: Vec<(f64, f64)>,
    stored_energy: f64,
}

impl FieldProfile {
    pub fn new(samples: Vec<(f64, f64)>, stored_energy: f64) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidProfile(format!(
                "need at least 4 samples, got {}",
                samples.len()
            )));
        }
        if !(stored_energy > 0.0) || !stored_energy.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "stored energy must be > 0 J, got {stored_energy}"
            )));
        }
        let mut prev = f64::NEG_INFINITY;
        for (i, &(phi, field)) in samples.iter().enumerate() {
            if !phi.is_finite() || !field.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "sample {i} is not finite: ({phi}, {field})"
                )));
            }
            if !(0.0..TAU).contains(&phi) {
                return Err(Error::InvalidProfile(format!(
                    "sample {i}: phi = {phi} outside [0, 2pi)"
                )));
            }
            if phi <= prev {
                return Err(Error::InvalidProfile(format!(
                    "sample {i}: phi = {phi} not strictly increasing"
                )));
            }
            prev = phi;
        }
        Ok(Self {
            samples,
            stored_energy,
        })
    }

    /// Uniformly sampled profile `field(phi) = f(phi)` with `n` points.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, n: usize, stored_energy: f64) -> Result<Self> {
        let samples = (0..n)
            .map(|i| {
                let phi = TAU * i as f64 / n as f64;
                (phi, f(phi))
            })
            .collect();
        Self::new(samples, stored_energy)
    }

    /// Parse the two-column text format. The header line
    /// `phi_degrees,field_V_per_m` is required; each following line is one
    /// comma-separated `degrees,field` pair. Degrees convert to radians
    /// here, at the boundary.
    pub fn from_csv_str(text: &str, stored_energy: f64) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "phi_degrees,field_V_per_m")) => {}
            Some((n, header)) => {
                return Err(Error::InvalidProfile(format!(
                    "line {n}: expected header `phi_degrees,field_V_per_m`, got `{header}`"
                )));
            }
            None => return Err(Error::InvalidProfile("empty profile file".into())),
        }
        let mut samples = Vec::new();
        for (n, line) in lines {
            let mut parts = line.split(',');
            let (deg, field) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a.trim(), b.trim()),
                _ => {
                    return Err(Error::InvalidProfile(format!(
                        "line {n}: expected two comma-separated values, got `{line}`"
                    )));
                }
            };
            let deg: f64 = deg.parse().map_err(|_| {
                Error::InvalidProfile(format!("line {n}: cannot parse `{deg}` as a number"))
            })?;
            let field: f64 = field.parse().map_err(|_| {
                Error::InvalidProfile(format!("line {n}: cannot parse `{field}` as a number"))
            })?;
            samples.push((deg.to_radians(), field));
        }
        Self::new(samples, stored_energy)
    }

    pub fn from_path(path: &std::path::Path, stored_energy: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text, stored_energy)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn stored_energy(&self) -> f64 {
        self.stored_energy
    }

    /// Closed-loop integral of the field over one azimuthal period by the
    /// periodic trapezoidal rule, wrap-around segment included.
    pub fn loop_integral(&self) -> f64 {
        let s = &self.samples;
        let n = s.len();
        let mut acc = 0.0;
        for i in 0..n - 1 {
            acc += 0.5 * (s[i + 1].0 - s[i].0) * (s[i].1 + s[i + 1].1);
        }
        let wrap = (s[0].0 + TAU) - s[n - 1].0;
        acc += 0.5 * wrap * (s[n - 1].1 + s[0].1);
        acc
    }

    /// Copy with every field sample multiplied by `scale`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|&(phi, e)| (phi, scale * e))
                .collect(),
            stored_energy: self.stored_energy,
        }
    }
}

/// Electro-optic material response of the resonator crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalOptics {
    refractive_index: f64,
    electrooptic_coeff: f64,
}

impl CrystalOptics {
    /// `refractive_index` is the extraordinary index near the optical
    /// wavelength, `electrooptic_coeff` the linear (r33) coefficient in m/V.
    pub fn new(refractive_index: f64, electrooptic_coeff: f64) -> Result<Self> {
        if !(refractive_index > 1.0) {
            return Err(Error::invalid(
                "refractive_index",
                refractive_index,
                "must be > 1",
            ));
        }
        if !(electrooptic_coeff > 0.0) {
            return Err(Error::invalid(
                "electrooptic_coeff",
                electrooptic_coeff,
                "must be > 0",
            ));
        }
        Ok(Self {
            refractive_index,
            electrooptic_coeff,
        })
    }

    pub fn refractive_index(&self) -> f64 {
        self.refractive_index
    }

    pub fn electrooptic_coeff(&self) -> f64 {
        self.electrooptic_coeff
    }
}

impl Default for CrystalOptics {
    /// Standard congruent lithium-niobate values near 1550 nm:
    /// n_e = 2.21, r33 = 30.8 pm/V. Configuration defaults, not constants
    /// of the physics; override freely.
    fn default() -> Self {
        Self {
            refractive_index: 2.21,
            electrooptic_coeff: 30.8e-12,
        }
    }
}

/// Signed coupling rate together with its magnitude. The sign follows the
/// loop integral of the field profile; the magnitude is what enters the
/// cooperativity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EoCoupling {
    pub signed: f64,
    pub magnitude: f64,
}

/// Single-photon electro-optic coupling rate (rad/s) from a tabulated
/// azimuthal field profile. See the module docs for the closed form.
pub fn g_eo_from_profile(
    profile: &FieldProfile,
    optics: &CrystalOptics,
    omega_pump: f64,
    omega_signal: f64,
    omega_microwave: f64,
) -> Result<EoCoupling> {
    for (name, w) in [
        ("omega_pump", omega_pump),
        ("omega_signal", omega_signal),
        ("omega_microwave", omega_microwave),
    ] {
        if !(w > 0.0) || !w.is_finite() {
            return Err(Error::invalid(name, w, "must be > 0"));
        }
    }
    let n2 = optics.refractive_index() * optics.refractive_index();
    let prefactor = n2 * optics.electrooptic_coeff() / (16.0 * PI)
        * (omega_pump * omega_signal).sqrt()
        * (REDUCED_PLANCK * omega_microwave / profile.stored_energy()).sqrt();
    let signed = prefactor * profile.loop_integral();
    Ok(EoCoupling {
        signed,
        magnitude: signed.abs(),
    })
}

/// Dielectric quality factor `1 / (participation * loss_tangent)`.
///
/// A zero loss tangent is lossless and returns `f64::INFINITY` rather than
/// an error, so a vanishing channel can be expressed uniformly in a
/// [`QBudget`].
pub fn dielectric_q(participation: f64, loss_tangent: f64) -> Result<f64> {
    if !(participation > 0.0 && participation <= 1.0) {
        return Err(Error::invalid(
            "participation",
            participation,
            "must be in (0, 1]",
        ));
    }
    if !(loss_tangent >= 0.0) || !loss_tangent.is_finite() {
        return Err(Error::invalid("loss_tangent", loss_tangent, "must be >= 0"));
    }
    if loss_tangent == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (participation * loss_tangent))
}

/// Microwave loss budget. Absent couplers are infinite Qs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBudget {
    participation: f64,
    loss_tangent: f64,
    intrinsic_q: f64,
    input_coupler_q: f64,
    output_coupler_q: f64,
}

impl QBudget {
    pub fn new(participation: f64, loss_tangent: f64, intrinsic_q: f64) -> Result<Self> {
        // Reuse the domain checks; the value is recomputed on use.
        dielectric_q(participation, loss_tangent)?;
        if !(intrinsic_q > 0.0) {
            return Err(Error::invalid("intrinsic_q", intrinsic_q, "must be > 0"));
        }
        Ok(Self {
            participation,
            loss_tangent,
            intrinsic_q,
            input_coupler_q: f64::INFINITY,
            output_coupler_q: f64::INFINITY,
        })
    }

    pub fn with_input_coupler(mut self, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::invalid("input_coupler_q", q, "must be > 0"));
        }
        self.input_coupler_q = q;
        Ok(self)
    }

    pub fn with_output_coupler(mut self, q: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(Error::invalid("output_coupler_q", q, "must be > 0"));
        }
        self.output_coupler_q = q;
        Ok(self)
    }

    pub fn dielectric_q(&self) -> f64 {
        dielectric_q(self.participation, self.loss_tangent).expect("validated at construction")
    }

    pub fn intrinsic_q(&self) -> f64 {
        self.intrinsic_q
    }

    pub fn input_coupler_q(&self) -> f64 {
        self.input_coupler_q
    }

    pub fn output_coupler_q(&self) -> f64 {
        self.output_coupler_q
    }
}

/// How many times the dielectric term enters the loaded-Q sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DielectricCounting {
    /// One term per loss channel. This is the default.
    Single,
    /// Dielectric term counted twice; kept only so its effect can be
    /// compared and flagged by the validation suite.
    Double,
}

/// Loaded quality factor with the dielectric loss counted once.
pub fn loaded_q(budget: &QBudget) -> f64 {
    loaded_q_with(budget, DielectricCounting::Single)
}

/// Loaded quality factor under an explicit dielectric counting rule.
pub fn loaded_q_with(budget: &QBudget, counting: DielectricCounting) -> f64 {
    let dielectric_weight = match counting {
        DielectricCounting::Single => 1.0,
        DielectricCounting::Double => 2.0,
    };
    let inv = dielectric_weight / budget.dielectric_q()
        + 1.0 / budget.input_coupler_q
        + 1.0 / budget.output_coupler_q
        + 1.0 / budget.intrinsic_q;
    if inv == 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const OMEGA_OPTICAL: f64 = TAU * 192.43e12;
    const OMEGA_MICROWAVE: f64 = TAU * 8.93e9;

    fn default_optics() -> CrystalOptics {
        CrystalOptics::default()
    }

    #[test]
    fn zero_field_gives_zero_coupling() {
        let profile = FieldProfile::from_fn(|_| 0.0, 64, 1.0).unwrap();
        let g = g_eo_from_profile(
            &profile,
            &default_optics(),
            OMEGA_OPTICAL,
            OMEGA_OPTICAL,
            OMEGA_MICROWAVE,
        )
        .unwrap();
        assert_eq!(g.signed, 0.0);
        assert_eq!(g.magnitude, 0.0);
    }

    #[test]
    fn uniform_profile_coupling_rate() {
        // Uniform 1e10 V/m at 1 J stored energy: hand evaluation of the
        // prefactor times the 2 pi loop integral gives 553.1 rad/s.
        let profile = FieldProfile::from_fn(|_| 1e10, 256, 1.0).unwrap();
        let g = g_eo_from_profile(
            &profile,
            &default_optics(),
            OMEGA_OPTICAL,
            OMEGA_OPTICAL,
            OMEGA_MICROWAVE,
        )
        .unwrap();
        assert!((g.signed - 553.1).abs() < 0.01 * 553.1, "got {}", g.signed);
        let g_hz = g.signed / TAU;
        assert!((g_hz - 88.0).abs() < 0.01 * 88.0, "got {g_hz} Hz");
    }

    #[test]
    fn rectified_cosine_profile_coupling_rate() {
        // integral |cos phi| d phi = 4 over one period (independent
        // symbolic result), so the rate is 4 / 2pi of the uniform case.
        let profile = FieldProfile::from_fn(|phi| 1e10 * phi.cos().abs(), 720, 1.0).unwrap();
        let g = g_eo_from_profile(
            &profile,
            &default_optics(),
            OMEGA_OPTICAL,
            OMEGA_OPTICAL,
            OMEGA_MICROWAVE,
        )
        .unwrap();
        assert!((g.signed - 352.1).abs() < 0.01 * 352.1, "got {}", g.signed);
        let g_hz = g.signed / TAU;
        assert!((g_hz - 56.0).abs() < 0.01 * 56.0, "got {g_hz} Hz");
    }

    #[test]
    fn quadrupled_energy_halves_coupling_exactly() {
        let profile = FieldProfile::from_fn(|phi| 1e9 * (1.0 + phi.sin()), 128, 1.0).unwrap();
        let profile4 = FieldProfile::from_fn(|phi| 1e9 * (1.0 + phi.sin()), 128, 4.0).unwrap();
        let optics = default_optics();
        let g1 = g_eo_from_profile(
            &profile,
            &optics,
            OMEGA_OPTICAL,
            OMEGA_OPTICAL,
            OMEGA_MICROWAVE,
        )
        .unwrap();
        let g4 = g_eo_from_profile(
            &profile4,
            &optics,
            OMEGA_OPTICAL,
            OMEGA_OPTICAL,
            OMEGA_MICROWAVE,
        )
        .unwrap();
        assert_eq!(g4.signed, 0.5 * g1.signed);
    }

    #[test]
    fn trapezoid_is_spectrally_accurate_for_cos_squared() {
        let coarse = FieldProfile::from_fn(|phi| phi.cos().powi(2), 64, 1.0).unwrap();
        let fine = FieldProfile::from_fn(|phi| phi.cos().powi(2), 128, 1.0).unwrap();
        let a = coarse.loop_integral();
        let b = fine.loop_integral();
        assert!(((a - b) / b).abs() < 1e-10, "coarse {a}, fine {b}");
        assert!(((a - PI) / PI).abs() < 1e-12);
    }

    #[test]
    fn profile_validation_errors() {
        assert!(FieldProfile::new(vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)], 1.0).is_err());
        assert!(
            FieldProfile::new(vec![(0.0, 1.0), (2.0, 1.0), (1.0, 1.0), (3.0, 1.0)], 1.0).is_err()
        );
        assert!(
            FieldProfile::new(vec![(0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (6.5, 1.0)], 1.0).is_err()
        );
        assert!(FieldProfile::from_fn(|_| 1.0, 16, 0.0).is_err());
        assert!(FieldProfile::from_fn(|_| 1.0, 16, -2.0).is_err());
    }

    #[test]
    fn csv_parse_round_trip() {
        let text = "phi_degrees,field_V_per_m\n0,1e9\n90,2e9\n180,-1e9\n270,0.5e9\n";
        let profile = FieldProfile::from_csv_str(text, 1.0).unwrap();
        assert_eq!(profile.samples().len(), 4);
        assert!((profile.samples()[1].0 - PI / 2.0).abs() < 1e-15);
        assert_eq!(profile.samples()[2].1, -1e9);
    }

    #[test]
    fn csv_parse_diagnostics_carry_line_numbers() {
        let missing_header = "0,1e9\n90,2e9\n";
        let err = FieldProfile::from_csv_str(missing_header, 1.0).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");

        let bad_row = "phi_degrees,field_V_per_m\n0,1e9\n90,two\n180,0\n270,0\n";
        let err = FieldProfile::from_csv_str(bad_row, 1.0).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn dielectric_q_values() {
        let q_unit = dielectric_q(1.0, 1e-5).unwrap();
        assert!(((q_unit - 1e5) / 1e5).abs() <= 1e-12);
        let q = dielectric_q(0.96, 1e-5).unwrap();
        assert!((q - 1.0417e5).abs() < 0.001 * 1.0417e5, "got {q}");
        let q_half = dielectric_q(0.5, 2e-5).unwrap();
        assert!(((q_half - 1e5) / 1e5).abs() <= 1e-12);
        assert_eq!(dielectric_q(0.96, 0.0).unwrap(), f64::INFINITY);
        assert!(dielectric_q(0.0, 1e-5).is_err());
        assert!(dielectric_q(1.5, 1e-5).is_err());
    }

    #[test]
    fn loaded_q_dielectric_only() {
        let budget = QBudget::new(0.96, 1e-5, f64::INFINITY).unwrap();
        let q = loaded_q(&budget);
        assert!((q - 1.0417e5).abs() < 0.001 * 1.0417e5, "got {q}");
    }

    #[test]
    fn loaded_q_with_high_intrinsic_q_cavity() {
        let budget = QBudget::new(0.96, 1e-5, 1e10).unwrap();
        let q = loaded_q(&budget);
        assert!((q - 1.0417e5).abs() < 0.002 * 1.0417e5, "got {q}");
    }

    #[test]
    fn loaded_q_four_equal_channels() {
        // Dielectric, both couplers, and intrinsic all at 1e5: a parallel
        // sum of four equal terms.
        let budget = QBudget::new(1.0, 1e-5, 1e5)
            .unwrap()
            .with_input_coupler(1e5)
            .unwrap()
            .with_output_coupler(1e5)
            .unwrap();
        assert!((loaded_q(&budget) - 2.5e4).abs() < 1e-6 * 2.5e4);
    }

    #[test]
    fn double_counting_halves_the_dielectric_channel() {
        let budget = QBudget::new(0.96, 1e-5, f64::INFINITY).unwrap();
        let single = loaded_q_with(&budget, DielectricCounting::Single);
        let double = loaded_q_with(&budget, DielectricCounting::Double);
        assert!((double - 0.5 * single).abs() < 1e-9 * single);
    }

    proptest! {
        #[test]
        fn coupling_is_linear_in_field(scale in 1e-3f64..1e3) {
            let base = FieldProfile::from_fn(|phi| 1e8 * (0.2 + phi.cos()), 96, 1.0).unwrap();
            let optics = default_optics();
            let g1 = g_eo_from_profile(&base, &optics, OMEGA_OPTICAL, OMEGA_OPTICAL, OMEGA_MICROWAVE).unwrap();
            let g2 = g_eo_from_profile(&base.scaled(scale), &optics, OMEGA_OPTICAL, OMEGA_OPTICAL, OMEGA_MICROWAVE).unwrap();
            let expected = scale * g1.signed;
            prop_assert!((g2.signed - expected).abs() <= 1e-12 * expected.abs());
        }

        #[test]
        fn loaded_q_bounded_and_monotone(
            p in 0.01f64..1.0,
            tan_delta in 1e-8f64..1e-3,
            q0 in 1e4f64..1e12,
            q1 in 1e4f64..1e12,
            q2 in 1e4f64..1e12,
            bump in 1.0f64..100.0,
        ) {
            let budget = QBudget::new(p, tan_delta, q0).unwrap()
                .with_input_coupler(q1).unwrap()
                .with_output_coupler(q2).unwrap();
            let ql = loaded_q(&budget);
            let qd = budget.dielectric_q();
            let min_q = qd.min(q0).min(q1).min(q2);
            prop_assert!(ql <= min_q * (1.0 + 1e-12));

            // Raising any one contribution must not lower the loaded Q.
            let better = QBudget::new(p, tan_delta, q0 * bump).unwrap()
                .with_input_coupler(q1).unwrap()
                .with_output_coupler(q2).unwrap();
            prop_assert!(loaded_q(&better) >= ql * (1.0 - 1e-12));
        }
    }
}
