//! Counting statistics of optically heralded entanglement generation
//! between two remote transducers, for blue- and red-sideband pumping,
//! plus a seeded Monte Carlo simulation that cross-checks every closed
//! form.
//!
//! Photon generation in each transducer is Poissonian with rate `r_0` over
//! an attempt window `Delta t`; a microwave reset of duration `t_r` follows
//! each attempt. With `x = r_0 Delta t`:
//!
//! * Blue pumping creates microwave-optical pairs. Per cavity,
//!   `P_1 = x e^{-x}` (exactly one photon) and `P_0 = e^{-x}` (none). The
//!   heralded pair rate is `2 r_0 e^{-x} Delta t / (Delta t + t_r)` and the
//!   fidelity is the single-photon fraction of all herald-producing
//!   outcomes.
//! * Red pumping starts from one microwave photon per cavity and converts
//!   it with probability `p_click = 1 - e^{-x}`; no multi-photon events
//!   exist. The rate uses the same attempt-cycle accounting with the
//!   exactly-one-click herald probability.
//!
//! Phase information in the superposition coefficients is dropped
//! throughout; only the populations enter the fidelity.
//!
//! Monte Carlo attempts are partitioned into fixed-size chunks, each with
//! its own ChaCha8 stream (rand_chacha 0.3, `set_stream`), so results are
//! bit-identical for a given seed regardless of thread count or scheduling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::converter;
use crate::error::{Error, Result};
use crate::model::OperatingPoint;
use crate::parallel::{self, Execution};

/// Pumping scheme of the heralding protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Blue,
    Red,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Blue => "blue",
            Scheme::Red => "red",
        }
    }
}

/// Protocol timing and rate parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementProtocolParams {
    generation_rate: f64,
    attempt_duration: f64,
    reset_time: f64,
    scheme: Scheme,
}

impl EntanglementProtocolParams {
    pub fn new(
        generation_rate: f64,
        attempt_duration: f64,
        reset_time: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        if !(generation_rate >= 0.0) || !generation_rate.is_finite() {
            return Err(Error::invalid(
                "generation_rate",
                generation_rate,
                "must be >= 0",
            ));
        }
        if !(attempt_duration > 0.0) || !attempt_duration.is_finite() {
            return Err(Error::invalid(
                "attempt_duration",
                attempt_duration,
                "must be > 0",
            ));
        }
        if !(reset_time >= 0.0) || !reset_time.is_finite() {
            return Err(Error::invalid("reset_time", reset_time, "must be >= 0"));
        }
        Ok(Self {
            generation_rate,
            attempt_duration,
            reset_time,
            scheme,
        })
    }

    pub fn generation_rate(&self) -> f64 {
        self.generation_rate
    }

    pub fn attempt_duration(&self) -> f64 {
        self.attempt_duration
    }

    pub fn reset_time(&self) -> f64 {
        self.reset_time
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn with_generation_rate(&self, r0: f64) -> Result<Self> {
        Self::new(r0, self.attempt_duration, self.reset_time, self.scheme)
    }

    /// Mean photon number per cavity per attempt, `x = r_0 Delta t`.
    pub fn mean_photons(&self) -> f64 {
        self.generation_rate * self.attempt_duration
    }
}

/// Closed-form herald statistics: success rate, fidelity, and the labeled
/// probability classes of the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldOutcome {
    pub rate: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub probabilities: BTreeMap<&'static str, f64>,
}

/// Dispatch on the scheme carried by the parameters.
pub fn herald_statistics(params: &EntanglementProtocolParams) -> HeraldOutcome {
    match params.scheme() {
        Scheme::Blue => blue_sideband(params),
        Scheme::Red => red_sideband(params),
    }
}

/// Blue-sideband (pair-generation) statistics.
pub fn blue_sideband(params: &EntanglementProtocolParams) -> HeraldOutcome {
    let x = params.mean_photons();
    let p0 = (-x).exp();
    let p1 = x * p0;
    let multi = (1.0 - p0 - p1).max(0.0);
    let p10 = p1 * p0;
    let p11 = p1 * p1;
    let p_multi_single = multi * (p0 + p1);
    let p_multi_multi = multi * multi;
    // The herald-producing outcomes partition 1 - P00.
    let denom = 2.0 * p10 + p11 + 2.0 * p_multi_single + p_multi_multi;
    let fidelity = if denom > 0.0 { 2.0 * p10 / denom } else { 1.0 };
    let duty = params.attempt_duration() / (params.attempt_duration() + params.reset_time());
    let rate = 2.0 * params.generation_rate() * p0 * duty;
    let probabilities = BTreeMap::from([
        ("p0", p0),
        ("p1", p1),
        ("p10", p10),
        ("p01", p10),
        ("p11", p11),
        ("p_multi_single", p_multi_single),
        ("p_single_multi", p_multi_single),
        ("p_multi_multi", p_multi_multi),
    ]);
    HeraldOutcome {
        rate,
        fidelity,
        infidelity: 1.0 - fidelity,
        probabilities,
    }
}

/// Red-sideband (photon-retrieval) statistics. The click/no-click labels
/// are explicit because this scheme inverts the blue subscript convention:
/// the detector click corresponds to a converted (absent) microwave photon.
pub fn red_sideband(params: &EntanglementProtocolParams) -> HeraldOutcome {
    let x = params.mean_photons();
    let p_click = 1.0 - (-x).exp();
    let p_no_click = (-x).exp();
    let p00 = p_click * p_click;
    let p10 = p_no_click * p_click;
    let p11 = p_no_click * p_no_click;
    let denom = p00 + 2.0 * p10;
    let fidelity = if denom > 0.0 { 2.0 * p10 / denom } else { 1.0 };
    let rate = 2.0 * p10 / (params.attempt_duration() + params.reset_time());
    let probabilities = BTreeMap::from([
        ("p_click", p_click),
        ("p_no_click", p_no_click),
        ("p00", p00),
        ("p10", p10),
        ("p01", p10),
        ("p11", p11),
    ]);
    HeraldOutcome {
        rate,
        fidelity,
        infidelity: 1.0 - fidelity,
        probabilities,
    }
}

/// Per-class tallies of one Monte Carlo batch. Fields are labeled by the
/// remaining-photon state of the two cavities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct ClassCounts {
    n00: u64,
    n10: u64,
    n01: u64,
    n11: u64,
    n_multi_single: u64,
    n_single_multi: u64,
    n_multi_multi: u64,
    /// Blue scheme: number of (cavity, attempt) pairs holding exactly one
    /// photon; twice the per-cavity single-photon frequency.
    singles: u64,
}

impl ClassCounts {
    fn add(&mut self, other: &ClassCounts) {
        self.n00 += other.n00;
        self.n10 += other.n10;
        self.n01 += other.n01;
        self.n11 += other.n11;
        self.n_multi_single += other.n_multi_single;
        self.n_single_multi += other.n_single_multi;
        self.n_multi_multi += other.n_multi_multi;
        self.singles += other.singles;
    }
}

/// Inverse-transform Poisson sampler: exact for the moderate means the
/// protocol operates at, with a Gaussian tail approximation beyond the
/// range where `exp(-mean)` underflows.
fn sample_poisson<R: Rng>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean > 500.0 {
        let (u1, u2): (f64, f64) = (rng.gen(), rng.gen());
        let z = (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        return (mean + mean.sqrt() * z).round().max(0.0) as u64;
    }
    let u: f64 = rng.gen();
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u64;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
        if k > 1_000_000 {
            break;
        }
    }
    k
}

fn run_chunk(
    params: &EntanglementProtocolParams,
    attempts: u64,
    seed: u64,
    stream: u64,
) -> ClassCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let x = params.mean_photons();
    let mut counts = ClassCounts::default();
    match params.scheme() {
        Scheme::Blue => {
            for _ in 0..attempts {
                let m = sample_poisson(&mut rng, x);
                let n = sample_poisson(&mut rng, x);
                counts.singles += u64::from(m == 1) + u64::from(n == 1);
                match (m, n) {
                    (0, 0) => counts.n00 += 1,
                    (1, 0) => counts.n10 += 1,
                    (0, 1) => counts.n01 += 1,
                    (1, 1) => counts.n11 += 1,
                    (m, n) if m > 1 && n <= 1 => counts.n_multi_single += 1,
                    (m, n) if m <= 1 && n > 1 => counts.n_single_multi += 1,
                    _ => counts.n_multi_multi += 1,
                }
            }
        }
        Scheme::Red => {
            let p_click = 1.0 - (-x).exp();
            for _ in 0..attempts {
                let click_a = rng.gen::<f64>() < p_click;
                let click_b = rng.gen::<f64>() < p_click;
                // Labels track the photons still in the cavities.
                match (click_a, click_b) {
                    (true, true) => counts.n00 += 1,
                    (false, true) => counts.n10 += 1,
                    (true, false) => counts.n01 += 1,
                    (false, false) => counts.n11 += 1,
                }
            }
        }
    }
    counts
}

/// Monte Carlo herald statistics with binomial standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloOutcome {
    pub scheme: Scheme,
    pub attempts: u64,
    pub seed: u64,
    pub rate: f64,
    pub rate_stderr: f64,
    /// `None` when no herald event occurred (nothing to condition on).
    pub fidelity: Option<f64>,
    pub infidelity: Option<f64>,
    pub fidelity_stderr: Option<f64>,
    /// Empirical frequency of each probability class.
    pub frequencies: BTreeMap<&'static str, f64>,
    pub frequency_stderrs: BTreeMap<&'static str, f64>,
}

const CHUNK: u64 = 1 << 14;

/// Seeded Monte Carlo run; `Auto` execution.
pub fn monte_carlo(
    params: &EntanglementProtocolParams,
    attempts: u64,
    seed: u64,
) -> Result<MonteCarloOutcome> {
    monte_carlo_exec(params, attempts, seed, Execution::Auto)
}

/// Seeded Monte Carlo run under an explicit execution policy. The outcome
/// is bit-identical across policies and thread counts for a fixed seed.
pub fn monte_carlo_exec(
    params: &EntanglementProtocolParams,
    attempts: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloOutcome> {
    if attempts == 0 {
        return Err(Error::invalid("attempts", 0.0, "must be >= 1"));
    }
    let n_chunks = attempts.div_ceil(CHUNK);
    let chunks: Vec<(u64, u64)> = (0..n_chunks)
        .map(|i| {
            let start = i * CHUNK;
            (i, (attempts - start).min(CHUNK))
        })
        .collect();
    let partials = parallel::map_exec(
        &chunks,
        |&(stream, count)| run_chunk(params, count, seed, stream),
        exec,
    );
    let mut counts = ClassCounts::default();
    for p in &partials {
        counts.add(p);
    }

    let n = attempts as f64;
    let binom_stderr = |p_hat: f64, trials: f64| (p_hat * (1.0 - p_hat) / trials).sqrt();

    let (herald_good, herald_all) = match params.scheme() {
        Scheme::Blue => (counts.n10 + counts.n01, attempts - counts.n00),
        Scheme::Red => (
            counts.n10 + counts.n01,
            counts.n00 + counts.n10 + counts.n01,
        ),
    };
    let (fidelity, infidelity, fidelity_stderr) = if herald_all > 0 {
        let f = herald_good as f64 / herald_all as f64;
        (
            Some(f),
            Some(1.0 - f),
            Some(binom_stderr(f, herald_all as f64)),
        )
    } else {
        (None, None, None)
    };

    let (rate, rate_stderr) = match params.scheme() {
        Scheme::Blue => {
            // Expected singles per attempt is 2 P_1, matching the
            // closed-form rate 2 r_0 e^{-x} dt/(dt + t_r) once divided by
            // the attempt cycle.
            let per_cavity = counts.singles as f64 / (2.0 * n);
            let cycle = params.attempt_duration() + params.reset_time();
            (
                counts.singles as f64 / n / cycle,
                (2.0 * per_cavity * (1.0 - per_cavity) / n).sqrt() / cycle,
            )
        }
        Scheme::Red => {
            let p_hat = (counts.n10 + counts.n01) as f64 / n;
            let cycle = params.attempt_duration() + params.reset_time();
            (p_hat / cycle, binom_stderr(p_hat, n) / cycle)
        }
    };

    let mut frequencies = BTreeMap::new();
    let mut frequency_stderrs = BTreeMap::new();
    let mut insert = |key: &'static str, count: u64| {
        let p_hat = count as f64 / n;
        frequencies.insert(key, p_hat);
        frequency_stderrs.insert(key, binom_stderr(p_hat, n));
    };
    match params.scheme() {
        Scheme::Blue => {
            insert("p00", counts.n00);
            insert("p10", counts.n10);
            insert("p01", counts.n01);
            insert("p11", counts.n11);
            insert("p_multi_single", counts.n_multi_single);
            insert("p_single_multi", counts.n_single_multi);
            insert("p_multi_multi", counts.n_multi_multi);
        }
        Scheme::Red => {
            insert("p00", counts.n00);
            insert("p10", counts.n10);
            insert("p01", counts.n01);
            insert("p11", counts.n11);
        }
    }

    Ok(MonteCarloOutcome {
        scheme: params.scheme(),
        attempts,
        seed,
        rate,
        rate_stderr,
        fidelity,
        infidelity,
        fidelity_stderr,
        frequencies,
        frequency_stderrs,
    })
}

/// How the generation rate is obtained for a power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R0Model {
    /// The swept input is the generation rate itself (default). The power
    /// column of the output carries the swept value.
    Direct,
    /// Heuristic map through the transducer:
    /// `r_0 = C(P) gamma_a gamma_b / (gamma_a + gamma_b)`.
    CooperativityScaled,
}

impl R0Model {
    pub fn label(&self) -> &'static str {
        match self {
            R0Model::Direct => "direct",
            R0Model::CooperativityScaled => "cooperativity_scaled",
        }
    }
}

/// One row of the entanglement power sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementSweepRow {
    pub power_w: f64,
    pub r0_per_s: f64,
    pub rate_per_s: f64,
    pub infidelity: f64,
}

/// Sweep the herald rate and infidelity over the input grid. Under
/// [`R0Model::Direct`] the grid values are generation rates; under
/// [`R0Model::CooperativityScaled`] they are pump powers in W mapped
/// through the transducer's cooperativity.
pub fn sweep_power(
    base: &EntanglementProtocolParams,
    op: &OperatingPoint,
    powers: &[f64],
    model: R0Model,
) -> Result<Vec<EntanglementSweepRow>> {
    if powers.is_empty() {
        return Err(Error::Usage(
            "entanglement sweep needs at least one value".into(),
        ));
    }
    for &p in powers {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::invalid("power", p, "must be >= 0"));
        }
    }
    let rows = parallel::map(powers, |&value| {
        let r0 = match model {
            R0Model::Direct => value,
            R0Model::CooperativityScaled => {
                let driven = op.with_pump_power(value).expect("validated above");
                let gamma_a = op.optical_signal().total_rate();
                let gamma_b = op.microwave().total_rate();
                converter::cooperativity(&driven) * gamma_a * gamma_b / (gamma_a + gamma_b)
            }
        };
        let params = base.with_generation_rate(r0).expect("r0 >= 0");
        let outcome = herald_statistics(&params);
        EntanglementSweepRow {
            power_w: value,
            r0_per_s: r0,
            rate_per_s: outcome.rate,
            infidelity: outcome.infidelity,
        }
    });
    Ok(rows)
}
