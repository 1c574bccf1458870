//! Seeded scenario sampling.
//!
//! Sampling is a pure function of `(seed, spec, n)`: one ChaCha8 stream,
//! fixed draw order (per organization: d_loc, freq, kappa, eta, mu,
//! cost_per_joule, psi, phi; then the gamma upper triangle row by row), and
//! explicit `lo + (hi - lo) * x` scaling of unit uniforms. The fixed order
//! means two specs differing only in the gamma regime produce the *same*
//! roster with pointwise-comparable intensities, which is what the sweep
//! harness relies on when it varies the regime.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_instance, CompetitionMatrix, GameInstance, MechanismParams, OrganizationProfile,
    ScalingLaw, Violation,
};

const MAX_ATTEMPTS: usize = 100;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("sampling range invalid: {0}")]
    BadRange(String),
    #[error("sampling rejected {attempts} times; last violations: {last}")]
    RetriesExhausted { attempts: usize, last: String },
}

/// Closed uniform range for a real-valued parameter. `lo == hi` pins the
/// parameter to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformRange {
    pub lo: f64,
    pub hi: f64,
}

impl UniformRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn check(&self, name: &str) -> Result<(), SampleError> {
        if !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(SampleError::BadRange(format!("{name}: [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.lo + (self.hi - self.lo) * rng.gen::<f64>()
    }
}

/// Named competitive-intensity regimes from the experiment design, plus a
/// custom range escape hatch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRegime {
    /// `U(0, 0.2)` — mean intensity about 0.1.
    Low,
    /// `U(0, 1)` — moderate.
    Moderate,
    /// `U(0.8, 1)` — high.
    High,
    /// Arbitrary sub-range of `[0, 1]`.
    Custom(UniformRange),
}

impl GammaRegime {
    pub fn range(&self) -> UniformRange {
        match self {
            GammaRegime::Low => UniformRange::new(0.0, 0.2),
            GammaRegime::Moderate => UniformRange::new(0.0, 1.0),
            GammaRegime::High => UniformRange::new(0.8, 1.0),
            GammaRegime::Custom(r) => *r,
        }
    }

    /// Column label used in sweep output.
    pub fn label(&self) -> String {
        match self {
            GammaRegime::Low => "low".into(),
            GammaRegime::Moderate => "moderate".into(),
            GammaRegime::High => "high".into(),
            GammaRegime::Custom(r) => format!("u({},{})", r.lo, r.hi),
        }
    }
}

/// Distribution spec for scenario sampling. Defaults follow the experiment
/// parameter table: `d_loc ~ U(10, 3000)` samples, `f ~ U(1, 5)` GHz,
/// `psi ~ U(400, 600)`, `phi ~ U(200, 400)`, `kappa = 1e-28`,
/// `eta = mu = 3e6` cycles/sample; `cost_per_joule ~ U(0.08, 0.12)` is the
/// engine's calibration default (the table does not pin it).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub seed: u64,
    /// `d_loc` bounds, inclusive, in samples.
    pub d_loc: (u64, u64),
    /// Processor frequency range in GHz; converted to Hz on assembly.
    pub freq_ghz: UniformRange,
    pub kappa: UniformRange,
    pub eta: UniformRange,
    pub mu: UniformRange,
    pub cost_per_joule: UniformRange,
    pub psi: UniformRange,
    pub phi: UniformRange,
    pub gamma: GammaRegime,
    /// Law assigned to every sampled organization.
    pub law: ScalingLaw,
}

impl SamplingSpec {
    /// Table-style defaults with the given seed, gamma regime and law.
    pub fn table2(seed: u64, gamma: GammaRegime, law: ScalingLaw) -> Self {
        Self {
            seed,
            d_loc: (10, 3000),
            freq_ghz: UniformRange::new(1.0, 5.0),
            kappa: UniformRange::fixed(1e-28),
            eta: UniformRange::fixed(3e6),
            mu: UniformRange::fixed(3e6),
            cost_per_joule: UniformRange::new(0.08, 0.12),
            psi: UniformRange::new(400.0, 600.0),
            phi: UniformRange::new(200.0, 400.0),
            gamma,
            law,
        }
    }

    pub fn validate(&self) -> Result<(), SampleError> {
        if self.d_loc.0 > self.d_loc.1 {
            return Err(SampleError::BadRange(format!(
                "d_loc: [{}, {}]",
                self.d_loc.0, self.d_loc.1
            )));
        }
        for (name, r) in [
            ("freq_ghz", self.freq_ghz),
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("mu", self.mu),
            ("cost_per_joule", self.cost_per_joule),
            ("psi", self.psi),
            ("phi", self.phi),
        ] {
            r.check(name)?;
        }
        let gr = self.gamma.range();
        gr.check("gamma")?;
        if gr.lo < 0.0 || gr.hi > 1.0 {
            return Err(SampleError::BadRange(format!("gamma: [{}, {}]", gr.lo, gr.hi)));
        }
        Ok(())
    }
}

pub(crate) fn draw_count(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    // inclusive integer draw via a scaled unit uniform; keeps the stream
    // layout identical to the real-valued draws
    let span = (hi - lo + 1) as f64;
    let v = lo + (rng.gen::<f64>() * span) as u64;
    v.min(hi)
}

/// Draw the roster and competition matrix once. Infallible given a valid
/// spec; invariant checking happens in [`sample_instance`].
fn sample_once(spec: &SamplingSpec, n: usize, mech: MechanismParams, rng: &mut ChaCha8Rng) -> GameInstance {
    let orgs: Vec<OrganizationProfile> = (0..n)
        .map(|i| OrganizationProfile {
            id: i + 1,
            d_loc: draw_count(rng, spec.d_loc.0, spec.d_loc.1),
            freq_hz: spec.freq_ghz.draw(rng) * 1e9,
            kappa: spec.kappa.draw(rng),
            eta: spec.eta.draw(rng),
            mu: spec.mu.draw(rng),
            cost_per_joule: spec.cost_per_joule.draw(rng),
            psi: spec.psi.draw(rng),
            phi: spec.phi.draw(rng),
            law: spec.law,
        })
        .collect();
    let gr = spec.gamma.range();
    let mut comp = CompetitionMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            comp.set_pair(i, j, gr.draw(rng));
        }
    }
    GameInstance { orgs, comp, mech }
}

/// Sample a validated instance with `n` organizations.
///
/// Deterministic for a fixed `(spec, n, mech)`. Draws are rejected and
/// retried (fresh draws from the same stream) while `validate_instance`
/// reports violations, up to 100 attempts.
pub fn sample_instance(
    spec: &SamplingSpec,
    n: usize,
    mech: MechanismParams,
) -> Result<GameInstance, SampleError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut last: Vec<Violation> = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        let g = sample_once(spec, n, mech, &mut rng);
        let violations = validate_instance(&g);
        if violations.is_empty() {
            return Ok(g);
        }
        last = violations;
    }
    Err(SampleError::RetriesExhausted {
        attempts: MAX_ATTEMPTS,
        last: last
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })
}

/// Sample only the competition matrix (used when the roster is explicit in
/// the config but the matrix is given as a regime name).
pub fn sample_matrix(seed: u64, n: usize, regime: GammaRegime) -> Result<CompetitionMatrix, SampleError> {
    let gr = regime.range();
    gr.check("gamma")?;
    if gr.lo < 0.0 || gr.hi > 1.0 {
        return Err(SampleError::BadRange(format!("gamma: [{}, {}]", gr.lo, gr.hi)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut comp = CompetitionMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            comp.set_pair(i, j, gr.draw(&mut rng));
        }
    }
    Ok(comp)
}

/// Stable seed mixer for deriving per-cell streams in sweeps.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x9E3779B97F4A7C15u64;
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
