//! Domain types and instance validation.
//!
//! A [`GameInstance`] bundles the organization roster, the pairwise
//! competitive-intensity matrix and the mechanism parameters. Construction is
//! unchecked; [`validate_instance`] returns the full list of invariant
//! violations and an empty list certifies the instance for every other
//! module (the solver in particular relies on `z_n < 0`).

use serde::{Deserialize, Serialize};

use crate::equilibrium::weight_z;
use crate::num::Real;

/// Power-law surrogate `alpha * d^(-beta) - delta` mapping a training-set
/// size to the local model error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw<T: Real = f64> {
    /// Error-scale constant, `> 0`.
    pub alpha: T,
    /// Curve steepness, `> 0` (dimensionless).
    pub beta: T,
    /// Error offset, `>= 0`.
    pub delta: T,
}

impl<T: Real> ScalingLaw<T> {
    pub fn new(alpha: T, beta: T, delta: T) -> Self {
        Self { alpha, beta, delta }
    }

    /// Raw surrogate value. No domain check; callers guarantee `d_total >= 1`
    /// (the checked entry point is `economics::local_error`).
    #[inline]
    pub(crate) fn error_unchecked(&self, d_total: T) -> T {
        self.alpha * d_total.powf(-self.beta) - self.delta
    }
}

/// One silo: local data size, compute parameters and economic valuations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrganizationProfile<T: Real = f64> {
    /// 1-based index in the roster.
    pub id: usize,
    /// Local (non-synthetic) sample count.
    pub d_loc: u64,
    /// Processor frequency in Hz.
    pub freq_hz: T,
    /// Effective capacitance coefficient of the compute chipset.
    pub kappa: T,
    /// CPU cycles needed to train on one sample.
    pub eta: T,
    /// CPU cycles needed to generate one sample.
    pub mu: T,
    /// Operating cost per Joule.
    pub cost_per_joule: T,
    /// Revenue per unit of global-model performance.
    pub psi: T,
    /// Revenue a rival extracts per unit of this organization's contribution gap.
    pub phi: T,
    /// Learning-curve surrogate for this organization's mixed dataset.
    pub law: ScalingLaw<T>,
}

impl<T: Real> OrganizationProfile<T> {
    /// Cost coefficient per generated sample as it appears in the potential:
    /// `kappa * C^cmp * (eta + mu) * f^2`.
    #[inline]
    pub(crate) fn gen_cost_coeff(&self) -> T {
        self.kappa * self.cost_per_joule * (self.eta + self.mu) * self.freq_hz * self.freq_hz
    }
}

/// Symmetric pairwise competitive intensities in `[0, 1]` with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Vec<T>>",
    into = "Vec<Vec<T>>",
    bound(serialize = "T: Serialize + Clone", deserialize = "T: Deserialize<'de>")
)]
pub struct CompetitionMatrix<T: Real = f64> {
    n: usize,
    gamma: Vec<T>,
}

impl<T: Real> CompetitionMatrix<T> {
    /// All-zero matrix (no rivalry).
    pub fn zeros(n: usize) -> Self {
        Self { n, gamma: vec![T::zero(); n * n] }
    }

    /// Build from rows; only squareness is enforced here, the remaining
    /// invariants are reported by [`validate_instance`].
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, String> {
        let n = rows.len();
        let mut gamma = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(format!("competition row {} has {} entries, expected {}", i + 1, row.len(), n));
            }
            gamma.extend(row.iter().copied());
        }
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.gamma[i * self.n + j]
    }

    /// Set both `(i, j)` and `(j, i)`.
    pub fn set_pair(&mut self, i: usize, j: usize, value: T) {
        self.gamma[i * self.n + j] = value;
        self.gamma[j * self.n + i] = value;
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Mean of the off-diagonal entries (the paper's regime statistic).
    pub fn mean_off_diagonal(&self) -> T {
        if self.n < 2 {
            return T::zero();
        }
        let mut sum = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    sum += self.get(i, j);
                }
            }
        }
        sum / T::of_count((self.n * (self.n - 1)) as u64)
    }
}

impl<T: Real> TryFrom<Vec<Vec<T>>> for CompetitionMatrix<T> {
    type Error = String;
    fn try_from(rows: Vec<Vec<T>>) -> Result<Self, String> {
        Self::from_rows(rows)
    }
}

impl<T: Real> From<CompetitionMatrix<T>> for Vec<Vec<T>> {
    fn from(m: CompetitionMatrix<T>) -> Self {
        m.rows()
    }
}

/// Mechanism-level parameters shared by all organizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams<T: Real = f64> {
    /// Payoff compensation rate per contribution-gap unit.
    pub xi: T,
    /// Error of the untrained global model, in `(0, 1]`.
    pub epsilon0: T,
    /// Global-error tuning parameter, `> 0`.
    pub varrho: T,
    /// Flat per-round server fee.
    pub c0: T,
    /// Lower bound on generated samples per organization.
    pub d_min: u64,
    /// Upper bound on generated samples per organization, `> d_min`.
    pub d_max: u64,
}

/// Full stage-game description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize + Clone",
    deserialize = "T: Deserialize<'de>"
))]
pub struct GameInstance<T: Real = f64> {
    pub orgs: Vec<OrganizationProfile<T>>,
    pub comp: CompetitionMatrix<T>,
    pub mech: MechanismParams<T>,
}

impl<T: Real> GameInstance<T> {
    pub fn n(&self) -> usize {
        self.orgs.len()
    }

    /// Copy with all competitive intensities zeroed (the WCO/VCFL variant).
    pub fn without_competition(&self) -> Self {
        Self { orgs: self.orgs.clone(), comp: CompetitionMatrix::zeros(self.n()), mech: self.mech }
    }

    /// Copy with a different payoff compensation rate.
    pub fn with_xi(&self, xi: T) -> Self {
        let mut g = self.clone();
        g.mech.xi = xi;
        g
    }
}

/// Per-organization synthetic-data counts. The game plays over integers;
/// the relaxed problem and the solver iterate over the same type with
/// fractional entries, and rounding restores integrality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile<T: Real = f64> {
    pub d_gen: Vec<T>,
}

impl<T: Real> StrategyProfile<T> {
    pub fn new(d_gen: Vec<T>) -> Self {
        Self { d_gen }
    }

    /// Profile with every organization at the same level.
    pub fn uniform(n: usize, level: T) -> Self {
        Self { d_gen: vec![level; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::uniform(n, T::zero())
    }

    pub fn len(&self) -> usize {
        self.d_gen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_gen.is_empty()
    }

    /// Box-feasibility against the instance bounds.
    pub fn in_bounds(&self, mech: &MechanismParams<T>) -> bool {
        let lo = T::of_count(mech.d_min);
        let hi = T::of_count(mech.d_max);
        self.d_gen.iter().all(|&d| d >= lo && d <= hi)
    }

    /// True when every entry is an integer value.
    pub fn is_integral(&self) -> bool {
        self.d_gen.iter().all(|&d| d == d.floor())
    }

    /// Copy with organization `n` moved to `value`.
    pub fn with_entry(&self, n: usize, value: T) -> Self {
        let mut s = self.clone();
        s.d_gen[n] = value;
        s
    }

    pub fn mean(&self) -> T {
        if self.d_gen.is_empty() {
            return T::zero();
        }
        self.d_gen.iter().copied().sum::<T>() / T::of_count(self.d_gen.len() as u64)
    }
}

/// Where a validation finding is anchored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ViolationScope {
    /// Roster entry, 1-based.
    Org(usize),
    /// Competition-matrix entry, 1-based pair.
    Pair(usize, usize),
    Mechanism,
    Instance,
}

/// One structured validation finding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub scope: ViolationScope,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.scope {
            ViolationScope::Org(i) => write!(f, "org {}: {}", i, self.message),
            ViolationScope::Pair(i, j) => write!(f, "gamma[{}][{}]: {}", i, j, self.message),
            ViolationScope::Mechanism => write!(f, "mechanism: {}", self.message),
            ViolationScope::Instance => write!(f, "instance: {}", self.message),
        }
    }
}

fn org_violation(i: usize, message: impl Into<String>) -> Violation {
    Violation { scope: ViolationScope::Org(i + 1), message: message.into() }
}

/// Check every instance invariant and return one finding per failure.
///
/// An empty list certifies: per-type field invariants, a symmetric
/// competition matrix with zero diagonal and entries in `[0, 1]`,
/// `xi <= min phi`, and `z_n < 0` for every organization.
pub fn validate_instance<T: Real>(g: &GameInstance<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.n();

    if n < 2 {
        out.push(Violation {
            scope: ViolationScope::Instance,
            message: format!("at least 2 organizations required, got {}", n),
        });
    }

    for (i, o) in g.orgs.iter().enumerate() {
        if o.id != i + 1 {
            out.push(org_violation(i, format!("id {} does not match roster position {}", o.id, i + 1)));
        }
        for (name, v) in [
            ("freq_hz", o.freq_hz),
            ("kappa", o.kappa),
            ("eta", o.eta),
            ("mu", o.mu),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                out.push(org_violation(i, format!("{name} must be strictly positive and finite")));
            }
        }
        for (name, v) in [("cost_per_joule", o.cost_per_joule), ("psi", o.psi), ("phi", o.phi)] {
            if !(v >= T::zero()) || !v.is_finite() {
                out.push(org_violation(i, format!("{name} must be non-negative and finite")));
            }
        }
        if !(o.law.alpha > T::zero()) || !o.law.alpha.is_finite() {
            out.push(org_violation(i, "law.alpha must be strictly positive and finite"));
        }
        if !(o.law.beta > T::zero()) || !o.law.beta.is_finite() {
            out.push(org_violation(i, "law.beta must be strictly positive and finite"));
        }
        if !(o.law.delta >= T::zero()) || !o.law.delta.is_finite() {
            out.push(org_violation(i, "law.delta must be non-negative and finite"));
        }
    }

    if g.comp.n() != n {
        out.push(Violation {
            scope: ViolationScope::Instance,
            message: format!("competition matrix is {}x{} but roster has {} organizations", g.comp.n(), g.comp.n(), n),
        });
        return out; // index-dependent checks below would be meaningless
    }

    for i in 0..n {
        if g.comp.get(i, i) != T::zero() {
            out.push(Violation {
                scope: ViolationScope::Pair(i + 1, i + 1),
                message: "diagonal entry must be zero".into(),
            });
        }
        for j in (i + 1)..n {
            let a = g.comp.get(i, j);
            let b = g.comp.get(j, i);
            if a != b {
                out.push(Violation {
                    scope: ViolationScope::Pair(i + 1, j + 1),
                    message: format!("asymmetric: {} vs {}", a, b),
                });
            }
            for (v, (r, c)) in [(a, (i, j)), (b, (j, i))] {
                if !(v >= T::zero() && v <= T::one()) {
                    out.push(Violation {
                        scope: ViolationScope::Pair(r + 1, c + 1),
                        message: format!("intensity {} outside [0, 1]", v),
                    });
                }
            }
        }
    }

    let m = &g.mech;
    if !(m.xi >= T::zero()) || !m.xi.is_finite() {
        out.push(Violation { scope: ViolationScope::Mechanism, message: "xi must be non-negative and finite".into() });
    }
    if !(m.epsilon0 > T::zero() && m.epsilon0 <= T::one()) {
        out.push(Violation { scope: ViolationScope::Mechanism, message: format!("epsilon0 {} outside (0, 1]", m.epsilon0) });
    }
    if !(m.varrho > T::zero()) || !m.varrho.is_finite() {
        out.push(Violation { scope: ViolationScope::Mechanism, message: "varrho must be strictly positive and finite".into() });
    }
    if !(m.c0 >= T::zero()) || !m.c0.is_finite() {
        out.push(Violation { scope: ViolationScope::Mechanism, message: "c0 must be non-negative and finite".into() });
    }
    if m.d_min >= m.d_max {
        out.push(Violation {
            scope: ViolationScope::Mechanism,
            message: format!("d_min {} must be strictly below d_max {}", m.d_min, m.d_max),
        });
    }

    // Rate cap: no rival compensates above the benefit it extracts.
    if let Some(min_phi) = g.orgs.iter().map(|o| o.phi).fold(None, |acc: Option<T>, v| {
        Some(match acc {
            Some(a) if a <= v => a,
            _ => v,
        })
    }) {
        if m.xi > min_phi {
            out.push(Violation {
                scope: ViolationScope::Mechanism,
                message: format!("xi {} exceeds phi (min phi = {})", m.xi, min_phi),
            });
        }
    }

    // Potential-game weights must be strictly negative.
    if g.comp.n() == n {
        for i in 0..n {
            let z = weight_z(g, i);
            if !(z < T::zero()) {
                out.push(org_violation(i, format!("weight z = {} is not strictly negative", z)));
            }
        }
    }

    out
}
