//! Weighted-potential machinery and the Nash-equilibrium solver.
//!
//! The stage game is a weighted potential game: any unilateral deviation
//! changes the potential
//! `F(d) = global_error(d) - sum_n cost_coeff_n * d_n / z_n`
//! by exactly `1/z_n` times the deviating organization's utility change,
//! with `z_n = sum_{n'!= n} gamma_{n,n'} (xi - phi_{n'}) - psi_n < 0`.
//! Minimizing `F` over the feasible box therefore yields the equilibrium.
//!
//! The solver classifies each organization against the KKT boundary cases
//! (gradient sign at `d_min` / `d_max`), runs a Jacobi fixed-point iteration
//! on the interior first-order condition, rounds coordinate-wise, and then
//! polishes with a +-1 integer coordinate descent so the returned profile is
//! per-coordinate optimal on the lattice (which per-coordinate strict
//! convexity upgrades to per-coordinate global optimality — the Nash
//! property for integer deviations).
//!
//! [`brute_force_oracle`] exhaustively minimizes `F` on the integer grid and
//! exists purely to check the solver; it shares no code path with it beyond
//! the instance data.

use serde::Serialize;
use thiserror::Error;

use crate::economics::{self, EconError};
use crate::model::{GameInstance, StrategyProfile};
use crate::num::Real;

#[derive(Debug, Error)]
pub enum EquilibriumError {
    #[error("organization {org} has non-negative potential weight z = {z}")]
    NonNegativeWeight { org: usize, z: f64 },
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
    #[error("profiles differ at {0} indices, expected a unilateral deviation")]
    NotUnilateral(usize),
    #[error("fixed-point update undefined: non-positive base {base} for organization {org}")]
    NonPositiveBase { org: usize, base: f64 },
    #[error("fixed-point input u[{org}] = {value} below max(1, d_loc)")]
    BadIterate { org: usize, value: f64 },
    #[error("Hessian is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("factorization broke down numerically at index {index}")]
    FactorizationBreakdown { index: usize },
    #[error("grid of ~{points:.3e} points is too large; coarsen grid_step or reduce N")]
    GridTooLarge { points: f64 },
    #[error(transparent)]
    Econ(#[from] EconError),
}

/// When the solver's outer loop stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Successive potential change at or below `eps_tol` (the default).
    PotentialChange,
    /// Max-norm of the iterate change at or below 1e-6 samples.
    IterateChange,
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SolverSettings<T: Real = f64> {
    pub eps_tol: T,
    pub k_max: usize,
    pub oracle_grid_step: u64,
    pub stop_rule: StopRule,
}

impl<T: Real> Default for SolverSettings<T> {
    fn default() -> Self {
        Self {
            eps_tol: T::of(1e-8),
            k_max: 1000,
            oracle_grid_step: 1,
            stop_rule: StopRule::PotentialChange,
        }
    }
}

impl<T: Real> SolverSettings<T> {
    pub fn validate(&self) -> Result<(), EquilibriumError> {
        if !(self.eps_tol > T::zero()) {
            return Err(EquilibriumError::InvalidSettings("eps_tol must be > 0".into()));
        }
        if self.k_max < 1 {
            return Err(EquilibriumError::InvalidSettings("k_max must be >= 1".into()));
        }
        if self.oracle_grid_step < 1 {
            return Err(EquilibriumError::InvalidSettings("oracle_grid_step must be >= 1".into()));
        }
        Ok(())
    }
}

/// KKT scenario per organization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseLabel {
    LowerBound,
    UpperBound,
    Interior,
}

/// What the solver saw; serializes into `diagnostics.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveDiagnostics<T: Real = f64> {
    pub iterations: usize,
    pub converged: bool,
    pub case_labels: Vec<CaseLabel>,
    /// `F` at the start plus after every iteration (continuous iterates).
    pub potential_trace: Vec<T>,
    /// Gradient of `F` at the final continuous profile, per organization.
    /// For interior organizations this is the stationarity residual.
    pub foc_residuals: Vec<T>,
    /// Final continuous (pre-rounding) profile.
    pub continuous: Vec<T>,
    /// `F` at the returned integer profile.
    pub potential_final: T,
    /// Organizations whose utility is negative at the returned profile.
    pub ir_violations: Vec<usize>,
    /// `|sum of settlement nets|` at the returned profile.
    pub budget_residual: T,
}

/// Potential-game weight `z_n = sum_{n'!=n} gamma_{n,n'} (xi - phi_{n'}) - psi_n`.
pub fn weight_z<T: Real>(g: &GameInstance<T>, n: usize) -> T {
    let mut acc = T::zero();
    for m in 0..g.n() {
        if m != n {
            acc += g.comp.get(n, m) * (g.mech.xi - g.orgs[m].phi);
        }
    }
    acc - g.orgs[n].psi
}

fn weights_checked<T: Real>(g: &GameInstance<T>) -> Result<Vec<T>, EquilibriumError> {
    (0..g.n())
        .map(|n| {
            let z = weight_z(g, n);
            if z < T::zero() {
                Ok(z)
            } else {
                Err(EquilibriumError::NonNegativeWeight { org: n + 1, z: z.as_f64() })
            }
        })
        .collect()
}

/// Weighted potential `F(d) = global_error(d) - sum_n c_n d_n / z_n`.
///
/// Since every `z_n < 0`, the cost sum enters with positive sign.
pub fn potential<T: Real>(g: &GameInstance<T>, s: &StrategyProfile<T>) -> Result<T, EquilibriumError> {
    let z = weights_checked(g)?;
    let eps = economics::global_error(g, s)?;
    let mut cost = T::zero();
    for (i, o) in g.orgs.iter().enumerate() {
        cost += o.gen_cost_coeff() * s.d_gen[i] / z[i];
    }
    Ok(eps - cost)
}

/// Deviation-identity residual `F(s) - F(s_dev) - (U_n(s) - U_n(s_dev)) / z_n`.
///
/// Contract: at most `1e-9` relative to `max(|F(s)|, 1)` for any unilateral
/// deviation. The profiles must agree everywhere except index `n`.
pub fn check_potential_identity<T: Real>(
    g: &GameInstance<T>,
    s: &StrategyProfile<T>,
    s_dev: &StrategyProfile<T>,
    n: usize,
) -> Result<T, EquilibriumError> {
    if s.len() != s_dev.len() {
        return Err(EconError::ProfileLength { got: s_dev.len(), want: s.len() }.into());
    }
    let differing: Vec<usize> = s
        .d_gen
        .iter()
        .zip(&s_dev.d_gen)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect();
    if differing.iter().any(|&i| i != n) {
        return Err(EquilibriumError::NotUnilateral(differing.len()));
    }
    let z = weight_z(g, n);
    let df = potential(g, s)? - potential(g, s_dev)?;
    let du = economics::utility(g, s, n)?.utility - economics::utility(g, s_dev, n)?.utility;
    Ok(df - du / z)
}

/// Mean local error over the roster at profile `s`.
fn mean_error<T: Real>(g: &GameInstance<T>, s: &StrategyProfile<T>) -> Result<T, EquilibriumError> {
    let totals: Vec<T> = g
        .orgs
        .iter()
        .zip(&s.d_gen)
        .map(|(o, &d)| T::of_count(o.d_loc) + d)
        .collect();
    Ok(economics::mean_local_error(&g.orgs, &totals)?)
}

/// `dF/dd_n` at a continuous feasible profile:
/// `-(alpha beta / (N varrho)) (d_loc + d_gen)^(-beta-1) exp((Abar-1)/varrho) - A2_n`.
pub fn potential_gradient<T: Real>(
    g: &GameInstance<T>,
    s: &StrategyProfile<T>,
    n: usize,
) -> Result<T, EquilibriumError> {
    let z = weight_z(g, n);
    if !(z < T::zero()) {
        return Err(EquilibriumError::NonNegativeWeight { org: n + 1, z: z.as_f64() });
    }
    let o = &g.orgs[n];
    let nn = T::of_count(g.n() as u64);
    let abar = mean_error(g, s)?;
    let shared = ((abar - T::one()) / g.mech.varrho).exp();
    let u = T::of_count(o.d_loc) + s.d_gen[n];
    let a2 = o.gen_cost_coeff() / z;
    Ok(-(o.law.alpha * o.law.beta / (nn * g.mech.varrho)) * u.powf(-o.law.beta - T::one()) * shared - a2)
}

/// Certificate from a successful positive-definiteness check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HessianCertificate<T: Real = f64> {
    /// Smallest Cholesky pivot encountered.
    pub min_pivot: T,
}

/// Assemble the Hessian of `F`: shared-exponential times (rank-one `Z Z^T`
/// plus a positive diagonal).
pub fn hessian<T: Real>(g: &GameInstance<T>, s: &StrategyProfile<T>) -> Result<Vec<Vec<T>>, EquilibriumError> {
    weights_checked(g)?;
    let n = g.n();
    let nn = T::of_count(n as u64);
    let rho = g.mech.varrho;
    let abar = mean_error(g, s)?;
    let shared = ((abar - T::one()) / rho).exp();
    let z: Vec<T> = g
        .orgs
        .iter()
        .zip(&s.d_gen)
        .map(|(o, &d)| {
            let u = T::of_count(o.d_loc) + d;
            o.law.alpha * o.law.beta / (nn * rho) * u.powf(-o.law.beta - T::one())
        })
        .collect();
    let mut h = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            h[i][j] = shared * z[i] * z[j];
        }
        let o = &g.orgs[i];
        let u = T::of_count(o.d_loc) + s.d_gen[i];
        let diag = o.law.alpha * o.law.beta * (o.law.beta + T::one()) / (nn * rho)
            * u.powf(-o.law.beta - T::of(2.0));
        h[i][i] += shared * diag;
    }
    Ok(h)
}

/// Certify positive definiteness of the Hessian at `s` via Cholesky.
///
/// `NotPositiveDefinite` and `FactorizationBreakdown` (NaN/Inf pivots) are
/// reported as distinct errors.
pub fn hessian_pd_check<T: Real>(
    g: &GameInstance<T>,
    s: &StrategyProfile<T>,
) -> Result<HessianCertificate<T>, EquilibriumError> {
    let mut h = hessian(g, s)?;
    let n = h.len();
    let mut min_pivot = T::infinity();
    for k in 0..n {
        let pivot = h[k][k];
        if !pivot.is_finite() {
            return Err(EquilibriumError::FactorizationBreakdown { index: k });
        }
        if pivot <= T::zero() {
            return Err(EquilibriumError::NotPositiveDefinite { index: k, pivot: pivot.as_f64() });
        }
        if pivot < min_pivot {
            min_pivot = pivot;
        }
        let root = pivot.sqrt();
        for j in k..n {
            h[k][j] /= root;
        }
        for i in (k + 1)..n {
            let lik = h[k][i];
            for j in i..n {
                let delta = lik * h[k][j];
                h[i][j] -= delta;
            }
        }
    }
    Ok(HessianCertificate { min_pivot })
}

/// KKT sign test for organization `n` at profile `s`: gradient at
/// `d_n := d_min` non-negative means the lower bound is optimal; gradient at
/// `d_n := d_max` non-positive means the upper bound is; interior otherwise.
pub fn classify_case<T: Real>(
    g: &GameInstance<T>,
    s: &StrategyProfile<T>,
    n: usize,
) -> Result<CaseLabel, EquilibriumError> {
    let at_min = potential_gradient(g, &s.with_entry(n, T::of_count(g.mech.d_min)), n)?;
    if at_min >= T::zero() {
        return Ok(CaseLabel::LowerBound);
    }
    let at_max = potential_gradient(g, &s.with_entry(n, T::of_count(g.mech.d_max)), n)?;
    if at_max <= T::zero() {
        return Ok(CaseLabel::UpperBound);
    }
    Ok(CaseLabel::Interior)
}

/// One Jacobi step of the interior fixed-point operator on total dataset
/// sizes `u_n = d_loc_n + d_gen_n`:
/// `M_n(u) = [-(A2_n N varrho / (alpha beta)) exp(-(Abar(u)-1)/varrho)]^(-1/(beta+1))`.
pub fn fpi_update<T: Real>(g: &GameInstance<T>, u: &[T]) -> Result<Vec<T>, EquilibriumError> {
    if u.len() != g.n() {
        return Err(EconError::ProfileLength { got: u.len(), want: g.n() }.into());
    }
    let z = weights_checked(g)?;
    for (i, (&ui, o)) in u.iter().zip(&g.orgs).enumerate() {
        let floor = T::one().max(T::of_count(o.d_loc));
        if !(ui >= floor) {
            return Err(EquilibriumError::BadIterate { org: i + 1, value: ui.as_f64() });
        }
    }
    let nn = T::of_count(g.n() as u64);
    let rho = g.mech.varrho;
    let abar = economics::mean_local_error(&g.orgs, u)?;
    let shrink = (-(abar - T::one()) / rho).exp();
    let mut out = Vec::with_capacity(g.n());
    for (i, o) in g.orgs.iter().enumerate() {
        let a2 = o.gen_cost_coeff() / z[i];
        let base = -a2 * nn * rho / (o.law.alpha * o.law.beta) * shrink;
        if !(base > T::zero()) {
            return Err(EquilibriumError::NonPositiveBase { org: i + 1, base: base.as_f64() });
        }
        out.push(base.powf(-T::one() / (o.law.beta + T::one())));
    }
    Ok(out)
}

fn clamp<T: Real>(x: T, lo: T, hi: T) -> T {
    x.max(lo).min(hi)
}

/// Compute the Nash equilibrium of the instance.
///
/// Runs KKT case classification with the Jacobi fixed-point iteration until
/// the configured stop rule fires (or `k_max` is exhausted, in which case
/// the result is returned with `converged = false`), rounds each coordinate
/// to the better integer neighbor, polishes to a per-coordinate lattice
/// optimum, and verifies individual rationality and budget balance into the
/// diagnostics.
pub fn solve<T: Real>(
    g: &GameInstance<T>,
    settings: &SolverSettings<T>,
) -> Result<(StrategyProfile<T>, SolveDiagnostics<T>), EquilibriumError> {
    settings.validate()?;
    weights_checked(g)?;
    let n = g.n();
    let lo = T::of_count(g.mech.d_min);
    let hi = T::of_count(g.mech.d_max);

    // Midpoint start: u0 = d_loc + (d_min + d_max)/2.
    let mid = (lo + hi) / T::of(2.0);
    let mut current = StrategyProfile::uniform(n, mid);
    let mut f_prev = potential(g, &current)?;
    let mut trace = vec![f_prev];
    let mut converged = false;
    let mut iterations = 0usize;

    while iterations < settings.k_max {
        iterations += 1;
        let totals: Vec<T> = g
            .orgs
            .iter()
            .zip(&current.d_gen)
            .map(|(o, &d)| T::of_count(o.d_loc) + d)
            .collect();
        // Interior update uses the mean error of the current iterate; the
        // boundary tests below re-evaluate it at the moved coordinate.
        let interior = fpi_update(g, &totals)?;
        let mut next = current.clone();
        for i in 0..n {
            next.d_gen[i] = match classify_case(g, &current, i)? {
                CaseLabel::LowerBound => lo,
                CaseLabel::UpperBound => hi,
                CaseLabel::Interior => clamp(interior[i] - T::of_count(g.orgs[i].d_loc), lo, hi),
            };
        }
        let f_new = potential(g, &next)?;
        trace.push(f_new);
        let iterate_delta = next
            .d_gen
            .iter()
            .zip(&current.d_gen)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max);
        current = next;
        let stop = match settings.stop_rule {
            StopRule::PotentialChange => (f_new - f_prev).abs() <= settings.eps_tol,
            StopRule::IterateChange => iterate_delta <= T::of(1e-6),
        };
        f_prev = f_new;
        if stop {
            converged = true;
            break;
        }
    }

    let continuous = current.d_gen.clone();
    let case_labels: Vec<CaseLabel> =
        (0..n).map(|i| classify_case(g, &current, i)).collect::<Result<_, _>>()?;
    let foc_residuals: Vec<T> =
        (0..n).map(|i| potential_gradient(g, &current, i)).collect::<Result<_, _>>()?;

    // Nearest-neighbor rounding: per organization, keep the integer neighbor
    // with the smaller potential (floor on ties), clipped to the box.
    let mut rounded = current;
    for i in 0..n {
        let fl = clamp(rounded.d_gen[i].floor(), lo, hi);
        let ce = clamp(rounded.d_gen[i].ceil(), lo, hi);
        if fl == ce {
            rounded.d_gen[i] = fl;
            continue;
        }
        let f_floor = potential(g, &rounded.with_entry(i, fl))?;
        let f_ceil = potential(g, &rounded.with_entry(i, ce))?;
        rounded.d_gen[i] = if f_ceil < f_floor { ce } else { fl };
    }

    // +-1 integer coordinate descent; terminates because F strictly
    // decreases on every accepted move.
    let mut f_cur = potential(g, &rounded)?;
    loop {
        let mut improved = false;
        for i in 0..n {
            for cand in [rounded.d_gen[i] - T::one(), rounded.d_gen[i] + T::one()] {
                if cand < lo || cand > hi {
                    continue;
                }
                let f_cand = potential(g, &rounded.with_entry(i, cand))?;
                if f_cand < f_cur {
                    rounded.d_gen[i] = cand;
                    f_cur = f_cand;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let breakdowns = economics::utilities(g, &rounded)?;
    let ir_violations: Vec<usize> = breakdowns
        .iter()
        .filter(|b| b.utility < T::zero())
        .map(|b| b.org)
        .collect();
    let budget_residual = economics::settle(g, &rounded)?.total_net().abs();

    let diagnostics = SolveDiagnostics {
        iterations,
        converged,
        case_labels,
        potential_trace: trace,
        foc_residuals,
        continuous,
        potential_final: f_cur,
        ir_violations,
        budget_residual,
    };
    Ok((rounded, diagnostics))
}

/// Exhaustive minimization of `F` over the integer grid
/// `{d_min, d_min+step, ...} ∪ {d_max}` per coordinate.
///
/// Ties break toward the lexicographically smallest profile. Refuses grids
/// beyond ~1e7 points (1e8 for N <= 3) with a size estimate.
pub fn brute_force_oracle<T: Real>(
    g: &GameInstance<T>,
    grid_step: u64,
) -> Result<StrategyProfile<T>, EquilibriumError> {
    if grid_step < 1 {
        return Err(EquilibriumError::InvalidSettings("oracle_grid_step must be >= 1".into()));
    }
    let z = weights_checked(g)?;
    let n = g.n();
    let mut axis: Vec<u64> = (g.mech.d_min..=g.mech.d_max).step_by(grid_step as usize).collect();
    if *axis.last().expect("d_min <= d_max") != g.mech.d_max {
        axis.push(g.mech.d_max);
    }
    let points = (axis.len() as f64).powi(n as i32);
    let cap = if n <= 3 { 1e8 } else { 1e7 };
    if points > cap {
        return Err(EquilibriumError::GridTooLarge { points });
    }

    // F factorizes as exp(-1/rho) * prod_n e_n[d_n] + sum_n w_n[d_n]:
    // precompute both per-axis tables once.
    let nn = T::of_count(n as u64);
    let rho = g.mech.varrho;
    let mut exp_tab: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut cost_tab: Vec<Vec<T>> = Vec::with_capacity(n);
    for (i, o) in g.orgs.iter().enumerate() {
        let mut e = Vec::with_capacity(axis.len());
        let mut w = Vec::with_capacity(axis.len());
        for &v in &axis {
            let u = T::of_count(o.d_loc + v);
            if !(u >= T::one()) {
                return Err(EconError::Domain(format!(
                    "organization {} has zero total data on the grid",
                    i + 1
                ))
                .into());
            }
            let local = o.law.error_unchecked(u);
            e.push((local / (nn * rho)).exp());
            w.push(-(o.gen_cost_coeff() * T::of_count(v)) / z[i]);
        }
        exp_tab.push(e);
        cost_tab.push(w);
    }
    let scale = (-T::one() / rho).exp();

    let mut best_idx = vec![0usize; n];
    let mut best_f = T::infinity();
    let mut idx = vec![0usize; n];
    // Lexicographic odometer with running prefix products/sums; strict
    // improvement keeps the first (smallest) profile among exact ties.
    let mut prefix_prod = vec![T::one(); n + 1];
    let mut prefix_cost = vec![T::zero(); n + 1];
    for a in 0..n {
        prefix_prod[a + 1] = prefix_prod[a] * exp_tab[a][0];
        prefix_cost[a + 1] = prefix_cost[a] + cost_tab[a][0];
    }
    loop {
        let f = scale * prefix_prod[n] + prefix_cost[n];
        if f < best_f {
            best_f = f;
            best_idx.copy_from_slice(&idx);
        }
        // advance odometer from the last axis
        let mut a = n;
        loop {
            if a == 0 {
                let d_gen = best_idx.iter().map(|&j| T::of_count(axis[j])).collect();
                return Ok(StrategyProfile::new(d_gen));
            }
            a -= 1;
            if idx[a] + 1 < axis.len() {
                idx[a] += 1;
                for b in a..n {
                    if b > a {
                        idx[b] = 0;
                    }
                    prefix_prod[b + 1] = prefix_prod[b] * exp_tab[b][idx[b]];
                    prefix_cost[b + 1] = prefix_cost[b] + cost_tab[b][idx[b]];
                }
                break;
            }
        }
    }
}
