//! Per-round workflow driver, baseline strategies, and the sweep harness.
//!
//! A round fixes the instance, selects a strategy per the chosen method
//! (equilibrium solve for `cocogen`, degenerate profiles for the baselines),
//! evaluates the full economics including settlement, and reports everything
//! in a [`RoundReport`]. The sweep harness runs the Cartesian product of
//! gamma regimes, heterogeneity presets, compensation rates, methods and
//! seeds; cells are independent and the output table is byte-identical
//! across runs for a fixed spec.

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::economics::{self, EconError, SettlementLedger, UtilityBreakdown};
use crate::equilibrium::{self, EquilibriumError, SolveDiagnostics, SolverSettings};
use crate::model::{GameInstance, MechanismParams, StrategyProfile};
use crate::presets;
use crate::sample::{self, GammaRegime, SampleError, SamplingSpec};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Econ(#[from] EconError),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("sweep spec invalid: {0}")]
    BadSpec(String),
}

/// Strategy-selection method for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Equilibrium generation with competition and redistribution.
    Cocogen,
    /// Vanilla CFL: no generation and competition ignored.
    Vcfl,
    /// No competition: intensities zeroed, generation still optimized.
    Wco,
    /// No data generation, competition and redistribution still accounted.
    Wdg,
    /// Uniformly random generation amounts.
    Radg,
    /// Maximum generation for everyone.
    Madg,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Cocogen, Method::Vcfl, Method::Wco, Method::Wdg, Method::Radg, Method::Madg];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Cocogen => "cocogen",
            Method::Vcfl => "vcfl",
            Method::Wco => "wco",
            Method::Wdg => "wdg",
            Method::Radg => "radg",
            Method::Madg => "madg",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Everything observed in one training round.
#[derive(Debug, Clone, Serialize)]
pub struct RoundReport {
    /// 1-based round index.
    pub round: usize,
    pub method: Method,
    pub strategy: StrategyProfile,
    pub breakdowns: Vec<UtilityBreakdown>,
    pub ledger: SettlementLedger,
    pub welfare: f64,
    pub global_err: f64,
    /// False only when the equilibrium solver hit its iteration cap.
    pub converged: bool,
    /// Present for solver-backed methods.
    pub solver: Option<SolveDiagnostics>,
}

const SALT_RADG: u64 = 0x7261_6447; // "radG"

fn radg_profile(g: &GameInstance, seed: u64, round: usize) -> StrategyProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(sample::mix_seed(&[seed, SALT_RADG, round as u64]));
    let d = (0..g.n())
        .map(|_| sample::draw_count(&mut rng, g.mech.d_min, g.mech.d_max) as f64)
        .collect();
    StrategyProfile::new(d)
}

/// Run one round of the given method. Deterministic per `(g, method, seed,
/// round)`; solver non-convergence is reported, not raised.
pub fn run_round(
    g: &GameInstance,
    method: Method,
    seed: u64,
    settings: &SolverSettings,
    round: usize,
) -> Result<RoundReport, SimError> {
    // Which instance the round is economically evaluated on: VCFL and WCO
    // ignore competition entirely, so their reports use the zeroed clone.
    let effective: GameInstance = match method {
        Method::Vcfl | Method::Wco => g.without_competition(),
        _ => g.clone(),
    };
    let mut solver_diag = None;
    let mut converged = true;
    let strategy = match method {
        Method::Vcfl | Method::Wdg => StrategyProfile::zeros(g.n()),
        Method::Madg => StrategyProfile::uniform(g.n(), g.mech.d_max as f64),
        Method::Radg => radg_profile(g, seed, round),
        Method::Cocogen | Method::Wco => {
            let (s, diag) = equilibrium::solve(&effective, settings)?;
            converged = diag.converged;
            solver_diag = Some(diag);
            s
        }
    };
    let breakdowns = economics::utilities(&effective, &strategy)?;
    let welfare = breakdowns.iter().map(|b| b.utility).sum();
    let ledger = economics::settle(&effective, &strategy)?;
    let global_err = economics::global_error(&effective, &strategy)?;
    Ok(RoundReport {
        round,
        method,
        strategy,
        breakdowns,
        ledger,
        welfare,
        global_err,
        converged,
        solver: solver_diag,
    })
}

/// The no-competition baseline: intensities zeroed, equilibrium re-solved.
pub fn run_baseline_wco(g: &GameInstance, settings: &SolverSettings) -> Result<RoundReport, SimError> {
    run_round(g, Method::Wco, 0, settings, 1)
}

/// The no-generation baseline: zero generation with full competition
/// accounting (all contribution gaps vanish, so transfers do too).
pub fn run_baseline_wdg(g: &GameInstance) -> Result<RoundReport, SimError> {
    run_round(g, Method::Wdg, 0, &SolverSettings::default(), 1)
}

/// Sweep definition: Cartesian product over regimes, presets, compensation
/// rates, methods and seeds, each cell running `rounds` rounds.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub gamma_regimes: Vec<GammaRegime>,
    /// Names of shipped scaling-law presets.
    pub presets: Vec<String>,
    pub xi_grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub rounds: usize,
    pub n_orgs: usize,
    /// Range template; seed, gamma regime and law are overridden per cell.
    pub base_sampling: SamplingSpec,
    /// Mechanism template; xi is overridden per cell.
    pub mechanism: MechanismParams,
    pub solver: SolverSettings,
}

impl SweepSpec {
    /// Paper-shaped defaults: three regimes x default preset trio, xi = 90,
    /// all six methods.
    pub fn default_grid(seeds: Vec<u64>) -> Self {
        Self {
            gamma_regimes: vec![GammaRegime::Low, GammaRegime::Moderate, GammaRegime::High],
            presets: presets::DEFAULT_SWEEP_PRESETS.iter().map(|s| s.to_string()).collect(),
            xi_grid: vec![90.0],
            methods: Method::ALL.to_vec(),
            seeds,
            rounds: 1,
            n_orgs: 10,
            base_sampling: SamplingSpec::table2(
                0,
                GammaRegime::Moderate,
                presets::law_preset("medium-0.5").expect("shipped preset"),
            ),
            mechanism: MechanismParams {
                xi: 90.0,
                epsilon0: 1.0,
                varrho: 6.0,
                c0: 1.0,
                d_min: 0,
                d_max: 6000,
            },
            solver: SolverSettings::default(),
        }
    }

    /// Structural validation plus rate-cap advisories (xi values that can
    /// exceed the smallest sampled phi are flagged, not rejected — cells
    /// still run while the potential weights stay negative).
    pub fn validate(&self) -> Result<Vec<String>, SimError> {
        if self.gamma_regimes.is_empty()
            || self.presets.is_empty()
            || self.xi_grid.is_empty()
            || self.methods.is_empty()
            || self.seeds.is_empty()
        {
            return Err(SimError::BadSpec(
                "gamma_regimes, presets, xi_grid, methods and seeds must be non-empty".into(),
            ));
        }
        if self.rounds < 1 {
            return Err(SimError::BadSpec("rounds must be >= 1".into()));
        }
        if self.n_orgs < 2 {
            return Err(SimError::BadSpec("n_orgs must be >= 2".into()));
        }
        for p in &self.presets {
            if presets::law_preset(p).is_none() {
                return Err(SimError::UnknownPreset(p.clone()));
            }
        }
        let mut warnings = Vec::new();
        for &xi in &self.xi_grid {
            if xi > self.base_sampling.phi.lo {
                warnings.push(format!(
                    "xi = {xi} can exceed the smallest sampled phi (phi range starts at {}); \
                     the rate cap may be violated in some cells",
                    self.base_sampling.phi.lo
                ));
            }
        }
        Ok(warnings)
    }
}

/// One output row; `error` is set (and the metrics absent) when the cell
/// could not run.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub regime: String,
    pub preset: String,
    pub xi: f64,
    pub method: Method,
    pub seed: u64,
    pub welfare: Option<f64>,
    pub mean_dgen: Option<f64>,
    pub min_utility: Option<f64>,
    pub ir_violations: Option<usize>,
    pub converged: Option<bool>,
    pub error: Option<String>,
}

/// Sweep result: rows in deterministic (regime, preset, xi, method, seed)
/// order, advisories, and optionally the full per-cell round reports.
#[derive(Debug)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
    pub reports: Vec<(SweepRow, Vec<RoundReport>)>,
}

impl SweepOutput {
    pub fn succeeded(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_none()).count()
    }
}

const SALT_ROSTER: u64 = 0x726f_7374; // "rost"

/// Run the sweep. Instances are shared across xi values and methods for a
/// fixed (regime, preset, seed) cell block, and rosters are additionally
/// identical across regimes (only the intensities move), so regime effects
/// are comparative statics on the same organizations.
pub fn run_sweep(spec: &SweepSpec, collect_reports: bool) -> Result<SweepOutput, SimError> {
    let warnings = spec.validate()?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();

    for regime in spec.gamma_regimes.iter() {
        for (pi, preset) in spec.presets.iter().enumerate() {
            let law = presets::law_preset(preset).expect("validated above");
            for &seed in &spec.seeds {
                // xi = 0 always satisfies the rate cap, so the base draw never
                // retries and the roster depends only on (seed, preset).
                let sampling = SamplingSpec {
                    seed: sample::mix_seed(&[seed, pi as u64, SALT_ROSTER]),
                    gamma: *regime,
                    law,
                    ..spec.base_sampling
                };
                let base_mech = MechanismParams { xi: 0.0, ..spec.mechanism };
                let base = match sample::sample_instance(&sampling, spec.n_orgs, base_mech) {
                    Ok(g) => g,
                    Err(e) => {
                        for &xi in &spec.xi_grid {
                            for &method in &spec.methods {
                                rows.push(error_row(regime, preset, xi, method, seed, e.to_string()));
                            }
                        }
                        continue;
                    }
                };
                for &xi in &spec.xi_grid {
                    let cell_g = base.with_xi(xi);
                    let bad_weight = (0..cell_g.n())
                        .map(|n| equilibrium::weight_z(&cell_g, n))
                        .any(|z| !(z < 0.0));
                    for &method in &spec.methods {
                        if bad_weight {
                            rows.push(error_row(
                                regime,
                                preset,
                                xi,
                                method,
                                seed,
                                "non-negative potential weight at this xi".into(),
                            ));
                            continue;
                        }
                        match run_cell(&cell_g, method, seed, spec) {
                            Ok((row_metrics, cell_reports)) => {
                                let row = SweepRow {
                                    regime: regime.label(),
                                    preset: preset.clone(),
                                    xi,
                                    method,
                                    seed,
                                    welfare: Some(row_metrics.0),
                                    mean_dgen: Some(row_metrics.1),
                                    min_utility: Some(row_metrics.2),
                                    ir_violations: Some(row_metrics.3),
                                    converged: Some(row_metrics.4),
                                    error: None,
                                };
                                if collect_reports {
                                    reports.push((row.clone(), cell_reports));
                                }
                                rows.push(row);
                            }
                            Err(e) => {
                                rows.push(error_row(regime, preset, xi, method, seed, e.to_string()))
                            }
                        }
                    }
                }
            }
        }
    }

    // Emit in header order: regime, preset, xi, method, seed.
    let regime_idx = |label: &str| {
        spec.gamma_regimes.iter().position(|r| r.label() == label).unwrap_or(usize::MAX)
    };
    let method_idx =
        |m: Method| spec.methods.iter().position(|&x| x == m).unwrap_or(usize::MAX);
    rows.sort_by(|a, b| {
        (
            regime_idx(&a.regime),
            spec.presets.iter().position(|p| *p == a.preset),
            spec.xi_grid.iter().position(|x| *x == a.xi),
            method_idx(a.method),
            spec.seeds.iter().position(|s| *s == a.seed),
        )
            .cmp(&(
                regime_idx(&b.regime),
                spec.presets.iter().position(|p| *p == b.preset),
                spec.xi_grid.iter().position(|x| *x == b.xi),
                method_idx(b.method),
                spec.seeds.iter().position(|s| *s == b.seed),
            ))
    });
    Ok(SweepOutput { rows, warnings, reports })
}

fn error_row(
    regime: &GammaRegime,
    preset: &str,
    xi: f64,
    method: Method,
    seed: u64,
    error: String,
) -> SweepRow {
    SweepRow {
        regime: regime.label(),
        preset: preset.to_string(),
        xi,
        method,
        seed,
        welfare: None,
        mean_dgen: None,
        min_utility: None,
        ir_violations: None,
        converged: None,
        error: Some(error),
    }
}

type CellMetrics = (f64, f64, f64, usize, bool);

fn run_cell(
    g: &GameInstance,
    method: Method,
    seed: u64,
    spec: &SweepSpec,
) -> Result<(CellMetrics, Vec<RoundReport>), SimError> {
    let mut reports = Vec::with_capacity(spec.rounds);
    for round in 1..=spec.rounds {
        reports.push(run_round(g, method, seed, &spec.solver, round)?);
    }
    let rounds = reports.len() as f64;
    let welfare = reports.iter().map(|r| r.welfare).sum::<f64>() / rounds;
    let mean_dgen = reports.iter().map(|r| r.strategy.mean()).sum::<f64>() / rounds;
    let min_utility = reports
        .iter()
        .flat_map(|r| r.breakdowns.iter().map(|b| b.utility))
        .fold(f64::INFINITY, f64::min);
    let ir_violations = reports
        .iter()
        .flat_map(|r| r.breakdowns.iter())
        .filter(|b| b.utility < 0.0)
        .count();
    let converged = reports.iter().all(|r| r.converged);
    Ok(((welfare, mean_dgen, min_utility, ir_violations, converged), reports))
}
