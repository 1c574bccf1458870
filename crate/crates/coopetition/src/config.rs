//! Configuration schema and loading.
//!
//! One UTF-8 JSON document drives every subcommand. Top-level keys:
//! `organizations` (explicit roster) or `sampling` (seeded draws) — exactly
//! one of the two; `competition` (explicit matrix or a regime name, only
//! meaningful with an explicit roster since sampling carries its own
//! regime); `mechanism`; optional `solver`; optional `sweep`. Unknown keys
//! are rejected everywhere so a typo cannot silently fall back to a default.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{SolverSettings, StopRule};
use crate::model::{
    validate_instance, CompetitionMatrix, GameInstance, MechanismParams, OrganizationProfile,
    ScalingLaw, Violation,
};
use crate::presets;
use crate::sample::{self, GammaRegime, SampleError, SamplingSpec, UniformRange};
use crate::simulation::{Method, SweepSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config invalid: {0}")]
    Schema(String),
    #[error("instance validation failed:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub organizations: Option<Vec<OrgConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub competition: Option<CompetitionConfig>,
    pub mechanism: MechanismConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrgConfig {
    pub d_loc: u64,
    /// Frequency in GHz (converted to Hz on assembly). Exactly one of
    /// `freq_ghz` and `freq_hz` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_ghz: Option<f64>,
    /// Frequency in Hz, taken as-is; what `--dump-effective-config` emits so
    /// round-trips are exact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_hz: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_cycles")]
    pub eta: f64,
    #[serde(default = "default_cycles")]
    pub mu: f64,
    #[serde(default = "default_cost_per_joule")]
    pub cost_per_joule: f64,
    pub psi: f64,
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<ScalingLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law_preset: Option<String>,
}

fn default_kappa() -> f64 {
    1e-28
}
fn default_cycles() -> f64 {
    3e6
}
fn default_cost_per_joule() -> f64 {
    0.1
}

/// `[lo, hi]` pairs in the config map onto uniform ranges.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub seed: u64,
    #[serde(default = "default_n_orgs")]
    pub n_orgs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law_preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<ScalingLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_loc: Option<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq_ghz: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_per_joule: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaRegimeConfig>,
}

fn default_n_orgs() -> usize {
    10
}

/// Regime by name (`"low" | "moderate" | "high"`) or custom `[lo, hi]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaRegimeConfig {
    Name(String),
    Range([f64; 2]),
}

impl GammaRegimeConfig {
    pub fn resolve(&self) -> Result<GammaRegime, ConfigError> {
        match self {
            GammaRegimeConfig::Name(n) => match n.as_str() {
                "low" => Ok(GammaRegime::Low),
                "moderate" => Ok(GammaRegime::Moderate),
                "high" => Ok(GammaRegime::High),
                other => Err(ConfigError::Schema(format!(
                    "unknown gamma regime {other:?}; want low, moderate, high or [lo, hi]"
                ))),
            },
            GammaRegimeConfig::Range([lo, hi]) => {
                Ok(GammaRegime::Custom(UniformRange::new(*lo, *hi)))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompetitionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<GammaRegimeConfig>,
    /// Seed for regime-sampled matrices with an explicit roster.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismConfig {
    pub xi: f64,
    #[serde(default = "default_epsilon0")]
    pub epsilon0: f64,
    #[serde(default = "default_varrho")]
    pub varrho: f64,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default)]
    pub d_min: u64,
    #[serde(default = "default_d_max")]
    pub d_max: u64,
}

fn default_epsilon0() -> f64 {
    1.0
}
fn default_varrho() -> f64 {
    6.0
}
fn default_c0() -> f64 {
    1.0
}
fn default_d_max() -> u64 {
    6000
}

impl MechanismConfig {
    pub fn to_params(&self) -> MechanismParams {
        MechanismParams {
            xi: self.xi,
            epsilon0: self.epsilon0,
            varrho: self.varrho,
            c0: self.c0,
            d_min: self.d_min,
            d_max: self.d_max,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_rule: Option<StopRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_grid_step: Option<u64>,
}

impl SolverConfig {
    pub fn to_settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            eps_tol: self.eps_tol.unwrap_or(d.eps_tol),
            k_max: self.k_max.unwrap_or(d.k_max),
            stop_rule: self.stop_rule.unwrap_or(d.stop_rule),
            oracle_grid_step: self.oracle_grid_step.unwrap_or(d.oracle_grid_step),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma_regimes: Vec<GammaRegimeConfig>,
    /// Shipped preset names; defaults to the medium trio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presets: Option<Vec<String>>,
    pub xi_grid: Vec<f64>,
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_n_orgs")]
    pub n_orgs: usize,
}

fn default_rounds() -> usize {
    1
}

/// Parse a config document. Syntax errors carry line/column.
pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Read and parse a config file.
pub fn load_config(path: &std::path::Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn resolve_law(
    law: &Option<ScalingLaw>,
    preset: &Option<String>,
    context: &str,
) -> Result<ScalingLaw, ConfigError> {
    match (law, preset) {
        (Some(l), None) => Ok(*l),
        (None, Some(p)) => presets::law_preset(p).ok_or_else(|| {
            ConfigError::Schema(format!(
                "{context}: unknown law_preset {p:?} (shipped: {})",
                presets::preset_names().join(", ")
            ))
        }),
        (Some(_), Some(_)) => Err(ConfigError::Schema(format!(
            "{context}: give law or law_preset, not both"
        ))),
        (None, None) => Err(ConfigError::Schema(format!(
            "{context}: law or law_preset required"
        ))),
    }
}

fn sampling_spec_from(cfg: &SamplingConfig, seed_override: Option<u64>) -> Result<SamplingSpec, ConfigError> {
    let law = resolve_law(&cfg.law, &cfg.law_preset, "sampling")?;
    let gamma = match &cfg.gamma {
        Some(g) => g.resolve()?,
        None => GammaRegime::Moderate,
    };
    let r = |o: &Option<[f64; 2]>, d: UniformRange| match o {
        Some([lo, hi]) => UniformRange::new(*lo, *hi),
        None => d,
    };
    let base = SamplingSpec::table2(seed_override.unwrap_or(cfg.seed), gamma, law);
    Ok(SamplingSpec {
        d_loc: cfg.d_loc.map(|[lo, hi]| (lo, hi)).unwrap_or(base.d_loc),
        freq_ghz: r(&cfg.freq_ghz, base.freq_ghz),
        kappa: r(&cfg.kappa, base.kappa),
        eta: r(&cfg.eta, base.eta),
        mu: r(&cfg.mu, base.mu),
        cost_per_joule: r(&cfg.cost_per_joule, base.cost_per_joule),
        psi: r(&cfg.psi, base.psi),
        phi: r(&cfg.phi, base.phi),
        ..base
    })
}

/// Build the validated instance and solver settings a solve/simulate run
/// needs. `seed_override` replaces the sampling (or regime) seed.
pub fn build_instance(
    cfg: &ConfigFile,
    seed_override: Option<u64>,
) -> Result<(GameInstance, SolverSettings), ConfigError> {
    let mech = cfg.mechanism.to_params();
    let settings = cfg.solver.as_ref().map(|s| s.to_settings()).unwrap_or_default();

    let g = match (&cfg.organizations, &cfg.sampling) {
        (Some(orgs), None) => {
            let roster: Vec<OrganizationProfile> = orgs
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    let freq_hz = match (o.freq_hz, o.freq_ghz) {
                        (Some(hz), None) => hz,
                        (None, Some(ghz)) => ghz * 1e9,
                        _ => {
                            return Err(ConfigError::Schema(format!(
                                "organizations[{i}]: give exactly one of freq_hz or freq_ghz"
                            )))
                        }
                    };
                    Ok(OrganizationProfile {
                        id: i + 1,
                        d_loc: o.d_loc,
                        freq_hz,
                        kappa: o.kappa,
                        eta: o.eta,
                        mu: o.mu,
                        cost_per_joule: o.cost_per_joule,
                        psi: o.psi,
                        phi: o.phi,
                        law: resolve_law(&o.law, &o.law_preset, &format!("organizations[{i}]"))?,
                    })
                })
                .collect::<Result<_, ConfigError>>()?;
            let comp = match &cfg.competition {
                Some(CompetitionConfig { matrix: Some(m), regime: None, seed: None }) => {
                    CompetitionMatrix::from_rows(m.clone()).map_err(ConfigError::Schema)?
                }
                Some(CompetitionConfig { matrix: None, regime: Some(r), seed }) => {
                    let s = seed_override
                        .or(*seed)
                        .ok_or_else(|| ConfigError::Schema("competition.regime needs competition.seed (or --seed)".into()))?;
                    sample::sample_matrix(s, roster.len(), r.resolve()?)?
                }
                Some(_) => {
                    return Err(ConfigError::Schema(
                        "competition: give exactly one of matrix or regime (seed only with regime)".into(),
                    ))
                }
                None => {
                    return Err(ConfigError::Schema(
                        "competition required with an explicit organizations list".into(),
                    ))
                }
            };
            GameInstance { orgs: roster, comp, mech }
        }
        (None, Some(sampling)) => {
            if cfg.competition.is_some() {
                return Err(ConfigError::Schema(
                    "competition conflicts with sampling (set sampling.gamma instead)".into(),
                ));
            }
            let spec = sampling_spec_from(sampling, seed_override)?;
            sample::sample_instance(&spec, sampling.n_orgs, mech)?
        }
        (Some(_), Some(_)) => {
            return Err(ConfigError::Schema("give organizations or sampling, not both".into()))
        }
        (None, None) => {
            return Err(ConfigError::Schema("one of organizations or sampling is required".into()))
        }
    };

    let violations = validate_instance(&g);
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }
    Ok((g, settings))
}

/// Build the sweep spec from the `sweep` section.
pub fn build_sweep(cfg: &ConfigFile, seed_override: Option<u64>) -> Result<SweepSpec, ConfigError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::Schema("sweep section required for the sweep subcommand".into()))?;
    let gamma_regimes = sweep
        .gamma_regimes
        .iter()
        .map(|g| g.resolve())
        .collect::<Result<Vec<_>, _>>()?;
    let methods = sweep
        .methods
        .iter()
        .map(|m| m.parse::<Method>().map_err(ConfigError::Schema))
        .collect::<Result<Vec<_>, _>>()?;
    let preset_names = sweep
        .presets
        .clone()
        .unwrap_or_else(|| presets::DEFAULT_SWEEP_PRESETS.iter().map(|s| s.to_string()).collect());

    // Range template from the optional sampling section; the per-cell law,
    // seed and regime are overridden by the harness.
    let base_sampling = match &cfg.sampling {
        Some(s) => {
            let mut cfg2 = s.clone();
            if cfg2.law.is_none() && cfg2.law_preset.is_none() {
                cfg2.law_preset = Some(preset_names[0].clone());
            }
            sampling_spec_from(&cfg2, None)?
        }
        None => SamplingSpec::table2(
            0,
            GammaRegime::Moderate,
            presets::law_preset(preset_names.first().map(String::as_str).unwrap_or("medium-0.5"))
                .unwrap_or_else(|| presets::law_preset("medium-0.5").expect("shipped preset")),
        ),
    };
    let seeds = match seed_override {
        Some(s) => vec![s],
        None => sweep.seeds.clone(),
    };

    Ok(SweepSpec {
        gamma_regimes,
        presets: preset_names,
        xi_grid: sweep.xi_grid.clone(),
        methods,
        seeds,
        rounds: sweep.rounds,
        n_orgs: sweep.n_orgs,
        base_sampling,
        mechanism: cfg.mechanism.to_params(),
        solver: cfg.solver.as_ref().map(|s| s.to_settings()).unwrap_or_default(),
    })
}

/// Serialize the resolved instance back into a config document that
/// re-parses to an equivalent instance (explicit roster and matrix).
pub fn dump_effective_config(g: &GameInstance, settings: &SolverSettings) -> String {
    let organizations: Vec<OrgConfig> = g
        .orgs
        .iter()
        .map(|o| OrgConfig {
            d_loc: o.d_loc,
            freq_ghz: None,
            freq_hz: Some(o.freq_hz),
            kappa: o.kappa,
            eta: o.eta,
            mu: o.mu,
            cost_per_joule: o.cost_per_joule,
            psi: o.psi,
            phi: o.phi,
            law: Some(o.law),
            law_preset: None,
        })
        .collect();
    let cfg = ConfigFile {
        organizations: Some(organizations),
        sampling: None,
        competition: Some(CompetitionConfig {
            matrix: Some(g.comp.rows()),
            regime: None,
            seed: None,
        }),
        mechanism: MechanismConfig {
            xi: g.mech.xi,
            epsilon0: g.mech.epsilon0,
            varrho: g.mech.varrho,
            c0: g.mech.c0,
            d_min: g.mech.d_min,
            d_max: g.mech.d_max,
        },
        solver: Some(SolverConfig {
            eps_tol: Some(settings.eps_tol),
            k_max: Some(settings.k_max),
            stop_rule: Some(settings.stop_rule),
            oracle_grid_step: Some(settings.oracle_grid_step),
        }),
        sweep: None,
    };
    serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n"
}
