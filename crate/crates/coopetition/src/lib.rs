//! Game-theoretic engine for synthetic-data generation in coopetitive
//! cross-silo federated learning.
//!
//! Organizations jointly train a global model while competing in downstream
//! markets. Each one decides how many synthetic samples to generate per
//! round, trading learning gains against compute cost and the value it hands
//! to rivals through the shared model. The per-round interaction is a
//! weighted potential game; this crate evaluates the full utility stack,
//! computes the Nash equilibrium by KKT case classification plus fixed-point
//! iteration, settles budget-balanced payoff transfers, calibrates power-law
//! learning-curve surrogates from loss logs, and drives deterministic
//! parameter sweeps.
//!
//! Core numerics are generic over the scalar type (see [`num::Real`]);
//! every domain type defaults to `f64`, which is what the samplers, the
//! sweep harness, and the CLI use.

pub mod config;
pub mod economics;
pub mod equilibrium;
pub mod fit;
pub mod model;
pub mod num;
pub mod output;
pub mod presets;
pub mod sample;
pub mod simulation;

pub use economics::{SettlementLedger, UtilityBreakdown};
pub use equilibrium::{CaseLabel, SolveDiagnostics, SolverSettings, StopRule};
pub use fit::{FitResult, LossObservation};
pub use model::{
    CompetitionMatrix, GameInstance, MechanismParams, OrganizationProfile, ScalingLaw,
    StrategyProfile, Violation,
};
pub use sample::{GammaRegime, SamplingSpec};
pub use simulation::{Method, RoundReport, SweepSpec};
