//! Shipped scaling-law presets.
//!
//! The engine consumes fitted (alpha, beta, delta) surrogates; the presets
//! below are synthetic calibration placeholders, not fitted values from any
//! published training run. They are organized as three task families of
//! increasing difficulty (simple / medium / complex, mirroring the usual
//! FMNIST / CIFAR-10 / CIFAR-100 ordering: harder tasks get a larger alpha
//! and a slower decay) crossed with three data-heterogeneity levels labeled
//! by the Dirichlet concentration alpha_d in {0.1, 0.5, 0.9}; smaller
//! alpha_d means more imbalance and a higher error level at equal data.
//!
//! All nine keep the local error inside (0, 1) over total dataset sizes
//! [10, 9000], the reachable range under the default sampling spec.

use crate::model::ScalingLaw;

/// `(name, law)` pairs, ordered by family then heterogeneity.
pub const PRESETS: [(&str, ScalingLaw); 9] = [
    ("simple-0.1", ScalingLaw { alpha: 6.3, beta: 0.9, delta: 0.0005 }),
    ("simple-0.5", ScalingLaw { alpha: 5.0, beta: 0.9, delta: 0.0004 }),
    ("simple-0.9", ScalingLaw { alpha: 4.0, beta: 0.9, delta: 0.0003 }),
    ("medium-0.1", ScalingLaw { alpha: 5.5, beta: 0.8, delta: 0.002 }),
    ("medium-0.5", ScalingLaw { alpha: 4.0, beta: 0.8, delta: 0.0015 }),
    ("medium-0.9", ScalingLaw { alpha: 3.0, beta: 0.8, delta: 0.001 }),
    ("complex-0.1", ScalingLaw { alpha: 4.4, beta: 0.65, delta: 0.002 }),
    ("complex-0.5", ScalingLaw { alpha: 3.8, beta: 0.65, delta: 0.0015 }),
    ("complex-0.9", ScalingLaw { alpha: 3.2, beta: 0.65, delta: 0.001 }),
];

/// Default trio used by sweeps when the config names no presets: the medium
/// family across the three heterogeneity levels.
pub const DEFAULT_SWEEP_PRESETS: [&str; 3] = ["medium-0.1", "medium-0.5", "medium-0.9"];

/// Look up a shipped preset by name.
pub fn law_preset(name: &str) -> Option<ScalingLaw> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, l)| *l)
}

/// Names of all shipped presets, in declaration order.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
