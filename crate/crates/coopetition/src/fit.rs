//! Power-law learning-curve calibration from `(training size, loss)` logs.
//!
//! Fits `loss ~ alpha * d^(-beta) - delta` by a one-dimensional search over
//! the offset `delta` on `[0, min loss]` (coarse scan plus golden-section to
//! a 1e-9 bracket) with a closed-form log-space linear regression for
//! `(ln alpha, -beta)` at each candidate. Deterministic, no iterative
//! nonlinear solver involved. The objective reported and minimized is the
//! sum of squared residuals in the original (not log) space.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::economics;
use crate::model::ScalingLaw;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("insufficient distinct sizes: need >= 3, got {0}")]
    InsufficientDistinctSizes(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid observation: {0}")]
    InvalidInput(String),
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
}

/// One empirical point from a training log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossObservation {
    pub d_total: u64,
    pub loss: f64,
    /// Optional grouping label, e.g. a heterogeneity preset name.
    pub tag: Option<String>,
}

/// Fitted law plus goodness-of-fit on the input set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub law: ScalingLaw,
    pub sse: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Log-space regression at a fixed offset. Returns the law and its
/// original-space SSE, or `None` when the candidate is unusable (excludes
/// more than 20% of points, or yields a non-positive decay).
fn fit_at_delta(points: &[(f64, f64)], delta: f64) -> Option<(ScalingLaw, f64)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, loss)| loss + delta > 0.0)
        .map(|&(d, loss)| (d.ln(), (loss + delta).ln()))
        .collect();
    if (usable.len() as f64) < 0.8 * points.len() as f64 || usable.len() < 3 {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|(x, _)| x).sum();
    let sy: f64 = usable.iter().map(|(_, y)| y).sum();
    let sxx: f64 = usable.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = usable.iter().map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let beta = -slope;
    let alpha = intercept.exp();
    if !(beta > 0.0) || !beta.is_finite() || !alpha.is_finite() || alpha <= 0.0 {
        return None;
    }
    let law = ScalingLaw::new(alpha, beta, delta);
    let sse = sse_of(points, &law);
    if !sse.is_finite() {
        return None;
    }
    Some((law, sse))
}

fn sse_of(points: &[(f64, f64)], law: &ScalingLaw) -> f64 {
    points
        .iter()
        .map(|&(d, loss)| {
            let r = law.alpha * d.powf(-law.beta) - law.delta - loss;
            r * r
        })
        .sum()
}

/// Fit a scaling law to the observations.
///
/// Requires at least three observations with three distinct sizes and finite
/// non-negative losses. Guarantees `alpha > 0`, `beta > 0`, `delta >= 0` on
/// success; all-equal losses make the decay unidentifiable and fail.
pub fn fit_power_law(obs: &[LossObservation]) -> Result<FitResult, FitError> {
    let mut distinct: Vec<u64> = obs.iter().map(|o| o.d_total).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(FitError::InsufficientDistinctSizes(distinct.len()));
    }
    for o in obs {
        if o.d_total < 1 {
            return Err(FitError::InvalidInput(format!("d_total {} < 1", o.d_total)));
        }
        if !o.loss.is_finite() || o.loss < 0.0 {
            return Err(FitError::InvalidInput(format!(
                "loss {} at d_total {} must be finite and >= 0",
                o.loss, o.d_total
            )));
        }
    }
    let points: Vec<(f64, f64)> = obs.iter().map(|o| (o.d_total as f64, o.loss)).collect();
    let min_loss = points.iter().map(|&(_, l)| l).fold(f64::INFINITY, f64::min);
    let max_loss = points.iter().map(|&(_, l)| l).fold(f64::NEG_INFINITY, f64::max);
    if min_loss == max_loss {
        return Err(FitError::Degenerate("all losses equal; beta unidentifiable".into()));
    }

    // Coarse scan over the delta bracket, then golden-section around the
    // best cell. Candidates that exclude too many points or produce beta <= 0
    // count as +inf.
    let eval = |delta: f64| fit_at_delta(&points, delta).map(|(_, sse)| sse);
    const SCAN: usize = 64;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=SCAN {
        let delta = min_loss * i as f64 / SCAN as f64;
        if let Some(sse) = eval(delta) {
            if best.map_or(true, |(_, b)| sse < b) {
                best = Some((i, sse));
            }
        }
    }
    let (best_i, _) = best.ok_or_else(|| {
        FitError::Degenerate("beta unidentifiable on every delta candidate".into())
    })?;

    let mut lo = min_loss * best_i.saturating_sub(1) as f64 / SCAN as f64;
    let mut hi = min_loss * (best_i + 1).min(SCAN) as f64 / SCAN as f64;
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let score = |d: f64| eval(d).unwrap_or(f64::INFINITY);
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = score(x1);
    let mut f2 = score(x2);
    while hi - lo > 1e-9 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = score(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = score(x2);
        }
    }
    let mut candidates = vec![lo, (lo + hi) / 2.0, hi, min_loss * best_i as f64 / SCAN as f64];
    candidates.retain(|d| d.is_finite());
    let delta_star = candidates
        .into_iter()
        .min_by(|a, b| score(*a).partial_cmp(&score(*b)).expect("finite scores"))
        .expect("non-empty candidate set");

    let (law, sse) = fit_at_delta(&points, delta_star)
        .ok_or_else(|| FitError::Degenerate("final delta candidate unusable".into()))?;

    let mean = points.iter().map(|&(_, l)| l).sum::<f64>() / points.len() as f64;
    let sst: f64 = points.iter().map(|&(_, l)| (l - mean) * (l - mean)).sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok(FitResult { law, sse, r2, n_points: obs.len() })
}

/// Predicted loss at `d_total` samples; delegates to the shared local-error
/// surrogate so the fitter and the engine cannot drift apart.
pub fn predict(law: &ScalingLaw, d_total: u64) -> Result<f64, FitError> {
    economics::local_error(law, d_total as f64)
        .map_err(|e| FitError::InvalidInput(e.to_string()))
}

/// Group observations by tag (untagged rows under `"default"`) and fit each
/// group independently; failures are reported per tag.
pub fn fit_by_tag(obs: &[LossObservation]) -> Vec<(String, Result<FitResult, FitError>)> {
    let mut groups: BTreeMap<String, Vec<LossObservation>> = BTreeMap::new();
    for o in obs {
        groups
            .entry(o.tag.clone().unwrap_or_else(|| "default".into()))
            .or_default()
            .push(o.clone());
    }
    groups
        .into_iter()
        .map(|(tag, group)| {
            let fit = fit_power_law(&group);
            (tag, fit)
        })
        .collect()
}

/// Parse the `d_total,loss[,tag]` CSV format (UTF-8, `.` decimal point).
/// Errors carry 1-based row numbers, counting the header as row 1.
pub fn parse_loss_csv(text: &str) -> Result<Vec<LossObservation>, FitError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(FitError::Csv { row: 1, message: "empty file".into() })?;
    let header = header.trim_end_matches('\r').trim();
    let tagged = match header {
        "d_total,loss" => false,
        "d_total,loss,tag" => true,
        other => {
            return Err(FitError::Csv {
                row: 1,
                message: format!("unexpected header {other:?}; want d_total,loss[,tag]"),
            })
        }
    };
    let mut out = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if tagged { 3 } else { 2 };
        if fields.len() != expected {
            return Err(FitError::Csv {
                row,
                message: format!("expected {expected} fields, got {}", fields.len()),
            });
        }
        let d_total: u64 = fields[0].trim().parse().map_err(|e| FitError::Csv {
            row,
            message: format!("bad d_total {:?}: {e}", fields[0]),
        })?;
        let loss: f64 = fields[1].trim().parse().map_err(|e| FitError::Csv {
            row,
            message: format!("bad loss {:?}: {e}", fields[1]),
        })?;
        let tag = if tagged {
            let t = fields[2].trim();
            if t.is_empty() {
                None
            } else {
                Some(t.to_string())
            }
        } else {
            None
        };
        out.push(LossObservation { d_total, loss, tag });
    }
    Ok(out)
}
