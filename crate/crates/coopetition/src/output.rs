//! Result serialization: byte-stable CSV writers, figure-data exports, and
//! guarded file writes.
//!
//! All CSV output uses `.` as the decimal point, no thousands separators,
//! `\n` line endings and UTF-8. Floats print with Rust's shortest
//! round-trip formatting, which is identical across platforms, so reruns of
//! a deterministic pipeline produce byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::economics::{SettlementLedger, UtilityBreakdown};
use crate::model::{GameInstance, StrategyProfile};
use crate::simulation::{Method, SweepRow};

/// `org,d_loc,d_gen,gain,redistribution,competition_loss,cost,utility,net_transfer`
///
/// `cost` is compute cost plus server fee; `redistribution` and
/// `competition_loss` are the signed breakdown terms, so each row satisfies
/// `utility = gain + redistribution - competition_loss - cost`;
/// `net_transfer` is the settlement net (not part of the utility sum).
pub fn equilibrium_csv(
    g: &GameInstance,
    s: &StrategyProfile,
    breakdowns: &[UtilityBreakdown],
    ledger: &SettlementLedger,
) -> String {
    let mut out = String::from("org,d_loc,d_gen,gain,redistribution,competition_loss,cost,utility,net_transfer\n");
    for (i, b) in breakdowns.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            b.org,
            g.orgs[i].d_loc,
            s.d_gen[i],
            b.gain,
            b.redistribution,
            b.competition_loss,
            b.compute_cost + b.server_fee,
            b.utility,
            ledger.net[i],
        )
        .expect("string write");
    }
    out
}

fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// `regime,preset,xi,method,seed,welfare,mean_dgen,min_utility,ir_violations,converged`
///
/// Failed cells leave the metric columns empty.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("regime,preset,xi,method,seed,welfare,mean_dgen,min_utility,ir_violations,converged\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.regime,
            r.preset,
            r.xi,
            r.method,
            r.seed,
            opt(&r.welfare),
            opt(&r.mean_dgen),
            opt(&r.min_utility),
            opt(&r.ir_violations),
            opt(&r.converged),
        )
        .expect("string write");
    }
    out
}

/// Mean over the equilibrium rows of one `(regime, preset, xi)` cell.
struct CellAgg {
    regime: String,
    preset: String,
    xi: f64,
    welfare: f64,
    dgen: f64,
    count: usize,
}

fn aggregate<'a>(
    rows: impl Iterator<Item = &'a SweepRow>,
) -> Vec<CellAgg> {
    let mut cells: Vec<CellAgg> = Vec::new();
    for r in rows {
        let (Some(w), Some(d)) = (r.welfare, r.mean_dgen) else { continue };
        match cells
            .iter_mut()
            .find(|c| c.regime == r.regime && c.preset == r.preset && c.xi == r.xi)
        {
            Some(c) => {
                c.welfare += w;
                c.dgen += d;
                c.count += 1;
            }
            None => cells.push(CellAgg {
                regime: r.regime.clone(),
                preset: r.preset.clone(),
                xi: r.xi,
                welfare: w,
                dgen: d,
                count: 1,
            }),
        }
    }
    cells
}

/// Equilibrium generation volume against competition intensity:
/// `regime,preset,xi,mean_dgen,mean_welfare` averaged over seeds.
pub fn fig_gamma_dgen_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("regime,preset,xi,mean_dgen,mean_welfare\n");
    for c in aggregate(rows.iter().filter(|r| r.method == Method::Cocogen)) {
        let k = c.count as f64;
        writeln!(out, "{},{},{},{},{}", c.regime, c.preset, c.xi, c.dgen / k, c.welfare / k)
            .expect("string write");
    }
    out
}

/// Welfare against the compensation rate:
/// `regime,preset,xi,mean_welfare,mean_dgen` averaged over seeds.
pub fn fig_xi_welfare_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("regime,preset,xi,mean_welfare,mean_dgen\n");
    for c in aggregate(rows.iter().filter(|r| r.method == Method::Cocogen)) {
        let k = c.count as f64;
        writeln!(out, "{},{},{},{},{}", c.regime, c.preset, c.xi, c.welfare / k, c.dgen / k)
            .expect("string write");
    }
    out
}

/// Method comparison: `regime,preset,xi,method,mean_welfare` averaged over
/// seeds.
pub fn fig_baselines_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("regime,preset,xi,method,mean_welfare\n");
    let mut cells: Vec<(String, String, f64, Method, f64, usize)> = Vec::new();
    for r in rows {
        let Some(w) = r.welfare else { continue };
        match cells.iter_mut().find(|c| {
            c.0 == r.regime && c.1 == r.preset && c.2 == r.xi && c.3 == r.method
        }) {
            Some(c) => {
                c.4 += w;
                c.5 += 1;
            }
            None => cells.push((r.regime.clone(), r.preset.clone(), r.xi, r.method, w, 1)),
        }
    }
    for (regime, preset, xi, method, welfare, count) in cells {
        writeln!(out, "{},{},{},{},{}", regime, preset, xi, method, welfare / count as f64)
            .expect("string write");
    }
    out
}

/// Create `dir` if needed and write `name` inside it, refusing to overwrite
/// an existing file unless `force` is set.
pub fn guarded_write(dir: &Path, name: &str, contents: &str, force: bool) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    if path.exists() && !force {
        return Err(io::Error::new(
            io::ErrorKind::AlreadyExists,
            format!("{} exists; pass --force to overwrite", path.display()),
        ));
    }
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics;
    use crate::equilibrium::SolverSettings;
    use crate::model::MechanismParams;
    use crate::presets::law_preset;
    use crate::sample::{sample_instance, GammaRegime, SamplingSpec};
    use crate::simulation::{run_sweep, SweepSpec};

    fn instance() -> GameInstance {
        let spec = SamplingSpec::table2(3, GammaRegime::Moderate, law_preset("medium-0.5").unwrap());
        let mech = MechanismParams { xi: 90.0, epsilon0: 1.0, varrho: 6.0, c0: 1.0, d_min: 0, d_max: 6000 };
        sample_instance(&spec, 4, mech).unwrap()
    }

    #[test]
    fn equilibrium_rows_reconstruct_utility() {
        let g = instance();
        let s = StrategyProfile::uniform(4, 100.0);
        let b = economics::utilities(&g, &s).unwrap();
        let led = economics::settle(&g, &s).unwrap();
        let csv = equilibrium_csv(&g, &s, &b, &led);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 5);
        for (i, line) in lines[1..].iter().enumerate() {
            let f: Vec<f64> = line.split(',').skip(3).map(|x| x.parse().unwrap()).collect();
            let (gain, redi, loss, cost, utility) = (f[0], f[1], f[2], f[3], f[4]);
            let recomputed = gain + redi - loss - cost;
            assert!((recomputed - utility).abs() <= 1e-9, "row {i}");
        }
    }

    #[test]
    fn sweep_csv_is_stable_and_fig_files_shaped() {
        let mut spec = SweepSpec::default_grid(vec![1]);
        spec.presets = vec!["medium-0.5".into()];
        spec.gamma_regimes = vec![GammaRegime::Low];
        spec.solver = SolverSettings::default();
        let out1 = run_sweep(&spec, false).unwrap();
        let out2 = run_sweep(&spec, false).unwrap();
        assert_eq!(sweep_csv(&out1.rows), sweep_csv(&out2.rows));

        let fig = fig_baselines_csv(&out1.rows);
        // header + one row per method
        assert_eq!(fig.trim_end().lines().count(), 1 + spec.methods.len());
        let gamma_fig = fig_gamma_dgen_csv(&out1.rows);
        assert_eq!(gamma_fig.trim_end().lines().count(), 2);
    }

    #[test]
    fn guard_refuses_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        guarded_write(dir.path(), "a.csv", "x\n", false).unwrap();
        let err = guarded_write(dir.path(), "a.csv", "y\n", false).unwrap_err();
        assert_eq!(err.kind(), io::ErrorKind::AlreadyExists);
        guarded_write(dir.path(), "a.csv", "y\n", true).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap(), "y\n");
    }
}
