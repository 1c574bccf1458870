//! Command-line driver.
//!
//! Exit codes: 0 success, 1 config or validation error, 2 solver
//! non-convergence, 3 sweep with zero successful cells.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coopetition::config::{self, ConfigError};
use coopetition::economics;
use coopetition::equilibrium;
use coopetition::fit;
use coopetition::output;
use coopetition::simulation::{self, Method};

#[derive(Parser)]
#[command(name = "coopetition", version, about = "Equilibrium synthetic-data generation engine for coopetitive cross-silo federated learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonIo {
    /// Config file (UTF-8 JSON).
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; created if absent.
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Override the sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and report every invariant violation.
    Validate {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve one instance and write equilibrium.csv + diagnostics.json.
    Solve {
        #[command(flatten)]
        io: CommonIo,
        /// Echo diagnostics JSON to stdout as well.
        #[arg(long)]
        diagnostics: bool,
        /// Also write the resolved instance as a reusable config document
        /// (effective_config.json in the output directory).
        #[arg(long)]
        dump_effective_config: bool,
    },
    /// Run the sweep grid and write sweep.csv plus figure-data files.
    Sweep {
        #[command(flatten)]
        io: CommonIo,
        /// Also write per-cell round reports to reports.json.
        #[arg(long)]
        diagnostics: bool,
    },
    /// Fit scaling laws from a d_total,loss[,tag] CSV into laws.json.
    Fit {
        /// Input CSV path.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long, default_value = "out")]
        output: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Run rounds of one method and write the reports as JSON.
    Simulate {
        #[command(flatten)]
        io: CommonIo,
        /// Strategy method: cocogen, vcfl, wco, wdg, radg or madg.
        #[arg(long, default_value = "cocogen")]
        method: Method,
        /// Number of rounds.
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Validate { config: path, seed } => {
            let cfg = config::load_config(&path)?;
            match config::build_instance(&cfg, seed) {
                Ok((g, _)) => {
                    println!("ok: {} organizations, mean competitive intensity {}", g.n(), g.comp.mean_off_diagonal());
                    Ok(0)
                }
                Err(ConfigError::Invalid(violations)) => {
                    for v in violations {
                        eprintln!("violation: {v}");
                    }
                    Ok(1)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Solve { io, diagnostics, dump_effective_config } => {
            let cfg = config::load_config(&io.config)?;
            let (g, settings) = config::build_instance(&cfg, io.seed)?;
            if dump_effective_config {
                let dumped = config::dump_effective_config(&g, &settings);
                output::guarded_write(&io.output, "effective_config.json", &dumped, io.force)?;
            }
            let (s, diag) = equilibrium::solve(&g, &settings)?;
            let breakdowns = economics::utilities(&g, &s)?;
            let ledger = economics::settle(&g, &s)?;
            let welfare: f64 = breakdowns.iter().map(|b| b.utility).sum();

            let csv = output::equilibrium_csv(&g, &s, &breakdowns, &ledger);
            output::guarded_write(&io.output, "equilibrium.csv", &csv, io.force)?;
            let diag_json = serde_json::to_string_pretty(&diag)? + "\n";
            output::guarded_write(&io.output, "diagnostics.json", &diag_json, io.force)?;
            if diagnostics {
                println!("{diag_json}");
            }
            println!(
                "welfare {} over {} organizations (converged: {}, iterations: {})",
                welfare,
                g.n(),
                diag.converged,
                diag.iterations
            );
            Ok(if diag.converged { 0 } else { 2 })
        }
        Command::Sweep { io, diagnostics } => {
            let cfg = config::load_config(&io.config)?;
            let spec = config::build_sweep(&cfg, io.seed)?;
            let out = simulation::run_sweep(&spec, diagnostics)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            output::guarded_write(&io.output, "sweep.csv", &output::sweep_csv(&out.rows), io.force)?;
            output::guarded_write(&io.output, "fig_gamma_dgen.csv", &output::fig_gamma_dgen_csv(&out.rows), io.force)?;
            output::guarded_write(&io.output, "fig_xi_welfare.csv", &output::fig_xi_welfare_csv(&out.rows), io.force)?;
            output::guarded_write(&io.output, "fig_baselines.csv", &output::fig_baselines_csv(&out.rows), io.force)?;
            if diagnostics {
                let reports = serde_json::to_string_pretty(&out.reports.iter().map(|(row, reps)| {
                    serde_json::json!({"cell": row, "rounds": reps})
                }).collect::<Vec<_>>())? + "\n";
                output::guarded_write(&io.output, "reports.json", &reports, io.force)?;
            }
            let ok = out.succeeded();
            let failed = out.rows.len() - ok;
            println!("{} cells succeeded, {} failed", ok, failed);
            if failed > 0 {
                for r in out.rows.iter().filter(|r| r.error.is_some()).take(5) {
                    eprintln!(
                        "cell ({}, {}, xi={}, {}, seed {}): {}",
                        r.regime,
                        r.preset,
                        r.xi,
                        r.method,
                        r.seed,
                        r.error.as_deref().unwrap_or("")
                    );
                }
            }
            Ok(if ok > 0 { 0 } else { 3 })
        }
        Command::Fit { input, output: out_dir, force } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| format!("cannot read {}: {e}", input.display()))?;
            let observations = fit::parse_loss_csv(&text)?;
            let results = fit::fit_by_tag(&observations);
            let mut laws = serde_json::Map::new();
            let mut any_ok = false;
            for (tag, result) in &results {
                match result {
                    Ok(fit) => {
                        any_ok = true;
                        println!("{tag}: r2 = {}", fit.r2);
                        laws.insert(tag.clone(), serde_json::to_value(fit)?);
                    }
                    Err(e) => {
                        eprintln!("{tag}: fit failed: {e}");
                    }
                }
            }
            if !any_ok {
                return Err("no tag produced a usable fit".into());
            }
            let json = serde_json::to_string_pretty(&serde_json::Value::Object(laws))? + "\n";
            output::guarded_write(&out_dir, "laws.json", &json, force)?;
            Ok(0)
        }
        Command::Simulate { io, method, rounds } => {
            let cfg = config::load_config(&io.config)?;
            let (g, settings) = config::build_instance(&cfg, io.seed)?;
            let mut reports = Vec::with_capacity(rounds);
            let seed = io.seed.unwrap_or(0);
            for round in 1..=rounds {
                reports.push(simulation::run_round(&g, method, seed, &settings, round)?);
            }
            let all_converged = reports.iter().all(|r| r.converged);
            for r in &reports {
                println!("round {}: welfare {} global_err {}", r.round, r.welfare, r.global_err);
            }
            let json = serde_json::to_string_pretty(&reports)? + "\n";
            output::guarded_write(&io.output, "rounds.json", &json, io.force)?;
            Ok(if all_converged { 0 } else { 2 })
        }
    }
}
