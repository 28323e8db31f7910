use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modawgn::analysis::{optimal_map_search, tau};
use modawgn::WrappedGaussian;
use modawgn_harness::config::parse_pi0_spec;
use modawgn_harness::output::{emit_analytic_csv, fmt_sig};
use modawgn_harness::selfcheck::run_self_check;
use modawgn_harness::{analytic_curve, run_experiment, Execution, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(name = "modawgn", version, about = "Binary signaling over the modulo-AWGN channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over priors and decision rules.
    Simulate(SimulateArgs),
    /// Closed-form MAP and ML error over a grid of priors.
    Analytic {
        #[arg(long, default_value_t = 5.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// List `a,b,c` or range `start:stop:step`.
        #[arg(long, default_value = "0:1:0.05")]
        pi0_grid: String,
        /// Write CSV here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid search over constellations for the MAP error minimum.
    SearchOptimal {
        #[arg(long, default_value_t = 5.0)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.5)]
        pi0: f64,
        /// Defaults to Δ/200.
        #[arg(long)]
        grid_step: Option<f64>,
    },
    /// Runs the invariant suite and prints one line per check.
    SelfCheck,
    /// Writes the preset figures (SVG plus data) into a directory.
    Figures {
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        repeats: usize,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Flat key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// List `a,b,c` or range `start:stop:step`.
    #[arg(long)]
    pi0: Option<String>,
    #[arg(long)]
    n_bits: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Subset of map,ml,estimated.
    #[arg(long)]
    rules: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Subset of csv,svg,analytic.
    #[arg(long)]
    emit: Option<String>,
    /// Estimate-then-decode passes of the estimated rule.
    #[arg(long)]
    iterations: Option<usize>,
    /// Worker threads; 1 runs serially, 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl SimulateArgs {
    fn config(&self) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(p) = &self.config {
            cfg.apply_file(p)?;
        }
        let overrides = [
            ("delta", self.delta.map(|v| v.to_string())),
            ("sigma", self.sigma.map(|v| v.to_string())),
            ("pi0", self.pi0.clone()),
            ("n_bits", self.n_bits.map(|v| v.to_string())),
            ("repeats", self.repeats.map(|v| v.to_string())),
            ("rules", self.rules.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("out", self.out.as_ref().map(|p| p.to_string_lossy().into_owned())),
            ("emit", self.emit.clone()),
            ("estimator_iterations", self.iterations.map(|v| v.to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execution(threads: usize) -> Execution {
    if threads == 1 {
        Execution::Serial
    } else {
        Execution::Parallel(threads)
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.config()?;
            for path in run_experiment(&cfg, execution(args.threads))? {
                println!("wrote {}", path.display());
            }
        }
        Command::Analytic { delta, sigma, pi0_grid, out } => {
            let curve = analytic_curve(delta, sigma, &parse_pi0_spec(&pi0_grid)?)?;
            match out {
                Some(path) => {
                    emit_analytic_csv(&curve, &path)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    println!("pi0,delta_over_sigma,pe_map,pe_ml");
                    for a in curve {
                        println!("{},{},{},{}", fmt_sig(a.pi0), fmt_sig(a.delta_over_sigma), fmt_sig(a.pe_map), fmt_sig(a.pe_ml));
                    }
                }
            }
        }
        Command::SearchOptimal { delta, sigma, pi0, grid_step } => {
            let g = WrappedGaussian::new(delta, sigma)?;
            let s = optimal_map_search(&g, pi0, grid_step.unwrap_or(delta / 200.0))?;
            let m = s.power_minimal;
            println!("tau                    {}", fmt_sig(tau(&g)));
            println!("grid step              {}", fmt_sig(s.grid_step));
            println!("min pe                 {}", fmt_sig(s.min_pe));
            println!("argmin pairs           {}", s.argmin.len());
            println!("ridge |h1-h0| = delta/2 {}", s.ridge_confirmed);
            println!("power-minimal pair     ({}, {})", fmt_sig(m.h0()), fmt_sig(m.h1()));
            println!("its average power      {}", fmt_sig(s.power_minimal_power));
            println!("(-delta/4, delta/4)    {}", if s.antipodal_is_power_minimal { "power-minimal" } else { "not power-minimal" });
            println!("refined separation     {}", fmt_sig(s.refined_separation));
        }
        Command::SelfCheck => {
            let outcomes = run_self_check();
            for c in &outcomes {
                println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(outcomes.iter().all(|c| c.passed));
        }
        Command::Figures { out, seed, repeats } => {
            for path in modawgn_harness::figures::write_figures(&out, seed, repeats, Execution::Parallel(0))? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
