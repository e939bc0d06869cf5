//! Experiment runner for the anisotropic doubly nonlinear solver.

mod artifacts;
mod config;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use anisodnl::analysis::{dg_delta, select_q};
use anisodnl::model::check_admissibility;
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use artifacts::Artifacts;
use config::{parse_list, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "anisodnl", version, about = "Run and audit anisotropic doubly nonlinear experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario of a config file and write its artifacts.
    Run(Common),
    /// Check the problem data and report which analyses apply.
    Validate(Common),
    /// Write the calibrated constants fixture.
    Calibrate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated truncation levels, e.g. 1,2,4,8.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated nodes per axis.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
}

impl Common {
    fn load(self, fallback_scenario: Option<&str>) -> Result<RunConfig> {
        let mut cfg = match (&self.config, fallback_scenario) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(scenario)) => {
                toml::from_str(&format!("scenario = \"{scenario}\"\npreset = \"porous\"\n"))?
            }
            (None, None) => anyhow::bail!("--config is required"),
        };
        if let Some(s) = fallback_scenario {
            cfg.scenario = s.to_string();
        }
        cfg.apply(Overrides {
            out: self.out,
            seed: self.seed,
            ks: self.k.as_deref().map(parse_list).transpose().context("--k")?,
            grid: self.grid.as_deref().map(parse_list).transpose().context("--grid")?,
            dt: self.dt,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cfg: RunConfig) -> Result<ExitCode> {
    let mut out = Artifacts::create(&cfg.out)?;
    let outcome = scenarios::run(&cfg, &mut out).with_context(|| format!("scenario {}", cfg.scenario))?;
    let manifest = out.finish()?;
    println!("scenario {}: wrote {}", cfg.scenario, manifest.display());
    if outcome.violations.is_empty() {
        println!("no violations");
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &outcome.violations {
            println!("violation: {v}");
        }
        Ok(ExitCode::from(1))
    }
}

fn validate(cfg: RunConfig) -> Result<ExitCode> {
    let spec = cfg.problem()?.build()?;
    let rep = check_admissibility(&spec, 2000, cfg.seed);
    for c in &rep.conditions {
        println!("{:<28} {}  {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail);
    }
    match rep.closeness_failing_axis {
        None => println!("cascade: enabled (closeness margin {:.6})", rep.closeness_margin),
        Some(axis) => println!(
            "cascade: disabled (closeness fails on axis {axis}, margin {:.6})",
            rep.closeness_margin
        ),
    }
    let bar = spec.bar();
    let q = select_q(&spec.exponents);
    let delta = dg_delta(spec.dim(), q.q_bar, bar.mu, spec.sigma, bar.p_bar);
    if delta > 0.0 {
        println!("degiorgi: enabled (delta = {delta:.6})");
    } else {
        println!(
            "degiorgi: disabled (delta = {delta:.6} <= 0; sigma must exceed {:.6})",
            spec.sigma_bound()
        );
    }
    let solver = cfg.solver(spec.horizon, anisodnl::solver::Mode::Direct);
    solver.validate()?;
    cfg.counts(spec.dim())?;
    Ok(if rep.single_solve_admissible() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(c) => c.load(None).and_then(run),
        Command::Validate(c) => c.load(None).and_then(validate),
        Command::Calibrate(c) => c.load(Some("calibrate")).and_then(run),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
