use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pxlap_cli::{run_convergence_study, run_scan, run_solve, RunConfig};

#[derive(Parser)]
#[command(name = "pxlap", version, about = "First eigenpair of the p(x)-Laplacian with Luxemburg norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write eigenfunction.csv, eigenfunction.vtk and summary.txt
    Solve(Common),
    /// Solve on a sequence of refined meshes and estimate convergence orders
    Study(Common),
    /// Amplitude scan of the nonhomogeneous quotient (1D domains)
    Scan(Common),
    /// Solve and write the symmetry / log-concavity report
    Diagnose(Common),
}

#[derive(Args)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// element order
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: Option<u8>,
    /// target mesh size
    #[arg(long)]
    h: Option<f64>,
    /// refinement levels of a study
    #[arg(long)]
    levels: Option<usize>,
    /// further key=value overrides
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            cfg.set_assignment(o).with_context(|| format!("override '{o}'"))?;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(order) = self.order {
            cfg.set("order", &order.to_string())?;
        }
        if let Some(h) = self.h {
            cfg.h = h;
        }
        if let Some(levels) = self.levels {
            cfg.levels = levels;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Solve(c) => {
            let out = run_solve(&c.load()?)?;
            print!("{}", out.summary);
            if let Some(d) = out.diagnostics {
                print!("{}", d.to_text());
            }
        }
        Command::Diagnose(c) => {
            let cfg = RunConfig { diagnostics: true, ..c.load()? };
            let out = run_solve(&cfg)?;
            print!("{}", out.summary);
            if let Some(d) = out.diagnostics {
                print!("{}", d.to_text());
            }
        }
        Command::Study(c) => {
            let cfg = c.load()?;
            let report = run_convergence_study(&cfg, cfg.levels)?;
            print!("{}", report.to_csv());
        }
        Command::Scan(c) => {
            let cfg = c.load()?;
            let scan = run_scan(&cfg)?;
            println!("# {}", scan.description);
            print!("{}", scan.to_csv());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
