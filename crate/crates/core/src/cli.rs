//! The `ehcrn` command line: `ehcrn <command> [--config PATH] [--set key=value]... [--out DIR]`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analytic::crossover_lambda_p;
use crate::boundary::Source;
use crate::config::Settings;
use crate::csv::emit_boundary_csv;
use crate::error::{Error, Result};
use crate::model::PolicySpec;
use crate::sweep::{builtin_experiment, builtin_experiments, reference_checks, run_experiment, ComparisonReport, ExperimentSpec, Mode};

#[derive(Debug, Parser)]
#[command(name = "ehcrn", version, about = "Stable-throughput regions of an energy-harvesting cooperative cognitive radio link")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat `key = value` config file.
    #[arg(long = "config", global = true, value_name = "PATH")]
    pub config_path: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Directory for CSV output.
    #[arg(long = "out", global = true, value_name = "DIR", default_value = "out")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Analytic region boundary for the configured policy.
    Region,
    /// Simulated region boundary for the configured policy.
    Simulate,
    /// Analytic and simulated boundaries side by side, with their gap.
    Compare,
    /// Cooperative vs non-cooperative crossover, closed form and measured.
    Crossover,
    /// Run a built-in experiment and check it against reference values.
    Reproduce { figure: String },
    /// List the built-in experiments.
    List,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let mut s = match &cli.config_path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    for o in &cli.overrides {
        s.set(o)?;
    }
    Ok(s)
}

fn configured_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let name = cli
        .config_path
        .as_deref()
        .and_then(Path::file_stem)
        .and_then(|s| s.to_str())
        .unwrap_or("config");
    settings(cli)?.to_spec(name)
}

/// Runs one invocation, writing the summary to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let spec = match &cli.command {
        Command::List => {
            let mut text = String::new();
            for spec in builtin_experiments() {
                let _ = writeln!(text, "{}", describe(&spec));
            }
            return write_out(out, &text);
        }
        Command::Reproduce { figure } => {
            let mut spec = builtin_experiment(figure)?;
            settings(cli)?.apply(&mut spec)?;
            spec
        }
        Command::Region | Command::Simulate | Command::Compare => {
            let mut spec = configured_spec(cli)?;
            spec.mode = match cli.command {
                Command::Region => Mode::AnalyticOnly,
                Command::Simulate => Mode::SimulateOnly,
                _ => Mode::Compare,
            };
            spec
        }
        Command::Crossover => {
            let mut spec = configured_spec(cli)?;
            let a = spec.policies[0].access_prob_a;
            spec.policies = vec![PolicySpec::cooperative(a)?, PolicySpec::non_cooperative()];
            spec
        }
    };
    spec.validate()?;
    if spec.mode.simulated() {
        eprintln!(
            "simulating {} grid points per boundary ({} replications of {} slots each)",
            spec.grids.lambda_p.len(),
            spec.sim.replications,
            spec.sim.horizon_slots
        );
    }
    let report = run_experiment(&spec)?;
    let mut text = summary(&spec, &report);
    if cli.command == Command::Crossover {
        text.push_str(&crossover_formula(&spec)?);
    }
    write_out(out, &text)?;
    for path in emit_boundary_csv(&report, &cli.output_dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn describe(spec: &ExperimentSpec) -> String {
    let policies: Vec<String> = spec.policies.iter().map(ToString::to_string).collect();
    let harvest: Vec<String> = if spec.harvest_variants.is_empty() {
        vec![format!("({}, {})", spec.params.lambda_ep, spec.params.lambda_es)]
    } else {
        spec.harvest_variants.iter().map(|(e, s)| format!("({e}, {s})")).collect()
    };
    format!(
        "{:<6} policies [{}], (lambda_ep, lambda_es) {}",
        spec.name,
        policies.join(", "),
        harvest.join(" ")
    )
}

fn crossover_formula(spec: &ExperimentSpec) -> Result<String> {
    let c = crossover_lambda_p(&spec.params)?;
    Ok(format!(
        "  closed form: D = {:.6}, Lambda_p(lambda_es = {}) = {:.6}\n",
        c.d,
        spec.params.lambda_es,
        c.lambda_p(spec.params.lambda_es)
    ))
}

/// Human-readable report; the seed is always echoed.
pub fn summary(spec: &ExperimentSpec, report: &ComparisonReport) -> String {
    let mode = match spec.mode {
        Mode::AnalyticOnly => "analytic",
        Mode::SimulateOnly => "simulate",
        Mode::Compare => "compare",
    };
    let mut s = format!("experiment {} (seed {}, mode {mode})\n", report.name, report.seed);
    for b in &report.boundaries {
        let bd = &b.boundary;
        let _ = write!(
            s,
            "  {} [{}]: lambda_s_max(0) = {:.6}",
            b.tag,
            bd.source,
            bd.lambda_s_max.first().copied().unwrap_or(0.0)
        );
        match bd.pu_cutoff() {
            Some(c) => {
                let _ = write!(s, ", empty from lambda_p = {c:.6}");
            }
            None => s.push_str(", nonempty across the grid"),
        }
        let uncertain = bd.uncertain.iter().filter(|u| **u).count();
        if bd.source == Source::Simulated {
            let _ = write!(s, ", {uncertain} uncertain");
            if let Some(br) = &b.bracketed {
                let _ = write!(s, ", {} unbracketed", br.iter().filter(|x| !**x).count());
            }
        }
        s.push('\n');
    }
    if let Some(gap) = report.max_gap {
        let _ = writeln!(s, "  max_gap = {gap:.6} (excluding uncertain points)");
    }
    for c in &report.crossovers {
        let fmt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            s,
            "  crossover [{}] lambda_ep = {}, lambda_es = {}: measured {}, predicted {}",
            c.source,
            c.params.lambda_ep,
            c.params.lambda_es,
            fmt(c.measured),
            fmt(c.predicted)
        );
    }
    for check in reference_checks(spec, report) {
        let _ = writeln!(
            s,
            "  {}: computed {:.6} vs reference {} (|diff| {:.6})",
            check.quantity,
            check.computed,
            check.reference,
            check.abs_diff()
        );
    }
    s
}
