use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use risnoma::config_file::{apply_override, load_config, to_toml};
use risnoma::core::config::SystemConfig;
use risnoma::core::optimizer::{optimize_with, AnalyticEvaluator, EvaluatorKind, SearchMethod};
use risnoma::parallel::{with_workers, ParallelMcEvaluator};
use risnoma::presets::{preset, PRESETS};
use risnoma::sweep::{
    parse_values, run_point, run_sweep, write_rows, MethodSet, RunOptions, SweepSpec, CSV_COLUMNS,
};

#[derive(Parser)]
#[command(
    name = "risnoma",
    version,
    about = "Outage simulation and analysis for hybrid-RIS uplink NOMA"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a config and print it with all defaults filled in.
    Validate(Common),
    /// Evaluate both users at one config.
    Point(Common),
    /// Sweep one config key.
    Sweep(SweepArgs),
    /// Search the RIS amplifier power for outage fairness.
    Optimize(Common),
    /// Run a named figure sweep.
    Preset(PresetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Mc,
    Analytic,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Golden,
    Annealing,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvaluatorArg {
    Analytic,
    Mc,
}

#[derive(Args)]
struct Common {
    /// TOML config file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set ris_size=128`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// CSV output path (stdout when omitted, where allowed).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Keep Monte-Carlo estimates whose relative error exceeds 20%.
    #[arg(long)]
    allow_noisy: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Record wall time per row.
    #[arg(long)]
    timing: bool,
    /// Outage level above which the optimizer gives up on a user.
    #[arg(long)]
    ceiling: Option<f64>,
    #[arg(long, value_enum, default_value = "golden")]
    search: SearchArg,
    /// Outage evaluator used inside the optimizer.
    #[arg(long, value_enum, default_value = "analytic")]
    optimizer_evaluator: EvaluatorArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Config key to sweep (`ris_size` sets both partitions).
    #[arg(long)]
    param: String,
    /// `v1,v2,...`, `start:stop:step` or `db:start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    values: String,
    /// One curve per occurrence, overrides separated by `;`.
    #[arg(long)]
    series: Vec<String>,
    #[arg(long, default_value = "sweep")]
    name: String,
}

#[derive(Args)]
struct PresetArgs {
    #[command(flatten)]
    common: Common,
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    name: String,
}

impl Common {
    fn config(&self, preset_trials: Option<u64>) -> anyhow::Result<SystemConfig> {
        let mut c = match &self.config {
            Some(p) => load_config(p)?,
            None => SystemConfig::default(),
        };
        if let Some(t) = preset_trials {
            c.mc_trials = t;
        }
        for s in &self.set {
            c = apply_override(&c, s)?;
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(t) = self.trials {
            c.mc_trials = t;
        }
        Ok(c)
    }

    fn methods(&self) -> MethodSet {
        match self.method {
            MethodArg::Mc => MethodSet::Mc,
            MethodArg::Analytic => MethodSet::Analytic,
            MethodArg::Both => MethodSet::Both,
        }
    }

    fn options(&self) -> RunOptions {
        let mut opts = RunOptions {
            allow_noisy: self.allow_noisy,
            timing: self.timing,
            ..RunOptions::default()
        };
        if let Some(c) = self.ceiling {
            opts.optimizer.ceiling = c;
        }
        opts.optimizer.method = match self.search {
            SearchArg::Golden => SearchMethod::GoldenSection,
            SearchArg::Annealing => SearchMethod::SimulatedAnnealing,
        };
        opts.optimizer.evaluator = match self.optimizer_evaluator {
            EvaluatorArg::Analytic => EvaluatorKind::Analytic,
            EvaluatorArg::Mc => EvaluatorKind::MonteCarlo,
        };
        opts
    }
}

fn validate(args: &Common) -> anyhow::Result<ExitCode> {
    let v = args.config(None)?.validate()?;
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    print!("{}", to_toml(&v.config)?);
    Ok(ExitCode::SUCCESS)
}

fn point(args: &Common) -> anyhow::Result<ExitCode> {
    let config = args.config(None)?;
    let opts = args.options();
    opts.optimizer.validate()?;
    let rows = with_workers(args.workers, || run_point(&config, args.methods(), &opts))??;
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => {
            Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_COLUMNS)?;
    write_rows(&mut w, &rows)?;
    w.flush()?;
    Ok(exit(rows.iter().filter(|r| r.failed).count()))
}

fn optimize(args: &Common) -> anyhow::Result<ExitCode> {
    let config = args.config(None)?.validate()?.config;
    let settings = args.options().optimizer;
    let out = with_workers(args.workers, || match settings.evaluator {
        EvaluatorKind::Analytic => optimize_with(
            &config,
            &settings,
            &mut AnalyticEvaluator {
                quad: config.quadrature(),
            },
        ),
        EvaluatorKind::MonteCarlo => optimize_with(
            &config,
            &settings,
            &mut ParallelMcEvaluator {
                seed: config.seed,
                trials: config.mc_trials,
            },
        ),
    })??;
    println!("pt_ris_dbm = {}", out.pt_ris_dbm);
    println!("alpha = {}", out.alpha);
    println!("mode = {}", out.mode);
    println!("op1 = {:e}", out.op1);
    println!("op2 = {:e}", out.op2);
    println!("gap = {:e}", out.gap);
    println!("evaluations = {}", out.evaluations);
    Ok(ExitCode::SUCCESS)
}

fn sweep(spec: &SweepSpec, args: &Common) -> anyhow::Result<ExitCode> {
    let Some(out) = &args.out else {
        bail!("--out is required for sweeps");
    };
    let base = args.config(spec.trials)?;
    let opts = args.options();
    opts.optimizer.validate()?;
    let report = with_workers(args.workers, || run_sweep(spec, &base, out, &opts))??;
    eprintln!("wrote {} rows to {}", report.rows.len(), out.display());
    Ok(exit(report.failures()))
}

fn exit(failures: usize) -> ExitCode {
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{failures} row(s) failed");
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Validate(a) => validate(&a),
        Command::Point(a) => point(&a),
        Command::Optimize(a) => optimize(&a),
        Command::Sweep(a) => {
            let spec = SweepSpec {
                methods: a.common.methods(),
                series: a
                    .series
                    .iter()
                    .map(|s| s.split(';').map(|o| o.trim().to_owned()).collect())
                    .collect(),
                ..SweepSpec::new(&a.name, &a.param, parse_values(&a.values)?)
            };
            sweep(&spec, &a.common)
        }
        Command::Preset(a) => {
            let spec = SweepSpec {
                methods: a.common.methods(),
                ..preset(&a.name)?
            };
            sweep(&spec, &a.common)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
