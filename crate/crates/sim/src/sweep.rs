//! Point evaluations and parameter sweeps written as CSV.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use risnoma_core::analytic::analytic_outage;
use risnoma_core::config::{AlphaMode, ConfigDigest, SystemConfig, UserId};
use risnoma_core::link::LinkBudget;
use risnoma_core::montecarlo::{Method, OutageResult};
use risnoma_core::optimizer::{
    optimize_with, AnalyticEvaluator, EvaluatorKind, OptimizationOutcome, OptimizerSettings,
};

use crate::config_file::{apply_override, is_config_key, set_number};
use crate::error::{Result, SimError};
use crate::parallel::{estimate_both, ParallelMcEvaluator};

pub const CSV_COLUMNS: [&str; 9] = [
    "sweep_param",
    "sweep_value",
    "user",
    "method",
    "op",
    "err",
    "alpha",
    "mode",
    "ms",
];

/// Monte-Carlo estimates below this are flagged as floor-limited.
pub const MC_FLOOR: f64 = 1e-4;
/// Relative standard error above which a Monte-Carlo point is noisy.
pub const NOISY_REL_ERR: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodSet {
    Mc,
    Analytic,
    Both,
}

impl MethodSet {
    pub fn methods(self) -> &'static [Method] {
        match self {
            MethodSet::Mc => &[Method::MonteCarlo],
            MethodSet::Analytic => &[Method::Analytic],
            MethodSet::Both => &[Method::MonteCarlo, Method::Analytic],
        }
    }
}

impl FromStr for MethodSet {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mc" => Ok(MethodSet::Mc),
            "analytic" => Ok(MethodSet::Analytic),
            "both" => Ok(MethodSet::Both),
            other => Err(SimError::BadValue {
                key: "method".into(),
                msg: format!("expected mc, analytic or both, got `{other}`"),
            }),
        }
    }
}

/// Parses `v1,v2,...`, `start:stop:step` or `db:start:stop:step`.
///
/// The `db` form steps in dB and yields the linear values `10^(x/10)`.
pub fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| SimError::Sweep(format!("{s}: {msg}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    let (db, range) = match parts.as_slice() {
        [one] => return one.split(',').map(num).collect(),
        ["db", rest @ ..] => (true, rest),
        rest => (false, rest),
    };
    let [start, stop, step] = range else {
        return Err(bad("expected start:stop:step"));
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if step.is_nan() || step <= 0.0 || stop < start {
        return Err(bad("need step > 0 and stop >= start"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let x = start + i as f64 * step;
            if db {
                10f64.powf(x / 10.0)
            } else {
                x
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    /// Any config key, or `ris_size`.
    pub param: String,
    pub values: Vec<f64>,
    pub methods: MethodSet,
    /// Applied to every point when set.
    pub alpha_mode: Option<AlphaMode>,
    /// One curve per entry, each a list of `key=value` overrides.
    pub series: Vec<Vec<String>>,
    /// Desk-scale trial count; `--trials` overrides it.
    pub trials: Option<u64>,
}

impl SweepSpec {
    pub fn new(name: &str, param: &str, values: Vec<f64>) -> Self {
        Self {
            name: name.to_owned(),
            param: param.to_owned(),
            values,
            methods: MethodSet::Both,
            alpha_mode: None,
            series: Vec::new(),
            trials: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(SimError::Sweep("a sweep needs at least 2 points".into()));
        }
        if !is_config_key(&self.param) {
            return Err(SimError::UnknownKey(self.param.clone()));
        }
        for s in self.series.iter().flatten() {
            let key = s.split_once('=').map_or(s.as_str(), |(k, _)| k).trim();
            if !is_config_key(key) {
                return Err(SimError::UnknownKey(key.to_owned()));
            }
        }
        Ok(())
    }

    fn series_or_default(&self) -> Vec<Vec<String>> {
        if self.series.is_empty() {
            vec![Vec::new()]
        } else {
            self.series.clone()
        }
    }

    /// The `(sweep_param, config)` of every point, in output order.
    pub fn points(&self, base: &SystemConfig) -> Vec<(String, f64, Result<SystemConfig>)> {
        let mut out = Vec::new();
        for series in self.series_or_default() {
            let label = if series.is_empty() {
                self.param.clone()
            } else {
                format!("{};{}", self.param, series.join(";"))
            };
            for &v in &self.values {
                let cfg = (|| {
                    let mut c = base.clone();
                    if let Some(mode) = self.alpha_mode {
                        c.alpha_mode = mode;
                    }
                    for o in &series {
                        c = apply_override(&c, o)?;
                    }
                    set_number(&c, &self.param, v)
                })();
                out.push((label.clone(), v, cfg));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub allow_noisy: bool,
    /// Record wall time in `ms`; otherwise `ms` is 0 and output is
    /// reproducible byte for byte.
    pub timing: bool,
    pub optimizer: OptimizerSettings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub sweep_param: String,
    pub sweep_value: f64,
    pub user: UserId,
    pub method: Method,
    /// NaN when the evaluation failed or was too noisy.
    pub op: f64,
    /// Standard error (Monte-Carlo) or inversion error bound (analytic).
    pub err: f64,
    pub alpha: f64,
    pub mode: String,
    pub ms: f64,
    pub digest: ConfigDigest,
    pub failed: bool,
}

impl ResultRow {
    fn record(&self) -> [String; 9] {
        let num = |x: f64| {
            if x.is_nan() {
                "NaN".to_owned()
            } else {
                format!("{x}")
            }
        };
        let sci = |x: f64| {
            if x.is_nan() {
                "NaN".to_owned()
            } else {
                format!("{x:e}")
            }
        };
        [
            self.sweep_param.clone(),
            num(self.sweep_value),
            self.user.to_string(),
            self.method.to_string(),
            sci(self.op),
            sci(self.err),
            num(self.alpha),
            self.mode.clone(),
            format!("{:.3}", self.ms),
        ]
    }
}

fn millis(start: Instant, timing: bool) -> f64 {
    if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn optimize_point(config: &SystemConfig, opts: &RunOptions) -> Result<OptimizationOutcome> {
    let out = match opts.optimizer.evaluator {
        EvaluatorKind::Analytic => optimize_with(
            config,
            &opts.optimizer,
            &mut AnalyticEvaluator {
                quad: config.quadrature(),
            },
        ),
        EvaluatorKind::MonteCarlo => optimize_with(
            config,
            &opts.optimizer,
            &mut ParallelMcEvaluator {
                seed: config.seed,
                trials: config.mc_trials,
            },
        ),
    };
    Ok(out?)
}

/// Evaluates both users with every requested method at one config.
///
/// Evaluator failures become rows with `op = NaN` and `failed = true`; only
/// an invalid config is an error.
pub fn run_point(
    config: &SystemConfig,
    methods: MethodSet,
    opts: &RunOptions,
) -> Result<Vec<ResultRow>> {
    let mut cfg = config.validate()?.config;
    let digest = cfg.digest();
    let mut base_mode = cfg.alpha_mode.as_str().to_owned();
    let mut setup_error = None;
    if cfg.alpha_mode == AlphaMode::Optimized {
        match optimize_point(&cfg, opts) {
            Ok(o) => {
                cfg.alpha_mode = AlphaMode::Fixed;
                cfg.alpha_linear = o.alpha;
                cfg.pt_ris_dbm = o.pt_ris_dbm;
                base_mode = format!("optimized:{}", o.mode);
            }
            Err(e) => setup_error = Some(e.to_string()),
        }
    }
    let alpha = match LinkBudget::from_config(&cfg) {
        Ok(b) => b.alpha,
        Err(e) => {
            setup_error.get_or_insert(e.to_string());
            f64::NAN
        }
    };

    let row = |user, method, op, err, mode: String, ms, failed| ResultRow {
        sweep_param: "point".to_owned(),
        sweep_value: 0.0,
        user,
        method,
        op,
        err,
        alpha,
        mode,
        ms,
        digest,
        failed,
    };
    let failed_rows = |method, msg: &str| {
        UserId::BOTH
            .map(|u| {
                row(
                    u,
                    method,
                    f64::NAN,
                    f64::NAN,
                    format!("error: {msg}"),
                    0.0,
                    true,
                )
            })
            .to_vec()
    };

    let mut rows = Vec::new();
    for &method in methods.methods() {
        if let Some(msg) = &setup_error {
            rows.extend(failed_rows(method, msg));
            continue;
        }
        let start = Instant::now();
        match method {
            Method::MonteCarlo => match estimate_both(&cfg) {
                Ok(results) => {
                    let ms = millis(start, opts.timing);
                    for r in results {
                        let (op, mode) = flag_mc(&r, &base_mode, opts.allow_noisy);
                        rows.push(row(r.user, method, op, r.std_err, mode, ms, false));
                    }
                }
                Err(e) => rows.extend(failed_rows(method, &e.to_string())),
            },
            Method::Analytic => {
                for u in UserId::BOTH {
                    let start = Instant::now();
                    rows.push(match analytic_outage(&cfg, u) {
                        Ok(r) => row(
                            u,
                            method,
                            r.op,
                            r.std_err,
                            base_mode.clone(),
                            millis(start, opts.timing),
                            false,
                        ),
                        Err(e) => row(
                            u,
                            method,
                            f64::NAN,
                            f64::NAN,
                            format!("error: {e}"),
                            0.0,
                            true,
                        ),
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn flag_mc(r: &OutageResult, mode: &str, allow_noisy: bool) -> (f64, String) {
    let mut mode = mode.to_owned();
    let mut op = r.op;
    if r.op < MC_FLOOR {
        mode.push_str("+floor");
    }
    if r.std_err > NOISY_REL_ERR * r.op {
        mode.push_str("+noisy");
        if !allow_noisy {
            op = f64::NAN;
        }
    }
    (op, mode)
}

/// Outcome of a completed sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<ResultRow>,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed).count()
    }
}

/// Commented header: name, full base config as JSON, seed, timestamp.
fn header(spec: &SweepSpec, base: &SystemConfig) -> String {
    let mut h = String::new();
    let json = serde_json::to_string(base).unwrap_or_default();
    let _ = writeln!(h, "# risnoma sweep: {} over {}", spec.name, spec.param);
    let _ = writeln!(h, "# config: {json}");
    let _ = writeln!(h, "# seed: {} trials: {}", base.seed, base.mc_trials);
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let _ = writeln!(h, "# generated_unix: {now}");
    h
}

pub fn write_rows<W: Write>(w: &mut csv::Writer<W>, rows: &[ResultRow]) -> Result<()> {
    for r in rows {
        w.write_record(r.record())?;
    }
    Ok(())
}

/// Runs every point and writes the CSV in sweep order.
///
/// Points are evaluated concurrently. If a point cannot be set up, the rows
/// before it are written followed by an `error` trailer row, and the error
/// is returned.
pub fn run_sweep(
    spec: &SweepSpec,
    base: &SystemConfig,
    out: &Path,
    opts: &RunOptions,
) -> Result<SweepReport> {
    spec.validate()?;
    let file = File::create(out).map_err(|e| SimError::io(out, e))?;
    let mut file = BufWriter::new(file);
    file.write_all(header(spec, base).as_bytes())
        .map_err(|e| SimError::io(out, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_COLUMNS)?;

    let results: Vec<(String, f64, Result<Vec<ResultRow>>)> = spec
        .points(base)
        .into_par_iter()
        .map(|(label, v, cfg)| {
            let rows = cfg.and_then(|c| run_point(&c, spec.methods, opts));
            (label, v, rows)
        })
        .collect();

    let mut all = Vec::new();
    for (label, v, rows) in results {
        match rows {
            Ok(mut rows) => {
                for r in &mut rows {
                    r.sweep_param = label.clone();
                    r.sweep_value = v;
                }
                write_rows(&mut w, &rows)?;
                all.extend(rows);
            }
            Err(e) => {
                let msg = format!("error: {e}");
                w.write_record([
                    "error",
                    &format!("{v}"),
                    "",
                    "",
                    "NaN",
                    "NaN",
                    "NaN",
                    &msg,
                    "0.000",
                ])?;
                w.flush().map_err(|e| SimError::io(out, e))?;
                return Err(SimError::Sweep(format!("{label} = {v}: {e}")));
            }
        }
    }
    w.flush().map_err(|e| SimError::io(out, e))?;
    Ok(SweepReport { rows: all })
}

/// The CSV text without `#` comment lines.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .fold(String::new(), |mut s, l| {
            s.push_str(l);
            s.push('\n');
            s
        })
}
