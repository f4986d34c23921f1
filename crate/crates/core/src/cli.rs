//! Command-line front end: verification suites, sweeps and figure data.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraParams;
use crate::coherent::{check_normalization, eigen_residual, residual_dim, CoherentState};
use crate::error::{Error, Result};
use crate::measures::{verify_moments, verify_unity, UnityOptions, WeightSpec};
use crate::observables::{observe, sweep, Route, SweepPoint};
use crate::sga::verify_algebra;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "clambda", version, about = "C_lambda-extended oscillator verification and figure data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandLine,
}

#[derive(Subcommand, Debug)]
pub enum CommandLine {
    /// Commutation relations, polynomial deformation and Casimir checks
    VerifyAlgebra(Options),
    /// Coherent-state eigenproperty and normalization identities
    VerifyCs(Options),
    /// Resolution of unity and moment conditions
    VerifyUnity(Options),
    /// Mandel Q along a path of z, closed form against the oracle
    SweepQ(Options),
    /// Dispersions and squeezing ratios along a path of z
    SweepSqueeze(Options),
    /// Coefficients of one coherent state
    DumpState(Options),
    /// Data for every figure curve
    ReproduceFigures(Options),
    /// Run the command named in a JSON config file
    Run(Options),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyAlgebra,
    VerifyCs,
    VerifyUnity,
    SweepQ,
    SweepSqueeze,
    DumpState,
    ReproduceFigures,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags; the JSON config file uses the same names.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// JSON file with defaults for any flag
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Command to run (config files only)
    #[arg(skip)]
    pub command: Option<Command>,
    #[arg(long)]
    pub lambda: Option<usize>,
    /// Comma-separated deformation parameters; the last one may be omitted
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,
    /// Comma-separated sectors (default: all)
    #[arg(long, value_delimiter = ',')]
    pub mu: Option<Vec<usize>>,
    /// Single point `re[,im]`
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    #[arg(long)]
    pub zmax: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sweep z = −t for t in [0, zmax] instead of z = t
    #[arg(long)]
    pub z_real_negative: bool,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub dim_check: Option<usize>,
    /// Enable the moment-rule check for the Meijer G weight
    #[arg(long)]
    pub experimental_general: bool,
    #[arg(long)]
    pub tol_algebra: Option<f64>,
    #[arg(long)]
    pub tol_cs: Option<f64>,
    #[arg(long)]
    pub tol_norm: Option<f64>,
    #[arg(long)]
    pub tol_unity: Option<f64>,
    #[arg(long)]
    pub tol_moment: Option<f64>,
    #[arg(long)]
    pub tol_oracle: Option<f64>,
    #[arg(long)]
    pub tol_fourth: Option<f64>,
    /// Output file (directory for reproduce-figures)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Options {
    /// Flags win over the file.
    fn merged_over(self, file: Options) -> Options {
        Options {
            config: self.config,
            command: self.command.or(file.command),
            lambda: self.lambda.or(file.lambda),
            alpha: self.alpha.or(file.alpha),
            mu: self.mu.or(file.mu),
            z: self.z.or(file.z),
            zmax: self.zmax.or(file.zmax),
            steps: self.steps.or(file.steps),
            z_real_negative: self.z_real_negative || file.z_real_negative,
            dim: self.dim.or(file.dim),
            dim_check: self.dim_check.or(file.dim_check),
            experimental_general: self.experimental_general || file.experimental_general,
            tol_algebra: self.tol_algebra.or(file.tol_algebra),
            tol_cs: self.tol_cs.or(file.tol_cs),
            tol_norm: self.tol_norm.or(file.tol_norm),
            tol_unity: self.tol_unity.or(file.tol_unity),
            tol_moment: self.tol_moment.or(file.tol_moment),
            tol_oracle: self.tol_oracle.or(file.tol_oracle),
            tol_fourth: self.tol_fourth.or(file.tol_fourth),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Replaces every algebra identity tolerance when set.
    pub algebra: Option<f64>,
    pub cs: f64,
    pub norm: f64,
    pub unity: f64,
    pub moment: f64,
    pub oracle: f64,
    pub fourth: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: None,
            cs: 1e-10,
            norm: 1e-12,
            unity: 1e-6,
            moment: 1e-8,
            oracle: 1e-9,
            fourth: 1e-8,
        }
    }
}

/// A validated run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: AlgebraParams,
    pub mu: Vec<usize>,
    pub z_path: Vec<Complex64>,
    pub dim: usize,
    pub dim_check: usize,
    pub experimental_general: bool,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn parse_z(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|_| Error::Config(format!("cannot parse '{p}' in z = '{s}'")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Config(format!("z must be 're' or 're,im', got '{s}'"))),
    }
}

/// `α` with the last component filled in when only `λ − 1` are given.
fn full_alpha(lambda: usize, alpha: Option<Vec<f64>>) -> Vec<f64> {
    match alpha {
        None => vec![0.0; lambda],
        Some(mut a) => {
            if a.len() + 1 == lambda {
                a.push(0.0 - a.iter().sum::<f64>());
            }
            a
        }
    }
}

/// Real path `±zmax·j/steps`, `j = 0..=steps`.
pub fn real_path(zmax: f64, steps: usize, negative: bool) -> Vec<Complex64> {
    let sign = if negative { -1.0 } else { 1.0 };
    (0..=steps)
        .map(|j| Complex64::new(sign * zmax * j as f64 / steps as f64, 0.0))
        .collect()
}

impl RunConfig {
    pub fn from_options(opts: Options, command: Option<Command>) -> Result<RunConfig> {
        let opts = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let file: Options = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                opts.merged_over(file)
            }
            None => opts,
        };
        let command = command
            .or(opts.command)
            .ok_or_else(|| Error::Config("no command given".into()))?;
        let lambda = opts.lambda.unwrap_or(2);
        let params = AlgebraParams::new(lambda, full_alpha(lambda, opts.alpha))?;
        let mu = match opts.mu {
            Some(m) if m.is_empty() => return Err(Error::Config("empty mu list".into())),
            Some(m) => m,
            None => (0..lambda).collect(),
        };
        for &m in &mu {
            params.check_sector(m)?;
        }
        let steps = opts.steps.unwrap_or(120);
        if steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        let zmax = opts.zmax.unwrap_or(6.0);
        if !(zmax > 0.0 && zmax.is_finite()) {
            return Err(Error::Config(format!("zmax must be positive, got {zmax}")));
        }
        let z_path = match &opts.z {
            Some(s) => vec![parse_z(s)?],
            None => real_path(zmax, steps, opts.z_real_negative),
        };
        if command == Command::DumpState && (opts.z.is_none() || mu.len() != 1) {
            return Err(Error::Config("dump-state needs --z and a single --mu".into()));
        }
        let d = Tolerances::default();
        let tol = |v: Option<f64>, def: f64| -> Result<f64> {
            match v {
                Some(t) if !(t > 0.0) => Err(Error::Config(format!("tolerance must be positive, got {t}"))),
                Some(t) => Ok(t),
                None => Ok(def),
            }
        };
        let tolerances = Tolerances {
            algebra: opts.tol_algebra.map(|t| tol(Some(t), 0.0)).transpose()?,
            cs: tol(opts.tol_cs, d.cs)?,
            norm: tol(opts.tol_norm, d.norm)?,
            unity: tol(opts.tol_unity, d.unity)?,
            moment: tol(opts.tol_moment, d.moment)?,
            oracle: tol(opts.tol_oracle, d.oracle)?,
            fourth: tol(opts.tol_fourth, d.fourth)?,
        };
        Ok(RunConfig {
            command,
            params,
            mu,
            z_path,
            dim: opts.dim.unwrap_or(crate::algebra::DEFAULT_DIM),
            dim_check: opts.dim_check.unwrap_or(20),
            experimental_general: opts.experimental_general,
            tolerances,
            out: opts.out,
            format: opts.format.unwrap_or_default(),
        })
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(Some(x))
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Text(x.to_string())
    }
}

/// 17 significant digits, `.` decimal point.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(Some(x)) => format_f64(*x),
            Cell::Num(None) => String::new(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Num(Some(x)) => serde_json::Number::from_f64(*x)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::String(x.to_string())),
            Cell::Num(None) => serde_json::Value::Null,
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
        }
    }
}

/// Rows under named columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Re-reads rendered output and checks every cell survives unchanged.
    pub fn validate_round_trip(&self, text: &str, format: Format) -> Result<()> {
        let bad = |msg: String| Error::Io(format!("round trip failed: {msg}"));
        match format {
            Format::Csv => {
                let mut r = csv::Reader::from_reader(text.as_bytes());
                let headers: Vec<String> = r
                    .headers()
                    .map_err(|e| bad(e.to_string()))?
                    .iter()
                    .map(String::from)
                    .collect();
                if headers != self.headers {
                    return Err(bad("header mismatch".into()));
                }
                let mut n = 0;
                for (rec, row) in r.records().zip(&self.rows) {
                    let rec = rec.map_err(|e| bad(e.to_string()))?;
                    for (field, cell) in rec.iter().zip(row) {
                        let ok = match cell {
                            Cell::Num(Some(x)) => field.parse::<f64>().ok().is_some_and(|y| y.to_bits() == x.to_bits() || (x.is_nan() && y.is_nan())),
                            Cell::Num(None) => field.is_empty(),
                            Cell::Int(i) => field.parse::<i64>().ok() == Some(*i),
                            Cell::Text(s) => field == s,
                        };
                        if !ok {
                            return Err(bad(format!("cell '{field}' in row {n}")));
                        }
                    }
                    n += 1;
                }
                if n != self.rows.len() {
                    return Err(bad(format!("{n} rows read, {} written", self.rows.len())));
                }
            }
            Format::Json => {
                let back: Vec<serde_json::Map<String, serde_json::Value>> =
                    serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
                if back.len() != self.rows.len() {
                    return Err(bad("row count".into()));
                }
                for (obj, row) in back.iter().zip(&self.rows) {
                    for (h, cell) in self.headers.iter().zip(row) {
                        if obj.get(h) != Some(&cell.to_json()) {
                            return Err(bad(format!("column {h}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Writes a table, then re-reads and re-validates it.
pub fn write_table(table: &Table, path: &Path, format: Format) -> Result<()> {
    let text = table.render(format)?;
    table.validate_round_trip(&text, format)?;
    fs::write(path, &text)?;
    let back = fs::read_to_string(path)?;
    table.validate_round_trip(&back, format)
}

/// What a command produced.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    /// Failed checks, empty on success.
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn emit(table: &Table, cfg: &RunConfig, out: &mut dyn Write, outcome: &mut Outcome) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            write_table(table, path, cfg.format)?;
            outcome.files.push(path.clone());
        }
        None => {
            let text = table.render(cfg.format)?;
            table.validate_round_trip(&text, cfg.format)?;
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn alpha_label(params: &AlgebraParams) -> String {
    params
        .alpha()
        .iter()
        .map(|a| format!("{a}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn run_verify_algebra(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let report = verify_algebra(&cfg.params, cfg.dim)?;
    let mut table = Table::new(&["check", "residual", "scale", "tolerance", "passed"]);
    let mut outcome = Outcome::default();
    for c in &report.checks {
        let (tol, passed) = match cfg.tolerances.algebra {
            Some(t) => (t, c.residual <= t),
            None => (c.tolerance, c.passed),
        };
        if !passed {
            outcome.failures.push(format!("{}: residual {:e} > {:e}", c.name, c.residual, tol));
        }
        table.push(vec![c.name.as_str().into(), c.residual.into(), c.scale.into(), tol.into(), passed.into()]);
    }
    emit(&table, cfg, out, &mut outcome)?;
    Ok(outcome)
}

fn cs_points(cfg: &RunConfig) -> Vec<Complex64> {
    if cfg.z_path.len() == 1 {
        cfg.z_path.clone()
    } else {
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, 0.4),
            Complex64::new(1.2, -0.5),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 3.0),
        ]
    }
}

fn run_verify_cs(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let mut table = Table::new(&[
        "mu", "z_re", "z_im", "k_max", "eigen_residual", "norm_series", "norm_mittag_leffler", "norm_bessel", "passed",
    ]);
    let mut outcome = Outcome::default();
    let t = cfg.tolerances;
    for &mu in &cfg.mu {
        for z in cs_points(cfg) {
            let state = CoherentState::new(&cfg.params, z, mu)?;
            let res = eigen_residual(&state, &cfg.params, residual_dim(&state))?;
            let norm = check_normalization(&cfg.params, z, mu)?;
            let mut ok = res < t.cs && norm.series < t.norm;
            ok &= norm.mittag_leffler.is_none_or(|e| e < 1e-11_f64.max(t.norm));
            ok &= norm.bessel.is_none_or(|e| e < 1e-10_f64.max(t.norm));
            if z == Complex64::new(0.0, 0.0) {
                let exact = (0..=state.max_level())
                    .all(|n| state.amplitude(n) == if n == mu { 1.0.into() } else { 0.0.into() });
                ok &= exact;
            }
            if !ok {
                outcome.failures.push(format!("mu={mu} z={z}: residual {res:e}, norm {norm:?}"));
            }
            table.push(vec![
                mu.into(),
                z.re.into(),
                z.im.into(),
                state.k_max().into(),
                res.into(),
                norm.series.into(),
                norm.mittag_leffler.into(),
                norm.bessel.into(),
                ok.into(),
            ]);
        }
    }
    emit(&table, cfg, out, &mut outcome)?;
    Ok(outcome)
}

fn run_verify_unity(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let opts = UnityOptions {
        experimental_general: cfg.experimental_general,
        ..UnityOptions::default()
    };
    let report = verify_unity(&cfg.params, cfg.dim_check, &opts)?;
    let mut outcome = Outcome::default();
    let mut table = Table::new(&["kind", "mu", "index", "value", "reference", "deviation", "passed"]);
    let lambda = cfg.params.lambda();
    for (n, &d) in report.diagonal.iter().enumerate() {
        let dev = (d - 1.0).abs();
        let ok = dev < cfg.tolerances.unity;
        if !ok {
            outcome.failures.push(format!("M[{n},{n}] = {d}"));
        }
        table.push(vec!["unity".into(), (n % lambda).into(), n.into(), d.into(), 1.0.into(), dev.into(), ok.into()]);
    }
    for mu in 0..lambda {
        let spec = WeightSpec::for_params(&cfg.params, mu)?;
        if !spec.is_evaluable() {
            continue;
        }
        for m in verify_moments(&spec, 0..=10, &opts.quad)? {
            let ok = m.rel_error < cfg.tolerances.moment;
            if !ok {
                outcome.failures.push(format!("mu={mu} moment k={}: rel error {:e}", m.k, m.rel_error));
            }
            table.push(vec!["moment".into(), mu.into(), m.k.into(), m.lhs.into(), m.rhs.into(), m.rel_error.into(), ok.into()]);
        }
    }
    emit(&table, cfg, out, &mut outcome)?;
    Ok(outcome)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn q_table(points: &[SweepPoint]) -> Table {
    let mut table = Table::new(&[
        "z_re", "z_im", "mu", "n_mean", "n_var", "Q_closed", "Q_oracle", "Q_disagreement", "error",
    ]);
    for p in points {
        let closed = p.closed.as_ref();
        let oracle = p.oracle.as_ref();
        table.push(vec![
            p.z.re.into(),
            p.z.im.into(),
            p.mu.into(),
            oracle.map(|o| o.n_mean).into(),
            oracle.map(|o| o.n_var).into(),
            closed.and_then(|c| c.mandel_q).into(),
            oracle.and_then(|o| o.mandel_q).into(),
            p.q_disagreement.into(),
            p.error.as_deref().unwrap_or("").into(),
        ]);
    }
    table
}

fn run_sweep_q(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut points = Vec::new();
    for &mu in &cfg.mu {
        points.extend(sweep(&cfg.params, mu, &cfg.z_path));
    }
    for p in &points {
        if let Some(e) = &p.error {
            outcome.failures.push(format!("mu={} z={},{}: {e}", p.mu, p.z.re, p.z.im));
        } else if p.q_disagreement.is_some_and(|d| d > cfg.tolerances.oracle) {
            outcome.failures.push(format!("mu={} z={},{}: Q disagreement {:e}", p.mu, p.z.re, p.z.im, p.q_disagreement.unwrap()));
        }
    }
    emit(&q_table(&points), cfg, out, &mut outcome)?;
    Ok(outcome)
}

fn squeeze_table(points: &[SweepPoint], tol: &Tolerances, failures: &mut Vec<String>) -> Table {
    let mut table = Table::new(&[
        "z_re", "z_im", "mu", "h0_mean", "disp_x", "disp_p", "X", "P", "x4", "p4", "Y", "Q4",
        "disp_x_oracle", "disp_p_oracle", "x4_oracle", "p4_oracle", "max_disagreement", "error",
    ]);
    for p in points {
        let (c, o) = match (&p.closed, &p.oracle) {
            (Some(c), Some(o)) => (c, o),
            _ => {
                let e = p.error.clone().unwrap_or_default();
                failures.push(format!("mu={} z={},{}: {e}", p.mu, p.z.re, p.z.im));
                let mut row: Vec<Cell> = vec![p.z.re.into(), p.z.im.into(), p.mu.into()];
                row.extend((0..14).map(|_| Cell::Num(None)));
                row.push(e.as_str().into());
                table.push(row);
                continue;
            }
        };
        let second = rel_diff(c.disp_x, o.disp_x).max(rel_diff(c.disp_p, o.disp_p));
        let fourth = match (c.x4, o.x4, c.p4, o.p4) {
            (Some(a), Some(b), Some(u), Some(v)) => rel_diff(a, b).max(rel_diff(u, v)),
            _ => 0.0,
        };
        if second > tol.oracle || fourth > tol.fourth {
            failures.push(format!(
                "mu={} z={},{}: dispersion disagreement {second:e}, fourth order {fourth:e}",
                p.mu, p.z.re, p.z.im
            ));
        }
        table.push(vec![
            p.z.re.into(),
            p.z.im.into(),
            p.mu.into(),
            c.h0_mean.into(),
            c.disp_x.into(),
            c.disp_p.into(),
            c.x_ratio.into(),
            c.p_ratio.into(),
            c.x4.into(),
            c.p4.into(),
            c.y_ratio.into(),
            c.q4_ratio.into(),
            o.disp_x.into(),
            o.disp_p.into(),
            o.x4.into(),
            o.p4.into(),
            second.max(fourth).into(),
            "".into(),
        ]);
    }
    table
}

fn run_sweep_squeeze(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut points = Vec::new();
    for &mu in &cfg.mu {
        points.extend(sweep(&cfg.params, mu, &cfg.z_path));
    }
    let table = squeeze_table(&points, &cfg.tolerances, &mut outcome.failures);
    emit(&table, cfg, out, &mut outcome)?;
    Ok(outcome)
}

fn run_dump_state(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    let mu = cfg.mu[0];
    let state = CoherentState::new(&cfg.params, cfg.z_path[0], mu)?;
    let mut outcome = Outcome::default();
    match cfg.format {
        Format::Json => {
            let text = serde_json::to_string_pretty(&state.dump(&cfg.params)).expect("serializable") + "\n";
            match &cfg.out {
                Some(p) => {
                    fs::write(p, &text)?;
                    outcome.files.push(p.clone());
                }
                None => out.write_all(text.as_bytes())?,
            }
        }
        Format::Csv => {
            let mut table = Table::new(&["k", "n", "re", "im"]);
            for (k, c) in state.coeffs().iter().enumerate() {
                table.push(vec![k.into(), (k * cfg.params.lambda() + mu).into(), c.re.into(), c.im.into()]);
            }
            emit(&table, cfg, out, &mut outcome)?;
        }
    }
    Ok(outcome)
}

/// Which quantity a figure plots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    /// Mandel `Q` against `|z|`.
    Mandel,
    /// `X` and `Y` against `−z` for real `z`.
    Squeezing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureCurve {
    pub style: &'static str,
    pub params: AlgebraParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec {
    pub name: &'static str,
    pub kind: FigureKind,
    pub mu: usize,
    pub zmax: f64,
    pub steps: usize,
    pub curves: Vec<FigureCurve>,
}

fn curve(style: &'static str, lambda: usize, head: &[f64]) -> FigureCurve {
    FigureCurve {
        style,
        params: AlgebraParams::new(lambda, full_alpha(lambda, Some(head.to_vec()))).expect("caption parameters are valid"),
    }
}

/// Parameter sets of every figure.
pub fn figure_specs() -> Vec<FigureSpec> {
    let mandel = |name, mu, curves| FigureSpec {
        name,
        kind: FigureKind::Mandel,
        mu,
        zmax: 6.0,
        steps: 120,
        curves,
    };
    vec![
        mandel("fig1a", 0, vec![
            curve("solid", 2, &[0.0]),
            curve("dashed", 2, &[-0.8]),
            curve("dotted", 2, &[-0.96]),
            curve("dot-dashed", 2, &[1.0]),
        ]),
        mandel("fig1b", 1, vec![
            curve("solid", 2, &[0.0]),
            curve("dot-dashed", 2, &[1.0]),
            curve("dotted", 2, &[9.0]),
            curve("dashed", 2, &[19.0]),
        ]),
        mandel("fig2a", 0, vec![
            curve("solid", 3, &[0.0, 0.0]),
            curve("dashed", 3, &[-0.7, 0.7]),
            curve("dotted", 3, &[-0.94, -1.0]),
            curve("dot-dashed", 3, &[2.0, -2.0]),
        ]),
        mandel("fig2b", 1, vec![
            curve("solid", 3, &[0.0, 0.0]),
            curve("dashed", 3, &[2.0, -2.0]),
            curve("dotted", 3, &[0.0, 13.0]),
            curve("dot-dashed", 3, &[-0.94, -1.0]),
        ]),
        mandel("fig2c", 2, vec![
            curve("solid", 3, &[0.0, 0.0]),
            curve("dashed", 3, &[2.0, -2.0]),
            curve("dotted", 3, &[0.0, 28.0]),
            curve("dot-dashed", 3, &[-0.94, -1.0]),
        ]),
        FigureSpec {
            name: "fig3",
            kind: FigureKind::Squeezing,
            mu: 0,
            zmax: 10.0,
            steps: 200,
            curves: vec![
                curve("solid", 2, &[0.0]),
                curve("dashed", 2, &[-0.4]),
                curve("dotted", 2, &[1.0]),
                curve("dot-dashed", 2, &[3.0]),
            ],
        },
    ]
}

/// Data for one figure, with the oracle alongside each closed-form value.
pub fn figure_table(spec: &FigureSpec, failures: &mut Vec<String>) -> Result<Table> {
    let mut table = match spec.kind {
        FigureKind::Mandel => Table::new(&["style", "alpha", "mu", "r", "Q", "Q_oracle"]),
        FigureKind::Squeezing => Table::new(&["style", "alpha", "mu", "minus_z", "X", "Y", "X_oracle", "Y_oracle"]),
    };
    let negative = spec.kind == FigureKind::Squeezing;
    let path = real_path(spec.zmax, spec.steps, negative);
    for c in &spec.curves {
        let label = alpha_label(&c.params);
        for &z in &path {
            let closed = observe(&c.params, z, spec.mu, Route::ClosedForm)?;
            let oracle = observe(&c.params, z, spec.mu, Route::Oracle)?;
            match spec.kind {
                FigureKind::Mandel => {
                    let (q, qo) = (closed.mandel_q.expect("closed form"), oracle.mandel_q);
                    if qo.is_some_and(|o| rel_diff(q, o) > 1e-9) {
                        failures.push(format!("{} {} r={}: Q {q} vs {qo:?}", spec.name, c.style, z.re));
                    }
                    table.push(vec![c.style.into(), label.as_str().into(), spec.mu.into(), z.re.into(), q.into(), qo.into()]);
                }
                FigureKind::Squeezing => {
                    let (x, xo) = (closed.x_ratio, oracle.x_ratio);
                    let (y, yo) = (closed.y_ratio.expect("mu = 0"), oracle.y_ratio.expect("mu = 0"));
                    if rel_diff(x, xo) > 1e-9 || rel_diff(y, yo) > 1e-8 {
                        failures.push(format!("{} {} -z={}: X {x} vs {xo}, Y {y} vs {yo}", spec.name, c.style, -z.re));
                    }
                    table.push(vec![
                        c.style.into(),
                        label.as_str().into(),
                        spec.mu.into(),
                        (-z.re).into(),
                        x.into(),
                        y.into(),
                        xo.into(),
                        yo.into(),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

fn run_reproduce_figures(cfg: &RunConfig) -> Result<Outcome> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
    fs::create_dir_all(&dir)?;
    let mut outcome = Outcome::default();
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    for spec in figure_specs() {
        let table = figure_table(&spec, &mut outcome.failures)?;
        let path = dir.join(format!("{}.{ext}", spec.name));
        write_table(&table, &path, cfg.format)?;
        outcome.files.push(path);
    }
    Ok(outcome)
}

/// Runs a validated config; check results go to `out`.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<Outcome> {
    match cfg.command {
        Command::VerifyAlgebra => run_verify_algebra(cfg, out),
        Command::VerifyCs => run_verify_cs(cfg, out),
        Command::VerifyUnity => run_verify_unity(cfg, out),
        Command::SweepQ => run_sweep_q(cfg, out),
        Command::SweepSqueeze => run_sweep_squeeze(cfg, out),
        Command::DumpState => run_dump_state(cfg, out),
        Command::ReproduceFigures => run_reproduce_figures(cfg),
    }
}

fn is_input_error(e: &Error) -> bool {
    !matches!(e, Error::QuadratureFailure(_) | Error::NotImplemented(_))
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_PASS;
            }
            let _ = writeln!(err, "{}", error_json("Usage", e.to_string().trim()));
            return EXIT_INVALID;
        }
    };
    let (opts, command) = match cli.command {
        CommandLine::VerifyAlgebra(o) => (o, Some(Command::VerifyAlgebra)),
        CommandLine::VerifyCs(o) => (o, Some(Command::VerifyCs)),
        CommandLine::VerifyUnity(o) => (o, Some(Command::VerifyUnity)),
        CommandLine::SweepQ(o) => (o, Some(Command::SweepQ)),
        CommandLine::SweepSqueeze(o) => (o, Some(Command::SweepSqueeze)),
        CommandLine::DumpState(o) => (o, Some(Command::DumpState)),
        CommandLine::ReproduceFigures(o) => (o, Some(Command::ReproduceFigures)),
        CommandLine::Run(o) => (o, None),
    };
    let cfg = match RunConfig::from_options(opts, command) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(e.kind(), &e.to_string()));
            return EXIT_INVALID;
        }
    };
    match execute(&cfg, out) {
        Ok(outcome) if outcome.passed() => EXIT_PASS,
        Ok(outcome) => {
            let msg = serde_json::json!({ "error": "ToleranceFailure", "failures": outcome.failures });
            let _ = writeln!(err, "{msg}");
            EXIT_TOLERANCE
        }
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(e.kind(), &e.to_string()));
            if is_input_error(&e) {
                EXIT_INVALID
            } else {
                EXIT_TOLERANCE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("clambda").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(-3.0), "-3.0000000000000000e0");
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn alpha_closure_and_parsing() {
        assert_eq!(full_alpha(3, Some(vec![2.0, -0.5])), vec![2.0, -0.5, -1.5]);
        assert_eq!(parse_z("-1.5,0.25").unwrap(), Complex64::new(-1.5, 0.25));
        assert!(parse_z("1,2,3").is_err());
    }

    #[test]
    fn verify_algebra_passes() {
        let (code, out, err) = run_args(&["verify-algebra", "--lambda", "3", "--alpha", "2,-2,0", "--dim", "64"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("check,residual,scale,tolerance,passed"));
    }

    #[test]
    fn sweep_q_small_z_limit() {
        let (code, out, err) =
            run_args(&["sweep-q", "--lambda", "2", "--alpha", "1,-1", "--mu", "0", "--zmax", "6", "--steps", "120"]);
        assert_eq!(code, 0, "{err}");
        let mut r = csv::Reader::from_reader(out.as_bytes());
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 121);
        let q1: f64 = rows[1][5].parse().unwrap();
        assert!((q1 - 1.0).abs() < 0.05);
    }

    #[test]
    fn invalid_input_exit_code() {
        let (code, _, err) = run_args(&["verify-cs", "--lambda", "2", "--alpha", "0.5,0"]);
        assert_eq!(code, 2);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "SumNotZero");
        let (code, _, err) = run_args(&["sweep-q", "--steps", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("Config"));
        let (code, _, _) = run_args(&["no-such-command"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn tolerance_failure_exit_code() {
        let (code, _, err) = run_args(&["verify-algebra", "--lambda", "2", "--dim", "16", "--tol-algebra", "1e-300"]);
        assert_eq!(code, 1, "{err}");
        assert!(err.contains("ToleranceFailure"));
    }

    #[test]
    fn config_file_and_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.json");
        fs::write(&cfg, r#"{"command": "dump-state", "lambda": 3, "alpha": [2, -2, 0], "mu": [1], "z": "0.5,0.5", "format": "json"}"#).unwrap();
        let (code, out, err) = run_args(&["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lambda"], 3);
        assert_eq!(v["mu"], 1);
        let (code, out, _) = run_args(&["run", "--config", cfg.to_str().unwrap(), "--mu", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["mu"], 2);
        fs::write(&cfg, r#"{"command": "dump-state", "bogus": 1}"#).unwrap();
        let (code, _, _) = run_args(&["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code, 2);
    }

    #[test]
    fn output_is_deterministic_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        for format in ["csv", "json"] {
            let a = dir.path().join(format!("a.{format}"));
            let b = dir.path().join(format!("b.{format}"));
            for p in [&a, &b] {
                let (code, _, err) = run_args(&[
                    "sweep-squeeze", "--lambda", "2", "--alpha", "1", "--mu", "0", "--zmax", "2", "--steps", "8",
                    "--z-real-negative", "--format", format, "--out", p.to_str().unwrap(),
                ]);
                assert_eq!(code, 0, "{err}");
            }
            assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        }
    }
}
