//! Command-line front end. The binary only forwards `std::env::args` to
//! [`main_with_args`].

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value as Json;

use crate::error::Error;
use crate::fock::Statistics;
use crate::interferometer::Network;
use crate::scenarios::{self, ScenarioReport, Value, CATALOG, DEFAULT_SEED};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SCENARIO: i32 = 3;

/// Significant digits in JSON and CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;
/// Decimal places in table output.
pub const TABLE_DECIMALS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "whichway",
    version,
    about = "Spin entanglement from which-way detection of identical particles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named scenario.
    Run(RunArgs),
    /// Print the scenario catalog.
    List {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Send the opposite-spin input through a network read from a JSON file.
    Network {
        file: PathBuf,
        #[arg(long, default_value = "fermion")]
        statistics: Statistics,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub scenario: String,
    #[arg(long, default_value = "fermion")]
    pub statistics: Statistics,
    /// Tree depth or number of feedback rounds.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of grid points for sweeps.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long = "dt-max", default_value_t = 3.0)]
    pub dt_max: f64,
    /// Monte Carlo trajectories; 0 gives exact results only.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Feed both particles with spin up (fig1 only).
    #[arg(long = "equal-spins")]
    pub equal_spins: bool,
}

/// Validated run request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub statistics: Statistics,
    pub depth: Option<usize>,
    pub grid: Option<usize>,
    pub v: f64,
    pub sigma: f64,
    pub dt_max: f64,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub equal_spins: bool,
}

impl RunConfig {
    /// Defaults for `scenario`, rejecting unknown names.
    pub fn new(scenario: &str) -> Result<Self, CliError> {
        if !CATALOG.iter().any(|s| s.name == scenario) {
            return Err(CliError::Usage(format!(
                "unknown scenario '{scenario}' (see `whichway list`)"
            )));
        }
        Ok(RunConfig {
            scenario: scenario.to_owned(),
            statistics: Statistics::Fermion,
            depth: None,
            grid: None,
            v: 1.0,
            sigma: 1.0,
            dt_max: 3.0,
            trials: 100_000,
            seed: DEFAULT_SEED,
            format: Format::Table,
            output: None,
            equal_spins: false,
        })
    }

    pub fn from_args(args: RunArgs) -> Result<Self, CliError> {
        let base = RunConfig::new(&args.scenario)?;
        let config = RunConfig {
            statistics: args.statistics,
            depth: args.depth,
            grid: args.grid,
            v: args.v,
            sigma: args.sigma,
            dt_max: args.dt_max,
            trials: args.trials,
            seed: args.seed,
            format: args.format,
            output: args.output,
            equal_spins: args.equal_spins,
            ..base
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if let Some(d) = self.depth {
            let max = match self.scenario.as_str() {
                "tree" => scenarios::MAX_SCENARIO_TREE_DEPTH,
                "feedback" => scenarios::MAX_FEEDBACK_ROUNDS,
                other => return usage(format!("--depth does not apply to '{other}'")),
            };
            if d == 0 || d > max {
                return usage(format!("--depth must be in 1..={max}"));
            }
        }
        if let Some(g) = self.grid {
            if !matches!(self.scenario.as_str(), "complementarity" | "gaussian" | "dual") {
                return usage(format!("--grid does not apply to '{}'", self.scenario));
            }
            if g < 2 {
                return usage("--grid needs at least 2 points".into());
            }
        }
        if self.equal_spins && self.scenario != "fig1" {
            return usage("--equal-spins applies to fig1 only".into());
        }
        if self.scenario == "gaussian" {
            if !(self.sigma > 0.0 && self.sigma.is_finite()) {
                return usage("--sigma must be positive".into());
            }
            if !(self.dt_max > 0.0 && self.dt_max.is_finite()) || !self.v.is_finite() {
                return usage("--dt-max must be positive and --v finite".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("scenario failed: {0}")]
    Scenario(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Scenario(_) | CliError::Io(_) => EXIT_SCENARIO,
        }
    }
}

/// Executes the scenario named in `config`.
pub fn run(config: &RunConfig) -> Result<ScenarioReport, CliError> {
    let stats = config.statistics;
    let report = match config.scenario.as_str() {
        "fig1" => scenarios::scenario_fig1(stats, config.equal_spins)?,
        "fig2" => scenarios::scenario_fig2(stats)?,
        "tree" => scenarios::scenario_tree(config.depth.unwrap_or(2), stats)?,
        "feedback" => scenarios::scenario_feedback(config.depth.unwrap_or(3), stats, config.trials, config.seed)?,
        "statistics-test" => scenarios::scenario_statistics_test(stats)?,
        "mixed-input" => scenarios::scenario_mixed_input(stats)?,
        "complementarity" => {
            scenarios::scenario_complementarity(&scenarios::overlap_grid(config.grid.unwrap_or(21))?, stats)?
        }
        "gaussian" => {
            let delays = scenarios::delay_grid(config.dt_max, config.grid.unwrap_or(21))?;
            scenarios::scenario_gaussian(config.v, config.sigma, &delays, stats)?
        }
        "dual" => scenarios::scenario_dual(stats, &scenarios::overlap_grid(config.grid.unwrap_or(11))?)?,
        other => return Err(CliError::Usage(format!("unknown scenario '{other}'"))),
    };
    Ok(report)
}

/// Runs `config` and writes the rendered report to `out` (or the configured file).
pub fn run_to(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let report = run(config)?;
    emit(&render(&report, config.format)?, config.output.as_ref(), out)
}

fn emit(text: &str, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn render(report: &ScenarioReport, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Table => render_table(report),
        Format::Json => render_json(report),
        Format::Csv => render_csv(report)?,
    })
}

/// Rounds to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let y: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn round_json(v: &mut Json) {
    match v {
        Json::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| !n.is_i64() && !n.is_u64()) {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x, SIGNIFICANT_DIGITS)) {
                    *n = r;
                }
            }
        }
        Json::Array(a) => a.iter_mut().for_each(round_json),
        Json::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with numbers rounded to [`SIGNIFICANT_DIGITS`].
pub fn render_json(report: &ScenarioReport) -> String {
    let mut v = serde_json::to_value(report).expect("report serializes");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(x) => {
            let r = round_significant(*x, SIGNIFICANT_DIGITS);
            if r != 0.0 && (r.abs() < 1e-6 || r.abs() >= 1e15) {
                format!("{r:e}")
            } else {
                r.to_string()
            }
        }
        Value::Integer(n) => n.to_string(),
        other => other.to_string(),
    }
}

/// Header row plus one row per entry of the primary table.
pub fn render_csv(report: &ScenarioReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(t) = report.tables.first() {
        w.write_record(&t.columns).map_err(io::Error::from)?;
        for row in &t.rows {
            w.write_record(row.iter().map(csv_cell)).map_err(io::Error::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn table_cell(v: &Value) -> String {
    match v {
        Value::Number(x) => {
            let s = format!("{:.*}", TABLE_DECIMALS, x);
            // avoid printing "-0.000000"
            if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                s.trim_start_matches('-').to_owned()
            } else {
                s
            }
        }
        other => other.to_string(),
    }
}

fn write_grid(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_owned()
    };
    out.push_str(&line(header));
    out.push('\n');
    out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
}

pub fn render_table(report: &ScenarioReport) -> String {
    let mut out = format!("scenario: {}\n", report.scenario);
    for (k, v) in &report.parameters {
        out.push_str(&format!("  {k} = {v}\n"));
    }
    out.push('\n');
    let rows: Vec<Vec<String>> = report
        .scalars
        .iter()
        .map(|s| {
            let prov = serde_json::to_value(s.provenance)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned));
            vec![s.name.clone(), table_cell(&s.value), prov.unwrap_or_default()]
        })
        .collect();
    write_grid(&mut out, &["result".into(), "value".into(), "provenance".into()], &rows);
    for t in &report.tables {
        out.push_str(&format!("\n[{}]\n", t.name));
        let rows: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(table_cell).collect()).collect();
        write_grid(&mut out, &t.columns, &rows);
    }
    for m in &report.matrices {
        let labels = m.density_matrix.labels();
        out.push_str(&format!("\n[{}] qubits ({}, {})\n", m.name, labels[0], labels[1]));
        for i in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|j| {
                    let z = m.density_matrix.element(i, j);
                    format!(
                        "{:>9}{:+.*}i",
                        table_cell(&Value::Number(z.re)),
                        TABLE_DECIMALS,
                        z.im + 0.0
                    )
                })
                .collect();
            out.push_str(&format!("  {}\n", row.join("  ")));
        }
    }
    for n in &report.notes {
        out.push_str(&format!("\nnote: {n}\n"));
    }
    out
}

pub fn render_catalog(format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(CATALOG).expect("catalog serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "parameters", "anchor"])
                .map_err(io::Error::from)?;
            for s in CATALOG {
                w.write_record([s.name, &s.parameters.join(" "), s.anchor])
                    .map_err(io::Error::from)?;
            }
            let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
            String::from_utf8(bytes).expect("csv is utf-8")
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = CATALOG
                .iter()
                .map(|s| vec![s.name.to_owned(), s.parameters.join(","), s.anchor.to_owned()])
                .collect();
            let mut out = String::new();
            write_grid(
                &mut out,
                &["scenario".into(), "parameters".into(), "reproduces".into()],
                &rows,
            );
            out
        }
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run_to(&RunConfig::from_args(args)?, out),
        Command::List { format } => emit(&render_catalog(format)?, None, out),
        Command::Network {
            file,
            statistics,
            format,
            output,
        } => {
            let text = fs::read_to_string(&file)?;
            let net = Network::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", file.display())))?;
            let report = scenarios::scenario_network(&net, statistics)?;
            emit(&render(&report, format)?, output.as_ref(), out)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match dispatch(cli, &mut lock) {
        Ok(()) => EXIT_SUCCESS,
        Err(e) => {
            eprintln!("whichway: {e}");
            e.exit_code()
        }
    }
}
