use std::fmt::Write as _;
use std::io::Write as _;

use serde::Serialize;
use serde_json::Value;
use specball_core::green_lab::{DEGREE_RESIDUAL_LIMIT, DISC_CHECK_POINTS};
use specball_core::splitting::Quadrature;
use specball_core::ROOT_TOL;

use crate::config::{Format, RunConfig};

/// Fixed tolerances of the library, echoed next to the run configuration.
#[derive(Debug, Serialize)]
pub struct ModuleTolerances {
    pub root_convergence: f64,
    pub quadrature: Quadrature,
    pub disc_check_points: usize,
    pub degree_residual_limit: f64,
}

impl ModuleTolerances {
    pub fn current() -> Self {
        ModuleTolerances {
            root_convergence: ROOT_TOL,
            quadrature: Quadrature::default(),
            disc_check_points: DISC_CHECK_POINTS,
            degree_residual_limit: DEGREE_RESIDUAL_LIMIT,
        }
    }
}

/// Tabular view of a result. Cells must not contain commas.
#[derive(Debug, Default)]
pub struct Table {
    pub header: String,
    pub rows: Vec<String>,
}

impl Table {
    pub fn new(header: impl Into<String>) -> Self {
        Table {
            header: header.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    /// Wraps an already rendered CSV body whose first line is the header.
    pub fn from_csv(body: &str) -> Self {
        let mut lines = body.lines().map(str::to_string);
        let header = lines.next().unwrap_or_default();
        Table {
            header,
            rows: lines.collect(),
        }
    }
}

/// What a subcommand hands back for rendering.
pub struct Outcome {
    pub input: Value,
    pub result: Value,
    pub table: Table,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'static str,
    config: &'a RunConfig,
    module_tolerances: ModuleTolerances,
    input: &'a Value,
    result: &'a Value,
}

pub fn render(command: &str, config: &RunConfig, outcome: &Outcome) -> anyhow::Result<String> {
    let envelope = Envelope {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        module_tolerances: ModuleTolerances::current(),
        input: &outcome.input,
        result: &outcome.result,
    };
    Ok(match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            // provenance goes into comment lines so the table stays plain CSV
            let mut s = String::new();
            writeln!(s, "# specball {} {}", command, envelope.version)?;
            writeln!(s, "# config: {}", serde_json::to_string(config)?)?;
            writeln!(s, "# module_tolerances: {}", serde_json::to_string(&envelope.module_tolerances)?)?;
            writeln!(s, "# input: {}", serde_json::to_string(&outcome.input)?)?;
            writeln!(s, "{}", outcome.table.header)?;
            for row in &outcome.table.rows {
                writeln!(s, "{row}")?;
            }
            s
        }
    })
}

pub fn emit(text: &str, config: &RunConfig) -> anyhow::Result<()> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write report to {}: {e}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Shortest round-trip rendering, identical across runs.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
