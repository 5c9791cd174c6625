//! Report rendering. Every report starts with its schema version and the
//! exact command line that regenerates it byte for byte.

use serde::Serialize;

use tmlab::density::{DensityEstimate, ExactDensity};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExactRow {
    pub event: String,
    pub model: String,
    pub a: u32,
    pub n: u32,
    pub count: u64,
    pub hits: u64,
    pub numerator: String,
    pub denominator: String,
    pub density: f64,
}

impl From<&ExactDensity> for ExactRow {
    fn from(d: &ExactDensity) -> Self {
        Self {
            event: d.event.to_string(),
            model: "one-way".into(),
            a: d.a,
            n: d.n,
            count: d.count,
            hits: d.hits,
            numerator: d.density.numer().to_string(),
            denominator: d.density.denom().to_string(),
            density: d.value(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WalkRow {
    pub k: u64,
    pub exact_cdf: Option<f64>,
    pub mc_estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Serialize)]
struct JsonReport<'a, R: Serialize> {
    schema_version: u32,
    report: &'a str,
    replay: &'a str,
    rows: &'a [R],
}

/// Renders `rows` under a header naming the report kind and its replay
/// command.
pub fn render<R: Serialize>(kind: &str, replay: &str, format: Format, rows: &[R]) -> Result<String, String> {
    match format {
        Format::Csv => {
            let mut out = format!("# tmlab {kind} report, schema_version={SCHEMA_VERSION}\n# replay: {replay}\n");
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in rows {
                writer.serialize(row).map_err(|e| e.to_string())?;
            }
            let body = writer.into_inner().map_err(|e| e.to_string())?;
            out.push_str(&String::from_utf8(body).map_err(|e| e.to_string())?);
            Ok(out)
        }
        Format::Json => {
            let report = JsonReport {
                schema_version: SCHEMA_VERSION,
                report: kind,
                replay,
                rows,
            };
            let mut out = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            out.push('\n');
            Ok(out)
        }
    }
}

pub fn density_report(replay: &str, format: Format, rows: &[DensityEstimate]) -> Result<String, String> {
    render("density", replay, format, rows)
}
