use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gfgm_core::io::{DriverSpec, MarginSpec, PSpec, Portfolio, PortfolioFile};
use gfgm_core::risk::MeasureRequest;
use gfgm_core::Rational;

use crate::output::Output;

#[derive(Debug, Parser)]
#[command(
    name = "gfgm",
    version,
    about = "Sharp risk bounds for sums of risks under GFGM dependence"
)]
pub struct Cli {
    /// Worker thread cap.
    #[arg(long, global = true, env = "GFGM_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriverKind {
    Independence,
    MinConvex,
    MaxConvex,
}

/// Portfolio given as a file or through flags.
#[derive(Debug, Args)]
pub struct PortfolioArgs {
    /// Portfolio JSON file; excludes the other portfolio flags.
    #[arg(long, conflicts_with_all = ["margin", "d", "p", "driver"])]
    pub portfolio: Option<PathBuf>,
    /// `exp:RATE`, `uniform`, `discrete:FILE` or `point:K`; once, or once per risk.
    #[arg(long)]
    pub margin: Vec<String>,
    #[arg(long)]
    pub d: Option<usize>,
    /// One rational, or a comma list with one per risk.
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_enum)]
    pub driver: Option<DriverKind>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal sum pmfs for a common p, or vertices for a p vector.
    #[command(visible_alias = "vertices")]
    Extremal {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        out: Output,
    },
    /// Minimum and maximum of risk measures over the extremal drivers.
    Bounds {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        /// Comma list such as `var:0.95,es:0.95,entropic:0.001,std`.
        #[arg(long)]
        measures: Option<String>,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long)]
        gamma: Option<f64>,
        /// Grid step for uniform margins.
        #[arg(long)]
        grid: Option<f64>,
        /// Monte Carlo sample size for heterogeneous continuous margins.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only evaluate the two convex-order extremes (convex measures).
        #[arg(long)]
        fast: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Risk allocation for a discrete portfolio.
    Allocate {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Recompute a published table and diff it against the printed values.
    Reproduce {
        /// Table id, or `all`.
        #[arg(value_parser = table_id)]
        table: String,
        #[arg(long)]
        grid: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the analytic law of the sum with a simulated sample.
    ValidateMc {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        #[arg(long)]
        grid: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Draw a sample of X, or of U with `--uniform`, as CSV.
    Sample {
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        uniform: bool,
        #[command(flatten)]
        out: Output,
    },
}

fn table_id(s: &str) -> std::result::Result<String, String> {
    if s == "all" || gfgm_core::tables::TABLE_IDS.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!(
            "unknown table; expected one of all, {}",
            gfgm_core::tables::TABLE_IDS.join(", ")
        ))
    }
}

/// Bad flags or inputs detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Measures from `--measures`, else the file's, else `var:α`, `es:α` and `entropic:γ` when given.
pub fn measures(
    flag: Option<&str>,
    file: &[MeasureRequest],
    alpha: f64,
    gamma: Option<f64>,
) -> Result<Vec<MeasureRequest>> {
    if let Some(s) = flag {
        return Ok(MeasureRequest::parse_list(s)?);
    }
    if !file.is_empty() {
        return Ok(file.to_vec());
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage("--alpha must lie in (0, 1)"));
    }
    let mut m = vec![MeasureRequest::Var(alpha), MeasureRequest::Es(alpha)];
    if let Some(g) = gamma {
        if !(g > 0.0 && g.is_finite()) {
            return Err(usage("--gamma must be positive"));
        }
        m.push(MeasureRequest::Entropic(g));
    }
    Ok(m)
}

pub fn portfolio(a: &PortfolioArgs) -> Result<Portfolio<Rational>> {
    let file = match &a.portfolio {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            PortfolioFile::from_json(&text)?
        }
        None => {
            if a.margin.is_empty() {
                return Err(usage("give --portfolio, or --margin with --p"));
            }
            let p =
                a.p.as_deref()
                    .ok_or_else(|| usage("--p is required without --portfolio"))?;
            let parts: Vec<String> = p.split(',').map(|s| s.trim().to_string()).collect();
            PortfolioFile {
                schema_version: gfgm_core::io::PORTFOLIO_SCHEMA,
                margins: a
                    .margin
                    .iter()
                    .map(|m| margin_spec(m))
                    .collect::<Result<_>>()?,
                d: a.d,
                p: if parts.len() == 1 {
                    PSpec::Common(parts[0].clone())
                } else {
                    PSpec::PerRisk(parts)
                },
                driver: a.driver.map(|k| match k {
                    DriverKind::Independence => DriverSpec::Independence,
                    DriverKind::MinConvex => DriverSpec::MinConvex,
                    DriverKind::MaxConvex => DriverSpec::MaxConvex,
                }),
                measures: Vec::new(),
            }
        }
    };
    Ok(file.resolve()?)
}

fn margin_spec(s: &str) -> Result<MarginSpec> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix("discrete:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(MarginSpec::Discrete {
            pmf: read_pmf(&text)?,
        });
    }
    if let Some(k) = s.strip_prefix("point:") {
        let k: usize = k.parse().map_err(|_| usage(format!("bad margin {s:?}")))?;
        let mut pmf = vec![0.0; k + 1];
        pmf[k] = 1.0;
        return Ok(MarginSpec::Discrete { pmf });
    }
    match gfgm_core::margins::Margin::parse(s)? {
        gfgm_core::margins::Margin::Exponential { rate } => Ok(MarginSpec::Exponential { rate }),
        gfgm_core::margins::Margin::Uniform => Ok(MarginSpec::Uniform),
        gfgm_core::margins::Margin::Discrete(_) => unreachable!("point margins handled above"),
    }
}

/// A JSON array of probabilities, or text with one probability per line
/// (last comma field; a non-numeric header line is skipped).
pub fn read_pmf(text: &str) -> Result<Vec<f64>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| usage(format!("margin pmf: {e}")));
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => continue,
            Err(_) => return Err(usage(format!("margin pmf line {}: {line:?}", i + 1))),
        }
    }
    Ok(out)
}
