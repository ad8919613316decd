//! `gfgm`: risk bounds for sums of risks with generalized FGM dependence.
//!
//! Exit codes: 0 success, 2 tolerance failure, 3 usage or input error,
//! 1 anything else.

mod args;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use gfgm_core::allocation::Allocation;
use gfgm_core::bernoulli::{exchangeable_lift, BernoulliPmf, MarginVector};
use gfgm_core::bounds::{bounds_common_p, bounds_general_p, convex_bounds_fast, BoundsOptions};
use gfgm_core::copula::{sample_u, sample_x, Driver};
use gfgm_core::sum_polytope::{extremal_csv, extremal_points};
use gfgm_core::tables::{self, TableOptions, TableResult};
use gfgm_core::validate::validate_mc;
use gfgm_core::vertex::{enumerate_vertices, PolytopeSpec};
use gfgm_core::Rational;

use args::{Cli, Command, Format, PortfolioArgs};
use output::Output;

/// Outcome of a command that ran to completion.
enum Status {
    Pass,
    ToleranceFailure,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::ToleranceFailure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use gfgm_core::Error as E;
    if e.downcast_ref::<args::UsageError>().is_some() {
        return 3;
    }
    match e.downcast_ref::<E>() {
        Some(E::Internal(_)) => 1,
        Some(_) => 3,
        None => 1,
    }
}

fn run(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Extremal { d, p, out } => extremal(d, &p, &out),
        Command::Bounds {
            portfolio,
            measures,
            alpha,
            gamma,
            grid,
            n,
            seed,
            fast,
            out,
        } => {
            let pf = portfolio.load()?;
            let measures = args::measures(measures.as_deref(), &pf.measures, alpha, gamma)?;
            let opts = BoundsOptions {
                grid_h: grid,
                mc_samples: n.unwrap_or(1_000_000),
                seed,
                ..Default::default()
            };
            if pf.driver.is_some() {
                eprintln!(
                    "note: bounds range over all extremal drivers; the given driver is ignored"
                );
            }
            let report = if pf.is_homogeneous() {
                let p = pf.p.get(0);
                if fast {
                    convex_bounds_fast(&pf.margins[0], pf.dim(), p, &measures, &opts)?
                } else {
                    bounds_common_p(&pf.margins[0], pf.dim(), p, &measures, &opts)?
                }
            } else {
                if fast {
                    return Err(args::usage(
                        "--fast needs one common margin and one common p",
                    ));
                }
                bounds_general_p(&pf.margins, &pf.p, &measures, None, &opts)?
            };
            out.write(|f| match f {
                Format::Json => Ok(serde_json::to_string_pretty(&report)?),
                Format::Csv => Ok(report.to_csv()),
            })?;
            Ok(Status::Pass)
        }
        Command::Allocate {
            portfolio,
            alpha,
            out,
        } => {
            let pf = portfolio.load()?;
            let margins = pf
                .discrete_margins()
                .ok_or_else(|| args::usage("allocation needs discrete margins"))?;
            let f = dense_driver(pf.driver.as_ref(), &pf.p)?;
            let report = Allocation::new(&margins, &pf.p, &f)?.report(alpha)?;
            out.write_default(Format::Csv, |f| match f {
                Format::Json => Ok(serde_json::to_string_pretty(&report)?),
                Format::Csv => Ok(report.to_csv()),
            })?;
            Ok(Status::Pass)
        }
        Command::Reproduce { table, grid, out } => {
            let ids: Vec<&str> = if table == "all" {
                tables::TABLE_IDS.to_vec()
            } else {
                vec![table.as_str()]
            };
            let opts = TableOptions { grid_h: grid };
            let results: Vec<TableResult> = ids
                .iter()
                .map(|id| tables::reproduce(id, &opts))
                .collect::<gfgm_core::Result<_>>()?;
            for r in &results {
                eprint!("{}", r.diff_report());
            }
            out.write_default(Format::Csv, |f| match f {
                Format::Json => Ok(serde_json::to_string_pretty(&results)?),
                Format::Csv => Ok(results
                    .iter()
                    .map(TableResult::to_csv)
                    .collect::<Vec<_>>()
                    .join("\n")),
            })?;
            Ok(if results.iter().all(TableResult::pass) {
                Status::Pass
            } else {
                Status::ToleranceFailure
            })
        }
        Command::ValidateMc {
            portfolio,
            n,
            seed,
            alpha,
            grid,
            out,
        } => {
            let pf = portfolio.load()?;
            let report = validate_mc(&pf, n, seed, alpha, grid)?;
            for c in &report.checks {
                eprintln!(
                    "{:<14} analytic {:>14.6} empirical {:>14.6} z {:>7.3} {}",
                    c.name,
                    c.analytic,
                    c.empirical,
                    c.z,
                    if c.pass { "ok" } else { "FAIL" }
                );
            }
            eprintln!(
                "KS distance {:.5} (threshold {:.5})",
                report.ks_distance, report.ks_threshold
            );
            out.write(|f| match f {
                Format::Json => Ok(serde_json::to_string_pretty(&report)?),
                Format::Csv => Ok(output::validation_csv(&report)),
            })?;
            Ok(if report.pass {
                Status::Pass
            } else {
                Status::ToleranceFailure
            })
        }
        Command::Sample {
            portfolio,
            n,
            seed,
            uniform,
            out,
        } => {
            let pf = portfolio.load()?;
            let spec = pf.spec()?;
            let sample = if uniform {
                sample_u(&spec, n, seed)?
            } else {
                sample_x(&spec, &pf.margins, n, seed)?
            };
            out.write_default(Format::Csv, |f| match f {
                Format::Csv => Ok(sample.to_csv()),
                Format::Json => Err(args::usage("samples are written as CSV only")),
            })?;
            Ok(Status::Pass)
        }
    }
}

fn extremal(d: Option<usize>, p: &str, out: &Output) -> Result<Status> {
    let p: Vec<Rational> = gfgm_core::scalar::parse_rational_list(p)?;
    if p.len() == 1 {
        let d = d.ok_or_else(|| args::usage("a single p needs --d"))?;
        let points = extremal_points(d, &p[0])?;
        out.write_default(Format::Json, |f| match f {
            Format::Json => {
                let pmfs: Vec<_> = points.iter().map(|e| e.pmf(d)).collect();
                Ok(serde_json::to_string_pretty(&pmfs)?)
            }
            Format::Csv => Ok(extremal_csv(&points)),
        })?;
        eprintln!("{} extremal points", points.len());
    } else {
        if d.is_some_and(|d| d != p.len()) {
            return Err(args::usage("--d disagrees with the length of --p"));
        }
        let spec = PolytopeSpec::new(MarginVector::new(p)?);
        let verts = enumerate_vertices(&spec)?;
        out.write_default(Format::Json, |f| match f {
            Format::Json => Ok(serde_json::to_string_pretty(&verts)?),
            Format::Csv => Ok(output::vertices_csv(&verts)),
        })?;
        eprintln!("{} vertices", verts.len());
    }
    Ok(Status::Pass)
}

fn dense_driver(
    driver: Option<&Driver<Rational>>,
    p: &MarginVector<Rational>,
) -> Result<BernoulliPmf<Rational>> {
    Ok(match driver {
        None => BernoulliPmf::independence(p)?,
        Some(Driver::Dense(f)) => f.clone(),
        Some(Driver::Atoms(a)) => a.to_dense()?,
        Some(Driver::Exchangeable(g)) => exchangeable_lift(g)?,
    })
}

impl PortfolioArgs {
    fn load(&self) -> Result<gfgm_core::io::Portfolio<Rational>> {
        args::portfolio(self).context("reading the portfolio")
    }
}
