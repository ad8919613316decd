//! Sharp bounds on risk measures of `S` over a GFGM class.
//!
//! Every measure here is evaluated at each extremal point of the driver class
//! and the extremes are read off. For a common `p` the extremal points are
//! the two-point pmfs of the number of ones; otherwise they are the vertices
//! of the Bernoulli polytope.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{
    aggregate_discrete_general, default_uniform_step, discrete_common_sums, uniform_common_sums,
    AggregateDistribution, ConditionalSums, Empirical,
};
use crate::bernoulli::{BernoulliPmf, MarginVector};
use crate::copula::{sample_x, Driver, GfgmSpec};
use crate::error::{Error, Result};
use crate::margins::Margin;
use crate::mixed_erlang::aggregate_exponential;
use crate::risk::MeasureRequest;
use crate::scalar::ExactScalar;
use crate::sum_polytope::{extremal_points, max_convex, min_convex, SumPmf};
use crate::vertex::{enumerate_vertices, PolytopeSpec};

pub const REPORT_SCHEMA: u32 = 1;

/// Batches used for Monte Carlo standard errors.
const MC_BATCHES: usize = 10;

#[derive(Debug, Clone)]
pub struct BoundsOptions {
    /// Grid step for uniform margins; defaults to `d / 2^15`.
    pub grid_h: Option<f64>,
    /// Sample size for continuous heterogeneous margins.
    pub mc_samples: usize,
    pub seed: u64,
    /// Check that convex measures are extreme at the convex-order extremes.
    pub check_convex: bool,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            grid_h: None,
            mc_samples: 1_000_000,
            seed: 0,
            check_convex: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub id: String,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
    /// Driver pmf as rational strings (vertex path only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pmf: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub measure: MeasureRequest,
    pub min: f64,
    pub argmin: usize,
    pub min_id: String,
    pub max: f64,
    pub argmax: usize,
    pub max_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub path: String,
    pub representation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub threads: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub schema_version: u32,
    pub margins: Vec<String>,
    pub d: usize,
    pub p: Vec<String>,
    pub measures: Vec<MeasureRequest>,
    pub n_extremal: usize,
    pub points: Vec<PointResult>,
    pub extrema: Vec<Extremum>,
    pub meta: RunMeta,
}

impl RiskReport {
    pub fn extremum(&self, m: &MeasureRequest) -> Option<&Extremum> {
        self.extrema.iter().find(|e| e.measure == *m)
    }

    /// One row per extremal point: `id,<measure>,…`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("id");
        for m in &self.measures {
            s += &format!(",{m}");
        }
        s.push('\n');
        for pt in &self.points {
            s += &format!("\"{}\"", pt.id);
            for v in &pt.values {
                s += &format!(",{}", fmt_sig(*v));
            }
            s.push('\n');
        }
        s
    }
}

/// Float with 10 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let digits = (9 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.digits$}")
}

/// Aggregates `d` copies of one margin for any sum pmf of the driver.
pub enum CommonAggregator {
    Exponential {
        rate: f64,
        p: f64,
    },
    Lattice {
        sums: ConditionalSums<f64>,
        grid: bool,
    },
}

impl CommonAggregator {
    pub fn new(margin: &Margin, d: usize, p: f64, grid_h: Option<f64>) -> Result<Self> {
        Ok(match margin {
            Margin::Exponential { rate } => Self::Exponential { rate: *rate, p },
            Margin::Discrete(m) => Self::Lattice {
                sums: discrete_common_sums(m, d, p)?,
                grid: false,
            },
            Margin::Uniform => {
                let h = grid_h.unwrap_or_else(|| default_uniform_step(d));
                Self::Lattice {
                    sums: uniform_common_sums(d, p, h)?,
                    grid: true,
                }
            }
        })
    }

    pub fn representation(&self) -> &'static str {
        match self {
            Self::Exponential { .. } => "mixed_erlang",
            Self::Lattice { grid: false, .. } => "lattice",
            Self::Lattice { grid: true, .. } => "grid",
        }
    }

    pub fn grid_h(&self) -> Option<f64> {
        match self {
            Self::Lattice { sums, grid: true } => Some(sums.span),
            _ => None,
        }
    }

    pub fn aggregate(&self, g: &[f64]) -> Result<AggregateDistribution> {
        Ok(match self {
            Self::Exponential { rate, p } => {
                AggregateDistribution::MixedErlang(aggregate_exponential(*rate, *p, g)?)
            }
            Self::Lattice { sums, grid: false } => AggregateDistribution::Lattice(sums.mix(g)?),
            Self::Lattice { sums, grid: true } => AggregateDistribution::Grid(sums.mix(g)?),
        })
    }
}

fn evaluate(dist: &AggregateDistribution, measures: &[MeasureRequest]) -> Result<Vec<f64>> {
    measures.iter().map(|m| m.evaluate(dist)).collect()
}

/// Extremes per measure, ties to the smallest index.
fn extrema(points: &[PointResult], measures: &[MeasureRequest]) -> Vec<Extremum> {
    measures
        .iter()
        .enumerate()
        .map(|(m, &measure)| {
            let (mut lo, mut hi) = (0, 0);
            for (i, pt) in points.iter().enumerate() {
                if pt.values[m] < points[lo].values[m] {
                    lo = i;
                }
                if pt.values[m] > points[hi].values[m] {
                    hi = i;
                }
            }
            Extremum {
                measure,
                min: points[lo].values[m],
                argmin: lo,
                min_id: points[lo].id.clone(),
                max: points[hi].values[m],
                argmax: hi,
                max_id: points[hi].id.clone(),
            }
        })
        .collect()
}

fn threads() -> usize {
    rayon::current_num_threads()
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Bounds over `G_d^p(F)` by full enumeration of the extremal sum pmfs.
///
/// For convex measures the extremes must sit at the convex-order minimum and
/// maximum of the sum class; a violation is reported as an internal error.
pub fn bounds_common_p<T: ExactScalar>(
    margin: &Margin,
    d: usize,
    p: &T,
    measures: &[MeasureRequest],
    opts: &BoundsOptions,
) -> Result<RiskReport> {
    let start = Instant::now();
    if d < 2 {
        return Err(Error::InvalidArgument("need at least two risks".into()));
    }
    let pts = extremal_points(d, p)?;
    let pf = p.to_f64();
    let agg = CommonAggregator::new(margin, d, pf, opts.grid_h)?;
    let pmfs: Vec<SumPmf<T>> = pts.iter().map(|e| e.pmf(d)).collect();
    let points: Vec<PointResult> = pts
        .par_iter()
        .zip(&pmfs)
        .map(|(e, g)| -> Result<PointResult> {
            let dist = agg.aggregate(&g.to_f64())?;
            Ok(PointResult {
                id: e.label(),
                values: evaluate(&dist, measures)?,
                std_errors: None,
                pmf: Vec::new(),
            })
        })
        .collect::<Result<_>>()?;
    let ext = extrema(&points, measures);
    if opts.check_convex {
        let lo = min_convex(d, p)?;
        let hi = max_convex(d, p)?;
        let i_lo = pmfs
            .iter()
            .position(|g| *g == lo)
            .ok_or_else(|| Error::Internal("min-convex pmf is not extremal".into()))?;
        let i_hi = pmfs
            .iter()
            .position(|g| *g == hi)
            .ok_or_else(|| Error::Internal("max-convex pmf is not extremal".into()))?;
        for (m, e) in ext
            .iter()
            .enumerate()
            .filter(|(_, e)| e.measure.is_convex())
        {
            let tol = |v: f64| 1e-7 * v.abs().max(1.0);
            let (at_lo, at_hi) = (points[i_lo].values[m], points[i_hi].values[m]);
            if at_lo > e.min + tol(e.min) || at_hi < e.max - tol(e.max) {
                return Err(Error::Internal(format!(
                    "{}: extremes {} at {} and {} at {} are not at the convex-order extremes ({at_lo}, {at_hi})",
                    e.measure, e.min, e.min_id, e.max, e.max_id
                )));
            }
        }
    }
    Ok(RiskReport {
        schema_version: REPORT_SCHEMA,
        margins: vec![margin.label()],
        d,
        p: vec![p.to_canonical()],
        measures: measures.to_vec(),
        n_extremal: pts.len(),
        points,
        extrema: ext,
        meta: RunMeta {
            path: "common-p".into(),
            representation: agg.representation().into(),
            grid_h: agg.grid_h(),
            mc_samples: None,
            seed: None,
            threads: threads(),
            elapsed_ms: elapsed_ms(start),
        },
    })
}

/// `(min, max, argmin, argmax)` of `VaR_α` over all extremal points.
pub fn var_bounds_common_p<T: ExactScalar>(
    margin: &Margin,
    d: usize,
    p: &T,
    alpha: f64,
    opts: &BoundsOptions,
) -> Result<(f64, f64, String, String)> {
    let r = bounds_common_p(margin, d, p, &[MeasureRequest::Var(alpha)], opts)?;
    let e = &r.extrema[0];
    Ok((e.min, e.max, e.min_id.clone(), e.max_id.clone()))
}

/// Convex measures at the convex-order extremes of the sum class only.
pub fn convex_bounds_fast<T: ExactScalar>(
    margin: &Margin,
    d: usize,
    p: &T,
    measures: &[MeasureRequest],
    opts: &BoundsOptions,
) -> Result<RiskReport> {
    let start = Instant::now();
    if let Some(m) = measures.iter().find(|m| !m.is_convex()) {
        return Err(Error::Unsupported(format!(
            "{m} is not convex; use the full enumeration"
        )));
    }
    let agg = CommonAggregator::new(margin, d, p.to_f64(), opts.grid_h)?;
    let drivers = [
        ("min-convex", min_convex(d, p)?),
        ("max-convex", max_convex(d, p)?),
    ];
    let points: Vec<PointResult> = drivers
        .par_iter()
        .map(|(id, g)| -> Result<PointResult> {
            let dist = agg.aggregate(&g.to_f64())?;
            Ok(PointResult {
                id: (*id).into(),
                values: evaluate(&dist, measures)?,
                std_errors: None,
                pmf: Vec::new(),
            })
        })
        .collect::<Result<_>>()?;
    // the convex order fixes the attaining points
    let ext = measures
        .iter()
        .enumerate()
        .map(|(m, &measure)| Extremum {
            measure,
            min: points[0].values[m],
            argmin: 0,
            min_id: points[0].id.clone(),
            max: points[1].values[m],
            argmax: 1,
            max_id: points[1].id.clone(),
        })
        .collect();
    Ok(RiskReport {
        schema_version: REPORT_SCHEMA,
        margins: vec![margin.label()],
        d,
        p: vec![p.to_canonical()],
        measures: measures.to_vec(),
        n_extremal: crate::sum_polytope::count_extremal(d, p)?,
        points,
        extrema: ext,
        meta: RunMeta {
            path: "common-p-fast".into(),
            representation: agg.representation().into(),
            grid_h: agg.grid_h(),
            mc_samples: None,
            seed: None,
            threads: threads(),
            elapsed_ms: elapsed_ms(start),
        },
    })
}

/// Bounds over `G_d^p(F_1, …, F_d)` for heterogeneous `p` (or margins), by
/// enumerating the vertices of `B_d(p)` unless `drivers` lists the points.
///
/// Discrete margins are aggregated exactly. Any continuous margin switches to
/// seeded Monte Carlo, with batch-means standard errors.
pub fn bounds_general_p<T: ExactScalar>(
    margins: &[Margin],
    p: &MarginVector<T>,
    measures: &[MeasureRequest],
    drivers: Option<Vec<(String, BernoulliPmf<T>)>>,
    opts: &BoundsOptions,
) -> Result<RiskReport> {
    let start = Instant::now();
    let d = p.dim();
    if margins.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: margins.len(),
        });
    }
    let drivers = match drivers {
        Some(list) => list,
        None => {
            let spec = PolytopeSpec::new(p.clone());
            if d > spec.cap {
                return Err(Error::DimensionCap {
                    d,
                    cap: spec.cap,
                    hint: "use a common p with the sum-class path",
                });
            }
            enumerate_vertices(&spec)?
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("v{}", i + 1), v))
                .collect()
        }
    };
    let discrete: Option<Vec<_>> = margins
        .iter()
        .map(|m| match m {
            Margin::Discrete(dm) => Some(dm.clone()),
            _ => None,
        })
        .collect();
    let pf: Vec<f64> = p.as_slice().iter().map(|x| x.to_f64()).collect();
    let points: Vec<PointResult> = drivers
        .par_iter()
        .map(|(id, f)| -> Result<PointResult> {
            let pmf = f.values().iter().map(|v| v.to_canonical()).collect();
            match &discrete {
                Some(dm) => {
                    let atoms: Vec<(usize, f64)> =
                        f.support().map(|(i, w)| (i, w.to_f64())).collect();
                    let dist = AggregateDistribution::Lattice(aggregate_discrete_general(
                        dm, &pf, &atoms,
                    )?);
                    Ok(PointResult {
                        id: id.clone(),
                        values: evaluate(&dist, measures)?,
                        std_errors: None,
                        pmf,
                    })
                }
                None => {
                    let spec = GfgmSpec::new(p.clone(), Driver::Dense(f.clone()))?;
                    let sums = sample_x(&spec, margins, opts.mc_samples, opts.seed)?.row_sums();
                    let batch = sums.len() / MC_BATCHES;
                    let per_batch: Vec<Vec<f64>> = sums
                        .chunks(batch.max(1))
                        .take(MC_BATCHES)
                        .map(|c| {
                            evaluate(
                                &AggregateDistribution::Empirical(Empirical::new(c.to_vec())?),
                                measures,
                            )
                        })
                        .collect::<Result<_>>()?;
                    let se = (0..measures.len())
                        .map(|m| {
                            let xs: Vec<f64> = per_batch.iter().map(|b| b[m]).collect();
                            let k = xs.len() as f64;
                            let mean = xs.iter().sum::<f64>() / k;
                            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) / k)
                                .sqrt()
                        })
                        .collect();
                    let dist = AggregateDistribution::Empirical(Empirical::new(sums)?);
                    Ok(PointResult {
                        id: id.clone(),
                        values: evaluate(&dist, measures)?,
                        std_errors: Some(se),
                        pmf,
                    })
                }
            }
        })
        .collect::<Result<_>>()?;
    let exact = discrete.is_some();
    Ok(RiskReport {
        schema_version: REPORT_SCHEMA,
        margins: margins.iter().map(Margin::label).collect(),
        d,
        p: p.as_slice().iter().map(|x| x.to_canonical()).collect(),
        measures: measures.to_vec(),
        n_extremal: drivers.len(),
        extrema: extrema(&points, measures),
        points,
        meta: RunMeta {
            path: "general-p".into(),
            representation: if exact { "lattice" } else { "empirical" }.into(),
            grid_h: None,
            mc_samples: (!exact).then_some(opts.mc_samples),
            seed: (!exact).then_some(opts.seed),
            threads: threads(),
            elapsed_ms: elapsed_ms(start),
        },
    })
}
