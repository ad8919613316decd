//! Monte Carlo checks of the analytic sum distributions against the sampler.

use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_discrete_general, AggregateDistribution, Empirical};
use crate::bernoulli::exchangeable_lift;
use crate::bounds::CommonAggregator;
use crate::copula::{pearson_x, sample_x, Driver};
use crate::error::{Error, Result};
use crate::io::Portfolio;
use crate::risk::RiskDistribution;
use crate::scalar::ExactScalar;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;
/// 99% Kolmogorov quantile, to be divided by `√n`.
pub const KS99: f64 = 1.627_6;
const BATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub name: String,
    pub analytic: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z: f64,
    pub pass: bool,
}

impl McCheck {
    fn new(name: impl Into<String>, analytic: f64, empirical: f64, std_error: f64) -> Self {
        let diff = empirical - analytic;
        let z = if std_error > 0.0 {
            diff / std_error
        } else if diff.abs() <= 1e-9 * analytic.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            name: name.into(),
            analytic,
            empirical,
            std_error,
            z,
            pass: z.abs() <= Z99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub seed: u64,
    pub checks: Vec<McCheck>,
    pub ks_distance: f64,
    pub ks_threshold: f64,
    pub pass: bool,
}

/// Exact law of `S` where one is available.
pub fn analytic_distribution<T: ExactScalar>(
    pf: &Portfolio<T>,
    grid_h: Option<f64>,
) -> Result<AggregateDistribution> {
    let d = pf.dim();
    let spec = pf.spec()?;
    if pf.is_homogeneous() {
        let agg = CommonAggregator::new(&pf.margins[0], d, pf.p.get(0).to_f64(), grid_h)?;
        return agg.aggregate(&spec.driver().sum_pmf().to_f64());
    }
    let margins = pf.discrete_margins().ok_or_else(|| {
        Error::Unsupported("no exact law for heterogeneous continuous margins".into())
    })?;
    let mask = |x: &[bool]| {
        x.iter()
            .enumerate()
            .fold(0usize, |m, (j, &b)| m | (b as usize) << j)
    };
    let atoms: Vec<(usize, f64)> = match spec.driver() {
        Driver::Dense(f) => f.support().map(|(i, w)| (i, w.to_f64())).collect(),
        Driver::Atoms(a) => a
            .atoms()
            .iter()
            .map(|(x, w)| (mask(x), w.to_f64()))
            .collect(),
        Driver::Exchangeable(g) => exchangeable_lift(g)?
            .support()
            .map(|(i, w)| (i, w.to_f64()))
            .collect(),
    };
    let p: Vec<f64> = pf.p.as_slice().iter().map(|x| x.to_f64()).collect();
    Ok(AggregateDistribution::Lattice(aggregate_discrete_general(
        &margins, &p, &atoms,
    )?))
}

fn batch_se(xs: &[f64], stat: impl Fn(&Empirical) -> f64) -> Result<f64> {
    let size = xs.len() / BATCHES;
    let vals: Vec<f64> = xs
        .chunks(size.max(1))
        .take(BATCHES)
        .map(|c| Empirical::new(c.to_vec()).map(|e| stat(&e)))
        .collect::<Result<_>>()?;
    let k = vals.len() as f64;
    let m = vals.iter().sum::<f64>() / k;
    Ok((vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt())
}

/// `sup_x |F_n(x) - F(x)|`, checking both sides of every sample point.
pub fn ks_distance(sample: &Empirical, dist: &impl RiskDistribution) -> f64 {
    let xs = &sample.sorted;
    let n = xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j < xs.len() && xs[j] == xs[i] {
            j += 1;
        }
        worst = worst
            .max((j as f64 / n - dist.cdf(xs[i])).abs())
            .max((i as f64 / n - dist.cdf_left(xs[i])).abs());
        i = j;
    }
    worst
}

/// Sample `n` sums and compare mean, variance, `VaR_α`, `ES_α`, the first
/// pair correlation and the whole cdf with the analytic law.
pub fn validate_mc<T: ExactScalar>(
    pf: &Portfolio<T>,
    n: usize,
    seed: u64,
    alpha: f64,
    grid_h: Option<f64>,
) -> Result<ValidationReport> {
    if n < 1000 {
        return Err(Error::InvalidArgument("need at least 1000 samples".into()));
    }
    let dist = analytic_distribution(pf, grid_h)?;
    let spec = pf.spec()?;
    let sample = sample_x(&spec, &pf.margins, n, seed)?;
    let sums = sample.row_sums();
    let emp = Empirical::new(sums.clone())?;
    let nf = n as f64;
    let mut checks = Vec::new();

    let sd = emp.std();
    checks.push(McCheck::new(
        "mean",
        dist.mean(),
        emp.mean(),
        sd / nf.sqrt(),
    ));
    let var_of = |e: &Empirical| e.std().powi(2);
    checks.push(McCheck::new(
        "variance",
        dist.std().powi(2),
        var_of(&emp),
        batch_se(&sums, var_of)?,
    ));
    checks.push(McCheck::new(
        format!("var:{alpha}"),
        dist.var(alpha),
        emp.var(alpha),
        batch_se(&sums, |e| e.var(alpha))?,
    ));
    checks.push(McCheck::new(
        format!("es:{alpha}"),
        dist.es(alpha),
        emp.es(alpha),
        batch_se(&sums, |e| e.es(alpha))?,
    ));
    if pf.dim() >= 2 {
        let rho = pearson_x(&spec, &pf.margins, 0, 1)?;
        let (a, b) = (sample.column(0), sample.column(1));
        let r = sample_correlation(&a, &b);
        checks.push(McCheck::new(
            "pearson(0,1)",
            rho,
            r,
            (1.0 - rho * rho) / (nf - 3.0).sqrt(),
        ));
    }
    let ks = ks_distance(&emp, &dist);
    let threshold = KS99 / nf.sqrt();
    let pass = checks.iter().all(|c| c.pass) && ks <= threshold;
    Ok(ValidationReport {
        n,
        seed,
        checks,
        ks_distance: ks,
        ks_threshold: threshold,
        pass,
    })
}

fn sample_correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
