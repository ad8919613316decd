//! Distribution of `S = X_1 + … + X_d` for discrete, uniform and exponential
//! margins.
//!
//! Given `k` ones in the driver the sum is a convolution of `d - k` copies of
//! `Z0` and `k` copies of `Z1`, so with a common `p` only the `d + 1`
//! conditional sums `T_k` are needed and every driver is a mixture of them.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::copula::ConditionalCdfs;
use crate::error::{Error, Result};
use crate::fft::{clean_pmf, mul_assign, FftGrid};
use crate::margins::{z_pmfs, DiscreteMargin, ZPair};
use crate::mixed_erlang::MixedErlang;
use crate::scalar::Real;

/// Default cap on FFT grid points.
pub const GRID_BUDGET: usize = 1 << 24;

/// Pmf on the lattice `{0, h, 2h, …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticePmf<F: Real> {
    pub span: F,
    pub pmf: Vec<F>,
}

impl<F: Real> LatticePmf<F> {
    pub fn new(span: F, pmf: Vec<F>) -> Self {
        Self { span, pmf }
    }

    pub fn node(&self, k: usize) -> F {
        F::lit(k as f64) * self.span
    }

    pub fn total_mass(&self) -> F {
        self.pmf.iter().copied().sum()
    }

    pub fn mean(&self) -> F {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, &v)| self.node(k) * v)
            .sum()
    }

    /// CSV with columns `k,probability` (`x,probability` when the span is not 1).
    pub fn to_csv(&self) -> String {
        let unit = self.span == F::one();
        let mut s = String::from(if unit {
            "k,probability\n"
        } else {
            "x,probability\n"
        });
        for (k, v) in self.pmf.iter().enumerate() {
            if unit {
                s += &format!("{k},{:e}\n", v.to_f64().unwrap_or(f64::NAN));
            } else {
                s += &format!(
                    "{},{:e}\n",
                    self.node(k).to_f64().unwrap_or(f64::NAN),
                    v.to_f64().unwrap_or(f64::NAN)
                );
            }
        }
        s
    }
}

/// Sorted sample of `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub sorted: Vec<f64>,
}

impl Empirical {
    pub fn new(mut xs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "empirical sample must be finite and nonempty".into(),
            ));
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self { sorted: xs })
    }
}

/// Distribution of a sum in one of its representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum AggregateDistribution {
    Lattice(LatticePmf<f64>),
    MixedErlang(MixedErlang),
    /// Mean-preserving discretization of a continuous law on a grid of span `h`.
    Grid(LatticePmf<f64>),
    Empirical(Empirical),
}

/// Conditional sums `T_k = (d-k) Z0 ⊕ k Z1`, `k = 0..=d`, on a common lattice.
#[derive(Debug, Clone)]
pub struct ConditionalSums<F: Real> {
    pub span: F,
    pub t: Vec<Vec<F>>,
}

impl<F: Real> ConditionalSums<F> {
    pub fn dim(&self) -> usize {
        self.t.len() - 1
    }

    /// `Σ_k g(k) T_k`.
    pub fn mix(&self, g: &[F]) -> Result<LatticePmf<F>> {
        if g.len() != self.t.len() {
            return Err(Error::DimensionMismatch {
                expected: self.t.len(),
                got: g.len(),
            });
        }
        let len = self.t[0].len();
        let mut out = vec![F::zero(); len];
        for (w, tk) in g.iter().zip(&self.t) {
            if *w == F::zero() {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(tk) {
                *o = *o + *w * v;
            }
        }
        Ok(LatticePmf::new(self.span, out))
    }
}

/// Build every `T_k` from the two one-risk pmfs by powers of their spectra.
fn conditional_sums<F: Real>(
    z: &ZPair<F>,
    d: usize,
    span: F,
    budget: usize,
) -> Result<ConditionalSums<F>> {
    let support = d * (z.z0.len().max(z.z1.len()) - 1) + 1;
    let n = support.next_power_of_two();
    if n > budget {
        return Err(Error::GridOverflow { len: n, budget });
    }
    let grid = FftGrid::new(support);
    let s0 = grid.forward(&z.z0);
    let s1 = grid.forward(&z.z1);
    let powers = |s: &[Complex<F>]| {
        let mut out = Vec::with_capacity(d + 1);
        out.push(vec![Complex::new(F::one(), F::zero()); n]);
        for i in 0..d {
            let mut next = out[i].clone();
            mul_assign(&mut next, s);
            out.push(next);
        }
        out
    };
    let (p0, p1) = (powers(&s0), powers(&s1));
    let t = (0..=d)
        .into_par_iter()
        .map(|k| {
            let mut spec = p0[d - k].clone();
            mul_assign(&mut spec, &p1[k]);
            clean_pmf(grid.inverse(spec), support)
        })
        .collect();
    Ok(ConditionalSums { span, t })
}

/// Conditional sums for `d` copies of a discrete margin under a common `p`.
pub fn discrete_common_sums<F: Real>(
    margin: &DiscreteMargin<F>,
    d: usize,
    p: F,
) -> Result<ConditionalSums<F>> {
    let z = z_pmfs(margin, p)?;
    conditional_sums(&z, d, F::one(), GRID_BUDGET)
}

/// Pmf of `S` for `d` discrete risks with common `p`, driver sum pmf `g`.
pub fn aggregate_discrete_common<F: Real>(
    margin: &DiscreteMargin<F>,
    g: &[F],
    p: F,
) -> Result<LatticePmf<F>> {
    let d = g
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidPmf("empty sum pmf".into()))?;
    discrete_common_sums(margin, d, p)?.mix(g)
}

/// Pmf of `S` for heterogeneous discrete margins and a dense driver given as
/// `(ones mask, weight)` atoms. Each component spectrum is cached per `(j, i_j)`.
pub fn aggregate_discrete_general<F: Real>(
    margins: &[DiscreteMargin<F>],
    p: &[F],
    atoms: &[(usize, F)],
) -> Result<LatticePmf<F>> {
    let d = margins.len();
    if p.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.len(),
        });
    }
    if d > usize::BITS as usize - 1 {
        return Err(Error::DimensionCap {
            d,
            cap: 63,
            hint: "use a common-p driver",
        });
    }
    let support: usize = margins.iter().map(|m| m.max_value()).sum::<usize>() + 1;
    if support.next_power_of_two() > GRID_BUDGET {
        return Err(Error::GridOverflow {
            len: support.next_power_of_two(),
            budget: GRID_BUDGET,
        });
    }
    let grid = FftGrid::new(support);
    let spectra: Vec<[Vec<Complex<F>>; 2]> = margins
        .par_iter()
        .zip(p)
        .map(|(m, &pj)| -> Result<_> {
            let z = z_pmfs(m, pj)?;
            Ok([grid.forward(&z.z0), grid.forward(&z.z1)])
        })
        .collect::<Result<_>>()?;
    let n = grid.len();
    let mut acc = vec![Complex::new(F::zero(), F::zero()); n];
    for &(mask, w) in atoms {
        let mut prod = vec![Complex::new(w, F::zero()); n];
        for (j, s) in spectra.iter().enumerate() {
            mul_assign(&mut prod, &s[mask >> j & 1]);
        }
        for (a, b) in acc.iter_mut().zip(prod) {
            *a = *a + b;
        }
    }
    Ok(LatticePmf::new(
        F::one(),
        clean_pmf(grid.inverse(acc), support),
    ))
}

/// Limited expected values `E[min(V, x)]` of `V0` and `V0 V1` on `[0, 1]`.
fn lev_pair<F: Real>(p: F, x: F) -> (F, F) {
    let x = x.min(F::one());
    let a = F::one() / (F::one() - p);
    let xa1 = x.powf(a + F::one()) / (a + F::one());
    let l0 = x - xa1;
    let l1 = x - x * x / (F::lit(2.0) * p) + (F::one() - p) / p * xa1;
    (l0, l1)
}

/// Mean-preserving discretization of `V0` and `V0 V1` on span `h`.
pub fn uniform_z_pmfs<F: Real>(p: F, h: F) -> Result<ZPair<F>> {
    ConditionalCdfs::new(p)?;
    if !(h > F::zero() && h <= F::one()) {
        return Err(Error::InvalidArgument("grid step must be in (0, 1]".into()));
    }
    let m = (F::one() / h).ceil().to_usize().expect("finite") + 1;
    let lev: Vec<(F, F)> = (0..=m + 1)
        .map(|k| lev_pair(p, F::lit(k as f64) * h))
        .collect();
    let mass = |pick: fn(&(F, F)) -> F| -> Vec<F> {
        let mut f = Vec::with_capacity(m + 1);
        f.push(F::one() - pick(&lev[1]) / h);
        for k in 1..=m {
            let v = (F::lit(2.0) * pick(&lev[k]) - pick(&lev[k - 1]) - pick(&lev[k + 1])) / h;
            f.push(v.max(F::zero()));
        }
        while f.len() > 1 && *f.last().expect("nonempty") == F::zero() {
            f.pop();
        }
        f
    };
    Ok(ZPair {
        z0: mass(|l| l.0),
        z1: mass(|l| l.1),
    })
}

/// Default uniform grid step `d / 2^15`.
pub fn default_uniform_step(d: usize) -> f64 {
    d as f64 / 32768.0
}

/// Conditional sums of `d` uniform margins on span `h`.
pub fn uniform_common_sums<F: Real>(d: usize, p: F, h: F) -> Result<ConditionalSums<F>> {
    let z = uniform_z_pmfs(p, h)?;
    conditional_sums(&z, d, h, GRID_BUDGET)
}

/// Grid law of `S` for `d` uniform margins with common `p`, driver sum pmf `g`.
pub fn aggregate_uniform<F: Real>(p: F, g: &[F], h: F) -> Result<LatticePmf<F>> {
    let d = g
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidPmf("empty sum pmf".into()))?;
    uniform_common_sums(d, p, h)?.mix(g)
}

pub use crate::mixed_erlang::aggregate_exponential;
