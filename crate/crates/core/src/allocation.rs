//! Per-risk capital allocation for discrete portfolios.
//!
//! The allocation vectors `E[X_j 1{S = y}]` come from one FFT pass per driver
//! atom: the spectrum of `S` without risk `j` is a prefix product times a
//! suffix product, multiplied by the spectrum of `k f_{Z}(k)` for risk `j`.

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::aggregate::LatticePmf;
use crate::bernoulli::{BernoulliPmf, MarginVector};
use crate::error::{Error, Result};
use crate::fft::{clean_pmf, mul_assign, FftGrid};
use crate::margins::{z_pmfs, DiscreteMargin};
use crate::risk::RiskDistribution;
use crate::scalar::ExactScalar;

/// Probabilities at or below this are treated as zero when conditioning.
const ATOM_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct Allocation {
    sum: LatticePmf<f64>,
    /// `alloc[j][y] = E[X_j 1{S = y}]`.
    alloc: Vec<Vec<f64>>,
    cov: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskContribution {
    pub risk: usize,
    pub mean: f64,
    /// `E[X_j | S = VaR_α(S)]`.
    pub var_contribution: f64,
    pub ces: f64,
    pub cstd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationReport {
    pub alpha: f64,
    pub var: f64,
    pub es: f64,
    pub std: f64,
    pub beta_s: f64,
    pub risks: Vec<RiskContribution>,
}

impl AllocationReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("risk,cvar_contribution,ces,cstd\n");
        for r in &self.risks {
            s += &format!(
                "{},{},{},{}\n",
                r.risk,
                crate::bounds::fmt_sig(r.var_contribution),
                crate::bounds::fmt_sig(r.ces),
                crate::bounds::fmt_sig(r.cstd)
            );
        }
        s
    }
}

impl Allocation {
    /// Build from a dense driver `f` in `B_d(p)` and one discrete margin per risk.
    pub fn new<T: ExactScalar>(
        margins: &[DiscreteMargin<f64>],
        p: &MarginVector<T>,
        f: &BernoulliPmf<T>,
    ) -> Result<Self> {
        let d = p.dim();
        if margins.len() != d || f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: margins.len().min(f.dim()),
            });
        }
        let pf: Vec<f64> = p.as_slice().iter().map(|x| x.to_f64()).collect();
        let atoms: Vec<(usize, f64)> = f.support().map(|(i, w)| (i, w.to_f64())).collect();
        let support: usize = margins.iter().map(|m| m.max_value()).sum::<usize>() + 1;
        let grid = FftGrid::new(support);
        let n = grid.len();
        let zs: Vec<_> = margins
            .iter()
            .zip(&pf)
            .map(|(m, &pj)| z_pmfs(m, pj))
            .collect::<Result<_>>()?;
        let spec: Vec<[Vec<Complex<f64>>; 2]> = zs
            .iter()
            .map(|z| [grid.forward(&z.z0), grid.forward(&z.z1)])
            .collect();
        let weighted =
            |v: &[f64]| -> Vec<f64> { v.iter().enumerate().map(|(k, &x)| k as f64 * x).collect() };
        let kspec: Vec<[Vec<Complex<f64>>; 2]> = zs
            .iter()
            .map(|z| {
                [
                    grid.forward(&weighted(&z.z0)),
                    grid.forward(&weighted(&z.z1)),
                ]
            })
            .collect();

        let zero = Complex::new(0.0, 0.0);
        let mut s_acc = vec![zero; n];
        let mut a_acc = vec![vec![zero; n]; d];
        for &(mask, w) in &atoms {
            let bit = |j: usize| mask >> j & 1;
            // suffix[j] = Π_{l >= j} spectra
            let mut suffix = vec![vec![Complex::new(1.0, 0.0); n]; d + 1];
            for j in (0..d).rev() {
                let mut next = suffix[j + 1].clone();
                mul_assign(&mut next, &spec[j][bit(j)]);
                suffix[j] = next;
            }
            let mut prefix = vec![Complex::new(w, 0.0); n];
            for j in 0..d {
                let mut loo = prefix.clone();
                mul_assign(&mut loo, &suffix[j + 1]);
                mul_assign(&mut loo, &kspec[j][bit(j)]);
                for (a, b) in a_acc[j].iter_mut().zip(loo) {
                    *a += b;
                }
                mul_assign(&mut prefix, &spec[j][bit(j)]);
            }
            for (a, b) in s_acc.iter_mut().zip(prefix) {
                *a += b;
            }
        }
        let sum = LatticePmf::new(1.0, clean_pmf(grid.inverse(s_acc), support));
        let alloc = a_acc
            .into_iter()
            .map(|a| {
                let mut v = grid.inverse(a);
                v.truncate(support);
                v
            })
            .collect();

        // Cov(X_j, S) = Var(X_j) + Σ_{j'≠j} Cov(I_j, I_j') Δ_j Δ_j'
        let delta: Vec<f64> = zs
            .iter()
            .map(|z| {
                let (m0, m1) = z.means();
                m1 - m0
            })
            .collect();
        let cov = (0..d)
            .map(|j| {
                let cross: f64 = (0..d)
                    .filter(|&l| l != j)
                    .map(|l| {
                        let c = f.joint_one(j, l).to_f64() - pf[j] * pf[l];
                        c * delta[j] * delta[l]
                    })
                    .sum();
                margins[j].variance() + cross
            })
            .collect();
        Ok(Self { sum, alloc, cov })
    }

    pub fn dim(&self) -> usize {
        self.alloc.len()
    }

    /// Pmf of `S`.
    pub fn sum(&self) -> &LatticePmf<f64> {
        &self.sum
    }

    /// `y ↦ E[X_j 1{S = y}]`.
    pub fn expected_allocation(&self, j: usize) -> Result<&[f64]> {
        self.alloc
            .get(j)
            .map(Vec::as_slice)
            .ok_or(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            })
    }

    /// `E[X_j | S = y]`.
    pub fn expected_contribution(&self, j: usize, y: usize) -> Result<f64> {
        let a = self.expected_allocation(j)?;
        match self.sum.pmf.get(y) {
            Some(&f) if f > ATOM_FLOOR => Ok(a[y] / f),
            _ => Err(Error::Domain(format!("Pr(S = {y}) is zero"))),
        }
    }

    /// `(Pr(S <= VaR) - α) / Pr(S = VaR)`, or 0 without an atom.
    pub fn beta_s(&self, alpha: f64) -> f64 {
        let v = self.sum.var_index(alpha);
        let at = self.sum.pmf[v];
        if at <= ATOM_FLOOR {
            return 0.0;
        }
        let cdf: f64 = self.sum.pmf[..=v].iter().sum();
        ((cdf - alpha) / at).clamp(0.0, 1.0)
    }

    /// Euler contribution of risk `j` to `ES_α(S)`.
    pub fn ces_alpha(&self, j: usize, alpha: f64) -> Result<f64> {
        let a = self.expected_allocation(j)?;
        let v = self.sum.var_index(alpha);
        let above: f64 = a[v + 1..].iter().sum();
        Ok((above + self.beta_s(alpha) * a[v]) / (1.0 - alpha))
    }

    /// Euler contribution of risk `j` to `Std(S)`.
    pub fn cstd(&self, j: usize) -> Result<f64> {
        let sd = self.sum.std();
        if sd <= 0.0 {
            return Err(Error::Domain("Std(S) is zero".into()));
        }
        self.cov
            .get(j)
            .map(|c| c / sd)
            .ok_or(Error::IndexOutOfRange {
                index: j,
                dim: self.dim(),
            })
    }

    pub fn report(&self, alpha: f64) -> Result<AllocationReport> {
        let v = self.sum.var_index(alpha);
        let risks = (0..self.dim())
            .map(|j| -> Result<RiskContribution> {
                Ok(RiskContribution {
                    risk: j,
                    mean: self.alloc[j].iter().sum(),
                    var_contribution: self.expected_contribution(j, v)?,
                    ces: self.ces_alpha(j, alpha)?,
                    cstd: self.cstd(j)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(AllocationReport {
            alpha,
            var: v as f64,
            es: self.sum.es(alpha),
            std: self.sum.std(),
            beta_s: self.beta_s(alpha),
            risks,
        })
    }
}
