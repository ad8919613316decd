//! Mixed Erlang distributions `Σ_n η_n Erlang(offset + n, β)`, and the sum
//! of exponential risks under a GFGM copula.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation threshold for the η weights.
pub const ETA_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedErlang {
    pub beta: f64,
    /// Shape of the component with weight `eta[0]`.
    pub offset: usize,
    pub eta: Vec<f64>,
    /// Mass dropped by truncation.
    pub tail: f64,
    /// MGF abscissa: the mgf is finite for `γ` below this.
    pub abscissa: f64,
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

impl MixedErlang {
    fn max_shape(&self) -> usize {
        self.offset + self.eta.len()
    }

    /// `S_m = Pr(Poisson(y) < m)` for `m = 0..=max_shape + 1`.
    fn poisson_below(&self, y: f64) -> Vec<f64> {
        let top = self.max_shape() + 1;
        let mut out = Vec::with_capacity(top + 1);
        out.push(0.0);
        if y <= 0.0 {
            out.resize(top + 1, 1.0);
            return out;
        }
        let lf = ln_factorials(top);
        let ly = y.ln();
        let mut acc = 0.0;
        for (i, lfi) in lf.iter().enumerate().take(top) {
            acc += (-y + i as f64 * ly - lfi).exp();
            out.push(acc.min(1.0));
        }
        out
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let s = self.poisson_below(self.beta * x);
        self.eta
            .iter()
            .enumerate()
            .map(|(n, &w)| w * (1.0 - s[self.offset + n]))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.eta
            .iter()
            .enumerate()
            .map(|(n, &w)| w * (self.offset + n) as f64)
            .sum::<f64>()
            / self.beta
    }

    pub fn second_moment(&self) -> f64 {
        self.eta
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let m = (self.offset + n) as f64;
                w * m * (m + 1.0)
            })
            .sum::<f64>()
            / (self.beta * self.beta)
    }

    /// `E[(S - x)+]` from the Erlang stop-loss
    /// `(m/β) Pr(Poisson(βx) < m+1) - x Pr(Poisson(βx) < m)`.
    pub fn stop_loss(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.mean() - x;
        }
        let s = self.poisson_below(self.beta * x);
        self.eta
            .iter()
            .enumerate()
            .map(|(n, &w)| {
                let m = self.offset + n;
                w * (m as f64 / self.beta * s[m + 1] - x * s[m])
            })
            .sum::<f64>()
            .max(0.0)
    }

    /// Smallest `x` with `F(x) >= α`, by bisection to `1e-10`.
    pub fn quantile(&self, alpha: f64) -> f64 {
        let mut hi = self.mean().max(1e-12);
        while self.cdf(hi) < alpha {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while hi - lo > 1e-10 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) >= alpha {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `ln E[e^{γS}]` by log-sum-exp over components.
    pub fn ln_mgf(&self, gamma: f64) -> Result<f64> {
        if gamma >= self.abscissa {
            return Err(Error::Domain(format!(
                "entropic parameter {gamma} is not below the mgf abscissa {}",
                self.abscissa
            )));
        }
        let r = (self.beta / (self.beta - gamma)).ln();
        let terms: Vec<f64> = self
            .eta
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(n, &w)| w.ln() + (self.offset + n) as f64 * r)
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
    }
}

/// Sum of `d` Exp(λ) risks whose GFGM driver has sum distribution `g`.
///
/// Each risk is `W1 + I W2` with `W1 ~ Exp(λ/(1-p))`, `W2 ~ Exp(λ)`. With
/// `β = λ/(1-p)`, each `W2` is a geometric number of Exp(β) phases with
/// success probability `1 - p`, so given `k` ones the extra phases are
/// `k + NB(k, 1 - p)`.
pub fn aggregate_exponential(lambda: f64, p: f64, g: &[f64]) -> Result<MixedErlang> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument("rate must be positive".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} is not in (0, 1)")));
    }
    let d = g
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidPmf("empty sum pmf".into()))?;
    let beta = lambda / (1.0 - p);
    let mut eta: Vec<f64> = vec![0.0; d + 1];
    for (k, &w) in g.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        // NB(k, 1-p) failures m, recursively: P(m+1) = P(m) (m+k)/(m+1) p
        // The ratio is non-increasing in m, so once it is below one the rest
        // of the series is bounded by a geometric tail.
        let mut pm = (1.0 - p).powi(k as i32);
        let mut m = 0usize;
        loop {
            let n = k + m;
            if eta.len() <= n {
                eta.resize(n + 1, 0.0);
            }
            eta[n] += w * pm;
            if k == 0 {
                break;
            }
            let r = (m + k) as f64 / (m + 1) as f64 * p;
            pm *= r;
            m += 1;
            if r < 1.0 && pm / (1.0 - r) < ETA_EPS * 1e-3 {
                break;
            }
        }
    }
    // drop the far tail once the remaining weight is below ETA_EPS
    let total: f64 = eta.iter().sum();
    let mut keep = eta.len();
    let mut dropped = 0.0;
    while keep > 1 && dropped + eta[keep - 1] < ETA_EPS {
        dropped += eta[keep - 1];
        keep -= 1;
    }
    eta.truncate(keep);
    Ok(MixedErlang {
        beta,
        offset: d,
        eta,
        tail: (1.0 - total) + dropped,
        abscissa: lambda,
    })
}
