//! Marginal distributions and the conditional pieces `Z0 = F⁻¹(V0)`,
//! `Z1 = F⁻¹(V0 V1)` used by the aggregation paths.

use serde::{Deserialize, Serialize};

use crate::copula::ConditionalCdfs;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::scalar::Real;

/// Pmf on `{0,…,n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteMarginJson<F>", into = "DiscreteMarginJson<F>")]
pub struct DiscreteMargin<F: Real> {
    pmf: Vec<F>,
}

#[derive(Serialize, Deserialize)]
struct DiscreteMarginJson<F> {
    pmf: Vec<F>,
}

impl<F: Real> TryFrom<DiscreteMarginJson<F>> for DiscreteMargin<F> {
    type Error = Error;
    fn try_from(j: DiscreteMarginJson<F>) -> Result<Self> {
        Self::new(j.pmf)
    }
}

impl<F: Real> From<DiscreteMargin<F>> for DiscreteMarginJson<F> {
    fn from(m: DiscreteMargin<F>) -> Self {
        Self { pmf: m.pmf }
    }
}

impl<F: Real> DiscreteMargin<F> {
    pub fn new(pmf: Vec<F>) -> Result<Self> {
        if pmf.is_empty() {
            return Err(Error::InvalidPmf("empty margin pmf".into()));
        }
        if pmf.iter().any(|v| *v < F::zero() || !v.is_finite()) {
            return Err(Error::InvalidPmf(
                "margin masses must be finite and nonnegative".into(),
            ));
        }
        let total: F = pmf.iter().copied().sum();
        let tol = if F::epsilon() > F::lit(1e-10) {
            F::lit(1e-5)
        } else {
            F::lit(1e-12)
        };
        if (total - F::one()).abs() > tol {
            return Err(Error::InvalidPmf(format!("margin masses sum to {total}")));
        }
        Ok(Self { pmf })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut pmf = vec![F::zero(); k + 1];
        pmf[k] = F::one();
        Self { pmf }
    }

    /// `f(0) = 1 - a`, `f(y) = a((y/n)^c - ((y-1)/n)^c)` for `y = 1..=n`.
    pub fn power_law(n: usize, a: F, c: F) -> Result<Self> {
        if n == 0 || !(a >= F::zero() && a <= F::one()) || c <= F::zero() {
            return Err(Error::InvalidArgument(
                "power-law margin needs n >= 1, a in [0,1], c > 0".into(),
            ));
        }
        let nf = F::lit(n as f64);
        let mut pmf = Vec::with_capacity(n + 1);
        pmf.push(F::one() - a);
        for y in 1..=n {
            let hi = (F::lit(y as f64) / nf).powf(c);
            let lo = (F::lit((y - 1) as f64) / nf).powf(c);
            pmf.push(a * (hi - lo));
        }
        Self::new(pmf)
    }

    /// Largest support point `n`.
    pub fn max_value(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self) -> &[F] {
        &self.pmf
    }

    pub fn cdf(&self) -> Vec<F> {
        let mut acc = F::zero();
        self.pmf
            .iter()
            .map(|&v| {
                acc = acc + v;
                acc
            })
            .collect()
    }

    pub fn mean(&self) -> F {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, &v)| F::lit(k as f64) * v)
            .sum()
    }

    pub fn variance(&self) -> F {
        let m = self.mean();
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let x = F::lit(k as f64) - m;
                x * x * v
            })
            .sum()
    }

    /// Smallest `k` with `F(k) >= u`.
    pub fn quantile(&self, u: F) -> usize {
        let mut acc = F::zero();
        for (k, &v) in self.pmf.iter().enumerate() {
            acc = acc + v;
            if acc >= u {
                return k;
            }
        }
        self.max_value()
    }

    pub fn to_f64(&self) -> DiscreteMargin<f64> {
        DiscreteMargin {
            pmf: self
                .pmf
                .iter()
                .map(|v| v.to_f64().expect("finite"))
                .collect(),
        }
    }
}

/// Pmfs of `Z0` and `Z1` on the margin's support.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPair<F: Real> {
    pub z0: Vec<F>,
    pub z1: Vec<F>,
}

impl<F: Real> ZPair<F> {
    pub fn means(&self) -> (F, F) {
        let m = |v: &[F]| {
            v.iter()
                .enumerate()
                .map(|(k, &x)| F::lit(k as f64) * x)
                .sum()
        };
        (m(&self.z0), m(&self.z1))
    }
}

/// `f_Z0(k) = F_V0(F(k)) - F_V0(F(k-1))`, and likewise with `F_{V0 V1}`.
pub fn z_pmfs<F: Real>(margin: &DiscreteMargin<F>, p: F) -> Result<ZPair<F>> {
    let cc = ConditionalCdfs::new(p)?;
    let cdf = margin.cdf();
    let n = cdf.len();
    let (mut z0, mut z1) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let (mut prev0, mut prev1) = (F::zero(), F::zero());
    for (k, &fk) in cdf.iter().enumerate() {
        // pin the last cdf value to 1 so both pmfs are exactly normalized
        let u = if k + 1 == n {
            F::one()
        } else {
            fk.min(F::one())
        };
        let (c0, c1) = (cc.f0(u), cc.f1(u));
        z0.push((c0 - prev0).max(F::zero()));
        z1.push((c1 - prev1).max(F::zero()));
        prev0 = c0;
        prev1 = c1;
    }
    Ok(ZPair { z0, z1 })
}

/// Margin families with a quantile function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Margin {
    /// Exponential with the given rate (mean `1/rate`).
    #[serde(rename = "exp")]
    Exponential {
        rate: f64,
    },
    /// Uniform on `[0, 1]`.
    Uniform,
    Discrete(DiscreteMargin<f64>),
}

impl Margin {
    /// Parse `exp:RATE`, `uniform` or `point:K`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(Self::Uniform);
        }
        let bad = || Error::Parse(format!("unknown margin {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "exp" => {
                let rate: f64 = arg.parse().map_err(|_| bad())?;
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "exponential rate must be positive".into(),
                    ));
                }
                Ok(Self::Exponential { rate })
            }
            "point" => Ok(Self::Discrete(DiscreteMargin::point_mass(
                arg.parse().map_err(|_| bad())?,
            ))),
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Exponential { rate } => format!("exp:{rate}"),
            Self::Uniform => "uniform".into(),
            Self::Discrete(m) => format!("discrete(n={})", m.max_value()),
        }
    }

    /// Value of the margin driven by a copula coordinate `u`.
    ///
    /// Exponential margins follow `X = W1 + I W2`, which is `F⁻¹(1 - u)`;
    /// the other families use `F⁻¹(u)`.
    pub fn transform(&self, u: f64) -> f64 {
        match self {
            Self::Exponential { rate } => -u.ln() / rate,
            _ => self.quantile(u),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Uniform => u,
            Self::Discrete(m) => m.quantile(u) as f64,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Uniform => 0.5,
            Self::Discrete(m) => m.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / (rate * rate),
            Self::Uniform => 1.0 / 12.0,
            Self::Discrete(m) => m.variance(),
        }
    }

    /// `ES_α` of the margin.
    pub fn es(&self, alpha: f64) -> f64 {
        match self {
            Self::Exponential { rate } => (1.0 - (-alpha).ln_1p()) / rate,
            Self::Uniform => 0.5 * (1.0 + alpha),
            Self::Discrete(m) => {
                let v = m.quantile(alpha);
                let tail: f64 = m
                    .pmf()
                    .iter()
                    .enumerate()
                    .skip(v + 1)
                    .map(|(k, &f)| (k - v) as f64 * f)
                    .sum();
                v as f64 + tail / (1.0 - alpha)
            }
        }
    }

    /// Lower tail VaR, `α⁻¹ ∫_0^α VaR_u du`.
    pub fn ltvar(&self, alpha: f64) -> f64 {
        match self {
            Self::Exponential { rate } => {
                ((1.0 - alpha) * (-alpha).ln_1p() + alpha) / (alpha * rate)
            }
            Self::Uniform => 0.5 * alpha,
            // E[X] = α LTVaR_α + (1 - α) ES_α
            Self::Discrete(_) => (self.mean() - (1.0 - alpha) * self.es(alpha)) / alpha,
        }
    }

    /// `(E[Z0], E[Z1])` in closed form, in the orientation of [`Margin::transform`].
    pub fn z_means(&self, p: f64) -> Result<(f64, f64)> {
        let a = 1.0 / (1.0 - p);
        let (e0, e1) = match self {
            // Z0 = W1, Z1 = W1 + W2
            Self::Exponential { rate } => ((1.0 - p) / rate, (2.0 - p) / rate),
            Self::Uniform => {
                let e0 = a / (a + 1.0);
                (e0, 0.5 * e0)
            }
            Self::Discrete(m) => z_pmfs(m, p)?.means(),
        };
        Ok((e0, e1))
    }
}

/// `(E[Z0], E[Z1])` for any transform `u ↦ x` by quadrature against the
/// densities of `V0` and `V0 V1`.
pub fn z_means_quadrature(transform: impl Fn(f64) -> f64, p: f64) -> Result<(f64, f64)> {
    let cc = ConditionalCdfs::new(p)?;
    let tol = 1e-10;
    let e0 = integrate(|v| transform(v) * cc.density0(v), 0.0, 1.0, tol);
    let e1 = integrate(|v| transform(v) * cc.density1(v), 0.0, 1.0, tol);
    Ok((e0, e1))
}
