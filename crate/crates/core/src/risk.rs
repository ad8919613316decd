//! VaR, expected shortfall, entropic risk and standard deviation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregate::{AggregateDistribution, Empirical, LatticePmf};
use crate::error::{Error, Result};
use crate::margins::Margin;
use crate::mixed_erlang::MixedErlang;

/// Slack on cumulative sums when locating a lattice quantile, so that a cdf
/// equal to `α` up to round-off counts as reaching it.
pub const CDF_SLACK: f64 = 1e3 * f64::EPSILON;

/// Risk measures of a univariate loss.
pub trait RiskDistribution {
    fn mean(&self) -> f64;
    /// `inf { y : Pr(Y <= y) >= α }`.
    fn var(&self, alpha: f64) -> f64;
    /// `E[(Y - x)+]`.
    fn stop_loss(&self, x: f64) -> f64;
    fn std(&self) -> f64;
    /// `Pr(Y <= x)`.
    fn cdf(&self, x: f64) -> f64;
    /// `Pr(Y < x)`.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
    /// `ln E[e^{γY}]`.
    fn ln_mgf(&self, gamma: f64) -> Result<f64>;

    fn es(&self, alpha: f64) -> f64 {
        let v = self.var(alpha);
        v + self.stop_loss(v) / (1.0 - alpha)
    }

    fn entropic(&self, gamma: f64) -> Result<f64> {
        Ok(self.ln_mgf(gamma)? / gamma)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

impl LatticePmf<f64> {
    /// Index of the lattice quantile.
    pub fn var_index(&self, alpha: f64) -> usize {
        let mut cdf = 0.0;
        for (k, &f) in self.pmf.iter().enumerate() {
            cdf += f;
            if cdf >= alpha - CDF_SLACK {
                return k;
            }
        }
        self.pmf.len() - 1
    }

    /// `ES_α` as `(1-α)⁻¹ ∫_α^1 VaR_u du`, summed atom by atom.
    pub fn es_integral(&self, alpha: f64) -> f64 {
        let mut lo = 0.0;
        let mut acc = 0.0;
        for (k, &f) in self.pmf.iter().enumerate() {
            let hi = lo + f;
            let overlap = (hi.min(1.0) - lo.max(alpha)).max(0.0);
            acc += overlap * self.node(k);
            lo = hi;
        }
        acc / (1.0 - alpha)
    }
}

impl RiskDistribution for LatticePmf<f64> {
    fn mean(&self) -> f64 {
        LatticePmf::mean(self)
    }

    fn var(&self, alpha: f64) -> f64 {
        self.node(self.var_index(alpha))
    }

    fn stop_loss(&self, x: f64) -> f64 {
        if x < 0.0 {
            return LatticePmf::mean(self) - x;
        }
        let start = ((x / self.span).floor() as usize).min(self.pmf.len());
        self.pmf[start..]
            .iter()
            .enumerate()
            .map(|(i, &f)| (self.node(start + i) - x).max(0.0) * f)
            .sum()
    }

    fn std(&self) -> f64 {
        let m = LatticePmf::mean(self);
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, &f)| (self.node(k) - m).powi(2) * f)
            .sum::<f64>()
            .sqrt()
    }

    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        // nodes within round-off of x count as <= x
        let top = ((x / self.span) * (1.0 + 1e-12)).floor() as usize;
        self.pmf
            .iter()
            .take(top.saturating_add(1))
            .sum::<f64>()
            .min(1.0)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let k = x / self.span;
        let top = (k * (1.0 - 1e-12)).ceil();
        if top <= 0.0 {
            return 0.0;
        }
        self.pmf.iter().take(top as usize).sum::<f64>().min(1.0)
    }

    fn ln_mgf(&self, gamma: f64) -> Result<f64> {
        Ok(log_sum_exp(
            self.pmf
                .iter()
                .enumerate()
                .filter(|(_, &f)| f > 0.0)
                .map(|(k, &f)| f.ln() + gamma * self.node(k)),
        ))
    }
}

impl RiskDistribution for MixedErlang {
    fn mean(&self) -> f64 {
        MixedErlang::mean(self)
    }

    fn var(&self, alpha: f64) -> f64 {
        self.quantile(alpha)
    }

    fn stop_loss(&self, x: f64) -> f64 {
        MixedErlang::stop_loss(self, x)
    }

    fn std(&self) -> f64 {
        let m = MixedErlang::mean(self);
        (self.second_moment() - m * m).max(0.0).sqrt()
    }

    fn cdf(&self, x: f64) -> f64 {
        MixedErlang::cdf(self, x)
    }

    fn ln_mgf(&self, gamma: f64) -> Result<f64> {
        MixedErlang::ln_mgf(self, gamma)
    }
}

impl RiskDistribution for Empirical {
    fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    fn var(&self, alpha: f64) -> f64 {
        let n = self.sorted.len();
        let k = ((alpha * n as f64 - CDF_SLACK * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[k - 1]
    }

    fn stop_loss(&self, x: f64) -> f64 {
        self.sorted.iter().map(|&s| (s - x).max(0.0)).sum::<f64>() / self.sorted.len() as f64
    }

    fn std(&self) -> f64 {
        let m = RiskDistribution::mean(self);
        let n = self.sorted.len() as f64;
        (self.sorted.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s < x) as f64 / self.sorted.len() as f64
    }

    fn ln_mgf(&self, gamma: f64) -> Result<f64> {
        let n = self.sorted.len() as f64;
        Ok(log_sum_exp(self.sorted.iter().map(|&s| gamma * s)) - n.ln())
    }
}

impl AggregateDistribution {
    fn inner(&self) -> &dyn RiskDistribution {
        match self {
            Self::Lattice(l) | Self::Grid(l) => l,
            Self::MixedErlang(m) => m,
            Self::Empirical(e) => e,
        }
    }
}

impl RiskDistribution for AggregateDistribution {
    fn mean(&self) -> f64 {
        self.inner().mean()
    }
    fn var(&self, alpha: f64) -> f64 {
        self.inner().var(alpha)
    }
    fn stop_loss(&self, x: f64) -> f64 {
        self.inner().stop_loss(x)
    }
    fn std(&self) -> f64 {
        self.inner().std()
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        self.inner().cdf_left(x)
    }
    fn ln_mgf(&self, gamma: f64) -> Result<f64> {
        self.inner().ln_mgf(gamma)
    }
}

/// A risk measure addressable as `var:0.95`, `es:0.8`, `entropic:0.001` or `std`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MeasureRequest {
    Var(f64),
    Es(f64),
    Entropic(f64),
    Std,
}

impl MeasureRequest {
    /// ES, entropic risk and standard deviation preserve convex order.
    pub fn is_convex(&self) -> bool {
        !matches!(self, Self::Var(_))
    }

    pub fn evaluate(&self, dist: &(impl RiskDistribution + ?Sized)) -> Result<f64> {
        Ok(match *self {
            Self::Var(a) => dist.var(a),
            Self::Es(a) => dist.es(a),
            Self::Entropic(g) => dist.entropic(g)?,
            Self::Std => dist.std(),
        })
    }

    /// Parse a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for MeasureRequest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "std" {
            return Ok(Self::Std);
        }
        let bad = || Error::Parse(format!("unknown measure {s:?}"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let x: f64 = arg.parse().map_err(|_| bad())?;
        let level = |x: f64| {
            if x > 0.0 && x < 1.0 {
                Ok(x)
            } else {
                Err(Error::InvalidArgument(format!(
                    "level {x} is not in (0, 1)"
                )))
            }
        };
        match kind {
            "var" => Ok(Self::Var(level(x)?)),
            "es" => Ok(Self::Es(level(x)?)),
            "entropic" if x > 0.0 && x.is_finite() => Ok(Self::Entropic(x)),
            "entropic" => Err(Error::InvalidArgument(
                "entropic parameter must be positive".into(),
            )),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for MeasureRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Var(a) => write!(f, "var:{a}"),
            Self::Es(a) => write!(f, "es:{a}"),
            Self::Entropic(g) => write!(f, "entropic:{g}"),
            Self::Std => write!(f, "std"),
        }
    }
}

impl TryFrom<String> for MeasureRequest {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MeasureRequest> for String {
    fn from(m: MeasureRequest) -> String {
        m.to_string()
    }
}

/// VaR bounds over all dependence structures of `d` copies of `margin`:
/// `(d LTVaR_α, d ES_α)`.
pub fn frechet_var_bounds(margin: &Margin, d: usize, alpha: f64) -> (f64, f64) {
    let d = d as f64;
    (d * margin.ltvar(alpha), d * margin.es(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::aggregate_exponential;
    use crate::margins::DiscreteMargin;

    fn lattice(pmf: &[f64]) -> LatticePmf<f64> {
        LatticePmf::new(1.0, pmf.to_vec())
    }

    #[test]
    fn two_point_bernoulli_sum() {
        // mass 1/6 at 0 and 5/6 at 3
        let s = lattice(&[1.0 / 6.0, 0.0, 0.0, 5.0 / 6.0, 0.0, 0.0]);
        assert_eq!(s.var(0.8), 3.0);
        assert!((s.es(0.8) - 3.0).abs() < 1e-12);
        assert!(
            (s.entropic(0.1).unwrap() - 10.0 * (1.0 / 6.0 + 5.0 / 6.0 * 0.3f64.exp()).ln()).abs()
                < 1e-12
        );
        assert!((s.entropic(0.1).unwrap() - 2.5584).abs() < 5e-5);
    }

    #[test]
    fn atom_exactly_at_level() {
        // cdf hits 0.8 exactly at 2
        let s = lattice(&[0.2, 0.2, 0.4, 0.0, 0.2]);
        assert_eq!(s.var(0.8), 2.0);
        assert!((s.es(0.8) - 4.0).abs() < 1e-12);
        assert!((s.es_integral(0.8) - s.es(0.8)).abs() < 1e-12);
    }

    #[test]
    fn degenerate() {
        let s = lattice(&[0.0, 0.0, 0.0, 1.0]);
        for a in [0.1, 0.5, 0.99] {
            assert_eq!(s.var(a), 3.0);
            assert!((s.es(a) - 3.0).abs() < 1e-12);
        }
        assert!((s.entropic(0.7).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(s.std(), 0.0);
    }

    #[test]
    fn binomial_std_and_entropic_limit() {
        let s = lattice(&[1.0, 5.0, 10.0, 10.0, 5.0, 1.0].map(|c| c / 32.0));
        assert!((s.std() - 1.25f64.sqrt()).abs() < 1e-12);
        assert!((s.entropic(1e-8).unwrap() - 2.5).abs() < 1e-6);
    }

    #[test]
    fn es_forms_agree_on_a_wide_lattice() {
        let m = DiscreteMargin::power_law(1000, 0.2, 3.0).unwrap();
        let s = lattice(m.pmf());
        for a in [0.5, 0.9, 0.95, 0.99] {
            assert!((s.es(a) - s.es_integral(a)).abs() < 1e-9);
        }
    }

    #[test]
    fn shift_and_scale() {
        let base = lattice(&[0.1, 0.3, 0.2, 0.4]);
        let shifted = lattice(&[0.0, 0.0, 0.1, 0.3, 0.2, 0.4]);
        let scaled = LatticePmf::new(2.5, base.pmf.clone());
        for a in [0.3, 0.75, 0.9] {
            assert!((shifted.var(a) - base.var(a) - 2.0).abs() < 1e-12);
            assert!((shifted.es(a) - base.es(a) - 2.0).abs() < 1e-12);
            assert!((scaled.var(a) - 2.5 * base.var(a)).abs() < 1e-12);
            assert!((scaled.es(a) - 2.5 * base.es(a)).abs() < 1e-12);
        }
        assert!((shifted.entropic(0.3).unwrap() - base.entropic(0.3).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_margin() {
        let me = aggregate_exponential(0.1, 0.5, &[0.5, 0.5]).unwrap();
        assert!((me.var(0.95) - 29.9573).abs() < 1e-4);
        assert!((me.es(0.95) - 39.9573).abs() < 1e-4);
        assert!(me.entropic(0.1).is_err());
    }

    #[test]
    fn measure_strings() {
        let ms = MeasureRequest::parse_list("var:0.95,es:0.8, entropic:0.001,std").unwrap();
        assert_eq!(
            ms,
            vec![
                MeasureRequest::Var(0.95),
                MeasureRequest::Es(0.8),
                MeasureRequest::Entropic(0.001),
                MeasureRequest::Std
            ]
        );
        assert_eq!(ms[2].to_string(), "entropic:0.001");
        assert!("var:1".parse::<MeasureRequest>().is_err());
        assert!("entropic:0".parse::<MeasureRequest>().is_err());
        assert!("tvar:0.9".parse::<MeasureRequest>().is_err());
        let json = serde_json::to_string(&ms).unwrap();
        assert_eq!(
            serde_json::from_str::<Vec<MeasureRequest>>(&json).unwrap(),
            ms
        );
    }

    #[test]
    fn frechet_bounds_exponential() {
        let (lo, hi) = frechet_var_bounds(&Margin::Exponential { rate: 0.1 }, 100, 0.95);
        assert!((lo - 842.3299).abs() < 1e-2, "{lo}");
        assert!((hi - 3995.7323).abs() < 1e-2, "{hi}");
        let (lo, hi) =
            frechet_var_bounds(&Margin::Discrete(DiscreteMargin::point_mass(4)), 10, 0.9);
        assert!((lo - 40.0).abs() < 1e-9 && (hi - 40.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_measures() {
        let e = Empirical::new((1..=100).map(f64::from).collect()).unwrap();
        assert_eq!(e.var(0.95), 95.0);
        assert!((e.es(0.95) - 98.0).abs() < 1e-12);
        assert!((RiskDistribution::mean(&e) - 50.5).abs() < 1e-12);
    }
}
