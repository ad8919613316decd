//! Portfolio files.
//!
//! ```json
//! {
//!   "margins": [{"type": "power_law", "n": 1000, "a": 0.2, "c": 3}],
//!   "d": 3,
//!   "p": ["1/2", "1/3", "2/3"],
//!   "driver": {"kind": "joint", "pmf": ["0", "0", "0", "1/3", "1/2", "1/6", "0", "0"]},
//!   "measures": ["var:0.95", "es:0.95"]
//! }
//! ```
//!
//! A single margin is repeated `d` times. `p` is one rational or one per risk.
//! The joint pmf is indexed with bit `j` of the index holding `x_j`.

use serde::{Deserialize, Serialize};

use crate::bernoulli::{BernoulliPmf, MarginVector};
use crate::copula::{Driver, GfgmSpec};
use crate::error::{Error, Result};
use crate::margins::{DiscreteMargin, Margin};
use crate::risk::MeasureRequest;
use crate::scalar::{parse_rational_list, ExactScalar};
use crate::sum_polytope::{max_convex, min_convex, SumPmf};

pub const PORTFOLIO_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginSpec {
    #[serde(rename = "exp")]
    Exponential {
        rate: f64,
    },
    Uniform,
    Discrete {
        pmf: Vec<f64>,
    },
    /// `f(0) = 1 - a`, `f(y) = a ((y/n)^c - ((y-1)/n)^c)`.
    PowerLaw {
        n: usize,
        a: f64,
        c: f64,
    },
}

impl MarginSpec {
    pub fn to_margin(&self) -> Result<Margin> {
        Ok(match self {
            Self::Exponential { rate } if *rate > 0.0 && rate.is_finite() => {
                Margin::Exponential { rate: *rate }
            }
            Self::Exponential { .. } => {
                return Err(Error::InvalidArgument(
                    "exponential rate must be positive".into(),
                ))
            }
            Self::Uniform => Margin::Uniform,
            Self::Discrete { pmf } => Margin::Discrete(DiscreteMargin::new(pmf.clone())?),
            Self::PowerLaw { n, a, c } => Margin::Discrete(DiscreteMargin::power_law(*n, *a, *c)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PSpec {
    Common(String),
    PerRisk(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverSpec {
    Independence,
    MinConvex,
    MaxConvex,
    /// Exchangeable driver given by the pmf of its sum.
    Sum {
        pmf: Vec<String>,
    },
    /// Dense joint pmf over `{0,1}^d`.
    Joint {
        pmf: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortfolioFile {
    #[serde(default = "schema")]
    pub schema_version: u32,
    pub margins: Vec<MarginSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub p: PSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub driver: Option<DriverSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<MeasureRequest>,
}

fn schema() -> u32 {
    PORTFOLIO_SCHEMA
}

/// A validated portfolio.
#[derive(Debug, Clone)]
pub struct Portfolio<T: ExactScalar> {
    pub margins: Vec<Margin>,
    pub p: MarginVector<T>,
    pub driver: Option<Driver<T>>,
    pub measures: Vec<MeasureRequest>,
}

impl<T: ExactScalar> Portfolio<T> {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// True when every risk shares one margin and one `p`.
    pub fn is_homogeneous(&self) -> bool {
        self.p.is_common() && self.margins.windows(2).all(|w| w[0] == w[1])
    }

    /// The driver, independence when none was given.
    pub fn spec(&self) -> Result<GfgmSpec<T>> {
        match &self.driver {
            Some(drv) => GfgmSpec::new(self.p.clone(), drv.clone()),
            None => GfgmSpec::independence(self.p.clone()),
        }
    }

    /// Discrete margins, or `None` if any margin is continuous.
    pub fn discrete_margins(&self) -> Option<Vec<DiscreteMargin<f64>>> {
        self.margins
            .iter()
            .map(|m| match m {
                Margin::Discrete(dm) => Some(dm.clone()),
                _ => None,
            })
            .collect()
    }
}

impl PortfolioFile {
    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("portfolio: {e}")))?;
        if f.schema_version != PORTFOLIO_SCHEMA {
            return Err(Error::Parse(format!(
                "unsupported portfolio schema {}",
                f.schema_version
            )));
        }
        Ok(f)
    }

    pub fn resolve<T: ExactScalar>(&self) -> Result<Portfolio<T>> {
        let mut margins: Vec<Margin> = self
            .margins
            .iter()
            .map(MarginSpec::to_margin)
            .collect::<Result<_>>()?;
        let p: Vec<T> = match &self.p {
            PSpec::Common(s) => parse_rational_list(s)?,
            PSpec::PerRisk(v) => v
                .iter()
                .map(|s| T::parse_canonical(s))
                .collect::<Result<_>>()?,
        };
        let d = self.d.unwrap_or(margins.len().max(p.len()));
        if margins.len() == 1 {
            margins = vec![margins[0].clone(); d];
        }
        let p = match p.len() {
            1 => MarginVector::common(d, p[0].clone())?,
            _ => MarginVector::new(p)?,
        };
        if margins.len() != d || p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: if margins.len() != d {
                    margins.len()
                } else {
                    p.dim()
                },
            });
        }
        let common = || -> Result<T> {
            if p.is_common() {
                Ok(p.get(0).clone())
            } else {
                Err(Error::InvalidArgument(
                    "convex-order drivers need a common p".into(),
                ))
            }
        };
        let rationals =
            |v: &[String]| -> Result<Vec<T>> { v.iter().map(|s| T::parse_canonical(s)).collect() };
        let driver = match &self.driver {
            None | Some(DriverSpec::Independence) => None,
            Some(DriverSpec::MinConvex) => Some(Driver::Exchangeable(min_convex(d, &common()?)?)),
            Some(DriverSpec::MaxConvex) => Some(Driver::Exchangeable(max_convex(d, &common()?)?)),
            Some(DriverSpec::Sum { pmf }) => {
                Some(Driver::Exchangeable(SumPmf::new(rationals(pmf)?)?))
            }
            Some(DriverSpec::Joint { pmf }) => {
                Some(Driver::Dense(BernoulliPmf::new(d, rationals(pmf)?)?))
            }
        };
        let out = Portfolio {
            margins,
            p,
            driver,
            measures: self.measures.clone(),
        };
        // validates membership of the driver
        out.spec()?;
        Ok(out)
    }
}
