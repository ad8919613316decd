pub mod aggregate;
pub mod allocation;
pub mod bernoulli;
pub mod bounds;
pub mod copula;
pub mod error;
pub mod fft;
pub mod io;
pub mod linalg;
pub mod margins;
pub mod mixed_erlang;
pub mod quadrature;
pub mod risk;
pub mod scalar;
pub mod sum_polytope;
pub mod tables;
pub mod validate;
pub mod vertex;

pub use error::{Error, Result};

/// Exact field used by default for polytope work.
pub type Rational = num_rational::BigRational;
/// Default driver pmf over `{0,1}^d`.
pub type Pmf = bernoulli::BernoulliPmf<Rational>;
/// Default pmf of the driver sum.
pub type SumDistribution = sum_polytope::SumPmf<Rational>;
