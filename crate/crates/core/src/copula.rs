//! Generalized FGM copulas driven by a multivariate Bernoulli pmf.
//!
//! With `U0, U1` independent uniform vectors and `I` the driving Bernoulli
//! vector, `U_j = U0_j^(1 - p_j) · U1_j^(I_j)` has the GFGM copula. Given
//! `I_j = 0` the coordinate has cdf `u^(1/(1-p))`; given `I_j = 1` it has cdf
//! `u/p - ((1-p)/p) u^(1/(1-p))`.

use std::sync::OnceLock;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bernoulli::{
    binomial, check_pair, covariance_bounds, nu_coefficients, BernoulliAtoms, BernoulliPmf,
    MarginVector, NuCoefficients, DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::margins::Margin;
use crate::scalar::{to_real, ExactScalar, Real};
use crate::sum_polytope::SumPmf;

/// Largest `d` for the ν expansion.
pub const NU_CAP: usize = 20;

/// Rows per sampling block; each block has its own random stream.
pub const SAMPLE_BLOCK: usize = 4096;

/// Conditional cdfs of a copula coordinate given `I_j = 0` or `I_j = 1`.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalCdfs<F: Real> {
    p: F,
    a: F,
}

impl<F: Real> ConditionalCdfs<F> {
    pub fn new(p: F) -> Result<Self> {
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::InvalidArgument(format!("p = {p} is not in (0, 1)")));
        }
        Ok(Self {
            p,
            a: F::one() / (F::one() - p),
        })
    }

    /// `u^(1/(1-p))`, the cdf of `V0`.
    pub fn f0(&self, u: F) -> F {
        u.powf(self.a)
    }

    /// `u/p - ((1-p)/p) u^(1/(1-p))`, the cdf of `V0 V1`.
    pub fn f1(&self, u: F) -> F {
        let p = self.p;
        (u / p - (F::one() - p) / p * u.powf(self.a))
            .min(F::one())
            .max(F::zero())
    }

    pub fn density0(&self, u: F) -> F {
        self.a * u.powf(self.a - F::one())
    }

    /// `(1 - u^(p/(1-p))) / p`.
    pub fn density1(&self, u: F) -> F {
        (F::one() - u.powf(self.a - F::one())) / self.p
    }
}

/// The driving Bernoulli distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Driver<T: ExactScalar> {
    Dense(BernoulliPmf<T>),
    Atoms(BernoulliAtoms<T>),
    /// Exchangeable pmf given by the distribution of its sum.
    Exchangeable(SumPmf<T>),
}

impl<T: ExactScalar> Driver<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(f) => f.dim(),
            Self::Atoms(a) => a.dim(),
            Self::Exchangeable(g) => g.dim(),
        }
    }

    pub fn sum_pmf(&self) -> SumPmf<T> {
        match self {
            Self::Dense(f) => crate::bernoulli::sum_pmf(f),
            Self::Atoms(a) => a.sum_pmf(),
            Self::Exchangeable(g) => g.clone(),
        }
    }

    pub fn margin(&self, j: usize) -> T {
        match self {
            Self::Dense(f) => f.margin(j),
            Self::Atoms(a) => a.margin(j),
            Self::Exchangeable(g) => g.mean() / T::from_int(g.dim() as i64),
        }
    }

    /// `Pr(I_j1 = 1, I_j2 = 1)`.
    pub fn joint_one(&self, j1: usize, j2: usize) -> T {
        match self {
            Self::Dense(f) => f.joint_one(j1, j2),
            Self::Atoms(a) => a.joint_one(j1, j2),
            Self::Exchangeable(g) => {
                let d = g.dim() as i64;
                let pairs = g
                    .values()
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |acc, (k, v)| {
                        let k = k as i64;
                        acc + T::from_int(k * (k - 1)) * v.clone()
                    });
                pairs / T::from_int(d * (d - 1))
            }
        }
    }

    /// Atoms as `(ones, weight)` with `ones` the indices where `I_j = 1`.
    /// Exchangeable drivers are expanded, so this is `2^d`-sized for them.
    fn atoms(&self) -> Result<Vec<(Vec<usize>, T)>> {
        let ones = |x: &[bool]| {
            x.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(j, _)| j)
                .collect()
        };
        match self {
            Self::Dense(f) => Ok(f
                .support()
                .map(|(i, v)| {
                    (
                        (0..f.dim()).filter(|j| i >> j & 1 == 1).collect(),
                        v.clone(),
                    )
                })
                .collect()),
            Self::Atoms(a) => Ok(a
                .atoms()
                .iter()
                .map(|(x, w)| (ones(x), w.clone()))
                .collect()),
            Self::Exchangeable(g) => {
                let f = crate::bernoulli::exchangeable_lift(g)?;
                Driver::Dense(f).atoms()
            }
        }
    }

    /// Draw one Bernoulli vector into `out`.
    fn sampler(&self) -> Result<DriverSampler> {
        match self {
            Self::Exchangeable(g) => {
                let w: Vec<f64> = g.to_f64();
                Ok(DriverSampler::Exchangeable {
                    d: g.dim(),
                    k: WeightedIndex::new(w).map_err(internal)?,
                })
            }
            _ => {
                let atoms = self.atoms()?;
                let w: Vec<f64> = atoms.iter().map(|(_, w)| w.to_f64()).collect();
                Ok(DriverSampler::Atoms {
                    ones: atoms.into_iter().map(|(x, _)| x).collect(),
                    pick: WeightedIndex::new(w).map_err(internal)?,
                })
            }
        }
    }
}

fn internal(e: impl std::fmt::Display) -> Error {
    Error::Internal(e.to_string())
}

enum DriverSampler {
    Atoms {
        ones: Vec<Vec<usize>>,
        pick: WeightedIndex<f64>,
    },
    Exchangeable {
        d: usize,
        k: WeightedIndex<f64>,
    },
}

impl DriverSampler {
    fn draw(&self, rng: &mut impl Rng, out: &mut [bool]) {
        out.iter_mut().for_each(|b| *b = false);
        match self {
            Self::Atoms { ones, pick, .. } => {
                for &j in &ones[pick.sample(rng)] {
                    out[j] = true;
                }
            }
            Self::Exchangeable { d, k } => {
                let k = k.sample(rng);
                for j in rand::seq::index::sample(rng, *d, k) {
                    out[j] = true;
                }
            }
        }
    }
}

/// A GFGM copula: margin vector `p` and a driver in `B_d(p)`.
#[derive(Debug, Clone)]
pub struct GfgmSpec<T: ExactScalar> {
    p: MarginVector<T>,
    driver: Driver<T>,
    nu: OnceLock<NuCoefficients<T>>,
}

impl<T: ExactScalar> GfgmSpec<T> {
    pub fn new(p: MarginVector<T>, driver: Driver<T>) -> Result<Self> {
        let d = p.dim();
        if driver.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: driver.dim(),
            });
        }
        let ok = match &driver {
            Driver::Dense(f) => crate::bernoulli::validate_membership(f, &p)?,
            Driver::Atoms(a) => a.has_margins(&p),
            Driver::Exchangeable(g) => p.is_common() && g.mean() == p.total(),
        };
        if !ok {
            return Err(Error::InvalidPmf("driver is not in B_d(p)".into()));
        }
        Ok(Self {
            p,
            driver,
            nu: OnceLock::new(),
        })
    }

    /// Independence copula with the given `p` (all ν vanish). Above the
    /// dense cap a common `p` gets the exchangeable binomial driver.
    pub fn independence(p: MarginVector<T>) -> Result<Self> {
        if p.dim() > DENSE_CAP && p.is_common() {
            let g = SumPmf::binomial(p.dim(), p.get(0))?;
            return Self::new(p, Driver::Exchangeable(g));
        }
        let f = BernoulliPmf::independence(&p)?;
        Self::new(p, Driver::Dense(f))
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn p(&self) -> &MarginVector<T> {
        &self.p
    }

    pub fn driver(&self) -> &Driver<T> {
        &self.driver
    }

    /// ν coefficients of the dense driver, computed once.
    pub fn nu(&self) -> Result<&NuCoefficients<T>> {
        if let Some(nu) = self.nu.get() {
            return Ok(nu);
        }
        let d = self.dim();
        if d > NU_CAP {
            return Err(Error::DimensionCap {
                d,
                cap: NU_CAP,
                hint: "use the mixture form",
            });
        }
        let dense = match &self.driver {
            Driver::Dense(f) => f.clone(),
            Driver::Atoms(a) => a.to_dense()?,
            Driver::Exchangeable(g) => crate::bernoulli::exchangeable_lift(g)?,
        };
        let nu = nu_coefficients(&dense, &self.p)?;
        Ok(self.nu.get_or_init(|| nu))
    }

    /// `Cov(I_j1, I_j2)`, exactly.
    pub fn bernoulli_cov(&self, j1: usize, j2: usize) -> Result<T> {
        check_pair(self.dim(), j1, j2)?;
        Ok(self.driver.joint_one(j1, j2) - self.p.get(j1).clone() * self.p.get(j2).clone())
    }
}

fn check_point<F: Real>(d: usize, u: &[F]) -> Result<()> {
    if u.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: u.len(),
        });
    }
    if u.iter().any(|&x| !(x >= F::zero() && x <= F::one())) {
        return Err(Error::InvalidArgument("u must lie in [0,1]^d".into()));
    }
    Ok(())
}

/// `C(u)` by the conditional-mixture form `Σ_i f(i) Π_j F_{U_j | I_j = i_j}(u_j)`.
pub fn copula_cdf<F: Real, T: ExactScalar>(spec: &GfgmSpec<T>, u: &[F]) -> Result<F> {
    let d = spec.dim();
    check_point(d, u)?;
    let mut f0 = Vec::with_capacity(d);
    let mut f1 = Vec::with_capacity(d);
    for (j, &uj) in u.iter().enumerate() {
        let cc = ConditionalCdfs::new(to_real::<F, T>(spec.p.get(j)))?;
        f0.push(cc.f0(uj));
        f1.push(cc.f1(uj));
    }
    match &spec.driver {
        Driver::Exchangeable(g) => {
            // coefficients of Π_j (F0_j + F1_j z)
            let mut c = vec![F::zero(); d + 1];
            c[0] = F::one();
            for j in 0..d {
                for k in (0..=j + 1).rev() {
                    let keep = c[k] * f0[j];
                    c[k] = if k > 0 { keep + c[k - 1] * f1[j] } else { keep };
                }
            }
            Ok((0..=d)
                .map(|k| to_real::<F, T>(&(g.value(k).clone() / binomial::<T>(d, k))) * c[k])
                .sum())
        }
        driver => {
            let mut total = F::zero();
            for (ones, w) in driver.atoms()? {
                let mut prod: F = f0.iter().copied().fold(F::one(), |a, b| a * b);
                if prod == F::zero() || ones.is_empty() {
                    // recompute directly when a zero factor would be divided out
                    prod = (0..d).fold(F::one(), |a, j| {
                        a * if ones.contains(&j) { f1[j] } else { f0[j] }
                    });
                } else {
                    for &j in &ones {
                        prod = prod / f0[j] * f1[j];
                    }
                }
                total = total + to_real::<F, T>(&w) * prod;
            }
            Ok(total)
        }
    }
}

/// `C(u)` by the ν expansion `Π u_m (1 + Σ_S ν_S Π_{j∈S} (1 - u_j^{b_j}))`.
pub fn copula_cdf_nu<F: Real, T: ExactScalar>(spec: &GfgmSpec<T>, u: &[F]) -> Result<F> {
    let d = spec.dim();
    check_point(d, u)?;
    let nu = spec.nu()?;
    let t: Vec<F> = (0..d)
        .map(|j| F::one() - u[j].powf(to_real::<F, T>(&spec.p.b(j))))
        .collect();
    // prod[m] = Π_{j in m} t_j, built from the mask without its lowest bit
    let n = 1usize << d;
    let mut prod = vec![F::one(); n];
    let mut acc = F::one();
    for m in 1..n {
        let low = m.trailing_zeros() as usize;
        prod[m] = prod[m & (m - 1)] * t[low];
        if m.count_ones() >= 2 {
            acc = acc + to_real::<F, T>(nu.by_mask(m)) * prod[m];
        }
    }
    Ok(u.iter().copied().fold(F::one(), |a, b| a * b) * acc)
}

/// Row-major `n × d` sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub n: usize,
    pub d: usize,
    pub data: Vec<f64>,
}

impl Sample {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.d + j]).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks(self.d).map(|r| r.iter().sum()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = (1..=self.d)
            .map(|j| format!("x{j}"))
            .collect::<Vec<_>>()
            .join(",");
        s.push('\n');
        for i in 0..self.n {
            s += &self
                .row(i)
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",");
            s.push('\n');
        }
        s
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Draws of `U = U0^(1-p) ∘ U1^I`. Deterministic given `seed`, independent of
/// the thread count.
pub fn sample_u<T: ExactScalar>(spec: &GfgmSpec<T>, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let d = spec.dim();
    let sampler = spec.driver.sampler()?;
    let expo: Vec<f64> = (0..d).map(|j| 1.0 - spec.p.get(j).to_f64()).collect();
    let mut data = vec![0.0; n * d];
    data.par_chunks_mut(SAMPLE_BLOCK * d)
        .enumerate()
        .for_each(|(block, chunk)| {
            let mut rng = block_rng(seed, block);
            let mut ind = vec![false; d];
            for row in chunk.chunks_mut(d) {
                sampler.draw(&mut rng, &mut ind);
                for j in 0..d {
                    // uniforms on (0, 1]
                    let u0 = 1.0 - rng.gen::<f64>();
                    let mut u = u0.powf(expo[j]);
                    if ind[j] {
                        u *= 1.0 - rng.gen::<f64>();
                    }
                    row[j] = u;
                }
            }
        });
    Ok(Sample { n, d, data })
}

/// Draws of `X` with the given margins, `X_j = margin_j.transform(U_j)`.
pub fn sample_x<T: ExactScalar>(
    spec: &GfgmSpec<T>,
    margins: &[Margin],
    n: usize,
    seed: u64,
) -> Result<Sample> {
    let d = spec.dim();
    if margins.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: margins.len(),
        });
    }
    let mut s = sample_u(spec, n, seed)?;
    s.data.par_chunks_mut(d).for_each(|row| {
        for (x, m) in row.iter_mut().zip(margins) {
            *x = m.transform(*x);
        }
    });
    Ok(s)
}

/// `ρ_S = 3 Cov(I_j1, I_j2) / ((2 - p_j1)(2 - p_j2))`.
pub fn spearman_rho<T: ExactScalar>(spec: &GfgmSpec<T>, j1: usize, j2: usize) -> Result<f64> {
    let cov = spec.bernoulli_cov(j1, j2)?;
    Ok(spearman_from_cov(&cov, spec.p.get(j1), spec.p.get(j2)))
}

fn spearman_from_cov<T: ExactScalar>(cov: &T, p1: &T, p2: &T) -> f64 {
    let two = T::from_int(2);
    let den = (two.clone() - p1.clone()) * (two - p2.clone());
    (T::from_int(3) * cov.clone() / den).to_f64()
}

/// Sharp Spearman bounds over all GFGM copulas with margin vector `p`.
pub fn spearman_bounds<T: ExactScalar>(
    p: &MarginVector<T>,
    j1: usize,
    j2: usize,
) -> Result<(f64, f64)> {
    let (lo, hi) = covariance_bounds(p, j1, j2)?;
    Ok((
        spearman_from_cov(&lo, p.get(j1), p.get(j2)),
        spearman_from_cov(&hi, p.get(j1), p.get(j2)),
    ))
}

/// Pearson correlation of `(X_j1, X_j2)`:
/// `Cov(I_j1, I_j2) (E[Z1] - E[Z0])_j1 (E[Z1] - E[Z0])_j2 / (σ_j1 σ_j2)`.
pub fn pearson_x<T: ExactScalar>(
    spec: &GfgmSpec<T>,
    margins: &[Margin],
    j1: usize,
    j2: usize,
) -> Result<f64> {
    if margins.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: margins.len(),
        });
    }
    let cov_i = spec.bernoulli_cov(j1, j2)?.to_f64();
    let gap = |j: usize| -> Result<f64> {
        let (e0, e1) = margins[j].z_means(spec.p.get(j).to_f64())?;
        Ok(e1 - e0)
    };
    let margin_gap_product = gap(j1)? * gap(j2)?;
    let (v1, v2) = (margins[j1].variance(), margins[j2].variance());
    if !(v1.is_finite() && v2.is_finite()) {
        return Err(Error::Domain("margin variance is not finite".into()));
    }
    if v1 == 0.0 || v2 == 0.0 {
        return Ok(0.0);
    }
    Ok(cov_i * margin_gap_product / (v1 * v2).sqrt())
}

/// Average pairwise `Cov(I_j1, I_j2)` over all pairs, exactly.
pub fn mean_pair_covariance<T: ExactScalar>(spec: &GfgmSpec<T>) -> Result<T> {
    let d = spec.dim();
    if d < 2 {
        return Err(Error::InvalidArgument("need d >= 2".into()));
    }
    // Σ_{j1<j2} Cov = (Var(S) - Σ Var(I_j)) / 2
    let g = spec.driver.sum_pmf();
    let m = g.mean();
    let var_s = g.values().iter().enumerate().fold(T::zero(), |a, (k, v)| {
        let x = T::from_int(k as i64) - m.clone();
        a + x.clone() * x * v.clone()
    });
    let var_i = spec
        .p
        .as_slice()
        .iter()
        .fold(T::zero(), |a, pj| a + pj.clone() * (T::one() - pj.clone()));
    let pairs = T::from_int((d * (d - 1) / 2) as i64);
    Ok((var_s - var_i) / (T::from_int(2) * pairs))
}

/// Whether the driver is small enough for the dense ν expansion.
pub fn dense_ok(d: usize) -> bool {
    d <= DENSE_CAP
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum_polytope::{min_convex, sigma_cx_smallest_blocks};
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn half2() -> MarginVector<Q> {
        MarginVector::new(vec![q(1, 2), q(1, 2)]).unwrap()
    }

    fn comonotone_half() -> GfgmSpec<Q> {
        let f = BernoulliPmf::new(2, vec![q(1, 2), q(0, 1), q(0, 1), q(1, 2)]).unwrap();
        GfgmSpec::new(half2(), Driver::Dense(f)).unwrap()
    }

    #[test]
    fn conditional_cdf_examples() {
        let c = ConditionalCdfs::new(0.5f64).unwrap();
        for u in [0.0f64, 0.1, 0.37, 0.8, 1.0] {
            assert!((c.f0(u) - u * u).abs() < 1e-15);
            assert!((c.f1(u) - (2.0 * u - u * u)).abs() < 1e-15);
        }
        let c = ConditionalCdfs::new(1.0f64 / 3.0).unwrap();
        assert!(((1.0 / 3.0) * c.f1(0.3) + (2.0 / 3.0) * c.f0(0.3) - 0.3).abs() < 1e-15);
        assert!(ConditionalCdfs::new(1.0).is_err());
    }

    #[test]
    fn copula_examples() {
        let s = comonotone_half();
        let v: f64 = copula_cdf(&s, &[0.5, 0.5]).unwrap();
        assert!((v - 5.0 / 16.0).abs() < 1e-15);
        let w: f64 = copula_cdf_nu(&s, &[0.5, 0.5]).unwrap();
        assert!((w - 5.0 / 16.0).abs() < 1e-15);

        let ind =
            GfgmSpec::independence(MarginVector::new(vec![q(1, 3), q(2, 5), q(1, 2)]).unwrap())
                .unwrap();
        let u = [0.3, 0.9, 0.55];
        let c: f64 = copula_cdf(&ind, &u).unwrap();
        assert!((c - 0.3 * 0.9 * 0.55).abs() < 1e-14);
        assert!(copula_cdf(&ind, &[0.3, 1.2, 0.5]).is_err());
        assert!(copula_cdf(&ind, &[0.3, 0.5]).is_err());
    }

    #[test]
    fn exchangeable_form_matches_dense() {
        let g = min_convex(5, &q(2, 5)).unwrap();
        let p = MarginVector::common(5, q(2, 5)).unwrap();
        let ex = GfgmSpec::new(p.clone(), Driver::Exchangeable(g.clone())).unwrap();
        let dense = GfgmSpec::new(
            p,
            Driver::Dense(crate::bernoulli::exchangeable_lift(&g).unwrap()),
        )
        .unwrap();
        let u = [0.2, 0.9, 0.45, 0.7, 0.33];
        let a: f64 = copula_cdf(&ex, &u).unwrap();
        let b: f64 = copula_cdf(&dense, &u).unwrap();
        let c: f64 = copula_cdf_nu(&dense, &u).unwrap();
        assert!((a - b).abs() < 1e-14 && (b - c).abs() < 1e-14);
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman_rho(&comonotone_half(), 0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = spearman_bounds(&half2(), 0, 1).unwrap();
        assert!((lo + 1.0 / 3.0).abs() < 1e-15 && (hi - 1.0 / 3.0).abs() < 1e-15);
        let ind = GfgmSpec::independence(half2()).unwrap();
        assert_eq!(spearman_rho(&ind, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn equicorrelation_d100() {
        let p = MarginVector::common(100, q(1, 3)).unwrap();
        let ex = GfgmSpec::new(
            p.clone(),
            Driver::Exchangeable(min_convex(100, &q(1, 3)).unwrap()),
        )
        .unwrap();
        let margins = vec![Margin::Exponential { rate: 0.1 }; 100];
        let rho_e = pearson_x(&ex, &margins, 0, 1).unwrap();
        assert!((rho_e + 1.0 / 450.0).abs() < 1e-14, "{rho_e}");
        let blocks = GfgmSpec::new(
            p,
            Driver::Atoms(sigma_cx_smallest_blocks(100, &q(1, 3)).unwrap()),
        )
        .unwrap();
        assert_eq!(mean_pair_covariance(&blocks).unwrap(), q(-1, 450));
        assert_eq!(ex.bernoulli_cov(3, 70).unwrap(), q(-1, 450));
    }

    #[test]
    fn sampling_is_deterministic_and_margins_uniform() {
        let s = comonotone_half();
        let a = sample_u(&s, 10_000, 7).unwrap();
        let b = sample_u(&s, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_u(&s, 10_000, 8).unwrap());
        let col = a.column(0);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn independence_above_dense_cap() {
        type R = crate::Rational;
        let spec = GfgmSpec::independence(MarginVector::common(100, R::from_ratio(1, 3)).unwrap())
            .unwrap();
        assert!(matches!(spec.driver(), Driver::Exchangeable(_)));
        assert_eq!(mean_pair_covariance(&spec).unwrap(), R::from_ratio(0, 1));
        let mixed = MarginVector::new(
            vec![R::from_ratio(1, 3); 30]
                .into_iter()
                .chain([R::from_ratio(1, 2)])
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            GfgmSpec::independence(mixed),
            Err(Error::DimensionCap { .. })
        ));
    }
}
