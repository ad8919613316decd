//! Multivariate Bernoulli pmfs and the Fréchet class `B_d(p)`.
//!
//! A dense pmf stores one value per binary vector `x ∈ {0,1}^d` in
//! reverse-lexicographic order: index `i` encodes `x_j` as bit `j` of `i`,
//! so for `d = 3` the order is `000, 100, 010, 110, 001, 101, 011, 111`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::sum_polytope::SumPmf;

/// Largest dimension stored densely (2^25 values).
pub const DENSE_CAP: usize = 25;

/// Binomial coefficient as an exact scalar.
pub(crate) fn binomial<T: ExactScalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_int((n - i) as i64) / T::from_int((i + 1) as i64);
    }
    acc
}

/// Vector of Bernoulli means, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>", bound = "")]
pub struct MarginVector<T: ExactScalar> {
    p: Vec<T>,
}

impl<T: ExactScalar> MarginVector<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty margin vector".into()));
        }
        for (j, pj) in p.iter().enumerate() {
            if !(pj.is_positive() && *pj < T::one()) {
                return Err(Error::InvalidArgument(format!(
                    "p[{j}] = {pj} is not in (0, 1)"
                )));
            }
        }
        Ok(Self { p })
    }

    /// `d` copies of a common mean.
    pub fn common(d: usize, p: T) -> Result<Self> {
        Self::new(vec![p; d])
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn get(&self, j: usize) -> &T {
        &self.p[j]
    }

    /// `b_j = p_j / (1 - p_j)`.
    pub fn b(&self, j: usize) -> T {
        self.p[j].clone() / (T::one() - self.p[j].clone())
    }

    /// Mean of the Bernoulli sum, `Σ p_j`.
    pub fn total(&self) -> T {
        self.p.iter().fold(T::zero(), |a, b| a + b.clone())
    }

    pub fn is_common(&self) -> bool {
        self.p.windows(2).all(|w| w[0] == w[1])
    }
}

impl<T: ExactScalar> TryFrom<Vec<String>> for MarginVector<T> {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        let p = v
            .iter()
            .map(|s| T::parse_canonical(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }
}

impl<T: ExactScalar> From<MarginVector<T>> for Vec<String> {
    fn from(m: MarginVector<T>) -> Self {
        m.p.iter().map(T::to_canonical).collect()
    }
}

fn check_dense(d: usize) -> Result<()> {
    if d == 0 || d > DENSE_CAP {
        return Err(Error::DimensionCap {
            d,
            cap: DENSE_CAP,
            hint: "use a sparse or exchangeable driver",
        });
    }
    Ok(())
}

/// Dense pmf of a `d`-variate Bernoulli vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PmfJson", into = "PmfJson", bound = "")]
pub struct BernoulliPmf<T: ExactScalar> {
    d: usize,
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct PmfJson {
    d: usize,
    order: String,
    values: Vec<String>,
}

impl<T: ExactScalar> TryFrom<PmfJson> for BernoulliPmf<T> {
    type Error = Error;
    fn try_from(j: PmfJson) -> Result<Self> {
        if j.order != "revlex" {
            return Err(Error::Parse(format!("unsupported pmf order {:?}", j.order)));
        }
        let v = j
            .values
            .iter()
            .map(|s| T::parse_canonical(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.d, v)
    }
}

impl<T: ExactScalar> From<BernoulliPmf<T>> for PmfJson {
    fn from(f: BernoulliPmf<T>) -> Self {
        PmfJson {
            d: f.d,
            order: "revlex".into(),
            values: f.values.iter().map(T::to_canonical).collect(),
        }
    }
}

impl<T: ExactScalar> BernoulliPmf<T> {
    /// Build from `2^d` values in reverse-lexicographic order.
    pub fn new(d: usize, values: Vec<T>) -> Result<Self> {
        check_dense(d)?;
        if values.len() != 1 << d {
            return Err(Error::DimensionMismatch {
                expected: 1 << d,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidPmf(format!("negative mass at index {i}")));
        }
        let total = values.iter().fold(T::zero(), |a, b| a + b.clone());
        if total != T::one() {
            return Err(Error::InvalidPmf(format!("mass sums to {total}, not 1")));
        }
        Ok(Self { d, values })
    }

    /// Independence pmf `Π p_j^{x_j} (1-p_j)^{1-x_j}`.
    pub fn independence(p: &MarginVector<T>) -> Result<Self> {
        let d = p.dim();
        check_dense(d)?;
        let values = (0..1usize << d)
            .map(|i| {
                (0..d).fold(T::one(), |acc, j| {
                    let pj = p.get(j).clone();
                    acc * if i >> j & 1 == 1 { pj } else { T::one() - pj }
                })
            })
            .collect();
        Self::new(d, values)
    }

    /// Upper Fréchet bound (comonotone vector) of `B_d(p)`.
    pub fn upper_frechet(p: &MarginVector<T>) -> Result<Self> {
        let d = p.dim();
        check_dense(d)?;
        // I_j = 1{V > 1 - p_j} for a single uniform V
        let mut cuts: Vec<T> = p
            .as_slice()
            .iter()
            .map(|pj| T::one() - pj.clone())
            .collect();
        cuts.push(T::zero());
        cuts.push(T::one());
        cuts.sort();
        cuts.dedup();
        let mut values = vec![T::zero(); 1 << d];
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let idx = (0..d)
                .filter(|&j| *lo >= T::one() - p.get(j).clone())
                .fold(0usize, |acc, j| acc | 1 << j);
            values[idx] = values[idx].clone() + hi.clone() - lo.clone();
        }
        Self::new(d, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, index: usize) -> &T {
        &self.values[index]
    }

    /// Indices and masses of the support.
    pub fn support(&self) -> impl Iterator<Item = (usize, &T)> {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_zero())
    }

    /// `Pr(I_j = 1)`.
    pub fn margin(&self, j: usize) -> T {
        self.support()
            .filter(|(i, _)| i >> j & 1 == 1)
            .fold(T::zero(), |a, (_, v)| a + v.clone())
    }

    /// `Pr(I_j1 = 1, I_j2 = 1)`.
    pub fn joint_one(&self, j1: usize, j2: usize) -> T {
        self.support()
            .filter(|(i, _)| i >> j1 & 1 == 1 && i >> j2 & 1 == 1)
            .fold(T::zero(), |a, (_, v)| a + v.clone())
    }

    /// Exchangeable iff the mass depends only on the Hamming weight.
    pub fn is_exchangeable(&self) -> bool {
        let mut seen: Vec<Option<&T>> = vec![None; self.d + 1];
        for (i, v) in self.values.iter().enumerate() {
            let w = i.count_ones() as usize;
            match seen[w] {
                None => seen[w] = Some(v),
                Some(prev) if prev != v => return false,
                _ => {}
            }
        }
        true
    }

    /// Binary vector for index `i`.
    pub fn point(&self, index: usize) -> Vec<u8> {
        (0..self.d).map(|j| (index >> j & 1) as u8).collect()
    }
}

/// Rows `(1 - x_j)ᵀ - ((1 - p_j)/p_j) x_jᵀ` of the matrix `H`.
pub fn h_matrix<T: ExactScalar>(p: &MarginVector<T>) -> Vec<Vec<T>> {
    let d = p.dim();
    (0..d)
        .map(|j| {
            let ratio = (T::one() - p.get(j).clone()) / p.get(j).clone();
            (0..1usize << d)
                .map(|i| {
                    if i >> j & 1 == 1 {
                        -ratio.clone()
                    } else {
                        T::one()
                    }
                })
                .collect()
        })
        .collect()
}

/// True iff `f ∈ B_d(p)`: `H f = 0`, `f >= 0`, `Σ f = 1`, checked exactly.
pub fn validate_membership<T: ExactScalar>(
    f: &BernoulliPmf<T>,
    p: &MarginVector<T>,
) -> Result<bool> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    if f.values.iter().any(|v| v.is_negative()) {
        return Ok(false);
    }
    if f.values.iter().fold(T::zero(), |a, b| a + b.clone()) != T::one() {
        return Ok(false);
    }
    let h = h_matrix(p);
    Ok(h.iter().all(|row| {
        row.iter()
            .zip(&f.values)
            .fold(T::zero(), |a, (h, v)| a + h.clone() * v.clone())
            .is_zero()
    }))
}

/// Distribution of `S = Σ I_j`.
pub fn sum_pmf<T: ExactScalar>(f: &BernoulliPmf<T>) -> SumPmf<T> {
    let mut g = vec![T::zero(); f.d + 1];
    for (i, v) in f.support() {
        let w = i.count_ones() as usize;
        g[w] = g[w].clone() + v.clone();
    }
    SumPmf::new(g).expect("sum of a valid pmf is a valid pmf")
}

/// The unique exchangeable pmf whose sum has distribution `g`.
pub fn exchangeable_lift<T: ExactScalar>(g: &SumPmf<T>) -> Result<BernoulliPmf<T>> {
    let d = g.dim();
    if d > DENSE_CAP {
        return Err(Error::DimensionCap {
            d,
            cap: DENSE_CAP,
            hint: "use the exchangeable driver tag",
        });
    }
    let per_weight: Vec<T> = (0..=d)
        .map(|k| g.value(k).clone() / binomial::<T>(d, k))
        .collect();
    let values = (0..1usize << d)
        .map(|i| per_weight[i.count_ones() as usize].clone())
        .collect();
    BernoulliPmf::new(d, values)
}

/// ν coefficients indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct NuCoefficients<T: ExactScalar> {
    d: usize,
    by_mask: Vec<T>,
}

impl<T: ExactScalar> NuCoefficients<T> {
    /// ν for the index set `js` (0-based, any order, at least two indices).
    pub fn get(&self, js: &[usize]) -> Option<&T> {
        if js.len() < 2 || js.iter().any(|&j| j >= self.d) {
            return None;
        }
        let mask = js.iter().fold(0usize, |m, &j| m | 1 << j);
        if mask.count_ones() as usize != js.len() {
            return None;
        }
        Some(&self.by_mask[mask])
    }

    pub fn by_mask(&self, mask: usize) -> &T {
        &self.by_mask[mask]
    }

    /// All subsets of size `>= 2` with their coefficient.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        let d = self.d;
        self.by_mask
            .iter()
            .enumerate()
            .filter(|(m, _)| m.count_ones() >= 2)
            .map(move |(m, v)| ((0..d).filter(|j| m >> j & 1 == 1).collect(), v))
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `ν_{j1..jk} = E[Π (I_j - p_j)/p_j]` for every subset, via a coordinate-wise
/// butterfly in `O(d 2^d)`.
pub fn nu_coefficients<T: ExactScalar>(
    f: &BernoulliPmf<T>,
    p: &MarginVector<T>,
) -> Result<NuCoefficients<T>> {
    if !validate_membership(f, p)? {
        return Err(Error::InvalidPmf("pmf is not in B_d(p)".into()));
    }
    let d = f.d;
    let mut a = f.values.clone();
    for j in 0..d {
        let up = (T::one() - p.get(j).clone()) / p.get(j).clone();
        let bit = 1usize << j;
        for i in 0..a.len() {
            if i & bit == 0 {
                let lo = a[i].clone();
                let hi = a[i | bit].clone();
                a[i] = lo.clone() + hi.clone();
                a[i | bit] = up.clone() * hi - lo;
            }
        }
    }
    Ok(NuCoefficients { d, by_mask: a })
}

/// `Cov(I_j1, I_j2)` and the Bernoulli correlation.
pub fn pair_covariance<T: ExactScalar>(
    f: &BernoulliPmf<T>,
    p: &MarginVector<T>,
    j1: usize,
    j2: usize,
) -> Result<(T, f64)> {
    check_pair(p.dim(), j1, j2)?;
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: f.dim(),
        });
    }
    let (p1, p2) = (p.get(j1).clone(), p.get(j2).clone());
    let cov = f.joint_one(j1, j2) - p1.clone() * p2.clone();
    let var = (p1.clone() * (T::one() - p1) * p2.clone() * (T::one() - p2)).to_f64();
    Ok((cov.clone(), cov.to_f64() / var.sqrt()))
}

/// Sharp bounds of `Cov(I_j1, I_j2)` over `B_d(p)`.
pub fn covariance_bounds<T: ExactScalar>(
    p: &MarginVector<T>,
    j1: usize,
    j2: usize,
) -> Result<(T, T)> {
    check_pair(p.dim(), j1, j2)?;
    let (a, b) = (p.get(j1).clone(), p.get(j2).clone());
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let prod = lo.clone() * hi.clone();
    let overlap = lo.clone() + hi.clone() - T::one();
    let lower = if overlap.is_positive() {
        overlap
    } else {
        T::zero()
    } - prod;
    let upper = lo.clone() * (T::one() - hi);
    Ok((lower, upper))
}

pub(crate) fn check_pair(d: usize, j1: usize, j2: usize) -> Result<()> {
    for j in [j1, j2] {
        if j >= d {
            return Err(Error::IndexOutOfRange { index: j, dim: d });
        }
    }
    if j1 == j2 {
        return Err(Error::InvalidArgument("pair indices must differ".into()));
    }
    Ok(())
}

/// Sparse pmf given as a list of binary atoms; works at any `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliAtoms<T: ExactScalar> {
    d: usize,
    atoms: Vec<(Vec<bool>, T)>,
}

impl<T: ExactScalar> BernoulliAtoms<T> {
    pub fn new(d: usize, atoms: Vec<(Vec<bool>, T)>) -> Result<Self> {
        if atoms.iter().any(|(x, _)| x.len() != d) {
            return Err(Error::InvalidPmf("atom length differs from d".into()));
        }
        if atoms.iter().any(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidPmf("atom weights must be positive".into()));
        }
        let total = atoms.iter().fold(T::zero(), |a, (_, w)| a + w.clone());
        if total != T::one() {
            return Err(Error::InvalidPmf(format!("atom weights sum to {total}")));
        }
        Ok(Self { d, atoms })
    }

    pub fn from_dense(f: &BernoulliPmf<T>) -> Self {
        let atoms = f
            .support()
            .map(|(i, v)| ((0..f.d).map(|j| i >> j & 1 == 1).collect(), v.clone()))
            .collect();
        Self { d: f.d, atoms }
    }

    pub fn to_dense(&self) -> Result<BernoulliPmf<T>> {
        if self.d > DENSE_CAP {
            return Err(Error::DimensionCap {
                d: self.d,
                cap: DENSE_CAP,
                hint: "keep the atom form",
            });
        }
        let mut values = vec![T::zero(); 1 << self.d];
        for (x, w) in &self.atoms {
            let i = x
                .iter()
                .enumerate()
                .fold(0usize, |m, (j, &b)| if b { m | 1 << j } else { m });
            values[i] = values[i].clone() + w.clone();
        }
        BernoulliPmf::new(self.d, values)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[(Vec<bool>, T)] {
        &self.atoms
    }

    pub fn margin(&self, j: usize) -> T {
        self.atoms
            .iter()
            .filter(|(x, _)| x[j])
            .fold(T::zero(), |a, (_, w)| a + w.clone())
    }

    pub fn joint_one(&self, j1: usize, j2: usize) -> T {
        self.atoms
            .iter()
            .filter(|(x, _)| x[j1] && x[j2])
            .fold(T::zero(), |a, (_, w)| a + w.clone())
    }

    pub fn sum_pmf(&self) -> SumPmf<T> {
        let mut g = vec![T::zero(); self.d + 1];
        for (x, w) in &self.atoms {
            let k = x.iter().filter(|&&b| b).count();
            g[k] = g[k].clone() + w.clone();
        }
        SumPmf::new(g).expect("atoms form a valid pmf")
    }

    /// Margin equality check `Pr(I_j = 1) = p_j` for all `j`.
    pub fn has_margins(&self, p: &MarginVector<T>) -> bool {
        p.dim() == self.d && (0..self.d).all(|j| self.margin(j) == *p.get(j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn pmf(d: usize, v: &[(i64, i64)]) -> BernoulliPmf<Q> {
        BernoulliPmf::new(d, v.iter().map(|&(n, m)| q(n, m)).collect()).unwrap()
    }

    fn mv(p: &[(i64, i64)]) -> MarginVector<Q> {
        MarginVector::new(p.iter().map(|&(n, m)| q(n, m)).collect()).unwrap()
    }

    /// Columns r_1 and r_11 of the B_3(1/2,1/3,2/3) vertex table.
    fn r1() -> BernoulliPmf<Q> {
        pmf(
            3,
            &[
                (0, 1),
                (0, 1),
                (0, 1),
                (1, 3),
                (1, 2),
                (1, 6),
                (0, 1),
                (0, 1),
            ],
        )
    }

    #[test]
    fn membership_examples() {
        let indep = pmf(2, &[(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert!(validate_membership(&indep, &mv(&[(1, 2), (1, 2)])).unwrap());

        let f = pmf(
            3,
            &[
                (0, 1),
                (1, 5),
                (1, 5),
                (1, 5),
                (2, 5),
                (0, 1),
                (0, 1),
                (0, 1),
            ],
        );
        assert!(validate_membership(&f, &mv(&[(2, 5), (2, 5), (2, 5)])).unwrap());

        let como = pmf(2, &[(1, 2), (0, 1), (0, 1), (1, 2)]);
        assert!(!validate_membership(&como, &mv(&[(1, 2), (1, 3)])).unwrap());
        assert!(matches!(
            validate_membership(&como, &mv(&[(1, 2)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(BernoulliPmf::new(2, vec![q(1, 2), q(1, 2), q(0, 1)]).is_err());
        assert!(BernoulliPmf::new(1, vec![q(3, 2), q(-1, 2)]).is_err());
        assert!(BernoulliPmf::new(1, vec![q(1, 2), q(1, 3)]).is_err());
        assert!(MarginVector::new(vec![q(1, 1)]).is_err());
        assert!(MarginVector::new(vec![q(0, 1)]).is_err());
    }

    #[test]
    fn sum_pmf_examples() {
        let indep = pmf(2, &[(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert_eq!(sum_pmf(&indep).values(), &[q(1, 4), q(1, 2), q(1, 4)]);
        assert_eq!(
            sum_pmf(&r1()).values(),
            &[q(0, 1), q(1, 2), q(1, 2), q(0, 1)]
        );

        let f = pmf(
            3,
            &[
                (0, 1),
                (1, 5),
                (1, 5),
                (1, 5),
                (2, 5),
                (0, 1),
                (0, 1),
                (0, 1),
            ],
        );
        let f2 = pmf(
            3,
            &[
                (0, 1),
                (2, 5),
                (1, 5),
                (0, 1),
                (1, 5),
                (0, 1),
                (1, 5),
                (0, 1),
            ],
        );
        assert_eq!(sum_pmf(&f), sum_pmf(&f2));
    }

    #[test]
    fn exchangeable_lift_examples() {
        let g = SumPmf::new(vec![q(1, 2), q(0, 1), q(1, 2)]).unwrap();
        assert_eq!(
            exchangeable_lift(&g).unwrap(),
            pmf(2, &[(1, 2), (0, 1), (0, 1), (1, 2)])
        );

        let mut v = vec![q(0, 1); 6];
        v[2] = q(5, 6);
        v[5] = q(1, 6);
        let e = exchangeable_lift(&SumPmf::new(v).unwrap()).unwrap();
        for (i, val) in e.values().iter().enumerate() {
            let expected = match i.count_ones() {
                2 => q(5, 60),
                5 => q(1, 6),
                _ => q(0, 1),
            };
            assert_eq!(*val, expected, "index {i}");
        }
        assert!(e.is_exchangeable());
    }

    #[test]
    fn nu_examples() {
        let p = mv(&[(1, 2), (1, 2)]);
        let indep = BernoulliPmf::independence(&p).unwrap();
        assert_eq!(
            nu_coefficients(&indep, &p).unwrap().get(&[0, 1]),
            Some(&q(0, 1))
        );
        let como = pmf(2, &[(1, 2), (0, 1), (0, 1), (1, 2)]);
        assert_eq!(
            nu_coefficients(&como, &p).unwrap().get(&[0, 1]),
            Some(&q(1, 1))
        );

        // ν_12 p1 p2 = Cov(I1, I2) = 1/3 - 1/6
        let p3 = mv(&[(1, 2), (1, 3), (2, 3)]);
        let nu = nu_coefficients(&r1(), &p3).unwrap();
        assert_eq!(nu.get(&[0, 1]).unwrap().clone() * q(1, 6), q(1, 6));
        assert_eq!(nu.iter().count(), 4);
    }

    /// Direct evaluation of E[Π (I_j - p_j)/p_j] over the 2^d atoms.
    fn nu_brute(f: &BernoulliPmf<Q>, p: &MarginVector<Q>, mask: usize) -> Q {
        f.values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (0..f.dim())
                    .filter(|j| mask >> j & 1 == 1)
                    .fold(v.clone(), |acc, j| {
                        let x = if i >> j & 1 == 1 { q(1, 1) } else { q(0, 1) };
                        acc * (x - p.get(j).clone()) / p.get(j).clone()
                    })
            })
            .fold(q(0, 1), |a, b| a + b)
    }

    #[test]
    fn nu_butterfly_matches_direct_expectation() {
        let p3 = mv(&[(1, 2), (1, 3), (2, 3)]);
        let f = r1();
        let nu = nu_coefficients(&f, &p3).unwrap();
        for mask in 0..8usize {
            assert_eq!(*nu.by_mask(mask), nu_brute(&f, &p3, mask), "mask {mask}");
        }
    }

    #[test]
    fn covariance_examples() {
        let p = mv(&[(1, 2), (1, 2)]);
        assert_eq!(covariance_bounds(&p, 0, 1).unwrap(), (q(-1, 4), q(1, 4)));
        let p3 = mv(&[(1, 2), (1, 3), (2, 3)]);
        let (cov, corr) = pair_covariance(&r1(), &p3, 0, 1).unwrap();
        assert_eq!(cov, q(1, 6));
        assert!((corr - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // symmetric in the argument order
        assert_eq!(
            covariance_bounds(&p3, 2, 1).unwrap(),
            covariance_bounds(&p3, 1, 2).unwrap()
        );
        assert!(matches!(
            covariance_bounds(&p3, 0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn upper_frechet_heterogeneous() {
        let p3 = mv(&[(1, 2), (1, 3), (2, 3)]);
        let u = BernoulliPmf::upper_frechet(&p3).unwrap();
        assert!(validate_membership(&u, &p3).unwrap());
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let (cov, _) = pair_covariance(&u, &p3, a, b).unwrap();
            assert_eq!(cov, covariance_bounds(&p3, a, b).unwrap().1);
        }
    }

    fn random_member() -> impl Strategy<Value = (BernoulliPmf<Q>, MarginVector<Q>)> {
        // mixture of an independence pmf and the comonotone pmf over random p
        (2usize..=5)
            .prop_flat_map(|d| (Just(d), prop::collection::vec(1i64..9, d), 0i64..=6))
            .prop_map(|(d, ps, t)| {
                let p = MarginVector::new(ps.iter().map(|&k| q(k, 9)).collect()).unwrap();
                let a = BernoulliPmf::independence(&p).unwrap();
                let b = BernoulliPmf::upper_frechet(&p).unwrap();
                let w = q(t, 6);
                let values = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| w.clone() * x.clone() + (q(1, 1) - w.clone()) * y.clone())
                    .collect();
                (BernoulliPmf::new(d, values).unwrap(), p)
            })
    }

    proptest! {
        #[test]
        fn membership_iff_margins((f, p) in random_member()) {
            prop_assert!(validate_membership(&f, &p).unwrap());
            for j in 0..f.dim() {
                prop_assert_eq!(f.margin(j), p.get(j).clone());
            }
            for j1 in 0..f.dim() {
                for j2 in j1 + 1..f.dim() {
                    let (cov, _) = pair_covariance(&f, &p, j1, j2).unwrap();
                    let (lo, hi) = covariance_bounds(&p, j1, j2).unwrap();
                    prop_assert!(lo <= cov && cov <= hi);
                }
            }
        }

        #[test]
        fn lift_round_trips((f, _p) in random_member()) {
            let g = sum_pmf(&f);
            let e = exchangeable_lift(&g).unwrap();
            prop_assert!(e.is_exchangeable());
            prop_assert_eq!(sum_pmf(&e), g);
            prop_assert_eq!(exchangeable_lift(&sum_pmf(&e)).unwrap(), e.clone());
        }

        #[test]
        fn exchangeable_nu_constant_on_equal_sizes((f, _p) in random_member()) {
            let e = exchangeable_lift(&sum_pmf(&f)).unwrap();
            let d = e.dim();
            let pc = MarginVector::common(d, e.margin(0)).unwrap();
            let nu = nu_coefficients(&e, &pc).unwrap();
            let mut by_size: Vec<Option<Q>> = vec![None; d + 1];
            for (set, v) in nu.iter() {
                match &by_size[set.len()] {
                    None => by_size[set.len()] = Some(v.clone()),
                    Some(prev) => prop_assert_eq!(prev, v),
                }
            }
        }
    }

    #[test]
    fn atoms_round_trip() {
        let f = r1();
        let a = BernoulliAtoms::from_dense(&f);
        assert_eq!(a.atoms().len(), 3);
        assert_eq!(a.to_dense().unwrap(), f);
        assert_eq!(a.sum_pmf(), sum_pmf(&f));
        assert!(a.has_margins(&mv(&[(1, 2), (1, 3), (2, 3)])));
    }

    #[test]
    fn json_round_trip() {
        let f = r1();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"order\":\"revlex\""));
        assert!(s.contains("\"1/3\""));
        let back: BernoulliPmf<Q> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<BernoulliPmf<Q>>(&s.replace("revlex", "lex")).is_err());
    }
}
