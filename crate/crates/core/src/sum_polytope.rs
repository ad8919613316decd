//! The class `D_d(dp)` of pmfs on `{0,…,d}` with mean `dp`, its extremal
//! points, and convex-order tools.

use serde::{Deserialize, Serialize};

use crate::bernoulli::BernoulliAtoms;
use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Pmf on `{0,…,d}` with exact rational masses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SumPmfJson", into = "SumPmfJson", bound = "")]
pub struct SumPmf<T: ExactScalar> {
    values: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct SumPmfJson {
    d: usize,
    values: Vec<String>,
}

impl<T: ExactScalar> TryFrom<SumPmfJson> for SumPmf<T> {
    type Error = Error;
    fn try_from(j: SumPmfJson) -> Result<Self> {
        if j.values.len() != j.d + 1 {
            return Err(Error::DimensionMismatch {
                expected: j.d + 1,
                got: j.values.len(),
            });
        }
        let v = j
            .values
            .iter()
            .map(|s| T::parse_canonical(s))
            .collect::<Result<Vec<_>>>()?;
        SumPmf::new(v)
    }
}

impl<T: ExactScalar> From<SumPmf<T>> for SumPmfJson {
    fn from(g: SumPmf<T>) -> Self {
        SumPmfJson {
            d: g.dim(),
            values: g.values.iter().map(T::to_canonical).collect(),
        }
    }
}

impl<T: ExactScalar> SumPmf<T> {
    /// `values[k] = Pr(S = k)` for `k = 0..=d`.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPmf("need at least d + 1 = 2 values".into()));
        }
        if let Some(k) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidPmf(format!("negative mass at {k}")));
        }
        let total = values.iter().fold(T::zero(), |a, b| a + b.clone());
        if total != T::one() {
            return Err(Error::InvalidPmf(format!("mass sums to {total}, not 1")));
        }
        Ok(Self { values })
    }

    /// Point mass at `k`.
    pub fn degenerate(d: usize, k: usize) -> Result<Self> {
        if k > d {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: d + 1,
            });
        }
        let mut v = vec![T::zero(); d + 1];
        v[k] = T::one();
        Self::new(v)
    }

    /// Binomial(d, p): the sum under independence.
    pub fn binomial(d: usize, p: &T) -> Result<Self> {
        check_args(d, p)?;
        let q = T::one() - p.clone();
        let pow = |x: &T, n: usize| (0..n).fold(T::one(), |a, _| a * x.clone());
        Self::new(
            (0..=d)
                .map(|k| crate::bernoulli::binomial::<T>(d, k) * pow(p, k) * pow(&q, d - k))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &T {
        &self.values[k]
    }

    pub fn mean(&self) -> T {
        self.values
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (k, v)| a + T::from_int(k as i64) * v.clone())
    }

    /// `E[(S - t)+]`.
    pub fn stop_loss(&self, t: usize) -> T {
        self.values
            .iter()
            .enumerate()
            .skip(t + 1)
            .fold(T::zero(), |a, (k, v)| {
                a + T::from_int((k - t) as i64) * v.clone()
            })
    }

    /// Convex combination `Σ w_i g_i` of pmfs with the same `d`.
    pub fn mixture(parts: &[(T, &SumPmf<T>)]) -> Result<Self> {
        let d = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1
            .dim();
        let mut v = vec![T::zero(); d + 1];
        for (w, g) in parts {
            if g.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: g.dim(),
                });
            }
            for (acc, x) in v.iter_mut().zip(&g.values) {
                *acc = acc.clone() + w.clone() * x.clone();
            }
        }
        Self::new(v)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(T::to_f64).collect()
    }
}

/// Extremal point of `D_d(dp)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtremalSumPoint<T: ExactScalar> {
    TwoPoint { k1: usize, k2: usize, w1: T, w2: T },
    Degenerate { k: usize },
}

impl<T: ExactScalar> ExtremalSumPoint<T> {
    pub fn pmf(&self, d: usize) -> SumPmf<T> {
        let mut v = vec![T::zero(); d + 1];
        match self {
            Self::TwoPoint { k1, k2, w1, w2 } => {
                v[*k1] = w1.clone();
                v[*k2] = w2.clone();
            }
            Self::Degenerate { k } => v[*k] = T::one(),
        }
        SumPmf::new(v).expect("extremal point is a pmf")
    }

    /// Support points with their weights.
    pub fn atoms(&self) -> Vec<(usize, T)> {
        match self {
            Self::TwoPoint { k1, k2, w1, w2 } => vec![(*k1, w1.clone()), (*k2, w2.clone())],
            Self::Degenerate { k } => vec![(*k, T::one())],
        }
    }

    /// Short label such as `(33,34)` or `(50)`.
    pub fn label(&self) -> String {
        match self {
            Self::TwoPoint { k1, k2, .. } => format!("({k1},{k2})"),
            Self::Degenerate { k } => format!("({k})"),
        }
    }
}

fn check_args<T: ExactScalar>(d: usize, p: &T) -> Result<T> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    if !(p.is_positive() && *p < T::one()) {
        return Err(Error::InvalidArgument(format!("p = {p} is not in (0, 1)")));
    }
    Ok(T::from_int(d as i64) * p.clone())
}

/// `(k1∨, k2∧, dp integral?)`: largest integer below `dp`, smallest above.
fn split<T: ExactScalar>(dp: &T) -> (usize, usize, bool) {
    let fl = dp.floor_int() as usize;
    if dp.is_integral() {
        (fl - 1, fl + 1, true)
    } else {
        (fl, fl + 1, false)
    }
}

/// All extremal points, ordered by `k1` then `k2`, degenerate point last.
pub fn extremal_points<T: ExactScalar>(d: usize, p: &T) -> Result<Vec<ExtremalSumPoint<T>>> {
    let dp = check_args(d, p)?;
    let (k1_max, k2_min, integral) = split(&dp);
    let mut out = Vec::with_capacity((k1_max + 1) * (d - k2_min + 1) + integral as usize);
    for k1 in 0..=k1_max {
        for k2 in k2_min..=d {
            let (a, b) = (T::from_int(k1 as i64), T::from_int(k2 as i64));
            let span = b.clone() - a.clone();
            out.push(ExtremalSumPoint::TwoPoint {
                k1,
                k2,
                w1: (b - dp.clone()) / span.clone(),
                w2: (dp.clone() - a) / span,
            });
        }
    }
    if integral {
        out.push(ExtremalSumPoint::Degenerate {
            k: dp.floor_int() as usize,
        });
    }
    Ok(out)
}

/// Number of extremal points, `(k1∨ + 1)(d - k2∧ + 1) + [dp ∈ ℤ]`.
pub fn count_extremal<T: ExactScalar>(d: usize, p: &T) -> Result<usize> {
    let dp = check_args(d, p)?;
    let (k1_max, k2_min, integral) = split(&dp);
    Ok((k1_max + 1) * (d - k2_min + 1) + integral as usize)
}

/// Convex-order minimum of `D_d(dp)`: mass on `⌊dp⌋, ⌈dp⌉` only.
pub fn min_convex<T: ExactScalar>(d: usize, p: &T) -> Result<SumPmf<T>> {
    let dp = check_args(d, p)?;
    let lo = dp.floor_int() as usize;
    if dp.is_integral() {
        return SumPmf::degenerate(d, lo);
    }
    let frac = dp - T::from_int(lo as i64);
    let mut v = vec![T::zero(); d + 1];
    v[lo] = T::one() - frac.clone();
    v[lo + 1] = frac;
    SumPmf::new(v)
}

/// Convex-order maximum of `D_d(dp)`: mass `1 - p` at 0 and `p` at `d`.
pub fn max_convex<T: ExactScalar>(d: usize, p: &T) -> Result<SumPmf<T>> {
    check_args(d, p)?;
    let mut v = vec![T::zero(); d + 1];
    v[0] = T::one() - p.clone();
    v[d] = p.clone();
    SumPmf::new(v)
}

/// `g ⪯_cx h` via equal means and pointwise stop-loss on `{0,…,d}`.
pub fn convex_order_leq<T: ExactScalar>(g: &SumPmf<T>, h: &SumPmf<T>) -> bool {
    if g.dim() != h.dim() || g.mean() != h.mean() {
        return false;
    }
    // stop-loss transforms by a single backward pass
    let d = g.dim();
    let (mut tail_g, mut tail_h) = (T::zero(), T::zero());
    let (mut sl_g, mut sl_h) = (T::zero(), T::zero());
    for t in (0..d).rev() {
        tail_g = tail_g + g.values[t + 1].clone();
        tail_h = tail_h + h.values[t + 1].clone();
        sl_g = sl_g + tail_g.clone();
        sl_h = sl_h + tail_h.clone();
        if sl_g > sl_h {
            return false;
        }
    }
    true
}

/// Sparse pmf uniform over `1/p` atoms, each a run of consecutive ones of
/// length `⌊dp⌋` or `⌈dp⌉`, the runs partitioning `{1,…,d}`.
///
/// Needs `1/p` to be an integer no larger than `d`; otherwise returns
/// [`Error::NoBlockConstruction`].
pub fn sigma_cx_smallest_blocks<T: ExactScalar>(d: usize, p: &T) -> Result<BernoulliAtoms<T>> {
    let dp = check_args(d, p)?;
    let inv = T::one() / p.clone();
    let none = || Error::NoBlockConstruction {
        d,
        p: p.to_canonical(),
    };
    if !inv.is_integral() {
        return Err(none());
    }
    let q = inv.floor_int() as usize;
    if q > d {
        return Err(none());
    }
    let short = dp.floor_int() as usize;
    let long_runs = d - q * short;
    // spread the longer runs evenly, centred
    let is_long =
        |i: usize| (2 * (i + 1) * long_runs + q) / (2 * q) > (2 * i * long_runs + q) / (2 * q);
    let w = T::one() / T::from_int(q as i64);
    let mut start = 0;
    let mut atoms = Vec::with_capacity(q);
    for i in 0..q {
        let len = short + is_long(i) as usize;
        let x = (0..d).map(|j| j >= start && j < start + len).collect();
        atoms.push((x, w.clone()));
        start += len;
    }
    debug_assert_eq!(start, d);
    BernoulliAtoms::new(d, atoms)
}

/// CSV rendering `k1,k2,w1,w2`; degenerate points have an empty `k2`.
pub fn extremal_csv<T: ExactScalar>(points: &[ExtremalSumPoint<T>]) -> String {
    let mut s = String::from("k1,k2,w1,w2\n");
    for pt in points {
        match pt {
            ExtremalSumPoint::TwoPoint { k1, k2, w1, w2 } => {
                s += &format!("{k1},{k2},{},{}\n", w1.to_canonical(), w2.to_canonical());
            }
            ExtremalSumPoint::Degenerate { k } => s += &format!("{k},,1/1,0/1\n"),
        }
    }
    s
}
