//! Exact vertex enumeration of `B_d(p)` for small `d` and convex
//! decomposition over a vertex set.
//!
//! Constraints are the `d` margin equalities plus normalization, rank
//! `d + 1`, so every vertex has at most `d + 1` atoms. Each candidate support
//! is solved exactly; a strictly positive unique solution is a vertex.

use rayon::prelude::*;

use crate::bernoulli::{BernoulliPmf, MarginVector};
use crate::error::{Error, Result};
use crate::linalg::{feasible_nonneg, solve_unique};
use crate::scalar::ExactScalar;

/// Default largest `d` accepted by [`enumerate_vertices`].
pub const VERTEX_CAP: usize = 5;

#[derive(Debug, Clone)]
pub struct PolytopeSpec<T: ExactScalar> {
    pub p: MarginVector<T>,
    pub cap: usize,
}

impl<T: ExactScalar> PolytopeSpec<T> {
    pub fn new(p: MarginVector<T>) -> Self {
        Self { p, cap: VERTEX_CAP }
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// Rows of `[margins; normalization]` restricted to `support`, with rhs.
    fn system(&self, support: &[usize]) -> (Vec<Vec<T>>, Vec<T>) {
        let d = self.dim();
        let mut a = Vec::with_capacity(d + 1);
        let mut b = Vec::with_capacity(d + 1);
        for j in 0..d {
            a.push(
                support
                    .iter()
                    .map(|&i| if i >> j & 1 == 1 { T::one() } else { T::zero() })
                    .collect(),
            );
            b.push(self.p.get(j).clone());
        }
        a.push(vec![T::one(); support.len()]);
        b.push(T::one());
        (a, b)
    }
}

/// Visit every `k`-subset of `{start..n}` extending `prefix`.
fn for_each_subset(
    n: usize,
    k: usize,
    start: usize,
    prefix: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if prefix.len() == k {
        f(prefix);
        return;
    }
    let need = k - prefix.len();
    for i in start..=n - need {
        prefix.push(i);
        for_each_subset(n, k, i + 1, prefix, f);
        prefix.pop();
    }
}

/// All vertices of `B_d(p)`, sorted lexicographically on their value vectors.
pub fn enumerate_vertices<T: ExactScalar>(spec: &PolytopeSpec<T>) -> Result<Vec<BernoulliPmf<T>>> {
    let d = spec.dim();
    if d > spec.cap {
        return Err(Error::CombinatorialBlowup { d, cap: spec.cap });
    }
    let n = 1usize << d;
    let mut found: Vec<Vec<T>> = (1..=(d + 1).min(n))
        .into_par_iter()
        .flat_map_iter(|k| (0..=n - k).map(move |first| (k, first)))
        .flat_map_iter(|(k, first)| {
            let mut local = Vec::new();
            let mut prefix = vec![first];
            for_each_subset(n, k, first + 1, &mut prefix, &mut |support| {
                let (a, b) = spec.system(support);
                if let Some(x) = solve_unique(&a, &b) {
                    if x.iter().all(|v| v.is_positive()) {
                        let mut values = vec![T::zero(); n];
                        for (&i, v) in support.iter().zip(x) {
                            values[i] = v;
                        }
                        local.push(values);
                    }
                }
            });
            local
        })
        .collect();
    found.sort();
    found.dedup();
    found.into_iter().map(|v| BernoulliPmf::new(d, v)).collect()
}

/// Weights `λ >= 0`, `Σ λ = 1`, with `f = Σ λ_k r_k`.
pub fn decompose<T: ExactScalar>(
    f: &BernoulliPmf<T>,
    vertices: &[BernoulliPmf<T>],
) -> Result<Vec<T>> {
    let n = f.values().len();
    if let Some(v) = vertices.iter().find(|v| v.values().len() != n) {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: v.dim(),
        });
    }
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| vertices.iter().map(|v| v.value(i).clone()).collect())
        .collect();
    a.push(vec![T::one(); vertices.len()]);
    let mut b = f.values().to_vec();
    b.push(T::one());
    feasible_nonneg(&a, &b).ok_or(Error::NotInPolytope)
}

/// True iff no vertex lies in the convex hull of the others.
pub fn is_minimal<T: ExactScalar>(vertices: &[BernoulliPmf<T>]) -> bool {
    (0..vertices.len()).into_par_iter().all(|k| {
        let others: Vec<_> = vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, v)| v.clone())
            .collect();
        others.is_empty() || decompose(&vertices[k], &others).is_err()
    })
}
