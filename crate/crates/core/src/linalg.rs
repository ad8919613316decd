//! Exact linear algebra over an ordered field: Gauss-Jordan elimination and
//! a phase-one simplex for feasibility problems `A x = b, x >= 0`.

use crate::scalar::ExactScalar;

/// Row-reduce `[a | b]` in place and return the pivot column of each
/// nonzero row.
fn gauss_jordan<T: ExactScalar>(rows: &mut [Vec<T>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, tail) = tail.split_first_mut().expect("row r exists");
        for row in head.iter_mut().chain(tail.iter_mut()) {
            let f = row[c].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix given as rows.
pub fn rank<T: ExactScalar>(a: &[Vec<T>]) -> usize {
    let ncols = a.first().map_or(0, Vec::len);
    let mut rows = a.to_vec();
    gauss_jordan(&mut rows, ncols).len()
}

/// Solve `a x = b` when the solution exists and is unique.
///
/// `a` is `m x n` with any `m`; returns `None` if the system is inconsistent
/// or underdetermined.
pub fn solve_unique<T: ExactScalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.len(), b.len());
    let n = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = gauss_jordan(&mut rows, n);
    if pivots.len() < n {
        return None;
    }
    // rows below the pivots must have a zero right-hand side
    if rows[pivots.len()..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some(rows[..n].iter().map(|r| r[n].clone()).collect())
}

/// Find some `x >= 0` with `a x = b` by phase-one simplex with Bland's rule.
///
/// Returns `None` when the system is infeasible. Exact arithmetic, so no
/// tolerances and no cycling.
pub fn feasible_nonneg<T: ExactScalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let m = a.len();
    assert_eq!(m, b.len());
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;

    // tableau rows: [A | I | b] with b >= 0
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let neg = bi.is_negative();
        let mut t = Vec::with_capacity(width);
        t.extend(row.iter().map(|v| if neg { -v.clone() } else { v.clone() }));
        t.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        t.push(if neg { -bi.clone() } else { bi.clone() });
        tab.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![T::zero(); width];
    for row in &tab {
        for j in 0..n {
            cost[j] = cost[j].clone() - row[j].clone();
        }
        cost[width - 1] = cost[width - 1].clone() - row[width - 1].clone();
    }

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let coef = &tab[i][enter];
            if !coef.is_positive() {
                continue;
            }
            let ratio = tab[i][width - 1].clone() / coef.clone();
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // phase one is bounded below by zero, so an entering column always has a leaving row
        let (li, _) = leave?;
        let inv = T::one() / tab[li][enter].clone();
        for v in tab[li].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = tab[li].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == li {
                continue;
            }
            let f = row[enter].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        let f = cost[enter].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        basis[li] = enter;
    }

    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab[i][width - 1].clone();
        }
    }
    Some(x)
}
