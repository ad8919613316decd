//! Power-of-two FFT helpers for convolving pmfs.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Forward and inverse transforms of one fixed length.
pub struct FftGrid<F: Real> {
    n: usize,
    fwd: Arc<dyn Fft<F>>,
    inv: Arc<dyn Fft<F>>,
}

impl<F: Real> FftGrid<F> {
    /// Grid of length `next_power_of_two(min_len)`.
    pub fn new(min_len: usize) -> Self {
        let n = min_len.max(1).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, x: &[F]) -> Vec<Complex<F>> {
        assert!(x.len() <= self.n, "input longer than the FFT grid");
        let mut buf: Vec<Complex<F>> = x.iter().map(|&v| Complex::new(v, F::zero())).collect();
        buf.resize(self.n, Complex::new(F::zero(), F::zero()));
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform, scaled, real part only.
    pub fn inverse(&self, mut spec: Vec<Complex<F>>) -> Vec<F> {
        self.inv.process(&mut spec);
        let scale = F::one() / F::lit(self.n as f64);
        spec.into_iter().map(|c| c.re * scale).collect()
    }
}

/// Elementwise product of spectra.
pub fn mul_assign<F: Real>(acc: &mut [Complex<F>], other: &[Complex<F>]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a = *a * *b;
    }
}

/// Truncate to `len`, zero the negative round-off and renormalize.
pub fn clean_pmf<F: Real>(mut v: Vec<F>, len: usize) -> Vec<F> {
    v.truncate(len);
    for x in v.iter_mut() {
        if *x < F::zero() {
            *x = F::zero();
        }
    }
    let total: F = v.iter().copied().sum();
    if total > F::zero() {
        for x in v.iter_mut() {
            *x = *x / total;
        }
    }
    v
}

/// Linear convolution of two sequences.
pub fn convolve<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let grid = FftGrid::new(len);
    let mut fa = grid.forward(a);
    mul_assign(&mut fa, &grid.forward(b));
    let mut out = grid.inverse(fa);
    out.truncate(len);
    out
}
