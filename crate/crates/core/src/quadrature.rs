//! Gauss–Legendre rules and the reference-cell tensor rules built from them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, fabs};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss rule needs at least one point");
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if fabs(dx) < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule mapped to `[a, b]`.
pub fn gauss_on_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|w| w * half).collect(),
    )
}

/// Composite Gauss integration of `f` on `[a, b]`, doubling the panel count
/// until two successive estimates agree to `tol` (absolute or relative).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const POINTS: usize = 20;
    let (x, w) = gauss_legendre(POINTS);
    let composite = |panels: usize| -> f64 {
        let width = (b - a) / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            for (xi, wi) in x.iter().zip(&w) {
                sum += wi * f(mid + 0.5 * width * xi);
            }
        }
        sum * 0.5 * width
    };
    let mut panels = 1;
    let mut prev = composite(panels);
    loop {
        panels *= 2;
        let next = composite(panels);
        let diff = fabs(next - prev);
        if diff <= tol || diff <= tol * fabs(next) || panels >= 1 << 14 {
            return next;
        }
        prev = next;
    }
}

/// Tensor-product Gauss rule on the reference cell `[0, 1]^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
}

impl<const D: usize> QuadratureRule<D> {
    /// `n` Gauss points per axis; exact for polynomials of degree `2n - 1` in
    /// each variable.
    pub fn gauss(n: usize) -> Self {
        let (x, w) = gauss_on_interval(n, 0.0, 1.0);
        let total = n.pow(D as u32);
        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut p = [0.0; D];
            let mut wt = 1.0;
            let mut rem = flat;
            for axis in 0..D {
                let i = rem % n;
                rem /= n;
                p[axis] = x[i];
                wt *= w[i];
            }
            points.push(p);
            weights.push(wt);
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
