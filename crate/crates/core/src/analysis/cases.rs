use core::f64::consts::PI;

use libm::{atan2, cos, log, pow, sin, sqrt};

use crate::geometry::Point;
use crate::mesh::{DomainCase, Sphere};

/// One of the three interface test problems: `-Δu = 0` off `Γ`, `[u] = 0`
/// and `[∂u/∂ν] = f` across `Γ = ∂B_radius(center)`, `u = g` on `∂Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestCase {
    pub kind: DomainCase,
    pub center: [f64; 3],
    pub radius: f64,
    /// Constant interface datum `f`.
    pub f: f64,
}

impl TestCase {
    pub fn new(kind: DomainCase) -> Self {
        match kind {
            DomainCase::Square => Self {
                kind,
                center: [0.3, 0.3, 0.0],
                radius: 0.2,
                f: 5.0, // 1/R
            },
            DomainCase::LShape => Self {
                kind,
                center: [-0.5, -0.5, 0.0],
                radius: 0.2,
                f: 1.5,
            },
            DomainCase::Cube => Self {
                kind,
                center: [0.3, 0.3, 0.3],
                radius: 0.2,
                f: 25.0, // 1/R²
            },
        }
    }

    pub fn sphere<const D: usize>(&self) -> Sphere<D> {
        Sphere {
            center: core::array::from_fn(|i| self.center[i]),
            radius: self.radius,
        }
    }

    fn offset<const D: usize>(&self, x: &Point<D>) -> ([f64; D], f64) {
        let d: [f64; D] = core::array::from_fn(|i| x[i] - self.center[i]);
        let r = sqrt(d.iter().map(|v| v * v).sum());
        (d, r)
    }

    /// `-ln max(|x - c|, R)`: fundamental-solution part shared by the 2D cases.
    fn log_part<const D: usize>(&self, x: &Point<D>) -> (f64, [f64; D]) {
        let (d, r) = self.offset(x);
        if r <= self.radius {
            (-log(self.radius), [0.0; D])
        } else {
            (-log(r), core::array::from_fn(|i| -d[i] / (r * r)))
        }
    }

    pub fn exact_u<const D: usize>(&self, x: &Point<D>) -> f64 {
        self.exact(x).0
    }

    pub fn exact_grad_u<const D: usize>(&self, x: &Point<D>) -> [f64; D] {
        self.exact(x).1
    }

    /// Dirichlet datum: the trace of the exact solution.
    pub fn boundary_g<const D: usize>(&self, x: &Point<D>) -> f64 {
        self.exact_u(x)
    }

    pub fn exact<const D: usize>(&self, x: &Point<D>) -> (f64, [f64; D]) {
        match self.kind {
            DomainCase::Square => self.log_part(x),
            DomainCase::LShape => {
                let (v, g) = self.log_part(x);
                let (s, sg) = corner_singularity(x[0], x[1]);
                (s + 0.3 * v, core::array::from_fn(|i| sg[i] + 0.3 * g[i]))
            }
            DomainCase::Cube => {
                let (d, r) = self.offset(x);
                if r <= self.radius {
                    (1.0 / self.radius, [0.0; D])
                } else {
                    (1.0 / r, core::array::from_fn(|i| -d[i] / (r * r * r)))
                }
            }
        }
    }
}

/// `r^{1/3} sin(θ/3)` with `θ ∈ [0, 2π)` measured counterclockwise from the
/// positive x-axis, and its gradient `r^{-2/3}/3 (-sin(2θ/3), cos(2θ/3))`.
fn corner_singularity(x: f64, y: f64) -> (f64, [f64; 2]) {
    let r = sqrt(x * x + y * y);
    if r == 0.0 {
        return (0.0, [0.0, 0.0]);
    }
    let mut theta = atan2(y, x);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    let value = pow(r, 1.0 / 3.0) * sin(theta / 3.0);
    let scale = pow(r, -2.0 / 3.0) / 3.0;
    (value, [-scale * sin(2.0 * theta / 3.0), scale * cos(2.0 * theta / 3.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_values() {
        let t = TestCase::new(DomainCase::Square);
        assert!((t.exact_u(&[0.4, 0.3]) - 1.6094379124341003).abs() < 1e-14);
        assert!((t.exact_u(&[0.7, 0.3]) - 0.916290731874155).abs() < 1e-14);
        assert_eq!(t.exact_grad_u(&[0.35, 0.3]), [0.0, 0.0]);
        // ∂u/∂r = -1/r outside: jump of the normal flux is 1/0.2 = f
        let g = t.exact_grad_u(&[0.5 + 1e-12, 0.3]);
        assert!((g[0] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn cube_values() {
        let t = TestCase::new(DomainCase::Cube);
        assert!((t.exact_u(&[0.7, 0.3, 0.3]) - 2.5).abs() < 1e-14);
        assert_eq!(t.exact_u(&[0.3, 0.35, 0.3]), 5.0);
        assert_eq!(t.f, 25.0);
    }

    #[test]
    fn corner_singularity_gradient_matches_finite_differences() {
        for (x, y) in [(0.3, 0.4), (-0.5, 0.2), (-0.3, -0.6), (0.1, 0.9), (-0.2, -0.01)] {
            let (_, g) = corner_singularity(x, y);
            let h = 1e-6;
            let dx = (corner_singularity(x + h, y).0 - corner_singularity(x - h, y).0) / (2.0 * h);
            let dy = (corner_singularity(x, y + h).0 - corner_singularity(x, y - h).0) / (2.0 * h);
            assert!((g[0] - dx).abs() < 1e-6 && (g[1] - dy).abs() < 1e-6, "({x},{y})");
        }
        // vanishes on the leg θ = 0
        assert_eq!(corner_singularity(0.5, 0.0).0, 0.0);
    }

    #[test]
    fn l_shape_combines_both_parts() {
        let t = TestCase::new(DomainCase::LShape);
        let x = [-0.5, 0.5];
        let r = 0.5f64.sqrt();
        let theta = 0.75 * PI;
        let expected = r.powf(1.0 / 3.0) * (theta / 3.0).sin() - 0.3 * 1.0f64.ln();
        assert!((t.exact_u(&x) - expected).abs() < 1e-14);
    }
}
