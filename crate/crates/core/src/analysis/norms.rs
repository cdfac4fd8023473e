use libm::sqrt;

use crate::exec::{CellMap, Serial};
use crate::fem::{jacobian, map_to_physical, FeFunction};
use crate::geometry::{self, Point};
use crate::quadrature::QuadratureRule;
use crate::Result;

use super::cases::TestCase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    /// Full `H¹` norm, `(‖e‖² + ‖∇e‖²)^{1/2}`.
    pub h1: f64,
}

/// Cellwise Gauss quadrature of `u_h - u` and `∇u_h - ∇u`.
pub fn error_norms<const D: usize>(
    fe: &FeFunction<'_, '_, D>,
    exact: impl Fn(&Point<D>) -> (f64, [f64; D]) + Sync + Send,
    quad_order: usize,
) -> Result<ErrorNorms> {
    error_norms_with(fe, exact, quad_order, &Serial)
}

pub fn error_norms_with<const D: usize, E: CellMap>(
    fe: &FeFunction<'_, '_, D>,
    exact: impl Fn(&Point<D>) -> (f64, [f64; D]) + Sync + Send,
    quad_order: usize,
    exec: &E,
) -> Result<ErrorNorms> {
    let mesh = fe.space.mesh();
    let rule = QuadratureRule::<D>::gauss(quad_order);
    let per_cell = exec.map(mesh.n_cells(), |c| -> Result<(f64, f64)> {
        let coords = mesh.cell_coords(c);
        let (mut l2, mut semi) = (0.0, 0.0);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = map_to_physical(&coords, p);
            let jxw = w * geometry::det(&jacobian(&coords, p)).abs();
            let (u, gu) = exact(&x);
            let e = fe.value_in_cell(c, p) - u;
            let g = fe.gradient_in_cell(c, p)?;
            l2 += jxw * e * e;
            semi += jxw * (0..D).map(|a| (g[a] - gu[a]) * (g[a] - gu[a])).sum::<f64>();
        }
        Ok((l2, semi))
    });
    let (mut l2, mut semi) = (0.0, 0.0);
    for r in per_cell {
        let (a, b) = r?;
        l2 += a;
        semi += b;
    }
    Ok(ErrorNorms {
        l2: sqrt(l2),
        h1: sqrt(l2 + semi),
    })
}

pub fn l2_error<const D: usize>(fe: &FeFunction<'_, '_, D>, case: &TestCase, quad_order: usize) -> Result<f64> {
    Ok(error_norms(fe, |x| case.exact(x), quad_order)?.l2)
}

pub fn h1_error<const D: usize>(fe: &FeFunction<'_, '_, D>, case: &TestCase, quad_order: usize) -> Result<f64> {
    Ok(error_norms(fe, |x| case.exact(x), quad_order)?.h1)
}
