//! Multilinear Lagrange basis on `[0,1]^D` and the isoparametric map.

use libm::fabs;

use crate::geometry::{self, Point};
use crate::{Error, Result};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 20;

/// Values of the `2^D` shape functions; unused slots are zero.
#[inline]
pub fn shape_values<const D: usize>(xi: &[f64; D]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (i, o) in out.iter_mut().enumerate().take(1 << D) {
        let mut v = 1.0;
        for a in 0..D {
            v *= if (i >> a) & 1 == 1 { xi[a] } else { 1.0 - xi[a] };
        }
        *o = v;
    }
    out
}

/// Reference gradients of the `2^D` shape functions.
#[inline]
pub fn shape_gradients<const D: usize>(xi: &[f64; D]) -> [[f64; D]; 8] {
    let mut out = [[0.0; D]; 8];
    for (i, g) in out.iter_mut().enumerate().take(1 << D) {
        for (k, gk) in g.iter_mut().enumerate() {
            let mut v = 1.0;
            for a in 0..D {
                let bit = (i >> a) & 1 == 1;
                v *= match (a == k, bit) {
                    (true, true) => 1.0,
                    (true, false) => -1.0,
                    (false, true) => xi[a],
                    (false, false) => 1.0 - xi[a],
                };
            }
            *gk = v;
        }
    }
    out
}

pub fn shape_eval<const D: usize>(xi: &[f64; D]) -> ([f64; 8], [[f64; D]; 8]) {
    (shape_values(xi), shape_gradients(xi))
}

/// `x(ξ) = Σ v_i φ_i(ξ)`.
#[inline]
pub fn map_to_physical<const D: usize>(coords: &[Point<D>; 8], xi: &[f64; D]) -> Point<D> {
    let phi = shape_values(xi);
    let mut x = [0.0; D];
    for i in 0..(1 << D) {
        for a in 0..D {
            x[a] += phi[i] * coords[i][a];
        }
    }
    x
}

/// `J[a][b] = ∂x_a / ∂ξ_b`.
#[inline]
pub fn jacobian<const D: usize>(coords: &[Point<D>; 8], xi: &[f64; D]) -> [[f64; D]; D] {
    jacobian_from_gradients(coords, &shape_gradients(xi))
}

#[inline]
pub(crate) fn jacobian_from_gradients<const D: usize>(coords: &[Point<D>; 8], grads: &[[f64; D]; 8]) -> [[f64; D]; D] {
    let mut j = [[0.0; D]; D];
    for i in 0..(1 << D) {
        for a in 0..D {
            for b in 0..D {
                j[a][b] += coords[i][a] * grads[i][b];
            }
        }
    }
    j
}

/// Newton iteration for `x(ξ) = x`, starting at the cell center.
pub fn inverse_map<const D: usize>(coords: &[Point<D>; 8], x: &Point<D>, tol: f64, max_iter: usize) -> Result<[f64; D]> {
    let mut xi = [0.5; D];
    for _ in 0..max_iter {
        let r = geometry::sub(&map_to_physical(coords, &xi), x);
        if geometry::norm(&r) < tol {
            return Ok(xi);
        }
        let (inv, _) = geometry::inverse(&jacobian(coords, &xi)).ok_or(Error::InverseMapDiverged(max_iter))?;
        for a in 0..D {
            let step: f64 = (0..D).map(|b| inv[a][b] * r[b]).sum();
            xi[a] -= step;
        }
        if xi.iter().any(|v| !v.is_finite() || fabs(*v) > 1e6) {
            break;
        }
    }
    let r = geometry::sub(&map_to_physical(coords, &xi), x);
    if geometry::norm(&r) < tol {
        return Ok(xi);
    }
    Err(Error::InverseMapDiverged(max_iter))
}
