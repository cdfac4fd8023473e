use alloc::vec::Vec;

use super::shape::{jacobian_from_gradients, map_to_physical, shape_gradients, shape_values};
use super::space::FeSpace;
use super::sparse::CsrMatrix;
use crate::exec::{CellMap, Serial};
use crate::geometry::{self, Point};
use crate::quadrature::QuadratureRule;
use crate::{Error, Result};

/// Dirichlet-form stiffness `A_ij = ∫ ∇φ_i·∇φ_j` over all cells.
pub fn assemble_stiffness<const D: usize>(space: &FeSpace<'_, D>, quad: &QuadratureRule<D>) -> Result<CsrMatrix> {
    assemble_stiffness_with(space, quad, &Serial)
}

pub fn assemble_stiffness_with<const D: usize, E: CellMap>(
    space: &FeSpace<'_, D>,
    quad: &QuadratureRule<D>,
    exec: &E,
) -> Result<CsrMatrix> {
    let mesh = space.mesh();
    let nv = 1 << D;
    let ref_grads: Vec<[[f64; D]; 8]> = quad.points.iter().map(shape_gradients).collect();
    let locals = exec.map(mesh.n_cells(), |c| -> Result<[f64; 64]> {
        let coords = mesh.cell_coords(c);
        let mut local = [0.0; 64];
        for (g, w) in ref_grads.iter().zip(&quad.weights) {
            let (inv, det) = geometry::inverse(&jacobian_from_gradients(&coords, g)).ok_or(Error::SingularJacobian(c))?;
            let jxw = w * det.abs();
            let mut phys = [[0.0; D]; 8];
            for i in 0..nv {
                for a in 0..D {
                    phys[i][a] = (0..D).map(|b| inv[b][a] * g[i][b]).sum();
                }
            }
            for i in 0..nv {
                for j in 0..nv {
                    local[i * nv + j] += jxw * geometry::dot(&phys[i], &phys[j]);
                }
            }
        }
        Ok(local)
    });
    let mut a = CsrMatrix::from_cells(mesh.n_vertices(), &mesh.cells, nv);
    for (c, local) in locals.into_iter().enumerate() {
        let local = local?;
        let cell = mesh.cell(c);
        for i in 0..nv {
            for j in 0..nv {
                a.add(cell[i] as usize, cell[j] as usize, local[i * nv + j]);
            }
        }
    }
    Ok(a)
}

/// Volume load vector `b_i = ∫ f φ_i`.
pub fn assemble_load<const D: usize, F>(space: &FeSpace<'_, D>, f: F, quad: &QuadratureRule<D>) -> Result<Vec<f64>>
where
    F: Fn(&Point<D>) -> f64 + Sync + Send,
{
    assemble_load_with(space, f, quad, &Serial)
}

pub fn assemble_load_with<const D: usize, F, E>(
    space: &FeSpace<'_, D>,
    f: F,
    quad: &QuadratureRule<D>,
    exec: &E,
) -> Result<Vec<f64>>
where
    F: Fn(&Point<D>) -> f64 + Sync + Send,
    E: CellMap,
{
    let mesh = space.mesh();
    let nv = 1 << D;
    let locals = exec.map(mesh.n_cells(), |c| -> Result<[f64; 8]> {
        let coords = mesh.cell_coords(c);
        let mut local = [0.0; 8];
        for (p, w) in quad.points.iter().zip(&quad.weights) {
            let det = geometry::det(&jacobian_from_gradients(&coords, &shape_gradients(p)));
            if det == 0.0 {
                return Err(Error::SingularJacobian(c));
            }
            let fx = f(&map_to_physical(&coords, p)) * w * det.abs();
            let phi = shape_values(p);
            for i in 0..nv {
                local[i] += fx * phi[i];
            }
        }
        Ok(local)
    });
    let mut b = alloc::vec![0.0; mesh.n_vertices()];
    for (c, local) in locals.into_iter().enumerate() {
        let local = local?;
        for (i, &v) in mesh.cell(c).iter().enumerate() {
            b[v as usize] += local[i];
        }
    }
    Ok(b)
}

/// Nodal interpolant of `f`.
pub fn interpolate<const D: usize>(space: &FeSpace<'_, D>, f: impl Fn(&Point<D>) -> f64) -> Vec<f64> {
    space.dof_coords().iter().map(f).collect()
}

/// Symmetric elimination of the boundary DoFs: `x_b = g(x_b)` is moved to the
/// right-hand side of the interior rows, and boundary rows and columns are
/// replaced by identity.
pub fn apply_dirichlet<const D: usize>(
    space: &FeSpace<'_, D>,
    a: &mut CsrMatrix,
    rhs: &mut [f64],
    g: impl Fn(&Point<D>) -> f64,
) {
    let n = space.n_dofs();
    let mut gb = alloc::vec![0.0; n];
    for &b in space.boundary_dofs() {
        gb[b as usize] = g(&space.dof_coords()[b as usize]);
    }
    for i in 0..n {
        let (s, e) = (a.row_offsets[i], a.row_offsets[i + 1]);
        if space.is_boundary(i) {
            for k in s..e {
                a.values[k] = if a.col_indices[k] as usize == i { 1.0 } else { 0.0 };
            }
            rhs[i] = gb[i];
            continue;
        }
        for k in s..e {
            let j = a.col_indices[k] as usize;
            if space.is_boundary(j) {
                rhs[i] -= a.values[k] * gb[j];
                a.values[k] = 0.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_volume, DomainCase};

    #[test]
    fn square_stiffness_stencil() {
        let mesh = build_volume::<2>(DomainCase::Square, 0).unwrap();
        let space = FeSpace::new(&mesh);
        let a = assemble_stiffness(&space, &QuadratureRule::gauss(2)).unwrap();
        assert!(a.symmetry_error() < 1e-15);
        for i in 0..space.n_dofs() {
            let (_, vals) = a.row(i);
            assert!(vals.iter().sum::<f64>().abs() < 1e-14);
            if !space.is_boundary(i) {
                assert!((a.get(i, i) - 8.0 / 3.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_load_sums_to_area() {
        let mesh = build_volume::<2>(DomainCase::LShape, 0).unwrap();
        let space = FeSpace::new(&mesh);
        let b = assemble_load(&space, |_| 1.0, &QuadratureRule::gauss(2)).unwrap();
        assert!((b.iter().sum::<f64>() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn dirichlet_elimination_keeps_symmetry() {
        let mesh = build_volume::<2>(DomainCase::Square, 0).unwrap();
        let space = FeSpace::new(&mesh);
        let mut a = assemble_stiffness(&space, &QuadratureRule::gauss(2)).unwrap();
        let mut rhs = alloc::vec![0.0; space.n_dofs()];
        apply_dirichlet(&space, &mut a, &mut rhs, |x| x[0] + 2.0 * x[1]);
        assert_eq!(a.symmetry_error(), 0.0);
        for &b in space.boundary_dofs() {
            let x = space.dof_coords()[b as usize];
            assert_eq!(rhs[b as usize], x[0] + 2.0 * x[1]);
            assert_eq!(a.get(b as usize, b as usize), 1.0);
        }
    }
}
