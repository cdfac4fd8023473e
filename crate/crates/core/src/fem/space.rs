use alloc::vec::Vec;

use super::shape::{inverse_map, jacobian_from_gradients, shape_gradients, shape_values, NEWTON_MAX_ITER, NEWTON_TOL};
use crate::geometry::{self, Point};
use crate::mesh::VolumeMesh;
use crate::spatial::SpatialIndex;
use crate::{Error, Result};

/// Reference coordinates within this distance outside `[0,1]^D` still count
/// as inside a cell.
const LOCATE_SLACK: f64 = 1e-10;

/// Q1 space: one degree of freedom per mesh vertex.
#[derive(Debug, Clone)]
pub struct FeSpace<'m, const D: usize> {
    mesh: &'m VolumeMesh<D>,
    boundary_mask: Vec<bool>,
    boundary_dofs: Vec<u32>,
    cell_index: SpatialIndex<D>,
}

impl<'m, const D: usize> FeSpace<'m, D> {
    pub fn new(mesh: &'m VolumeMesh<D>) -> Self {
        let boundary_mask = mesh.boundary_vertex_mask();
        let boundary_dofs = (0..mesh.n_vertices() as u32).filter(|&i| boundary_mask[i as usize]).collect();
        let boxes = (0..mesh.n_cells()).map(|c| mesh.cell_bbox(c)).collect();
        Self {
            mesh,
            boundary_mask,
            boundary_dofs,
            cell_index: SpatialIndex::from_boxes(boxes, None),
        }
    }

    pub fn mesh(&self) -> &'m VolumeMesh<D> {
        self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_vertices()
    }

    pub fn dof_coords(&self) -> &[Point<D>] {
        &self.mesh.vertices
    }

    pub fn boundary_dofs(&self) -> &[u32] {
        &self.boundary_dofs
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary_mask[dof]
    }

    pub fn cell_index(&self) -> &SpatialIndex<D> {
        &self.cell_index
    }

    /// Finds a cell containing `x` and the reference coordinates of `x` in
    /// it. The first candidate (by cell id) that accepts the point wins.
    pub fn locate(&self, x: &Point<D>) -> Result<(usize, [f64; D])> {
        let mut candidates = Vec::new();
        self.cell_index
            .query_box_into(&geometry::Aabb::point(*x).inflate(LOCATE_SLACK), &mut candidates);
        for c in candidates {
            let coords = self.mesh.cell_coords(c as usize);
            let Ok(xi) = inverse_map(&coords, x, NEWTON_TOL, NEWTON_MAX_ITER) else {
                continue;
            };
            if xi.iter().all(|v| (-LOCATE_SLACK..=1.0 + LOCATE_SLACK).contains(v)) {
                return Ok((c as usize, xi.map(|v| v.clamp(0.0, 1.0))));
            }
        }
        Err(Error::PointOutsideMesh(alloc::format!("{x:?}")))
    }
}

/// A discrete function `Σ c_i φ_i`.
#[derive(Debug, Clone)]
pub struct FeFunction<'s, 'm, const D: usize> {
    pub space: &'s FeSpace<'m, D>,
    pub coefficients: Vec<f64>,
}

impl<'s, 'm, const D: usize> FeFunction<'s, 'm, D> {
    pub fn new(space: &'s FeSpace<'m, D>, coefficients: Vec<f64>) -> Self {
        assert_eq!(coefficients.len(), space.n_dofs());
        Self { space, coefficients }
    }

    pub fn value_in_cell(&self, cell: usize, xi: &[f64; D]) -> f64 {
        let phi = shape_values(xi);
        self.space
            .mesh
            .cell(cell)
            .iter()
            .zip(phi)
            .map(|(&v, p)| p * self.coefficients[v as usize])
            .sum()
    }

    pub fn gradient_in_cell(&self, cell: usize, xi: &[f64; D]) -> Result<[f64; D]> {
        let coords = self.space.mesh.cell_coords(cell);
        let grads = shape_gradients(xi);
        let (inv, _) =
            geometry::inverse(&jacobian_from_gradients(&coords, &grads)).ok_or(Error::SingularJacobian(cell))?;
        let mut ref_grad = [0.0; D];
        for (&v, g) in self.space.mesh.cell(cell).iter().zip(&grads) {
            let c = self.coefficients[v as usize];
            for b in 0..D {
                ref_grad[b] += c * g[b];
            }
        }
        // ∇u = J^{-T} ∇_ξ u
        Ok(core::array::from_fn(|a| (0..D).map(|b| inv[b][a] * ref_grad[b]).sum()))
    }

    pub fn evaluate(&self, x: &Point<D>) -> Result<f64> {
        let (cell, xi) = self.space.locate(x)?;
        Ok(self.value_in_cell(cell, &xi))
    }

    pub fn evaluate_gradient(&self, x: &Point<D>) -> Result<[f64; D]> {
        let (cell, xi) = self.space.locate(x)?;
        self.gradient_in_cell(cell, &xi)
    }
}
