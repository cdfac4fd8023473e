//! Q1 finite elements on quads and hexes.

mod assembly;
mod shape;
mod space;
mod sparse;

pub use assembly::{
    apply_dirichlet, assemble_load, assemble_load_with, assemble_stiffness, assemble_stiffness_with, interpolate,
};
pub use shape::{inverse_map, jacobian, map_to_physical, shape_eval, shape_gradients, shape_values, NEWTON_MAX_ITER, NEWTON_TOL};
pub use space::{FeFunction, FeSpace};
pub use sparse::{solve_cg, solve_cg_from, CgOutcome, CsrMatrix, CG_REL_TOL};
