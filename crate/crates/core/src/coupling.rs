//! Interface right-hand sides.
//!
//! Two routes to `⟨F, φ_i⟩ = ∫_Γ f φ_i dσ`:
//!
//! * regularized: a double quadrature over volume cells and interface facets
//!   of `δ_ε(x - y) f^e(y) φ_i(x)`, with the interface quadrature points kept
//!   in a [`SpatialIndex`] so each cell only sees the points within `ε·r₀`;
//! * direct: each interface quadrature point is located in the volume mesh
//!   (Newton inverse map) and scatters `w f^e φ_i` at its own position.

use alloc::vec::Vec;

use crate::exec::{CellMap, Serial};
use crate::fem::{jacobian, map_to_physical, shape_values, FeSpace};
use crate::geometry::{self, Aabb, Point};
use crate::kernels::{Profile1D, ScaledDirac};
use crate::mesh::{closest_point_project, facet_area_element, SurfaceMesh};
use crate::quadrature::{gauss_on_interval, QuadratureRule};
use crate::spatial::SpatialIndex;
use crate::{Error, Result};

/// Gauss points per facet axis for the interface quadrature.
pub const SURFACE_QUAD_ORDER: usize = 4;
/// Gauss points per axis on volume cells for the regularized double quadrature.
pub const VOLUME_QUAD_ORDER: usize = 8;
/// Largest accepted volume quadrature order.
pub const MAX_VOL_ORDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceQuadPoint<const D: usize> {
    pub position: Point<D>,
    /// Quadrature weight times the facet measure element.
    pub weight: f64,
    /// `f^e(position) = f(p(position))`.
    pub f_value: f64,
}

/// Per-facet Gauss rule with `order` points per facet axis. The datum is
/// lifted through the closest-point projection onto the exact interface.
pub fn surface_quadrature<const D: usize>(
    s: &SurfaceMesh<D>,
    f: impl Fn(&Point<D>) -> f64,
    order: usize,
) -> Result<Vec<SurfaceQuadPoint<D>>> {
    if order == 0 {
        return Err(Error::InvalidConfig("surface quadrature order must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(s.n_facets() * order.pow(D as u32 - 1));
    let mut push = |position: Point<D>, weight: f64| -> Result<()> {
        let lifted = closest_point_project(&position, &s.sphere)?;
        out.push(SurfaceQuadPoint {
            position,
            weight,
            f_value: f(&lifted),
        });
        Ok(())
    };
    match D {
        2 => {
            let (ts, ws) = gauss_on_interval(order, 0.0, 1.0);
            for k in 0..s.n_facets() {
                let v = s.facet(k);
                let (a, b) = (s.vertices[v[0] as usize], s.vertices[v[1] as usize]);
                let len = geometry::dist(&a, &b);
                for (t, w) in ts.iter().zip(&ws) {
                    let x = core::array::from_fn(|i| a[i] + t * (b[i] - a[i]));
                    push(x, w * len)?;
                }
            }
        }
        3 => {
            let rule = QuadratureRule::<2>::gauss(order);
            for k in 0..s.n_facets() {
                let v = s.facet(k);
                let x: [Point<D>; 4] = core::array::from_fn(|i| s.vertices[v[i] as usize]);
                for (p, w) in rule.points.iter().zip(&rule.weights) {
                    let phi = shape_values(p);
                    let pos = core::array::from_fn(|a| (0..4).map(|i| phi[i] * x[i][a]).sum());
                    push(pos, w * facet_area_element(&x, p))?;
                }
            }
        }
        d => return Err(Error::UnsupportedDimension(d)),
    }
    Ok(out)
}

/// Knobs of the regularized assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedOptions {
    /// Gauss points per axis on each volume cell.
    pub vol_order: usize,
    /// Interface facet diameter `h₀`; inflates the neighbour search.
    pub facet_diameter: f64,
    /// Reject configurations where `δ_ε(· - q)` reaches `∂Ω` for some
    /// interface quadrature point `q`.
    pub check_support: bool,
    /// Evaluate `δ_ε(y - x)` instead of `δ_ε(x - y)`.
    pub swap_arguments: bool,
    /// Pair every cell with every interface point instead of querying the
    /// index. Only useful as a reference.
    pub brute_force: bool,
}

impl Default for RegularizedOptions {
    fn default() -> Self {
        Self {
            vol_order: VOLUME_QUAD_ORDER,
            facet_diameter: 0.0,
            check_support: true,
            swap_arguments: false,
            brute_force: false,
        }
    }
}

pub fn assemble_rhs_regularized<const D: usize>(
    space: &FeSpace<'_, D>,
    squad: &[SurfaceQuadPoint<D>],
    dirac: &ScaledDirac,
    vol_order: usize,
) -> Result<Vec<f64>> {
    let opts = RegularizedOptions {
        vol_order,
        ..Default::default()
    };
    assemble_rhs_regularized_with(space, squad, dirac, &opts, &Serial)
}

/// `rhs_i = Σ_cells Σ_{q₁} Σ_{q₂} w₁ w₂ δ_ε(q₁ - q₂) f^e(q₂) φ_i(q₁)`.
pub fn assemble_rhs_regularized_with<const D: usize, E: CellMap>(
    space: &FeSpace<'_, D>,
    squad: &[SurfaceQuadPoint<D>],
    dirac: &ScaledDirac,
    opts: &RegularizedOptions,
    exec: &E,
) -> Result<Vec<f64>> {
    if dirac.kernel().dim() != D {
        return Err(Error::DimensionMismatch {
            expected: D,
            got: dirac.kernel().dim(),
        });
    }
    if opts.vol_order == 0 || opts.vol_order > MAX_VOL_ORDER {
        return Err(Error::InvalidConfig(alloc::format!(
            "volume quadrature order must be in 1..={MAX_VOL_ORDER}, got {}",
            opts.vol_order
        )));
    }
    let reach = dirac.support_radius();
    if opts.check_support {
        check_support_inside(space, squad, reach)?;
    }
    let mesh = space.mesh();
    let nv = 1 << D;
    let positions: Vec<Point<D>> = squad.iter().map(|q| q.position).collect();
    let wf: Vec<f64> = squad.iter().map(|q| q.weight * q.f_value).collect();
    let index = SpatialIndex::from_points(&positions, Some(reach.max(opts.facet_diameter)));
    let rule = QuadratureRule::<D>::gauss(opts.vol_order);
    let phis: Vec<[f64; 8]> = rule.points.iter().map(shape_values).collect();
    let all: Vec<u32> = (0..squad.len() as u32).collect();
    let inflate = reach + opts.facet_diameter;
    let separable = dirac.separable();
    let (ts, ws) = gauss_on_interval(opts.vol_order, 0.0, 1.0);

    let locals = exec.map(mesh.n_cells(), |c| -> Option<[f64; 8]> {
        let owned;
        let ids: &[u32] = if opts.brute_force {
            &all
        } else {
            owned = index.query_box(&mesh.cell_bbox(c).inflate(inflate));
            &owned
        };
        if ids.is_empty() {
            return None;
        }
        let coords = mesh.cell_coords(c);
        if let (Some(kernel), Some((lo, hi))) = (separable, axis_aligned_box(&coords)) {
            return Some(separable_cell(kernel, &lo, &hi, &ts, &ws, ids, &positions, &wf, opts.swap_arguments));
        }
        let mut local = [0.0; 8];
        for ((p, w), phi) in rule.points.iter().zip(&rule.weights).zip(&phis) {
            let x = map_to_physical(&coords, p);
            let jxw = w * geometry::det(&jacobian(&coords, p)).abs();
            let mut s = 0.0;
            for &j in ids {
                let y = &positions[j as usize];
                let offset = if opts.swap_arguments { geometry::sub(y, &x) } else { geometry::sub(&x, y) };
                s += wf[j as usize] * dirac.value(&offset);
            }
            for i in 0..nv {
                local[i] += jxw * phi[i] * s;
            }
        }
        Some(local)
    });
    let mut rhs = alloc::vec![0.0; space.n_dofs()];
    for (c, local) in locals.into_iter().enumerate() {
        if let Some(local) = local {
            for (i, &v) in mesh.cell(c).iter().enumerate() {
                rhs[v as usize] += local[i];
            }
        }
    }
    Ok(rhs)
}

/// Corners `(lo, hi)` if the cell is an axis-aligned box in tensor order.
fn axis_aligned_box<const D: usize>(coords: &[Point<D>; 8]) -> Option<(Point<D>, Point<D>)> {
    let lo = coords[0];
    let hi = coords[(1 << D) - 1];
    let tol = 1e-12 * geometry::dist(&lo, &hi);
    for (i, x) in coords.iter().enumerate().take(1 << D) {
        for a in 0..D {
            let expected = if i >> a & 1 == 1 { hi[a] } else { lo[a] };
            if (x[a] - expected).abs() > tol {
                return None;
            }
        }
    }
    Some((lo, hi))
}

/// Same quadrature as the generic path, factored per axis: on a box both
/// `δ_ε(x - y)` and `φ_i(x)` are products of one-dimensional factors.
#[allow(clippy::too_many_arguments)]
fn separable_cell<const D: usize>(
    (profile, amplitude, inv_eps): (Profile1D, f64, f64),
    lo: &Point<D>,
    hi: &Point<D>,
    ts: &[f64],
    ws: &[f64],
    ids: &[u32],
    positions: &[Point<D>],
    wf: &[f64],
    swap: bool,
) -> [f64; 8] {
    let n = ts.len();
    let mut xs = [[0.0; MAX_VOL_ORDER]; D];
    // weights times the two 1D hat functions, per axis
    let mut lw = [[[0.0; MAX_VOL_ORDER]; 2]; D];
    let mut volume = 1.0;
    for a in 0..D {
        let len = hi[a] - lo[a];
        volume *= len;
        for k in 0..n {
            xs[a][k] = lo[a] + ts[k] * len;
            lw[a][0][k] = ws[k] * (1.0 - ts[k]);
            lw[a][1][k] = ws[k] * ts[k];
        }
    }
    let mut local = [0.0; 8];
    'points: for &j in ids {
        let y = &positions[j as usize];
        let mut factor = [[0.0; 2]; D];
        for a in 0..D {
            let (mut s0, mut s1) = (0.0, 0.0);
            for k in 0..n {
                let d = if swap { y[a] - xs[a][k] } else { xs[a][k] - y[a] };
                let p = profile.eval(d * inv_eps);
                s0 += lw[a][0][k] * p;
                s1 += lw[a][1][k] * p;
            }
            if s0 == 0.0 && s1 == 0.0 {
                continue 'points;
            }
            factor[a] = [s0, s1];
        }
        let scale = wf[j as usize] * amplitude * volume;
        for (i, l) in local.iter_mut().enumerate().take(1 << D) {
            let mut v = scale;
            for (a, f) in factor.iter().enumerate() {
                v *= f[i >> a & 1];
            }
            *l += v;
        }
    }
    local
}

fn check_support_inside<const D: usize>(space: &FeSpace<'_, D>, squad: &[SurfaceQuadPoint<D>], reach: f64) -> Result<()> {
    let mesh = space.mesh();
    let boxes = (0..mesh.n_boundary_facets())
        .map(|f| Aabb::from_points(mesh.facet(f).iter().map(|&v| &mesh.vertices[v as usize])))
        .collect();
    let index = SpatialIndex::from_boxes(boxes, None);
    let mut worst: Option<f64> = None;
    for q in squad {
        for f in index.query_ball(&q.position, reach) {
            let d = mesh.facet_distance(f as usize, &q.position);
            if d <= reach {
                worst = Some(worst.map_or(d, |w| w.min(d)));
            }
        }
    }
    match worst {
        Some(clearance) => Err(Error::SupportViolation {
            level: mesh.level,
            clearance,
            required: reach,
        }),
        None => Ok(()),
    }
}

/// `rhs_i = Σ_{q₂} w₂ f^e(q₂) φ_i(q₂)`.
pub fn assemble_rhs_direct<const D: usize>(space: &FeSpace<'_, D>, squad: &[SurfaceQuadPoint<D>]) -> Result<Vec<f64>> {
    assemble_rhs_direct_with(space, squad, &Serial)
}

pub fn assemble_rhs_direct_with<const D: usize, E: CellMap>(
    space: &FeSpace<'_, D>,
    squad: &[SurfaceQuadPoint<D>],
    exec: &E,
) -> Result<Vec<f64>> {
    let located = exec.map(squad.len(), |k| space.locate(&squad[k].position));
    let mesh = space.mesh();
    let mut rhs = alloc::vec![0.0; space.n_dofs()];
    for (q, loc) in squad.iter().zip(located) {
        let (cell, xi) = loc?;
        let phi = shape_values(&xi);
        let wf = q.weight * q.f_value;
        for (i, &v) in mesh.cell(cell).iter().enumerate() {
            rhs[v as usize] += wf * phi[i];
        }
    }
    Ok(rhs)
}

/// `max_i |rhs^ε_i - rhs_i|` for each `ε`, regularized against direct.
pub fn rhs_consistency_gap<const D: usize>(
    space: &FeSpace<'_, D>,
    squad: &[SurfaceQuadPoint<D>],
    kernel: &crate::kernels::MollifierKernel,
    eps_list: &[f64],
    opts: &RegularizedOptions,
) -> Result<Vec<f64>> {
    let direct = assemble_rhs_direct(space, squad)?;
    eps_list
        .iter()
        .map(|&eps| {
            let dirac = ScaledDirac::new(*kernel, eps)?;
            let reg = assemble_rhs_regularized_with(space, squad, &dirac, opts, &Serial)?;
            Ok(reg.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect()
}
