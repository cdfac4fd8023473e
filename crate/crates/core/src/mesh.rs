//! Volume meshes of the three test domains and the interface meshes.
//!
//! Cells are tensor-ordered: local vertex `i` of a quad or hex sits at the
//! reference corner whose coordinate along axis `a` is bit `a` of `i`. The
//! same convention is used for boundary facets and interface quads.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use libm::{cos, sin, sqrt};

use crate::geometry::{self, Aabb, Point};
use crate::quadrature::QuadratureRule;
use crate::spatial::SpatialIndex;
use crate::{Error, Result};

/// Base subdivisions per unit length at level 0 for the 2D domains.
pub const BASE_CELLS_2D: usize = 8;
/// Base subdivisions of the unit cube at level 0.
pub const BASE_CELLS_3D: usize = 4;
/// Segments of the level-0 interface polygon.
pub const BASE_SEGMENTS_2D: usize = 32;
/// Subdivisions per cube-face edge of the level-0 interface quadrangulation.
pub const BASE_FACE_CELLS_3D: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainCase {
    /// `(0,1)²`
    Square,
    /// `(-1,1)² \ [0,1]×[-1,0]`
    LShape,
    /// `(0,1)³`
    Cube,
}

impl DomainCase {
    pub const ALL: [DomainCase; 3] = [DomainCase::Square, DomainCase::LShape, DomainCase::Cube];

    pub fn dim(self) -> usize {
        match self {
            DomainCase::Square | DomainCase::LShape => 2,
            DomainCase::Cube => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DomainCase::Square => "square",
            DomainCase::LShape => "lshape",
            DomainCase::Cube => "cube",
        }
    }
}

impl fmt::Display for DomainCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DomainCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown case '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeMesh<const D: usize> {
    pub vertices: Vec<Point<D>>,
    /// Flat connectivity, `2^D` vertex ids per cell.
    pub cells: Vec<u32>,
    /// Flat connectivity, `2^(D-1)` vertex ids per facet.
    pub boundary_facets: Vec<u32>,
    pub level: u32,
    /// Largest cell diameter.
    pub h: f64,
}

impl<const D: usize> VolumeMesh<D> {
    pub const VERTS_PER_CELL: usize = 1 << D;
    pub const VERTS_PER_FACET: usize = 1 << (D - 1);

    pub fn n_cells(&self) -> usize {
        self.cells.len() / Self::VERTS_PER_CELL
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_boundary_facets(&self) -> usize {
        self.boundary_facets.len() / Self::VERTS_PER_FACET
    }

    #[inline]
    pub fn cell(&self, c: usize) -> &[u32] {
        let n = Self::VERTS_PER_CELL;
        &self.cells[c * n..(c + 1) * n]
    }

    pub fn facet(&self, f: usize) -> &[u32] {
        let n = Self::VERTS_PER_FACET;
        &self.boundary_facets[f * n..(f + 1) * n]
    }

    /// Vertex coordinates of cell `c`, in local order (unused slots zero).
    #[inline]
    pub fn cell_coords(&self, c: usize) -> [Point<D>; 8] {
        let mut out = [[0.0; D]; 8];
        for (o, &v) in out.iter_mut().zip(self.cell(c)) {
            *o = self.vertices[v as usize];
        }
        out
    }

    pub fn cell_bbox(&self, c: usize) -> Aabb<D> {
        Aabb::from_points(self.cell(c).iter().map(|&v| &self.vertices[v as usize]))
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        diameter(self.cell(c).iter().map(|&v| self.vertices[v as usize]))
    }

    pub fn min_cell_diameter(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_diameter(c)).fold(f64::INFINITY, f64::min)
    }

    /// Flags vertices lying on a boundary facet.
    pub fn boundary_vertex_mask(&self) -> Vec<bool> {
        let mut mask = alloc::vec![false; self.vertices.len()];
        for &v in &self.boundary_facets {
            mask[v as usize] = true;
        }
        mask
    }

    /// Distance from `p` to boundary facet `f`.
    pub fn facet_distance(&self, f: usize, p: &Point<D>) -> f64 {
        let v = self.facet(f);
        let x = |i: usize| self.vertices[v[i] as usize];
        match D {
            2 => geometry::point_segment_distance(p, &x(0), &x(1)),
            3 => {
                let lift = |q: Point<D>| -> Point<3> { core::array::from_fn(|i| q[i]) };
                let (p, a, b, c, d) = (lift(*p), lift(x(0)), lift(x(1)), lift(x(2)), lift(x(3)));
                // tensor order: 0-1-3-2 walks the quad boundary
                geometry::point_triangle_distance(&p, &a, &b, &d).min(geometry::point_triangle_distance(&p, &a, &d, &c))
            }
            _ => unreachable!(),
        }
    }
}

fn diameter<const D: usize>(pts: impl Iterator<Item = Point<D>> + Clone) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in pts.clone().enumerate() {
        for b in pts.clone().skip(i + 1) {
            best = best.max(geometry::dist(&a, &b));
        }
    }
    best
}

fn max_diameter<const D: usize>(vertices: &[Point<D>], conn: &[u32], stride: usize) -> f64 {
    conn.chunks_exact(stride)
        .map(|c| diameter(c.iter().map(|&v| vertices[v as usize])))
        .fold(0.0, f64::max)
}

/// Local vertex ids of facet (`axis`, `side`) of a tensor cell, in tensor
/// order over the remaining axes.
fn facet_local<const D: usize>(axis: usize, side: usize) -> Vec<usize> {
    (0..(1usize << D)).filter(|i| (i >> axis) & 1 == side).collect()
}

/// Facets belonging to exactly one cell.
fn boundary_facets<const D: usize>(cells: &[u32]) -> Vec<u32> {
    let nv = 1 << D;
    let nf = 1 << (D - 1);
    let locals: Vec<Vec<usize>> = (0..D).flat_map(|a| [facet_local::<D>(a, 0), facet_local::<D>(a, 1)]).collect();
    let mut all: Vec<([u32; 4], [u32; 4])> = Vec::with_capacity(cells.len() / nv * 2 * D);
    for cell in cells.chunks_exact(nv) {
        for loc in &locals {
            let mut ordered = [u32::MAX; 4];
            for (k, &l) in loc.iter().enumerate() {
                ordered[k] = cell[l];
            }
            let mut key = ordered;
            key[..nf].sort_unstable();
            all.push((key, ordered));
        }
    }
    all.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        if j - i == 1 {
            out.extend_from_slice(&all[i].1[..nf]);
        }
        i = j;
    }
    out
}

/// Structured grid with `counts[a]` cells of width `spacing` along axis `a`,
/// keeping the cells accepted by `keep`.
fn structured<const D: usize>(
    origin: Point<D>,
    spacing: f64,
    counts: [usize; D],
    level: u32,
    keep: impl Fn(&[usize; D]) -> bool,
) -> VolumeMesh<D> {
    let vcounts: [usize; D] = core::array::from_fn(|a| counts[a] + 1);
    let lattice = |idx: &[usize; D], dims: &[usize; D]| -> usize {
        let mut flat = 0;
        for a in (0..D).rev() {
            flat = flat * dims[a] + idx[a];
        }
        flat
    };
    let unflatten = |mut flat: usize, dims: &[usize; D]| -> [usize; D] {
        core::array::from_fn(|a| {
            let i = flat % dims[a];
            flat /= dims[a];
            i
        })
    };
    let n_cells: usize = counts.iter().product();
    let n_lattice: usize = vcounts.iter().product();
    let kept: Vec<[usize; D]> = (0..n_cells).map(|c| unflatten(c, &counts)).filter(|c| keep(c)).collect();
    let mut used = alloc::vec![false; n_lattice];
    for c in &kept {
        for corner in 0..(1usize << D) {
            let v: [usize; D] = core::array::from_fn(|a| c[a] + ((corner >> a) & 1));
            used[lattice(&v, &vcounts)] = true;
        }
    }
    let mut id = alloc::vec![u32::MAX; n_lattice];
    let mut vertices = Vec::new();
    for (flat, u) in used.iter().enumerate() {
        if *u {
            id[flat] = vertices.len() as u32;
            let idx = unflatten(flat, &vcounts);
            vertices.push(core::array::from_fn(|a| origin[a] + spacing * idx[a] as f64));
        }
    }
    let mut cells = Vec::with_capacity(kept.len() << D);
    for c in &kept {
        for corner in 0..(1usize << D) {
            let v: [usize; D] = core::array::from_fn(|a| c[a] + ((corner >> a) & 1));
            cells.push(id[lattice(&v, &vcounts)]);
        }
    }
    let boundary_facets = boundary_facets::<D>(&cells);
    let h = max_diameter(&vertices, &cells, 1 << D);
    VolumeMesh {
        vertices,
        cells,
        boundary_facets,
        level,
        h,
    }
}

/// Builds the structured mesh of `case` at `level`; `D` must match the
/// case dimension.
pub fn build_volume<const D: usize>(case: DomainCase, level: u32) -> Result<VolumeMesh<D>> {
    if case.dim() != D {
        return Err(Error::DimensionMismatch {
            expected: case.dim(),
            got: D,
        });
    }
    let mesh = match case {
        DomainCase::Square => {
            let n = BASE_CELLS_2D << level;
            structured([0.0; D], 1.0 / n as f64, [n; D], level, |_| true)
        }
        DomainCase::Cube => {
            let n = BASE_CELLS_3D << level;
            structured([0.0; D], 1.0 / n as f64, [n; D], level, |_| true)
        }
        DomainCase::LShape => {
            // three unit blocks of a 2n x 2n grid on (-1,1)², dropping [0,1]x[-1,0]
            let n = BASE_CELLS_2D << level;
            structured([-1.0; D], 1.0 / n as f64, [2 * n; D], level, |c| !(c[0] >= n && c[1] < n))
        }
    };
    Ok(mesh)
}

/// Splits every cell into `2^D` congruent children. New vertices sit at edge,
/// face and cell centroids of the parent.
pub fn refine_global<const D: usize>(m: &VolumeMesh<D>) -> VolumeMesh<D> {
    let nv = 1usize << D;
    let mut vertices = m.vertices.clone();
    let mut nodes: BTreeMap<[u32; 8], u32> = BTreeMap::new();
    let mut cells = Vec::with_capacity(m.cells.len() << D);
    let grid = pow3(D);
    for cell in m.cells.chunks_exact(nv) {
        // ids of the 3^D sub-lattice nodes of this cell
        let mut local = [0u32; 27];
        for (flat, slot) in local.iter_mut().enumerate().take(grid) {
            let pos: [usize; D] = core::array::from_fn(|a| (flat / pow3(a)) % 3);
            let corners: Vec<u32> = (0..nv)
                .filter(|&c| (0..D).all(|a| pos[a] == 1 || (c >> a) & 1 == pos[a] / 2))
                .map(|c| cell[c])
                .collect();
            if corners.len() == 1 {
                *slot = corners[0];
                continue;
            }
            let mut key = [u32::MAX; 8];
            key[..corners.len()].copy_from_slice(&corners);
            key[..corners.len()].sort_unstable();
            *slot = *nodes.entry(key).or_insert_with(|| {
                let mut x = [0.0; D];
                for &c in &corners {
                    x = geometry::add(&x, &m.vertices[c as usize]);
                }
                vertices.push(geometry::scale(&x, 1.0 / corners.len() as f64));
                (vertices.len() - 1) as u32
            });
        }
        for child in 0..nv {
            for corner in 0..nv {
                let flat: usize = (0..D).map(|a| (((child >> a) & 1) + ((corner >> a) & 1)) * pow3(a)).sum();
                cells.push(local[flat]);
            }
        }
    }
    let boundary_facets = boundary_facets::<D>(&cells);
    let h = max_diameter(&vertices, &cells, nv);
    VolumeMesh {
        vertices,
        cells,
        boundary_facets,
        level: m.level + 1,
        h,
    }
}

fn pow3(e: usize) -> usize {
    3usize.pow(e as u32)
}

/// Analytic interface `Γ = ∂B_radius(center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere<const D: usize> {
    pub center: Point<D>,
    pub radius: f64,
}

impl<const D: usize> Sphere<D> {
    /// Exact `|Γ|`: circumference or surface area.
    pub fn measure(&self) -> f64 {
        match D {
            2 => 2.0 * PI * self.radius,
            3 => 4.0 * PI * self.radius * self.radius,
            _ => unreachable!(),
        }
    }

    pub fn signed_distance(&self, x: &Point<D>) -> f64 {
        geometry::dist(x, &self.center) - self.radius
    }
}

/// `p(x) = x - d(x)∇d(x)`, which for a sphere is the radial projection.
pub fn closest_point_project<const D: usize>(x: &Point<D>, s: &Sphere<D>) -> Result<Point<D>> {
    let offset = geometry::sub(x, &s.center);
    let r = geometry::norm(&offset);
    if r == 0.0 {
        return Err(Error::ProjectionAtCenter);
    }
    Ok(geometry::add(&s.center, &geometry::scale(&offset, s.radius / r)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh<const D: usize> {
    pub vertices: Vec<Point<D>>,
    /// Flat connectivity: segments (2 ids) in 2D, tensor-ordered quads (4 ids)
    /// in 3D, oriented with outward normals.
    pub facets: Vec<u32>,
    pub level: u32,
    /// Largest facet diameter.
    pub h0: f64,
    pub sphere: Sphere<D>,
}

impl<const D: usize> SurfaceMesh<D> {
    pub const VERTS_PER_FACET: usize = 1 << (D - 1);

    pub fn n_facets(&self) -> usize {
        self.facets.len() / Self::VERTS_PER_FACET
    }

    pub fn facet(&self, f: usize) -> &[u32] {
        let n = Self::VERTS_PER_FACET;
        &self.facets[f * n..(f + 1) * n]
    }

    /// `|Γ_{h₀}|`; bilinear quads are integrated with a 4x4 Gauss rule.
    pub fn measure(&self) -> f64 {
        let rule = QuadratureRule::<1>::gauss(4);
        let rule2 = QuadratureRule::<2>::gauss(4);
        (0..self.n_facets())
            .map(|f| {
                let v = self.facet(f);
                let x = |i: usize| self.vertices[v[i] as usize];
                match D {
                    2 => rule.weights.iter().sum::<f64>() * geometry::dist(&x(0), &x(1)),
                    3 => rule2
                        .points
                        .iter()
                        .zip(&rule2.weights)
                        .map(|(p, w)| w * facet_area_element(&[x(0), x(1), x(2), x(3)], p))
                        .sum(),
                    _ => unreachable!(),
                }
            })
            .sum()
    }
}

/// `|∂x/∂ξ × ∂x/∂η|` of a bilinear quad at reference point `p`.
pub(crate) fn facet_area_element<const D: usize>(x: &[Point<D>; 4], p: &[f64; 2]) -> f64 {
    let (s, t) = (p[0], p[1]);
    let dxi: Point<D> = core::array::from_fn(|i| (1.0 - t) * (x[1][i] - x[0][i]) + t * (x[3][i] - x[2][i]));
    let deta: Point<D> = core::array::from_fn(|i| (1.0 - s) * (x[2][i] - x[0][i]) + s * (x[3][i] - x[1][i]));
    let a: Point<3> = core::array::from_fn(|i| if i < D { dxi[i] } else { 0.0 });
    let b: Point<3> = core::array::from_fn(|i| if i < D { deta[i] } else { 0.0 });
    geometry::norm(&geometry::cross(&a, &b))
}

/// Polygon (2D) or projected cube-surface quadrangulation (3D) with all
/// vertices on the sphere.
pub fn build_interface<const D: usize>(sphere: Sphere<D>, level: u32) -> Result<SurfaceMesh<D>> {
    if !(sphere.radius > 0.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "interface radius must be positive, got {}",
            sphere.radius
        )));
    }
    let (vertices, facets) = match D {
        2 => {
            let n = BASE_SEGMENTS_2D << level;
            let vertices: Vec<Point<D>> = (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    core::array::from_fn(|i| sphere.center[i] + sphere.radius * if i == 0 { cos(t) } else { sin(t) })
                })
                .collect();
            let facets = (0..n).flat_map(|k| [k as u32, ((k + 1) % n) as u32]).collect();
            (vertices, facets)
        }
        3 => cube_sphere(sphere, BASE_FACE_CELLS_3D << level),
        d => return Err(Error::UnsupportedDimension(d)),
    };
    let h0 = max_diameter(&vertices, &facets, 1 << (D - 1));
    Ok(SurfaceMesh {
        vertices,
        facets,
        level,
        h0,
        sphere,
    })
}

fn cube_sphere<const D: usize>(sphere: Sphere<D>, n: usize) -> (Vec<Point<D>>, Vec<u32>) {
    let mut ids: BTreeMap<[usize; 3], u32> = BTreeMap::new();
    let mut vertices: Vec<Point<D>> = Vec::new();
    let mut vertex = |lat: [usize; 3]| -> u32 {
        *ids.entry(lat).or_insert_with(|| {
            let c: [f64; 3] = core::array::from_fn(|i| 2.0 * lat[i] as f64 / n as f64 - 1.0);
            let r = sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
            vertices.push(core::array::from_fn(|i| sphere.center[i] + sphere.radius * c[i] / r));
            (vertices.len() - 1) as u32
        })
    };
    let mut facets = Vec::with_capacity(6 * n * n * 4);
    for axis in 0..3 {
        let (b, c) = ((axis + 1) % 3, (axis + 2) % 3);
        let (b, c) = (b.min(c), b.max(c));
        // e_b x e_c = +e_axis only for axis 0 and 2
        let positive = axis != 1;
        for side in 0..2 {
            let flip = positive != (side == 1);
            for j in 0..n {
                for i in 0..n {
                    let mut quad = [0u32; 4];
                    for (corner, q) in quad.iter_mut().enumerate() {
                        let (di, dj) = (corner & 1, corner >> 1);
                        let (di, dj) = if flip { (dj, di) } else { (di, dj) };
                        let mut lat = [0usize; 3];
                        lat[axis] = side * n;
                        lat[b] = i + di;
                        lat[c] = j + dj;
                        *q = vertex(lat);
                    }
                    facets.extend_from_slice(&quad);
                }
            }
        }
    }
    (vertices, facets)
}

/// Smallest distance from an interface vertex to `∂Ω`, searched up to
/// `search_radius`; `None` if no boundary facet lies that close.
pub fn boundary_clearance<const D: usize>(
    volume: &VolumeMesh<D>,
    surface: &SurfaceMesh<D>,
    search_radius: f64,
) -> Option<f64> {
    let boxes = (0..volume.n_boundary_facets())
        .map(|f| Aabb::from_points(volume.facet(f).iter().map(|&v| &volume.vertices[v as usize])))
        .collect();
    let index = SpatialIndex::from_boxes(boxes, None);
    let mut best: Option<f64> = None;
    for v in &surface.vertices {
        for f in index.query_ball(v, search_radius) {
            let d = volume.facet_distance(f as usize, v);
            if d <= search_radius {
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    best
}
