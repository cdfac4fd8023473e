use alloc::vec::Vec;

use libm::sqrt;

use crate::{Error, Result};

/// Relative residual target of the solver.
pub const CG_REL_TOL: f64 = 1e-10;

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the coupling pattern of the given cells: every pair of
    /// vertices sharing a cell gets an entry.
    pub fn from_cells(n: usize, cells: &[u32], verts_per_cell: usize) -> Self {
        let mut pairs: Vec<u64> = Vec::with_capacity(cells.len() * verts_per_cell);
        for cell in cells.chunks_exact(verts_per_cell) {
            for &i in cell {
                for &j in cell {
                    pairs.push(((i as u64) << 32) | j as u64);
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_offsets = alloc::vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(pairs.len());
        for p in &pairs {
            row_offsets[(p >> 32) as usize + 1] += 1;
            col_indices.push(*p as u32);
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        let values = alloc::vec![0.0; col_indices.len()];
        Self {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n as u32).collect(),
            values: alloc::vec![1.0; n],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = alloc::vec![0usize; n + 1];
        let mut col_indices: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_offsets[i + 1] += 1;
            col_indices.push(j as u32);
            values.push(v);
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    /// Position of `(i, j)` in `values`, if stored.
    #[inline]
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[s..e].binary_search(&(j as u32)).ok().map(|k| s + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds to a stored entry; panics if `(i, j)` is outside the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j).expect("entry outside the sparsity pattern");
        self.values[k] += v;
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, v)| v * x[j as usize]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `max |A_ij - A_ji|` over stored entries.
    pub fn symmetry_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j as usize, i)).abs());
            }
        }
        worst
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j as usize, v))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖b - Ax‖ / ‖b‖` recomputed from the returned solution.
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
pub fn solve_cg(a: &CsrMatrix, rhs: &[f64], rel_tol: f64, max_iter: usize) -> Result<CgOutcome> {
    solve_cg_from(a, rhs, alloc::vec![0.0; a.n], rel_tol, max_iter)
}

/// Jacobi-preconditioned conjugate gradients. The stopping test uses the
/// recursively updated residual; the true residual is checked afterwards and
/// the iteration restarts from the current iterate if it is still too large.
pub fn solve_cg_from(a: &CsrMatrix, rhs: &[f64], x0: Vec<f64>, rel_tol: f64, max_iter: usize) -> Result<CgOutcome> {
    let n = a.n;
    assert_eq!(rhs.len(), n);
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            solution: alloc::vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| if *d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut x = x0;
    let mut r = alloc::vec![0.0; n];
    let mut z = alloc::vec![0.0; n];
    let mut p = alloc::vec![0.0; n];
    let mut q = alloc::vec![0.0; n];
    let mut iterations = 0;
    let target = rel_tol * bnorm;
    loop {
        a.mul_vec_into(&x, &mut r);
        for i in 0..n {
            r[i] = rhs[i] - r[i];
        }
        let true_res = norm(&r);
        if true_res <= target {
            return Ok(CgOutcome {
                solution: x,
                iterations,
                relative_residual: true_res / bnorm,
            });
        }
        if iterations >= max_iter {
            return Err(Error::CgNotConverged {
                iterations,
                residual: true_res / bnorm,
            });
        }
        for i in 0..n {
            z[i] = inv_diag[i] * r[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            iterations += 1;
            a.mul_vec_into(&p, &mut q);
            let alpha = rz / dot(&p, &q);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if norm(&r) <= 0.5 * target {
                break;
            }
            for i in 0..n {
                z[i] = inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}
