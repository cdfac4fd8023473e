//! Plain-text mesh and matrix dumps for external tools.
//!
//! Mesh: a `vertices N` line, then `id x y [z]` per vertex, a `cells M` line,
//! then `id v0 v1 v2 v3 [.. v7]` per cell in tensor local order.
//! Matrix: one `row col value` triplet per stored entry.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use regfem_core::fem::CsrMatrix;
use regfem_core::mesh::VolumeMesh;

use crate::{Error, Result};

pub fn write_mesh<const D: usize, W: Write>(mesh: &VolumeMesh<D>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "vertices {}", mesh.n_vertices())?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        write!(out, "{i}")?;
        for x in v {
            write!(out, " {x:e}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "cells {}", mesh.n_cells())?;
    for c in 0..mesh.n_cells() {
        write!(out, "{c}")?;
        for v in mesh.cell(c) {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

pub fn write_matrix<W: Write>(a: &CsrMatrix, mut out: W) -> std::io::Result<()> {
    for (i, j, v) in a.triplets() {
        writeln!(out, "{i} {j} {v:e}")?;
    }
    out.flush()
}

fn to_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    f(BufWriter::new(File::create(path).map_err(io)?)).map_err(io)
}

pub fn dump_mesh<const D: usize>(mesh: &VolumeMesh<D>, path: &Path) -> Result<()> {
    to_file(path, |w| write_mesh(mesh, w))
}

pub fn export_matrix(a: &CsrMatrix, path: &Path) -> Result<()> {
    to_file(path, |w| write_matrix(a, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use regfem_core::mesh::{build_volume, DomainCase};

    #[test]
    fn square_dump_layout() {
        let m = build_volume::<2>(DomainCase::Square, 0).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "vertices 81");
        assert_eq!(lines[1].split(' ').count(), 3);
        assert_eq!(lines[82], "cells 64");
        assert_eq!(lines[83].split(' ').count(), 5);
        assert_eq!(lines.len(), 1 + 81 + 1 + 64);
    }

    #[test]
    fn matrix_triplets() {
        let a = CsrMatrix::identity(3);
        let mut buf = Vec::new();
        write_matrix(&a, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 0 1e0\n1 1 1e0\n2 2 1e0\n");
    }
}
