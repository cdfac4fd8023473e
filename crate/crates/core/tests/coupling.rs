use regfem_core::coupling::{
    assemble_rhs_direct, assemble_rhs_regularized, assemble_rhs_regularized_with, rhs_consistency_gap,
    surface_quadrature, RegularizedOptions, SurfaceQuadPoint, SURFACE_QUAD_ORDER,
};
use regfem_core::exec::Serial;
use regfem_core::fem::FeSpace;
use regfem_core::geometry;
use regfem_core::kernels::{KernelKind, ScaledDirac};
use regfem_core::mesh::{build_interface, build_volume, DomainCase, Sphere};
use regfem_core::Error;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn direct_rhs_partition_of_unity() {
    let circle = Sphere {
        center: [0.3, 0.3],
        radius: 0.2,
    };
    let mesh = build_volume::<2>(DomainCase::Square, 1).unwrap();
    let space = FeSpace::new(&mesh);
    let surf = build_interface(circle, 1).unwrap();
    let squad = surface_quadrature(&surf, |_| 5.0, SURFACE_QUAD_ORDER).unwrap();
    let rhs = assemble_rhs_direct(&space, &squad).unwrap();
    let sum: f64 = rhs.iter().sum();
    assert!((sum - 5.0 * surf.measure()).abs() < 1e-12, "{sum}");

    let sphere = Sphere {
        center: [0.3, 0.3, 0.3],
        radius: 0.2,
    };
    let mesh = build_volume::<3>(DomainCase::Cube, 1).unwrap();
    let space = FeSpace::new(&mesh);
    let surf = build_interface(sphere, 1).unwrap();
    let squad = surface_quadrature(&surf, |_| 25.0, SURFACE_QUAD_ORDER).unwrap();
    let rhs = assemble_rhs_direct(&space, &squad).unwrap();
    let sum: f64 = rhs.iter().sum();
    assert!((sum - 25.0 * surf.measure()).abs() < 1e-12, "{sum}");
}

#[test]
fn direct_rhs_on_vertices_and_edges() {
    let mesh = build_volume::<2>(DomainCase::Square, 0).unwrap();
    let space = FeSpace::new(&mesh);
    let on_vertex = [SurfaceQuadPoint {
        position: [0.5, 0.375],
        weight: 2.0,
        f_value: 1.5,
    }];
    let rhs = assemble_rhs_direct(&space, &on_vertex).unwrap();
    let hits: Vec<usize> = (0..rhs.len()).filter(|&i| rhs[i] != 0.0).collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(space.dof_coords()[hits[0]], [0.5, 0.375]);
    assert!((rhs[hits[0]] - 3.0).abs() < 1e-14);

    let on_edge = [SurfaceQuadPoint {
        position: [0.5, 0.4375],
        weight: 1.0,
        f_value: 1.0,
    }];
    let rhs = assemble_rhs_direct(&space, &on_edge).unwrap();
    let hits: Vec<usize> = (0..rhs.len()).filter(|&i| rhs[i].abs() > 1e-14).collect();
    assert_eq!(hits.len(), 2);
    for i in hits {
        assert!((rhs[i] - 0.5).abs() < 1e-14);
    }

    let outside = [SurfaceQuadPoint {
        position: [1.5, 0.5],
        weight: 1.0,
        f_value: 1.0,
    }];
    assert!(matches!(assemble_rhs_direct(&space, &outside), Err(Error::PointOutsideMesh(_))));
}

struct Setup2 {
    mesh: regfem_core::mesh::VolumeMesh<2>,
    squad: Vec<SurfaceQuadPoint<2>>,
    h0: f64,
}

fn square_setup(level: u32) -> Setup2 {
    let circle = Sphere {
        center: [0.3, 0.3],
        radius: 0.2,
    };
    let surf = build_interface(circle, level).unwrap();
    Setup2 {
        mesh: build_volume::<2>(DomainCase::Square, level).unwrap(),
        squad: surface_quadrature(&surf, |_| 5.0, SURFACE_QUAD_ORDER).unwrap(),
        h0: surf.h0,
    }
}

#[test]
fn indexed_and_brute_force_assembly_agree() {
    let s = square_setup(1);
    let space = FeSpace::new(&s.mesh);
    for kind in KernelKind::ALL {
        let dirac = ScaledDirac::new(kind.build(2).unwrap(), 0.04).unwrap();
        let opts = RegularizedOptions {
            facet_diameter: s.h0,
            ..Default::default()
        };
        let fast = assemble_rhs_regularized_with(&space, &s.squad, &dirac, &opts, &Serial).unwrap();
        let brute = assemble_rhs_regularized_with(
            &space,
            &s.squad,
            &dirac,
            &RegularizedOptions {
                brute_force: true,
                ..opts
            },
            &Serial,
        )
        .unwrap();
        assert!(max_diff(&fast, &brute) <= 1e-14 * max_abs(&brute), "{kind}");
    }
}

#[test]
fn symmetric_kernels_allow_swapped_arguments() {
    let s = square_setup(1);
    let space = FeSpace::new(&s.mesh);
    for kind in KernelKind::ALL {
        let dirac = ScaledDirac::new(kind.build(2).unwrap(), 0.05).unwrap();
        let opts = RegularizedOptions::default();
        let a = assemble_rhs_regularized_with(&space, &s.squad, &dirac, &opts, &Serial).unwrap();
        let b = assemble_rhs_regularized_with(
            &space,
            &s.squad,
            &dirac,
            &RegularizedOptions {
                swap_arguments: true,
                ..opts
            },
            &Serial,
        )
        .unwrap();
        assert!(max_diff(&a, &b) <= 1e-14 * max_abs(&a), "{kind}");
    }
}

#[test]
fn regularized_rhs_is_local_and_keeps_the_mass() {
    let s = square_setup(2);
    let space = FeSpace::new(&s.mesh);
    let load: f64 = s.squad.iter().map(|q| q.weight * q.f_value).sum();
    for kind in KernelKind::ALL {
        let dirac = ScaledDirac::new(kind.build(2).unwrap(), 0.03).unwrap();
        let rhs = assemble_rhs_regularized(&space, &s.squad, &dirac, 8).unwrap();
        // the cell support of φ_i has radius h around vertex i
        let reach = dirac.support_radius() + s.mesh.h + s.h0;
        for (x, r) in space.dof_coords().iter().zip(&rhs) {
            let dist = Sphere {
                center: [0.3, 0.3],
                radius: 0.2,
            }
            .signed_distance(x)
            .abs();
            if dist > reach {
                assert_eq!(*r, 0.0);
            }
        }
        let sum: f64 = rhs.iter().sum();
        // cell quadrature of the discontinuous box kernel is only first order
        let tol = if kind == KernelKind::TensorLInf { 1e-2 } else { 1e-4 };
        assert!((sum / load - 1.0).abs() < tol, "{kind}: {sum} vs {load}");
    }
}

#[test]
fn consistency_gap_shrinks_with_eps() {
    let s = square_setup(1);
    let space = FeSpace::new(&s.mesh);
    let eps = [0.06, 0.03, 0.015, 0.0075];
    for kind in [KernelKind::TensorC1, KernelKind::RadialC1] {
        let gaps = rhs_consistency_gap(
            &space,
            &s.squad,
            &kind.build(2).unwrap(),
            &eps,
            &RegularizedOptions {
                vol_order: 16,
                facet_diameter: s.h0,
                ..Default::default()
            },
        )
        .unwrap();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{kind}: {gaps:?}");
        }
    }
}

#[test]
fn surface_quadrature_weights_sum_to_the_measure() {
    let sphere = Sphere {
        center: [0.3, 0.3, 0.3],
        radius: 0.2,
    };
    let surf = build_interface(sphere, 1).unwrap();
    let squad = surface_quadrature(&surf, |p| p[2], 4).unwrap();
    let w: f64 = squad.iter().map(|q| q.weight).sum();
    assert!((w - surf.measure()).abs() < 1e-13);
    for q in &squad {
        // the datum is evaluated at the projected point
        let lifted = regfem_core::mesh::closest_point_project(&q.position, &sphere).unwrap();
        assert_eq!(q.f_value, lifted[2]);
        assert!(geometry::dist(&q.position, &lifted) < surf.h0 * surf.h0);
    }
    assert!(surface_quadrature(&surf, |_| 1.0, 0).is_err());
}
