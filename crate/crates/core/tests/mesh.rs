use std::collections::{BTreeMap, BTreeSet};

use regfem_core::fem::jacobian;
use regfem_core::geometry::{self, Point};
use regfem_core::mesh::{
    boundary_clearance, build_interface, build_volume, closest_point_project, refine_global, DomainCase, Sphere,
    VolumeMesh,
};

/// Coordinates rounded to a lattice fine enough for every level used here.
fn key<const D: usize>(x: &Point<D>) -> [i64; D] {
    x.map(|v| (v * 4096.0).round() as i64)
}

fn cell_keys<const D: usize>(m: &VolumeMesh<D>) -> BTreeSet<Vec<[i64; D]>> {
    (0..m.n_cells())
        .map(|c| m.cell(c).iter().map(|&v| key(&m.vertices[v as usize])).collect())
        .collect()
}

fn refine_twice_matches_direct_build<const D: usize>(case: DomainCase) {
    let coarse = build_volume::<D>(case, 0).unwrap();
    let refined = refine_global(&refine_global(&coarse));
    let direct = build_volume::<D>(case, 2).unwrap();
    assert_eq!(refined.level, 2);
    assert_eq!(refined.n_vertices(), direct.n_vertices());
    assert_eq!(refined.n_cells(), direct.n_cells());
    assert_eq!(refined.n_boundary_facets(), direct.n_boundary_facets());
    assert!((refined.h - direct.h).abs() < 1e-15);
    // same cells with the same local orientation
    assert_eq!(cell_keys(&refined), cell_keys(&direct));
}

#[test]
fn refinement_commutes_with_building() {
    refine_twice_matches_direct_build::<2>(DomainCase::Square);
    refine_twice_matches_direct_build::<2>(DomainCase::LShape);
    refine_twice_matches_direct_build::<3>(DomainCase::Cube);
}

fn jacobians_positive<const D: usize>(m: &VolumeMesh<D>) {
    let corners: Vec<[f64; D]> = (0..1 << D).map(|i| std::array::from_fn(|a| ((i >> a) & 1) as f64)).collect();
    for c in 0..m.n_cells() {
        let coords = m.cell_coords(c);
        for xi in &corners {
            assert!(geometry::det(&jacobian(&coords, xi)) > 0.0, "cell {c}");
        }
    }
}

#[test]
fn every_cell_is_positively_oriented() {
    for level in 0..3 {
        jacobians_positive(&build_volume::<2>(DomainCase::Square, level).unwrap());
        jacobians_positive(&build_volume::<2>(DomainCase::LShape, level).unwrap());
    }
    jacobians_positive(&build_volume::<3>(DomainCase::Cube, 1).unwrap());
    jacobians_positive(&refine_global(&build_volume::<2>(DomainCase::LShape, 0).unwrap()));
}

/// Each cell edge is shared by at most two cells; edges with one cell are
/// exactly the boundary facets.
#[test]
fn l_shape_is_conforming() {
    for level in 0..3 {
        let m = build_volume::<2>(DomainCase::LShape, level).unwrap();
        let mut edges: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for c in 0..m.n_cells() {
            let v = m.cell(c);
            for (a, b) in [(0, 1), (1, 3), (3, 2), (2, 0)] {
                let e = (v[a].min(v[b]), v[a].max(v[b]));
                *edges.entry(e).or_default() += 1;
            }
        }
        assert!(edges.values().all(|&n| n <= 2));
        let outer: BTreeSet<_> = edges.iter().filter(|(_, &n)| n == 1).map(|(e, _)| *e).collect();
        let facets: BTreeSet<_> = (0..m.n_boundary_facets())
            .map(|f| {
                let v = m.facet(f);
                (v[0].min(v[1]), v[0].max(v[1]))
            })
            .collect();
        assert_eq!(outer, facets);
        // perimeter of the L-shape is 8
        let perimeter: f64 = (0..m.n_boundary_facets())
            .map(|f| geometry::dist(&m.vertices[m.facet(f)[0] as usize], &m.vertices[m.facet(f)[1] as usize]))
            .sum();
        assert!((perimeter - 8.0).abs() < 1e-12);
        let area: f64 = (0..m.n_cells())
            .map(|c| geometry::det(&jacobian(&m.cell_coords(c), &[0.5, 0.5])))
            .sum();
        assert!((area - 3.0).abs() < 1e-12);
    }
}

#[test]
fn interface_measure_converges_at_second_order() {
    let circle = Sphere {
        center: [0.3, 0.3],
        radius: 0.2,
    };
    let errs: Vec<f64> = (0..5).map(|l| circle.measure() - build_interface(circle, l).unwrap().measure()).collect();
    for w in errs.windows(2) {
        assert!(w[0] > 0.0 && w[1] > 0.0, "inscribed polygon is shorter");
        let eoc = (w[0] / w[1]).log2();
        assert!((eoc - 2.0).abs() < 0.05, "{eoc}");
    }
    let sphere = Sphere {
        center: [0.3, 0.3, 0.3],
        radius: 0.2,
    };
    let errs: Vec<f64> =
        (0..4).map(|l| (sphere.measure() - build_interface(sphere, l).unwrap().measure()).abs()).collect();
    for w in errs.windows(2) {
        let eoc = (w[0] / w[1]).log2();
        assert!((eoc - 2.0).abs() < 0.2, "{eoc}");
    }
}

#[test]
fn polygon_perimeter_closed_form() {
    let circle = Sphere {
        center: [0.0, 0.0],
        radius: 0.2,
    };
    let s = build_interface(circle, 0).unwrap();
    let chord = 2.0 * 0.2 * (std::f64::consts::PI / 32.0).sin();
    assert!((s.measure() - 32.0 * chord).abs() < 1e-14);
    assert!((s.h0 - chord).abs() < 1e-15);
}

#[test]
fn interface_vertices_on_sphere_and_facets_outward() {
    let sphere = Sphere {
        center: [0.3, 0.3, 0.3],
        radius: 0.2,
    };
    for level in 0..3 {
        let s = build_interface(sphere, level).unwrap();
        for v in &s.vertices {
            assert!(sphere.signed_distance(v).abs() < 1e-15);
        }
        for f in 0..s.n_facets() {
            let v: Vec<Point<3>> = s.facet(f).iter().map(|&i| s.vertices[i as usize]).collect();
            let normal = geometry::cross(&geometry::sub(&v[1], &v[0]), &geometry::sub(&v[2], &v[0]));
            let centroid = geometry::scale(&v.iter().fold([0.0; 3], |a, x| geometry::add(&a, x)), 0.25);
            assert!(geometry::dot(&normal, &geometry::sub(&centroid, &sphere.center)) > 0.0);
        }
    }
    let circle = Sphere {
        center: [0.3, 0.3],
        radius: 0.2,
    };
    let s = build_interface(circle, 1).unwrap();
    for f in 0..s.n_facets() {
        let (a, b) = (s.vertices[s.facet(f)[0] as usize], s.vertices[s.facet(f)[1] as usize]);
        // counterclockwise: outward normal is the tangent rotated clockwise
        let t = geometry::sub(&b, &a);
        let mid = geometry::scale(&geometry::add(&a, &b), 0.5);
        assert!(geometry::dot(&[t[1], -t[0]], &geometry::sub(&mid, &circle.center)) > 0.0);
    }
}

#[test]
fn projection_lands_on_the_sphere() {
    let sphere = Sphere {
        center: [0.3, 0.3, 0.3],
        radius: 0.2,
    };
    for x in [[0.9, 0.1, 0.4], [0.31, 0.3, 0.3], [-1.0, 2.0, 0.0]] {
        let p = closest_point_project(&x, &sphere).unwrap();
        assert!(sphere.signed_distance(&p).abs() < 1e-15);
        // p, x and the center are collinear, p on the same side
        let (u, v) = (geometry::sub(&x, &sphere.center), geometry::sub(&p, &sphere.center));
        assert!((geometry::dot(&u, &v) - geometry::norm(&u) * geometry::norm(&v)).abs() < 1e-14);
    }
    assert!(closest_point_project(&sphere.center, &sphere).is_err());
}

#[test]
fn clearance_of_the_test_interfaces() {
    let sq = build_volume::<2>(DomainCase::Square, 0).unwrap();
    let circle = build_interface(
        Sphere {
            center: [0.3, 0.3],
            radius: 0.2,
        },
        0,
    )
    .unwrap();
    // vertex at angle π touches x = 0.1
    let c = boundary_clearance(&sq, &circle, 0.5).unwrap();
    assert!((c - 0.1).abs() < 1e-14, "{c}");
    assert_eq!(boundary_clearance(&sq, &circle, 0.09), None);
    let l = build_volume::<2>(DomainCase::LShape, 0).unwrap();
    let circle = build_interface(
        Sphere {
            center: [-0.5, -0.5],
            radius: 0.2,
        },
        0,
    )
    .unwrap();
    let c = boundary_clearance(&l, &circle, 1.0).unwrap();
    assert!((c - 0.3).abs() < 1e-14, "{c}");
}
