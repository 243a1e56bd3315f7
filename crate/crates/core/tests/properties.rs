use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;

use geodome::analysis::{
    circumcenter_deviation, congruent, edge_length_classes, is_infinitesimally_rigid,
    rigidity_matrix, verify_counts, vertex_degree_histogram, Framework,
};
use geodome::io::{read_obj, write_obj, StrutSchedule};
use geodome::mesh::{seed, Mesh, SeedKind, TolerancePolicy, Topology, Vec3};
use geodome::tessellate::{
    geodesic_sphere, project_to_sphere, schwarz_tiling, subdivide, TessellationSpec,
};
use geodome::transforms::{dual, mirror, truncate_dome, DomeCut};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn lattice_pair() -> impl Strategy<Value = (i64, i64)> {
    (0i64..=5, 0i64..=5).prop_filter("not (0, 0)", |&(m, n)| m + n > 0)
}

fn rotate(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let k = axis.normalized().unwrap();
    let (s, c) = angle.sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

/// Rank by Gaussian elimination with full pivoting; independent of the SVD path.
fn elimination_rank(fw: &Framework, rel: f64) -> usize {
    let r = rigidity_matrix(fw);
    let (rows, cols) = r.shape();
    let mut a: Vec<Vec<f64>> = (0..rows)
        .map(|i| (0..cols).map(|j| r[(i, j)]).collect())
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut rank = 0;
    for _ in 0..rows.min(cols) {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, &x) in row.iter().enumerate() {
                if x.abs() > best.0 {
                    best = (x.abs(), i, j);
                }
            }
        }
        if best.0 <= rel * scale {
            break;
        }
        a.swap(rank, best.1);
        for row in a.iter_mut() {
            row.swap(rank, best.2);
        }
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[rank] / pivot[rank];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot).skip(rank) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn icosahedral_spheres_satisfy_invariants((m, n) in lattice_pair(), radius in 0.1f64..50.0) {
        let spec = TessellationSpec::new(m, n).unwrap();
        let t = spec.t() as usize;
        let s = geodesic_sphere(m, n, radius).unwrap();
        prop_assert!(verify_counts(&s, &spec));
        let mut want = BTreeMap::from([(5, 12)]);
        if t > 1 {
            want.insert(6, 10 * t - 10);
        }
        prop_assert_eq!(vertex_degree_histogram(&s), want);
        prop_assert!(s.sphere_deviation(radius) < 1e-12);
        prop_assert!(circumcenter_deviation(&s).unwrap() < 1e-9);

        let g = dual(&s).unwrap();
        prop_assert_eq!(g.counts(), (20 * t, 30 * t, 10 * t + 2));
        prop_assert_eq!(g.faces().iter().filter(|f| f.len() == 5).count(), 12);
        for (v, face) in g.faces().iter().enumerate() {
            let normal = s.vertices()[v] / radius;
            for &i in face {
                prop_assert!((g.vertices()[i].dot(normal) - radius).abs() < 1e-9 * radius);
            }
        }
    }

    #[test]
    fn flat_lattice_triangles_are_equilateral((m, n) in lattice_pair()) {
        let ico = seed(SeedKind::Icosahedron, 1.0);
        let flat = subdivide(&ico, m, n).unwrap();
        let t = TessellationSpec::new(m, n).unwrap().t() as f64;
        let side = ico.edge_length(ico.edges()[0]) / t.sqrt();
        let planes: Vec<(Vec3, f64)> = (0..20)
            .map(|f| {
                let nrm = ico.face_normal(f);
                (nrm, nrm.dot(ico.vertices()[ico.faces()[f][0]]))
            })
            .collect();
        let mut flat_count = 0;
        for tri in &flat.small_faces {
            let p = tri.map(|i| flat.points[i]);
            let coplanar = planes
                .iter()
                .any(|&(nrm, d)| p.iter().all(|q| (nrm.dot(*q) - d).abs() < 1e-12));
            if coplanar {
                flat_count += 1;
                for k in 0..3 {
                    prop_assert!((p[k].distance(p[(k + 1) % 3]) - side).abs() < 1e-12);
                }
            }
        }
        // (1,1) has only base vertices and face centres, so every triangle straddles an edge.
        prop_assert!(flat_count > 0 || (m, n) == (1, 1));
        let projected = project_to_sphere(&flat).unwrap();
        let same: Vec<Vec<usize>> = flat.small_faces.iter().map(|f| f.to_vec()).collect();
        prop_assert_eq!(projected.faces(), same.as_slice());
    }

    #[test]
    fn handedness_follows_lattice_orientation(m in 1i64..=4, n in 1i64..=4) {
        let a = geodesic_sphere(m, n, 1.0).unwrap();
        let mirrored = mirror(&a, Vec3::new(0.2, 1.0, -0.4)).unwrap();
        let swapped = geodesic_sphere(n, m, 1.0).unwrap();
        prop_assert!(congruent(&mirrored, &swapped, false, &tol()));
        prop_assert!(congruent(&swapped, &mirrored, false, &tol()));
        prop_assert_eq!(congruent(&a, &mirrored, false, &tol()), m == n);
        prop_assert!(congruent(&a, &mirrored, true, &tol()));
    }

    #[test]
    fn congruence_survives_rigid_motion(
        (m, n) in lattice_pair(),
        axis in (-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0),
        angle in 0.0f64..(2.0 * PI),
    ) {
        let s = geodesic_sphere(m, n, 1.0).unwrap();
        let axis = Vec3::new(axis.0, axis.1, axis.2);
        let moved = s.map_vertices(|v| rotate(v, axis, angle)).unwrap();
        prop_assert!(congruent(&s, &moved, false, &tol()));
        prop_assert!(congruent(&moved, &s, false, &tol()));
    }

    #[test]
    fn class_count_is_tolerance_monotone(m in 1i64..=6, a in -12i32..=-1, b in -12i32..=-1) {
        let s = geodesic_sphere(m, 0, 1.0).unwrap();
        let (fine, coarse) = (10f64.powi(a.min(b)), 10f64.powi(a.max(b)));
        let tf = edge_length_classes(&s, fine);
        let tc = edge_length_classes(&s, coarse);
        prop_assert!(tc.len() <= tf.len());
        prop_assert_eq!(tf.total(), s.counts().1);
    }

    #[test]
    fn dome_faces_grow_with_fraction(m in 1i64..=6, f1 in 0.05f64..1.0, f2 in 0.05f64..1.0) {
        let s = geodesic_sphere(m, 0, 1.0).unwrap();
        let (lo, hi) = (f1.min(f2), f1.max(f2));
        let small = truncate_dome(&s, DomeCut::new(lo));
        let large = truncate_dome(&s, DomeCut::new(hi)).unwrap();
        if let Ok(small) = small {
            prop_assert!(small.kept_faces.iter().all(|f| large.kept_faces.binary_search(f).is_ok()));
            let (v, e, f) = small.mesh.counts();
            if !small.boundary.is_empty() && small.boundary.len() == 1 {
                prop_assert_eq!(v as i64 - e as i64 + f as i64, 1);
            }
        }
    }

    #[test]
    fn rigidity_is_invariant_under_similarity(
        axis in (-1.0f64..1.0, 0.1f64..1.0, -1.0f64..1.0),
        angle in 0.0f64..(2.0 * PI),
        scale in 1e-3f64..1e3,
        which in 0usize..3,
    ) {
        let mesh = match which {
            0 => seed(SeedKind::Icosahedron, 1.0),
            1 => geodesic_sphere(2, 0, 1.0).unwrap(),
            _ => geodesic_sphere(1, 1, 1.0).unwrap(),
        };
        let fw = Framework::from(&mesh);
        let base = is_infinitesimally_rigid(&fw, &tol()).unwrap();
        let axis = Vec3::new(axis.0, axis.1, axis.2);
        let moved = Framework {
            points: fw.points.iter().map(|&p| rotate(p, axis, angle) * scale).collect(),
            bars: fw.bars.clone(),
        };
        let r = is_infinitesimally_rigid(&moved, &tol()).unwrap();
        prop_assert!(base.rigid);
        prop_assert_eq!(r.rank, base.rank);
        prop_assert_eq!(r.rigid, base.rigid);
    }

    #[test]
    fn obj_roundtrip_is_canonical((m, n) in lattice_pair(), radius in 0.5f64..20.0) {
        let s = geodesic_sphere(m, n, radius).unwrap();
        let mut a = Vec::new();
        write_obj(&s, &mut a).unwrap();
        let back = read_obj(a.as_slice(), Topology::Closed).unwrap();
        prop_assert_eq!(back.vertices(), s.vertices());
        prop_assert_eq!(back.faces(), s.faces());
        let mut b = Vec::new();
        write_obj(&back, &mut b).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn schwarz_tiles_cover_each_direction_once(
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, which in 0usize..3,
    ) {
        let p = Vec3::new(x, y, z);
        prop_assume!(p.norm() > 1e-3);
        let kind = [SeedKind::Tetrahedron, SeedKind::Octahedron, SeedKind::Icosahedron][which];
        let tiles = schwarz_tiling(kind, 1.0).unwrap();
        let hits = tiles.iter().filter(|t| t.contains_direction(p)).count();
        // Points on a shared boundary may land in more than one closed tile.
        prop_assert!(hits >= 1);
        let strict = tiles
            .iter()
            .filter(|t| {
                let [a, b, c] = t.corners;
                let u = p.normalized().unwrap();
                a.cross(b).dot(u) > 1e-9 && b.cross(c).dot(u) > 1e-9 && c.cross(a).dot(u) > 1e-9
            })
            .count();
        prop_assert!(strict <= 1);
    }
}

#[test]
fn rank_oracle_agrees_with_svd_route() {
    let cases: Vec<(&str, Mesh)> = vec![
        ("tetrahedron", seed(SeedKind::Tetrahedron, 1.0)),
        ("octahedron", seed(SeedKind::Octahedron, 1.0)),
        ("icosahedron", seed(SeedKind::Icosahedron, 1.0)),
        ("2v", geodesic_sphere(2, 0, 1.0).unwrap()),
        ("(2,1)", geodesic_sphere(2, 1, 1.0).unwrap()),
    ];
    for (name, mesh) in cases {
        let fw = Framework::from(&mesh);
        let svd = is_infinitesimally_rigid(&fw, &tol()).unwrap();
        let oracle = elimination_rank(&fw, 1e-9);
        assert_eq!(svd.rank, oracle, "{name}");
        assert_eq!(oracle, 3 * mesh.vertices().len() - 6, "{name}");
    }
    // A dome is an open surface and keeps first-order flexes.
    let dome = truncate_dome(&geodesic_sphere(2, 0, 1.0).unwrap(), DomeCut::new(0.5)).unwrap();
    let fw = Framework::from(&dome.mesh);
    let r = is_infinitesimally_rigid(&fw, &tol()).unwrap();
    assert_eq!(r.rank, elimination_rank(&fw, 1e-9));
    assert!(!r.rigid);
}

#[test]
fn stepping_spread_is_frozen() {
    // Values computed once from the generated meshes and frozen here.
    use geodome::tessellate::stepping_projection;
    let spread = |p: &Mesh| {
        let l: Vec<f64> = p.edges().iter().map(|&e| p.edge_length(e)).collect();
        let max = l.iter().cloned().fold(f64::MIN, f64::max);
        let min = l.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / (l.iter().sum::<f64>() / l.len() as f64)
    };
    let stepped = stepping_projection(&seed(SeedKind::Icosahedron, 1.0), 2).unwrap();
    let direct = geodesic_sphere(4, 0, 1.0).unwrap();
    assert!((spread(&stepped) - 0.163748612).abs() < 1e-8);
    assert!((spread(&direct) - 0.240446091).abs() < 1e-8);
}

#[test]
fn schedule_counts_for_small_spheres() {
    for ((m, n), struts, classes) in [((2, 0), 120, 2), ((3, 0), 270, 3), ((1, 0), 30, 1)] {
        let s = StrutSchedule::from_mesh(&geodesic_sphere(m, n, 1.0).unwrap(), &tol()).unwrap();
        assert_eq!(s.struts.len(), struts);
        assert_eq!(s.classes.len(), classes);
        assert_eq!(s.classes.iter().map(|c| c.count).sum::<usize>(), struts);
        assert_eq!(s.class_table().len(), classes);
        s.validate(&tol()).unwrap();
    }
}
