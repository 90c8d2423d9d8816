use kepler_core::decomposition::{AdmitRule, Decomposition, DecompositionOptions, SimplexKind, TipStatus};
use kepler_core::geometry::{Aabb, ConvexPolyhedron, Point3};
use kepler_core::packing::{gen_fcc, gen_random_saturated, Packing};

fn focused(p: &Packing, focus: Aabb) -> Decomposition {
    Decomposition::build_with(p, &DecompositionOptions { focus: Some(focus) }).unwrap()
}

#[test]
fn fcc_star_has_eight_tetrahedra_and_quartered_octahedra() {
    let p = gen_fcc(6).unwrap();
    let dec = focused(&p, Aabb::cube(Point3::ORIGIN, 1e-6));
    let qr = dec.dsystem.incident(0).iter().filter(|&&i| dec.dsystem.tetra[i].kind == SimplexKind::Qr).count();
    assert_eq!(qr, 8);
    // Well inside the classified region every diagonal has its four anchors.
    let deep = |v: usize| p.centers[v].norm() <= 8.0;
    let inner: Vec<_> = dec
        .dsystem
        .decisions
        .iter()
        .filter(|d| dec.catalog.spines[d.spine].endpoints.iter().all(|&e| deep(e)))
        .collect();
    assert!(!inner.is_empty());
    assert!(inner.iter().all(|d| d.rule == AdmitRule::Ql2));

    for (k, oct) in dec.catalog.octahedra.iter().enumerate().filter(|(_, o)| o.vertices.iter().all(|&v| deep(v))) {
        let chosen: Vec<_> = dec
            .dsystem
            .decisions
            .iter()
            .filter(|d| d.included && dec.catalog.octahedra_by_spine[d.spine].contains(&k))
            .collect();
        assert_eq!(chosen.len(), 1, "octahedron {:?} has {} chosen diagonals", oct.vertices, chosen.len());
    }
    for d in inner.iter().filter(|d| d.included) {
        let quarters = dec.dsystem.tetra.iter().filter(|t| t.spine() == Some(d.spine)).count();
        assert_eq!(quarters, 4, "spine {}", d.spine);
    }
    assert!(dec.tips.tips.iter().all(|t| t.status != TipStatus::Uncovered));
}

/// A quasi-regular tetrahedron on a wide equilateral base whose circumcenter
/// lies below the base, so its tip beyond the base face is uncovered.
#[test]
fn sliver_has_one_uncovered_tip_of_known_volume() {
    let side: f64 = 2.5;
    let h = 1.39;
    let r = side / 3f64.sqrt();
    let base: Vec<Point3> = (0..3)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            Point3::new(r * a.cos(), r * a.sin(), 0.0)
        })
        .collect();
    let apex = Point3::new(0.0, 0.0, h);
    let mut centers = base.clone();
    centers.push(apex);
    let p = Packing::new("sliver", Aabb::cube(Point3::ORIGIN, 5.0), centers, false).unwrap();
    let dec = Decomposition::build(&p).unwrap();
    assert_eq!(dec.dsystem.len(), 1);

    let uncovered: Vec<_> = dec.tips.uncovered().collect();
    assert_eq!(uncovered.len(), 1);
    let tip = uncovered[0].1;
    assert_eq!(tip.negative_vertex, 3);
    // The tip is the triangular pyramid from the base to the circumcenter over
    // the inradius-d triangle the base's face planes cut out.
    let d = (r * r - h * h) / (2.0 * r);
    let zc = -(r * r - h * h) / (2.0 * h);
    let expected = 3f64.sqrt() * d * d * zc.abs();
    assert!((tip.volume - expected).abs() < 1e-9, "{} vs {expected}", tip.volume);
}

#[test]
fn v_cells_and_d_system_partition_a_box() {
    for seed in [1, 4] {
        let p = gen_random_saturated(40.0, seed).unwrap();
        let vs = p.interior_vertices();
        let c = p.centers[vs[vs.len() / 2]];
        let b = Aabb::cube(c, 1.0);
        let reach = b.inflate(8.0);
        let owners: Vec<usize> = (0..p.len()).filter(|&i| reach.contains(p.centers[i])).collect();
        let focus = Aabb::from_points(owners.iter().map(|&i| p.centers[i])).unwrap().inflate(1e-6);
        let dec = focused(&p, focus);

        let cube = ConvexPolyhedron::from_box(&b);
        let tetra: f64 = dec
            .dsystem
            .near(&b)
            .into_iter()
            .map(|i| dec.dsystem.tetra[i].tetra(&p).to_polyhedron().intersection_volume(&cube))
            .sum();
        let cells: f64 = dec
            .v_cells(&owners)
            .unwrap()
            .iter()
            .flat_map(|cell| cell.region.pieces.iter())
            .map(|piece| piece.intersection_volume(&cube))
            .sum();
        assert!((tetra + cells - b.volume()).abs() < 1e-8, "seed {seed}: {} vs {}", tetra + cells, b.volume());
    }
}

#[test]
fn decomposition_is_deterministic_and_translation_invariant() {
    let p = gen_random_saturated(40.0, 11).unwrap();
    let vs = p.interior_vertices();
    let focus = Aabb::from_points(vs.iter().map(|&v| p.centers[v])).unwrap().inflate(1e-6);
    let a = focused(&p, focus);
    let b = focused(&p, focus);
    assert_eq!(a.dsystem.tetra, b.dsystem.tetra);
    assert_eq!(a.dsystem.decisions, b.dsystem.decisions);
    assert_eq!(a.tips.tips, b.tips.tips);

    let by = Point3::new(3.25, -1.5, 0.75);
    let q = p.translated(by);
    let moved = Aabb::new(focus.min + by, focus.max + by);
    let t = focused(&q, moved);
    assert_eq!(a.dsystem.tetra, t.dsystem.tetra);
    for v in vs.iter().copied().take(4) {
        let (x, y) = (a.v_cell(v).unwrap(), t.v_cell(v).unwrap());
        assert!((x.volume() - y.volume()).abs() < 1e-9);
        assert_eq!(x.sources.len(), y.sources.len());
    }
}
