use kepler_core::constants::{pt, ql_edge, QR_EDGE};
use kepler_core::decomposition::{Decomposition, DecompositionOptions};
use kepler_core::geometry::{Aabb, Tetra};
use kepler_core::packing::{gen_fcc, gen_jittered_fcc, Packing};
use kepler_core::scoring::{check_decoupling_truncation, gamma_tetra, score_star, ScoreScheme, StarScore};
use proptest::prelude::*;

fn interior(p: &Packing) -> (Decomposition, Vec<usize>) {
    let vs = p.interior_vertices();
    let focus = Aabb::from_points(vs.iter().map(|&v| p.centers[v])).map(|b| b.inflate(1e-6));
    (Decomposition::build_with(p, &DecompositionOptions { focus }).unwrap(), vs)
}

#[test]
fn jittered_fcc_stays_below_the_regular_star() {
    let bound = 8.0 * pt();
    for seed in 0..2 {
        let p = gen_jittered_fcc(7, 2.1, 0.04, seed).unwrap();
        let (dec, vs) = interior(&p);
        assert!(!vs.is_empty());
        for &v in vs.iter().take(6) {
            let s = score_star(&dec, v, &ScoreScheme::Hf).unwrap();
            assert!(s.total < bound, "seed {seed} vertex {v}: {}", s.total);
            assert!(check_decoupling_truncation(&dec, v).unwrap().ok());
        }
    }
}

#[test]
fn hybrid_star_is_the_sum_of_its_clusters() {
    let p = gen_jittered_fcc(7, 2.1, 0.04, 5).unwrap();
    let (dec, vs) = interior(&p);
    for &v in vs.iter().take(4) {
        let s = score_star(&dec, v, &ScoreScheme::Hf).unwrap();
        assert!((s.total - s.region_total()).abs() < 1e-10);
        let faces = s.face_total().expect("clusters");
        assert!((s.total - faces).abs() < 1e-9, "{} vs {faces}", s.total);
        assert_eq!(s.face_histogram().values().sum::<usize>(), s.faces.len());
    }
}

#[test]
fn star_scores_round_trip_through_json() {
    let p = gen_fcc(6).unwrap();
    let (dec, vs) = interior(&p);
    for scheme in ScoreScheme::all_default() {
        let s = score_star(&dec, vs[0], &scheme).unwrap();
        let back: StarScore = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}

fn tetra_with_spine(short: [f64; 5], spine: f64) -> Option<Tetra> {
    let [a, b, c, d, e] = short;
    Tetra::from_edge_lengths([spine, a, b, c, d, e]).ok().filter(|t| t.volume() > 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quasi_regular_compression_is_at_most_pt(l in prop::array::uniform6(2.0..QR_EDGE)) {
        let t = Tetra::from_edge_lengths(l).unwrap();
        prop_assert!(gamma_tetra(&t).unwrap() <= pt() + 1e-12);
    }

    #[test]
    fn quarter_compression_is_not_positive(
        short in prop::array::uniform5(2.0..QR_EDGE),
        spine in QR_EDGE..ql_edge(),
    ) {
        if let Some(t) = tetra_with_spine(short, spine) {
            prop_assert!(gamma_tetra(&t).unwrap() <= 1e-12);
        }
    }
}
