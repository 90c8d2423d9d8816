//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kepler_core::bounds::{bound_f, density, telescoping_series};
use kepler_core::constants::{delta_oct, pt};
use kepler_core::decomposition::dsystem::{overlapping_pairs, partial_spines};
use kepler_core::decomposition::{Decomposition, DecompositionOptions, SimplexKind};
use kepler_core::geometry::{covered_volume, Aabb, Point3, Region, Tetra};
use kepler_core::oracle::{mc_compression, mc_partition_coverage, split_seed};
use kepler_core::packing::{
    gen_dodecahedral, gen_fcc, gen_hcp, gen_jittered_fcc, gen_pentagonal_prism, gen_random_saturated, Packing,
    PrismParams,
};
use kepler_core::scoring::{
    centers_near, check_admissibility, compression, gamma_tetra, score_star, score_stars, ScoreScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeds for the admissibility, partition and oracle criteria.
const SEEDS: u64 = 20;
/// Box edge of those packings: leaves a cube of side ~6 of interior vertices.
const EDGE: f64 = 40.0;
/// Seeds and box edge for the score survey.
const SURVEY_SEEDS: u64 = 50;
const SURVEY_EDGE: f64 = 38.0;
const COVERAGE_POINTS: usize = 1_000_000;
const MC_SAMPLES: usize = 1_000_000;

/// Printed values the computed constants must reproduce.
const DELTA_OCT_PRINTED: f64 = 0.720903;
const PT_PRINTED: f64 = 0.0553736;
const FCC_DENSITY_PRINTED: f64 = 0.740480;
const DODECA_PRINTED: f64 = 0.754697;

/// Independent closed forms, from elementary solid angle and volume formulas.
fn oracle_delta_oct() -> f64 {
    (12.0 * (1.0 / 3f64.sqrt()).acos() - 3.0 * PI) / 8f64.sqrt()
}

fn oracle_pt() -> f64 {
    let solid = 3.0 * (1.0f64 / 3.0).acos() - PI;
    4.0 * solid / 3.0 - oracle_delta_oct() * 8.0 / (6.0 * 2f64.sqrt())
}

fn oracle_fcc_density() -> f64 {
    PI / 18f64.sqrt()
}

/// Density of a regular dodecahedron of inradius 1 around a unit ball.
fn oracle_dodeca_density() -> f64 {
    let s5 = 5f64.sqrt();
    let edge = 2.0 / (2.5 + 1.1 * s5).sqrt();
    let vol = (15.0 + 7.0 * s5) / 4.0 * edge.powi(3);
    4.0 * PI / 3.0 / vol
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn interior_decomposition(p: &Packing) -> (Decomposition, Vec<usize>) {
    let vs = p.interior_vertices();
    let focus = Aabb::from_points(vs.iter().map(|&v| p.centers[v])).map(|b| b.inflate(1e-6));
    let dec = Decomposition::build_with(p, &DecompositionOptions { focus }).expect("decomposition");
    (dec, vs)
}

/// Random packings shared by criteria 5 to 7, with a coverage box around a
/// middle interior vertex inside each focus.
struct Sample {
    seed: u64,
    dec: Decomposition,
    vertices: Vec<usize>,
    coverage_box: Aabb,
}

fn samples() -> Vec<Sample> {
    (0..SEEDS)
        .map(|seed| {
            let p = gen_random_saturated(EDGE, seed).expect("random packing");
            let vertices = p.interior_vertices();
            assert!(!vertices.is_empty(), "seed {seed} has no interior vertex");
            let c = p.centers[vertices[vertices.len() / 2]];
            let coverage_box = Aabb::cube(c, 1.0);
            let inner = Aabb::from_points(vertices.iter().map(|&v| p.centers[v])).unwrap();
            let reach = coverage_box.inflate(8.0 + 1e-6);
            let focus = Aabb::new(inner.min.min(reach.min), inner.max.max(reach.max));
            let dec = Decomposition::build_with(&p, &DecompositionOptions { focus: Some(focus) }).expect("decomposition");
            Sample { seed, dec, vertices, coverage_box }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (d, p) = (delta_oct(), pt());
    let elapsed = t.elapsed();
    let pass = (d - DELTA_OCT_PRINTED).abs() < 1e-6
        && (p - PT_PRINTED).abs() < 1e-6
        && (d - oracle_delta_oct()).abs() < 1e-15
        && (p - oracle_pt()).abs() < 1e-15
        && elapsed < Duration::from_secs(1);
    outcome(pass, format!("delta_oct {d:.9}, pt {p:.9}, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let a = bound_f(4.0, 4.0 * delta_oct(), 8.0 * pt()).unwrap().value.unwrap();
    let b = bound_f(1.0, oracle_fcc_density(), 0.0).unwrap().value.unwrap();
    let r = oracle_fcc_density();
    outcome(
        (a - r).abs() < 1e-12 && (b - r).abs() < 1e-12,
        format!("f(4, 4delta, 8pt) - pi/sqrt18 = {:.1e}, f(1, pi/sqrt18, 0) - pi/sqrt18 = {:.1e}", a - r, b - r),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let eight_pt = 8.0 * oracle_pt();
    let mut notes = Vec::new();
    let mut pass = true;

    let fcc = gen_fcc(7).unwrap();
    let (dec, vs) = interior_decomposition(&fcc);
    let vol = dec.voronoi_cell(0).poly.volume();
    let vol_ok = (vol - 4.0 * 2f64.sqrt()).abs() < 1e-9;
    pass &= vol_ok;
    notes.push(format!("voronoi volume error {:.1e}", vol - 4.0 * 2f64.sqrt()));

    let mut scaled = Vec::new();
    for side in [12.0, 16.0, 20.0] {
        let cube = Aabb::cube(Point3::new(0.13, 0.07, 0.03), 0.5 * side);
        let rho = density(&fcc, &cube).unwrap();
        scaled.push((rho - FCC_DENSITY_PRINTED).abs() * side);
    }
    // Boundary effects scale like 1/T: the error times T stays bounded.
    let density_ok = scaled.iter().all(|&e| e < 1.0);
    pass &= density_ok;
    notes.push(format!("|rho - 0.740480|*T = {:.4} {:.4} {:.4}", scaled[0], scaled[1], scaled[2]));

    let stars = score_stars(&dec, &vs, &ScoreScheme::Hf).unwrap();
    let worst = stars.iter().map(|s| (s.total - eight_pt).abs()).fold(0.0, f64::max);
    let maps_ok = vs.iter().all(|&v| dec.planar_map(v).unwrap().triangle_quad_counts() == (8, 6));
    pass &= worst < 1e-8 && maps_ok;
    notes.push(format!("{} interior vertices, max |score - 8pt| {worst:.1e}, maps 8+6 {maps_ok}", vs.len()));

    let hcp = gen_hcp(7).unwrap();
    let (hdec, hvs) = interior_decomposition(&hcp);
    let hs = score_stars(&hdec, &hvs, &ScoreScheme::Hf).unwrap();
    let hworst = hs.iter().map(|s| (s.total - eight_pt).abs()).fold(0.0, f64::max);
    pass &= hworst < 1e-8 && !hvs.is_empty();
    notes.push(format!("hcp {} vertices, max |score - 8pt| {hworst:.1e}", hvs.len()));

    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    notes.push(format!("{elapsed:.1?}"));
    outcome(pass, notes.join("; "))
}

fn criterion_4() -> Outcome {
    let s2 = 2f64.sqrt();
    let regular = gamma_tetra(&Tetra::from_edge_lengths([2.0; 6]).unwrap()).unwrap();
    let quarter = gamma_tetra(&Tetra::from_edge_lengths([2.0, 2.0, 2.0, 2.0, 2.0, 2.0 * s2]).unwrap()).unwrap();
    let mut pass = (regular - oracle_pt()).abs() < 1e-10 && quarter.abs() < 1e-10;

    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let (mut worst_qr, mut worst_ql) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut tried = 0;
    while tried < 200 {
        let mut l = [0.0; 6];
        for x in l.iter_mut() {
            *x = rng.random_range(2.0..=2.51);
        }
        let spine = rng.random_range(2.51..=2.0 * s2);
        let (Ok(qr), Ok(ql)) = (Tetra::from_edge_lengths(l), Tetra::from_edge_lengths([l[0], l[1], l[2], l[3], l[4], spine]))
        else {
            continue;
        };
        tried += 1;
        worst_qr = worst_qr.max(gamma_tetra(&qr).unwrap() - oracle_pt());
        worst_ql = worst_ql.max(gamma_tetra(&ql).unwrap());
    }
    // Small perturbations of the two extremal shapes probe the equality cases.
    for _ in 0..200 {
        let mut l = [2.0; 6];
        let mut q = [2.0, 2.0, 2.0, 2.0, 2.0, 2.0 * s2];
        for k in 0..6 {
            l[k] += rng.random_range(0.0..1e-3);
            q[k] += if k == 5 { -rng.random_range(0.0..1e-3) } else { rng.random_range(0.0..1e-3) };
        }
        worst_qr = worst_qr.max(gamma_tetra(&Tetra::from_edge_lengths(l).unwrap()).unwrap() - oracle_pt());
        worst_ql = worst_ql.max(gamma_tetra(&Tetra::from_edge_lengths(q).unwrap()).unwrap());
    }
    pass &= worst_qr <= 1e-9 && worst_ql <= 1e-9;
    outcome(
        pass,
        format!(
            "regular - pt {:.1e}, quarter {:.1e}; sweep max(Gamma - pt) {worst_qr:.3e}, max Gamma(QL) {worst_ql:.3e}",
            regular - oracle_pt(),
            quarter
        ),
    )
}

fn criterion_5(samples: &[Sample]) -> Outcome {
    let mut pass = true;
    let mut max_residual: f64 = 0.0;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut decs: Vec<(String, &Decomposition, &[usize])> = Vec::new();
    let fcc = gen_fcc(7).unwrap();
    let hcp = gen_hcp(7).unwrap();
    let (fdec, fvs) = interior_decomposition(&fcc);
    let (hdec, hvs) = interior_decomposition(&hcp);
    decs.push(("fcc".into(), &fdec, &fvs));
    decs.push(("hcp".into(), &hdec, &hvs));
    for s in samples {
        decs.push((format!("seed {}", s.seed), &s.dec, &s.vertices));
    }
    for (name, dec, vs) in decs {
        let r = check_admissibility(dec, &ScoreScheme::Hf, vs).unwrap();
        checked += r.regions_checked;
        for v in &r.violations {
            failures.push(format!("{name}: {}", v.detail));
        }
        // The check holds D-tetra residuals to 1e-9 and V-cell residuals to 1e-8.
        max_residual = max_residual.max(r.max_residual);
        pass &= r.ok();
    }
    outcome(
        pass,
        format!(
            "fcc, hcp and {} seeds: {checked} regions, max residual {max_residual:.1e}; no region needs a Monte Carlo fallback; {} violations {}",
            samples.len(),
            failures.len(),
            failures.first().cloned().unwrap_or_default()
        ),
    )
}

fn criterion_6(samples: &[Sample]) -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut qr_overlaps = 0;
    let mut overlaps = 0;
    let mut partial = 0;
    let mut worst_rate: f64 = 0.0;
    for s in samples {
        let p = &s.dec.packing;
        let pairs = overlapping_pairs(p, &s.dec.dsystem, false);
        let is_qr = |i: usize| s.dec.dsystem.tetra[i].kind == SimplexKind::Qr;
        qr_overlaps += pairs.iter().filter(|o| is_qr(o.0) && is_qr(o.1)).count();
        overlaps += pairs.len();
        partial += partial_spines(&s.dec.catalog, &s.dec.dsystem).len();
        let r = mc_partition_coverage(&s.dec, &s.coverage_box, COVERAGE_POINTS, s.seed).unwrap();
        worst_rate = worst_rate.max(r.failure_rate);
    }
    pass &= qr_overlaps == 0 && overlaps == 0 && partial == 0 && worst_rate < 1e-4;
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "{} seeds: QR overlaps {qr_overlaps}, D-system overlaps {overlaps}, partial spines {partial}, worst coverage failure rate {worst_rate:.1e} at {COVERAGE_POINTS} points, {elapsed:.1?}",
            samples.len()
        ),
    )
}

fn criterion_7(samples: &[Sample]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<(String, Region, f64, &Decomposition)> = Vec::new();
    while cases.len() < 25 {
        let s = &samples[rng.random_range(0..samples.len())];
        let v = s.vertices[rng.random_range(0..s.vertices.len())];
        let inc = s.dec.dsystem.incident(v);
        if inc.is_empty() {
            continue;
        }
        let id = inc[rng.random_range(0..inc.len())];
        let t = s.dec.dsystem.tetra[id].tetra(&s.dec.packing);
        let r = Region::new(None, vec![t.to_polyhedron()]);
        cases.push((format!("seed {} tetra {id}", s.seed), r, gamma_tetra(&t).unwrap(), &s.dec));
    }
    while cases.len() < 50 {
        let s = &samples[rng.random_range(0..samples.len())];
        let v = s.vertices[rng.random_range(0..s.vertices.len())];
        let cell = s.dec.v_cell(v).unwrap();
        if cell.region.pieces.is_empty() {
            continue;
        }
        let piece = cell.region.pieces[rng.random_range(0..cell.region.pieces.len())].clone();
        let r = Region::new(Some(v), vec![piece]);
        let exact = compression(&r, &s.dec);
        cases.push((format!("seed {} v-cell {v} piece", s.seed), r, exact, &s.dec));
    }
    let mut worst: (f64, String) = (0.0, String::new());
    let mut bad = 0;
    for (i, (name, r, exact, dec)) in cases.iter().enumerate() {
        let centers = centers_near(r, dec);
        // Second analytic route for the tetrahedra: exact ball/polyhedron volumes.
        let direct = covered_volume(r, &centers) - delta_oct() * r.volume();
        let e = mc_compression(r, &centers, MC_SAMPLES, split_seed(7, i as u64)).unwrap();
        let z = e.z_score(*exact);
        if z.is_nan() || z.abs() > 4.0 || (direct - exact).abs() > 1e-9 {
            bad += 1;
        }
        if z.abs() > worst.0 {
            worst = (z.abs(), name.clone());
        }
    }
    outcome(bad == 0, format!("{} regions at {MC_SAMPLES} samples, worst |z| {:.2} ({}), {bad} disagreements", cases.len(), worst.0, worst.1))
}

fn criterion_8() -> Outcome {
    let fcc = gen_fcc(10).unwrap();
    let sides = [12.0, 16.0, 20.0];
    let reps = telescoping_series(&fcc, Point3::new(0.11, 0.07, 0.05), &sides, &ScoreScheme::Hf).unwrap();
    let scaled: Vec<f64> = reps.iter().zip(sides).map(|(r, t)| r.residual / (t * t)).collect();
    let ratios = [scaled[1] / scaled[0], scaled[2] / scaled[1]];
    let pass = ratios.iter().all(|r| (0.5..=2.0).contains(r));
    outcome(
        pass,
        format!(
            "residual/T^2 = {:.4} {:.4} {:.4}, ratios {:.3} {:.3}",
            scaled[0], scaled[1], scaled[2], ratios[0], ratios[1]
        ),
    )
}

fn criterion_9() -> Outcome {
    let limit = 8.0 * oracle_pt() + 1e-6;
    let mut packings: Vec<Packing> = vec![gen_fcc(7).unwrap(), gen_hcp(7).unwrap()];
    // The local configurations have no interior vertex; they are generated to
    // keep the survey over every generator.
    let local = [gen_dodecahedral().unwrap(), gen_pentagonal_prism(PrismParams::default()).unwrap()];
    for seed in 0..SURVEY_SEEDS {
        packings.push(gen_random_saturated(SURVEY_EDGE, seed).unwrap());
    }
    for seed in 0..10 {
        let spacing = 2.02 + 0.04 * seed as f64;
        packings.push(gen_jittered_fcc(7, spacing, 0.01, seed).unwrap());
    }
    let mut scored = 0;
    let mut best = (f64::NEG_INFINITY, String::new());
    let mut exceed = Vec::new();
    for p in &packings {
        let (dec, vs) = interior_decomposition(p);
        for s in score_stars(&dec, &vs, &ScoreScheme::Hf).unwrap() {
            scored += 1;
            if s.total > best.0 {
                best = (s.total, format!("{} vertex {}", p.label, s.vertex));
            }
            if s.total > limit {
                exceed.push((p.label.clone(), s.vertex, s.total));
            }
        }
        if exceed.last().is_some_and(|e| e.0 == p.label) {
            let path = std::env::temp_dir().join(format!("exceedance-{}.json", p.label));
            if p.write(&path).is_ok() {
                eprintln!("exceeding configuration written to {}", path.display());
            }
        }
    }
    outcome(
        exceed.is_empty(),
        format!(
            "{} packings (+{} local, no interior vertex), {scored} stars, max score {:.9} at {} (8pt = {:.9}), {} exceedances",
            packings.len(),
            local.len(),
            best.0,
            best.1,
            8.0 * oracle_pt(),
            exceed.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let p = gen_dodecahedral().unwrap();
    let dec = Decomposition::build(&p).unwrap();
    let rho = 4.0 * PI / 3.0 / dec.voronoi_cell(0).poly.volume();
    let pass = (rho - DODECA_PRINTED).abs() < 1e-5 && (rho - oracle_dodeca_density()).abs() < 1e-12;
    outcome(pass, format!("voronoi density {rho:.9} (oracle {:.9})", oracle_dodeca_density()))
}

fn criterion_11() -> Outcome {
    let fcc = gen_fcc(7).unwrap();
    let (dec, vs) = interior_decomposition(&fcc);
    let mut worst: f64 = 0.0;
    let mut counts_ok = true;
    for &v in &vs {
        let ft = score_star(&dec, v, &ScoreScheme::FejesToth { t: 0.0534 }).unwrap();
        let hs = score_star(&dec, v, &ScoreScheme::Hsiang).unwrap();
        worst = worst.max(ft.total.abs()).max(hs.total.abs());
        counts_ok &= hs.near_neighbors == Some(12);
    }
    outcome(worst < 1e-9 && counts_ok && !vs.is_empty(), format!("{} vertices, max |score| {worst:.1e}, N(v) = 12: {counts_ok}", vs.len()))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut run = |n: usize, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {n:>2}: {}  {}  [{:.1?}]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed()
        );
        results.push((n, o));
    };
    run(1, &criterion_1);
    run(2, &criterion_2);
    run(3, &criterion_3);
    run(4, &criterion_4);
    let shared = samples();
    run(5, &|| criterion_5(&shared));
    run(6, &|| criterion_6(&shared));
    run(7, &|| criterion_7(&shared));
    run(8, &criterion_8);
    run(9, &criterion_9);
    run(10, &criterion_10);
    run(11, &criterion_11);
    let failed: Vec<usize> = results.iter().filter(|r| !r.1.pass).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria pass in {:.1?}", results.len() - failed.len(), results.len(), start.elapsed());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
