use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kepler_core::bounds::{bound_f, empirical_theta, telescoping_series};
use kepler_core::constants::{interior_margin, pt};
use kepler_core::decomposition::dsystem::{overlapping_pairs, partial_spines};
use kepler_core::decomposition::{Decomposition, DecompositionOptions, SimplexKind};
use kepler_core::geometry::{Aabb, Point3, Region};
use kepler_core::oracle::{mc_compression, mc_partition_coverage, split_seed};
use kepler_core::packing::{
    gen_dodecahedral, gen_fcc, gen_hcp, gen_jittered_fcc, gen_pentagonal_prism, gen_random_saturated, validate,
    Packing, PrismParams,
};
use kepler_core::report::fmt_f64;
use kepler_core::scoring::{
    centers_near, check_admissibility, check_decoupling_truncation, compression, gamma_tetra, score_star,
    ScoreScheme, StarScore,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{BoundArgs, Focus, GenArgs, Lattice, ReportArgs, ScoreArgs, Selection, VerifyArgs};

/// Tabular form of a result, for `--csv`.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug)]
pub enum Body {
    /// Written through the rounding serializer.
    Json(Value),
    /// Written verbatim.
    Raw(String),
}

#[derive(Debug)]
pub struct Outcome {
    pub body: Body,
    pub table: Table,
    /// Machine-readable list of failed checks; non-empty means exit code 2.
    pub failures: Vec<Value>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    /// Values resolved at run time (vertex lists, focus boxes).
    pub resolved: Value,
}

impl Outcome {
    fn new(body: Body, table: Table) -> Self {
        Outcome { body, table, failures: Vec::new(), seeds: Vec::new(), inputs: Vec::new(), resolved: Value::Null }
    }
}

fn load(path: &Path) -> Result<Packing> {
    Packing::read(path).with_context(|| format!("reading packing {}", path.display()))
}

/// Vertices to work on and the decomposition focus.
struct Plan {
    vertices: Vec<usize>,
    focus: Option<Aabb>,
}

fn plan(p: &Packing, vertices: &[usize], focus: Option<Focus>) -> Result<Plan> {
    let focus = focus.map(|f| f.aabb());
    let inside = |v: usize| focus.map_or(true, |f| f.contains(p.centers[v]));
    let vertices: Vec<usize> = if vertices.is_empty() {
        (0..p.len()).filter(|&v| p.is_interior(v) && inside(v)).collect()
    } else {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        for &v in &vs {
            if v >= p.len() {
                bail!("vertex {v} does not exist; the packing has {} centers", p.len());
            }
            if !p.is_interior(v) {
                bail!("vertex {v} lies {:.6} from the domain boundary; {:.6} is needed", p.depth(v), interior_margin());
            }
            if !inside(v) {
                bail!("vertex {v} lies outside the focus");
            }
        }
        vs
    };
    let focus = focus.or_else(|| Aabb::from_points(vertices.iter().map(|&v| p.centers[v])).map(|b| b.inflate(1e-6)));
    Ok(Plan { vertices, focus })
}

fn union(a: Option<Aabb>, b: Aabb) -> Aabb {
    match a {
        Some(a) => Aabb::new(a.min.min(b.min), a.max.max(b.max)),
        None => b,
    }
}

fn build(p: &Packing, focus: Option<Aabb>) -> Result<Decomposition> {
    Ok(Decomposition::build_with(p, &DecompositionOptions { focus })?)
}

fn packing_summary(p: &Packing) -> Value {
    json!({ "label": p.label, "centers": p.len(), "domain": p.domain, "saturated": p.saturated })
}

fn resolved(plan: &Plan) -> Value {
    json!({ "vertices": plan.vertices, "focus": plan.focus })
}

fn schemes_or_all(s: &[ScoreScheme]) -> Vec<ScoreScheme> {
    if s.is_empty() {
        ScoreScheme::all_default().to_vec()
    } else {
        s.to_vec()
    }
}

pub fn gen(a: &GenArgs) -> Result<Outcome> {
    let p = match a.lattice {
        Lattice::Fcc => gen_fcc(a.shells)?,
        Lattice::Hcp => gen_hcp(a.shells)?,
        Lattice::Dodeca => gen_dodecahedral()?,
        Lattice::Pentaprism => {
            let d = PrismParams::default();
            gen_pentagonal_prism(PrismParams {
                radius: a.prism_radius.unwrap_or(d.radius),
                half_height: a.prism_half_height.unwrap_or(d.half_height),
                axial: !a.no_axial,
            })?
        }
        Lattice::Random => gen_random_saturated(a.edge, a.seed)?,
        Lattice::JitteredFcc => gen_jittered_fcc(a.shells, a.spacing, a.jitter, a.seed)?,
    };
    // Packings are inputs to later runs, so coordinates keep full precision.
    let rows = p
        .centers
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), c.x.to_string(), c.y.to_string(), c.z.to_string()])
        .collect();
    let mut out = Outcome::new(Body::Raw(p.to_json()?), Table { header: vec!["index", "x", "y", "z"], rows });
    if matches!(a.lattice, Lattice::Random | Lattice::JitteredFcc) {
        out.seeds.push(a.seed);
    }
    out.resolved = json!({ "centers": p.len(), "interior_vertices": p.interior_vertices().len() });
    Ok(out)
}

fn kind_name(k: SimplexKind) -> &'static str {
    match k {
        SimplexKind::Qr => "QR",
        SimplexKind::Ql { .. } => "QL",
        SimplexKind::PlainD => "D",
    }
}

pub fn decompose(a: &Selection) -> Result<Outcome> {
    let p = load(&a.input)?;
    let plan = plan(&p, &a.vertices, a.focus)?;
    let dec = build(&p, plan.focus)?;
    let cat = &dec.catalog;
    let ds = &dec.dsystem;

    let mut rows = Vec::new();
    let mut by_rule: BTreeMap<String, usize> = BTreeMap::new();
    let mut tetra = Vec::with_capacity(ds.len());
    for (id, d) in ds.tetra.iter().enumerate() {
        let t = d.tetra(&p);
        let gamma = gamma_tetra(&t).ok();
        let rule = serde_json::to_value(d.rule)?.as_str().unwrap_or_default().to_string();
        *by_rule.entry(rule.clone()).or_default() += 1;
        rows.push(vec![
            "d_tetra".into(),
            id.to_string(),
            join(&d.vertices),
            format!("{} {rule}", kind_name(d.kind)),
            fmt_f64(t.volume()),
            gamma.map(fmt_f64).unwrap_or_default(),
        ]);
        tetra.push(json!({
            "id": id, "vertices": d.vertices, "kind": kind_name(d.kind), "spine": d.spine(),
            "rule": rule, "volume": t.volume(), "gamma": gamma,
        }));
    }

    let cells = dec.v_cells(&plan.vertices)?;
    let mut vcells = Vec::with_capacity(cells.len());
    for c in &cells {
        let comp = compression(&c.region, &dec);
        rows.push(vec![
            "v_cell".into(),
            c.owner.to_string(),
            c.owner.to_string(),
            format!("{} pieces", c.region.pieces.len()),
            fmt_f64(c.region.volume()),
            fmt_f64(comp),
        ]);
        vcells.push(json!({
            "vertex": c.owner, "volume": c.region.volume(), "voronoi_volume": c.voronoi_volume,
            "compression": comp, "pieces": c.region.pieces.len(), "bounded": c.bounded, "tips_lost": c.tips_lost,
        }));
    }

    let overlaps = overlapping_pairs(&p, ds, false);
    let partial = partial_spines(cat, ds);
    for t in &dec.tips.anomalies {
        rows.push(vec!["anomaly".into(), t.tetra.to_string(), String::new(), "tip".into(), String::new(), t.detail.clone()]);
    }
    for (i, j, v) in &overlaps {
        rows.push(vec!["anomaly".into(), i.to_string(), j.to_string(), "overlap".into(), fmt_f64(*v), String::new()]);
    }
    let body = json!({
        "kind": "decompose",
        "packing": packing_summary(&p),
        "focus": plan.focus,
        "vertices": plan.vertices,
        "catalog": {
            "qr": cat.qr.len(), "ql": cat.ql.len(), "spines": cat.spines.len(),
            "octahedra": cat.octahedra.len(),
            "live_octahedra": cat.octahedra.iter().filter(|o| o.live()).count(),
        },
        "d_system": { "members": ds.len(), "by_rule": by_rule, "tetra": tetra, "spine_decisions": ds.decisions },
        "v_cells": vcells,
        "anomalies": {
            "tips": dec.tips.anomalies,
            "overlapping_tips": dec.tips.overlapping,
            "near_threshold_edges": cat.near_threshold,
            "not_d_simplex": cat.not_d_simplex.len(),
            "overlapping_members": overlaps,
            "partial_spines": partial,
        },
    });
    let header = vec!["section", "id", "vertices", "kind", "volume", "gamma"];
    let mut out = Outcome::new(Body::Json(body), Table { header, rows });
    out.inputs.push(a.input.clone());
    out.resolved = resolved(&plan);
    Ok(out)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn histogram(s: &StarScore) -> String {
    s.face_histogram().iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ")
}

pub fn score(a: &ScoreArgs) -> Result<Outcome> {
    let p = load(&a.sel.input)?;
    let plan = plan(&p, &a.sel.vertices, a.sel.focus)?;
    let dec = build(&p, plan.focus)?;
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut sections = Vec::new();
    for scheme in schemes_or_all(&a.schemes) {
        let results: Vec<_> = plan.vertices.par_iter().map(|&v| (v, score_star(&dec, v, &scheme))).collect();
        let mut stars = Vec::new();
        let mut totals = Vec::new();
        for (v, r) in results {
            match r {
                Ok(s) => {
                    rows.push(vec![
                        v.to_string(),
                        scheme.to_string(),
                        fmt_f64(s.total),
                        s.regions.len().to_string(),
                        histogram(&s),
                        s.near_neighbors.map(|n| n.to_string()).unwrap_or_default(),
                    ]);
                    totals.push((v, s.total));
                    stars.push(if a.detail {
                        serde_json::to_value(&s)?
                    } else {
                        json!({
                            "vertex": v, "total": s.total, "regions": s.regions.len(),
                            "faces": s.face_histogram(), "near_neighbors": s.near_neighbors,
                        })
                    });
                }
                Err(e) => failures.push(json!({ "check": "score", "scheme": scheme, "vertex": v, "error": e.to_string() })),
            }
        }
        let (a_, b_) = scheme.constants();
        let max = totals.iter().copied().fold(None, |m: Option<(usize, f64)>, x| match m {
            Some(m) if m.1 >= x.1 => Some(m),
            _ => Some(x),
        });
        let min = totals.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let mean = totals.iter().map(|x| x.1).sum::<f64>() / totals.len().max(1) as f64;
        sections.push(json!({
            "scheme": scheme, "a": a_, "b": b_, "vertices": totals.len(),
            "max": max.map(|m| m.1), "argmax": max.map(|m| m.0),
            "min": (!totals.is_empty()).then_some(min), "mean": (!totals.is_empty()).then_some(mean),
            "stars": stars,
        }));
    }
    let body = json!({
        "kind": "score",
        "packing": packing_summary(&p),
        "focus": plan.focus,
        "eight_pt": 8.0 * pt(),
        "schemes": sections,
        "failures": failures,
    });
    let header = vec!["vertex", "scheme", "score", "regions", "faces", "near_neighbors"];
    let mut out = Outcome::new(Body::Json(body), Table { header, rows });
    out.failures = failures;
    out.inputs.push(a.sel.input.clone());
    out.resolved = resolved(&plan);
    Ok(out)
}

#[derive(Serialize)]
struct BoundRow {
    scheme: ScoreScheme,
    a: f64,
    b: f64,
    theta: f64,
    argmax: Option<usize>,
    vertices_scored: usize,
    f: Option<f64>,
}

pub fn bound(a: &BoundArgs) -> Result<Outcome> {
    let schemes = schemes_or_all(&a.schemes);
    let mut rows = Vec::new();
    let mut out_inputs = Vec::new();
    let mut res = Value::Null;
    let mut label = Value::Null;
    if let Some(theta) = a.theta {
        for s in schemes {
            let (aa, bb) = s.constants();
            let f = bound_f(aa, bb, theta)?;
            rows.push(BoundRow { scheme: s, a: aa, b: bb, theta, argmax: None, vertices_scored: 0, f: f.value });
        }
    } else {
        let Some(input) = &a.input else { bail!("bound needs --input or --theta") };
        let p = load(input)?;
        let plan = plan(&p, &a.vertices, a.focus)?;
        if plan.vertices.is_empty() {
            bail!("the packing has no interior vertex to score");
        }
        let dec = build(&p, plan.focus)?;
        for s in schemes {
            let (aa, bb) = s.constants();
            let t = empirical_theta(&dec, &s, &plan.vertices)?;
            let f = bound_f(aa, bb, t.theta)?;
            rows.push(BoundRow {
                scheme: s,
                a: aa,
                b: bb,
                theta: t.theta,
                argmax: Some(t.argmax),
                vertices_scored: t.vertices_scored,
                f: f.value,
            });
        }
        out_inputs.push(input.clone());
        res = resolved(&plan);
        label = packing_summary(&p);
    }
    let table = Table {
        header: vec!["scheme", "a", "b", "theta", "argmax", "vertices_scored", "f"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.scheme.to_string(),
                    fmt_f64(r.a),
                    fmt_f64(r.b),
                    fmt_f64(r.theta),
                    r.argmax.map(|v| v.to_string()).unwrap_or_default(),
                    r.vertices_scored.to_string(),
                    r.f.map(fmt_f64).unwrap_or_default(),
                ]
            })
            .collect(),
    };
    let body = json!({ "kind": "bound", "packing": label, "rows": rows });
    let mut out = Outcome::new(Body::Json(body), table);
    out.inputs = out_inputs;
    out.resolved = res;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    /// Reported but not counted as a failure.
    Warn,
    Skipped,
}

#[derive(Serialize)]
struct Check {
    name: String,
    status: Status,
    detail: String,
    metrics: Value,
}

fn check(name: impl Into<String>, ok: bool, detail: impl Into<String>, metrics: Value) -> Check {
    Check { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into(), metrics }
}

fn skipped(name: &str, why: &str) -> Check {
    Check { name: name.into(), status: Status::Skipped, detail: why.into(), metrics: Value::Null }
}

/// Half-width of the box sampled by the coverage check.
const COVERAGE_HALF: f64 = 1.0;
/// Reach of the regions met by the coverage box.
const COVERAGE_REACH: f64 = 8.0;
/// Largest failure rate accepted by the coverage check.
const COVERAGE_RATE: f64 = 1e-4;

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let p = load(&a.sel.input)?;
    let mut plan = plan(&p, &a.sel.vertices, a.sel.focus)?;
    let vs = plan.vertices.clone();
    let coverage_box = vs.get(vs.len() / 2).map(|&v| Aabb::cube(p.centers[v], COVERAGE_HALF));
    if let Some(b) = coverage_box {
        plan.focus = Some(union(plan.focus, b.inflate(COVERAGE_REACH + 1e-6)));
    }
    let dec = build(&p, plan.focus)?;
    let mut checks = Vec::new();

    let val = validate(&p);
    checks.push(check(
        "packing",
        val.ok(),
        format!("min distance {}, {} holes", val.min_distance.map(fmt_f64).unwrap_or_default(), val.hole_count),
        serde_json::to_value(&val)?,
    ));

    for scheme in ScoreScheme::all_default() {
        let name = format!("admissibility:{scheme}");
        if vs.is_empty() && scheme != ScoreScheme::Hf {
            checks.push(skipped(&name, "no interior vertex"));
            continue;
        }
        let r = check_admissibility(&dec, &scheme, &vs)?;
        let detail = format!("{} regions, max residual {:e}, {} violations", r.regions_checked, r.max_residual, r.violations.len());
        let metrics = json!({
            "regions_checked": r.regions_checked, "max_residual": r.max_residual,
            "observed_locality": r.observed_locality, "violations": r.violations.iter().take(20).collect::<Vec<_>>(),
        });
        let mut c = check(name, r.ok(), detail, metrics);
        // Equal-share averaging is only admissible where neighbor counts agree.
        if scheme == ScoreScheme::Hsiang && !r.ok() {
            c.status = Status::Warn;
        }
        checks.push(c);
    }

    let overlaps = overlapping_pairs(&p, &dec.dsystem, false);
    let is_qr = |i: usize| dec.dsystem.tetra[i].kind == SimplexKind::Qr;
    let qr_pairs: Vec<_> = overlaps.iter().filter(|o| is_qr(o.0) && is_qr(o.1)).collect();
    checks.push(check("qr-non-overlap", qr_pairs.is_empty(), format!("{} overlapping pairs", qr_pairs.len()), json!(qr_pairs)));
    checks.push(check(
        "d-system-non-overlap",
        overlaps.is_empty(),
        format!("{} overlapping pairs among {} members", overlaps.len(), dec.dsystem.len()),
        json!(overlaps),
    ));
    let partial = partial_spines(&dec.catalog, &dec.dsystem);
    checks.push(check("common-spine", partial.is_empty(), format!("{} partial spines", partial.len()), json!(partial)));
    let tips = &dec.tips;
    checks.push(Check {
        name: "tips".into(),
        status: if tips.anomalies.is_empty() && tips.overlapping.is_empty() { Status::Pass } else { Status::Warn },
        detail: format!("{} tips, {} anomalies, {} overlapping", tips.tips.len(), tips.anomalies.len(), tips.overlapping.len()),
        metrics: json!({ "anomalies": tips.anomalies, "overlapping": tips.overlapping }),
    });

    if vs.is_empty() {
        checks.push(skipped("decoupling", "no interior vertex"));
    } else {
        let reps: Vec<_> = vs.par_iter().map(|&v| check_decoupling_truncation(&dec, v)).collect::<Result<_, _>>()?;
        let bad: Vec<usize> = reps.iter().filter(|r| !r.ok()).map(|r| r.vertex).collect();
        let faces: usize = reps.iter().map(|r| r.faces.len()).sum();
        let nonconvex: usize = reps.iter().map(|r| r.skipped_nonconvex).sum();
        checks.push(check(
            "decoupling",
            bad.is_empty(),
            format!("{faces} convex faces checked, {nonconvex} non-convex skipped, {} vertices fail", bad.len()),
            json!({ "failing_vertices": bad }),
        ));
    }

    match coverage_box {
        Some(b) => {
            let r = mc_partition_coverage(&dec, &b, a.samples, a.seed)?;
            checks.push(check(
                "coverage",
                r.failure_rate < COVERAGE_RATE,
                format!("{} samples, {} uncovered, {} multiply covered", r.samples, r.uncovered, r.multiple),
                serde_json::to_value(&r)?,
            ));
        }
        None => checks.push(skipped("coverage", "no interior vertex")),
    }

    checks.push(telescoping_check(&p, a.telescoping_side)?);
    checks.push(oracle_check(&dec, &vs, a)?);

    let failures: Vec<Value> = checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .map(|c| json!({ "check": c.name, "detail": c.detail }))
        .collect();
    let rows = checks
        .iter()
        .map(|c| vec![c.name.clone(), serde_json::to_value(c.status).unwrap_or_default().as_str().unwrap_or("").into(), c.detail.clone()])
        .collect();
    let body = json!({
        "kind": "verify",
        "packing": packing_summary(&p),
        "focus": plan.focus,
        "vertices": vs.len(),
        "ok": failures.is_empty(),
        "checks": checks,
        "failures": failures,
    });
    let mut out = Outcome::new(Body::Json(body), Table { header: vec!["check", "status", "detail"], rows });
    out.failures = failures;
    out.seeds.push(a.seed);
    out.inputs.push(a.sel.input.clone());
    out.resolved = resolved(&plan);
    Ok(out)
}

fn telescoping_check(p: &Packing, max_side: f64) -> Result<Check> {
    const NAME: &str = "telescoping";
    if max_side.is_nan() || max_side <= 0.0 {
        return Ok(skipped(NAME, "disabled"));
    }
    let e = p.domain.extent();
    let room = 0.5 * e.x.min(e.y).min(e.z) - interior_margin() - 1e-3;
    let side = max_side.min(2.0 * room);
    if side < 2.0 {
        return Ok(skipped(NAME, "domain too small for a cube with the required margin"));
    }
    let r = telescoping_series(p, p.domain.center(), &[side], &ScoreScheme::Hf)?.remove(0);
    let tol = 1e-9 * (r.regions.max(1) as f64);
    Ok(check(
        NAME,
        r.interior_identity.abs() <= tol,
        format!("side {side}, residual/T² {:.6}, interior identity {:e}", r.residual / (side * side), r.interior_identity),
        serde_json::to_value(&r)?,
    ))
}

fn oracle_check(dec: &Decomposition, vs: &[usize], a: &VerifyArgs) -> Result<Check> {
    const NAME: &str = "oracle";
    if vs.is_empty() || a.oracle_regions == 0 {
        return Ok(skipped(NAME, "no interior vertex"));
    }
    let p = &dec.packing;
    let mut ids = BTreeSet::new();
    for &v in vs {
        ids.extend(dec.dsystem.incident(v).iter().copied());
    }
    let mut regions: Vec<(String, Region, f64)> = Vec::new();
    for id in ids.into_iter().take(a.oracle_regions) {
        let t = dec.dsystem.tetra[id].tetra(p);
        regions.push((format!("d_tetra {id}"), Region::new(None, vec![t.to_polyhedron()]), gamma_tetra(&t)?));
    }
    for &v in vs.iter().take(a.oracle_regions) {
        let c = dec.v_cell(v)?;
        let exact = compression(&c.region, dec);
        regions.push((format!("v_cell {v}"), c.region, exact));
    }
    let rows: Vec<Value> = regions
        .par_iter()
        .enumerate()
        .map(|(i, (name, r, exact))| {
            let centers: Vec<Point3> = centers_near(r, dec);
            let e = mc_compression(r, &centers, a.oracle_samples, split_seed(a.seed, i as u64))?;
            Ok(json!({ "region": name, "exact": exact, "estimate": e.value, "stderr": e.stderr, "z": e.z_score(*exact) }))
        })
        .collect::<Result<_, kepler_core::Error>>()?;
    let worst = rows.iter().filter_map(|r| r["z"].as_f64()).map(f64::abs).fold(0.0, f64::max);
    let bad = rows.iter().filter(|r| !(r["z"].as_f64().is_some_and(|z| z.abs() <= a.sigmas))).count();
    Ok(check(
        NAME,
        bad == 0,
        format!("{} regions, worst |z| {worst:.3}, {bad} beyond {} sigma", rows.len(), a.sigmas),
        json!(rows),
    ))
}

pub fn report(a: &ReportArgs) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for path in &a.inputs {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let file = path.display().to_string();
        let mut push = |section: String, key: &str, value: &Value| {
            rows.push(vec![file.clone(), section, key.to_string(), cell(value)]);
        };
        let kind = v["kind"].as_str().unwrap_or("").to_string();
        let mut summary = serde_json::Map::new();
        match kind.as_str() {
            "score" => {
                let mut per = Vec::new();
                for s in v["schemes"].as_array().into_iter().flatten() {
                    let name = scheme_name(&s["scheme"]);
                    for k in ["vertices", "max", "argmax", "min", "mean"] {
                        push(name.clone(), k, &s[k]);
                    }
                    per.push(json!({
                        "scheme": name, "vertices": s["vertices"], "max": s["max"], "argmax": s["argmax"],
                        "min": s["min"], "mean": s["mean"],
                    }));
                }
                summary.insert("schemes".into(), json!(per));
                summary.insert("failures".into(), json!(v["failures"].as_array().map_or(0, Vec::len)));
            }
            "bound" => {
                for r in v["rows"].as_array().into_iter().flatten() {
                    let name = scheme_name(&r["scheme"]);
                    for k in ["theta", "f"] {
                        push(name.clone(), k, &r[k]);
                    }
                }
                summary.insert("rows".into(), v["rows"].clone());
            }
            "verify" => {
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for c in v["checks"].as_array().into_iter().flatten() {
                    let st = c["status"].as_str().unwrap_or("").to_string();
                    push(c["name"].as_str().unwrap_or("").to_string(), "status", &c["status"]);
                    *counts.entry(st).or_default() += 1;
                }
                summary.insert("status_counts".into(), json!(counts));
                summary.insert("ok".into(), v["ok"].clone());
                summary.insert("failures".into(), v["failures"].clone());
            }
            "decompose" => {
                for k in ["qr", "ql", "spines", "octahedra", "live_octahedra"] {
                    push("catalog".into(), k, &v["catalog"][k]);
                }
                push("d_system".into(), "members", &v["d_system"]["members"]);
                push("v_cells".into(), "count", &json!(v["v_cells"].as_array().map_or(0, Vec::len)));
                let anomalies = &v["anomalies"];
                let n = |k: &str| anomalies[k].as_array().map_or(0, Vec::len);
                let counts = json!({
                    "tips": n("tips"), "overlapping_tips": n("overlapping_tips"),
                    "overlapping_members": n("overlapping_members"), "partial_spines": n("partial_spines"),
                });
                push("anomalies".into(), "total", &json!(n("tips") + n("overlapping_tips") + n("overlapping_members") + n("partial_spines")));
                summary.insert("catalog".into(), v["catalog"].clone());
                summary.insert("d_system_members".into(), v["d_system"]["members"].clone());
                summary.insert("anomalies".into(), counts);
            }
            _ => bail!("{file}: not a result file of decompose, score, bound or verify"),
        }
        files.push(json!({ "file": file, "kind": kind, "packing": v["packing"], "summary": summary }));
    }
    let body = json!({ "kind": "report", "files": files });
    let mut out = Outcome::new(Body::Json(body), Table { header: vec!["file", "section", "key", "value"], rows });
    out.inputs = a.inputs.clone();
    Ok(out)
}

fn scheme_name(v: &Value) -> String {
    serde_json::from_value::<ScoreScheme>(v.clone()).map(|s| s.to_string()).unwrap_or_else(|_| v.to_string())
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map(fmt_f64).unwrap_or_else(|| n.to_string()),
        other => other.to_string(),
    }
}
