//! Regression fixtures: worked examples and published constants bound to
//! runnable checks, grouped by acceptance criterion.
//!
//! Every check reads its constants from [`Fixture::expected`], so editing a
//! constant makes that row fail.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::brauer::{
    algebra_generators, bm_verdict, cor_invariant, global_pairing_check, hilbert_symbol_q, invariant_profile,
    sum_over_places, support_places, EvalPoint, Invariant, IsotropyConfig, Place, ProfileConfig, SamplePoint,
    VerdictKind,
};
use crate::density::{compare_scan, cp_closed_form, cp_count, euler_product, scan_admissible, DensitySetup, Predicate};
use crate::descent::pell::{expand_classes, pell_solve, PellOutcome, PellProblem, QuadInt};
use crate::descent::{search_integral_points, ConditionEvidence, SearchKind};
use crate::local::{enumerate_points_mod, local_report, AffinePointMod, LocalWitness, Verdict};
use crate::numeric::arith::{exact_sqrt_i128, primes_up_to};
use crate::picard::{fixed_lattice, h1, linalg, picard_u_module, picard_x_module};
use crate::surface::{
    assumption_33, coefficients_from_k, intersection_number, line, lines_of_x, verify_on_surface, LineLabel,
    ParamVector, SurfaceSpec,
};

type Check = fn(&Value) -> Result<String, String>;

pub struct Fixture {
    pub name: &'static str,
    pub criterion: u8,
    pub summary: &'static str,
    pub expected: Value,
    /// Wall-clock limit in seconds.
    pub limit_secs: f64,
    check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub criterion: u8,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: u8,
    pub passed: bool,
    pub fixtures: Vec<String>,
}

fn fixture(name: &'static str, criterion: u8, summary: &'static str, limit_secs: f64, expected: Value, check: Check) -> Fixture {
    Fixture {
        name,
        criterion,
        summary,
        expected,
        limit_secs,
        check,
    }
}

/// The full corpus, in criterion order.
pub fn corpus() -> Vec<Fixture> {
    vec![
        fixture(
            "coefficients-127-5-725-1445",
            1,
            "coefficients (a, b, c, d) from k, exact",
            1.0,
            json!({"k": [127, 5, 725, 1445], "coefficients": ["1048260", "187140", "99300", "-667871675"], "max_ms": 1.0}),
            check_coefficients,
        ),
        fixture(
            "point-3019-5-5-5",
            2,
            "(24, 409, 672) lies on the surface and the box search finds a point",
            600.0,
            json!({"k": [3019, 5, 5, 5], "point": ["24", "409", "672"]}),
            check_point,
        ),
        fixture(
            "empty-127-5-725-1445",
            3,
            "box search certifies no integral point",
            3600.0,
            json!({"k": [127, 5, 725, 1445]}),
            check_empty,
        ),
        fixture(
            "empty-2011-5-5-5",
            3,
            "box search certifies no integral point",
            3600.0,
            json!({"k": [2011, 5, 5, 5]}),
            check_empty,
        ),
        fixture(
            "empty-127-5-5-5",
            3,
            "box search certifies no integral point",
            3600.0,
            json!({"k": [127, 5, 5, 5]}),
            check_empty,
        ),
        fixture(
            "cohomology",
            4,
            "H¹ of the Picard lattices and the fixed lattice of ⟨σ2, σ3, σ4⟩",
            1.0,
            json!({
                "h1_x_full": [2],
                "h1_u_full": [2],
                "h1_x_sigma4": [],
                "fixed_sigma234": [[0, 1, 1, 0, 0, 0, 0], [1, 0, 0, -1, 0, 0, 0], [2, 0, 0, 0, -1, -1, 0], [0, 0, 0, 0, 0, 0, 1]]
            }),
            check_cohomology,
        ),
        fixture(
            "lines-127-5-725-1445",
            5,
            "27 lines on the surface, six skew lines, conjugate intersection table",
            30.0,
            json!({
                "k": [127, 5, 725, 1445],
                "skew": ["l1(1,1)", "l1(1,-1)", "l3(-1,1)", "l4(-1,-1)", "l4(-1,1)", "L2"],
                "intersections": [
                    [1, 1, [0, 1, 1, 0, 0, 0]],
                    [1, 2, [1, 0, 1, 0, 0, 0]],
                    [1, 3, [1, 1, 0, 0, 0, 0]],
                    [3, 3, [0, 0, 0, 1, 1, 0]],
                    [3, 4, [0, 0, 1, 0, 1, 0]],
                    [3, 5, [0, 0, 1, 1, 0, 0]]
                ]
            }),
            check_lines,
        ),
        fixture(
            "local-135775-13663-14405-31829",
            6,
            "all places locally solvable, witnesses from (1, 0, 0) at 2 and 3",
            60.0,
            json!({"k": [135775, 13663, 14405, 31829], "prime_bound": 50, "witness_2": {"N": 3, "coords": ["1", "0", "0"]}, "witness_3": {"coords": ["1", "0", "0"]}}),
            check_local,
        ),
        fixture(
            "invariants-at-11",
            7,
            "the invariant of the first algebra takes both values at 11; verdict",
            300.0,
            json!({
                "k": [135775, 13663, 14405, 31829],
                "p": 11,
                "attainable": [["0"], ["1/2"]],
                "origins": {"1/2": "k2+p", "0": "x ≢ k2"},
                "verdict": "ObstructionToSAOnly"
            }),
            check_profile_11,
        ),
        fixture(
            "multisets-2011-5-5-5",
            8,
            "invariant multisets of the three special generators at 2 and 3",
            600.0,
            json!({"k": [2011, 5, 5, 5], "precision_2": 8, "min_samples_2": 200, "multiset_2": ["0", "1/2", "1/2"], "precision_3": 4, "min_zero_3": 2}),
            check_multisets,
        ),
        fixture(
            "density-constants",
            9,
            "c_p equals its closed form for 3 < p ≤ 50; brute force over (Z/p)^4",
            600.0,
            json!({"bound": 50, "values": {"2": 0, "3": 0, "5": 513, "7": 2225}}),
            check_density_constants,
        ),
        fixture(
            "reciprocity",
            10,
            "product formula on random pairs, Steinberg relation, pairing at (24, 409, 672)",
            600.0,
            json!({"pairs": 200, "seed": 7, "steinberg": 200, "steinberg_seed": 11, "k": [3019, 5, 5, 5], "point": ["24", "409", "672"]}),
            check_reciprocity,
        ),
        fixture(
            "pell-oracle",
            11,
            "class expansion equals brute force on random norm equations",
            600.0,
            json!({"cases": 100, "seed": 2024, "d_max": 200, "n_max": 500, "bound": 1_000_000}),
            check_pell,
        ),
        fixture(
            "density-scan-200",
            12,
            "box count at M = 200 inside the density interval with 25% slack",
            600.0,
            json!({"m": 200, "cutoff": 10_000, "slack": 0.25, "predicate": "gcd"}),
            check_density_scan,
        ),
        fixture(
            "non-squareness",
            12,
            "non-squareness predicate on the worked examples and degenerate vectors",
            60.0,
            json!({"holds": [[127, 5, 725, 1445], [135775, 13663, 14405, 31829]], "fails": [[2011, 5, 5, 5], [3019, 5, 5, 5], [3, 7, 5, 9], [2, 5, 7, 9]]}),
            check_non_squareness,
        ),
    ]
}

/// Runs one fixture, turning panics and overruns into failures.
pub fn run_fixture(f: &Fixture) -> FixtureResult {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| (f.check)(&f.expected)))
        .unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if passed && seconds > f.limit_secs {
        passed = false;
        detail = format!("{detail}; took {seconds:.2} s, limit {} s", f.limit_secs);
    }
    FixtureResult {
        name: f.name.into(),
        criterion: f.criterion,
        passed,
        seconds,
        detail,
    }
}

/// Runs the fixtures whose name contains `filter`.
pub fn run(fixtures: &[Fixture], filter: Option<&str>) -> Vec<FixtureResult> {
    fixtures
        .iter()
        .filter(|f| filter.map_or(true, |s| f.name.contains(s)))
        .map(run_fixture)
        .collect()
}

pub fn by_criterion(results: &[FixtureResult]) -> Vec<CriterionResult> {
    let crits: BTreeSet<u8> = results.iter().map(|r| r.criterion).collect();
    crits
        .into_iter()
        .map(|c| {
            let rs: Vec<_> = results.iter().filter(|r| r.criterion == c).collect();
            CriterionResult {
                criterion: c,
                passed: rs.iter().all(|r| r.passed),
                fixtures: rs.iter().map(|r| r.name.clone()).collect(),
            }
        })
        .collect()
}

// ---- helpers reading constants ----

fn k_of(v: &Value) -> Result<[i64; 4], String> {
    serde_json::from_value(v["k"].clone()).map_err(|e| format!("bad k: {e}"))
}

fn spec_of(v: &Value) -> Result<SurfaceSpec, String> {
    SurfaceSpec::from_k(k_of(v)?).map_err(|e| e.to_string())
}

fn big(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::String(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        Value::Number(n) => n.to_string().parse().map_err(|_| format!("bad integer {n}")),
        _ => Err(format!("not an integer: {v}")),
    }
}

fn point_of(v: &Value) -> Result<[BigInt; 3], String> {
    let a = v.as_array().filter(|a| a.len() == 3).ok_or("point needs three coordinates")?;
    Ok([big(&a[0])?, big(&a[1])?, big(&a[2])?])
}

fn u64_of(v: &Value, key: &str) -> Result<u64, String> {
    v[key].as_u64().ok_or_else(|| format!("missing {key}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_point(p: &[BigInt; 3]) -> String {
    format!("({}, {}, {})", p[0], p[1], p[2])
}

// ---- checks ----

fn check_coefficients(v: &Value) -> Result<String, String> {
    let k = ParamVector(k_of(v)?);
    let want: Vec<BigInt> = v["coefficients"].as_array().ok_or("coefficients")?.iter().map(big).collect::<Result<_, _>>()?;
    let mut best = f64::INFINITY;
    let mut got = coefficients_from_k(&k);
    for _ in 0..20 {
        let t = Instant::now();
        got = coefficients_from_k(&k);
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
    }
    let have = vec![got.a.clone(), got.b.clone(), got.c.clone(), got.d.clone()];
    ensure(have == want, || format!("got ({}, {}, {}, {})", got.a, got.b, got.c, got.d))?;
    let max_ms = v["max_ms"].as_f64().unwrap_or(1.0);
    ensure(best < max_ms, || format!("{best:.3} ms ≥ {max_ms} ms"))?;
    Ok(format!("({}, {}, {}, {}) in {best:.4} ms", got.a, got.b, got.c, got.d))
}

fn check_point(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let p = point_of(&v["point"])?;
    ensure(spec.contains(&p), || format!("{} is not on the surface", fmt_point(&p)))?;
    let cert = search_integral_points(&spec).map_err(|e| e.to_string())?;
    match &cert.kind {
        SearchKind::PointFound { point } => {
            ensure(spec.contains(point), || format!("search returned {} off the surface", fmt_point(point)))?;
            Ok(format!("search found {}{}", fmt_point(point), if *point == p { " (the listed point)" } else { "" }))
        }
        other => Err(format!("search returned {other:?}")),
    }
}

fn check_empty(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let cert = search_integral_points(&spec).map_err(|e| e.to_string())?;
    let mut slices = 0;
    let mut pairs = 0u64;
    for ev in &cert.evidence {
        match ev {
            ConditionEvidence::Slices { slices: s, .. } => {
                for r in s {
                    ensure(!r.is_inconclusive(), || format!("slice {} = {} undecided", r.axis.name(), r.value))?;
                }
                slices += s.len();
            }
            ConditionEvidence::PairScan { inconclusive, pairs: n, .. } => {
                ensure(inconclusive.is_none(), || format!("scan undecided: {inconclusive:?}"))?;
                pairs += n;
            }
        }
    }
    ensure(cert.is_empty_certified(), || format!("search returned {:?}", cert.kind))?;
    Ok(format!("empty: {slices} slices decided, {pairs} pairs scanned"))
}

fn check_cohomology(v: &Value) -> Result<String, String> {
    let factors = |key: &str| -> Result<Vec<u64>, String> { serde_json::from_value(v[key].clone()).map_err(|e| e.to_string()) };
    let x = picard_x_module();
    let u = picard_u_module();
    let hx = h1(&x, &[1, 2, 3, 4]).map_err(|e| e.to_string())?;
    let hu = h1(&u, &[1, 2, 3, 4]).map_err(|e| e.to_string())?;
    let h4 = h1(&x, &[4]).map_err(|e| e.to_string())?;
    ensure(hx.invariant_factors == factors("h1_x_full")?, || format!("H¹(Pic X̄) = {hx}"))?;
    ensure(hu.invariant_factors == factors("h1_u_full")?, || format!("H¹(Pic Ū) = {hu}"))?;
    ensure(h4.invariant_factors == factors("h1_x_sigma4")?, || format!("H¹(Pic X̄, ⟨σ4⟩) = {h4}"))?;
    let cols: Vec<Vec<i64>> = serde_json::from_value(v["fixed_sigma234"].clone()).map_err(|e| e.to_string())?;
    let cols: Vec<Vec<BigInt>> = cols.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let want = linalg::from_columns(&cols, 7);
    let fixed = fixed_lattice(&x, &[2, 3, 4]);
    ensure(linalg::same_lattice(&fixed, &want), || format!("fixed lattice {fixed:?}"))?;
    Ok(format!("H¹(X) = {hx}, H¹(U) = {hu}, H¹(X, σ4) = {h4}, fixed lattice of rank {}", cols.len()))
}

fn check_lines(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let err = |e: crate::Error| e.to_string();
    let lines = lines_of_x(&spec).map_err(err)?;
    ensure(lines.len() == 27, || format!("{} lines", lines.len()))?;
    for l in &lines {
        ensure(verify_on_surface(&spec, l).map_err(err)?, || format!("{} is not on the surface", l.label))?;
    }
    let tower = spec.tower().map_err(err)?;
    let labels: Vec<String> = serde_json::from_value(v["skew"].clone()).map_err(|e| e.to_string())?;
    let base = labels
        .iter()
        .map(|s| s.parse::<LineLabel>().and_then(|l| line(&spec, &tower, l)))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            let n = intersection_number(&base[i], &base[j]).map_err(err)?;
            ensure(n == 0, || format!("{} meets {}", base[i].label, base[j].label))?;
        }
    }
    let table: Vec<(usize, usize, Vec<i64>)> = serde_json::from_value(v["intersections"].clone()).map_err(|e| e.to_string())?;
    let mut entries = 0;
    for (sigma, j, row) in &table {
        let conj = base[j - 1].conjugate(*sigma);
        for (m, &want) in row.iter().enumerate() {
            let other = &base[m];
            let got = if conj.same_as(other).map_err(err)? {
                -1
            } else {
                i64::from(intersection_number(&conj, other).map_err(err)?)
            };
            ensure(got == want, || format!("(σ{sigma}(ℓ{j}).ℓ{}) = {got}, expected {want}", m + 1))?;
            entries += 1;
        }
    }
    Ok(format!("27 lines verified, six skew, {entries} intersection entries reproduced"))
}

fn check_local(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let r = local_report(&spec, u64_of(v, "prime_bound")?).map_err(|e| e.to_string())?;
    ensure(r.is_locally_solvable(), || format!("not all solvable; undecided {:?}", r.undecided))?;
    let witness = |p: u64| -> Result<AffinePointMod, String> {
        let e = r.entry(p).ok_or_else(|| format!("no entry at {p}"))?;
        ensure(e.verdict == Verdict::Solvable, || format!("{p}: {}", e.verdict))?;
        match &e.witness {
            Some(LocalWitness::Padic(w)) => Ok(w.clone()),
            _ => Err(format!("no p-adic witness at {p}")),
        }
    };
    let w2 = witness(2)?;
    let w3 = witness(3)?;
    let want2 = point_of(&v["witness_2"]["coords"])?;
    let want3 = point_of(&v["witness_3"]["coords"])?;
    ensure(w2.n as u64 == u64_of(&v["witness_2"], "N")?, || format!("witness at 2 is mod 2^{}", w2.n))?;
    ensure(w2.coords() == want2, || format!("witness at 2 is {}", fmt_point(&w2.coords())))?;
    ensure(w3.coords() == want3, || format!("witness at 3 is {}", fmt_point(&w3.coords())))?;
    ensure(w2.is_hensel_sufficient() && w3.is_hensel_sufficient(), || "witness does not lift".into())?;
    Ok(format!(
        "{} places solvable; {} mod 2^{}, {} mod 3^{}",
        r.entries.len(),
        fmt_point(&w2.coords()),
        w2.n,
        fmt_point(&w3.coords()),
        w3.n
    ))
}

fn check_profile_11(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let p = u64_of(v, "p")?;
    let g = algebra_generators(&spec);
    let prof = invariant_profile(&spec, g.in_play(), &g.algebras[g.in_play().len()..], Place::Prime(p), &ProfileConfig::default())
        .map_err(|e| e.to_string())?;
    let want: BTreeSet<Vec<Invariant>> = serde_json::from_value(v["attainable"].clone()).map_err(|e| e.to_string())?;
    ensure(prof.attainable == want, || format!("attainable {:?}", prof.attainable))?;
    let origins = v["origins"].as_object().ok_or("origins")?;
    for (inv, needle) in origins {
        let inv: Invariant = serde_json::from_value(json!(inv)).map_err(|e| e.to_string())?;
        let s = prof.sample_for(&[inv]).ok_or_else(|| format!("no sample for {inv}"))?;
        let needle = needle.as_str().unwrap_or_default();
        ensure(s.origin.contains(needle), || format!("sample for {inv} built as {:?}", s.origin))?;
        if let SamplePoint::Padic(pt) = &s.point {
            ensure(pt.modulus() > BigInt::zero(), || "bad sample".into())?;
        }
    }
    let verdict = bm_verdict(&spec).map_err(|e| e.to_string())?;
    let want_kind: VerdictKind = serde_json::from_value(v["verdict"].clone()).map_err(|e| e.to_string())?;
    ensure(verdict.kind == want_kind, || format!("verdict {} ({})", verdict.kind, verdict.reason))?;
    Ok(format!("invariants {{0, 1/2}} attained at {p}; verdict {}", verdict.kind))
}

fn special_invariants(spec: &SurfaceSpec, p: u64, n: u32) -> Result<Vec<Vec<Invariant>>, String> {
    let g = algebra_generators(spec);
    let iso = IsotropyConfig::default();
    let filter = |pt: &AffinePointMod| pt.is_hensel_sufficient();
    let pts = enumerate_points_mod(spec, p, n, Some(&filter)).map_err(|e| e.to_string())?;
    let mut out = vec![];
    for pt in &pts {
        let lifted = pt.lift(spec, n + 12).map_err(|e| e.to_string())?;
        let ep = EvalPoint::Local { point: lifted };
        let t: Option<Vec<Invariant>> = g.algebras.iter().map(|a| cor_invariant(a, &ep, Place::Prime(p), &iso).ok()).collect();
        if let Some(t) = t {
            out.push(t);
        }
    }
    Ok(out)
}

fn check_multisets(v: &Value) -> Result<String, String> {
    let spec = spec_of(v)?;
    let at2 = special_invariants(&spec, 2, u64_of(v, "precision_2")? as u32)?;
    let min = u64_of(v, "min_samples_2")? as usize;
    ensure(at2.len() >= min, || format!("only {} residues at 2", at2.len()))?;
    let mut want: Vec<Invariant> = serde_json::from_value(v["multiset_2"].clone()).map_err(|e| e.to_string())?;
    want.sort();
    for t in &at2 {
        let mut s = t.clone();
        s.sort();
        ensure(s == want, || format!("multiset {s:?} at 2"))?;
    }
    let at3 = special_invariants(&spec, 3, u64_of(v, "precision_3")? as u32)?;
    ensure(!at3.is_empty(), || "no residues at 3".into())?;
    let min0 = u64_of(v, "min_zero_3")? as usize;
    for t in &at3 {
        ensure(t.iter().filter(|x| !x.is_half()).count() >= min0, || format!("{t:?} at 3"))?;
    }
    Ok(format!("{} residues at 2, {} at 3", at2.len(), at3.len()))
}

/// Points of `(Z/p)^4` where two of `g(k_i)/3` vanish, `k_i = m·t + r_i`,
/// evaluated in integers.
fn brute_cp(setup: &DensitySetup, p: u64) -> u64 {
    let zero: Vec<Vec<bool>> = setup
        .substitutions
        .iter()
        .map(|s| {
            (0..p)
                .map(|t| {
                    let k = s.modulus as i128 * t as i128 + s.residue as i128;
                    (k * (k * k - 2) * (k * k - 4) / 3) % p as i128 == 0
                })
                .collect()
        })
        .collect();
    let mut hits = 0;
    for a in &zero[0] {
        for b in &zero[1] {
            for c in &zero[2] {
                for d in &zero[3] {
                    hits += (*a as u8 + *b as u8 + *c as u8 + *d as u8 >= 2) as u64;
                }
            }
        }
    }
    hits
}

fn check_density_constants(v: &Value) -> Result<String, String> {
    let bound = u64_of(v, "bound")?;
    let setup = DensitySetup::standard();
    let values = v["values"].as_object().ok_or("values")?;
    for (p, want) in values {
        let p: u64 = p.parse().map_err(|_| format!("bad prime {p}"))?;
        let got = cp_count(&setup, p).map_err(|e| e.to_string())?;
        ensure(Some(got as u64) == want.as_u64(), || format!("c_{p} = {got}, expected {want}"))?;
    }
    let mut n = 0;
    for p in primes_up_to(bound) {
        let got = cp_count(&setup, p).map_err(|e| e.to_string())?;
        let brute = brute_cp(&setup, p);
        ensure(got == brute as u128, || format!("c_{p}: {got} vs brute force {brute}"))?;
        if p > 3 {
            let closed = cp_closed_form(p, None).map_err(|e| e.to_string())?;
            ensure(BigInt::from(got) == closed, || format!("c_{p} = {got}, closed form {closed}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} primes in (3, {bound}] match the closed forms and brute force"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-2000..=2000);
        let d: i64 = rng.gen_range(1..=300);
        if n != 0 {
            return BigRational::new(n.into(), d.into());
        }
    }
}

fn check_reciprocity(v: &Value) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(u64_of(v, "seed")?);
    let pairs = u64_of(v, "pairs")?;
    for _ in 0..pairs {
        let a = random_rational(&mut rng);
        let b = random_rational(&mut rng);
        let places = support_places(&a, &b).ok_or("factorization failed")?;
        let s = sum_over_places(&a, &b, &places).map_err(|e| e.to_string())?;
        ensure(s == Invariant::Zero, || format!("Σ inv_v({a}, {b}) = {s}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(u64_of(v, "steinberg_seed")?);
    let mut checked = 0;
    while checked < u64_of(v, "steinberg")? {
        let a = random_rational(&mut rng);
        let b = BigRational::one() - &a;
        if b.is_zero() {
            continue;
        }
        for place in support_places(&a, &b).ok_or("factorization failed")? {
            let s = hilbert_symbol_q(&a, &b, place).map_err(|e| e.to_string())?;
            ensure(s == Invariant::Zero, || format!("({a}, 1 - a) = {s} at {place}"))?;
        }
        checked += 1;
    }
    let spec = spec_of(v)?;
    let pt = point_of(&v["point"])?;
    let g = algebra_generators(&spec);
    let rep = global_pairing_check(&pt, &g.algebras, &spec, &IsotropyConfig::default()).map_err(|e| e.to_string())?;
    ensure(rep.is_consistent() && rep.total().is_zero(), || format!("pairing sum {}", rep.total()))?;
    Ok(format!("{pairs} pairs, {checked} Steinberg samples, pairing at {} is 0", fmt_point(&pt)))
}

fn brute_norm(d: i64, n: i64, bound: i64) -> BTreeSet<QuadInt> {
    let mut out = BTreeSet::new();
    for u in -bound..=bound {
        let r = (u as i128) * (u as i128) - n as i128;
        if r % d as i128 != 0 || r < 0 {
            continue;
        }
        if let Some(t) = exact_sqrt_i128(r / d as i128) {
            out.insert(QuadInt::new(BigInt::from(u), BigInt::from(t)));
            out.insert(QuadInt::new(BigInt::from(u), BigInt::from(-t)));
        }
    }
    out
}

fn check_pell(v: &Value) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(u64_of(v, "seed")?);
    let (cases, dmax, nmax) = (u64_of(v, "cases")?, u64_of(v, "d_max")? as i64, u64_of(v, "n_max")? as i64);
    let bound = u64_of(v, "bound")? as i64;
    let mut done = 0;
    let mut solutions = 0;
    while done < cases {
        let d = rng.gen_range(2..=dmax);
        let n = rng.gen_range(-nmax..=nmax);
        if n == 0 || exact_sqrt_i128(d as i128).is_some() {
            continue;
        }
        let want = brute_norm(d, n, bound);
        let got = match pell_solve(&PellProblem::new(d, n)).map_err(|e| e.to_string())? {
            PellOutcome::Solutions(c) => expand_classes(&c, &BigInt::from(bound)),
            PellOutcome::EmptyCertified { .. } => BTreeSet::new(),
            PellOutcome::Inconclusive { reason } => return Err(format!("D = {d}, N = {n}: {reason}")),
        };
        ensure(got == want, || format!("D = {d}, N = {n}: {} vs {} solutions", got.len(), want.len()))?;
        solutions += want.len();
        done += 1;
    }
    Ok(format!("{cases} equations agree, {solutions} solutions with |u| ≤ {bound}"))
}

fn check_density_scan(v: &Value) -> Result<String, String> {
    let m = u64_of(v, "m")?;
    let predicate: Predicate = v["predicate"].as_str().unwrap_or("gcd").parse().map_err(|e: crate::Error| e.to_string())?;
    let setup = match predicate {
        Predicate::AssumptionAB { p0 } => DensitySetup::with_p0(p0).map_err(|e| e.to_string())?,
        _ => DensitySetup::standard(),
    };
    let density = euler_product(&setup, u64_of(v, "cutoff")?).map_err(|e| e.to_string())?;
    let scan = scan_admissible(m, predicate).map_err(|e| e.to_string())?;
    let cmp = compare_scan(&scan, &density, v["slack"].as_f64().unwrap_or(0.25));
    let detail = format!(
        "M = {m}: {} of {} candidates pass, ratio {:.4e}, interval [{:.4e}, {:.4e}], expected count {:.3}",
        scan.passing, scan.candidates, cmp.ratio, cmp.lower, cmp.upper, cmp.expected_count
    );
    ensure(cmp.within, || detail.clone())?;
    Ok(detail)
}

fn check_non_squareness(v: &Value) -> Result<String, String> {
    let list = |key: &str| -> Result<Vec<[i64; 4]>, String> { serde_json::from_value(v[key].clone()).map_err(|e| e.to_string()) };
    let holds = list("holds")?;
    let fails = list("fails")?;
    for k in &holds {
        let r = assumption_33(&ParamVector(*k)).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{k:?}: {:?}", r.failures))?;
        ensure(r.evidence.len() == 12, || format!("{k:?}: {} pairs checked", r.evidence.len()))?;
    }
    for k in &fails {
        let r = assumption_33(&ParamVector(*k)).map_err(|e| e.to_string())?;
        ensure(!r.holds, || format!("{k:?} unexpectedly passes"))?;
    }
    Ok(format!("{} vectors pass, {} rejected", holds.len(), fails.len()))
}
