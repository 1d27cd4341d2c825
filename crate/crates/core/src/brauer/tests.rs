use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::algebra::invariant_at_value;
use super::hilbert::hilbert_int;
use super::*;
use crate::local::{enumerate_points_mod, AffinePointMod};
use crate::numeric::arith::{exact_sqrt, primes_up_to};
use crate::numeric::squarefree_kernel;
use crate::surface::SurfaceSpec;

const EX41: [i64; 4] = [135775, 13663, 14405, 31829];

fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(b(n), b(d))
}

fn spec(k: [i64; 4]) -> SurfaceSpec {
    SurfaceSpec::from_k(k).unwrap()
}

fn iso() -> IsotropyConfig {
    IsotropyConfig::default()
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-2000..=2000);
        let d: i64 = rng.gen_range(1..=300);
        if n != 0 {
            return q(n, d);
        }
    }
}

fn all_places(a: &BigRational, c: &BigRational) -> Vec<Place> {
    support_places(a, c).expect("small numbers factor")
}

#[test]
fn reciprocity_for_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let a = random_rational(&mut rng);
        let c = random_rational(&mut rng);
        let places = all_places(&a, &c);
        assert_eq!(sum_over_places(&a, &c, &places).unwrap(), Invariant::Zero, "({a}, {c})");
    }
}

#[test]
fn steinberg_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 200 {
        let a = random_rational(&mut rng);
        let c = BigRational::one() - &a;
        if c.is_zero() {
            continue;
        }
        for v in all_places(&a, &c) {
            assert_eq!(hilbert_symbol_q(&a, &c, v).unwrap(), Invariant::Zero, "({a}, 1-a) at {v}");
        }
        checked += 1;
    }
}

#[test]
fn symbol_examples() {
    assert_eq!(hilbert_int(&b(2), &b(11), Place::Prime(11)), Invariant::Half);
    assert_eq!(hilbert_int(&b(-1), &b(-1), Place::Infinity), Invariant::Half);
    assert_eq!(hilbert_int(&b(-1), &b(-1), Place::Prime(2)), Invariant::Half);
    assert_eq!(hilbert_int(&b(-1), &b(-1), Place::Prime(3)), Invariant::Zero);
    for v in [Place::Prime(2), Place::Prime(3), Place::Prime(7), Place::Infinity] {
        assert_eq!(hilbert_int(&b(1), &b(-35), v), Invariant::Zero);
    }
    assert!(hilbert_symbol_q(&q(0, 1), &q(1, 1), Place::Prime(3)).is_err());
}

/// Bounded search for a nontrivial integral zero of `a x² + b y² = z²`.
/// For squarefree coprime `a, b` a zero exists iff one exists with
/// `|x| ≤ √|b|`, `|y| ≤ √|a|`.
fn has_global_zero(a: i64, c: i64) -> bool {
    let bx = (c.abs() as f64).sqrt() as i64 + 1;
    let by = (a.abs() as f64).sqrt() as i64 + 1;
    for x in 0..=bx {
        for y in 0..=by {
            if x == 0 && y == 0 {
                continue;
            }
            let v = a * x * x + c * y * y;
            if v >= 0 && exact_sqrt(&b(v)).is_some() {
                return true;
            }
        }
    }
    false
}

#[test]
fn symbols_agree_with_legendre_bounded_search() {
    let mut seen = [0usize; 2];
    for a in -40i64..=40 {
        for c in -40i64..=40 {
            if a == 0 || c == 0 || a.gcd(&c) != 1 {
                continue;
            }
            let sf = |n: i64| squarefree_kernel(&b(n)).map(|k| k.abs() == b(n.abs())).unwrap_or(false);
            if !sf(a) || !sf(c) {
                continue;
            }
            let (qa, qc) = (q(a, 1), q(c, 1));
            let locally_trivial = all_places(&qa, &qc)
                .into_iter()
                .all(|v| hilbert_symbol_q(&qa, &qc, v).unwrap() == Invariant::Zero);
            assert_eq!(locally_trivial, has_global_zero(a, c), "({a}, {c})");
            seen[locally_trivial as usize] += 1;
        }
    }
    assert!(seen[0] > 100 && seen[1] > 100, "{seen:?}");
}

proptest! {
    #[test]
    fn bimultiplicative_and_symmetric(
        a1 in -500i64..500, a2 in -500i64..500, c in -500i64..500,
        idx in 0usize..6,
    ) {
        prop_assume!(a1 != 0 && a2 != 0 && c != 0);
        let v = [Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(7), Place::Prime(13), Place::Infinity][idx];
        let (x1, x2, y) = (b(a1), b(a2), b(c));
        let lhs = hilbert_int(&(&x1 * &x2), &y, v);
        prop_assert_eq!(lhs, hilbert_int(&x1, &y, v) + hilbert_int(&x2, &y, v));
        prop_assert_eq!(hilbert_int(&x1, &y, v), hilbert_int(&y, &x1, v));
        prop_assert_eq!(hilbert_int(&x1, &(-&x1), v), Invariant::Zero);
    }
}

#[test]
fn local_data_examples() {
    assert!(matches!(quadratic_local_data(&b(15), 3, 4).unwrap(), QuadraticLocalData::Ramified { p: 3, .. }));
    assert!(matches!(quadratic_local_data(&b(15), 5, 4).unwrap(), QuadraticLocalData::Ramified { p: 5, .. }));
    match quadratic_local_data(&b(2), 7, 5).unwrap() {
        QuadraticLocalData::Split { sqrt_d, precision, .. } => {
            let m = b(7).pow(precision);
            assert_eq!((&sqrt_d * &sqrt_d - b(2)).mod_floor(&m), BigInt::zero());
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(quadratic_local_data(&b(3), 5, 2).unwrap(), QuadraticLocalData::Inert { p: 5 }));
    // residue characteristic 2: δ mod 8 decides
    assert!(matches!(quadratic_local_data(&b(17), 2, 5).unwrap(), QuadraticLocalData::Split { .. }));
    assert!(matches!(quadratic_local_data(&b(5 * 16), 2, 5).unwrap(), QuadraticLocalData::Inert { .. }));
    assert!(matches!(quadratic_local_data(&b(12), 2, 5).unwrap(), QuadraticLocalData::Ramified { .. }));
    assert!(matches!(quadratic_local_data(&b(-2), 2, 5).unwrap(), QuadraticLocalData::Ramified { .. }));
    // v_p(D) = 2 with unit square part splits
    assert!(matches!(quadratic_local_data(&b(9 * 7), 3, 3).unwrap(), QuadraticLocalData::Split { .. }));
    assert!(quadratic_local_data(&b(49), 3, 3).is_err());
}

#[test]
fn quadratic_symbol_examples() {
    // ramified place over p with v(a) = 1 and a unit nonresidue b
    let d = b(3 * 5);
    let w = PlaceAbove::Ramified { p: 5 };
    let pi = FElem::from_ints(0, 1);
    let two = FElem::from_ints(2, 0);
    assert_eq!(hilbert_symbol_quadratic_local(&pi, &two, &d, &w, &iso()).unwrap(), Invariant::Half);
    // unit a with square residue
    let four = FElem::from_ints(4, 0);
    assert_eq!(hilbert_symbol_quadratic_local(&four, &two, &d, &w, &iso()).unwrap(), Invariant::Zero);
    let sq = FElem::from_ints(7, 2).mul(&FElem::from_ints(7, 2), &d);
    for w in places_above(&d, Place::Prime(2)).unwrap() {
        assert_eq!(hilbert_symbol_quadratic_local(&sq, &FElem::from_ints(-3, 1), &d, &w, &iso()).unwrap(), Invariant::Zero);
    }
}

fn random_felem(rng: &mut ChaCha8Rng) -> FElem {
    loop {
        let r = q(rng.gen_range(-60..=60), rng.gen_range(1..=4));
        let s = q(rng.gen_range(-30..=30), rng.gen_range(1..=4));
        let e = FElem::new(r, s);
        if !e.is_zero() {
            return e;
        }
    }
}

/// Projection formula: for `b ∈ ℚ`, `Σ_{w|v} (a, b)_w = (N a, b)_v`.
#[test]
fn projection_formula_at_every_place_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let discs = [5i64, 13, 21, 12, 28, -3, -7, 3, 7, 2, 6, -1, 17, 33, 41, 20, 45, 60, 68, 1005];
    let mut kinds = BTreeSet::new();
    for &dv in &discs {
        let d = b(dv);
        for &p in &[2u64, 3, 5, 7, 11, 13] {
            for _ in 0..12 {
                let a = random_felem(&mut rng);
                let c = random_rational(&mut rng);
                let n = a.norm(&d);
                let cf = FElem::new(c.clone(), BigRational::zero());
                let mut lhs = Invariant::Zero;
                for w in places_above(&d, Place::Prime(p)).unwrap() {
                    kinds.insert(format!("{w:?}").split_whitespace().next().unwrap().to_string());
                    lhs += hilbert_symbol_quadratic_local(&a, &cf, &d, &w, &iso()).unwrap();
                }
                let rhs = hilbert_symbol_q(&n, &c, Place::Prime(p)).unwrap();
                assert_eq!(lhs, rhs, "D = {dv}, p = {p}, a = {a:?}, b = {c}");
            }
        }
        let a = random_felem(&mut rng);
        let c = random_rational(&mut rng);
        let cf = FElem::new(c.clone(), BigRational::zero());
        let lhs: Invariant = places_above(&d, Place::Infinity)
            .unwrap()
            .iter()
            .map(|w| hilbert_symbol_quadratic_local(&a, &cf, &d, w, &iso()).unwrap())
            .sum();
        assert_eq!(lhs, hilbert_symbol_q(&a.norm(&d), &c, Place::Infinity).unwrap());
    }
    assert!(kinds.len() >= 3, "{kinds:?}");
}

/// Symbols of two rationals over `F_w` are `[F_w : ℚ_p]` times the base symbol.
#[test]
fn restriction_of_rational_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &dv in &[5i64, 12, -7, 3, 2, 21, 17, 33] {
        let d = b(dv);
        for &p in &[2u64, 3, 5, 7] {
            for _ in 0..10 {
                let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
                let fx = FElem::new(x.clone(), BigRational::zero());
                let fy = FElem::new(y.clone(), BigRational::zero());
                let base = hilbert_symbol_q(&x, &y, Place::Prime(p)).unwrap();
                for w in places_above(&d, Place::Prime(p)).unwrap() {
                    let expect = match w {
                        PlaceAbove::Split { .. } => base,
                        _ => Invariant::Zero,
                    };
                    let got = hilbert_symbol_quadratic_local(&fx, &fy, &d, &w, &iso()).unwrap();
                    assert_eq!(got, expect, "D = {dv}, {w:?}, ({x}, {y})");
                }
            }
        }
    }
}

/// Reciprocity over `F`: the sum over all places of `F` vanishes.
#[test]
fn reciprocity_over_quadratic_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for &dv in &[5i64, 12, -7, 21, 13, -1] {
        let d = b(dv);
        for _ in 0..15 {
            let a = random_felem(&mut rng);
            let c = random_felem(&mut rng);
            let mut primes = BTreeSet::from([2u64]);
            for n in [a.norm(&d), c.norm(&d)] {
                for m in [n.numer(), n.denom()] {
                    for (pr, _) in crate::numeric::factor(m, 100_000).primes {
                        primes.insert(pr.to_u64().unwrap());
                    }
                }
            }
            for (pr, _) in crate::numeric::factor(&d, 1000).primes {
                primes.insert(pr.to_u64().unwrap());
            }
            let mut total = Invariant::Zero;
            for v in primes.into_iter().map(Place::Prime).chain([Place::Infinity]) {
                for w in places_above(&d, v).unwrap() {
                    total += hilbert_symbol_quadratic_local(&a, &c, &d, &w, &iso()).unwrap();
                }
            }
            assert_eq!(total, Invariant::Zero, "D = {dv}, ({a:?}, {c:?})");
        }
    }
}

#[test]
fn embedding_swap_leaves_split_sum_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for &(dv, p) in &[(2i64, 7u64), (17, 2), (5, 11), (21, 5), (33, 2), (7, 3)] {
        let d = b(dv);
        let ws = places_above(&d, Place::Prime(p)).unwrap();
        assert_eq!(ws.len(), 2, "{dv} should split at {p}");
        for _ in 0..30 {
            let (a, c) = (random_felem(&mut rng), random_felem(&mut rng));
            let s1: Invariant = ws.iter().map(|w| hilbert_symbol_quadratic_local(&a, &c, &d, w, &iso()).unwrap()).sum();
            let s2: Invariant = ws
                .iter()
                .map(|w| hilbert_symbol_quadratic_local(&a.conj(), &c.conj(), &d, w, &iso()).unwrap())
                .sum();
            assert_eq!(s1, s2);
            let w0 = PlaceAbove::Split { p, sign: 1 };
            let w1 = PlaceAbove::Split { p, sign: -1 };
            assert_eq!(
                hilbert_symbol_quadratic_local(&a, &c, &d, &w0, &iso()).unwrap(),
                hilbert_symbol_quadratic_local(&a.conj(), &c.conj(), &d, &w1, &iso()).unwrap()
            );
        }
    }
}

#[test]
fn generators_by_shape() {
    let g = algebra_generators(&spec(EX41));
    assert_eq!(g.shape, GeneratorShape::Corestricted);
    assert_eq!(g.algebras.len(), 3);
    assert_eq!(g.in_play().len(), 1);
    let a1 = &g.algebras[0];
    assert_eq!(a1.base_field_disc, (b(135775).pow(2) - 4) * (b(13663).pow(2) - 4));
    assert_eq!(a1.coordinate, Coordinate::X);
    let tower = spec(EX41).tower().unwrap();
    for alg in &g.algebras {
        alg.slot2_multiquad(&tower).unwrap();
    }
    let g = algebra_generators(&spec([2011, 5, 5, 5]));
    assert_eq!(g.shape, GeneratorShape::SpecialCase);
    assert!(g.algebras.iter().all(|a| a.special_case.as_ref().unwrap().m == b(21)));
    assert_eq!(g.in_play().len(), 3);
    assert!(matches!(algebra_generators(&spec([0, 0, 0, 0])).shape, GeneratorShape::Unsupported(_)));
}

/// `α² ≡ d_i` modulo squares of `F`, so the corestriction equals
/// `(N(slot1), k_i² - 4)_p` over `ℚ_p`.
fn oracle_cor(alg: &QuatAlgebraSpec, t: &BigInt, v: Place) -> Invariant {
    let n = alg.slot1_norm(t);
    hilbert_int(&n, &(b(alg.ki) * alg.ki - 4), v)
}

#[test]
fn corestriction_matches_norm_oracle_at_integers() {
    let ks = [EX41, [7, 3, 5, 11], [9, 4, 6, 13], [5, 3, 8, 14], [10, 3, 7, 4]];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut halves = 0;
    let mut total = 0;
    for k in ks {
        let s = spec(k);
        let g = algebra_generators(&s);
        if g.shape != GeneratorShape::Corestricted {
            continue;
        }
        for alg in &g.algebras {
            let mut places: Vec<Place> = primes_up_to(40).into_iter().map(Place::Prime).collect();
            places.push(Place::Infinity);
            for _ in 0..25 {
                let t = b(rng.gen_range(-3000..3000));
                if alg.slot1_norm(&t).is_zero() {
                    continue;
                }
                for &v in &places {
                    let got = invariant_at_value(alg, &t, None, v, &iso()).unwrap();
                    let want = oracle_cor(alg, &t, v);
                    assert_eq!(got, want, "k = {k:?}, {}, t = {t}, at {v}", alg.name);
                    halves += got.is_half() as usize;
                    total += 1;
                }
            }
        }
    }
    assert!(halves > total / 50, "{halves} of {total}");
}

#[test]
fn corestriction_matches_oracle_at_local_points() {
    let s = spec(EX41);
    let g = algebra_generators(&s);
    for p in [2u64, 3, 5, 11] {
        let n = if p == 2 { 6 } else { 3 };
        let filter = |pt: &AffinePointMod| pt.is_hensel_sufficient();
        let pts = enumerate_points_mod(&s, p, n, Some(&filter)).unwrap();
        for pt in pts.iter().take(150) {
            let lifted = pt.lift(&s, n + 10).unwrap();
            for alg in &g.algebras {
                let t = &lifted.coords()[alg.coordinate.index()];
                match cor_invariant(alg, &EvalPoint::Local { point: lifted.clone() }, Place::Prime(p), &iso()) {
                    Ok(v) => assert_eq!(v, oracle_cor(alg, t, Place::Prime(p)), "p = {p}, {}", alg.name),
                    Err(crate::Error::Precision(_)) | Err(crate::Error::OutsideLocus(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn example_fixture_profile_at_eleven() {
    let s = spec(EX41);
    let g = algebra_generators(&s);
    let prof = invariant_profile(&s, g.in_play(), &g.algebras[1..], Place::Prime(11), &ProfileConfig::default()).unwrap();
    let want: BTreeSet<Vec<Invariant>> = [vec![Invariant::Zero], vec![Invariant::Half]].into();
    assert_eq!(prof.attainable, want);
    assert!(prof.is_complete());
    let half = prof.sample_for(&[Invariant::Half]).unwrap();
    assert!(half.origin.contains("k2+p"), "{}", half.origin);
    let zero = prof.sample_for(&[Invariant::Zero]).unwrap();
    assert!(zero.origin.contains("x ≢ k2"), "{}", zero.origin);
    // the sample points are genuine: re-evaluate the in-play algebra
    for sample in &prof.samples {
        let SamplePoint::Padic(pt) = &sample.point else { panic!() };
        assert_eq!(s.eval(&pt.x, &pt.y, &pt.z).mod_floor(&pt.modulus()), BigInt::zero());
        let t = &pt.coords()[0];
        assert_eq!(oracle_cor(&g.algebras[0], t, Place::Prime(11)), sample.tuple[0]);
    }
    let cc = prof.cross_check.unwrap();
    eprintln!("A1/A2/A3 cross-check at 11: {cc:?}");
    assert!(cc.points > 0);
}

#[test]
fn good_prime_profile_is_zero() {
    let s = spec(EX41);
    let g = algebra_generators(&s);
    let (places, _) = candidate_places(&s, &g.algebras);
    for p in verdict::excluded_primes_up_to(&s, 60).into_iter().take(4) {
        assert!(!places.contains(&Place::Prime(p)));
        let prof = invariant_profile(&s, g.in_play(), &[], Place::Prime(p), &ProfileConfig::default()).unwrap();
        assert_eq!(prof.attainable, BTreeSet::from([vec![Invariant::Zero]]), "p = {p}");
    }
}

fn special_triples(k: [i64; 4], p: u64, n: u32) -> Vec<Vec<Invariant>> {
    let s = spec(k);
    let g = algebra_generators(&s);
    let filter = |pt: &AffinePointMod| pt.is_hensel_sufficient();
    let pts = enumerate_points_mod(&s, p, n, Some(&filter)).unwrap();
    let mut out = Vec::new();
    for pt in &pts {
        let lifted = pt.lift(&s, n + 12).unwrap();
        let ep = EvalPoint::Local { point: lifted };
        let t: Option<Vec<Invariant>> =
            g.algebras.iter().map(|a| cor_invariant(a, &ep, Place::Prime(p), &iso()).ok()).collect();
        if let Some(t) = t {
            out.push(t);
        }
    }
    out
}

#[test]
fn special_case_multisets_at_two_and_three() {
    for k in [[2011, 5, 5, 5], [3019, 5, 5, 5]] {
        let at2 = special_triples(k, 2, 8);
        assert!(at2.len() >= 200, "{} residues", at2.len());
        for t in &at2 {
            let mut t = t.clone();
            t.sort();
            assert_eq!(t, vec![Invariant::Zero, Invariant::Half, Invariant::Half], "k = {k:?}");
        }
        let at3 = special_triples(k, 3, 4);
        assert!(!at3.is_empty());
        for t in &at3 {
            assert!(t.iter().filter(|v| !v.is_half()).count() >= 2, "k = {k:?}: {t:?}");
        }
    }
}

#[test]
fn pairing_at_global_point_vanishes() {
    let s = spec([3019, 5, 5, 5]);
    let g = algebra_generators(&s);
    let pt = [b(24), b(409), b(672)];
    let rep = global_pairing_check(&pt, &g.algebras, &s, &iso()).unwrap();
    assert!(rep.is_consistent());
    assert_eq!(rep.total(), BigRational::zero());
    // negative control: flip one local term
    let mut bad = rep.clone();
    let term = &mut bad.algebras[0].terms[0];
    term.invariant = term.invariant + Invariant::Half;
    assert!(!bad.is_consistent());
    assert_eq!(bad.total(), q(1, 2));
    assert!(global_pairing_check(&[b(1), b(2), b(3)], &g.algebras, &s, &iso()).is_err());
}

#[test]
fn pairing_on_corestricted_algebras_at_integral_points() {
    // integral points of a degree-16 surface found by a small scan
    let s = spec([3, 4, 5, 6]);
    let g = algebra_generators(&s);
    assert_eq!(g.shape, GeneratorShape::Corestricted);
    let mut found = 0;
    for y in -60i64..60 {
        for z in -60i64..60 {
            let (yb, zb) = (b(y), b(z));
            let bq = &yb * &zb - &s.a;
            let cq = &yb * &yb + &zb * &zb - &s.b * &yb - &s.c * &zb - &s.d;
            let disc: BigInt = &bq * &bq - 4 * &cq;
            if disc.is_negative() {
                continue;
            }
            let Some(r) = exact_sqrt(&disc) else { continue };
            if (&r - &bq).is_odd() {
                continue;
            }
            let x = (-&bq + &r) / 2;
            let pt = [x, yb, zb];
            if g.algebras.iter().any(|a| {
                let t = &pt[a.coordinate.index()];
                a.slot1_norm(t).is_zero()
            }) {
                continue;
            }
            let rep = global_pairing_check(&pt, &g.algebras, &s, &iso()).unwrap();
            assert!(rep.is_consistent(), "{pt:?}: {rep:?}");
            found += 1;
        }
    }
    assert!(found > 5, "{found}");
}

#[test]
fn verdict_for_fixture_is_sa_only() {
    let v = bm_verdict(&spec(EX41)).unwrap();
    eprintln!("{}", serde_json::to_string_pretty(&v.assumptions_used).unwrap());
    assert_eq!(v.kind, VerdictKind::ObstructionToSAOnly, "{}", v.reason);
    let p11 = v.profile(Place::Prime(11)).unwrap();
    assert_eq!(p11.attainable.len(), 2);
    assert!(v.spot_checks.iter().all(|s| s.agrees));
}

#[test]
fn verdicts_for_special_case_examples() {
    for k in [[3019, 5, 5, 5], [2011, 5, 5, 5]] {
        let v = bm_verdict(&spec(k)).unwrap();
        assert_eq!(v.kind, VerdictKind::ObstructionToSAOnly, "{k:?}: {}", v.reason);
        assert_eq!(v.scope, "algebraic");
        let z = v.zero_sum.as_ref().unwrap();
        let mut sum = vec![Invariant::Zero; 3];
        for sel in z {
            for (acc, x) in sum.iter_mut().zip(&sel.tuple) {
                *acc += *x;
            }
        }
        assert!(sum.iter().all(|x| !x.is_half()));
        let two = v.profile(Place::Prime(2)).unwrap();
        for t in &two.attainable {
            assert_eq!(t.iter().filter(|x| x.is_half()).count(), 2);
        }
    }
}

#[test]
fn verdict_json_shape() {
    let v = bm_verdict(&spec([3019, 5, 5, 5])).unwrap();
    let j = serde_json::to_value(&v).unwrap();
    assert_eq!(j["kind"], "ObstructionToSAOnly");
    let places = j["places"].as_array().unwrap();
    assert!(places.iter().any(|p| p["place"] == "inf"));
    assert!(places.iter().all(|p| p["attainable"].is_array() && p["samples"].is_array()));
    assert!(j["assumptions_used"].is_array());
    let back: BMVerdict = serde_json::from_value(j).unwrap();
    assert_eq!(back, v);
}

#[test]
fn unsupported_shape_is_an_error() {
    assert!(bm_verdict(&spec([5, 5, 5, 5])).is_err());
}

#[test]
fn invariant_and_place_round_trip() {
    for v in [Invariant::Zero, Invariant::Half] {
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Invariant>(&s).unwrap(), v);
    }
    assert_eq!("inf".parse::<Place>().unwrap(), Place::Infinity);
    assert_eq!("11".parse::<Place>().unwrap(), Place::Prime(11));
    assert!("12".parse::<Place>().is_err());
    assert_eq!(Invariant::Half + Invariant::Half, Invariant::Zero);
}
