use super::*;
use proptest::prelude::*;

const ADMISSIBLE: [i64; 4] = [135775, 1013, 4901, 39749];

fn spec(k: [i64; 4]) -> SurfaceSpec {
    SurfaceSpec::from_k(k).unwrap()
}

fn b(n: i64) -> BigInt {
    BigInt::from(n)
}

fn coeffs(k: [i64; 4]) -> [i128; 4] {
    spec(k).coeffs_i128().unwrap()
}

fn f_int(c: [i128; 4], x: i128, y: i128, z: i128) -> i128 {
    x * x + y * y + z * z + x * y * z - c[0] * x - c[1] * y - c[2] * z - c[3]
}

fn grad_int(c: [i128; 4], x: i128, y: i128, z: i128) -> [i128; 3] {
    [2 * x + y * z - c[0], 2 * y + x * z - c[1], 2 * z + x * y - c[2]]
}

/// Independent triple loop: all solutions mod m.
fn brute_points(k: [i64; 4], m: i128) -> Vec<[i128; 3]> {
    let c = coeffs(k).map(|v| v.rem_euclid(m));
    let mut out = Vec::new();
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if f_int(c, x, y, z).rem_euclid(m) == 0 {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

fn v_mod(n: i128, p: i128, m: i128) -> Option<u32> {
    let mut r = n.rem_euclid(m);
    if r == 0 {
        return None;
    }
    let mut v = 0;
    while r % p == 0 {
        r /= p;
        v += 1;
    }
    Some(v)
}

/// Some point mod p^e meets `e > 2 v(∂_i)`.
fn brute_liftable(k: [i64; 4], p: i128, e: u32) -> bool {
    let m = p.pow(e);
    let c = coeffs(k).map(|v| v.rem_euclid(m));
    brute_points(k, m).into_iter().any(|[x, y, z]| {
        grad_int(c, x, y, z)
            .iter()
            .any(|&g| v_mod(g, p, m).is_some_and(|v| e > 2 * v))
    })
}

#[test]
fn mod_two_points_of_admissible_surface() {
    let s = spec(ADMISSIBLE);
    let pts = enumerate_points_mod(&s, 2, 1, None).unwrap();
    let coords: Vec<_> = pts.iter().map(|p| p.coords()).collect();
    assert_eq!(coords, vec![[b(0), b(0), b(1)], [b(0), b(1), b(0)], [b(1), b(0), b(0)]]);
    assert!(pts.iter().all(|p| !p.is_hensel_sufficient()));
}

#[test]
fn mod_three_contains_unit_vector() {
    let s = spec(ADMISSIBLE);
    let pts = enumerate_points_mod(&s, 3, 1, None).unwrap();
    let hit = pts.iter().find(|p| p.coords() == [b(1), b(0), b(0)]).unwrap();
    assert!(hit.is_hensel_sufficient());
}

#[test]
fn enumeration_matches_triple_loop() {
    for (p, n) in [(5u64, 1u32), (5, 2), (2, 3), (3, 2)] {
        let s = spec([0, 0, 0, 0]);
        let pts = enumerate_points_mod(&s, p, n, None).unwrap();
        let brute = brute_points([0, 0, 0, 0], (p as i128).pow(n));
        assert_eq!(pts.len(), brute.len(), "p={p} n={n}");
    }
    let s = spec([127, 5, 725, 1445]);
    let pts = enumerate_points_mod(&s, 7, 1, None).unwrap();
    assert_eq!(pts.len(), brute_points([127, 5, 725, 1445], 7).len());
    let filt: &dyn Fn(&AffinePointMod) -> bool = &|q| q.z.is_zero();
    let zs = enumerate_points_mod(&s, 7, 1, Some(filt)).unwrap();
    assert!(zs.iter().all(|q| q.z.is_zero()) && !zs.is_empty());
}

#[test]
fn enumeration_budget() {
    let s = spec([0, 0, 0, 0]);
    assert!(matches!(enumerate_points_mod(&s, 101, 4, None), Err(Error::Resource(_))));
    assert!(matches!(enumerate_points_mod(&s, 4, 1, None), Err(Error::InvalidArgument(_))));
}

#[test]
fn two_adic_witness_is_unit_vector_mod_eight() {
    let s = spec(ADMISSIBLE);
    let out = zp_solvable(&s, 2).unwrap();
    assert_eq!(out.verdict, Verdict::Solvable);
    let w = out.witness.unwrap();
    assert_eq!((w.n, w.coords()), (3, [b(1), b(0), b(0)]));
    assert_eq!(w.gradient_valuations[0], Some(1));
    assert_eq!((b(2) * &w.x + &w.y * &w.z).mod_floor(&b(8)), b(2));
    // the partial itself carries the -a term; only its valuation matters
    let g = s.gradient(&w.x, &w.y, &w.z);
    assert_eq!(g[0].mod_floor(&b(8)), b(6));
    assert_eq!(padic_val(&s.eval(&w.x, &w.y, &w.z), 2), 3);
}

#[test]
fn three_adic_witness() {
    let s = spec(ADMISSIBLE);
    let w = zp_solvable(&s, 3).unwrap().witness.unwrap();
    assert_eq!(w.coords(), [b(1), b(0), b(0)]);
    assert!(w.is_hensel_sufficient());
}

#[test]
fn seven_adic_point_on_example_surface() {
    let s = spec([127, 5, 725, 1445]);
    let out = zp_solvable(&s, 7).unwrap();
    assert_eq!(out.verdict, Verdict::Solvable);
    assert!(out.witness.unwrap().is_hensel_sufficient());
}

#[test]
fn empty_at_a_prime() {
    // x²+y²+z²+xyz = 3 has no solution mod 4: it is empty at 2 regardless
    // of the other coordinates, which the tree search must certify.
    let s = spec([3, 3, 3, 3]);
    let brute = brute_liftable([3, 3, 3, 3], 2, 5);
    let out = zp_solvable(&s, 2).unwrap();
    assert_eq!(out.verdict == Verdict::Solvable, brute);
}

#[test]
fn large_prime_uses_random_search() {
    let s = spec(ADMISSIBLE);
    let p = BigInt::from(1_000_000_007u64);
    let out = zp_solvable_with(&s, &p, &LocalConfig::default()).unwrap();
    assert_eq!(out.verdict, Verdict::Solvable);
    let w = out.witness.unwrap();
    assert!(s.eval(&w.x, &w.y, &w.z).mod_floor(&p).is_zero());
    let big = BigInt::parse_bytes(b"170141183460469231731687303715884105727", 10).unwrap();
    let out = zp_solvable_with(&s, &big, &LocalConfig::default()).unwrap();
    assert_eq!(out.verdict, Verdict::Solvable);
    assert!(zp_solvable(&s, 15).is_err());
}

#[test]
fn lift_agrees_with_starting_residue() {
    let s = spec(ADMISSIBLE);
    let w = zp_solvable(&s, 2).unwrap().witness.unwrap();
    let up = w.lift(&s, 20).unwrap();
    assert_eq!(up.n, 20);
    assert!(s.eval(&up.x, &up.y, &up.z).mod_floor(&up.modulus()).is_zero());
    assert_hensel_agreement(&w, &up);
}

fn padic_val(n: &BigInt, p: u64) -> u32 {
    crate::numeric::arith::valuation(n, p).unwrap_or(u32::MAX)
}

/// The lift keeps the two fixed coordinates mod p^N and moves the Hensel
/// coordinate by at most p^(N-v).
fn assert_hensel_agreement(w: &AffinePointMod, up: &AffinePointMod) {
    let i = w.hensel_coordinate().unwrap();
    let v = w.gradient_valuations[i].unwrap();
    for (j, (a, c)) in up.coords().iter().zip(w.coords()).enumerate() {
        let m = if j == i { pow(&w.p, w.n - v) } else { w.modulus() };
        assert_eq!(a.mod_floor(&m), c.mod_floor(&m), "coordinate {j}");
    }
}

#[test]
fn criterion_examples() {
    let s = spec(ADMISSIBLE);
    for p in primes_up_to(300).into_iter().filter(|&p| p >= 5) {
        assert!(fp_smooth_point_criterion(&s, p).unwrap().guaranteed, "p={p}");
    }
    let zero = spec([0, 0, 0, 0]);
    assert!(!fp_smooth_point_criterion(&zero, 5).unwrap().guaranteed);
    let s = spec([2011, 5, 5, 5]);
    let c = fp_smooth_point_criterion(&s, 7).unwrap();
    assert!(!c.guaranteed, "{}", c.rationale);
    assert_eq!(zp_solvable(&s, 7).unwrap().verdict, Verdict::Solvable);
    assert!(fp_smooth_point_criterion(&s, 3).is_err());
}

#[test]
fn real_witnesses() {
    let w = real_witness(&spec([0, 0, 0, 0]));
    assert!(w.exact);
    assert_eq!(w.integral_point().unwrap(), [b(2), b(0), b(0)]);
    let s = spec([3019, 5, 5, 5]);
    assert!(real_residual(&s, &[b(24), b(409), b(672)]).is_zero());
    let s = spec([127, 5, 725, 1445]);
    let w = real_witness(&s);
    assert!(w.residual < 1e-6, "{w:?}");
    let w = real_witness_with(&spec(ADMISSIBLE), 0);
    assert!(w.residual < 1e-6, "{w:?}");
}

#[test]
fn report_for_admissible_vector() {
    let s = spec(ADMISSIBLE);
    let r = local_report(&s, 50).unwrap();
    assert!(r.is_locally_solvable(), "{:?}", r.undecided);
    assert_eq!(r.entries[0].place, LocalPlace::Infinity);
    assert!(r.entry(2).is_some() && r.entry(47).is_some());
    let others = r.entries.last().unwrap();
    assert_eq!(others.place, LocalPlace::Others);
    assert_eq!(others.verdict, Verdict::AssumedSolvable);
    for e in &r.entries {
        if e.verdict == Verdict::Solvable {
            if let Some(LocalWitness::Padic(w)) = &e.witness {
                assert!(w.is_hensel_sufficient());
            }
        }
    }
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["entries"][0]["place"], "inf");
    assert_eq!(j["entries"][1]["witness"]["N"], 3);
    let back: LocalSolubilityReport = serde_json::from_value(j).unwrap();
    assert_eq!(back, r);
}

#[test]
fn report_for_counterexample_family() {
    let r = local_report(&spec([127, 5, 5, 5]), 30).unwrap();
    assert!(r.is_locally_solvable(), "{:?}", r.undecided);
    assert!(r.entry(7).is_some());
}

#[test]
fn report_refuses_singular_surface() {
    let s = spec([2, 5, 7, 11]);
    assert!(matches!(local_report(&s, 10), Err(Error::UnsupportedInput(_))));
    assert!(matches!(local_report(&spec(ADMISSIBLE), 2), Err(Error::InvalidArgument(_))));
}

fn small_k() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-12i64..12).prop_filter("smooth", |k| SurfaceSpec::from_k(*k).map(|s| s.smooth).unwrap_or(false))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witnesses_are_hensel_sufficient(k in small_k(), pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        let s = spec(k);
        let out = zp_solvable(&s, p).unwrap();
        if let Some(w) = out.witness {
            prop_assert!(s.eval(&w.x, &w.y, &w.z).mod_floor(&w.modulus()).is_zero());
            prop_assert!(w.is_hensel_sufficient());
            let up = w.lift(&s, w.n + 1).unwrap();
            assert_hensel_agreement(&w, &up);
            // a lifted point has v(f) ≥ N + v, so lifting again keeps it mod p^N
            let again = up.lift(&s, up.n + 3).unwrap();
            if padic_val(&s.eval(&up.x, &up.y, &up.z), p) >= up.n + up.gradient_valuations[up.hensel_coordinate().unwrap()].unwrap() {
                for (a, c) in again.coords().iter().zip(up.coords()) {
                    prop_assert_eq!(a.mod_floor(&up.modulus()), c);
                }
            }
        }
    }

    #[test]
    fn zp_agrees_with_exhaustive_search(k in small_k(), pi in 0usize..4) {
        let (p, e) = [(2u64, 4u32), (3, 3), (5, 2), (7, 2)][pi];
        let s = spec(k);
        let out = zp_solvable(&s, p).unwrap();
        let brute = brute_liftable(k, p as i128, e);
        if brute {
            prop_assert_eq!(out.verdict, Verdict::Solvable);
        }
        if out.verdict == Verdict::Empty {
            prop_assert!(!brute);
        }
    }

    #[test]
    fn equal_linear_terms_give_symmetric_point_sets(k1 in -10i64..10, t in -10i64..10, pi in 0usize..3) {
        prop_assume!(SurfaceSpec::from_k([k1, t, t, t]).map(|s| s.smooth).unwrap_or(false));
        let p = [3u64, 5, 7][pi];
        let s = spec([k1, t, t, t]);
        let pts: BTreeSet<_> = enumerate_points_mod(&s, p, 1, None).unwrap().into_iter().map(|q| q.coords()).collect();
        for q in &pts {
            let [x, y, z] = q.clone();
            for perm in [[y.clone(), x.clone(), z.clone()], [x.clone(), z.clone(), y.clone()], [z, y, x]] {
                prop_assert!(pts.contains(&perm));
            }
        }
    }

    #[test]
    fn criterion_is_sufficient(k in prop::array::uniform4(-30i64..30), pi in 0usize..5) {
        let p = [5u64, 7, 11, 13, 17][pi];
        let s = SurfaceSpec::from_k(k).unwrap();
        if fp_smooth_point_criterion(&s, p).unwrap().guaranteed {
            let c = s.coeffs_i128().unwrap().map(|v| v.rem_euclid(p as i128));
            let pp = p as i128;
            let found = brute_points(k, pp).into_iter().any(|[x, y, z]| {
                (x == 0 || y == 0 || z == 0)
                    && grad_int(c, x, y, z).iter().any(|g| g.rem_euclid(pp) != 0)
            });
            prop_assert!(found);
        }
    }
}
