//! Admissibility predicates on `k` and a CRT-guided search for admissible vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{field_degree, ParamVector};
use crate::error::{invalid, Result};
use crate::numeric::arith::is_prime_u64;
use crate::numeric::jacobi::jacobi_u64;
use crate::numeric::{multiquad_is_square, MultiQuadElem, MultiQuadTower};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AssumptionKind {
    /// Congruence and gcd conditions guaranteeing local integral points.
    A,
    /// Conditions at a prime `p` making the invariant of the first algebra surjective there.
    B { p: u64 },
    /// Non-squareness of the pair products `(k_i + √d_i)(k_j + √d_j)`.
    A33,
}

/// Outcome for one ordered pair in the non-squareness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub i: usize,
    pub j: usize,
    pub is_square: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub assumption: AssumptionKind,
    pub holds: bool,
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<PairEvidence>,
}

impl AssumptionReport {
    fn from_failures(assumption: AssumptionKind, failures: Vec<String>) -> Self {
        AssumptionReport {
            assumption,
            holds: failures.is_empty(),
            failures,
            evidence: Vec::new(),
        }
    }
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn assumption_a(k: &ParamVector) -> AssumptionReport {
    let mut fails = Vec::new();
    let kv = k.0;
    for (i, x) in kv.iter().enumerate() {
        if x.abs() <= 2 {
            fails.push(format!("|k{}| > 2", i + 1));
        }
    }
    if kv[0].rem_euclid(16) != 15 {
        fails.push("k1 ≡ -1 mod 16".into());
    }
    if kv[0].rem_euclid(9) != 1 {
        fails.push("k1 ≡ 1 mod 9".into());
    }
    for i in 1..4 {
        if kv[i].rem_euclid(16) != 5 {
            fails.push(format!("k{} ≡ 5 mod 16", i + 1));
        }
        if kv[i].rem_euclid(9) != 5 {
            fails.push(format!("k{} ≡ 5 mod 9", i + 1));
        }
    }
    let kb = k.big();
    let r = k.radicands();
    for i in 0..4 {
        for j in i + 1..4 {
            if gcd_big(&kb[i], &kb[j]) != BigInt::from(1) {
                fails.push(format!("gcd(k{}, k{}) = 1", i + 1, j + 1));
            }
            if gcd_big(&r[i], &r[j]) != BigInt::from(3) {
                fails.push(format!("gcd(k{}²-4, k{}²-4) = 3", i + 1, j + 1));
            }
        }
    }
    let g = kb
        .iter()
        .map(|x| x * x - 2)
        .fold(BigInt::from(0), |acc, v| acc.gcd(&v));
    if g != BigInt::from(1) {
        fails.push("gcd(k1²-2, k2²-2, k3²-2, k4²-2) = 1".into());
    }
    AssumptionReport::from_failures(AssumptionKind::A, fails)
}

pub fn assumption_b(k: &ParamVector, p: u64) -> Result<AssumptionReport> {
    if !is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    let mut fails = Vec::new();
    let [k1, k2, k3, k4] = k.big();
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    let p3 = &p2 * &pb;
    let res = |x: &BigInt| x.mod_floor(&pb);
    let sym = |x: &BigInt| {
        if p == 2 {
            0
        } else {
            jacobi_u64(u64::try_from(x.mod_floor(&pb)).unwrap(), p)
        }
    };
    if p < 11 {
        fails.push("p ≥ 11".into());
    }
    if sym(&BigInt::from(2)) != -1 {
        fails.push("2 is a nonresidue mod p".into());
    }
    if (&k1 - BigInt::from(2) - &pb).mod_floor(&p3) != BigInt::from(0) {
        fails.push("k1 - 2 ≡ p mod p³".into());
    }
    if sym(&(&k2 * &k2 - 4)) != -1 {
        fails.push("k2²-4 is a nonresidue mod p".into());
    }
    if res(&k3) != res(&k4) {
        fails.push("k3 ≡ k4 mod p".into());
    }
    if res(&k3) == BigInt::from(0) || res(&(&k3 - 2)) == BigInt::from(0) {
        fails.push("k3 ≢ 0, 2 mod p".into());
    }
    if res(&(&k2 - 2 - BigInt::from(2) * &k3)) == BigInt::from(0) {
        fails.push("k2 - 2 ≢ 2k3 mod p".into());
    }
    let markoff: BigInt = &k2 * &k2 + &k3 * &k3 + &k4 * &k4 - &k2 * &k3 * &k4;
    let target: BigInt = (&pb + 2) * (&pb + 2);
    if (markoff - target).mod_floor(&p2) != BigInt::from(0) {
        fails.push("k2²+k3²+k4²-k2k3k4 ≡ (p+2)² mod p²".into());
    }
    Ok(AssumptionReport::from_failures(AssumptionKind::B { p }, fails))
}

/// Checks `|k_i| ≥ 3`, full degree, and that `(k_i + √d_i)(k_j + √d_j)` is not
/// a square for every ordered pair `i ≠ j`, with the roots as printed.
pub fn assumption_33(k: &ParamVector) -> Result<AssumptionReport> {
    let mut fails = Vec::new();
    for (i, x) in k.0.iter().enumerate() {
        if x.abs() < 3 {
            fails.push(format!("|k{}| ≥ 3", i + 1));
        }
    }
    if !fails.is_empty() {
        return Ok(AssumptionReport::from_failures(AssumptionKind::A33, fails));
    }
    let deg = field_degree(k)?;
    if deg != 16 {
        fails.push(format!("[E:Q] = 16 (got {deg})"));
        return Ok(AssumptionReport::from_failures(AssumptionKind::A33, fails));
    }
    let tower = MultiQuadTower::new(k.radicands())?;
    let unit = |i: usize| &MultiQuadElem::from_int(&tower, k.0[i]) + &MultiQuadElem::sqrt_radicand(&tower, i);
    let mut evidence = Vec::new();
    let mut cache = std::collections::HashMap::new();
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                continue;
            }
            let key = (i.min(j), i.max(j));
            let is_square = match cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = multiquad_is_square(&(&unit(i) * &unit(j)))?.is_some();
                    cache.insert(key, v);
                    v
                }
            };
            if is_square {
                fails.push(format!("(k{0}+√d{0})(k{1}+√d{1}) is not a square", i + 1, j + 1));
            }
            evidence.push(PairEvidence { i: i + 1, j: j + 1, is_square });
        }
    }
    let mut r = AssumptionReport::from_failures(AssumptionKind::A33, fails);
    r.evidence = evidence;
    Ok(r)
}

/// Search for vectors satisfying assumptions A and B at `p0`, ascending
/// lexicographically over nonnegative representatives `3 ≤ k_i ≤ bound`.
///
/// `k1` runs through its class modulo `144 p0³`; `k2`, `k3` run through
/// `5 mod 144` filtered by the residue conditions mod `p0`; `k4` is drawn from
/// the classes mod `144 p0²` solving the congruences that couple it to `k2, k3`.
pub fn find_admissible_k(p0: u64, bound: i64, count: usize) -> Result<Vec<ParamVector>> {
    if !is_prime_u64(p0) || p0 < 11 || jacobi_u64(2, p0) != -1 {
        return invalid(format!(
            "{p0} must be a prime ≥ 11 at which 2 is a nonresidue"
        ));
    }
    let p = p0 as i128;
    let p2 = p * p;
    let p3 = p2 * p;
    let mut out = Vec::new();
    if count == 0 || bound < 3 {
        return Ok(out);
    }
    let bound = bound as i128;
    // k1: 15 mod 16, 1 mod 9, p + 2 mod p³
    let m1 = 144 * p3;
    let Some(k1_0) = (0..144i128)
        .map(|t| p + 2 + t * p3)
        .find(|x| x % 16 == 15 && x % 9 == 1)
    else {
        return Ok(out);
    };
    let leg = |x: i128| jacobi_u64(x.rem_euclid(p) as u64, p0);
    let k2s: Vec<i128> = (0..)
        .map(|t| 5 + 144 * t)
        .take_while(|x| *x <= bound)
        .filter(|&x| leg(x * x - 4) == -1)
        .collect();
    let k3s: Vec<i128> = (0..)
        .map(|t| 5 + 144 * t)
        .take_while(|x| *x <= bound)
        .filter(|&x| x % p != 0 && (x - 2) % p != 0)
        .collect();
    let mut k1 = k1_0;
    while k1 <= bound {
        for &k2 in &k2s {
            for &k3 in &k3s {
                if (k2 - 2 - 2 * k3).rem_euclid(p) == 0 {
                    continue;
                }
                let mut k4s = Vec::new();
                for r in (0..p).map(|t| k3.rem_euclid(p) + t * p) {
                    let lhs = k2 * k2 + k3 * k3 + r * r - k2 * k3 * r;
                    if (lhs - (p + 2) * (p + 2)).rem_euclid(p2) != 0 {
                        continue;
                    }
                    // smallest representative of (5 mod 144, r mod p²)
                    let start = (0..144)
                        .map(|t| r + t * p2)
                        .find(|x| x % 144 == 5)
                        .expect("144 and p² are coprime");
                    let mut v = start;
                    while v <= bound {
                        k4s.push(v);
                        v += 144 * p2;
                    }
                }
                k4s.sort_unstable();
                for k4 in k4s {
                    let k = ParamVector([k1 as i64, k2 as i64, k3 as i64, k4 as i64]);
                    if assumption_a(&k).holds && assumption_b(&k, p0)?.holds {
                        out.push(k);
                        if out.len() == count {
                            return Ok(out);
                        }
                    }
                }
            }
        }
        k1 += m1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{discriminant_and_smoothness, ParamVector};

    const EX41: ParamVector = ParamVector([135775, 13663, 14405, 31829]);
    const EX51: ParamVector = ParamVector([127, 5, 725, 1445]);

    #[test]
    fn assumption_a_examples() {
        // k2, k3, k4 are all divisible by 5; the pairwise gcd clauses are the only failures
        let r = assumption_a(&EX51);
        assert_eq!(
            r.failures,
            vec!["gcd(k2, k3) = 1", "gcd(k2, k4) = 1", "gcd(k3, k4) = 1"]
        );
        let r = assumption_a(&ParamVector([1, 1, 1, 1]));
        assert!(!r.holds);
        assert!(r.failures.iter().any(|f| f == "|k1| > 2"));
        assert!(r.failures.iter().any(|f| f == "k1 ≡ -1 mod 16"));
    }

    #[test]
    fn example_vector_at_eleven() {
        // k2 = 13663 carries the residues demanded of k1 (15 mod 16, 1 mod 9),
        // and 5 divides both k1 and k3
        let r = assumption_a(&EX41);
        assert_eq!(r.failures, vec!["k2 ≡ 5 mod 16", "k2 ≡ 5 mod 9", "gcd(k1, k3) = 1"]);
        assert!(assumption_b(&EX41, 11).unwrap().holds);
        let r13 = assumption_b(&EX41, 13).unwrap();
        assert!(r13.failures.contains(&"k1 - 2 ≡ p mod p³".to_string()));
        assert!(assumption_b(&EX41, 15).is_err());
    }

    #[test]
    fn assumption_b_k1_clause() {
        let k = ParamVector([2 + 1331 * 5, 13663, 14405, 31829]);
        let r = assumption_b(&k, 11).unwrap();
        assert!(r.failures.contains(&"k1 - 2 ≡ p mod p³".to_string()));
    }

    #[test]
    fn assumption_33_examples() {
        let r = assumption_33(&EX51).unwrap();
        assert_eq!(r.evidence.len(), 12);
        assert!(r.holds, "{:?}", r.failures);
        assert!(!assumption_33(&ParamVector([2, 5, 7, 9])).unwrap().holds);
        // 3² - 4 = 5, 7² - 4 = 45 = 9·5: degree drops
        let r = assumption_33(&ParamVector([3, 7, 5, 9])).unwrap();
        assert!(!r.holds);
        assert!(r.failures[0].starts_with("[E:Q] = 16"));
    }

    #[test]
    fn admissible_search() {
        let v = find_admissible_k(11, 1_000_000, 1).unwrap();
        assert_eq!(v, vec![ParamVector([135775, 1013, 4901, 39749])]);
        assert!(find_admissible_k(11, 100, 10).unwrap().is_empty());
        assert!(find_admissible_k(17, 1_000_000, 1).is_err());
        let v = find_admissible_k(19, 10_000_000, 1).unwrap();
        assert_eq!(v.len(), 1);
        assert!(assumption_a(&v[0]).holds && assumption_b(&v[0], 19).unwrap().holds);
    }

    #[test]
    fn admissible_vectors_are_smooth_of_full_degree() {
        for k in find_admissible_k(11, 1_000_000, 5).unwrap() {
            assert!(discriminant_and_smoothness(&k).smooth);
            assert_eq!(field_degree(&k).unwrap(), 16);
        }
    }
}
