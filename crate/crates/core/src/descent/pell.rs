//! Complete solution of `u² - D t² = N` for nonsquare `D > 0`.
//!
//! Class representatives come from the Lagrange–Matthews–Mollin method:
//! for every `f` with `f² | N` and every `z` with `z² ≡ D mod |N/f²|`, the
//! continued fraction of `(z + √D)/|N/f²|` is scanned for `Q_i = ±1` within
//! its preperiod and first period.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::arith::exact_sqrt;
use crate::numeric::factor::{factor, DEFAULT_TRIAL_BOUND};
use crate::numeric::padic::sqrt_mod_prime_big;
use crate::numeric::serde_int;

/// `u ≡ u_residue (mod u_modulus)` and `t ≡ t_residue (mod t_modulus)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Congruence {
    #[serde(with = "serde_int::bigint")]
    pub u_modulus: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub u_residue: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub t_modulus: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub t_residue: BigInt,
}

impl Congruence {
    pub fn holds(&self, u: &BigInt, t: &BigInt) -> bool {
        (u - &self.u_residue).mod_floor(&self.u_modulus).is_zero()
            && (t - &self.t_residue).mod_floor(&self.t_modulus).is_zero()
    }
}

/// `u² - D t² = N`; a solution must satisfy at least one congruence when
/// the list is nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellProblem {
    #[serde(with = "serde_int::bigint")]
    pub d: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub n: BigInt,
    pub congruences: Vec<Congruence>,
}

impl PellProblem {
    pub fn new(d: impl Into<BigInt>, n: impl Into<BigInt>) -> Self {
        PellProblem {
            d: d.into(),
            n: n.into(),
            congruences: vec![],
        }
    }

    fn accepts(&self, u: &BigInt, t: &BigInt) -> bool {
        self.congruences.is_empty() || self.congruences.iter().any(|c| c.holds(u, t))
    }
}

/// An element `u + t√D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadInt {
    #[serde(with = "serde_int::bigint")]
    pub u: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub t: BigInt,
}

impl QuadInt {
    pub fn new(u: BigInt, t: BigInt) -> Self {
        QuadInt { u, t }
    }

    pub fn mul(&self, o: &QuadInt, d: &BigInt) -> QuadInt {
        QuadInt {
            u: &self.u * &o.u + &self.t * &o.t * d,
            t: &self.u * &o.t + &self.t * &o.u,
        }
    }

    pub fn conj(&self) -> QuadInt {
        QuadInt {
            u: self.u.clone(),
            t: -&self.t,
        }
    }

    pub fn neg(&self) -> QuadInt {
        QuadInt {
            u: -&self.u,
            t: -&self.t,
        }
    }

    pub fn norm(&self, d: &BigInt) -> BigInt {
        &self.u * &self.u - &self.t * &self.t * d
    }

    fn reduce(&self, m: &BigInt) -> QuadInt {
        QuadInt {
            u: self.u.mod_floor(m),
            t: self.t.mod_floor(m),
        }
    }
}

/// How the representative list was shown complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessCertificate {
    pub method: String,
    /// Number of `f` with `f² | N`.
    pub divisors: usize,
    /// Number of roots `z` of `z² ≡ D` scanned, over all `f`.
    pub roots_scanned: usize,
    /// Length of the period of `√D`.
    pub period: usize,
    /// Period of `ε^k` modulo the congruence modulus, when congruences are given.
    pub congruence_period: Option<u64>,
}

/// A solution meeting the congruences: `sign · rep · ε^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstrainedSolution {
    pub representative: usize,
    pub sign: i8,
    pub power: u64,
    pub value: QuadInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolutionClasses {
    #[serde(with = "serde_int::bigint")]
    pub d: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub n: BigInt,
    /// Smallest `p + q√D` with `p² - D q² = 1`, `p, q > 0`.
    pub fundamental_automorph: QuadInt,
    /// One element per orbit under `ε` and `±1`, with minimal `|t|`.
    pub class_representatives: Vec<QuadInt>,
    /// One witness per (representative, sign) meeting the congruences.
    pub constrained: Vec<ConstrainedSolution>,
    pub completeness_certificate: CompletenessCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PellOutcome {
    Solutions(PellSolutionClasses),
    /// No solution (or none meeting the congruences).
    EmptyCertified {
        reason: String,
        classes: Option<PellSolutionClasses>,
    },
    Inconclusive {
        reason: String,
    },
}

impl PellOutcome {
    pub fn is_empty(&self) -> bool {
        matches!(self, PellOutcome::EmptyCertified { .. })
    }
}

/// Limits for [`pell_solve_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellConfig {
    /// Largest number of square roots `z` scanned.
    pub max_roots: usize,
    /// Largest period of `ε` modulo the congruence modulus.
    pub max_congruence_period: u64,
}

impl Default for PellConfig {
    fn default() -> Self {
        PellConfig {
            max_roots: 1 << 20,
            max_congruence_period: 20_000_000,
        }
    }
}

/// One step record of the PQa continued-fraction algorithm.
#[derive(Debug, Clone)]
struct Pqa {
    q: BigInt,
    g: BigInt,
    b: BigInt,
}

/// `floor((P + √D) / Q)` for nonsquare `D`.
fn partial_quotient(p: &BigInt, q: &BigInt, sqrt_floor: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + sqrt_floor).div_floor(q)
    } else {
        (-p - sqrt_floor - BigInt::one()).div_floor(&-q)
    }
}

/// Runs PQa from `(P0, Q0)` until a `(P, Q)` pair repeats. Returns the
/// records for `i = 0, 1, ...` and the index where the period starts.
fn pqa(p0: &BigInt, q0: &BigInt, d: &BigInt) -> (Vec<Pqa>, usize) {
    let s = d.sqrt();
    let (mut g2, mut g1) = (-p0, q0.clone());
    let (mut b2, mut b1) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (p0.clone(), q0.clone());
    let mut seen = std::collections::HashMap::new();
    let mut out = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p.clone(), q.clone())) {
            return (out, start);
        }
        seen.insert((p.clone(), q.clone()), out.len());
        let a = partial_quotient(&p, &q, &s);
        let g = &a * &g1 + &g2;
        let b = &a * &b1 + &b2;
        out.push(Pqa {
            q: q.clone(),
            g: g.clone(),
            b: b.clone(),
        });
        (g2, g1) = (g1, g);
        (b2, b1) = (b1, b);
        let pn = &a * &q - &p;
        let qn = (d - &pn * &pn) / &q;
        p = pn;
        q = qn;
    }
}

/// Fundamental solution of `x² - D y² = 1`, the solution of `x² - D y² = -1`
/// when one exists, and the period length of `√D`.
pub fn fundamental_units(d: &BigInt) -> Result<(QuadInt, Option<QuadInt>, usize)> {
    if !d.is_positive() || exact_sqrt(d).is_some() {
        return invalid(format!("D = {d} must be positive and nonsquare"));
    }
    let (recs, start) = pqa(&BigInt::zero(), &BigInt::one(), d);
    let l = recs.len() - start;
    // the period of √D starts at index 1 and Q_l = 1
    debug_assert_eq!(start, 1);
    let last = &recs[l - 1];
    let e = QuadInt::new(last.g.clone(), last.b.clone());
    if l % 2 == 0 {
        Ok((e, None, l))
    } else {
        Ok((e.mul(&e, d), Some(e), l))
    }
}

/// All roots of `z² ≡ D (mod p^k)` in `[0, p^k)`.
fn sqrt_roots_prime_power(d: &BigInt, p: &BigInt, k: u32) -> Vec<BigInt> {
    let two = BigInt::from(2);
    let pk = p.pow(k);
    let d_red = d.mod_floor(&pk);
    if p != &two && !(&d_red % p).is_zero() {
        let Some(r) = sqrt_mod_prime_big(&d_red, p) else {
            return vec![];
        };
        // Hensel lift the simple root
        let mut r = r;
        let mut m = p.clone();
        for _ in 1..k {
            m *= p;
            let f = (&r * &r - d).mod_floor(&m);
            let inv = crate::numeric::padic::mod_inverse(&(&two * &r), &m).expect("unit");
            r = (&r - f * inv).mod_floor(&m);
        }
        let neg = (-&r).mod_floor(&pk);
        return if neg == r { vec![r] } else { vec![r, neg] };
    }
    // p = 2 or p | D: lift every root level by level
    let mut roots: Vec<BigInt> = (0..p.to_u64().unwrap_or(0))
        .map(BigInt::from)
        .filter(|z| (z * z - d).mod_floor(p).is_zero())
        .collect();
    let mut m = p.clone();
    for _ in 1..k {
        let mn = &m * p;
        let mut next = Vec::new();
        for r in &roots {
            let mut c = r.clone();
            for _ in 0..p.to_u64().unwrap_or(0) {
                if (&c * &c - d).mod_floor(&mn).is_zero() {
                    next.push(c.clone());
                }
                c += &m;
            }
        }
        roots = next;
        m = mn;
    }
    roots
}

/// All `z ∈ (-m/2, m/2]` with `z² ≡ D (mod m)`.
fn sqrt_roots_mod(d: &BigInt, m: &BigInt, cap: usize) -> Result<Vec<BigInt>> {
    if m.is_one() {
        return Ok(vec![BigInt::zero()]);
    }
    let f = factor(m, DEFAULT_TRIAL_BOUND);
    if !f.is_complete() {
        return Err(Error::Resource(format!("cannot factor {m}")));
    }
    let mut acc = vec![(BigInt::zero(), BigInt::one())];
    for (p, k) in f.primes {
        let pk = p.pow(k);
        let rs = sqrt_roots_prime_power(d, &p, k);
        if rs.is_empty() {
            return Ok(vec![]);
        }
        if acc.len() * rs.len() > cap {
            return Err(Error::Resource(format!("more than {cap} square roots of {d} mod {m}")));
        }
        let mut next = Vec::with_capacity(acc.len() * rs.len());
        for (a, ma) in &acc {
            let inv = crate::numeric::padic::mod_inverse(&(ma % &pk), &pk).expect("coprime");
            for r in &rs {
                // x ≡ a mod ma, x ≡ r mod pk
                let x = a + ma * ((r - a) * &inv).mod_floor(&pk);
                next.push((x, ma * &pk));
            }
        }
        acc = next;
    }
    let half = m / 2;
    Ok(acc
        .into_iter()
        .map(|(x, _)| {
            let x = x.mod_floor(m);
            if x > half {
                x - m
            } else {
                x
            }
        })
        .collect())
}

/// The element of `{±x·ε^k}` with minimal `(|t|, |u|)`, preferring `u > 0`
/// and then `t ≥ 0`.
fn canonical(x: &QuadInt, eps: &QuadInt, d: &BigInt) -> QuadInt {
    let key = |q: &QuadInt| (q.t.abs(), q.u.abs(), q.u.is_negative(), q.t.is_negative());
    let inv = eps.conj();
    let mut best = x.clone();
    let mut consider = |q: &QuadInt| {
        for c in [q.clone(), q.neg()] {
            if key(&c) < key(&best) {
                best = c;
            }
        }
    };
    consider(x);
    for step in [eps, &inv] {
        let mut cur = x.clone();
        let mut low = x.t.abs();
        loop {
            let next = cur.mul(step, d);
            if next.t.abs() > cur.t.abs() && next.t.abs() > low {
                break;
            }
            low = low.min(next.t.abs());
            consider(&next);
            cur = next;
        }
    }
    best
}

pub fn pell_solve(problem: &PellProblem) -> Result<PellOutcome> {
    pell_solve_with(problem, &PellConfig::default())
}

pub fn pell_solve_with(problem: &PellProblem, cfg: &PellConfig) -> Result<PellOutcome> {
    let d = &problem.d;
    let n = &problem.n;
    if n.is_zero() {
        return invalid("N must be nonzero");
    }
    for c in &problem.congruences {
        if !c.u_modulus.is_positive() || !c.t_modulus.is_positive() {
            return invalid("congruence moduli must be positive");
        }
    }
    let (eps, neg_unit, period) = fundamental_units(d)?;

    // f with f² | N
    let fac = factor(n, DEFAULT_TRIAL_BOUND);
    if !fac.is_complete() {
        return Ok(PellOutcome::Inconclusive {
            reason: format!("cannot factor N = {n}"),
        });
    }
    let mut fs = vec![BigInt::one()];
    for (p, k) in &fac.primes {
        let mut next = Vec::new();
        for f in &fs {
            let mut pe = BigInt::one();
            for _ in 0..=(k / 2) {
                next.push(f * &pe);
                pe *= p;
            }
        }
        fs = next;
    }

    let mut reps: BTreeSet<QuadInt> = BTreeSet::new();
    let mut roots_scanned = 0usize;
    for f in &fs {
        let m = n / (f * f);
        let am = m.abs();
        let zs = match sqrt_roots_mod(d, &am, cfg.max_roots.saturating_sub(roots_scanned).max(1)) {
            Ok(z) => z,
            Err(Error::Resource(r)) => return Ok(PellOutcome::Inconclusive { reason: r }),
            Err(e) => return Err(e),
        };
        roots_scanned += zs.len();
        for z in zs {
            let (recs, _) = pqa(&z, &am, d);
            let Some(i) = recs.iter().skip(1).position(|r| r.q.abs().is_one()).map(|i| i + 1) else {
                continue;
            };
            let r = &recs[i - 1];
            let sol = QuadInt::new(r.g.clone(), r.b.clone());
            let nv = sol.norm(d);
            let prim = if nv == m {
                Some(sol)
            } else if nv == -&m {
                neg_unit.as_ref().map(|w| sol.mul(w, d))
            } else {
                None
            };
            if let Some(s) = prim {
                let s = QuadInt::new(&s.u * f, &s.t * f);
                debug_assert_eq!(&s.norm(d), n);
                reps.insert(canonical(&s, &eps, d));
            }
        }
    }
    let reps: Vec<QuadInt> = reps.into_iter().collect();
    let mut cert = CompletenessCertificate {
        method: "LMM continued-fraction classes".into(),
        divisors: fs.len(),
        roots_scanned,
        period,
        congruence_period: None,
    };
    let mut classes = PellSolutionClasses {
        d: d.clone(),
        n: n.clone(),
        fundamental_automorph: eps.clone(),
        class_representatives: reps,
        constrained: vec![],
        completeness_certificate: cert.clone(),
    };
    if classes.class_representatives.is_empty() {
        return Ok(PellOutcome::EmptyCertified {
            reason: "no solution classes".into(),
            classes: Some(classes),
        });
    }
    if problem.congruences.is_empty() {
        return Ok(PellOutcome::Solutions(classes));
    }

    // ε^k is periodic modulo the lcm of the moduli; scan one period
    let m = problem
        .congruences
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(&c.u_modulus).lcm(&c.t_modulus));
    let eps_m = eps.reduce(&m);
    let one = QuadInt::new(BigInt::one(), BigInt::zero()).reduce(&m);
    let mut found = Vec::new();
    let mut pw = one.clone();
    let mut k = 0u64;
    loop {
        for (i, rep) in classes.class_representatives.iter().enumerate() {
            for sign in [1i8, -1] {
                if found.iter().any(|c: &ConstrainedSolution| c.representative == i && c.sign == sign) {
                    continue;
                }
                let base = if sign > 0 { rep.clone() } else { rep.neg() };
                let v = base.reduce(&m).mul(&pw, d).reduce(&m);
                if problem.accepts(&v.u, &v.t) {
                    let exact = base.mul(&eps_pow(&eps, k, d), d);
                    debug_assert!(problem.accepts(&exact.u, &exact.t));
                    found.push(ConstrainedSolution {
                        representative: i,
                        sign,
                        power: k,
                        value: exact,
                    });
                }
            }
        }
        pw = pw.mul(&eps_m, d).reduce(&m);
        k += 1;
        if pw == one {
            break;
        }
        if k >= cfg.max_congruence_period {
            return Ok(PellOutcome::Inconclusive {
                reason: format!("period of ε modulo {m} exceeds {}", cfg.max_congruence_period),
            });
        }
    }
    cert.congruence_period = Some(k);
    classes.completeness_certificate = cert;
    if found.is_empty() {
        return Ok(PellOutcome::EmptyCertified {
            reason: format!("no class meets the congruences over a full period ({k}) of ε modulo {m}"),
            classes: Some(classes),
        });
    }
    classes.constrained = found;
    Ok(PellOutcome::Solutions(classes))
}

fn eps_pow(eps: &QuadInt, k: u64, d: &BigInt) -> QuadInt {
    let mut r = QuadInt::new(BigInt::one(), BigInt::zero());
    let mut b = eps.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            r = r.mul(&b, d);
        }
        b = b.mul(&b, d);
        e >>= 1;
    }
    r
}

/// Index of the class representative whose `±ε`-orbit contains `q`.
pub fn class_of(classes: &PellSolutionClasses, q: &QuadInt) -> Option<usize> {
    if q.norm(&classes.d) != classes.n {
        return None;
    }
    let c = canonical(q, &classes.fundamental_automorph, &classes.d);
    classes.class_representatives.iter().position(|r| *r == c)
}

/// Every solution with `|u| ≤ bound`, from the class representatives.
pub fn expand_classes(classes: &PellSolutionClasses, bound: &BigInt) -> BTreeSet<QuadInt> {
    let d = &classes.d;
    let eps = &classes.fundamental_automorph;
    let inv = eps.conj();
    let mut out = BTreeSet::new();
    for rep in &classes.class_representatives {
        for base in [rep.clone(), rep.neg()] {
            for step in [eps, &inv] {
                let mut cur = base.clone();
                // |u| first shrinks then grows along the orbit
                let mut grew = 0;
                loop {
                    if cur.u.abs() <= *bound {
                        out.insert(cur.clone());
                        grew = 0;
                    } else {
                        grew += 1;
                        if grew > 2 {
                            break;
                        }
                    }
                    cur = cur.mul(step, d);
                }
            }
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn brute_force(d: i64, n: i64, bound: i64) -> BTreeSet<QuadInt> {
    let mut out = BTreeSet::new();
    for u in -bound..=bound {
        let r = (u as i128) * (u as i128) - n as i128;
        if r % d as i128 != 0 {
            continue;
        }
        let t2 = r / d as i128;
        if t2 < 0 {
            continue;
        }
        if let Some(t) = crate::numeric::arith::exact_sqrt_i128(t2) {
            out.insert(QuadInt::new(BigInt::from(u), BigInt::from(t)));
            if t != 0 {
                out.insert(QuadInt::new(BigInt::from(u), BigInt::from(-t)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(u: i64, t: i64) -> QuadInt {
        QuadInt::new(u.into(), t.into())
    }

    #[test]
    fn units() {
        assert_eq!(fundamental_units(&BigInt::from(2)).unwrap().0, q(3, 2));
        assert_eq!(fundamental_units(&BigInt::from(2)).unwrap().1, Some(q(1, 1)));
        assert_eq!(fundamental_units(&BigInt::from(3)).unwrap().0, q(2, 1));
        assert_eq!(fundamental_units(&BigInt::from(3)).unwrap().1, None);
        let (e, _, _) = fundamental_units(&BigInt::from(61)).unwrap();
        assert_eq!(e, q(1766319049, 226153980));
        assert!(fundamental_units(&BigInt::from(49)).is_err());
    }

    #[test]
    fn examples() {
        let PellOutcome::Solutions(c) = pell_solve(&PellProblem::new(2, 1)).unwrap() else { panic!() };
        assert_eq!(c.fundamental_automorph, q(3, 2));
        assert_eq!(c.class_representatives, vec![q(1, 0)]);
        let PellOutcome::Solutions(c) = pell_solve(&PellProblem::new(5, 4)).unwrap() else { panic!() };
        assert!(c.class_representatives.contains(&q(2, 0)));
        assert!(c.class_representatives.contains(&q(3, 1)));
        assert!(pell_solve(&PellProblem::new(3, -1)).unwrap().is_empty());
        assert_eq!(
            expand_classes(&c, &BigInt::from(1000)),
            brute_force(5, 4, 1000)
        );
    }

    #[test]
    fn congruence_filter() {
        // u² = 1 + 2t² forces u odd
        let mut pr = PellProblem::new(2, 1);
        pr.congruences.push(Congruence {
            u_modulus: 4.into(),
            u_residue: 0.into(),
            t_modulus: 1.into(),
            t_residue: 0.into(),
        });
        assert!(pell_solve(&pr).unwrap().is_empty());
        pr.congruences[0].u_modulus = 7.into();
        pr.congruences[0].u_residue = 3.into();
        let PellOutcome::Solutions(c) = pell_solve(&pr).unwrap() else { panic!() };
        for s in &c.constrained {
            assert_eq!(s.value.norm(&pr.d), pr.n);
            assert!(pr.accepts(&s.value.u, &s.value.t));
        }
        // brute force agrees that some solution has u ≡ 3 mod 7
        let bf = brute_force(2, 1, 100_000);
        assert!(bf.iter().any(|x| x.u.mod_floor(&BigInt::from(7)) == BigInt::from(3)));
    }

    #[test]
    fn class_membership_is_orbit_invariant() {
        for (d, n) in [(60i64, 129600i64), (5, 4), (13, -36), (34, 33), (2, 98)] {
            let PellOutcome::Solutions(c) = pell_solve(&PellProblem::new(d, n)).unwrap() else { panic!() };
            let db = BigInt::from(d);
            for (i, rep) in c.class_representatives.iter().enumerate() {
                let mut q = rep.clone();
                for _ in 0..4 {
                    assert_eq!(class_of(&c, &q), Some(i));
                    assert_eq!(class_of(&c, &q.neg()), Some(i));
                    q = q.mul(&c.fundamental_automorph, &db);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn classes_match_brute_force(d in 2i64..=200, n in -500i64..=500) {
            prop_assume!(n != 0 && exact_sqrt(&BigInt::from(d)).is_none());
            let bound = 1_000_000i64;
            let want = brute_force(d, n, bound);
            let got = match pell_solve(&PellProblem::new(d, n)).unwrap() {
                PellOutcome::Solutions(c) => expand_classes(&c, &BigInt::from(bound)),
                PellOutcome::EmptyCertified { .. } => BTreeSet::new(),
                PellOutcome::Inconclusive { reason } => panic!("{reason}"),
            };
            prop_assert_eq!(got, want);
        }
    }
}
