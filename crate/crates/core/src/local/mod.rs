//! Solubility of `f(x,y,z) = 0` over ℝ and over the p-adic integers, with
//! explicit witnesses.
//!
//! A point mod `p^N` with `f ≡ 0` and `N > 2·v_p(∂f/∂x_i)` lifts to a
//! `ℤ_p`-point by Hensel's lemma in the single variable `x_i`.

pub(crate) mod modp;
mod real;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::numeric::arith::{is_probable_prime, primes_up_to, split_valuation};
use crate::numeric::factor::factor;
use crate::numeric::padic::{mod_inverse, sqrt_mod_prime_big};
use crate::numeric::serde_int;
use crate::surface::{ParamVector, SurfaceSpec};
use modp::{lift_level, solutions_mod_p, val_mod};

pub use real::{real_residual, real_witness, real_witness_with, RealWitness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalConfig {
    /// Precision cap for `p = 2, 3`.
    pub cap_small_primes: u32,
    /// Precision cap for `p ≥ 5`.
    pub cap_other_primes: u32,
    /// Maximum number of residue classes kept per lifting level.
    pub node_budget: usize,
    /// Primes up to this bound are searched exhaustively mod `p`; larger
    /// primes use a seeded random search for a smooth point.
    pub exhaustive_prime_limit: u64,
    pub random_attempts: usize,
    pub seed: u64,
    /// Radius of the small `(y, z)` box tried before the far-out real search.
    pub real_box: i64,
    pub trial_bound: u64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            cap_small_primes: 12,
            cap_other_primes: 6,
            node_budget: 200_000,
            exhaustive_prime_limit: 3_000,
            random_attempts: 20_000,
            seed: 0x5eed,
            real_box: 20,
            trial_bound: crate::numeric::factor::DEFAULT_TRIAL_BOUND,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Solvable,
    Empty,
    AssumedSolvable,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solvable => "solvable",
            Verdict::Empty => "empty",
            Verdict::AssumedSolvable => "assumed-solvable",
            Verdict::Undecided => "undecided",
        })
    }
}

/// A solution of `f ≡ 0 mod p^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffinePointMod {
    #[serde(with = "serde_int::bigint")]
    pub p: BigInt,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(with = "serde_int::bigint")]
    pub x: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub y: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub z: BigInt,
    /// Valuations of `(2x+yz-a, 2y+xz-b, 2z+xy-c)`; `None` when the
    /// partial vanishes mod `p^N`.
    pub gradient_valuations: [Option<u32>; 3],
}

fn pow(p: &BigInt, n: u32) -> BigInt {
    num_traits::pow(p.clone(), n as usize)
}

fn val_below(v: &BigInt, p: &BigInt, n: u32) -> Option<u32> {
    let m = pow(p, n);
    let r = v.mod_floor(&m);
    if r.is_zero() {
        return None;
    }
    let mut r = r;
    let mut k = 0;
    while (&r % p).is_zero() {
        r /= p;
        k += 1;
    }
    Some(k)
}

impl AffinePointMod {
    /// Reduces the coordinates into `[0, p^N)` and checks `f ≡ 0 mod p^N`.
    pub fn new(spec: &SurfaceSpec, p: &BigInt, n: u32, coords: [BigInt; 3]) -> Result<Self> {
        let m = pow(p, n);
        let [x, y, z] = coords.map(|c| c.mod_floor(&m));
        if !spec.eval(&x, &y, &z).mod_floor(&m).is_zero() {
            return invalid(format!("({x}, {y}, {z}) is not a solution mod {p}^{n}"));
        }
        let g = spec.gradient(&x, &y, &z);
        let gradient_valuations = [0, 1, 2].map(|i| val_below(&g[i], p, n));
        Ok(AffinePointMod {
            p: p.clone(),
            n,
            x,
            y,
            z,
            gradient_valuations,
        })
    }

    pub fn coords(&self) -> [BigInt; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn modulus(&self) -> BigInt {
        pow(&self.p, self.n)
    }

    /// Coordinate with the smallest partial valuation `v` satisfying `N > 2v`.
    pub fn hensel_coordinate(&self) -> Option<usize> {
        (0..3)
            .filter_map(|i| self.gradient_valuations[i].map(|v| (v, i)))
            .filter(|&(v, _)| self.n > 2 * v)
            .min()
            .map(|(_, i)| i)
    }

    pub fn is_hensel_sufficient(&self) -> bool {
        self.hensel_coordinate().is_some()
    }

    /// Newton iteration in the Hensel coordinate up to precision `target`.
    /// The other two coordinates are kept, so the result agrees with `self`
    /// modulo `p^N`.
    pub fn lift(&self, spec: &SurfaceSpec, target: u32) -> Result<AffinePointMod> {
        let i = self
            .hensel_coordinate()
            .ok_or_else(|| Error::Precision(format!("point mod {}^{} does not satisfy the Hensel bound", self.p, self.n)))?;
        if target <= self.n {
            return AffinePointMod::new(spec, &self.p, target.max(1), self.coords());
        }
        let p = &self.p;
        let pu = p.to_u64();
        let mut c = self.coords();
        for _ in 0..(2 * target + 8) {
            let fv = spec.eval(&c[0], &c[1], &c[2]);
            if fv.mod_floor(&pow(p, target)).is_zero() {
                return AffinePointMod::new(spec, p, target, c);
            }
            let d = spec.gradient(&c[0], &c[1], &c[2])[i].clone();
            let ((vf, uf), (vd, ud)) = match pu {
                Some(q) => (split_valuation(&fv, q).unwrap(), split_valuation(&d, q).unwrap()),
                None => (split_big(&fv, p), split_big(&d, p)),
            };
            debug_assert!(vf > 2 * vd);
            let m = pow(p, target + 1);
            let step = pow(p, vf - vd) * uf * mod_inverse(&ud, &m).expect("unit") % &m;
            c[i] = (&c[i] - step).mod_floor(&m);
        }
        Err(Error::Precision(format!("Newton iteration did not converge mod {p}^{target}")))
    }
}

fn split_big(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut m = n.clone();
    let mut v = 0;
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    (v, m)
}

/// Full list of solutions modulo `p^N`, optionally filtered.
///
/// Refuses with a resource error when `p^N` exceeds `max_modulus` or more
/// than `max_points` solutions would be produced.
pub fn enumerate_points_mod(
    spec: &SurfaceSpec,
    p: u64,
    n: u32,
    filter: Option<&dyn Fn(&AffinePointMod) -> bool>,
) -> Result<Vec<AffinePointMod>> {
    enumerate_points_mod_with(spec, p, n, filter, 1_000_000, 2_000_000)
}

pub fn enumerate_points_mod_with(
    spec: &SurfaceSpec,
    p: u64,
    n: u32,
    filter: Option<&dyn Fn(&AffinePointMod) -> bool>,
    max_modulus: u64,
    max_points: usize,
) -> Result<Vec<AffinePointMod>> {
    if n == 0 {
        return invalid("precision must be at least 1");
    }
    if !crate::numeric::arith::is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    let too_big = || {
        Error::Resource(format!(
            "enumeration mod {p}^{n} exceeds the budget; lower N or use a targeted construction"
        ))
    };
    if p.checked_pow(n).is_none_or(|m| m > max_modulus) {
        return Err(too_big());
    }
    // about p² points mod p; refuse before materialising them
    if (p as u128) * (p as u128) > max_points as u128 {
        return Err(too_big());
    }
    let mut pts = solutions_mod_p(spec, p);
    if pts.len() > max_points {
        return Err(too_big());
    }
    for level in 1..n {
        pts = lift_level(spec, p, level, &pts, max_points).ok_or_else(too_big)?;
    }
    pts.sort_unstable();
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(pts.len());
    for s in pts {
        let pt = AffinePointMod::new(spec, &pb, n, s.map(BigInt::from))?;
        if filter.is_none_or(|f| f(&pt)) {
            out.push(pt);
        }
    }
    Ok(out)
}

/// Outcome of a `ℤ_p`-solubility search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZpOutcome {
    pub verdict: Verdict,
    pub witness: Option<AffinePointMod>,
    pub rationale: String,
}

pub fn zp_solvable(spec: &SurfaceSpec, p: u64) -> Result<ZpOutcome> {
    zp_solvable_with(spec, &BigInt::from(p), &LocalConfig::default())
}

/// Searches for a Hensel-liftable point.
///
/// Order: the residues `(1,0,0)` and permutations as exact integers; then a
/// level-by-level search of all residue classes mod `p^n` (only classes that
/// are singular mod `p` are carried to the next level, as every other class
/// already lifts); for primes above `exhaustive_prime_limit`, a seeded random
/// search for a smooth point mod `p`.
pub fn zp_solvable_with(spec: &SurfaceSpec, p: &BigInt, cfg: &LocalConfig) -> Result<ZpOutcome> {
    if p < &BigInt::from(2) || !is_probable_prime(p.magnitude()) {
        return invalid(format!("{p} is not prime"));
    }
    if let Some(w) = starting_residue(spec, p)? {
        return Ok(ZpOutcome {
            verdict: Verdict::Solvable,
            witness: Some(w),
            rationale: "starting residue".into(),
        });
    }
    match p.to_u64() {
        Some(q) if q <= cfg.exhaustive_prime_limit => tree_search(spec, q, cfg),
        _ => Ok(random_search(spec, p, cfg)),
    }
}

fn starting_residue(spec: &SurfaceSpec, p: &BigInt) -> Result<Option<AffinePointMod>> {
    let one = BigInt::one();
    let zero = BigInt::zero();
    for pos in 0..3 {
        let mut c = [zero.clone(), zero.clone(), zero.clone()];
        c[pos] = one.clone();
        let fv = spec.eval(&c[0], &c[1], &c[2]);
        let g = spec.gradient(&c[0], &c[1], &c[2]);
        let vf = if fv.is_zero() { u32::MAX } else { split_big(&fv, p).0 };
        let best = g
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| split_big(d, p).0)
            .filter(|&vd| vf > 2 * vd)
            .min();
        if let Some(vd) = best {
            return AffinePointMod::new(spec, p, 2 * vd + 1, c).map(Some);
        }
    }
    Ok(None)
}

fn tree_search(spec: &SurfaceSpec, p: u64, cfg: &LocalConfig) -> Result<ZpOutcome> {
    let cap = if p <= 3 { cfg.cap_small_primes } else { cfg.cap_other_primes };
    let pb = BigInt::from(p);
    let pp = u128::from(p);
    let mut pts = solutions_mod_p(spec, p);
    let mut n = 1;
    loop {
        if pts.is_empty() {
            return Ok(ZpOutcome {
                verdict: Verdict::Empty,
                witness: None,
                rationale: format!("no solutions mod {p}^{n}"),
            });
        }
        let f = modp::ModCubic::new(spec, pp.pow(n) as u64);
        let mut singular = Vec::new();
        for &s in &pts {
            let liftable = f
                .gradient(s)
                .iter()
                .any(|&g| val_mod(g, pp).is_some_and(|v| n > 2 * v));
            if liftable {
                let w = AffinePointMod::new(spec, &pb, n, s.map(BigInt::from))?;
                return Ok(ZpOutcome {
                    verdict: Verdict::Solvable,
                    witness: Some(w),
                    rationale: format!("Hensel bound met mod {p}^{n}"),
                });
            }
            if f.gradient(s).iter().all(|&g| g % pp == 0) {
                singular.push(s);
            }
        }
        if n >= cap {
            return Ok(undecided(format!("precision cap {p}^{cap} reached")));
        }
        if pp.checked_pow(n + 1).is_none_or(|m| m >= 1 << 62) {
            return Ok(undecided(format!("modulus {p}^{} too large", n + 1)));
        }
        match lift_level(spec, p, n, &singular, cfg.node_budget) {
            Some(next) => pts = next,
            None => return Ok(undecided(format!("node budget exceeded mod {p}^{}", n + 1))),
        }
        n += 1;
    }
}

fn undecided(rationale: String) -> ZpOutcome {
    ZpOutcome {
        verdict: Verdict::Undecided,
        witness: None,
        rationale,
    }
}

fn random_search(spec: &SurfaceSpec, p: &BigInt, cfg: &LocalConfig) -> ZpOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (p % BigInt::from(u64::MAX)).to_u64().unwrap_or(0));
    let two = BigInt::from(2);
    let half = mod_inverse(&two, p).unwrap_or_default();
    for _ in 0..cfg.random_attempts {
        let y = rng.gen_bigint_range(&BigInt::zero(), p);
        let z = rng.gen_bigint_range(&BigInt::zero(), p);
        let lin = &y * &z - &spec.a;
        let cst = &y * &y + &z * &z - &spec.b * &y - &spec.c * &z - &spec.d;
        let disc = (&lin * &lin - BigInt::from(4) * cst).mod_floor(p);
        let Some(s) = sqrt_mod_prime_big(&disc, p) else {
            continue;
        };
        let x = ((s - &lin) * &half).mod_floor(p);
        if let Ok(w) = AffinePointMod::new(spec, p, 1, [x, y, z]) {
            if w.is_hensel_sufficient() {
                return ZpOutcome {
                    verdict: Verdict::Solvable,
                    witness: Some(w),
                    rationale: "random smooth point mod p".into(),
                };
            }
        }
    }
    undecided(format!("no smooth point in {} random trials", cfg.random_attempts))
}

/// Result of the sufficient criterion for a smooth `𝔽_p`-point with a zero
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothPointCriterion {
    pub guaranteed: bool,
    pub rationale: String,
}

fn criterion_failure(k: &ParamVector, divides: impl Fn(&BigInt) -> bool) -> Option<String> {
    let kb = k.big();
    let four = BigInt::from(4);
    let two = BigInt::from(2);
    for i in 0..4 {
        for j in i + 1..4 {
            if divides(&kb[i]) && divides(&kb[j]) {
                return Some(format!("p divides k{} and k{}", i + 1, j + 1));
            }
            if divides(&(&kb[i] * &kb[i] - &four)) && divides(&(&kb[j] * &kb[j] - &four)) {
                return Some(format!("p divides k{0}²-4 and k{1}²-4", i + 1, j + 1));
            }
        }
    }
    if kb.iter().all(|x| divides(&(x * x - &two))) {
        return Some("p divides every ki²-2".into());
    }
    None
}

/// For `p ≥ 5`: no two `ki` divisible by `p`, no two `ki²-4` divisible by
/// `p`, and not all `ki²-2` divisible by `p`. These force a smooth point on
/// one of the conics `x = 0`, `y = 0`, `z = 0` mod `p`.
pub fn fp_smooth_point_criterion(spec: &SurfaceSpec, p: u64) -> Result<SmoothPointCriterion> {
    if p < 5 || !crate::numeric::arith::is_prime_u64(p) {
        return invalid(format!("criterion needs a prime p ≥ 5, got {p}"));
    }
    let pb = BigInt::from(p);
    Ok(match criterion_failure(&spec.k, |n| (n % &pb).is_zero()) {
        None => SmoothPointCriterion {
            guaranteed: true,
            rationale: "gcd conditions hold mod p".into(),
        },
        Some(r) => SmoothPointCriterion {
            guaranteed: false,
            rationale: r,
        },
    })
}

/// The integers whose prime factors `≥ 5` are the only primes where the
/// smooth-point criterion can fail; `0` means it fails everywhere.
fn criterion_gcds(k: &ParamVector) -> Vec<BigInt> {
    let kb = k.big();
    let four = BigInt::from(4);
    let two = BigInt::from(2);
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            out.push(kb[i].gcd(&kb[j]));
            out.push((&kb[i] * &kb[i] - &four).gcd(&(&kb[j] * &kb[j] - &four)));
        }
    }
    out.push(kb.iter().fold(BigInt::zero(), |g, x| g.gcd(&(x * x - &two))));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalPlace {
    Infinity,
    Prime(BigInt),
    /// All primes dividing an integer that could not be factored.
    Cofactor(BigInt),
    /// Every prime not listed elsewhere in the report.
    Others,
}

impl fmt::Display for LocalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalPlace::Infinity => write!(f, "inf"),
            LocalPlace::Prime(p) => write!(f, "{p}"),
            LocalPlace::Cofactor(c) => write!(f, "cofactor {c}"),
            LocalPlace::Others => write!(f, "others"),
        }
    }
}

impl Serialize for LocalPlace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for LocalPlace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let int = |t: &str| t.parse::<BigInt>().map_err(|_| Error::InvalidArgument(format!("bad place {s:?}")));
        match s {
            "inf" => Ok(LocalPlace::Infinity),
            "others" => Ok(LocalPlace::Others),
            _ => match s.strip_prefix("cofactor ") {
                Some(c) => Ok(LocalPlace::Cofactor(int(c)?)),
                None => Ok(LocalPlace::Prime(int(s)?)),
            },
        }
    }
}

impl<'de> Deserialize<'de> for LocalPlace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocalWitness {
    Padic(AffinePointMod),
    Real(RealWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEntry {
    pub place: LocalPlace,
    pub verdict: Verdict,
    pub witness: Option<LocalWitness>,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSolubilityReport {
    pub k: ParamVector,
    pub prime_bound: u64,
    pub entries: Vec<LocalEntry>,
    /// Places whose verdict is undecided.
    pub undecided: Vec<String>,
}

impl LocalSolubilityReport {
    /// No place is empty or undecided.
    pub fn is_locally_solvable(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.verdict, Verdict::Solvable | Verdict::AssumedSolvable))
    }

    pub fn has_empty_place(&self) -> bool {
        self.entries.iter().any(|e| e.verdict == Verdict::Empty)
    }

    pub fn entry(&self, p: u64) -> Option<&LocalEntry> {
        let key = LocalPlace::Prime(BigInt::from(p));
        self.entries.iter().find(|e| e.place == key)
    }
}

pub fn local_report(spec: &SurfaceSpec, prime_bound: u64) -> Result<LocalSolubilityReport> {
    local_report_with(spec, prime_bound, &LocalConfig::default())
}

/// Entries for `∞`, every `p ≤ prime_bound`, every prime dividing
/// `6·Δ(k)·Π(ki²-4)`, and every prime `≥ 5` where the smooth-point criterion
/// fails. All other primes share one entry covered by that criterion.
pub fn local_report_with(spec: &SurfaceSpec, prime_bound: u64, cfg: &LocalConfig) -> Result<LocalSolubilityReport> {
    spec.require_smooth()?;
    if prime_bound < 3 {
        return invalid("prime bound must be at least 3");
    }
    let mut primes: BTreeSet<BigInt> = primes_up_to(prime_bound).into_iter().map(BigInt::from).collect();
    let mut cofactors: BTreeSet<BigInt> = BTreeSet::new();
    let mut bad = vec![BigInt::from(6), spec.delta.clone()];
    for x in spec.k.big() {
        bad.push(&x * &x - BigInt::from(4));
    }
    let gcds = criterion_gcds(&spec.k);
    let criterion_everywhere = gcds.iter().all(|g| !g.is_zero());
    bad.extend(gcds.iter().filter(|g| !g.is_zero()).cloned());
    for n in &bad {
        let fac = factor(n, cfg.trial_bound);
        if !fac.is_complete() {
            cofactors.insert(fac.cofactor.clone());
        }
        primes.extend(fac.primes.into_iter().map(|(p, _)| p));
    }

    let real = real_witness_with(spec, cfg.real_box);
    let integral = real.integral_point();
    let mut entries = vec![LocalEntry {
        place: LocalPlace::Infinity,
        verdict: Verdict::Solvable,
        witness: Some(LocalWitness::Real(real)),
        rationale: "real root of the quadratic in x".into(),
    }];

    let primes: Vec<BigInt> = primes.into_iter().collect();
    let prime_entries: Vec<LocalEntry> = primes
        .par_iter()
        .map(|p| {
            let out = zp_solvable_with(spec, p, cfg)?;
            Ok(LocalEntry {
                place: LocalPlace::Prime(p.clone()),
                verdict: out.verdict,
                witness: out.witness.map(LocalWitness::Padic),
                rationale: out.rationale,
            })
        })
        .collect::<Result<_>>()?;
    entries.extend(prime_entries);

    for c in cofactors {
        let covered = criterion_failure(&spec.k, |n| !n.gcd(&c).is_one()).is_none() && c.gcd(&BigInt::from(6)).is_one();
        let (verdict, rationale) = if covered {
            (Verdict::AssumedSolvable, "smooth-point criterion")
        } else if integral.is_some() {
            (Verdict::AssumedSolvable, "global integral point")
        } else {
            (Verdict::Undecided, "unfactored and not covered by the smooth-point criterion")
        };
        entries.push(LocalEntry {
            place: LocalPlace::Cofactor(c),
            verdict,
            witness: None,
            rationale: rationale.into(),
        });
    }

    let (verdict, rationale) = if criterion_everywhere {
        (Verdict::AssumedSolvable, "smooth-point criterion")
    } else if integral.is_some() {
        (Verdict::AssumedSolvable, "global integral point")
    } else {
        (Verdict::Undecided, "smooth-point criterion fails at infinitely many primes")
    };
    entries.push(LocalEntry {
        place: LocalPlace::Others,
        verdict,
        witness: None,
        rationale: rationale.into(),
    });

    let undecided = entries
        .iter()
        .filter(|e| e.verdict == Verdict::Undecided)
        .map(|e| e.place.to_string())
        .collect();
    Ok(LocalSolubilityReport {
        k: spec.k,
        prime_bound,
        entries,
        undecided,
    })
}

#[cfg(test)]
mod tests;
