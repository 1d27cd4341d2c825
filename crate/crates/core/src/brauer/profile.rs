//! Attainable invariant tuples at a single place.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algebra::{invariant_at_value, slot2_real_signs, QuatAlgebraSpec};
use super::hilbert::{Invariant, Place};
use super::quadratic::IsotropyConfig;
use crate::error::{Error, Result};
use crate::local::{
    enumerate_points_mod_with, real_witness, zp_solvable_with, AffinePointMod, LocalConfig,
    RealWitness, Verdict,
};
use crate::numeric::arith::split_valuation;
use crate::numeric::padic::{mod_inverse, sqrt_mod_prime_big};
use crate::surface::assumption_b;
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    /// Largest `p^N` enumerated.
    pub max_modulus: u64,
    /// Largest number of residue classes enumerated at one level.
    pub max_points: usize,
    /// Extra digits added when lifting an enumerated class.
    pub extra_precision: u32,
    /// Enumeration levels `N0, N0+2, ...` tried at most.
    pub max_levels: u32,
    /// Random points tried when enumeration is out of budget.
    pub sample_attempts: usize,
    /// Points per profile at which all three corestricted algebras are compared.
    pub cross_check_limit: usize,
    pub seed: u64,
    pub isotropy: IsotropyConfig,
    pub local: LocalConfig,
    /// Half-width of the `(y, z)` grid sampled at the real place.
    pub real_radius: i64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            max_modulus: 1_000_000,
            max_points: 150_000,
            extra_precision: 6,
            max_levels: 3,
            sample_attempts: 400,
            cross_check_limit: 256,
            seed: 0x5eed,
            isotropy: IsotropyConfig::default(),
            local: LocalConfig::default(),
            real_radius: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "kebab-case")]
pub enum ProfileStatus {
    /// The attainable set is known to be exactly the listed one.
    Complete(String),
    /// The listed tuples are attained; others might be too.
    Partial(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SamplePoint {
    Padic(AffinePointMod),
    Real(RealWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub tuple: Vec<Invariant>,
    pub point: SamplePoint,
    pub origin: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub precision: u32,
    pub classes: usize,
    pub tuples: usize,
    pub undetermined: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CrossCheck {
    pub points: usize,
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub place: Place,
    pub generators: Vec<String>,
    pub attainable: BTreeSet<Vec<Invariant>>,
    pub samples: Vec<ProfileSample>,
    #[serde(flatten)]
    pub status: ProfileStatus,
    pub levels: Vec<LevelSummary>,
    pub notes: Vec<String>,
    pub cross_check: Option<CrossCheck>,
}

impl InvariantProfile {
    pub fn is_complete(&self) -> bool {
        matches!(self.status, ProfileStatus::Complete(_))
    }

    /// Every tuple in `{0, 1/2}^g` is attained.
    pub fn is_full(&self) -> bool {
        self.attainable.len() == 1usize << self.generators.len()
    }

    pub fn contains_zero(&self) -> bool {
        self.attainable.iter().any(|t| t.iter().all(|x| !x.is_half()))
    }

    pub fn sample_for(&self, tuple: &[Invariant]) -> Option<&ProfileSample> {
        self.samples.iter().find(|s| s.tuple == tuple)
    }
}

/// A `ℤ_p`-point: every coordinate except `moved` is the exact integer
/// stored in `pt`; `moved` is the Newton limit, known modulo `p^N`.
#[derive(Debug, Clone)]
struct Zp {
    pt: AffinePointMod,
    moved: usize,
}

fn pow(p: &BigInt, n: u32) -> BigInt {
    num_traits::pow(p.clone(), n as usize)
}

/// Newton iteration in coordinate `i` only. Needs `v(f) > 2·v(∂_i f)`.
fn newton(spec: &SurfaceSpec, mut c: [BigInt; 3], i: usize, p: &BigInt, target: u32) -> Option<AffinePointMod> {
    let pu = p.to_u64()?;
    let m = pow(p, target);
    for _ in 0..(2 * target + 8) {
        let fv = spec.eval(&c[0], &c[1], &c[2]);
        if fv.mod_floor(&m).is_zero() {
            let bound = &m;
            if (0..3).any(|j| j != i && (c[j] < BigInt::zero() || &c[j] >= bound)) {
                return None;
            }
            return AffinePointMod::new(spec, p, target, c).ok();
        }
        let d = spec.gradient(&c[0], &c[1], &c[2])[i].clone();
        let (vf, uf) = split_valuation(&fv, pu)?;
        let (vd, ud) = split_valuation(&d, pu)?;
        if vf <= 2 * vd {
            return None;
        }
        let mm = pow(p, target + vd + 1);
        let step = pow(p, vf - vd) * uf * mod_inverse(&ud, &mm)? % &mm;
        c[i] = (&c[i] - step).mod_floor(&mm);
    }
    None
}

struct Evaluator<'a> {
    spec: &'a SurfaceSpec,
    algs: &'a [QuatAlgebraSpec],
    others: &'a [QuatAlgebraSpec],
    p: u64,
    pb: BigInt,
    cfg: &'a ProfileConfig,
}

enum Eval {
    Tuple(Vec<Invariant>, Zp),
    /// The point sits on the excluded locus or needs more digits.
    Retry,
}

impl Evaluator<'_> {
    fn value(&self, alg: &QuatAlgebraSpec, z: &Zp) -> Result<(Invariant, Zp)> {
        let i = alg.coordinate.index();
        let place = Place::Prime(self.p);
        if i != z.moved {
            let v = invariant_at_value(alg, &z.pt.coords()[i], None, place, &self.cfg.isotropy)?;
            return Ok((v, z.clone()));
        }
        let mut cur = z.clone();
        for _ in 0..4 {
            match invariant_at_value(alg, &cur.pt.coords()[i], Some(cur.pt.n), place, &self.cfg.isotropy) {
                Err(Error::Precision(_)) => {
                    let target = 2 * cur.pt.n + self.cfg.extra_precision;
                    let pt = newton(self.spec, cur.pt.coords(), cur.moved, &self.pb, target)
                        .ok_or_else(|| Error::Precision("lift failed".into()))?;
                    cur = Zp { pt, moved: cur.moved };
                }
                r => return r.map(|v| (v, cur)),
            }
        }
        Err(Error::Precision("coordinate too close to the excluded locus".into()))
    }

    fn tuple_of(&self, algs: &[QuatAlgebraSpec], z: &Zp) -> Result<Eval> {
        let mut cur = z.clone();
        let mut out = Vec::with_capacity(algs.len());
        for alg in algs {
            match self.value(alg, &cur) {
                Ok((v, next)) => {
                    out.push(v);
                    cur = next;
                }
                Err(Error::Precision(_)) | Err(Error::OutsideLocus(_)) => return Ok(Eval::Retry),
                Err(e) => return Err(e),
            }
        }
        Ok(Eval::Tuple(out, cur))
    }

    fn eval(&self, z: &Zp) -> Result<Eval> {
        self.tuple_of(self.algs, z)
    }

    /// Compares the in-play generator with the others at `z`.
    fn cross(&self, z: &Zp, first: Invariant) -> Option<bool> {
        if self.others.is_empty() {
            return None;
        }
        match self.tuple_of(self.others, z).ok()? {
            Eval::Tuple(t, _) => Some(t.iter().all(|&v| v == first)),
            Eval::Retry => None,
        }
    }

    /// Lifts an enumerated class and evaluates it, shifting the exact
    /// coordinates by multiples of `p^N` when the first representative fails.
    fn eval_class(&self, pt: &AffinePointMod) -> Result<Option<(Vec<Invariant>, Zp)>> {
        let moved = pt.hensel_coordinate().expect("liftable class");
        let n = pt.n;
        let step = pow(&self.pb, n);
        for shift in 0..4u32 {
            let mut c = pt.coords();
            for (j, cj) in c.iter_mut().enumerate() {
                if j != moved {
                    *cj += &step * shift;
                }
            }
            let Some(lifted) = newton(self.spec, c, moved, &self.pb, n + 1 + self.cfg.extra_precision) else {
                continue;
            };
            if let Eval::Tuple(t, z) = self.eval(&Zp { pt: lifted, moved })? {
                return Ok(Some((t, z)));
            }
        }
        Ok(None)
    }
}

#[derive(Default)]
struct Acc {
    tuples: BTreeMap<Vec<Invariant>, ProfileSample>,
    cross: CrossCheck,
}

impl Acc {
    fn add(&mut self, t: Vec<Invariant>, z: &Zp, origin: &str) {
        self.tuples.entry(t.clone()).or_insert_with(|| ProfileSample {
            tuple: t,
            point: SamplePoint::Padic(z.pt.clone()),
            origin: origin.into(),
        });
    }
}

fn start_precision(p: u64) -> u32 {
    match p {
        2 => 4,
        3 => 2,
        _ => 1,
    }
}

/// Smooth point mod `p` with `coords[fixed]` given, the free coordinate
/// random and the last one solved from the quadratic; then lifted in the
/// solved coordinate.
fn random_point(
    spec: &SurfaceSpec,
    pb: &BigInt,
    fixed: Option<(usize, BigInt)>,
    rng: &mut ChaCha8Rng,
    target: u32,
) -> Option<Zp> {
    let (fi, fv) = fixed.unwrap_or_else(|| (rng.gen_range(0..3), rng.gen_bigint_range(&BigInt::zero(), pb)));
    let solve = (fi + 1 + rng.gen_range(0..2)) % 3;
    let free = 3 - fi - solve;
    let mut c = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
    c[fi] = fv;
    c[free] = rng.gen_bigint_range(&BigInt::zero(), pb);
    // w² + (u·v - L_w)w + (u² + v² - L_u·u - L_v·v - d), with u, v the other two
    let lin = spec.linear();
    let (u, v) = (&c[fi], &c[free]);
    let bq = u * v - lin[solve];
    let cq = u * u + v * v - lin[fi] * u - lin[free] * v - &spec.d;
    let roots: Vec<BigInt> = if pb < &BigInt::from(50) {
        let pu = pb.to_u64()?;
        (0..pu)
            .map(BigInt::from)
            .filter(|w| (w * w + &bq * w + &cq).mod_floor(pb).is_zero())
            .collect()
    } else {
        let disc = (&bq * &bq - BigInt::from(4) * &cq).mod_floor(pb);
        let s = sqrt_mod_prime_big(&disc, pb)?;
        let inv2 = mod_inverse(&BigInt::from(2), pb)?;
        vec![
            ((-&bq + &s) * &inv2).mod_floor(pb),
            ((-&bq - &s) * &inv2).mod_floor(pb),
        ]
    };
    let w = roots.into_iter().nth(rng.gen_range(0..2))?;
    c[solve] = w;
    let g = spec.gradient(&c[0], &c[1], &c[2]);
    if (&g[solve] % pb).is_zero() {
        return None;
    }
    let pt = newton(spec, c, solve, pb, target)?;
    Some(Zp { pt, moved: solve })
}

/// Residues mod `p` where the slot-1 form of some generator can vanish.
fn target_residues(algs: &[QuatAlgebraSpec], pb: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::new();
    for alg in algs {
        let i = alg.coordinate.index();
        if alg.special_case.is_some() {
            out.push((i, BigInt::from(2).mod_floor(pb)));
            continue;
        }
        // roots of t² - k1·ki·t + k1² + ki² - 4 mod p
        if pb < &BigInt::from(50) {
            for t in 0..pb.to_u64().unwrap_or(0) {
                let t = BigInt::from(t);
                if alg.slot1_norm(&t).mod_floor(pb).is_zero() {
                    out.push((i, t));
                }
            }
        } else if let Some(s) = sqrt_mod_prime_big(&alg.base_field_disc.mod_floor(pb), pb) {
            let inv2 = mod_inverse(&BigInt::from(2), pb).unwrap();
            for r in [&alg.trace() + &s, alg.trace() - &s] {
                out.push((i, (r * &inv2).mod_floor(pb)));
            }
        }
    }
    out
}

/// The explicit points at a ramified prime satisfying the congruence
/// hypotheses: `(k2+p, k4+p, k3+p) mod p³` lifted in `x`, which gives `1/2`,
/// and a smooth point with `x ≢ k2 mod p`, which gives `0`.
fn targeted_constructions(spec: &SurfaceSpec, p: u64, cfg: &ProfileConfig) -> Vec<(Zp, &'static str)> {
    let mut out = Vec::new();
    let pb = BigInt::from(p);
    let p3 = pow(&pb, 3);
    let [_, k2, k3, k4] = spec.k.big();
    let c = [&k2 + &pb, &k4 + &pb, &k3 + &pb].map(|v| v.mod_floor(&p3));
    if spec.eval(&c[0], &c[1], &c[2]).mod_floor(&p3).is_zero() {
        if let Some(pt) = newton(spec, c, 0, &pb, 3 + cfg.extra_precision) {
            out.push((Zp { pt, moved: 0 }, "construction: (k2+p, k4+p, k3+p) mod p³ lifted in x"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ p);
    for _ in 0..cfg.sample_attempts {
        let mut x = rng.gen_bigint_range(&BigInt::zero(), &pb);
        if (&x - &k2).mod_floor(&pb).is_zero() {
            x += 1;
        }
        if let Some(z) = random_point(spec, &pb, Some((0, x.mod_floor(&pb))), &mut rng, 2 + cfg.extra_precision) {
            out.push((z, "construction: smooth point with x ≢ k2 mod p"));
            break;
        }
    }
    out
}

/// Attainable invariant tuples of `algs` at `place`.
///
/// `others` are evaluated alongside at up to `cross_check_limit` points and
/// compared with the first generator.
pub fn invariant_profile(
    spec: &SurfaceSpec,
    algs: &[QuatAlgebraSpec],
    others: &[QuatAlgebraSpec],
    place: Place,
    cfg: &ProfileConfig,
) -> Result<InvariantProfile> {
    let generators = algs.iter().map(|a| a.name.clone()).collect();
    let p = match place {
        Place::Infinity => return real_profile(spec, algs, generators, cfg),
        Place::Prime(p) => p,
    };
    let pb = BigInt::from(p);
    let mut profile = InvariantProfile {
        place,
        generators,
        attainable: BTreeSet::new(),
        samples: vec![],
        status: ProfileStatus::Partial(String::new()),
        levels: vec![],
        notes: vec![],
        cross_check: None,
    };
    let zp = zp_solvable_with(spec, &pb, &cfg.local)?;
    match zp.verdict {
        Verdict::Empty => {
            profile.status = ProfileStatus::Complete("no ℤ_p-points".into());
            return Ok(profile);
        }
        Verdict::Undecided => profile.notes.push(format!("ℤ_p-solubility undecided: {}", zp.rationale)),
        _ => {}
    }
    let ev = Evaluator {
        spec,
        algs,
        others,
        p,
        pb: pb.clone(),
        cfg,
    };
    let full = 1usize << algs.len();
    let mut acc = Acc::default();
    let record_cross = |acc: &mut Acc, t: &[Invariant], z: &Zp| {
        if acc.cross.points < cfg.cross_check_limit {
            if let Some(ok) = ev.cross(z, t[0]) {
                acc.cross.points += 1;
                if !ok {
                    acc.cross.mismatches += 1;
                }
            }
        }
    };

    let corestricted = algs.iter().all(|a| a.corestrict);
    if corestricted && assumption_b(&spec.k, p).map(|r| r.holds).unwrap_or(false) {
        for (z, origin) in targeted_constructions(spec, p, cfg) {
            if let Eval::Tuple(t, z) = ev.eval(&z)? {
                record_cross(&mut acc, &t, &z);
                profile.notes.push(format!("{origin} gives {}", fmt_tuple(&t)));
                acc.add(t, &z, origin);
            }
        }
    }

    let mut status = None;
    if acc.tuples.len() == full {
        status = Some(ProfileStatus::Complete("every tuple is attained".into()));
    }
    let mut prev: Option<(BTreeSet<Vec<Invariant>>, usize)> = None;
    let n0 = start_precision(p);
    let mut enumeration_stopped = None;
    for idx in 0..cfg.max_levels {
        if status.is_some() {
            break;
        }
        let n = n0 + 2 * idx;
        let filter = |pt: &AffinePointMod| pt.is_hensel_sufficient();
        let pts = match enumerate_points_mod_with(spec, p, n, Some(&filter), cfg.max_modulus, cfg.max_points) {
            Ok(v) => v,
            Err(Error::Resource(r)) => {
                enumeration_stopped = Some(r);
                break;
            }
            Err(e) => return Err(e),
        };
        let results: Vec<Result<Option<(Vec<Invariant>, Zp)>>> =
            pts.par_iter().map(|pt| ev.eval_class(pt)).collect();
        let mut set = BTreeSet::new();
        let mut undetermined = 0;
        for r in results {
            match r? {
                Some((t, z)) => {
                    if set.insert(t.clone()) || acc.cross.points < cfg.cross_check_limit / 2 {
                        record_cross(&mut acc, &t, &z);
                    }
                    acc.add(t, &z, &format!("class mod {p}^{n}"));
                }
                None => undetermined += 1,
            }
        }
        profile.levels.push(LevelSummary {
            precision: n,
            classes: pts.len(),
            tuples: set.len(),
            undetermined,
        });
        if acc.tuples.len() == full {
            status = Some(ProfileStatus::Complete("every tuple is attained".into()));
        } else if let Some((ps, pu)) = &prev {
            if *ps == set && *pu == 0 && undetermined == 0 {
                status = Some(ProfileStatus::Complete(format!(
                    "identical attainable sets mod {p}^{} and {p}^{n}",
                    n - 2
                )));
            }
        }
        prev = Some((set, undetermined));
    }

    if status.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ p.rotate_left(17));
        let targets = target_residues(algs, &pb);
        let mut found = 0;
        for attempt in 0..cfg.sample_attempts {
            let fixed = if attempt % 2 == 1 && !targets.is_empty() {
                let (i, r) = &targets[rng.gen_range(0..targets.len())];
                let u = rng.gen_bigint_range(&BigInt::one(), &pb);
                Some((*i, r + &pb * u))
            } else {
                None
            };
            let target = 3 + cfg.extra_precision;
            if let Some(z) = random_point(spec, &pb, fixed, &mut rng, target) {
                if let Eval::Tuple(t, z) = ev.eval(&z)? {
                    found += 1;
                    record_cross(&mut acc, &t, &z);
                    acc.add(t, &z, "random ℤ_p-point");
                }
            }
            if acc.tuples.len() == full {
                break;
            }
        }
        profile.notes.push(format!("{found} random ℤ_p-points evaluated"));
        status = Some(if acc.tuples.len() == full {
            ProfileStatus::Complete("every tuple is attained".into())
        } else {
            ProfileStatus::Partial(match enumeration_stopped {
                Some(r) => format!("enumeration out of budget ({r}); sampled only"),
                None => "no two consecutive levels agreed; sampled".into(),
            })
        });
    }
    if algs.iter().any(|a| a.corestrict && p == 2) {
        let d = &algs[0].base_field_disc;
        if !matches!(
            super::quadratic::quadratic_local_data(d, 2, 1)?,
            super::quadratic::QuadraticLocalData::Split { .. }
        ) {
            profile.notes.push(format!(
                "dyadic symbols decided by isotropy search to depth π^(4e+6) with slope {} and offset {}",
                cfg.isotropy.slope, cfg.isotropy.offset
            ));
        }
    }
    profile.status = status.unwrap();
    if !others.is_empty() {
        profile.cross_check = Some(acc.cross);
    }
    profile.attainable = acc.tuples.keys().cloned().collect();
    profile.samples = acc.tuples.into_values().collect();
    Ok(profile)
}

pub(crate) fn fmt_tuple(t: &[Invariant]) -> String {
    let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn real_profile(
    spec: &SurfaceSpec,
    algs: &[QuatAlgebraSpec],
    generators: Vec<String>,
    cfg: &ProfileConfig,
) -> Result<InvariantProfile> {
    let mut profile = InvariantProfile {
        place: Place::Infinity,
        generators,
        attainable: BTreeSet::new(),
        samples: vec![],
        status: ProfileStatus::Partial(String::new()),
        levels: vec![],
        notes: vec![],
        cross_check: None,
    };
    let constant = algs
        .iter()
        .all(|a| slot2_real_signs(a).is_none_or(|s| s[0] && s[1]));
    if constant {
        let zero = vec![Invariant::Zero; algs.len()];
        profile.attainable.insert(zero.clone());
        profile.samples.push(ProfileSample {
            tuple: zero,
            point: SamplePoint::Real(real_witness(spec)),
            origin: "real witness".into(),
        });
        profile.status =
            ProfileStatus::Complete("slot 2 is positive at every real place, so every symbol is split".into());
        return Ok(profile);
    }
    // sign pattern of each symbol at real points (x, y, z) with integral y, z
    let r = cfg.real_radius;
    let to_f = |b: &BigInt| b.to_f64().unwrap_or(f64::NAN);
    let (a, b, c, d) = (to_f(&spec.a), to_f(&spec.b), to_f(&spec.c), to_f(&spec.d));
    let mut acc: BTreeMap<Vec<Invariant>, ProfileSample> = BTreeMap::new();
    for y in -r..=r {
        for z in -r..=r {
            let (yf, zf) = (y as f64, z as f64);
            let bq = yf * zf - a;
            let cq = yf * yf + zf * zf - b * yf - c * zf - d;
            let disc = bq * bq - 4.0 * cq;
            if disc < 0.0 {
                continue;
            }
            for sgn in [1.0, -1.0] {
                let x = (-bq + sgn * disc.sqrt()) / 2.0;
                let pt = [x, yf, zf];
                let Some(t) = algs.iter().map(|alg| real_invariant(alg, &pt)).collect::<Option<Vec<_>>>() else {
                    continue;
                };
                acc.entry(t.clone()).or_insert_with(|| ProfileSample {
                    tuple: t,
                    point: SamplePoint::Real(RealWitness {
                        x: format!("{x:.12}"),
                        y: y.into(),
                        z: z.into(),
                        exact: false,
                        residual: 0.0,
                    }),
                    origin: "real grid point".into(),
                });
            }
        }
    }
    profile.attainable = acc.keys().cloned().collect();
    profile.samples = acc.into_values().collect();
    profile.status = if profile.is_full() {
        ProfileStatus::Complete("every tuple is attained".into())
    } else {
        ProfileStatus::Partial(format!("sampled real points with |y|, |z| ≤ {r}"))
    };
    Ok(profile)
}

/// Floating-point evaluation at a real point; `None` near a sign change.
fn real_invariant(alg: &QuatAlgebraSpec, pt: &[f64; 3]) -> Option<Invariant> {
    let t = pt[alg.coordinate.index()];
    let signs = slot2_real_signs(alg)?;
    if let Some(sc) = &alg.special_case {
        let v = t - 2.0;
        if v.abs() < 1e-9 {
            return None;
        }
        return Some(Invariant::from_half(v < 0.0 && !signs[0] && sc.m < BigInt::zero()));
    }
    let sd = alg.base_field_disc.to_f64()?.sqrt();
    let tr = alg.trace().to_f64()?;
    let mut total = Invariant::Zero;
    for (k, sgn) in [1.0, -1.0].into_iter().enumerate() {
        let s1 = t - (tr + sgn * sd) / 2.0;
        if s1.abs() < 1e-9 * (1.0 + t.abs()) {
            return None;
        }
        total += Invariant::from_half(s1 < 0.0 && !signs[k]);
    }
    Some(total)
}
