//! The quaternion algebras generating `Br₁U/Br₀U` and their local
//! invariants at points.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hilbert::{hilbert_int, Invariant, Place};
use super::quadratic::{
    hilbert_symbol_quadratic_local, places_above, FElem, IsotropyConfig, PlaceAbove,
};
use crate::error::{invalid, Error, Result};
use crate::local::AffinePointMod;
use crate::numeric::arith::split_valuation;
use crate::numeric::factor::{factor, DEFAULT_TRIAL_BOUND};
use crate::numeric::{padic_sqrt, serde_int, MultiQuadElem, MultiQuadTower};
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    X,
    Y,
    Z,
}

impl Coordinate {
    pub fn index(self) -> usize {
        match self {
            Coordinate::X => 0,
            Coordinate::Y => 1,
            Coordinate::Z => 2,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["x", "y", "z"][self.index()])
    }
}

/// The class `(coordinate - 2, m)` over `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialCase {
    pub coordinate: Coordinate,
    #[serde(with = "serde_int::bigint")]
    pub m: BigInt,
}

/// A quaternion algebra, either `Cor_{F/ℚ}(t - (k1·ki + √D)/2, α²)` over
/// `F = ℚ(√D)`, `D = (k1²-4)(ki²-4)`, `α = k1√(ki²-4) + ki√(k1²-4)`, where
/// `t` is the coordinate, or a special-case class over `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuatAlgebraSpec {
    pub name: String,
    #[serde(with = "serde_int::bigint")]
    pub base_field_disc: BigInt,
    pub coordinate: Coordinate,
    /// Index `i ∈ {2,3,4}` of the partner parameter.
    pub partner: usize,
    pub k1: i64,
    pub ki: i64,
    /// `α² = r + s√D`.
    pub slot2: FElem,
    pub corestrict: bool,
    pub special_case: Option<SpecialCase>,
}

impl QuatAlgebraSpec {
    pub fn corestricted(name: &str, k1: i64, ki: i64, partner: usize, coordinate: Coordinate) -> Self {
        let (b1, bi) = (BigInt::from(k1), BigInt::from(ki));
        let d1 = &b1 * &b1 - 4;
        let di = &bi * &bi - 4;
        let d = &d1 * &di;
        let r = &b1 * &b1 * &di + &bi * &bi * &d1;
        let s = BigInt::from(2) * &b1 * &bi;
        QuatAlgebraSpec {
            name: name.into(),
            base_field_disc: d,
            coordinate,
            partner,
            k1,
            ki,
            slot2: FElem::from_ints(r, s),
            corestrict: true,
            special_case: None,
        }
    }

    pub fn special(name: &str, coordinate: Coordinate, m: BigInt) -> Self {
        QuatAlgebraSpec {
            name: name.into(),
            base_field_disc: BigInt::from(1),
            coordinate,
            partner: 0,
            k1: 0,
            ki: 0,
            slot2: FElem::from_ints(m.clone(), 0),
            corestrict: false,
            special_case: Some(SpecialCase { coordinate, m }),
        }
    }

    /// `k1·ki`, the trace of `(k1·ki + √D)/2`.
    pub fn trace(&self) -> BigInt {
        BigInt::from(self.k1) * self.ki
    }

    /// `t - (k1·ki + √D)/2` at the coordinate value `t`.
    pub fn slot1_at(&self, t: &BigInt) -> FElem {
        let half = BigRational::new(1.into(), 2.into());
        let r = BigRational::from_integer(t.clone()) - BigRational::from_integer(self.trace()) * &half;
        FElem::new(r, -half)
    }

    /// `N(slot1) = t² - k1·ki·t + k1² + ki² - 4`.
    pub fn slot1_norm(&self, t: &BigInt) -> BigInt {
        let (b1, bi) = (BigInt::from(self.k1), BigInt::from(self.ki));
        t * t - self.trace() * t + &b1 * &b1 + &bi * &bi - 4
    }

    /// `α²` as an element of the multiquadratic field, where it must be
    /// supported on the basis elements `1` and `√d1·√di`.
    pub fn slot2_multiquad(&self, tower: &Arc<MultiQuadTower>) -> Result<MultiQuadElem> {
        if !self.corestrict {
            return Ok(MultiQuadElem::from_int(tower, self.slot2.r.to_integer()));
        }
        let i = self.partner - 1;
        let a = MultiQuadElem::sqrt_radicand(tower, i).scale(&BigRational::from_integer(self.k1.into()));
        let b = MultiQuadElem::sqrt_radicand(tower, 0).scale(&BigRational::from_integer(self.ki.into()));
        let alpha = a.try_add(&b)?;
        let sq = alpha.square();
        let allowed = [0usize, 1 | (1 << i)];
        if sq.coords.iter().enumerate().any(|(m, c)| !c.is_zero() && !allowed.contains(&m)) {
            return Err(Error::Arithmetic(format!("{}: α² leaves the span of 1 and √D", self.name)));
        }
        Ok(sq)
    }

    fn describe(&self) -> String {
        match &self.special_case {
            Some(s) => format!("({} - 2, {})", s.coordinate, s.m),
            None => format!(
                "Cor({} - ({} + √{})/2, {} + {}√{})",
                self.coordinate,
                self.trace(),
                self.base_field_disc,
                self.slot2.r,
                self.slot2.s,
                self.base_field_disc
            ),
        }
    }
}

impl fmt::Display for QuatAlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.name, self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "reason", rename_all = "kebab-case")]
pub enum GeneratorShape {
    /// Full-degree field; three corestricted algebras, all equal modulo constants.
    Corestricted,
    /// `k1 ≠ k2 = k3 = k4` with a degree-4 field; three classes over `ℚ`.
    SpecialCase,
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub shape: GeneratorShape,
    pub algebras: Vec<QuatAlgebraSpec>,
}

impl GeneratorSet {
    /// The generators whose invariants enter the verdict: `𝒜1` alone in the
    /// corestricted case, all three special-case classes otherwise.
    pub fn in_play(&self) -> &[QuatAlgebraSpec] {
        match self.shape {
            GeneratorShape::Corestricted => &self.algebras[..1],
            _ => &self.algebras,
        }
    }
}

pub fn algebra_generators(spec: &SurfaceSpec) -> GeneratorSet {
    let unsupported = |r: String| GeneratorSet {
        shape: GeneratorShape::Unsupported(r),
        algebras: vec![],
    };
    if let Some(r) = spec.smoothness().reason {
        return unsupported(format!("singular surface: {r}"));
    }
    let [k1, k2, k3, k4] = spec.k.0;
    if spec.field_degree == 16 {
        return GeneratorSet {
            shape: GeneratorShape::Corestricted,
            algebras: vec![
                QuatAlgebraSpec::corestricted("A1", k1, k2, 2, Coordinate::X),
                QuatAlgebraSpec::corestricted("A2", k1, k4, 4, Coordinate::Y),
                QuatAlgebraSpec::corestricted("A3", k1, k3, 3, Coordinate::Z),
            ],
        };
    }
    if k1 != k2 && k2 == k3 && k3 == k4 && spec.field_degree == 4 {
        let m = BigInt::from(k2) * k2 - BigInt::from(4);
        return GeneratorSet {
            shape: GeneratorShape::SpecialCase,
            algebras: [Coordinate::X, Coordinate::Y, Coordinate::Z]
                .into_iter()
                .map(|c| QuatAlgebraSpec::special(&format!("B{}", c), c, m.clone()))
                .collect(),
        };
    }
    unsupported(format!(
        "field degree {} without the k1 ≠ k2 = k3 = k4 shape",
        spec.field_degree
    ))
}

/// A point at which to evaluate invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum EvalPoint {
    /// Exact integer coordinates.
    Exact {
        #[serde(with = "serde_int::bigint_vec")]
        coords: Vec<BigInt>,
    },
    /// A `ℤ_p`-point known modulo `p^N`.
    Local { point: AffinePointMod },
}

impl EvalPoint {
    pub fn exact(c: [BigInt; 3]) -> Self {
        EvalPoint::Exact { coords: c.to_vec() }
    }
}

/// Known-digits requirement beyond the valuation, in powers of the
/// uniformizer: units `≡ 1 mod π^{margin}` are squares.
fn margin(p: u64, e: u32) -> u32 {
    if p == 2 {
        2 * e + 1
    } else {
        1
    }
}

/// `v_p` of the image of `x` under `√D ↦ sign·√D` into `ℚ_p`.
fn split_valuation_of(x: &FElem, d: &BigInt, p: u64, sign: i8) -> Result<i64> {
    let den = x.r.denom().lcm(x.s.denom());
    let dq = BigRational::from_integer(den.clone());
    let a0 = (&x.r * &dq).to_integer();
    let a1 = (&x.s * &dq).to_integer();
    let n = &a0 * &a0 - &a1 * &a1 * d;
    let prec = split_valuation(&n, p).map(|(v, _)| v).unwrap_or(0) + 2;
    let r = padic_sqrt(d, p, prec)
        .ok_or_else(|| Error::Arithmetic(format!("{d} has no square root in ℚ_{p}")))?
        .value;
    let r = if sign < 0 { -r } else { r };
    let e = a0 + a1 * r;
    let m = BigInt::from(p).pow(prec);
    let v = split_valuation(&e.mod_floor(&m), p).map(|(v, _)| v as i64).unwrap_or(prec as i64);
    Ok(v - split_valuation(&den, p).unwrap().0 as i64)
}

/// Invariant at `place` of `alg` at a point whose relevant coordinate is `t`,
/// known modulo `p^n` when `known` is `Some(n)` and exactly otherwise.
pub(crate) fn invariant_at_value(
    alg: &QuatAlgebraSpec,
    t: &BigInt,
    known: Option<u32>,
    place: Place,
    iso: &IsotropyConfig,
) -> Result<Invariant> {
    if let Some(sc) = &alg.special_case {
        let v = t - BigInt::from(2);
        if v.is_zero() {
            return Err(Error::OutsideLocus(format!("{} - 2 vanishes", sc.coordinate)));
        }
        if let (Some(n), Place::Prime(p)) = (known, place) {
            let val = split_valuation(&v, p).unwrap().0;
            if val + margin(p, 1) > n {
                return Err(Error::Precision(format!("v_{p}({} - 2) too large for mod {p}^{n}", sc.coordinate)));
            }
        }
        return Ok(hilbert_int(&v, &sc.m, place));
    }
    let d = &alg.base_field_disc;
    let slot1 = alg.slot1_at(t);
    let mut total = Invariant::Zero;
    for w in places_above(d, place)? {
        if let (Some(n), Place::Prime(p)) = (known, place) {
            let (v, e) = match w {
                PlaceAbove::Split { sign, .. } => (split_valuation_of(&slot1, d, p, sign)?, 1),
                PlaceAbove::Inert { .. } => (super::hilbert::unit_class(&slot1.norm(d), p).0 / 2, 1),
                _ => (super::hilbert::unit_class(&slot1.norm(d), p).0, 2),
            };
            if v + margin(p, e) as i64 > (e * n) as i64 {
                return Err(Error::Precision(format!(
                    "slot 1 has valuation {v} at a place above {p}; point known mod {p}^{n}"
                )));
            }
        }
        total += hilbert_symbol_quadratic_local(&slot1, &alg.slot2, d, &w, iso)?;
    }
    Ok(total)
}

/// Local invariant of `alg` at `place`, evaluated at `point`.
///
/// For a corestricted algebra this is the sum over the places `w | v` of
/// `F` of the symbols `(slot1, α²)_w`.
pub fn cor_invariant(
    alg: &QuatAlgebraSpec,
    point: &EvalPoint,
    place: Place,
    iso: &IsotropyConfig,
) -> Result<Invariant> {
    let i = alg.coordinate.index();
    match point {
        EvalPoint::Exact { coords } => {
            if coords.len() != 3 {
                return invalid("a point has three coordinates");
            }
            invariant_at_value(alg, &coords[i], None, place, iso)
        }
        EvalPoint::Local { point } => {
            let p = point.p.to_u64().filter(|&p| place == Place::Prime(p));
            if p.is_none() {
                return invalid(format!("a point mod {}^{} has no invariant at {place}", point.p, point.n));
            }
            invariant_at_value(alg, &point.coords()[i], Some(point.n), place, iso)
        }
    }
}

/// One term of a global reciprocity sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingTerm {
    pub place: Place,
    pub invariant: Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraPairing {
    pub algebra: String,
    pub terms: Vec<PairingTerm>,
}

impl AlgebraPairing {
    pub fn sum(&self) -> Invariant {
        self.terms.iter().map(|t| t.invariant).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    #[serde(with = "serde_int::bigint_vec")]
    pub point: Vec<BigInt>,
    pub algebras: Vec<AlgebraPairing>,
}

impl PairingReport {
    /// Sum over every algebra and place; `0` is forced by reciprocity.
    pub fn total(&self) -> BigRational {
        let halves = self
            .algebras
            .iter()
            .filter(|a| a.sum().is_half())
            .count();
        BigRational::new(BigInt::from(halves), BigInt::from(2))
    }

    /// True when every per-algebra sum vanishes.
    pub fn is_consistent(&self) -> bool {
        self.algebras.iter().all(|a| !a.sum().is_half())
    }
}

fn primes_of(n: &BigInt, out: &mut BTreeSet<u64>) -> Result<()> {
    if n.is_zero() {
        return Ok(());
    }
    let f = factor(n, DEFAULT_TRIAL_BOUND);
    if !f.is_complete() {
        return Err(Error::Resource(format!("could not factor {n}")));
    }
    for (q, _) in f.primes {
        out.insert(q.to_u64().ok_or_else(|| Error::Resource(format!("prime {q} out of range")))?);
    }
    Ok(())
}

/// Places at which `alg` can have a nonzero invariant at an integral point
/// with the given relevant coordinate.
pub fn support(alg: &QuatAlgebraSpec, t: &BigInt) -> Result<Vec<Place>> {
    let mut ps = BTreeSet::from([2u64]);
    match &alg.special_case {
        Some(sc) => {
            primes_of(&sc.m, &mut ps)?;
            primes_of(&(t - 2), &mut ps)?;
        }
        None => {
            primes_of(&alg.base_field_disc, &mut ps)?;
            primes_of(&alg.slot1_norm(t), &mut ps)?;
            let diff = BigInt::from(alg.ki) * alg.ki - BigInt::from(alg.k1) * alg.k1;
            primes_of(&diff, &mut ps)?;
        }
    }
    let mut out: Vec<Place> = ps.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    Ok(out)
}

/// Sums the local invariants of each algebra at an integral point over the
/// finite set of places where they can be nonzero.
pub fn global_pairing_check(
    point: &[BigInt; 3],
    algs: &[QuatAlgebraSpec],
    spec: &SurfaceSpec,
    iso: &IsotropyConfig,
) -> Result<PairingReport> {
    if !spec.contains(point) {
        return invalid(format!("({}, {}, {}) is not on the surface", point[0], point[1], point[2]));
    }
    let ep = EvalPoint::exact(point.clone());
    let mut algebras = Vec::new();
    for alg in algs {
        let t = &point[alg.coordinate.index()];
        let mut terms = Vec::new();
        for place in support(alg, t)? {
            let invariant = cor_invariant(alg, &ep, place, iso)?;
            terms.push(PairingTerm { place, invariant });
        }
        algebras.push(AlgebraPairing {
            algebra: alg.name.clone(),
            terms,
        });
    }
    Ok(PairingReport {
        point: point.to_vec(),
        algebras,
    })
}

/// Sign of the slot-2 element under each real embedding; `None` for
/// imaginary `F`.
pub(crate) fn slot2_real_signs(alg: &QuatAlgebraSpec) -> Option<[bool; 2]> {
    let d = &alg.base_field_disc;
    if alg.special_case.is_some() {
        let pos = alg.slot2.r.is_positive();
        return Some([pos, pos]);
    }
    if d.is_negative() {
        return None;
    }
    let s = &alg.slot2;
    let pos = |sign: i8| {
        let t = if sign < 0 { -&s.s } else { s.s.clone() };
        let lhs = &s.r * &s.r;
        let rhs = &t * &t * BigRational::from_integer(d.clone());
        if s.r.is_positive() && (t.is_positive() || lhs > rhs) {
            true
        } else {
            t.is_positive() && rhs > lhs
        }
    };
    Some([pos(1), pos(-1)])
}
