//! Additive local invariants and Hilbert symbols over `ℚ_v`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::numeric::arith::split_valuation;
use crate::numeric::legendre;

/// Local invariant of a quaternion algebra, an element of `{0, 1/2} ⊂ ℚ/ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Invariant {
    #[default]
    Zero,
    Half,
}

impl Invariant {
    pub fn from_half(half: bool) -> Self {
        if half {
            Invariant::Half
        } else {
            Invariant::Zero
        }
    }

    pub fn is_half(self) -> bool {
        self == Invariant::Half
    }

    pub fn as_rational(self) -> BigRational {
        match self {
            Invariant::Zero => BigRational::zero(),
            Invariant::Half => BigRational::new(1.into(), 2.into()),
        }
    }
}

impl Add for Invariant {
    type Output = Invariant;
    fn add(self, o: Invariant) -> Invariant {
        Invariant::from_half(self.is_half() != o.is_half())
    }
}

impl AddAssign for Invariant {
    fn add_assign(&mut self, o: Invariant) {
        *self = *self + o;
    }
}

impl Sum for Invariant {
    fn sum<I: Iterator<Item = Invariant>>(it: I) -> Invariant {
        it.fold(Invariant::Zero, |a, b| a + b)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Zero => "0",
            Invariant::Half => "1/2",
        })
    }
}

impl Serialize for Invariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Invariant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "0" => Ok(Invariant::Zero),
            "1/2" => Ok(Invariant::Half),
            other => Err(serde::de::Error::custom(format!("not an invariant: {other}"))),
        }
    }
}

/// A place of `ℚ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => f.write_str("inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;
    fn from_str(s: &str) -> Result<Place> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Place::Infinity);
        }
        let p: u64 = t
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("not a place: {s}")))?;
        if !crate::numeric::arith::is_prime_u64(p) {
            return invalid(format!("{p} is not prime"));
        }
        Ok(Place::Prime(p))
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `x = p^v · u` for a nonzero rational, with `u` replaced by the integer
/// `num·den`, which lies in the same square class.
pub(crate) fn unit_class(x: &BigRational, p: u64) -> (i64, BigInt) {
    let (vn, un) = split_valuation(x.numer(), p).expect("nonzero");
    let (vd, ud) = split_valuation(x.denom(), p).expect("nonzero");
    (vn as i64 - vd as i64, un * ud)
}

fn eps2(u: &BigInt) -> bool {
    u.mod_floor(&BigInt::from(4)) == BigInt::from(3)
}

fn omega2(u: &BigInt) -> bool {
    let r = u.mod_floor(&BigInt::from(8));
    r == BigInt::from(3) || r == BigInt::from(5)
}

/// Hilbert symbol of two nonzero integers over `ℚ_p` or `ℝ`.
pub(crate) fn hilbert_int(a: &BigInt, b: &BigInt, place: Place) -> Invariant {
    let one = BigInt::from(1);
    hilbert_symbol_q(
        &BigRational::new(a.clone(), one.clone()),
        &BigRational::new(b.clone(), one),
        place,
    )
    .expect("nonzero")
}

/// Additive invariant of the quaternion algebra `(a, b)` over `ℚ_v`.
pub fn hilbert_symbol_q(a: &BigRational, b: &BigRational, place: Place) -> Result<Invariant> {
    if a.is_zero() || b.is_zero() {
        return invalid("Hilbert symbol of zero");
    }
    let p = match place {
        Place::Infinity => return Ok(Invariant::from_half(a.is_negative() && b.is_negative())),
        Place::Prime(p) => p,
    };
    let (va, ua) = unit_class(a, p);
    let (vb, ub) = unit_class(b, p);
    let half = if p == 2 {
        (eps2(&ua) && eps2(&ub)) ^ (va.is_odd() && omega2(&ub)) ^ (vb.is_odd() && omega2(&ua))
    } else {
        let sign = va.is_odd() && vb.is_odd() && p % 4 == 3;
        let la = vb.is_odd() && legendre(&ua, p) == -1;
        let lb = va.is_odd() && legendre(&ub, p) == -1;
        sign ^ la ^ lb
    };
    Ok(Invariant::from_half(half))
}

/// Hilbert symbol of two p-adic integers known modulo `p^prec`, given by
/// integer representatives. Fails when the valuations leave too few known
/// digits to fix the square classes.
pub(crate) fn hilbert_padic(a: &BigInt, b: &BigInt, p: u64, prec: u32) -> Result<Invariant> {
    let need = if p == 2 { 3 } else { 1 };
    for x in [a, b] {
        let m = BigInt::from(p).pow(prec);
        let r = x.mod_floor(&m);
        let v = split_valuation(&r, p).map(|(v, _)| v);
        match v {
            Some(v) if v + need <= prec => {}
            _ => {
                return Err(Error::Precision(format!(
                    "value known mod {p}^{prec} has too large a valuation"
                )))
            }
        }
    }
    Ok(hilbert_int(a, b, Place::Prime(p)))
}

/// Sum of `hilbert_symbol_q` over a finite set of places.
pub fn sum_over_places(a: &BigRational, b: &BigRational, places: &[Place]) -> Result<Invariant> {
    places.iter().map(|&v| hilbert_symbol_q(a, b, v)).sum()
}

/// Places where `(a, b)` can be nonzero: `∞`, 2 and the primes dividing the
/// numerators and denominators. `None` if some factorisation is incomplete.
pub fn support_places(a: &BigRational, b: &BigRational) -> Option<Vec<Place>> {
    let mut ps = std::collections::BTreeSet::new();
    ps.insert(2u64);
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        let f = crate::numeric::factor(n, crate::numeric::factor::DEFAULT_TRIAL_BOUND);
        if !f.is_complete() {
            return None;
        }
        for (q, _) in f.primes {
            ps.insert(q.to_u64()?);
        }
    }
    let mut out: Vec<Place> = ps.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    Some(out)
}
