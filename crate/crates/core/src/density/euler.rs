//! Truncated Euler products with an explicit lower bound on the tail.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cp_count, tail_constant, DensitySetup};
use crate::error::{invalid, Result};
use crate::numeric::arith::primes_up_to;

pub const DEFAULT_CUTOFF: u64 = 10_000;

/// Endpoints longer than this many bits are written rounded outward to
/// multiples of `10^-100`.
const EXACT_BITS: u64 = 512;
const DIGITS: u32 = 100;

/// A closed interval with exact rational endpoints, serialized as `"n/d"`
/// strings next to their nearest doubles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl Interval {
    /// The endpoints as written: exact when short, otherwise the lower one
    /// rounded down and the upper one rounded up.
    pub fn outward(&self) -> (BigRational, BigRational) {
        let scale = BigRational::from_integer(BigInt::from(10).pow(DIGITS));
        let long = |x: &BigRational| x.numer().bits() + x.denom().bits() > EXACT_BITS;
        let lo = if long(&self.lower) {
            (&self.lower * &scale).floor() / &scale
        } else {
            self.lower.clone()
        };
        let hi = if long(&self.upper) {
            (&self.upper * &scale).ceil() / &scale
        } else {
            self.upper.clone()
        };
        (lo, hi)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn lower_f64(&self) -> f64 {
        ratio_f64(&self.lower)
    }

    pub fn upper_f64(&self) -> f64 {
        ratio_f64(&self.upper)
    }
}

/// Nearest double, good for ratios far outside the `f64` range of either part.
pub(crate) fn ratio_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let n = x.numer().abs();
    let d = x.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    // bring the quotient near 2^60 and divide in integers
    let q = if shift > 60 {
        n / (d << (shift - 60) as usize)
    } else {
        (n << (60 - shift) as usize) / d
    };
    let v = q.to_f64().unwrap_or(f64::NAN) * 2f64.powi((shift - 60) as i32);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lower: String,
    upper: String,
    lower_approx: f64,
    upper_approx: f64,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) = self.outward();
        IntervalRepr {
            lower: lo.to_string(),
            upper: hi.to_string(),
            lower_approx: self.lower_f64(),
            upper_approx: self.upper_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        let parse = |s: &str| s.parse::<BigRational>().map_err(serde::de::Error::custom);
        Ok(Interval {
            lower: parse(&r.lower)?,
            upper: parse(&r.upper)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFactor {
    pub p: u64,
    pub c_p: u64,
    /// `1 - c_p/p^n`.
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub setup: String,
    pub cutoff: u64,
    /// `1/Π m_i`, the measure of the residue classes.
    pub prefactor: String,
    pub local_factors: Vec<LocalFactor>,
    /// Product of the local factors, without the prefactor.
    pub partial_product: Interval,
    /// `K`, with `c_p ≤ K·p^{n-2}` for every prime past the cutoff.
    pub tail_constant: u64,
    /// `K/N`: the tail product is at least `1 - K/N`.
    pub tail_bound: String,
    /// Interval for the density, prefactor included.
    pub final_interval: Interval,
}

/// Exact product of `1 - c_p/p^n` over the primes up to `cutoff` and the
/// excluded primes beyond it.
pub fn partial_product_exact(setup: &DensitySetup, cutoff: u64) -> Result<(BigRational, Vec<LocalFactor>)> {
    let mut primes = primes_up_to(cutoff);
    for &p in &setup.excluded_primes {
        if p > cutoff {
            primes.push(p);
        }
    }
    for f in &setup.polynomials {
        for (p, _) in crate::numeric::factor(&BigInt::from(f.divisor), 1 << 20).primes {
            let p = p.to_u64().expect("small");
            if p > cutoff && !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    let n = setup.dimension() as u32;
    let counts = primes
        .par_iter()
        .map(|&p| cp_count(setup, p).map(|c| (p, c)))
        .collect::<Result<Vec<_>>>()?;
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    let mut factors = Vec::with_capacity(counts.len());
    for (p, c) in counts {
        let pn = BigInt::from(p).pow(n);
        let c_big = BigInt::from(c);
        num *= &pn - &c_big;
        den *= &pn;
        factors.push(LocalFactor {
            p,
            c_p: c.to_u64().expect("c_p fits"),
            factor: 1.0 - c as f64 / (p as f64).powi(n as i32),
        });
    }
    Ok((BigRational::new(num, den), factors))
}

pub fn prefactor(setup: &DensitySetup) -> BigRational {
    let m: BigInt = setup.substitutions.iter().map(|s| BigInt::from(s.modulus)).product();
    BigRational::new(BigInt::one(), m)
}

/// Density interval for the setup: the partial product up to `cutoff`, and
/// below it the tail estimate `Π_{p>N} (1 - c_p/p^n) ≥ 1 - Σ_{p>N} K/p² ≥ 1 - K/N`.
pub fn euler_product(setup: &DensitySetup, cutoff: u64) -> Result<DensityReport> {
    if cutoff < 5 {
        return invalid(format!("cutoff {cutoff} below 5"));
    }
    let (product, local_factors) = partial_product_exact(setup, cutoff)?;
    let pre = prefactor(setup);
    let k = tail_constant(setup);
    let tail = BigRational::new(BigInt::from(k), BigInt::from(cutoff));
    let keep = (BigRational::one() - &tail).max(BigRational::zero());
    let upper = &pre * &product;
    let lower = &upper * keep;
    Ok(DensityReport {
        setup: setup.name.clone(),
        cutoff,
        prefactor: pre.to_string(),
        local_factors,
        partial_product: Interval {
            lower: product.clone(),
            upper: product,
        },
        tail_constant: k,
        tail_bound: tail.to_string(),
        final_interval: Interval { lower, upper },
    })
}
