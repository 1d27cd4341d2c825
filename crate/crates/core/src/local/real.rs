//! Real points: fix integers `(y, z)` and take a root of the quadratic in `x`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::serde_int;
use crate::surface::SurfaceSpec;

/// `(x, y, z)` with `y, z` integers and `x` the larger root of
/// `x² + (yz-a)x + (y²+z²-by-cz-d) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealWitness {
    /// Decimal expansion of `x` (exact when `exact` is set).
    pub x: String,
    #[serde(with = "serde_int::bigint")]
    pub y: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub z: BigInt,
    pub exact: bool,
    /// `|f(x, y, z)|` at the printed `x`.
    pub residual: f64,
}

impl RealWitness {
    pub fn x_f64(&self) -> f64 {
        self.x.parse().unwrap_or(f64::NAN)
    }

    /// The witness as an integral point, when `x` is an integer.
    pub fn integral_point(&self) -> Option<[BigInt; 3]> {
        if !self.exact {
            return None;
        }
        Some([self.x.parse().ok()?, self.y.clone(), self.z.clone()])
    }
}

fn discriminant(spec: &SurfaceSpec, y: &BigInt, z: &BigInt) -> BigInt {
    let lin = y * z - &spec.a;
    let cst = y * y + z * z - &spec.b * y - &spec.c * z - &spec.d;
    &lin * &lin - BigInt::from(4) * cst
}

pub fn real_witness(spec: &SurfaceSpec) -> RealWitness {
    real_witness_with(spec, 20)
}

/// Tries the box `max(|y|,|z|) ≤ radius` ring by ring, then walks `y = 3`
/// out past the larger root of the discriminant, which is a quadratic in
/// `z` with leading coefficient `5`, so the walk always ends.
pub fn real_witness_with(spec: &SurfaceSpec, radius: i64) -> RealWitness {
    for r in 0..=radius.max(0) {
        for y in -r..=r {
            for z in -r..=r {
                if y.abs().max(z.abs()) != r {
                    continue;
                }
                let (y, z) = (BigInt::from(y), BigInt::from(z));
                if !discriminant(spec, &y, &z).is_negative() {
                    return build(spec, y, z);
                }
            }
        }
    }
    let y = BigInt::from(3);
    // disc(3, z) = 5z² + (4c - 6a)z + (a² - 36 + 12b + 4d)
    let b1 = BigInt::from(4) * &spec.c - BigInt::from(6) * &spec.a;
    let c1 = &spec.a * &spec.a - BigInt::from(36) + BigInt::from(12) * &spec.b + BigInt::from(4) * &spec.d;
    let inner = &b1 * &b1 - BigInt::from(20) * c1;
    let mut z = if inner.is_negative() {
        BigInt::zero()
    } else {
        (-&b1 + inner.sqrt()).div_floor(&BigInt::from(10))
    };
    while discriminant(spec, &y, &z).is_negative() {
        z += 1;
    }
    build(spec, y, z)
}

fn build(spec: &SurfaceSpec, y: BigInt, z: BigInt) -> RealWitness {
    let disc = discriminant(spec, &y, &z);
    let lin = &y * &z - &spec.a;
    let s = disc.sqrt();
    if &s * &s == disc && (&s - &lin).is_even() {
        let x: BigInt = (&s - &lin) / BigInt::from(2);
        return RealWitness {
            x: x.to_string(),
            y,
            z,
            exact: true,
            residual: 0.0,
        };
    }
    // x ≈ (-lin + √disc)/2 to `digits` decimals
    let digits = 30 + disc.bits() as u32 / 3;
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let root = (&disc * &scale * &scale).sqrt();
    let num = -&lin * &scale + root;
    let x = BigRational::new(num.clone(), BigInt::from(2) * &scale);
    let res = real_residual_rat(spec, &x, &y, &z);
    RealWitness {
        x: decimal(&num, &(BigInt::from(2) * &scale), 20),
        y,
        z,
        exact: false,
        residual: res.abs().to_f64().unwrap_or(f64::INFINITY),
    }
}

fn decimal(num: &BigInt, den: &BigInt, places: usize) -> String {
    let neg = num.is_negative();
    let scaled = num.abs() * num_traits::pow(BigInt::from(10), places) / den;
    let s = format!("{:0>width$}", scaled.to_string(), width = places + 1);
    let (int, frac) = s.split_at(s.len() - places);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

fn real_residual_rat(spec: &SurfaceSpec, x: &BigRational, y: &BigInt, z: &BigInt) -> BigRational {
    let r = |n: &BigInt| BigRational::from_integer(n.clone());
    let (y, z) = (r(y), r(z));
    x * x + &y * &y + &z * &z + x * &y * &z - r(&spec.a) * x - r(&spec.b) * &y - r(&spec.c) * &z - r(&spec.d)
}

/// `|f(x, y, z)|` at an integer triple.
pub fn real_residual(spec: &SurfaceSpec, p: &[BigInt; 3]) -> BigInt {
    spec.eval(&p[0], &p[1], &p[2]).abs()
}
