//! The surface `x² + y² + z² + xyz = ax + by + cz + d` attached to `k`.

mod assumptions;
mod lines;

pub use assumptions::{
    assumption_33, assumption_a, assumption_b, find_admissible_k, AssumptionKind, AssumptionReport,
    PairEvidence,
};
pub use lines::{
    incidence_matrix, intersection_number, line, lines_of_x, verify_on_surface, LineLabel, LineOnX,
};

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::serde_int;
use crate::numeric::{multiquad_degree, MultiQuadTower};

/// Integer parameters `(k1, k2, k3, k4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(pub [i64; 4]);

impl ParamVector {
    pub fn new(k1: i64, k2: i64, k3: i64, k4: i64) -> Self {
        ParamVector([k1, k2, k3, k4])
    }

    pub fn big(&self) -> [BigInt; 4] {
        self.0.map(BigInt::from)
    }

    /// Radicands `k_i² - 4`.
    pub fn radicands(&self) -> [BigInt; 4] {
        self.0.map(|k| BigInt::from(k) * k - 4)
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.0;
        write!(f, "{},{},{},{}", k[0], k[1], k[2], k[3])
    }
}

impl std::str::FromStr for ParamVector {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return invalid(format!("expected four comma-separated integers, got {s:?}"));
        }
        let mut k = [0i64; 4];
        for (slot, p) in k.iter_mut().zip(parts) {
            *slot = p
                .parse()
                .map_err(|_| crate::Error::InvalidArgument(format!("not an integer: {p:?}")))?;
        }
        Ok(ParamVector(k))
    }
}

/// Coefficients `(a, b, c, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficients {
    #[serde(with = "serde_int::bigint")]
    pub a: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub b: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub c: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub d: BigInt,
}

pub fn coefficients_from_k(k: &ParamVector) -> Coefficients {
    let [k1, k2, k3, k4] = k.big();
    let a = &k1 * &k2 + &k3 * &k4;
    let b = &k1 * &k4 + &k2 * &k3;
    let c = &k1 * &k3 + &k2 * &k4;
    let sq: BigInt = [&k1, &k2, &k3, &k4].iter().map(|x| *x * *x).sum();
    let d = BigInt::from(4) - sq - &k1 * &k2 * &k3 * &k4;
    Coefficients { a, b, c, d }
}

/// Singularity discriminant `Δ(k)`.
pub fn discriminant(k: &ParamVector) -> BigInt {
    let [k1, k2, k3, k4] = k.big();
    let sq: BigInt = [&k1, &k2, &k3, &k4].iter().map(|x| *x * *x).sum();
    let first = BigInt::from(2) * sq - &k1 * &k2 * &k3 * &k4 - 16;
    let four = BigInt::from(4);
    let prod = [&k1, &k2, &k3, &k4]
        .iter()
        .fold(BigInt::from(1), |acc, x| acc * (&four - *x * *x));
    &first * &first - prod
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Smoothness {
    #[serde(with = "serde_int::bigint")]
    pub delta: BigInt,
    pub smooth: bool,
    /// The violated clause, when singular.
    pub reason: Option<String>,
}

pub fn discriminant_and_smoothness(k: &ParamVector) -> Smoothness {
    let delta = discriminant(k);
    let mut reason = None;
    if let Some(i) = k.0.iter().position(|x| x.abs() == 2) {
        reason = Some(format!("k{} = ±2", i + 1));
    } else if delta.is_zero() {
        reason = Some("Δ(k) = 0".to_string());
    }
    Smoothness {
        smooth: reason.is_none(),
        delta,
        reason,
    }
}

/// Degree of `Q(√(k1²-4), .., √(k4²-4))`. Zero radicands contribute nothing.
pub fn field_degree(k: &ParamVector) -> Result<u32> {
    let r = k.radicands().map(|d| if d.is_zero() { BigInt::from(1) } else { d });
    multiquad_degree(&r)
}

/// A surface together with its derived invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub k: ParamVector,
    #[serde(with = "serde_int::bigint")]
    pub a: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub b: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub c: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub d: BigInt,
    #[serde(with = "serde_int::bigint")]
    pub delta: BigInt,
    pub smooth: bool,
    pub field_degree: u32,
}

impl SurfaceSpec {
    pub fn new(k: ParamVector) -> Result<Self> {
        let Coefficients { a, b, c, d } = coefficients_from_k(&k);
        let s = discriminant_and_smoothness(&k);
        Ok(SurfaceSpec {
            k,
            a,
            b,
            c,
            d,
            delta: s.delta,
            smooth: s.smooth,
            field_degree: field_degree(&k)?,
        })
    }

    pub fn from_k(k: [i64; 4]) -> Result<Self> {
        Self::new(ParamVector(k))
    }

    pub fn smoothness(&self) -> Smoothness {
        discriminant_and_smoothness(&self.k)
    }

    pub fn require_smooth(&self) -> Result<()> {
        if let Some(r) = self.smoothness().reason {
            return Err(crate::Error::UnsupportedInput(format!(
                "surface for k=({}) is singular: {r}",
                self.k
            )));
        }
        Ok(())
    }

    pub fn tower(&self) -> Result<Arc<MultiQuadTower>> {
        MultiQuadTower::new(self.k.radicands())
    }

    /// `f(x,y,z) = x²+y²+z²+xyz-ax-by-cz-d`.
    pub fn eval(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
        x * x + y * y + z * z + x * y * z - &self.a * x - &self.b * y - &self.c * z - &self.d
    }

    /// Gradient `(2x+yz-a, 2y+xz-b, 2z+xy-c)`.
    pub fn gradient(&self, x: &BigInt, y: &BigInt, z: &BigInt) -> [BigInt; 3] {
        [
            BigInt::from(2) * x + y * z - &self.a,
            BigInt::from(2) * y + x * z - &self.b,
            BigInt::from(2) * z + x * y - &self.c,
        ]
    }

    pub fn contains(&self, p: &[BigInt; 3]) -> bool {
        self.eval(&p[0], &p[1], &p[2]).is_zero()
    }

    /// Coefficients as `i128` when they fit.
    pub fn coeffs_i128(&self) -> Option<[i128; 4]> {
        Some([
            self.a.to_i128()?,
            self.b.to_i128()?,
            self.c.to_i128()?,
            self.d.to_i128()?,
        ])
    }

    /// `[a, b, c]`, indexed by axis.
    pub fn linear(&self) -> [&BigInt; 3] {
        [&self.a, &self.b, &self.c]
    }
}
