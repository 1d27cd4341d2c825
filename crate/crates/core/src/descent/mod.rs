//! Vieta-involution descent: reduction into the fundamental box, exact
//! conic solving on the coordinate slices, and certified integral-point
//! search.

mod conic;
mod orbit;
pub mod pell;
mod search;
mod sieve;


use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::surface::SurfaceSpec;

pub use conic::{solve_conic_fixed_coord, solve_conic_fixed_coord_with, ConicConfig, ConicOutcome, ConicReport};
pub use orbit::{orbit_mod_p, orbit_mod_p_with, Orbit, OrbitDecomposition};
pub use pell::{pell_solve, pell_solve_with, Congruence, PellConfig, PellOutcome, PellProblem, PellSolutionClasses, QuadInt};
pub use search::{
    search_integral_points, search_integral_points_with, ConditionEvidence, Constants, SearchCertificate,
    SearchConfig, SearchKind,
};

/// Default bound for condition (1) of the box.
pub const DEFAULT_C1: u64 = 48;
/// Default bound for conditions (2) to (5) of the box.
pub const DEFAULT_C: u64 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The two other axes, in increasing order.
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

impl std::str::FromStr for Axis {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => invalid(format!("unknown axis {s:?}")),
        }
    }
}

/// The Vieta involution replacing one coordinate by the other root of the
/// quadratic it satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VietaMove {
    pub axis: Axis,
}

impl VietaMove {
    pub fn new(axis: Axis) -> Self {
        VietaMove { axis }
    }

    /// Image without the on-surface check.
    pub fn image(self, spec: &SurfaceSpec, p: &[BigInt; 3]) -> [BigInt; 3] {
        let i = self.axis.index();
        let (j, k) = self.axis.others();
        let mut out = p.clone();
        out[i] = spec.linear()[i] - &p[j.index()] * &p[k.index()] - &p[i];
        out
    }
}

/// `τ_axis(point)`; rejects points off the surface.
pub fn vieta_apply(mv: VietaMove, point: &[BigInt; 3], spec: &SurfaceSpec) -> Result<[BigInt; 3]> {
    if !spec.contains(point) {
        return invalid(format!(
            "({}, {}, {}) is not on the surface",
            point[0], point[1], point[2]
        ));
    }
    Ok(mv.image(spec, point))
}

/// `max(1, |v|)`.
pub fn height(v: &BigInt) -> BigInt {
    v.abs().max(BigInt::one())
}

/// Box conditions (numbered 1 to 5) satisfied by `p`.
pub fn box_conditions(spec: &SurfaceSpec, p: &[BigInt; 3], c1: u64, c: u64) -> Vec<u8> {
    let [x, y, z] = p;
    let lin = spec.linear();
    let c = BigInt::from(c);
    let mut out = vec![];
    if x.abs().min(y.abs()).min(z.abs()) <= BigInt::from(c1) {
        out.push(1);
    }
    let checks = [
        ((y * z).abs(), height(lin[0])),
        ((x * z).abs(), height(lin[1])),
        ((x * y).abs(), height(lin[2])),
        ((x * y * z).abs(), height(&spec.d)),
    ];
    for (n, (lhs, h)) in checks.into_iter().enumerate() {
        if lhs <= &c * h {
            out.push(n as u8 + 2);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    #[serde(with = "crate::numeric::serde_int::bigint_array3")]
    pub point: [BigInt; 3],
    /// Moves in application order; replaying them reversed recovers the input.
    pub word: Vec<VietaMove>,
    /// Box conditions met by `point`.
    pub conditions: Vec<u8>,
}

fn measure(p: &[BigInt; 3]) -> (BigInt, BigInt) {
    let abs = p.iter().map(|v| v.abs());
    (abs.clone().max().expect("three"), abs.sum())
}

/// Applies the first move (in the order x, y, z) that strictly lowers
/// `(max |coord|, Σ |coord|)` until none does.
pub fn reduce_to_box(point: &[BigInt; 3], spec: &SurfaceSpec, c1: u64, c: u64) -> Result<Reduction> {
    if !spec.contains(point) {
        return invalid("point is not on the surface");
    }
    let mut cur = point.clone();
    let mut m = measure(&cur);
    let mut word = vec![];
    'outer: loop {
        for axis in Axis::ALL {
            let mv = VietaMove::new(axis);
            let next = mv.image(spec, &cur);
            let mn = measure(&next);
            if mn < m {
                cur = next;
                m = mn;
                word.push(mv);
                continue 'outer;
            }
        }
        break;
    }
    let conditions = box_conditions(spec, &cur, c1, c);
    Ok(Reduction {
        point: cur,
        word,
        conditions,
    })
}
