//! Integral points on a coordinate slice `v_i = v0`.
//!
//! Writing `(y, z)` for the two free coordinates and `β, γ` for their linear
//! coefficients, the slice is `y² + z² + v0·yz - βy - γz + e = 0` with
//! `e = v0² - α·v0 - d`. As a quadratic in `y` its discriminant is
//! `t² = D z² + 2 r z + B` with `D = v0² - 4`, `r = 2γ - β·v0`,
//! `B = β² - 4e`, and `u = Dz + r` turns it into `u² - D t² = r² - DB`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::pell::{pell_solve_with, Congruence, PellConfig, PellOutcome, PellProblem, PellSolutionClasses};
use super::Axis;
use crate::error::Result;
use crate::numeric::arith::{exact_sqrt, exact_sqrt_i128};
use crate::numeric::serde_int;
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicConfig {
    /// Largest `z`-range walked in the definite case, and largest residue
    /// range walked in the parabolic case.
    pub max_range: u64,
    pub pell: PellConfig,
}

impl Default for ConicConfig {
    fn default() -> Self {
        ConicConfig {
            max_range: 50_000_000,
            pell: PellConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConicOutcome {
    EmptyCertified {
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        pell: Option<PellSolutionClasses>,
    },
    FiniteList {
        #[serde(with = "serde_int::bigint_array3_vec")]
        points: Vec<[BigInt; 3]>,
    },
    /// Infinitely many integral points; `point` is one of them.
    InfiniteClasses {
        #[serde(with = "serde_int::bigint_array3")]
        point: [BigInt; 3],
        #[serde(skip_serializing_if = "Option::is_none")]
        pell: Option<PellSolutionClasses>,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicReport {
    pub axis: Axis,
    #[serde(with = "serde_int::bigint")]
    pub value: BigInt,
    /// `definite`, `parabolic` or `hyperbolic`.
    pub form: String,
    /// `D = v0² - 4`.
    #[serde(with = "serde_int::bigint")]
    pub d: BigInt,
    /// Right-hand side `r² - DB` of the norm equation.
    #[serde(with = "serde_int::bigint")]
    pub m: BigInt,
    pub outcome: ConicOutcome,
}

impl ConicReport {
    pub fn is_empty(&self) -> bool {
        matches!(self.outcome, ConicOutcome::EmptyCertified { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.outcome, ConicOutcome::Inconclusive { .. })
    }

    /// Some integral point on the slice, when one was found.
    pub fn witness(&self) -> Option<&[BigInt; 3]> {
        match &self.outcome {
            ConicOutcome::FiniteList { points } => points.first(),
            ConicOutcome::InfiniteClasses { point, .. } => Some(point),
            _ => None,
        }
    }
}

pub fn solve_conic_fixed_coord(spec: &SurfaceSpec, axis: Axis, value: &BigInt) -> Result<ConicReport> {
    solve_conic_fixed_coord_with(spec, axis, value, &ConicConfig::default())
}

struct Slice<'a> {
    spec: &'a SurfaceSpec,
    axis: Axis,
    v0: BigInt,
    beta: BigInt,
}

impl Slice<'_> {
    /// Point with free coordinates `(y, z)` where `y` is the root
    /// `(β - v0·z + t)/2`; `None` when that is not integral.
    fn point(&self, z: &BigInt, t: &BigInt) -> Option<[BigInt; 3]> {
        let twice = &self.beta - &self.v0 * z + t;
        if twice.is_odd() {
            return None;
        }
        let y = twice / 2;
        let (j, k) = self.axis.others();
        let mut p = [BigInt::zero(), BigInt::zero(), BigInt::zero()];
        p[self.axis.index()] = self.v0.clone();
        p[j.index()] = y;
        p[k.index()] = z.clone();
        debug_assert!(self.spec.contains(&p));
        Some(p)
    }
}

pub fn solve_conic_fixed_coord_with(
    spec: &SurfaceSpec,
    axis: Axis,
    value: &BigInt,
    cfg: &ConicConfig,
) -> Result<ConicReport> {
    let lin = spec.linear();
    let (j, k) = axis.others();
    let alpha = lin[axis.index()];
    let beta = lin[j.index()].clone();
    let gamma = lin[k.index()];
    let v0 = value.clone();
    let e = &v0 * &v0 - alpha * &v0 - &spec.d;
    let d: BigInt = &v0 * &v0 - 4;
    let r = BigInt::from(2) * gamma - &beta * &v0;
    let b = &beta * &beta - BigInt::from(4) * &e;
    let m = &r * &r - &d * &b;
    let slice = Slice {
        spec,
        axis,
        v0: v0.clone(),
        beta: beta.clone(),
    };
    let (form, outcome) = if d.is_negative() {
        ("definite", definite(&slice, &d, &r, &b, &m, cfg))
    } else if d.is_zero() {
        ("parabolic", parabolic(&slice, &r, &b, cfg))
    } else {
        ("hyperbolic", hyperbolic(&slice, &d, &r, &m, cfg)?)
    };
    Ok(ConicReport {
        axis,
        value: v0,
        form: form.into(),
        d,
        m,
        outcome,
    })
}

/// `|v0| < 2`: `t² = D z² + 2rz + B` with `D < 0` bounds `z`.
fn definite(s: &Slice, d: &BigInt, r: &BigInt, b: &BigInt, m: &BigInt, cfg: &ConicConfig) -> ConicOutcome {
    if m.is_negative() {
        return ConicOutcome::EmptyCertified {
            reason: "the definite form is negative everywhere".into(),
            pell: None,
        };
    }
    // z lies between (r ∓ √M)/|D|
    let delta = -d;
    let sm = m.sqrt();
    let lo = (r - &sm - BigInt::from(1)).div_floor(&delta);
    let hi = (r + &sm + BigInt::from(1)).div_ceil(&delta);
    let width = (&hi - &lo).to_u64().unwrap_or(u64::MAX);
    if width > cfg.max_range {
        return ConicOutcome::Inconclusive {
            reason: format!("z-range of width {width} exceeds {}", cfg.max_range),
        };
    }
    let mut points = vec![];
    let fast = (|| Some((d.to_i128()?, r.to_i128()?, b.to_i128()?, lo.to_i128()?, hi.to_i128()?)))()
        .filter(|_| m.bits() < 100);
    let mut push = |z: BigInt, t: BigInt| {
        for tt in [t.clone(), -t] {
            if let Some(p) = s.point(&z, &tt) {
                if !points.contains(&p) {
                    points.push(p);
                }
            }
        }
    };
    if let Some((di, ri, bi, loi, hii)) = fast {
        for z in loi..=hii {
            let t2 = di * z * z + 2 * ri * z + bi;
            if t2 < 0 {
                continue;
            }
            if let Some(t) = exact_sqrt_i128(t2) {
                push(BigInt::from(z), BigInt::from(t));
            }
        }
    } else {
        let mut z = lo;
        while z <= hi {
            let t2 = d * &z * &z + BigInt::from(2) * r * &z + b;
            if !t2.is_negative() {
                if let Some(t) = exact_sqrt(&t2) {
                    push(z.clone(), t);
                }
            }
            z += 1;
        }
    }
    if points.is_empty() {
        ConicOutcome::EmptyCertified {
            reason: "exhaustive walk over the bounded z-range".into(),
            pell: None,
        }
    } else {
        points.sort();
        ConicOutcome::FiniteList { points }
    }
}

/// `|v0| = 2`: `t² = 2rz + B`, and `y` is integral iff `t ≡ β (mod 2)`.
fn parabolic(s: &Slice, r: &BigInt, b: &BigInt, cfg: &ConicConfig) -> ConicOutcome {
    if r.is_zero() {
        if let Some(t) = exact_sqrt(b) {
            if let Some(p) = s.point(&BigInt::zero(), &t) {
                return ConicOutcome::InfiniteClasses { point: p, pell: None };
            }
        }
        return ConicOutcome::EmptyCertified {
            reason: "the slice is a pair of lines with no integral point".into(),
            pell: None,
        };
    }
    let modulus = BigInt::from(2) * r.abs();
    let Some(span) = modulus.to_u64().filter(|&w| w <= cfg.max_range) else {
        return ConicOutcome::Inconclusive {
            reason: format!("residue range {modulus} exceeds {}", cfg.max_range),
        };
    };
    let two_r = BigInt::from(2) * r;
    for t in 0..span {
        let t = BigInt::from(t);
        let num = &t * &t - b;
        if !(&num % &modulus).is_zero() {
            continue;
        }
        let z = num / &two_r;
        if let Some(p) = s.point(&z, &t) {
            return ConicOutcome::InfiniteClasses { point: p, pell: None };
        }
    }
    ConicOutcome::EmptyCertified {
        reason: format!("no t modulo {modulus} with t² ≡ B and the parity of β"),
        pell: None,
    }
}

/// `|v0| > 2`: `u² - D t² = M` with `u = Dz + r` and parity on `t`.
fn hyperbolic(s: &Slice, d: &BigInt, r: &BigInt, m: &BigInt, cfg: &ConicConfig) -> Result<ConicOutcome> {
    if m.is_zero() {
        // D is not a square, so u = t = 0
        let (z, rem) = (-r).div_rem(d);
        let points: Vec<_> = if rem.is_zero() {
            s.point(&z, &BigInt::zero()).into_iter().collect()
        } else {
            vec![]
        };
        return Ok(if points.is_empty() {
            ConicOutcome::EmptyCertified {
                reason: "the only real solution u = t = 0 is not integral".into(),
                pell: None,
            }
        } else {
            ConicOutcome::FiniteList { points }
        });
    }
    // z ≡ σ (mod 2) ⇔ u ≡ r + Dσ (mod 2D), and then t ≡ v0·σ - β (mod 2)
    let two = BigInt::from(2);
    let congruences = (0..2)
        .map(|sigma| {
            let sigma = BigInt::from(sigma);
            Congruence {
                u_modulus: &two * d,
                u_residue: (r + d * &sigma).mod_floor(&(&two * d)),
                t_modulus: two.clone(),
                t_residue: (&s.v0 * &sigma - &s.beta).mod_floor(&two),
            }
        })
        .collect();
    let problem = PellProblem {
        d: d.clone(),
        n: m.clone(),
        congruences,
    };
    Ok(match pell_solve_with(&problem, &cfg.pell)? {
        PellOutcome::Solutions(classes) => {
            let point = classes
                .constrained
                .iter()
                .map(|w| {
                    let z = (&w.value.u - r) / d;
                    s.point(&z, &w.value.t).expect("congruences force integrality")
                })
                .min_by_key(|p| p.iter().map(|v| v.magnitude().clone()).max())
                .expect("nonempty");
            ConicOutcome::InfiniteClasses {
                point,
                pell: Some(classes),
            }
        }
        PellOutcome::EmptyCertified { reason, classes } => ConicOutcome::EmptyCertified {
            reason,
            pell: classes,
        },
        PellOutcome::Inconclusive { reason } => ConicOutcome::Inconclusive { reason },
    })
}
