//! Local symbols over the completions of a real or imaginary quadratic field
//! `F = ℚ(√D)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hilbert::{Invariant, Place};
use crate::error::{invalid, Error, Result};
use crate::numeric::arith::{exact_sqrt, split_valuation};
use crate::numeric::{legendre, padic_sqrt};

/// `r + s√D` with rational `r`, `s`; the radicand travels separately.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FElem {
    pub r: BigRational,
    pub s: BigRational,
}

fn q(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

impl FElem {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        FElem { r, s }
    }

    pub fn from_ints(r: impl Into<BigInt>, s: impl Into<BigInt>) -> Self {
        FElem { r: q(r), s: q(s) }
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    pub fn add(&self, o: &FElem) -> FElem {
        FElem::new(&self.r + &o.r, &self.s + &o.s)
    }

    pub fn sub(&self, o: &FElem) -> FElem {
        FElem::new(&self.r - &o.r, &self.s - &o.s)
    }

    pub fn mul(&self, o: &FElem, d: &BigInt) -> FElem {
        let dq = q(d.clone());
        FElem::new(
            &self.r * &o.r + &self.s * &o.s * dq,
            &self.r * &o.s + &self.s * &o.r,
        )
    }

    pub fn scale(&self, c: &BigRational) -> FElem {
        FElem::new(&self.r * c, &self.s * c)
    }

    pub fn conj(&self) -> FElem {
        FElem::new(self.r.clone(), -&self.s)
    }

    pub fn norm(&self, d: &BigInt) -> BigRational {
        &self.r * &self.r - &self.s * &self.s * q(d.clone())
    }

    pub fn inv(&self, d: &BigInt) -> Result<FElem> {
        let n = self.norm(d);
        if n.is_zero() {
            return Err(Error::Arithmetic("inverse of zero".into()));
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn pow(&self, e: u32, d: &BigInt) -> FElem {
        let mut acc = FElem::from_ints(1, 0);
        for _ in 0..e {
            acc = acc.mul(self, d);
        }
        acc
    }

    /// `(A0 + A1√D, den)` with integers `A0`, `A1` and `self = (A0 + A1√D)/den`.
    fn integral_parts(&self) -> (BigInt, BigInt, BigInt) {
        let den = self.r.denom().lcm(self.s.denom());
        let a0 = (&self.r * q(den.clone())).to_integer();
        let a1 = (&self.s * q(den.clone())).to_integer();
        (a0, a1, den)
    }
}

/// Splitting type of a prime in `ℚ(√D)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum QuadraticLocalData {
    /// Two places of degree one; `sqrt_d` satisfies `sqrt_d² ≡ D mod p^N`.
    Split {
        p: u64,
        #[serde(with = "crate::numeric::serde_int::bigint")]
        sqrt_d: BigInt,
        precision: u32,
    },
    /// One place, residue field `𝔽_{p²}`, uniformizer `p`.
    Inert { p: u64 },
    /// One place, residue field `𝔽_p`; `uniformizer = r + s√D`.
    Ramified { p: u64, uniformizer: FElem },
}

impl QuadraticLocalData {
    pub fn prime(&self) -> u64 {
        match self {
            QuadraticLocalData::Split { p, .. }
            | QuadraticLocalData::Inert { p }
            | QuadraticLocalData::Ramified { p, .. } => *p,
        }
    }

    /// Ramification index over `ℚ_p`.
    pub fn e(&self) -> u32 {
        if matches!(self, QuadraticLocalData::Ramified { .. }) {
            2
        } else {
            1
        }
    }
}

/// Decomposes `D = 4^m δ` at `p = 2` (resp. `p^{2m} δ`) with `v(δ) ∈ {0, 1}`.
fn strip_even(d: &BigInt, p: u64) -> (u32, BigInt) {
    let (v, u) = split_valuation(d, p).expect("nonzero");
    let m = v / 2;
    (m, u * BigInt::from(p).pow(v % 2))
}

/// Splitting type of `p` in `ℚ(√D)`, with `√D` to precision `p^n` when split.
pub fn quadratic_local_data(d: &BigInt, p: u64, n: u32) -> Result<QuadraticLocalData> {
    if d.is_zero() || (!d.is_negative() && exact_sqrt(d).is_some()) {
        return invalid(format!("{d} is a square"));
    }
    if !crate::numeric::arith::is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    let (m, delta) = strip_even(d, p);
    let pm = q(BigInt::from(p).pow(m));
    if p == 2 {
        let r8 = delta.mod_floor(&BigInt::from(8)).to_u32().unwrap();
        return Ok(match r8 {
            1 => split(d, p, n),
            5 => QuadraticLocalData::Inert { p },
            3 | 7 => QuadraticLocalData::Ramified {
                p,
                uniformizer: FElem::new(q(1), pm.recip()),
            },
            _ => QuadraticLocalData::Ramified {
                p,
                uniformizer: FElem::new(q(0), pm.recip()),
            },
        });
    }
    if (&delta % BigInt::from(p)).is_zero() {
        return Ok(QuadraticLocalData::Ramified {
            p,
            uniformizer: FElem::new(q(0), pm.recip()),
        });
    }
    Ok(if legendre(&delta, p) == 1 {
        split(d, p, n)
    } else {
        QuadraticLocalData::Inert { p }
    })
}

fn split(d: &BigInt, p: u64, n: u32) -> QuadraticLocalData {
    let w = padic_sqrt(d, p, n).expect("split prime has a root");
    QuadraticLocalData::Split {
        p,
        sqrt_d: w.value,
        precision: n,
    }
}

/// A place of `F` above a place of `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PlaceAbove {
    /// Embedding `√D ↦ sign·√D` into `ℚ_p`.
    Split { p: u64, sign: i8 },
    Inert { p: u64 },
    Ramified { p: u64 },
    /// Real embedding `√D ↦ sign·√D`.
    Real { sign: i8 },
    Complex,
}

/// The places of `F` above `v`.
pub fn places_above(d: &BigInt, v: Place) -> Result<Vec<PlaceAbove>> {
    Ok(match v {
        Place::Infinity => {
            if d.is_positive() {
                vec![PlaceAbove::Real { sign: 1 }, PlaceAbove::Real { sign: -1 }]
            } else {
                vec![PlaceAbove::Complex]
            }
        }
        Place::Prime(p) => match quadratic_local_data(d, p, 1)? {
            QuadraticLocalData::Split { .. } => {
                vec![PlaceAbove::Split { p, sign: 1 }, PlaceAbove::Split { p, sign: -1 }]
            }
            QuadraticLocalData::Inert { .. } => vec![PlaceAbove::Inert { p }],
            QuadraticLocalData::Ramified { .. } => vec![PlaceAbove::Ramified { p }],
        },
    })
}

/// Tuning of the residue-characteristic-2 isotropy search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyConfig {
    /// Depth cap in powers of the uniformizer is `slope·e + offset`.
    pub slope: u32,
    pub offset: u32,
    pub node_budget: usize,
}

impl Default for IsotropyConfig {
    fn default() -> Self {
        IsotropyConfig {
            slope: 4,
            offset: 6,
            node_budget: 2_000_000,
        }
    }
}

impl IsotropyConfig {
    pub fn depth(&self, e: u32) -> u32 {
        self.slope * e + self.offset
    }
}

/// Additive invariant of `(a, b)` over the completion `F_w`.
pub fn hilbert_symbol_quadratic_local(
    a: &FElem,
    b: &FElem,
    d: &BigInt,
    w: &PlaceAbove,
    iso: &IsotropyConfig,
) -> Result<Invariant> {
    if a.is_zero() || b.is_zero() {
        return invalid("Hilbert symbol of zero");
    }
    match *w {
        PlaceAbove::Complex => Ok(Invariant::Zero),
        PlaceAbove::Real { sign } => Ok(Invariant::from_half(
            real_sign(a, d, sign) == Ordering::Less && real_sign(b, d, sign) == Ordering::Less,
        )),
        PlaceAbove::Split { p, sign } => {
            let (a0, a1, ad) = a.integral_parts();
            let (b0, b1, bd) = b.integral_parts();
            let vn = |x: &FElem| {
                let (n0, n1, den) = x.integral_parts();
                let n = (&n0 * &n0 - &n1 * &n1 * d) * den;
                split_valuation(&n, p).map(|(v, _)| v).unwrap_or(0)
            };
            // the embedded value divides the norm of the integral part
            let prec = vn(a).max(vn(b)) + 4;
            let data = quadratic_local_data(d, p, prec)?;
            let QuadraticLocalData::Split { sqrt_d, .. } = data else {
                return invalid(format!("{p} does not split"));
            };
            let r = if sign < 0 { -sqrt_d } else { sqrt_d };
            let ea = (a0 + a1 * &r) * ad;
            let eb = (b0 + b1 * &r) * bd;
            super::hilbert::hilbert_padic(&ea, &eb, p, prec)
        }
        PlaceAbove::Inert { p } if p != 2 => Ok(tame_inert(a, b, d, p)),
        PlaceAbove::Ramified { p } if p != 2 => tame_ramified(a, b, d, p),
        PlaceAbove::Inert { .. } | PlaceAbove::Ramified { .. } => dyadic_symbol(a, b, d, iso),
    }
}

/// Sign of `r + s·sign·√D` under a real embedding.
fn real_sign(x: &FElem, d: &BigInt, sign: i8) -> Ordering {
    let r = &x.r;
    let t = if sign < 0 { -&x.s } else { x.s.clone() };
    if t.is_zero() {
        return r.cmp(&BigRational::zero());
    }
    let st = t.cmp(&BigRational::zero());
    if r.is_zero() || r.cmp(&BigRational::zero()) == st {
        return st;
    }
    let lhs = r * r;
    let rhs = &t * &t * q(d.clone());
    if lhs > rhs {
        r.cmp(&BigRational::zero())
    } else {
        st
    }
}

/// `v_w` for `w` the unique place above `p`: `e·v_p(N x)/2`.
fn val_nonsplit(x: &FElem, d: &BigInt, p: u64, e: u32) -> i64 {
    let n = x.norm(d);
    let v = super::hilbert::unit_class(&n, p).0;
    v * e as i64 / 2
}

/// Odd `p` inert: `u ∈ 𝔽_{p²}*` is a square iff its norm is a square in `𝔽_p`,
/// and `-1` is always a square, so only the norms matter.
fn tame_inert(a: &FElem, b: &FElem, d: &BigInt, p: u64) -> Invariant {
    let (vna, ua) = super::hilbert::unit_class(&a.norm(d), p);
    let (vnb, ub) = super::hilbert::unit_class(&b.norm(d), p);
    let (alpha, beta) = (vna / 2, vnb / 2);
    let la = beta.is_odd() && legendre(&ua, p) == -1;
    let lb = alpha.is_odd() && legendre(&ub, p) == -1;
    Invariant::from_half(la ^ lb)
}

/// Odd `p` ramified: residue field `𝔽_p`, the residue of a unit `r + s√D`
/// is `r mod p`.
fn tame_ramified(a: &FElem, b: &FElem, d: &BigInt, p: u64) -> Result<Invariant> {
    let (m, _) = strip_even(d, p);
    let pi = FElem::new(q(0), q(BigInt::from(p).pow(m)).recip());
    let pi_inv = pi.inv(d)?;
    let alpha = val_nonsplit(a, d, p, 2);
    let beta = val_nonsplit(b, d, p, 2);
    let unit = |x: &FElem, v: i64| -> Result<FElem> {
        let k = v.unsigned_abs() as u32;
        Ok(if v >= 0 {
            x.mul(&pi_inv.pow(k, d), d)
        } else {
            x.mul(&pi.pow(k, d), d)
        })
    };
    let ua = unit(a, alpha)?;
    let ub = unit(b, beta)?;
    // t ≡ (-1)^{αβ} ua^β ub^α modulo squares
    let mut t = FElem::from_ints(1, 0);
    if beta.is_odd() {
        t = t.mul(&ua, d);
    }
    if alpha.is_odd() {
        t = t.mul(&ub, d);
    }
    if alpha.is_odd() && beta.is_odd() {
        t = t.scale(&q(-1));
    }
    let (e, res) = super::hilbert::unit_class(&t.r, p);
    if e != 0 {
        return Err(Error::Arithmetic("tame symbol is not a unit".into()));
    }
    Ok(Invariant::from_half(legendre(&res, p) == -1))
}

/// Elements of `O_w = ℤ_2[ω]`, `ω² = tω + n`, for `w` the place above 2.
struct Dyadic {
    t: BigInt,
    n: BigInt,
    e: u32,
}

type Pair = (BigInt, BigInt);

impl Dyadic {
    fn mul(&self, x: &Pair, y: &Pair) -> Pair {
        let c = &x.1 * &y.1;
        (&x.0 * &y.0 + &self.n * &c, &x.0 * &y.1 + &x.1 * &y.0 + &self.t * c)
    }

    fn add(x: &Pair, y: &Pair) -> Pair {
        (&x.0 + &y.0, &x.1 + &y.1)
    }

    fn norm(&self, x: &Pair) -> BigInt {
        &x.0 * &x.0 + &self.t * &x.0 * &x.1 - &self.n * &x.1 * &x.1
    }

    /// `None` for zero.
    fn val(&self, x: &Pair) -> Option<u32> {
        let nv = split_valuation(&self.norm(x), 2)?.0;
        Some(nv * self.e / 2)
    }

    fn conj(&self, x: &Pair) -> Pair {
        (&x.0 + &self.t * &x.1, -&x.1)
    }
}

/// Residue characteristic 2, `w` non-split: decide whether `⟨1, -a, -b⟩`
/// is isotropic by a depth-bounded search for a primitive zero satisfying
/// the Hensel bound `v(Q) > 2·v(∂_i Q)`.
fn dyadic_symbol(a: &FElem, b: &FElem, d: &BigInt, iso: &IsotropyConfig) -> Result<Invariant> {
    let (m, delta) = strip_even(d, 2);
    let scale = q(BigInt::from(2).pow(m));
    let r8 = delta.mod_floor(&BigInt::from(8)).to_u32().unwrap();
    let (ring, inert) = if r8 == 5 {
        let n = (&delta - 1) / 4;
        (Dyadic { t: 1.into(), n, e: 1 }, true)
    } else {
        (
            Dyadic {
                t: 0.into(),
                n: delta.clone(),
                e: 2,
            },
            false,
        )
    };
    let pi: Pair = if inert {
        (2.into(), 0.into())
    } else if delta.is_odd() {
        (1.into(), 1.into())
    } else {
        (0.into(), 1.into())
    };
    // coordinates in the basis (1, ω), cleared of denominators by squares
    let to_pair = |x: &FElem| -> Pair {
        let s = &x.s * &scale;
        let (c0, c1) = if inert {
            (&x.r - &s, &s * q(2))
        } else {
            (x.r.clone(), s)
        };
        let den = c0.denom().lcm(c1.denom());
        let dq = q(&den * &den);
        ((c0 * &dq).to_integer(), (c1 * &dq).to_integer())
    };
    let normalize = |mut x: Pair| -> Pair {
        let four = BigInt::from(4);
        while ring.val(&x).unwrap() >= 2 {
            if !inert {
                let c = ring.conj(&pi);
                x = ring.mul(&x, &ring.mul(&c, &c));
            }
            x = (&x.0 / &four, &x.1 / &four);
        }
        x
    };
    let a = normalize(to_pair(a));
    let b = normalize(to_pair(b));
    match dyadic_isotropic(&ring, &a, &b, iso)? {
        true => Ok(Invariant::Zero),
        false => Ok(Invariant::Half),
    }
}

fn dyadic_isotropic(ring: &Dyadic, a: &Pair, b: &Pair, iso: &IsotropyConfig) -> Result<bool> {
    let e = ring.e;
    let k_max = iso.depth(e).div_ceil(e);
    let zero: Pair = (0.into(), 0.into());
    let one: Pair = (1.into(), 0.into());
    let neg = |x: &Pair| (-&x.0, -&x.1);
    let q_of = |v: &[Pair; 3]| -> Pair {
        let x2 = ring.mul(&v[0], &v[0]);
        let y2 = ring.mul(a, &ring.mul(&v[1], &v[1]));
        let z2 = ring.mul(b, &ring.mul(&v[2], &v[2]));
        Dyadic::add(&x2, &neg(&Dyadic::add(&y2, &z2)))
    };
    let grads = |v: &[Pair; 3]| -> [Pair; 3] {
        let two: Pair = (2.into(), 0.into());
        [
            ring.mul(&two, &v[0]),
            ring.mul(&two, &ring.mul(a, &v[1])),
            ring.mul(&two, &ring.mul(b, &v[2])),
        ]
    };
    let mut budget = iso.node_budget;
    let mut unresolved = false;
    // pattern j: coordinate j equals 1, earlier coordinates lie in πO
    for j in 0..3 {
        let free: Vec<usize> = (0..3).filter(|&i| i != j).collect();
        let mut level: Vec<[Pair; 3]> = {
            let mut v = [zero.clone(), zero.clone(), zero.clone()];
            v[j] = one.clone();
            vec![v]
        };
        for k in 0..=k_max {
            let mut next = Vec::new();
            for v in &level {
                let Some(vq) = ring.val(&q_of(v)) else {
                    return Ok(true);
                };
                if vq < e * k {
                    continue;
                }
                if k >= 1 && (0..j).any(|i| ring.val(&v[i]) == Some(0)) {
                    continue;
                }
                let g = grads(v);
                if g.iter().any(|gi| ring.val(gi).is_some_and(|vg| vq > 2 * vg)) {
                    return Ok(true);
                }
                if k == k_max {
                    unresolved = true;
                    continue;
                }
                // children: add 2^k·(b0 + b1 ω) to each free coordinate
                let step = BigInt::from(2).pow(k);
                for bits in 0..16u32 {
                    let mut c = v.clone();
                    for (slot, &i) in free.iter().enumerate() {
                        let b0 = (bits >> (2 * slot)) & 1;
                        let b1 = (bits >> (2 * slot + 1)) & 1;
                        c[i] = (&c[i].0 + &step * b0, &c[i].1 + &step * b1);
                    }
                    next.push(c);
                }
            }
            budget = budget.checked_sub(next.len()).ok_or_else(|| {
                Error::Precision("isotropy search exceeded its node budget".into())
            })?;
            if next.is_empty() {
                break;
            }
            level = next;
        }
    }
    if unresolved {
        return Err(Error::Precision(format!(
            "isotropy search undecided at depth π^{}",
            e * k_max
        )));
    }
    Ok(false)
}
