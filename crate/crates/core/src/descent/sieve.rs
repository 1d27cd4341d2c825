//! Pair scans for the product conditions of the box.
//!
//! For a pair `(s, w)` of free coordinates, the solved coordinate is a root
//! of `v² + (sw - α)v + (s² + w² - βs - γw - d)`, whose discriminant is a
//! quadratic in `w` for fixed `s`. It is tracked incrementally modulo
//! [`SIEVE_MODULUS`] and only quadratic residues reach an exact square test.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Axis;
use crate::numeric::arith::{exact_sqrt, isqrt_u128};
use crate::surface::SurfaceSpec;

/// `2⁵·3²·5·7·11`.
pub const SIEVE_MODULUS: u32 = 110_880;

/// Which pairs `(s, w)`, both beyond `C1` in absolute value, are scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `|s·w| ≤ X`.
    Product,
    /// `|s|·|w|·max(|s|, |w|) ≤ X`.
    Cubic,
}

impl Region {
    fn limit(self, s: u64, x: u64) -> u64 {
        match self {
            Region::Product => x / s,
            Region::Cubic => {
                let s3 = (s as u128).pow(3);
                if s3 <= x as u128 {
                    (x / s).sqrt()
                } else {
                    ((x as u128) / (s as u128 * s as u128)) as u64
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanResult {
    pub pairs: u64,
    pub survivors: u64,
    pub points: Vec<[BigInt; 3]>,
}

fn qr_table() -> Vec<bool> {
    let m = SIEVE_MODULUS as u64;
    let mut t = vec![false; m as usize];
    for x in 0..m {
        t[(x * x % m) as usize] = true;
    }
    t
}

fn rem(v: i128) -> u32 {
    v.rem_euclid(SIEVE_MODULUS as i128) as u32
}

/// Number of pairs the scan would visit.
pub fn pair_count(region: Region, c1: u64, x: u64) -> u128 {
    let mut total = 0u128;
    let mut s = c1 + 1;
    loop {
        let l = region.limit(s, x);
        if l <= c1 {
            return total;
        }
        total += 4 * (l - c1) as u128;
        s += 1;
    }
}

struct Ctx<'a> {
    spec: &'a SurfaceSpec,
    solved: Axis,
    /// `α, β, γ, d` as seen from the solved axis.
    coef: [i128; 4],
    qr: Vec<bool>,
    c1: u64,
}

impl Ctx<'_> {
    fn scan_s(&self, s: i64, l: u64) -> ScanResult {
        let [alpha, beta, gamma, d] = self.coef;
        let si = s as i128;
        let a = si * si - 4;
        let b = 4 * gamma - 2 * alpha * si;
        let c = alpha * alpha - 4 * si * si + 4 * beta * si + 4 * d;
        let mut out = ScanResult::default();
        let (lo, hi) = (self.c1 as i64 + 1, l as i64);
        for (w0, w1) in [(-hi, -lo), (lo, hi)] {
            if w0 > w1 {
                continue;
            }
            out.pairs += (w1 - w0 + 1) as u64;
            let m = SIEVE_MODULUS;
            let (am, bm) = (rem(a), rem(b));
            let w0i = w0 as i128;
            let mut dm = rem(rem(a) as i128 * rem(w0i * w0i) as i128 + bm as i128 * rem(w0i) as i128 + rem(c) as i128);
            let mut step = rem(am as i128 * rem(2 * w0i + 1) as i128 + bm as i128);
            let two_a = (2 * am) % m;
            for w in w0..=w1 {
                if self.qr[dm as usize] {
                    out.survivors += 1;
                    self.exact(s, w, a, b, c, &mut out.points);
                }
                dm += step;
                if dm >= m {
                    dm -= m;
                }
                step += two_a;
                if step >= m {
                    step -= m;
                }
            }
        }
        out
    }

    fn exact(&self, s: i64, w: i64, a: i128, b: i128, c: i128, points: &mut Vec<[BigInt; 3]>) {
        let wi = w as i128;
        let disc = a
            .checked_mul(wi)
            .and_then(|v| v.checked_mul(wi))
            .and_then(|v| v.checked_add(b.checked_mul(wi)?))
            .and_then(|v| v.checked_add(c));
        let root = match disc {
            Some(v) if v < 0 => return,
            Some(v) => {
                let r = isqrt_u128(v as u128);
                if (r * r) as i128 != v {
                    return;
                }
                BigInt::from(r)
            }
            None => {
                let v = BigInt::from(a) * w * w + BigInt::from(b) * w + BigInt::from(c);
                match exact_sqrt(&v) {
                    Some(r) => r,
                    None => return,
                }
            }
        };
        let lin = BigInt::from(self.coef[0]) - BigInt::from(s) * w;
        let (j, k) = self.solved.others();
        for sign in [1, -1] {
            let twice: BigInt = &lin + &root * sign;
            if twice.is_odd() {
                continue;
            }
            let mut p = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
            p[self.solved.index()] = twice / 2;
            p[j.index()] = BigInt::from(s);
            p[k.index()] = BigInt::from(w);
            if self.spec.contains(&p) && !points.contains(&p) {
                points.push(p);
            }
        }
    }
}

/// Scans every pair in `region` with bound `x` and solves for the `solved`
/// coordinate. `Err` when the coefficients or the bound leave 64-bit range.
pub fn scan(spec: &SurfaceSpec, solved: Axis, region: Region, c1: u64, x: &BigInt) -> Result<ScanResult, String> {
    let x = x.to_u64().filter(|&v| v < 1 << 62).ok_or_else(|| format!("bound {x} too large"))?;
    let lin = spec.linear();
    let (j, k) = solved.others();
    let fit = |v: &BigInt| v.to_i64().filter(|v| v.unsigned_abs() < 1 << 60).map(|v| v as i128).ok_or_else(|| format!("coefficient {v} too large"));
    let ctx = Ctx {
        spec,
        solved,
        coef: [
            fit(lin[solved.index()])?,
            fit(lin[j.index()])?,
            fit(lin[k.index()])?,
            fit(&spec.d)?,
        ],
        qr: qr_table(),
        c1,
    };
    let mut smax = c1;
    while region.limit(smax + 1, x) > c1 {
        smax += 1;
    }
    let mut res = ((c1 + 1)..=smax)
        .into_par_iter()
        .map(|s| {
            let l = region.limit(s, x);
            let mut r = ctx.scan_s(s as i64, l);
            let n = ctx.scan_s(-(s as i64), l);
            r.pairs += n.pairs;
            r.survivors += n.survivors;
            r.points.extend(n.points);
            r
        })
        .reduce(ScanResult::default, |mut a, b| {
            a.pairs += b.pairs;
            a.survivors += b.survivors;
            a.points.extend(b.points);
            a
        });
    res.points.sort();
    res.points.dedup();
    Ok(res)
}
