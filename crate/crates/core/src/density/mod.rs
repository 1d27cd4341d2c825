//! Density of admissible parameter vectors: local counts `c_p`, their closed
//! forms, Euler products with explicit tails, and box scans.

mod euler;
mod scan;

#[cfg(test)]
mod tests;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::arith::is_prime_u64;
use crate::surface::{find_admissible_k, ParamVector};

pub use euler::{euler_product, partial_product_exact, DensityReport, Interval, LocalFactor, DEFAULT_CUTOFF};
pub use scan::{compare_scan, scan_admissible, scan_admissible_with, Predicate, ScanComparison, ScanConfig, ScanReport, ScanRow};

/// `k_i = m·k'_i + r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub modulus: u64,
    pub residue: u64,
}

/// `f(k') = (Σ coeffs[e]·k^e) / divisor` with `k = m·k'_var + r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniPoly {
    pub var: usize,
    /// Ascending coefficients in `k`.
    pub coeffs: Vec<i64>,
    pub divisor: u64,
}

impl UniPoly {
    /// `k(k² - 2)(k² - 4) / 3`.
    pub fn standard(var: usize) -> Self {
        UniPoly {
            var,
            coeffs: vec![0, 8, 0, -6, 0, 1],
            divisor: 3,
        }
    }

    fn eval_mod(&self, k: i128, modulus: i128) -> i128 {
        let k = k.rem_euclid(modulus);
        self.coeffs
            .iter()
            .rev()
            .fold(0i128, |acc, &c| (acc * k + c as i128).rem_euclid(modulus))
    }

    /// `f` at `k` reduced mod `p`, exact through the divisor.
    fn value_mod_p(&self, k: i128, p: u64) -> u64 {
        let dp = self.divisor as i128 * p as i128;
        let v = self.eval_mod(k, dp);
        debug_assert_eq!(v % self.divisor as i128, 0);
        (v / self.divisor as i128) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensitySetup {
    pub name: String,
    pub substitutions: Vec<Substitution>,
    pub polynomials: Vec<UniPoly>,
    pub excluded_primes: Vec<u64>,
    /// Prime of the ramified-invariant conditions, when imposed.
    pub p0: Option<u64>,
}

impl DensitySetup {
    /// Validates moduli, distinct variables and integrality after division.
    pub fn new(name: &str, substitutions: Vec<Substitution>, polynomials: Vec<UniPoly>, p0: Option<u64>) -> Result<Self> {
        let n = substitutions.len();
        for s in &substitutions {
            if s.modulus == 0 || s.residue >= s.modulus {
                return invalid(format!("bad substitution {s:?}"));
            }
        }
        let mut used = vec![false; n];
        for f in &polynomials {
            if f.var >= n || used[f.var] {
                return invalid("each polynomial needs its own variable");
            }
            used[f.var] = true;
            if f.divisor == 0 || f.coeffs.len() < 2 {
                return invalid("polynomials must be nonconstant with a positive divisor");
            }
            // values mod the divisor are periodic in k' with period dividing it
            let s = substitutions[f.var];
            for t in 0..f.divisor as i128 {
                let k = s.modulus as i128 * t + s.residue as i128;
                if f.eval_mod(k, f.divisor as i128) != 0 {
                    return invalid(format!("polynomial on k{} is not integral after division", f.var + 1));
                }
            }
        }
        let mut excluded: Vec<u64> = substitutions
            .iter()
            .flat_map(|s| crate::numeric::factor(&BigInt::from(s.modulus), 1 << 20).primes)
            .map(|(p, _)| p.to_u64().expect("small"))
            .collect();
        excluded.sort_unstable();
        excluded.dedup();
        Ok(DensitySetup {
            name: name.into(),
            substitutions,
            polynomials,
            excluded_primes: excluded,
            p0,
        })
    }

    /// `k1 ≡ 127`, `k2, k3, k4 ≡ 5 (mod 144)`.
    pub fn standard() -> Self {
        let subs = [127, 5, 5, 5].map(|r| Substitution { modulus: 144, residue: r }).to_vec();
        Self::new("assumption-A", subs, (0..4).map(UniPoly::standard).collect(), None).expect("valid")
    }

    /// The standard setup refined by the conditions at `p0`, using the
    /// residues mod `144·p0³` of the first admissible vector found.
    pub fn with_p0(p0: u64) -> Result<Self> {
        let m = 144 * p0.pow(3);
        let k = find_admissible_k(p0, 1_000_000, 1)?;
        let Some(k) = k.first() else {
            return invalid(format!("no admissible vector for p0 = {p0}"));
        };
        Self::from_vector(p0, k, m)
    }

    fn from_vector(p0: u64, k: &ParamVector, m: u64) -> Result<Self> {
        let subs = k
            .0
            .iter()
            .map(|&x| Substitution {
                modulus: m,
                residue: x.rem_euclid(m as i64) as u64,
            })
            .collect();
        Self::new(&format!("assumption-A-B({p0})"), subs, (0..4).map(UniPoly::standard).collect(), Some(p0))
    }

    /// Same conditions with no polynomials.
    pub fn without_polynomials(&self) -> Self {
        let mut s = self.clone();
        s.polynomials.clear();
        s.name = format!("{}-no-polynomials", s.name);
        s
    }

    pub fn dimension(&self) -> usize {
        self.substitutions.len()
    }

    /// Number of `k' ∈ F_p` with `f(k') ≡ 0 (mod p)`.
    pub fn zero_count(&self, f: &UniPoly, p: u64) -> u64 {
        let s = self.substitutions[f.var];
        if s.modulus % p == 0 || f.divisor % p == 0 {
            (0..p)
                .filter(|&t| f.value_mod_p(s.modulus as i128 * t as i128 + s.residue as i128, p) == 0)
                .count() as u64
        } else {
            // k ↦ m·k' + r is a bijection of F_p and the divisor is a unit
            root_count_mod_p(&f.coeffs, p)
        }
    }
}

/// Number of distinct roots in `F_p` of an integer polynomial, as
/// `deg gcd(f, x^p - x)`; all of `F_p` when `f ≡ 0`.
pub fn root_count_mod_p(coeffs: &[i64], p: u64) -> u64 {
    let f = poly::trim(coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect());
    if f.is_empty() {
        return p;
    }
    if f.len() == 1 {
        return 0;
    }
    let xp = poly::pow_x_mod(p, &f, p);
    // x^p - x mod f
    let mut h = xp;
    h.resize(h.len().max(2), 0);
    h[1] = (h[1] + p - 1) % p;
    let h = poly::trim(h);
    let g = poly::gcd(f, h, p);
    (g.len() - 1) as u64
}

mod poly {
    //! Dense polynomials over `F_p`, ascending coefficients.

    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        (a as u128 * b as u128 % p as u128) as u64
    }

    pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn inv(a: u64, p: u64) -> u64 {
        crate::numeric::arith::pow_mod_u64(a, p - 2, p)
    }

    pub fn rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
        let lead = inv(*b.last().expect("nonzero"), p);
        while a.len() >= b.len() {
            let c = mulmod(*a.last().unwrap(), lead, p);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mulmod(c, bi, p)) % p;
            }
            a = trim(a);
        }
        a
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    /// `x^e mod f`.
    pub fn pow_x_mod(e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut result = rem(vec![1], f, p);
        let mut base = rem(vec![0, 1], f, p);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = rem(mul(&result, &base, p), f, p);
            }
            base = rem(mul(&base, &base, p), f, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
        while !b.is_empty() {
            let r = rem(a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// `c_p`: points of `F_p^n` where at least two of the polynomials vanish.
pub fn cp_count(setup: &DensitySetup, p: u64) -> Result<u128> {
    if !is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    let zs: Vec<u128> = setup.polynomials.iter().map(|f| setup.zero_count(f, p) as u128).collect();
    let p = p as u128;
    let free = setup.dimension() - zs.len();
    // Σ over subsets of size ≥ 2 of Π z_i · Π (p - z_i)
    let mut by_size = vec![0u128; zs.len() + 1];
    by_size[0] = 1;
    for &z in &zs {
        for s in (0..zs.len()).rev() {
            let carry = by_size[s] * z;
            by_size[s] *= p - z;
            by_size[s + 1] += carry;
        }
    }
    let hits: u128 = by_size.iter().skip(2).sum();
    Ok(hits * p.pow(free as u32))
}

/// Roots of `k(k² - 2)(k² - 4)` mod an odd prime: 3, or 5 when 2 is a square.
pub fn standard_root_count(p: u64) -> u64 {
    root_count_mod_p(&UniPoly::standard(0).coeffs, p)
}

/// `27(2p² - 8p + 9)` for `p ≡ ±3 (mod 8)` and `25(6p² - 40p + 75)` for
/// `p ≡ ±1`; zero at `p0` when it is `±3 (mod 8)`.
pub fn cp_closed_form(p: u64, p0: Option<u64>) -> Result<BigInt> {
    if p <= 3 || !is_prime_u64(p) {
        return invalid(format!("closed forms need a prime p > 3, got {p}"));
    }
    if p0 == Some(p) && matches!(p % 8, 3 | 5) {
        return Ok(BigInt::from(0));
    }
    let q = BigInt::from(p);
    Ok(match p % 8 {
        3 | 5 => 27 * (2 * &q * &q - 8 * &q + 9),
        _ => 25 * (6 * &q * &q - 40 * &q + 75),
    })
}

/// `C(s, 2)·deg²`: with `s` polynomials of degree at most `deg`, each pair
/// vanishes on at most `deg²·p^{n-2}` points once `p` is prime to the moduli.
pub fn tail_constant(setup: &DensitySetup) -> u64 {
    let s = setup.polynomials.len() as u64;
    let deg = setup.polynomials.iter().map(|f| f.coeffs.len() as u64 - 1).max().unwrap_or(0);
    s * s.saturating_sub(1) / 2 * deg * deg
}
