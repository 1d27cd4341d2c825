//! Square roots modulo prime powers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::arith::split_valuation;
use super::jacobi::legendre;

/// A residue modulo `p^N`, kept reduced into `[0, p^N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueWitness {
    pub modulus_prime: u64,
    pub exponent: u32,
    pub value: BigInt,
}

impl ResidueWitness {
    pub fn new(p: u64, n: u32, value: &BigInt) -> Self {
        let m = BigInt::from(p).pow(n);
        ResidueWitness {
            modulus_prime: p,
            exponent: n,
            value: value.mod_floor(&m),
        }
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::from(self.modulus_prime).pow(self.exponent)
    }
}

/// Square root of `a` modulo `p^n` when `a` is a square in the p-adic integers.
///
/// Returns `None` when `a` is not a p-adic square. For `a = 0` the root is 0.
pub fn padic_sqrt(a: &BigInt, p: u64, n: u32) -> Option<ResidueWitness> {
    assert!(n >= 1, "precision must be positive");
    if a.is_zero() {
        return Some(ResidueWitness::new(p, n, &BigInt::zero()));
    }
    let (v, u) = split_valuation(a, p)?;
    if v % 2 == 1 {
        return None;
    }
    let half = v / 2;
    // the unit root is needed only to precision n - half, but its existence
    // is decided regardless of how much of it survives the reduction
    let need = n.saturating_sub(half).max(1);
    let r = unit_sqrt(&u, p, need)?;
    let root = r * BigInt::from(p).pow(half);
    Some(ResidueWitness::new(p, n, &root))
}

/// Square root of a p-adic unit modulo p^n.
fn unit_sqrt(u: &BigInt, p: u64, n: u32) -> Option<BigInt> {
    if p == 2 {
        if u.mod_floor(&BigInt::from(8)) != BigInt::one() {
            return None;
        }
        // r^2 = u mod 2^k lifted one bit at a time; r odd
        let mut r = BigInt::one();
        let mut k = 3u32;
        while k < n + 1 {
            let m = BigInt::one() << (k + 1);
            if (&r * &r - u).mod_floor(&m) != BigInt::zero() {
                r += BigInt::one() << (k - 1);
            }
            k += 1;
        }
        let m = BigInt::one() << n;
        return Some(r.mod_floor(&m));
    }
    if legendre(u, p) != 1 {
        return None;
    }
    let r0 = tonelli_shanks(u.mod_floor(&BigInt::from(p)).to_u64().unwrap(), p)?;
    // Newton lifting: r <- r - (r^2 - u)/(2r)
    let mut r = BigInt::from(r0);
    let mut prec = 1u32;
    while prec < n {
        prec = (prec * 2).min(n);
        let m = BigInt::from(p).pow(prec);
        let f = (&r * &r - u).mod_floor(&m);
        let inv = mod_inverse(&(BigInt::from(2) * &r), &m)?;
        r = (&r - f * inv).mod_floor(&m);
    }
    Some(r.mod_floor(&BigInt::from(p).pow(n)))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Tonelli-Shanks square root modulo an odd prime.
pub fn tonelli_shanks(a: u64, p: u64) -> Option<u64> {
    use super::arith::{mul_mod_u64, pow_mod_u64};
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod_u64(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod_u64(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod_u64(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod_u64(z, q, p);
    let mut t = pow_mod_u64(a, q, p);
    let mut r = pow_mod_u64(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod_u64(tt, tt, p);
            i += 1;
        }
        let b = pow_mod_u64(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod_u64(b, b, p);
        t = mul_mod_u64(t, c, p);
        r = mul_mod_u64(r, b, p);
    }
    Some(r)
}

/// Tonelli-Shanks over big primes.
pub fn sqrt_mod_prime_big(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(a);
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    let pm1 = p - &one;
    if a.modpow(&(&pm1 / &two), p) != one {
        return None;
    }
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q >>= 1;
        s += 1;
    }
    let mut z = two.clone();
    while z.modpow(&(&pm1 / &two), p) != pm1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) / &two), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    debug_assert!(!r.is_negative());
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn examples() {
        assert_eq!(padic_sqrt(&b(1), 13, 4).unwrap().value, b(1));
        let r = padic_sqrt(&b(2), 7, 1).unwrap().value;
        assert!(r == b(3) || r == b(4));
        assert!(padic_sqrt(&b(2), 5, 1).is_none());
    }

    #[test]
    fn two_adic_and_non_units() {
        for n in 1..20u32 {
            let m = BigInt::one() << n;
            for a in [17i64, 33, 41, 1, 9 * 4, 25 * 16, -7, -15] {
                let r = padic_sqrt(&b(a), 2, n).unwrap().value;
                assert_eq!((&r * &r - b(a)).mod_floor(&m), BigInt::zero(), "a={a} n={n}");
            }
            assert!(padic_sqrt(&b(3), 2, n).is_none());
            assert!(padic_sqrt(&b(2), 2, n).is_none());
            assert!(padic_sqrt(&b(5 * 4), 2, n).is_none());
        }
        let r = padic_sqrt(&b(9 * 7 * 7), 7, 5).unwrap().value;
        assert_eq!((&r * &r - b(441)).mod_floor(&b(16807)), BigInt::zero());
        assert!(padic_sqrt(&b(7 * 2), 7, 3).is_none());
    }

    #[test]
    fn tonelli_big_prime() {
        let p: BigInt = "1000000007".parse().unwrap();
        let sq = (b(123456789) * b(123456789)) % &p;
        let r = sqrt_mod_prime_big(&sq, &p).unwrap();
        assert_eq!((&r * &r) % &p, sq);
        assert!(sqrt_mod_prime_big(&b(5), &p).is_none());
        assert!(sqrt_mod_prime_big(&b(-1), &b(1000000007)).is_none());
    }

    proptest! {
        #[test]
        fn odd_prime_roots_square_back(a in -100_000i64..100_000, pi in 0usize..8, n in 1u32..6) {
            let p = [3u64, 5, 7, 11, 13, 17, 101, 1009][pi];
            let m = BigInt::from(p).pow(n);
            if let Some(w) = padic_sqrt(&b(a), p, n) {
                prop_assert_eq!((&w.value * &w.value - b(a)).mod_floor(&m), BigInt::zero());
            }
        }

        #[test]
        fn unit_absence_matches_brute_force(a in 1i64..5000, pi in 0usize..5, n in 1u32..4) {
            let p = [3u64, 5, 7, 11, 13][pi];
            prop_assume!(a % p as i64 != 0);
            let m = (p as i64).pow(n);
            let brute = (0..m).any(|r| (r * r - a).rem_euclid(m) == 0);
            prop_assert_eq!(padic_sqrt(&b(a), p, n).is_some(), brute);
        }
    }
}
