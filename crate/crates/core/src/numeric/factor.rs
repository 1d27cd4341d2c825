//! Integer factorisation: trial division followed by Pollard-Brent.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::arith::{gcd_u64, is_prime_u64, is_probable_prime, mul_mod_u64};

/// Result of a bounded factorisation attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    /// Prime factors with multiplicities, ascending.
    pub primes: Vec<(BigInt, u32)>,
    /// Leftover composite part that resisted factorisation (1 when complete).
    pub cofactor: BigInt,
    pub negative: bool,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }
}

pub const DEFAULT_TRIAL_BOUND: u64 = 100_000;

/// Factors `|n|` for nonzero `n`. Cofactors above 2^126 that are not
/// probable primes are left unfactored.
pub fn factor(n: &BigInt, trial_bound: u64) -> Factorization {
    assert!(!n.is_zero(), "cannot factor zero");
    let negative = n.is_negative();
    let mut m = n.abs();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, primes: &mut Vec<(BigInt, u32)>| {
        if let Some(e) = primes.iter_mut().find(|(q, _)| *q == p) {
            e.1 += 1;
        } else {
            primes.push((p, 1));
        }
    };
    let mut d = 2u64;
    while d <= trial_bound {
        let db = BigInt::from(d);
        if &db * &db > m {
            break;
        }
        while (&m % &db).is_zero() {
            m /= &db;
            push(db.clone(), &mut primes);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut cofactor = BigInt::one();
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime(x.magnitude()) {
            push(x, &mut primes);
            continue;
        }
        match x.to_u128() {
            Some(v) if v < (1u128 << 126) => {
                let f = if let Ok(small) = u64::try_from(v) {
                    pollard_brent_u64(small).map(u128::from)
                } else {
                    pollard_brent_u128(v)
                };
                match f {
                    Some(f) => {
                        let f = BigInt::from(f);
                        stack.push(&x / &f);
                        stack.push(f);
                    }
                    None => cofactor *= x,
                }
            }
            _ => cofactor *= x,
        }
    }
    primes.sort();
    Factorization {
        primes,
        cofactor,
        negative,
    }
}

/// Squarefree kernel of a nonzero integer, with sign; `None` if factoring
/// did not complete.
pub fn squarefree_kernel(n: &BigInt) -> Option<BigInt> {
    let f = factor(n, DEFAULT_TRIAL_BOUND);
    if !f.is_complete() {
        return None;
    }
    let mut k = BigInt::one();
    for (p, e) in &f.primes {
        if e % 2 == 1 {
            k *= p;
        }
    }
    Some(if f.negative { -k } else { k })
}

fn pollard_brent_u64(n: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    if is_prime_u64(n) {
        return None;
    }
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut steps = 0u64;
        while g == 1 && steps < 1 << 22 {
            x = f(x);
            y = f(f(y));
            g = gcd_u64(x.abs_diff(y), n);
            steps += 1;
        }
        if g != 1 && g != n {
            return Some(g);
        }
    }
    None
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    // double-and-add keeps every intermediate below 2m < 2^127
    let mut r = 0u128;
    let mut a = a % m;
    let mut b = b % m;
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    r
}

fn pollard_brent_u128(n: u128) -> Option<u128> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..16u128 {
        let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u128, 2u128, 1u128);
        let mut steps = 0u64;
        while g == 1 && steps < 1 << 20 {
            x = f(x);
            y = f(f(y));
            g = x.abs_diff(y).gcd(&n);
            steps += 1;
        }
        if g != 1 && g != n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn kernels() {
        assert_eq!(squarefree_kernel(&b(16125)).unwrap(), b(645));
        assert_eq!(squarefree_kernel(&b(21)).unwrap(), b(21));
        assert_eq!(squarefree_kernel(&b(-12)).unwrap(), b(-3));
        assert_eq!(squarefree_kernel(&b(1)).unwrap(), b(1));
    }

    #[test]
    fn large_semiprime() {
        let p: BigInt = "1000000007".parse().unwrap();
        let q: BigInt = "998244353".parse().unwrap();
        let n = &p * &q * b(4);
        let f = factor(&n, 1000);
        assert!(f.is_complete());
        assert_eq!(f.primes, vec![(b(2), 2), (q, 1), (p, 1)]);
    }

    proptest! {
        #[test]
        fn product_reconstructs(n in 1i64..10_000_000_000) {
            let f = factor(&b(n), 1000);
            prop_assert!(f.is_complete());
            let mut prod = BigInt::one();
            for (p, e) in &f.primes {
                prop_assert!(is_probable_prime(p.magnitude()));
                prod *= p.pow(*e);
            }
            prop_assert_eq!(prod, b(n));
        }
    }
}
