//! Point search modulo `p^n` with `u128` arithmetic (`p^n < 2^62`).

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::numeric::arith::mod_floor_u64;
use crate::numeric::padic::tonelli_shanks;
use crate::surface::SurfaceSpec;

/// The cubic with coefficients reduced modulo `m`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ModCubic {
    pub m: u128,
    a: u128,
    b: u128,
    c: u128,
    d: u128,
}

impl ModCubic {
    pub fn new(spec: &SurfaceSpec, m: u64) -> Self {
        let r = |v: &BigInt| u128::from(mod_floor_u64(v, m));
        ModCubic {
            m: u128::from(m),
            a: r(&spec.a),
            b: r(&spec.b),
            c: r(&spec.c),
            d: r(&spec.d),
        }
    }

    #[inline]
    fn mul(&self, x: u128, y: u128) -> u128 {
        x * y % self.m
    }

    #[inline]
    fn sub(&self, x: u128, y: u128) -> u128 {
        (x + self.m - y % self.m) % self.m
    }

    pub fn eval(&self, [x, y, z]: [u128; 3]) -> u128 {
        let s = (self.mul(x, x) + self.mul(y, y) + self.mul(z, z) + self.mul(self.mul(x, y), z)) % self.m;
        let l = (self.mul(self.a, x) + self.mul(self.b, y) + self.mul(self.c, z) + self.d) % self.m;
        self.sub(s, l)
    }

    pub fn gradient(&self, [x, y, z]: [u128; 3]) -> [u128; 3] {
        [
            self.sub((2 * x + self.mul(y, z)) % self.m, self.a),
            self.sub((2 * y + self.mul(x, z)) % self.m, self.b),
            self.sub((2 * z + self.mul(x, y)) % self.m, self.c),
        ]
    }
}

/// Valuation of a residue modulo `p^n`; `None` for the zero residue.
pub(crate) fn val_mod(v: u128, p: u128) -> Option<u32> {
    if v == 0 {
        return None;
    }
    let mut v = v;
    let mut k = 0;
    while v % p == 0 {
        v /= p;
        k += 1;
    }
    Some(k)
}

/// All solutions modulo a prime `p`.
pub(crate) fn solutions_mod_p(spec: &SurfaceSpec, p: u64) -> Vec<[u128; 3]> {
    let f = ModCubic::new(spec, p);
    let pp = u128::from(p);
    let mut out = Vec::new();
    if p <= 13 {
        for x in 0..pp {
            for y in 0..pp {
                for z in 0..pp {
                    if f.eval([x, y, z]) == 0 {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        return out;
    }
    for y in 0..pp {
        for z in 0..pp {
            out.extend(roots_in_x(&f, p, y, z).into_iter().map(|x| [x, y, z]));
        }
    }
    out.sort_unstable();
    out
}

/// Roots `x` of `f(x, y, z) ≡ 0 mod p` for odd `p`.
pub(crate) fn roots_in_x(f: &ModCubic, p: u64, y: u128, z: u128) -> Vec<u128> {
    let m = f.m;
    let lin = f.sub(f.mul(y, z), f.a);
    let cst = f.sub((f.mul(y, y) + f.mul(z, z)) % m, (f.mul(f.b, y) + f.mul(f.c, z) + f.d) % m);
    let disc = f.sub(f.mul(lin, lin), f.mul(4, cst));
    let Some(s) = tonelli_shanks(disc as u64, p) else {
        return Vec::new();
    };
    let half = (m + 1) / 2;
    let r1 = f.mul(f.sub(s as u128, lin), half);
    let r2 = f.mul(f.sub(m - s as u128 % m, lin), half);
    if r1 == r2 {
        vec![r1]
    } else {
        vec![r1, r2]
    }
}

/// Lifts every solution modulo `p^n` to all its solutions modulo `p^(n+1)`.
/// Returns `None` once more than `budget` points are produced.
pub(crate) fn lift_level(
    spec: &SurfaceSpec,
    p: u64,
    n: u32,
    points: &[[u128; 3]],
    budget: usize,
) -> Option<Vec<[u128; 3]>> {
    let pp = u128::from(p);
    let pn = pp.pow(n);
    let next = ModCubic::new(spec, (pn * pp).to_u64()?);
    let mut out = Vec::new();
    for &s in points {
        let r = next.eval(s) / pn % pp;
        let g = next.gradient(s).map(|v| v % pp);
        let lift = |t: [u128; 3]| [s[0] + pn * t[0], s[1] + pn * t[1], s[2] + pn * t[2]];
        match g.iter().position(|&v| v != 0) {
            None => {
                if r == 0 {
                    for t0 in 0..pp {
                        for t1 in 0..pp {
                            for t2 in 0..pp {
                                out.push(lift([t0, t1, t2]));
                            }
                        }
                    }
                }
            }
            Some(i) => {
                // g·t ≡ -r mod p, solved for t_i
                let inv = u128::from(crate::numeric::arith::pow_mod_u64(g[i] as u64, p - 2, p));
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                for tj in 0..pp {
                    for tk in 0..pp {
                        let rest = (r + g[j] * tj + g[k] * tk) % pp;
                        let ti = (pp - rest) % pp * inv % pp;
                        let mut t = [0; 3];
                        t[i] = ti;
                        t[j] = tj;
                        t[k] = tk;
                        out.push(lift(t));
                    }
                }
            }
        }
        if out.len() > budget {
            return None;
        }
    }
    Some(out)
}
