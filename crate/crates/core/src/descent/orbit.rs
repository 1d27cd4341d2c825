//! Orbits of the Vieta involutions on the points mod `p`.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::local::enumerate_points_mod;
use crate::numeric::arith::{is_prime_u64, mod_floor_u64};
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub size: usize,
    /// Lexicographically least point of the orbit.
    pub representative: [u64; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    pub p: u64,
    pub total: usize,
    /// Largest orbits first.
    pub orbits: Vec<Orbit>,
}

pub fn orbit_mod_p(spec: &SurfaceSpec, p: u64) -> Result<OrbitDecomposition> {
    orbit_mod_p_with(spec, p, 1000)
}

pub(crate) fn moves_mod_p(lin: [u64; 3], p: u64, q: [u64; 3]) -> [[u64; 3]; 3] {
    let mut out = [q; 3];
    for i in 0..3 {
        let (j, k) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let yz = (q[j] as u128 * q[k] as u128 % p as u128) as u64;
        out[i][i] = (lin[i] + 2 * p - yz - q[i]) % p;
    }
    out
}

/// Breadth-first closure under the three involutions; `max_p` bounds `p`.
pub fn orbit_mod_p_with(spec: &SurfaceSpec, p: u64, max_p: u64) -> Result<OrbitDecomposition> {
    if !is_prime_u64(p) {
        return invalid(format!("{p} is not prime"));
    }
    if p > max_p {
        return Err(Error::Resource(format!("p = {p} exceeds the budget {max_p}")));
    }
    let pts: Vec<[u64; 3]> = enumerate_points_mod(spec, p, 1, None)?
        .iter()
        .map(|q| [&q.x, &q.y, &q.z].map(|v: &BigInt| v.to_u64().expect("reduced")))
        .collect();
    let lin = spec.linear().map(|v| mod_floor_u64(v, p));
    let index: HashMap<[u64; 3], usize> = pts.iter().enumerate().map(|(i, q)| (*q, i)).collect();
    let mut seen = vec![false; pts.len()];
    let mut orbits = vec![];
    for start in 0..pts.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        let mut rep = pts[start];
        while let Some(i) = queue.pop_front() {
            size += 1;
            rep = rep.min(pts[i]);
            for n in moves_mod_p(lin, p, pts[i]) {
                let j = index[&n];
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        orbits.push(Orbit {
            size,
            representative: rep,
        });
    }
    orbits.sort_by(|a, b| b.size.cmp(&a.size).then(a.representative.cmp(&b.representative)));
    Ok(OrbitDecomposition {
        p,
        total: pts.len(),
        orbits,
    })
}
