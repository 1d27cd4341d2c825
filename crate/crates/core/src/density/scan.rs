//! Counting admissible `k` in the box `|k_i| ≤ M`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::euler::{ratio_f64, DensityReport};
use crate::error::{invalid, Error, Result};
use crate::surface::{assumption_a, assumption_b, discriminant_and_smoothness, ParamVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Predicate {
    True,
    AssumptionA,
    AssumptionAB { p0: u64 },
    /// `k1 ≡ 127`, `k_i ≡ 5 (mod 144)` and `gcd(g(k_i), g(k_j)) = 3` for
    /// `g(k) = k(k² - 2)(k² - 4)`.
    GcdStrengthened,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => write!(f, "true"),
            Predicate::AssumptionA => write!(f, "assumption-a"),
            Predicate::AssumptionAB { p0 } => write!(f, "assumption-ab:{p0}"),
            Predicate::GcdStrengthened => write!(f, "gcd"),
        }
    }
}

impl FromStr for Predicate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true" => Ok(Predicate::True),
            "assumption-a" | "a" => Ok(Predicate::AssumptionA),
            "gcd" | "gcd-strengthened" => Ok(Predicate::GcdStrengthened),
            _ => match s.strip_prefix("assumption-ab:").or_else(|| s.strip_prefix("ab:")) {
                Some(p) => p
                    .parse()
                    .map(|p0| Predicate::AssumptionAB { p0 })
                    .map_err(|_| Error::InvalidArgument(format!("bad prime in {s:?}"))),
                None => invalid(format!("unknown predicate {s:?}")),
            },
        }
    }
}

/// `k(k² - 2)(k² - 4)`, exact for `|k| < 10^7`.
fn g(k: i64) -> i128 {
    let k = k as i128;
    k * (k * k - 2) * (k * k - 4)
}

impl Predicate {
    /// Residue mod 144 forced on each coordinate, if any.
    fn residues(&self) -> Option<[i64; 4]> {
        match self {
            Predicate::True => None,
            _ => Some([127, 5, 5, 5]),
        }
    }

    pub fn evaluate(&self, k: &ParamVector) -> Result<(bool, Vec<String>)> {
        Ok(match self {
            Predicate::True => (true, vec![]),
            Predicate::AssumptionA => {
                let r = assumption_a(k);
                (r.holds, r.failures)
            }
            Predicate::AssumptionAB { p0 } => {
                let a = assumption_a(k);
                let b = assumption_b(k, *p0)?;
                let mut reasons = a.failures;
                reasons.extend(b.failures);
                (reasons.is_empty(), reasons)
            }
            Predicate::GcdStrengthened => {
                let mut reasons = vec![];
                for (i, (&x, r)) in k.0.iter().zip([127, 5, 5, 5]).enumerate() {
                    if x.rem_euclid(144) != r {
                        reasons.push(format!("k{} ≡ {r} mod 144", i + 1));
                    }
                }
                let gs = k.0.map(g);
                for i in 0..4 {
                    for j in i + 1..4 {
                        let d = gs[i].gcd(&gs[j]);
                        if d != 3 {
                            reasons.push(format!("gcd(g(k{}), g(k{})) = {d}", i + 1, j + 1));
                        }
                    }
                }
                (reasons.is_empty(), reasons)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Largest number of candidates evaluated in a full scan.
    pub max_candidates: u64,
    /// Number of uniform draws from the candidate set; full scan when `None`.
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            max_candidates: 200_000_000,
            samples: None,
            seed: 0,
        }
    }
}

/// One JSONL row of a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: [i64; 4],
    pub passes: bool,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub predicate: Predicate,
    pub m: u64,
    /// `full` or `sampled`.
    pub mode: String,
    /// Vectors in the box meeting the congruences the predicate forces.
    pub candidates: u128,
    pub evaluated: u64,
    pub passing: u64,
    /// Exact in a full scan, scaled from the draws otherwise.
    pub count: f64,
    /// Passing vectors with `Δ(k) = 0` or some `|k_i| = 2`.
    pub singular_passing: u64,
    pub box_size: u128,
    /// `count/(2M+1)^4`.
    pub ratio: f64,
    /// `count/M^4`.
    pub ratio_m4: f64,
}

fn coordinate_values(m: i64, residue: Option<i64>) -> Vec<i64> {
    match residue {
        None => (-m..=m).collect(),
        Some(r) => {
            let first = -m + (r - (-m)).rem_euclid(144);
            (first..=m).step_by(144).collect()
        }
    }
}

pub fn scan_admissible(m: u64, predicate: Predicate) -> Result<ScanReport> {
    scan_admissible_with(m, predicate, &ScanConfig::default(), None)
}

/// Counts the vectors of the box passing `predicate`, streaming one
/// [`ScanRow`] per evaluated candidate to `rows` when given.
pub fn scan_admissible_with(
    m: u64,
    predicate: Predicate,
    cfg: &ScanConfig,
    mut rows: Option<&mut dyn Write>,
) -> Result<ScanReport> {
    if m > 10_000_000 {
        return invalid(format!("M = {m} exceeds 10^7"));
    }
    if let Predicate::AssumptionAB { p0 } = predicate {
        if !crate::numeric::arith::is_prime_u64(p0) {
            return invalid(format!("{p0} is not prime"));
        }
    }
    let mi = m as i64;
    let res = predicate.residues();
    let values: Vec<Vec<i64>> = (0..4).map(|i| coordinate_values(mi, res.map(|r| r[i]))).collect();
    let candidates: u128 = values.iter().map(|v| v.len() as u128).product();
    let side = 2 * m as u128 + 1;
    let box_size = side.pow(4);

    let check = |k: [i64; 4]| -> Result<(bool, bool, ScanRow)> {
        let kv = ParamVector(k);
        let (passes, reasons) = predicate.evaluate(&kv)?;
        let singular = passes && !discriminant_and_smoothness(&kv).smooth;
        Ok((passes, singular, ScanRow { k, passes, reasons }))
    };
    let emit = rows.is_some();
    let mut write_rows = |batch: Vec<ScanRow>| -> Result<()> {
        if let Some(w) = rows.as_mut() {
            for r in batch {
                let line = serde_json::to_string(&r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                writeln!(w, "{line}").map_err(|e| Error::Resource(format!("writing rows: {e}")))?;
            }
        }
        Ok(())
    };

    let (mode, evaluated, passing, singular, count) = match cfg.samples {
        None => {
            if candidates > cfg.max_candidates as u128 {
                return Err(Error::Resource(format!(
                    "{candidates} candidates exceed the budget {}; use sampling",
                    cfg.max_candidates
                )));
            }
            // one task per first coordinate, merged in order
            let per_k1 = values[0]
                .par_iter()
                .map(|&k1| {
                    let (mut pass, mut sing, mut batch) = (0u64, 0u64, vec![]);
                    for &k2 in &values[1] {
                        for &k3 in &values[2] {
                            for &k4 in &values[3] {
                                let (p, s, row) = check([k1, k2, k3, k4])?;
                                pass += p as u64;
                                sing += s as u64;
                                if emit {
                                    batch.push(row);
                                }
                            }
                        }
                    }
                    Ok((pass, sing, batch))
                })
                .collect::<Result<Vec<_>>>()?;
            let (mut pass, mut sing) = (0, 0);
            for (p, s, batch) in per_k1 {
                pass += p;
                sing += s;
                write_rows(batch)?;
            }
            ("full", candidates as u64, pass, sing, pass as f64)
        }
        Some(n) => {
            if candidates == 0 {
                ("sampled", 0, 0, 0, 0.0)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let (mut pass, mut sing, mut batch) = (0u64, 0u64, vec![]);
                for _ in 0..n {
                    let k = [0, 1, 2, 3].map(|i| values[i][rng.gen_range(0..values[i].len())]);
                    let (p, s, row) = check(k)?;
                    pass += p as u64;
                    sing += s as u64;
                    if emit {
                        batch.push(row);
                    }
                }
                write_rows(batch)?;
                ("sampled", n, pass, sing, pass as f64 / n as f64 * candidates as f64)
            }
        }
    };
    Ok(ScanReport {
        predicate,
        m,
        mode: mode.into(),
        candidates,
        evaluated,
        passing,
        count,
        singular_passing: singular,
        box_size,
        ratio: count / box_size as f64,
        ratio_m4: if m == 0 { f64::NAN } else { count / (m as f64).powi(4) },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanComparison {
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    pub slack: f64,
    /// Count the density interval predicts for the box, at its upper end.
    pub expected_count: f64,
    pub within: bool,
}

/// Whether `count/(2M+1)^4` lies in the density interval widened by `slack`
/// on each side.
pub fn compare_scan(scan: &ScanReport, density: &DensityReport, slack: f64) -> ScanComparison {
    let lower = density.final_interval.lower_f64();
    let upper = density.final_interval.upper_f64();
    let box_size = BigRational::from_integer(BigInt::from(scan.box_size));
    let expected = ratio_f64(&(&density.final_interval.upper * box_size));
    ScanComparison {
        ratio: scan.ratio,
        lower,
        upper,
        slack,
        expected_count: expected,
        within: scan.ratio >= lower * (1.0 - slack) && scan.ratio <= upper * (1.0 + slack),
    }
}
