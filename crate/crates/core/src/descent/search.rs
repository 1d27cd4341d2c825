//! Integral-point search over the fundamental box.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::conic::{solve_conic_fixed_coord_with, ConicConfig, ConicReport};
use super::sieve::{pair_count, scan, Region, SIEVE_MODULUS};
use super::{height, Axis, DEFAULT_C, DEFAULT_C1};
use crate::error::Result;
use crate::numeric::serde_int;
use crate::surface::SurfaceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub c1: u64,
    pub c: u64,
    /// Keep scanning after the first point and report every box point found.
    pub collect_all: bool,
    /// Pair budget per product condition.
    pub max_pairs: u128,
    pub conic: ConicConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            c1: DEFAULT_C1,
            c: DEFAULT_C,
            collect_all: false,
            max_pairs: 50_000_000_000,
            conic: ConicConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub c1: u64,
    pub c: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SearchKind {
    PointFound {
        #[serde(with = "serde_int::bigint_array3")]
        point: [BigInt; 3],
    },
    EmptyCertified,
    Inconclusive {
        reason: String,
    },
}

/// What one box condition's subsearch established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition_kind", rename_all = "kebab-case")]
pub enum ConditionEvidence {
    /// Condition (1): one slice per axis and per fixed value.
    Slices { condition: u8, slices: Vec<ConicReport> },
    /// Conditions (2) to (5): one pair scan per solved axis.
    PairScan {
        condition: u8,
        solved: Axis,
        region: Region,
        #[serde(with = "serde_int::bigint")]
        bound: BigInt,
        sieve_modulus: u32,
        pairs: u64,
        survivors: u64,
        #[serde(with = "serde_int::bigint_array3_vec")]
        points: Vec<[BigInt; 3]>,
        #[serde(skip_serializing_if = "Option::is_none")]
        inconclusive: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCertificate {
    #[serde(flatten)]
    pub kind: SearchKind,
    pub k: [i64; 4],
    pub constants_used: Constants,
    pub evidence: Vec<ConditionEvidence>,
    /// Every point met, when collecting all.
    #[serde(with = "serde_int::bigint_array3_vec")]
    pub points: Vec<[BigInt; 3]>,
    pub assumptions: Vec<String>,
}

impl SearchCertificate {
    pub fn is_empty_certified(&self) -> bool {
        matches!(self.kind, SearchKind::EmptyCertified)
    }
}

const ASSUMPTION: &str = "The box is reached with the three Vieta involutions alone; coordinate \
permutations and sign changes are not used since a, b, c differ in general. Emptiness therefore \
relies on the descent lemma holding for this group with the given constants.";

pub fn search_integral_points(spec: &SurfaceSpec) -> Result<SearchCertificate> {
    search_integral_points_with(spec, &SearchConfig::default())
}

pub fn search_integral_points_with(spec: &SurfaceSpec, cfg: &SearchConfig) -> Result<SearchCertificate> {
    spec.require_smooth()?;
    let mut evidence = vec![];
    let mut points: Vec<[BigInt; 3]> = vec![];
    let mut inconclusive: Option<String> = None;
    let done = |points: &Vec<_>| !cfg.collect_all && !points.is_empty();

    // (1): slices through every coordinate value up to C1
    let c1 = cfg.c1 as i64;
    let jobs: Vec<(Axis, i64)> = Axis::ALL
        .iter()
        .flat_map(|&a| (-c1..=c1).map(move |v| (a, v)))
        .collect();
    let slices = jobs
        .par_iter()
        .map(|&(axis, v)| solve_conic_fixed_coord_with(spec, axis, &BigInt::from(v), &cfg.conic))
        .collect::<Result<Vec<_>>>()?;
    for s in &slices {
        if let Some(p) = s.witness() {
            if !points.contains(p) {
                points.push(p.clone());
            }
        }
        if s.is_inconclusive() && inconclusive.is_none() {
            inconclusive = Some(format!("slice {} = {} undecided", s.axis.name(), s.value));
        }
    }
    evidence.push(ConditionEvidence::Slices { condition: 1, slices });

    // (2)-(4): |yz| ≤ C·H(a) solved for x, and so on; (5) solved for the
    // largest coordinate
    let lin = spec.linear();
    let mut scans = vec![];
    for axis in Axis::ALL {
        scans.push((axis.index() as u8 + 2, axis, Region::Product, height(lin[axis.index()])));
    }
    for axis in Axis::ALL {
        scans.push((5, axis, Region::Cubic, height(&spec.d)));
    }
    for (condition, solved, region, h) in scans {
        if done(&points) {
            break;
        }
        let bound = h * cfg.c;
        let budget = bound
            .to_u64()
            .filter(|&x| x < 1 << 62)
            .map(|x| pair_count(region, cfg.c1, x));
        let result = match budget {
            None => Err(format!("bound {bound} too large")),
            Some(n) if n > cfg.max_pairs => Err(format!("{n} pairs exceed the budget {}", cfg.max_pairs)),
            Some(_) => scan(spec, solved, region, cfg.c1, &bound),
        };
        let ev = match result {
            Ok(r) => {
                for p in &r.points {
                    if !points.contains(p) {
                        points.push(p.clone());
                    }
                }
                ConditionEvidence::PairScan {
                    condition,
                    solved,
                    region,
                    bound,
                    sieve_modulus: SIEVE_MODULUS,
                    pairs: r.pairs,
                    survivors: r.survivors,
                    points: r.points,
                    inconclusive: None,
                }
            }
            Err(reason) => {
                if inconclusive.is_none() {
                    inconclusive = Some(format!("condition ({condition}) solved for {}: {reason}", solved.name()));
                }
                ConditionEvidence::PairScan {
                    condition,
                    solved,
                    region,
                    bound,
                    sieve_modulus: SIEVE_MODULUS,
                    pairs: 0,
                    survivors: 0,
                    points: vec![],
                    inconclusive: Some(reason),
                }
            }
        };
        evidence.push(ev);
    }

    points.sort_by(|p, q| {
        let h = |v: &[BigInt; 3]| v.iter().map(|c| c.magnitude().clone()).max();
        h(p).cmp(&h(q)).then(p.cmp(q))
    });
    let kind = if let Some(p) = points.first() {
        SearchKind::PointFound { point: p.clone() }
    } else if let Some(reason) = inconclusive {
        SearchKind::Inconclusive { reason }
    } else {
        SearchKind::EmptyCertified
    };
    Ok(SearchCertificate {
        kind,
        k: spec.k.0,
        constants_used: Constants { c1: cfg.c1, c: cfg.c },
        evidence,
        points,
        assumptions: vec![ASSUMPTION.into()],
    })
}
