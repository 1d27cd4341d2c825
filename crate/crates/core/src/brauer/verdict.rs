//! Brauer–Manin verdicts from per-place invariant profiles.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algebra::{algebra_generators, GeneratorShape, QuatAlgebraSpec};
use super::hilbert::{Invariant, Place};
use super::profile::{fmt_tuple, invariant_profile, InvariantProfile, ProfileConfig};
use crate::error::{Error, Result};
use crate::local::{local_report_with, LocalConfig};
use crate::numeric::factor::{factor, DEFAULT_TRIAL_BOUND};
use crate::surface::assumption_33;
use crate::surface::{ParamVector, SurfaceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrauerConfig {
    pub profile: ProfileConfig,
    pub local: LocalConfig,
    /// Prime bound passed to the local solubility report.
    pub local_prime_bound: u64,
    /// Excluded primes at which the profile is still sampled to confirm `{0}`.
    pub spot_checks: usize,
}

impl Default for BrauerConfig {
    fn default() -> Self {
        BrauerConfig {
            profile: ProfileConfig::default(),
            local: LocalConfig::default(),
            local_prime_bound: 50,
            spot_checks: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictKind {
    ObstructionToHP,
    ObstructionToSAOnly,
    NoObstructionDetected,
    Undecided,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::ObstructionToHP => "ObstructionToHP",
            VerdictKind::ObstructionToSAOnly => "ObstructionToSAOnly",
            VerdictKind::NoObstructionDetected => "NoObstructionDetected",
            VerdictKind::Undecided => "Undecided",
        })
    }
}

/// An excluded prime sampled to confirm that only the zero tuple occurs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub place: Place,
    pub attainable: BTreeSet<Vec<Invariant>>,
    pub agrees: bool,
}

/// One attainable tuple per place whose sum is zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub place: Place,
    pub tuple: Vec<Invariant>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BMVerdict {
    pub kind: VerdictKind,
    pub k: ParamVector,
    pub shape: GeneratorShape,
    /// Generators whose invariants enter the verdict.
    pub generators: Vec<String>,
    pub places: Vec<InvariantProfile>,
    pub assumptions_used: Vec<String>,
    pub spot_checks: Vec<SpotCheck>,
    pub zero_sum: Option<Vec<Selection>>,
    /// `"full"` when transcendental classes are known to vanish, `"algebraic"` otherwise.
    pub scope: String,
    pub reason: String,
}

impl BMVerdict {
    pub fn profile(&self, place: Place) -> Option<&InvariantProfile> {
        self.places.iter().find(|p| p.place == place)
    }
}

/// Primes at which some generator can have a nonconstant invariant, and
/// prime factors that do not fit in a machine word.
pub fn candidate_places(spec: &SurfaceSpec, algs: &[QuatAlgebraSpec]) -> (Vec<Place>, Vec<BigInt>) {
    let mut data = vec![BigInt::from(6), spec.delta.clone()];
    data.extend(spec.k.radicands());
    for alg in algs {
        match &alg.special_case {
            Some(sc) => data.push(sc.m.clone()),
            None => {
                data.push(alg.base_field_disc.clone());
                data.push(BigInt::from(alg.ki) * alg.ki - BigInt::from(alg.k1) * alg.k1);
            }
        }
    }
    let mut primes = BTreeSet::new();
    let mut large = BTreeSet::new();
    for n in data.iter().filter(|n| !n.is_zero()) {
        let f = factor(n, DEFAULT_TRIAL_BOUND);
        for (q, _) in f.primes {
            match q.to_u64() {
                Some(q) => {
                    primes.insert(q);
                }
                None => {
                    large.insert(q);
                }
            }
        }
        if !f.cofactor.is_one() {
            large.insert(f.cofactor.abs());
        }
    }
    let mut places: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    places.push(Place::Infinity);
    (places, large.into_iter().collect())
}

fn mask(t: &[Invariant]) -> usize {
    t.iter().enumerate().filter(|(_, v)| v.is_half()).map(|(i, _)| 1 << i).sum()
}

/// A selection of one tuple per profile summing to zero, if any.
fn zero_sum(profiles: &[InvariantProfile], g: usize) -> Option<Vec<Selection>> {
    let size = 1usize << g;
    // reach[i][s]: tuple chosen at place i to reach partial sum s
    let mut reach: Vec<Vec<Option<usize>>> = Vec::with_capacity(profiles.len());
    let mut cur = vec![false; size];
    cur[0] = true;
    for prof in profiles {
        let mut next = vec![None; size];
        for (s, _) in cur.iter().enumerate().filter(|(_, &r)| r) {
            for t in &prof.attainable {
                let m = mask(t);
                next[s ^ m].get_or_insert(m);
            }
        }
        cur = next.iter().map(Option::is_some).collect();
        reach.push(next);
    }
    if !cur[0] {
        return None;
    }
    let mut s = 0usize;
    let mut out = Vec::with_capacity(profiles.len());
    for (prof, r) in profiles.iter().zip(&reach).rev() {
        let m = r[s].expect("reachable");
        let tuple = prof.attainable.iter().find(|t| mask(t) == m).unwrap().clone();
        out.push(Selection { place: prof.place, tuple });
        s ^= m;
    }
    out.reverse();
    Some(out)
}

fn undecided(spec: &SurfaceSpec, shape: GeneratorShape, reason: String) -> BMVerdict {
    BMVerdict {
        kind: VerdictKind::Undecided,
        k: spec.k,
        shape,
        generators: vec![],
        places: vec![],
        assumptions_used: vec![],
        spot_checks: vec![],
        zero_sum: None,
        scope: "algebraic".into(),
        reason,
    }
}

pub fn bm_verdict(spec: &SurfaceSpec) -> Result<BMVerdict> {
    bm_verdict_with(spec, &BrauerConfig::default())
}

/// Profiles every candidate place and decides whether the algebraic
/// Brauer–Manin set is empty (obstruction to the Hasse principle), a proper
/// subset of the adelic points (obstruction to strong approximation only),
/// or everything.
pub fn bm_verdict_with(spec: &SurfaceSpec, cfg: &BrauerConfig) -> Result<BMVerdict> {
    let gens = algebra_generators(spec);
    if let GeneratorShape::Unsupported(r) = &gens.shape {
        return Err(Error::UnsupportedInput(r.clone()));
    }
    let report = local_report_with(spec, cfg.local_prime_bound, &cfg.local)?;
    if report.has_empty_place() {
        return Ok(undecided(
            spec,
            gens.shape.clone(),
            "NotApplicable: some place has no local integral points".into(),
        ));
    }
    let mut assumptions = Vec::new();
    if !report.undecided.is_empty() {
        return Ok(undecided(
            spec,
            gens.shape.clone(),
            format!("local solubility undecided at {}", report.undecided.join(", ")),
        ));
    }
    for e in &report.entries {
        if e.verdict == crate::local::Verdict::AssumedSolvable {
            assumptions.push(format!("local points at {} assumed: {}", e.place, e.rationale));
        }
    }

    let in_play = gens.in_play();
    let others = &gens.algebras[in_play.len()..];
    let g = in_play.len();
    let (places, large) = candidate_places(spec, &gens.algebras);
    let profiles: Vec<InvariantProfile> = places
        .par_iter()
        .map(|&v| invariant_profile(spec, in_play, others, v, &cfg.profile))
        .collect::<Result<_>>()?;

    // profiles with no local points do not occur here: the report is all-solvable
    let full = profiles.iter().find(|p| p.is_full());
    let mut unprofiled = vec!["every prime outside the candidate set has invariant tuple zero (good-reduction exclusion)".to_string()];
    for q in &large {
        unprofiled.push(format!("invariant tuple at the large prime factor {q} is zero"));
    }
    match full {
        Some(f) => assumptions.push(format!(
            "no assumption on unprofiled places is needed: every tuple is attained at {}",
            f.place
        )),
        None => assumptions.extend(unprofiled),
    }
    for p in &profiles {
        if p.notes.iter().any(|n| n.contains("isotropy search")) {
            assumptions.push(format!(
                "dyadic symbols at {} decided by bounded isotropy search (slope {}, offset {})",
                p.place, cfg.profile.isotropy.slope, cfg.profile.isotropy.offset
            ));
        }
        if let Some(cc) = p.cross_check.filter(|c| c.mismatches > 0) {
            assumptions.push(format!(
                "the three corestricted algebras disagree at {} of {} points sampled at {}",
                cc.mismatches, cc.points, p.place
            ));
        }
    }

    let spot_checks = spot_check(spec, in_play, &places, cfg)?;
    let a33 = assumption_33(&spec.k)?.holds;
    let scope = if a33 { "full" } else { "algebraic" }.to_string();

    let partial: Vec<String> = profiles
        .iter()
        .filter(|p| !p.is_complete())
        .map(|p| p.place.to_string())
        .collect();
    let selection = zero_sum(&profiles, g);
    let varying: Vec<String> = profiles
        .iter()
        .filter(|p| p.attainable.len() >= 2)
        .map(|p| p.place.to_string())
        .collect();
    let spot_ok = spot_checks.iter().all(|s| s.agrees);

    let (kind, reason) = if !spot_ok {
        (
            VerdictKind::Undecided,
            "a spot check found a nonzero invariant at an excluded prime".to_string(),
        )
    } else if selection.is_some() && !varying.is_empty() {
        (
            VerdictKind::ObstructionToSAOnly,
            format!(
                "a zero-sum selection exists and the invariants vary at {}",
                varying.join(", ")
            ),
        )
    } else if selection.is_some() && partial.is_empty() {
        (
            VerdictKind::NoObstructionDetected,
            "every profile is a single tuple and they sum to zero".into(),
        )
    } else if selection.is_none() && partial.is_empty() && full.is_none() {
        (
            VerdictKind::ObstructionToHP,
            "no choice of attainable tuples sums to zero".into(),
        )
    } else {
        (
            VerdictKind::Undecided,
            format!("partial profiles at {}", partial.join(", ")),
        )
    };

    if kind != VerdictKind::Undecided {
        for p in profiles.iter().filter(|p| !p.is_complete()) {
            if !p.attainable.is_empty() {
                assumptions.push(format!(
                    "profile at {} is partial; the verdict uses only the attained {}",
                    p.place,
                    p.attainable.iter().map(|t| fmt_tuple(t)).collect::<Vec<_>>().join(" ")
                ));
            }
        }
    }

    Ok(BMVerdict {
        kind,
        k: spec.k,
        shape: gens.shape.clone(),
        generators: in_play.iter().map(|a| a.name.clone()).collect(),
        places: profiles,
        assumptions_used: assumptions,
        spot_checks,
        zero_sum: selection,
        scope,
        reason,
    })
}

/// Samples the profile at the smallest primes outside the candidate set.
pub fn spot_check(
    spec: &SurfaceSpec,
    algs: &[QuatAlgebraSpec],
    candidates: &[Place],
    cfg: &BrauerConfig,
) -> Result<Vec<SpotCheck>> {
    let excluded: BTreeSet<Place> = candidates.iter().copied().collect();
    let primes: Vec<u64> = crate::numeric::arith::primes_up_to(1000)
        .into_iter()
        .filter(|&p| !excluded.contains(&Place::Prime(p)))
        .take(cfg.spot_checks)
        .collect();
    let mut pc = cfg.profile.clone();
    pc.max_levels = 1;
    pc.cross_check_limit = 0;
    primes
        .par_iter()
        .map(|&p| {
            let prof = invariant_profile(spec, algs, &[], Place::Prime(p), &pc)?;
            let agrees = prof.attainable.iter().all(|t| t.iter().all(|v| !v.is_half()));
            Ok(SpotCheck {
                place: Place::Prime(p),
                attainable: prof.attainable,
                agrees,
            })
        })
        .collect()
}

/// Primes up to `bound` declared `{0}` without profiling.
pub fn excluded_primes_up_to(spec: &SurfaceSpec, bound: u64) -> Vec<u64> {
    let gens = algebra_generators(spec);
    let (places, _) = candidate_places(spec, &gens.algebras);
    crate::numeric::arith::primes_up_to(bound)
        .into_iter()
        .filter(|&p| !places.contains(&Place::Prime(p)))
        .collect()
}
