//! Runs the fixture corpus and prints one line per acceptance criterion.

use mtc_core::density::{euler_product, scan_admissible_with, DensitySetup, Predicate, ScanConfig, DEFAULT_CUTOFF};
use mtc_core::fixtures::{by_criterion, corpus, run};

/// The scan at M = 200 sees about 0.1 expected passing vectors, so alongside
/// the required check we report sampled ratios in boxes large enough to
/// resolve the density.
fn sampled_density_evidence() {
    let density = euler_product(&DensitySetup::standard(), DEFAULT_CUTOFF).unwrap();
    let (lo, hi) = (density.final_interval.lower_f64(), density.final_interval.upper_f64());
    println!("supplementary: density interval [{lo:.4e}, {hi:.4e}] at cutoff {DEFAULT_CUTOFF}");
    for m in [20_000u64, 2_000_000] {
        let cfg = ScanConfig {
            samples: Some(500_000),
            seed: 1,
            ..ScanConfig::default()
        };
        let s = scan_admissible_with(m, Predicate::GcdStrengthened, &cfg, None).unwrap();
        let within = s.ratio >= lo * 0.75 && s.ratio <= hi * 1.25;
        println!(
            "supplementary: M = {m}, {} of {} sampled candidates pass, ratio {:.4e} ({})",
            s.passing,
            s.evaluated,
            s.ratio,
            if within { "within 25%" } else { "outside 25%" }
        );
    }
}

#[test]
fn acceptance() {
    let fixtures = corpus();
    let results = run(&fixtures, None);
    for r in &results {
        println!(
            "  {} [{}] {:.2} s: {}",
            r.name,
            if r.passed { "ok" } else { "failed" },
            r.seconds,
            r.detail
        );
    }
    let criteria = by_criterion(&results);
    for c in &criteria {
        let mut summary: Vec<&str> = vec![];
        for f in fixtures.iter().filter(|f| f.criterion == c.criterion) {
            if !summary.contains(&f.summary) {
                summary.push(f.summary);
            }
        }
        println!(
            "{} criterion {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.criterion,
            summary.join("; ")
        );
    }
    sampled_density_evidence();
    let failed: Vec<u8> = criteria.iter().filter(|c| !c.passed).map(|c| c.criterion).collect();
    assert_eq!(criteria.len(), 12);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
