use std::process::Command;

use mtc_cli::{
    run_command, AnalysisReport, CohomologyReport, DensityCommandReport, Envelope, FixturesReport, LinesReport,
    EXIT_INVALID, EXIT_OK, EXIT_RESOURCE,
};
use mtc_core::descent::{OrbitDecomposition, SearchCertificate};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let argv = std::iter::once("mtc").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    assert!(!out.is_empty(), "no output, stderr: {err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], "1");
    (code, v["report"].clone())
}

/// Parses the envelope into `T` and checks that writing it back gives the
/// same JSON.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let env: Envelope<T> = serde_json::from_str(text).unwrap();
    let again = serde_json::to_string_pretty(&env).unwrap() + "\n";
    assert_eq!(again, text);
    let back: Envelope<T> = serde_json::from_str(&again).unwrap();
    assert_eq!(back, env);
    env.report
}

#[test]
fn analyze_finds_the_point_and_the_verdict() {
    let (code, out, _) = run(&["analyze", "--k", "3019,5,5,5"]);
    assert_eq!(code, EXIT_OK);
    let r: AnalysisReport = round_trip(&out);
    assert_eq!(r.brauer.unwrap().kind.to_string(), "ObstructionToSAOnly");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["search"]["kind"], "point-found");
    assert_eq!(v["report"]["search"]["point"], serde_json::json!([24, 409, 672]));
    assert!(r.timings.is_none());
    assert!(r.local.unwrap().is_locally_solvable());
}

#[test]
fn search_certifies_emptiness() {
    let (code, out, _) = run(&["search", "--k", "127,5,725,1445"]);
    assert_eq!(code, EXIT_OK);
    let cert: SearchCertificate = round_trip(&out);
    assert!(cert.is_empty_certified());
    assert_eq!((cert.constants_used.c1, cert.constants_used.c), (48, 24));
}

#[test]
fn cohomology_of_x_is_z2() {
    let (code, out, _) = run(&["cohomology", "--module", "X"]);
    assert_eq!(code, EXIT_OK);
    let r: CohomologyReport = round_trip(&out);
    assert_eq!(r.invariant_factors, vec![2]);
    let (_, out, _) = run(&["cohomology", "--module", "u"]);
    let r: CohomologyReport = round_trip(&out);
    assert_eq!(r.invariant_factors, vec![2]);
    let (_, v) = report(&["cohomology", "--subgroup", "4"]);
    assert_eq!(v["invariant_factors"], serde_json::json!([]));
    let (_, v) = report(&["cohomology", "--subgroup", "2,3,4"]);
    assert_eq!(v["fixed_lattice"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_2() {
    let bin = env!("CARGO_BIN_EXE_mtc");
    let out = Command::new(bin).args(["lines", "--k", "1,2,3,4", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());
    let out = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INVALID));

    assert_eq!(run(&["search", "--k", "1,2,3"]).0, EXIT_INVALID);
    assert_eq!(run(&["search", "--k", "1,x,3,4"]).0, EXIT_INVALID);
    assert_eq!(run(&["density", "--predicate", "nope"]).0, EXIT_INVALID);
    // k2 = 2 makes the surface singular
    let (code, out, err) = run(&["search", "--k", "5,2,7,9"]);
    assert_eq!(code, EXIT_INVALID, "{err}");
    assert!(out.is_empty() && err.starts_with("error:"));
    let out = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["analyze", "--k", "127,5,5,5", "--stages", "surface,assumptions,search"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, EXIT_OK);
    assert_eq!(a.1, b.1);
    let r: AnalysisReport = round_trip(&a.1);
    assert!(r.local.is_none() && r.brauer.is_none());
    assert!(r.search.unwrap().is_empty_certified());
    let a = run(&["density", "--cutoff", "2000", "--scan", "400"]);
    let b = run(&["density", "--cutoff", "2000", "--scan", "400"]);
    assert_eq!(a.1, b.1);
}

#[test]
fn timings_are_opt_in() {
    let (_, v) = report(&["analyze", "--k", "127,5,725,1445", "--stages", "surface,assumptions", "--timings"]);
    let t = v["timings"].as_object().unwrap();
    assert!(t.contains_key("surface") && t.contains_key("assumptions"));
    assert!(v["assumptions"]["a"]["holds"].is_boolean());
}

#[test]
fn json_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lines.json");
    let (code, out, _) = run(&["lines", "--k", "127,5,725,1445", "--json", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let r: LinesReport = round_trip(&text);
    assert_eq!(r.lines.len(), 27);
    assert!(r.lines.iter().all(|l| l.on_surface));
}

#[test]
fn config_file_sets_caps_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mtc.toml");
    std::fs::write(&cfg, "[density]\ncutoff = 1000\nmax_candidates = 10\n\n[search]\nc1 = 60\n").unwrap();
    let c = cfg.to_str().unwrap();

    let (code, v) = report(&["--config", c, "density"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["density"]["cutoff"], 1000);
    let (_, v) = report(&["--config", c, "density", "--cutoff", "500"]);
    assert_eq!(v["density"]["cutoff"], 500);

    // 81 candidates exceed the configured budget of 10
    let (code, out, err) = run(&["--config", c, "density", "--scan", "200"]);
    assert_eq!(code, EXIT_RESOURCE, "{err}");
    assert!(out.is_empty());
    let (code, v) = report(&["--config", c, "density", "--scan", "200", "--samples", "50", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["scan"]["mode"], "sampled");

    let (_, v) = report(&["--config", c, "search", "--k", "127,5,5,5"]);
    assert_eq!(v["constants_used"]["c1"], 60);
    let (_, v) = report(&["--config", c, "search", "--k", "127,5,5,5", "--c1", "50"]);
    assert_eq!(v["constants_used"]["c1"], 50);

    std::fs::write(&cfg, "[density]\ncutof = 1000\n").unwrap();
    let (code, _, err) = run(&["--config", c, "density"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("cutof"), "{err}");
}

#[test]
fn density_scan_streams_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.jsonl");
    let (code, out, _) = run(&["density", "--cutoff", "1000", "--scan", "200", "--rows", rows.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let r: DensityCommandReport = round_trip(&out);
    let scan = r.scan.unwrap();
    assert_eq!(scan.candidates, 81);
    let lines: Vec<Value> = std::fs::read_to_string(&rows)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 81);
    assert!(lines.iter().all(|l| l["k"].as_array().unwrap().len() == 4 && l["passes"].is_boolean()));
    assert!(r.comparison.is_some());
    assert!(r.density.final_interval.lower < r.density.final_interval.upper);

    let (code, v) = report(&["density", "--cutoff", "1000", "--p0", "11"]);
    assert_eq!(code, EXIT_OK);
    assert!(v["density"]["setup"].as_str().unwrap().contains("11"));
}

#[test]
fn orbit_partitions_the_points() {
    let (code, out, _) = run(&["orbit", "--k", "3019,5,5,5", "--p", "7"]);
    assert_eq!(code, EXIT_OK);
    let o: OrbitDecomposition = round_trip(&out);
    assert_eq!(o.orbits.iter().map(|x| x.size).sum::<usize>(), o.total);
    assert_eq!(run(&["orbit", "--k", "3019,5,5,5", "--p", "1009"]).0, EXIT_RESOURCE);
}

#[test]
fn local_and_brauer_commands() {
    let (code, v) = report(&["local", "--k", "135775,13663,14405,31829", "--prime-bound", "20"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["prime_bound"], 20);
    let (code, v) = report(&["brauer", "--k", "135775,13663,14405,31829", "--place", "11"]);
    assert_eq!(code, EXIT_OK);
    let attained: Vec<Value> = v["attainable"].as_array().unwrap().clone();
    assert_eq!(attained, vec![serde_json::json!(["0"]), serde_json::json!(["1/2"])]);
}

#[test]
fn fixtures_list_filter_and_run() {
    let (code, out, _) = run(&["fixtures"]);
    assert_eq!(code, EXIT_OK);
    let r: FixturesReport = round_trip(&out);
    assert!(r.results.is_none());
    assert_eq!(r.fixtures.len(), mtc_core::fixtures::corpus().len());

    let (code, out, _) = run(&["fixtures", "--run", "--filter", "cohomology"]);
    assert_eq!(code, EXIT_OK);
    let r: FixturesReport = round_trip(&out);
    let results = r.results.unwrap();
    assert_eq!(results.len(), 1);
    assert!(results[0].passed);

    // the criterion-12 scan fails, so the command must too
    let (code, _) = report(&["fixtures", "--run", "--filter", "density-scan"]);
    assert_ne!(code, EXIT_OK);
}
