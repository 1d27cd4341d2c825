//! The `mtc` command line: argument parsing, configuration, report
//! envelopes and exit codes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use mtc_core::brauer::{algebra_generators, bm_verdict, invariant_profile, BMVerdict, Place, ProfileConfig, VerdictKind};
use mtc_core::density::{
    compare_scan, euler_product, scan_admissible_with, DensityReport, DensitySetup, Predicate, ScanComparison, ScanConfig,
    ScanReport, DEFAULT_CUTOFF,
};
use mtc_core::descent::{orbit_mod_p_with, search_integral_points_with, SearchCertificate, SearchConfig, SearchKind};
use mtc_core::fixtures;
use mtc_core::local::{local_report, LocalSolubilityReport};
use mtc_core::picard::{fixed_lattice, h1, picard_u_module, picard_x_module, FiniteAbelianGroup};
use mtc_core::surface::{
    assumption_33, assumption_a, assumption_b, lines_of_x, verify_on_surface, AssumptionReport, ParamVector, SurfaceSpec,
};
use mtc_core::Error;

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mtc", version, about = "Integral points and Brauer-Manin obstructions on Markoff-type cubic surfaces")]
pub struct Cli {
    /// TOML file with caps and constants; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_k(s: &str) -> Result<ParamVector, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated integers, got {s:?}"));
    }
    let mut k = [0i64; 4];
    for (slot, p) in k.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("bad integer {p:?}"))?;
    }
    Ok(ParamVector(k))
}

/// Generators `σ_i` of a subgroup of the Galois group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup(pub Vec<usize>);

fn parse_subgroup(s: &str) -> Result<Subgroup, String> {
    let gens: Vec<usize> = s
        .split(',')
        .map(|g| g.trim().trim_start_matches('s').trim_start_matches('σ').parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("bad subgroup {s:?}"))?;
    if gens.is_empty() || gens.iter().any(|g| !(1..=4).contains(g)) {
        return Err(format!("generators are 1 to 4, got {s:?}"));
    }
    Ok(Subgroup(gens))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Surface,
    Assumptions,
    Local,
    Brauer,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModuleName {
    X,
    U,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the pipeline stages on one surface.
    Analyze {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
        #[arg(long, value_enum, value_delimiter = ',')]
        stages: Option<Vec<Stage>>,
        /// Include wall-clock timings (the report is then not byte-stable).
        #[arg(long)]
        timings: bool,
    },
    /// Search the fundamental box for integral points.
    Search {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
        #[arg(long)]
        c1: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long)]
        collect_all: bool,
        #[arg(long)]
        max_pairs: Option<u128>,
    },
    /// Local solubility at every place.
    Local {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
        #[arg(long)]
        prime_bound: Option<u64>,
    },
    /// Brauer-Manin verdict, or the invariant profile at one place.
    Brauer {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
        #[arg(long)]
        place: Option<Place>,
    },
    /// The 27 lines, checked on the surface.
    Lines {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
    },
    /// H¹ of a Picard lattice and its fixed sublattice.
    Cohomology {
        #[arg(long, value_enum, default_value = "x", ignore_case = true)]
        module: ModuleName,
        /// Generators, e.g. `2,3,4`.
        #[arg(long, value_parser = parse_subgroup)]
        subgroup: Option<Subgroup>,
    },
    /// Density interval, optionally compared with a box scan.
    Density {
        #[arg(long)]
        cutoff: Option<u64>,
        /// Scan the box `|k_i| ≤ M`.
        #[arg(long, value_name = "M")]
        scan: Option<u64>,
        #[arg(long)]
        p0: Option<u64>,
        #[arg(long)]
        predicate: Option<Predicate>,
        /// Sample this many candidates instead of a full scan.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Stream one JSON row per candidate to this file.
        #[arg(long)]
        rows: Option<PathBuf>,
        #[arg(long)]
        slack: Option<f64>,
    },
    /// Orbits of the Vieta involutions on the points mod p.
    Orbit {
        #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
        k: ParamVector,
        #[arg(long)]
        p: u64,
    },
    /// List the regression fixtures, or run them.
    Fixtures {
        #[arg(long)]
        run: bool,
        /// Only fixtures whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub search: SearchSection,
    #[serde(default)]
    pub local: LocalSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default)]
    pub orbit: OrbitSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub c1: Option<u64>,
    pub c: Option<u64>,
    pub max_pairs: Option<u64>,
    pub collect_all: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSection {
    pub prime_bound: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub cutoff: Option<u64>,
    pub slack: Option<f64>,
    pub seed: Option<u64>,
    pub max_candidates: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub max_p: Option<u64>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: String,
    pub command: String,
    pub report: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumptions {
    pub a: AssumptionReport,
    /// Condition at 11, the prime used throughout the worked examples.
    pub b_at_11: Option<AssumptionReport>,
    pub non_squareness: Option<AssumptionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub surface: SurfaceSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<Assumptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalSolubilityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brauer: Option<BMVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchCertificate>,
    /// Seconds per stage, only with `--timings`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn has_undecided(&self) -> bool {
        self.local.as_ref().is_some_and(|l| !l.undecided.is_empty())
            || self.brauer.as_ref().is_some_and(|b| b.kind == VerdictKind::Undecided)
            || self.search.as_ref().is_some_and(|s| matches!(s.kind, SearchKind::Inconclusive { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineReport {
    pub label: String,
    /// Two linear forms on `(x, y, z, t)` with coefficients in the tower.
    pub forms: Vec<Vec<String>>,
    pub on_surface: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinesReport {
    pub k: ParamVector,
    pub field_degree: u32,
    pub lines: Vec<LineReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub module: String,
    pub rank: usize,
    pub subgroup: Vec<usize>,
    pub h1: FiniteAbelianGroup,
    pub invariant_factors: Vec<u64>,
    /// Basis of the fixed sublattice, one column per entry.
    pub fixed_lattice: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCommandReport {
    pub density: DensityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ScanComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixturesReport {
    pub fixtures: Vec<FixtureListing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Vec<fixtures::FixtureResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criteria: Option<Vec<fixtures::CriterionResult>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureListing {
    pub name: String,
    pub criterion: u8,
    pub summary: String,
    pub limit_secs: f64,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::Resource(_) | Error::Precision(_)) => EXIT_RESOURCE,
            Failure::Core(Error::InvalidArgument(_) | Error::UnsupportedInput(_)) => EXIT_INVALID,
            Failure::Core(_) => EXIT_FAILURE,
            Failure::Other(_) => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

/// A finished command: its enveloped JSON report and exit code.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

fn outcome<T: Serialize>(command: &str, report: &T, code: i32) -> Result<Outcome, Failure> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION.to_string(),
        command: command.to_string(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&env).context("serializing the report")?;
    text.push('\n');
    Ok(Outcome { text, code })
}

fn spec(k: ParamVector) -> Result<SurfaceSpec, Failure> {
    Ok(SurfaceSpec::new(k)?)
}

fn analyze(k: ParamVector, stages: Option<Vec<Stage>>, timings: bool, cfg: &Config) -> Result<Outcome, Failure> {
    let stages = stages.unwrap_or_else(|| vec![Stage::Surface, Stage::Assumptions, Stage::Local, Stage::Brauer, Stage::Search]);
    let has = |s: Stage| stages.contains(&s);
    let mut times = BTreeMap::new();
    let mut timed = |name: &str, start: Instant| {
        times.insert(name.to_string(), start.elapsed().as_secs_f64());
    };
    let t = Instant::now();
    let surface = spec(k)?;
    timed("surface", t);
    let mut report = AnalysisReport {
        surface: surface.clone(),
        assumptions: None,
        local: None,
        brauer: None,
        search: None,
        timings: None,
    };
    if has(Stage::Assumptions) {
        let t = Instant::now();
        report.assumptions = Some(Assumptions {
            a: assumption_a(&k),
            b_at_11: assumption_b(&k, 11).ok(),
            non_squareness: assumption_33(&k).ok(),
        });
        timed("assumptions", t);
    }
    if has(Stage::Local) {
        let t = Instant::now();
        report.local = Some(local_report(&surface, cfg.local.prime_bound.unwrap_or(50))?);
        timed("local", t);
    }
    if has(Stage::Brauer) {
        let t = Instant::now();
        report.brauer = Some(bm_verdict(&surface)?);
        timed("brauer", t);
    }
    if has(Stage::Search) {
        let t = Instant::now();
        report.search = Some(search_integral_points_with(&surface, &search_config(cfg, None, None, false, None))?);
        timed("search", t);
    }
    if timings {
        report.timings = Some(times);
    }
    let code = if report.has_undecided() { EXIT_RESOURCE } else { EXIT_OK };
    outcome("analyze", &report, code)
}

fn search_config(cfg: &Config, c1: Option<u64>, c: Option<u64>, collect_all: bool, max_pairs: Option<u128>) -> SearchConfig {
    let d = SearchConfig::default();
    SearchConfig {
        c1: c1.or(cfg.search.c1).unwrap_or(d.c1),
        c: c.or(cfg.search.c).unwrap_or(d.c),
        collect_all: collect_all || cfg.search.collect_all.unwrap_or(false),
        max_pairs: max_pairs.or(cfg.search.max_pairs.map(u128::from)).unwrap_or(d.max_pairs),
        ..d
    }
}

fn cohomology(module: ModuleName, subgroup: Option<Subgroup>) -> Result<Outcome, Failure> {
    let (name, m) = match module {
        ModuleName::X => ("X", picard_x_module()),
        ModuleName::U => ("U", picard_u_module()),
    };
    let subgroup = subgroup.map_or_else(|| vec![1, 2, 3, 4], |s| s.0);
    let group = h1(&m, &subgroup)?;
    let rows = fixed_lattice(&m, &subgroup);
    let width = rows.first().map_or(0, Vec::len);
    let fixed = (0..width)
        .map(|j| {
            rows.iter()
                .map(|r| r[j].to_i64().ok_or_else(|| Error::Arithmetic("entry overflows".into())))
                .collect()
        })
        .collect::<Result<Vec<Vec<i64>>, Error>>()?;
    let report = CohomologyReport {
        module: name.into(),
        rank: m.rank,
        subgroup,
        invariant_factors: group.invariant_factors.clone(),
        h1: group,
        fixed_lattice: fixed,
    };
    outcome("cohomology", &report, EXIT_OK)
}

fn lines(k: ParamVector) -> Result<Outcome, Failure> {
    let surface = spec(k)?;
    let ls = lines_of_x(&surface)?;
    let mut out = Vec::with_capacity(ls.len());
    for l in &ls {
        out.push(LineReport {
            label: l.label.to_string(),
            forms: l.forms.iter().map(|f| f.iter().map(|c| c.to_string()).collect()).collect(),
            on_surface: verify_on_surface(&surface, l)?,
        });
    }
    let code = if out.iter().all(|l| l.on_surface) { EXIT_OK } else { EXIT_FAILURE };
    let report = LinesReport {
        k,
        field_degree: surface.field_degree,
        lines: out,
    };
    outcome("lines", &report, code)
}

#[allow(clippy::too_many_arguments)]
fn density(
    cutoff: Option<u64>,
    scan: Option<u64>,
    p0: Option<u64>,
    predicate: Option<Predicate>,
    samples: Option<u64>,
    seed: Option<u64>,
    rows: Option<PathBuf>,
    slack: Option<f64>,
    cfg: &Config,
) -> Result<Outcome, Failure> {
    let setup = match p0 {
        Some(p) => DensitySetup::with_p0(p)?,
        None => DensitySetup::standard(),
    };
    let cutoff = cutoff.or(cfg.density.cutoff).unwrap_or(DEFAULT_CUTOFF);
    let density = euler_product(&setup, cutoff)?;
    let mut report = DensityCommandReport {
        density,
        scan: None,
        comparison: None,
    };
    if let Some(m) = scan {
        let predicate = predicate.unwrap_or(match p0 {
            Some(p0) => Predicate::AssumptionAB { p0 },
            None => Predicate::GcdStrengthened,
        });
        let d = ScanConfig::default();
        let sc = ScanConfig {
            max_candidates: cfg.density.max_candidates.unwrap_or(d.max_candidates),
            samples,
            seed: seed.or(cfg.density.seed).unwrap_or(d.seed),
        };
        let s = match rows {
            Some(path) => {
                let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                let s = scan_admissible_with(m, predicate, &sc, Some(&mut w))?;
                w.flush().with_context(|| format!("writing {}", path.display()))?;
                s
            }
            None => scan_admissible_with(m, predicate, &sc, None)?,
        };
        report.comparison = Some(compare_scan(&s, &report.density, slack.or(cfg.density.slack).unwrap_or(0.25)));
        report.scan = Some(s);
    }
    outcome("density", &report, EXIT_OK)
}

fn run_fixtures(run: bool, filter: Option<String>) -> Result<Outcome, Failure> {
    let corpus = fixtures::corpus();
    let listing = corpus
        .iter()
        .filter(|f| filter.as_deref().map_or(true, |s| f.name.contains(s)))
        .map(|f| FixtureListing {
            name: f.name.into(),
            criterion: f.criterion,
            summary: f.summary.into(),
            limit_secs: f.limit_secs,
        })
        .collect();
    let mut report = FixturesReport {
        fixtures: listing,
        results: None,
        criteria: None,
    };
    let mut code = EXIT_OK;
    if run {
        let results = fixtures::run(&corpus, filter.as_deref());
        if results.iter().any(|r| !r.passed) {
            code = EXIT_FAILURE;
        }
        report.criteria = Some(fixtures::by_criterion(&results));
        report.results = Some(results);
    }
    outcome("fixtures", &report, code)
}

pub fn execute(cli: Cli) -> Result<Outcome, Failure> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Analyze { k, stages, timings } => analyze(k, stages, timings, &cfg),
        Command::Search {
            k,
            c1,
            c,
            collect_all,
            max_pairs,
        } => {
            let cert = search_integral_points_with(&spec(k)?, &search_config(&cfg, c1, c, collect_all, max_pairs))?;
            let code = if matches!(cert.kind, SearchKind::Inconclusive { .. }) { EXIT_RESOURCE } else { EXIT_OK };
            outcome("search", &cert, code)
        }
        Command::Local { k, prime_bound } => {
            let r = local_report(&spec(k)?, prime_bound.or(cfg.local.prime_bound).unwrap_or(50))?;
            let code = if r.undecided.is_empty() { EXIT_OK } else { EXIT_RESOURCE };
            outcome("local", &r, code)
        }
        Command::Brauer { k, place } => {
            let s = spec(k)?;
            match place {
                None => {
                    let v = bm_verdict(&s)?;
                    let code = if v.kind == VerdictKind::Undecided { EXIT_RESOURCE } else { EXIT_OK };
                    outcome("brauer", &v, code)
                }
                Some(place) => {
                    let g = algebra_generators(&s);
                    let n = g.in_play().len();
                    let prof = invariant_profile(&s, g.in_play(), &g.algebras[n..], place, &ProfileConfig::default())?;
                    let code = if prof.is_complete() { EXIT_OK } else { EXIT_RESOURCE };
                    outcome("brauer", &prof, code)
                }
            }
        }
        Command::Lines { k } => lines(k),
        Command::Cohomology { module, subgroup } => cohomology(module, subgroup),
        Command::Density {
            cutoff,
            scan,
            p0,
            predicate,
            samples,
            seed,
            rows,
            slack,
        } => density(cutoff, scan, p0, predicate, samples, seed, rows, slack, &cfg),
        Command::Orbit { k, p } => {
            let o = orbit_mod_p_with(&spec(k)?, p, cfg.orbit.max_p.unwrap_or(1000))?;
            outcome("orbit", &o, EXIT_OK)
        }
        Command::Fixtures { run, filter } => run_fixtures(run, filter),
    }
}

/// Parses `args`, runs the command and writes the enveloped report to `out`
/// (or the `--json` path). Returns the process exit code.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let json_path = cli.json.clone();
    let result = execute(cli).and_then(|o| {
        match &json_path {
            Some(p) => std::fs::write(p, &o.text).with_context(|| format!("writing {}", p.display()))?,
            None => out.write_all(o.text.as_bytes()).context("writing the report")?,
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}
