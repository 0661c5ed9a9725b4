//! Command-line front end: state generation, concurrence reports, validation
//! runs, region and ladder sweeps, and simulated measurements.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::{rank3_max_state, rank4_max_state, rank4_region, write_region_csv};
use crate::concurrence::concurrence_oracle;
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_projection2, estimate_pure, estimate_rank2_degenerate, estimate_rank2_sep2, ladder_from_correlation,
    ladder_state, xstate_concurrence, xstate_concurrence_invariant, Rank2Degenerate, XState,
};
use crate::invariants::{invariant_vector, InvariantVector};
use crate::linalg::{self, Matrix4c, Pauli};
use crate::measurement::{
    exact_record, expectation, lambda_from_szpz, sample_batch, Clamped, MeasurementRecord, MixtureWeights,
    Observable,
};
use crate::par::{self, Execution};
use crate::qstate::{
    bloch_file, decompose, named, random_rank_k, rank_of, DensityOperator, PureState, Provenance, StateFile,
    DEFAULT_RANK_TOL, STATE_TOL,
};
use crate::validate::{self, Suite, ValidationConfig, TOOL, VERSION};

/// Exit code for a validation run with at least one failing suite.
pub const EXIT_VALIDATION_FAILED: i32 = 2;
/// Exit code for bad arguments or unreadable input.
pub const EXIT_BAD_INPUT: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "concurrence", version, about = "Two-qubit concurrence from the oracle and from few observables")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample count (validation) overriding the per-suite defaults.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Tolerance: validation threshold override, or the rank/family detection tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Run parallel sections sequentially.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random or named state as JSON.
    Gen(GenArgs),
    /// Oracle concurrence, invariants and every applicable estimator for a state file.
    Concurrence {
        input: PathBuf,
    },
    /// Run Monte-Carlo validation suites against the oracle.
    Validate {
        /// Suite to run (repeatable); all suites when omitted.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Entangled/separable/infeasible classification of the (λ₁, λ₂) grid.
    Region {
        #[arg(long, default_value_t = validate::REGION_GRID)]
        grid: usize,
    },
    /// Rung-state sweep: λ, concurrence, ⟨s_z p_z⟩ and the |00⟩ weight.
    Ladder {
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Exact or shot-sampled Pauli-product expectations for a state file.
    Measure {
        input: PathBuf,
        /// Observable such as `zz`, `x0` or `0y` (repeatable); all 15 when omitted.
        #[arg(long = "obs")]
        observables: Vec<String>,
        /// Shots per observable; exact expectations when omitted.
        #[arg(long)]
        shots: Option<u64>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(false)))]
pub struct GenArgs {
    /// Random state of this rank (1-4).
    #[arg(long, group = "source")]
    pub rank: Option<usize>,
    /// bell-phi+, bell-phi-, bell-psi+, bell-psi-, werner:p, ladder:λ,
    /// xstate:u+,u-,w1,w2,|z|[,phase], rank3-max:λ, rank4-max:λ1,λ2.
    #[arg(long, group = "source")]
    pub named: Option<String>,
    /// Write the Bloch (P, S, Π) form instead of the matrix.
    #[arg(long)]
    pub bloch: bool,
}

/// Parses and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_BAD_INPUT
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    par::with_threads(g.threads, || match &cli.command {
        Command::Gen(args) => cmd_gen(g, args),
        Command::Concurrence { input } => cmd_concurrence(g, input),
        Command::Validate { suites } => cmd_validate(g, suites),
        Command::Region { grid } => cmd_region(g, *grid),
        Command::Ladder { steps } => cmd_ladder(g, *steps),
        Command::Measure { input, observables, shots } => cmd_measure(g, input, observables, *shots),
    })
}

fn execution(g: &GlobalArgs) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn emit(g: &GlobalArgs, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn reject_csv(g: &GlobalArgs, what: &str) -> Result<()> {
    if g.format == Some(Format::Csv) {
        return Err(Error::BadArgs(format!("{what} output is JSON only")));
    }
    Ok(())
}

fn provenance(seed: Option<u64>, tolerance: Option<f64>, source: String) -> Provenance {
    Provenance { tool: TOOL.into(), version: VERSION.into(), seed, tolerance, source }
}

fn csv_header_comment(seed: u64, tolerance: Option<f64>) -> String {
    match tolerance {
        Some(t) => format!("# tool={TOOL} version={VERSION} seed={seed} tolerance={t:e}\n"),
        None => format!("# tool={TOOL} version={VERSION} seed={seed}\n"),
    }
}

fn parse_numbers(spec: &str, what: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::BadArgs(format!("{what}: '{x}' is not a number")))
        })
        .collect()
}

fn expect_count(values: &[f64], counts: &[usize], what: &str) -> Result<()> {
    if counts.contains(&values.len()) {
        Ok(())
    } else {
        Err(Error::BadArgs(format!("{what} expects {counts:?} numbers, got {}", values.len())))
    }
}

/// Builds a state from the named-state registry.
pub fn named_state(name: &str) -> Result<DensityOperator> {
    let name = name.replace('\u{2212}', "-");
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name.as_str(), None),
    };
    let need = |what: &str| arg.ok_or_else(|| Error::BadArgs(format!("{what} needs parameters after ':'")));
    match head {
        "bell-phi+" => Ok(DensityOperator::from_pure(&named::bell_phi_plus())),
        "bell-phi-" => Ok(DensityOperator::from_pure(&named::bell_phi_minus())),
        "bell-psi+" => Ok(DensityOperator::from_pure(&named::bell_psi_plus())),
        "bell-psi-" => Ok(DensityOperator::from_pure(&named::bell_psi_minus())),
        "werner" => {
            let v = parse_numbers(need("werner")?, "werner")?;
            expect_count(&v, &[1], "werner")?;
            named::werner(v[0])
        }
        "ladder" => {
            let v = parse_numbers(need("ladder")?, "ladder")?;
            expect_count(&v, &[1], "ladder")?;
            Ok(ladder_state(v[0])?.assemble())
        }
        "xstate" => {
            let v = parse_numbers(need("xstate")?, "xstate")?;
            expect_count(&v, &[5, 6], "xstate")?;
            let z = Complex64::from_polar(v[4], v.get(5).copied().unwrap_or(0.0));
            Ok(XState::new(v[0], v[1], v[2], v[3], z)?.assemble())
        }
        "rank3-max" => {
            let v = parse_numbers(need("rank3-max")?, "rank3-max")?;
            expect_count(&v, &[1], "rank3-max")?;
            if !(0.0..=1.0).contains(&v[0]) {
                return Err(Error::BadArgs(format!("rank3-max weight {} outside [0, 1]", v[0])));
            }
            Ok(rank3_max_state(v[0], FRAC_1_SQRT_2, FRAC_1_SQRT_2))
        }
        "rank4-max" => {
            let v = parse_numbers(need("rank4-max")?, "rank4-max")?;
            expect_count(&v, &[2], "rank4-max")?;
            rank4_max_state(v[0], v[1])
        }
        other => Err(Error::BadArgs(format!(
            "unknown named state '{other}' (try bell-phi+, bell-psi-, werner:0.5, ladder:0.5, \
             xstate:0.15,0.15,0.35,0.35,0.25, rank3-max:0.6, rank4-max:0.2,0.3)"
        ))),
    }
}

fn cmd_gen(g: &GlobalArgs, args: &GenArgs) -> Result<i32> {
    reject_csv(g, "gen")?;
    let (rho, seed, source) = match (&args.rank, &args.named) {
        (Some(k), None) => (random_rank_k(*k, g.seed)?, Some(g.seed), format!("random rank {k}")),
        (None, Some(name)) => (named_state(name)?, None, format!("named {name}")),
        _ => return Err(Error::BadArgs("give exactly one of --rank or --named".into())),
    };
    // Re-validate: named constructors skip the checks.
    let rho = DensityOperator::new(rho.into_matrix())?;
    let file = if args.bloch { bloch_file(&rho) } else { StateFile::new(&rho) };
    let file = file.with_provenance(provenance(seed, Some(STATE_TOL), source));
    emit(g, file.to_json()?.as_bytes())?;
    let rank = rank_of(&rho, g.tol.unwrap_or(DEFAULT_RANK_TOL));
    let summary = format!("rank {rank} purity {:.12}", rho.purity());
    if g.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl EstimatorEntry {
    fn value(name: &str, value: f64, oracle: f64) -> Self {
        Self::from_result::<Error>(name, Ok(value), oracle)
    }

    fn from_result<E: std::fmt::Display>(name: &str, value: std::result::Result<f64, E>, oracle: f64) -> Self {
        match value {
            Ok(v) => Self { name: name.into(), value: Some(v), deviation: Some((v - oracle).abs()), error: None },
            Err(e) => Self { name: name.into(), value: None, deviation: None, error: Some(e.to_string()) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcurrenceReport {
    pub tool: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub rank: usize,
    pub purity: f64,
    pub oracle: f64,
    pub lambdas: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants_error: Option<String>,
    pub estimators: Vec<EstimatorEntry>,
}

/// λ|00⟩⟨00| + (1−λ)|ψ⟩⟨ψ| with ψ ⟂ |00⟩, if ρ has that form. Also returns
/// ψ itself (up to a global phase); the family parameters keep only moduli.
fn as_degenerate_rank2(m: &Matrix4c, tol: f64) -> Option<(Rank2Degenerate, PureState)> {
    if (1..4).any(|k| m[(0, k)].norm() > tol) {
        return None;
    }
    let lambda = m[(0, 0)].re.clamp(0.0, 1.0);
    let k = (1..4).max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))?;
    let pivot = m[(k, k)].re;
    if pivot <= tol {
        let s = Rank2Degenerate::new(lambda, 1.0, 0.0, Complex64::new(0.0, 0.0)).ok()?;
        return Some((s, PureState::basis(1)));
    }
    let v: Vec<Complex64> = (1..4).map(|r| m[(r, k)] / pivot.sqrt()).collect();
    for r in 1..4 {
        for c in 1..4 {
            if (m[(r, c)] - v[r - 1] * v[c - 1].conj()).norm() > tol {
                return None;
            }
        }
    }
    let psi = PureState::normalized([0.0.into(), v[0], v[1], v[2]]).ok()?;
    let a = psi.amplitudes();
    let (r1, c) = (a[1].norm(), Complex64::new(a[2].norm(), 0.0));
    let r2 = (1.0 - r1 * r1 - c.norm_sqr()).max(0.0).sqrt();
    Some((Rank2Degenerate::new(lambda, r1, r2, c).ok()?, psi))
}

/// X-state with the |01⟩/|10⟩ coherence, or with the |00⟩/|11⟩ coherence
/// after a bit flip on qubit B (which leaves the concurrence unchanged).
fn as_xstate(m: &Matrix4c, tol: f64) -> Option<XState> {
    as_xstate_direct(m, tol).or_else(|| {
        let flip = linalg::pauli_product(Pauli::I, Pauli::X);
        as_xstate_direct(&(flip * m * flip), tol)
    })
}

fn as_xstate_direct(m: &Matrix4c, tol: f64) -> Option<XState> {
    let outside = [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)];
    if outside.iter().any(|&(r, c)| m[(r, c)].norm() > tol) {
        return None;
    }
    let d = |k: usize| m[(k, k)].re.max(0.0);
    let total = d(0) + d(1) + d(2) + d(3);
    let (u_plus, u_minus, w1, w2) = (d(0) / total, d(3) / total, d(1) / total, d(2) / total);
    let mut z = m[(1, 2)] / total;
    let cap = (w1 * w2).sqrt();
    if z.norm() > cap {
        z = z / z.norm() * cap;
    }
    XState::new(u_plus, u_minus, w1, w2, z).ok()
}

/// Every estimator whose family matches `rho`, with its deviation from `oracle`.
pub fn family_estimates(rho: &DensityOperator, oracle: f64, tol: f64) -> Vec<EstimatorEntry> {
    let bloch = decompose(rho);
    let inv = invariant_vector(&bloch).map_err(|e| e.to_string());
    let rank = rank_of(rho, tol);
    let m = rho.matrix();
    let mut out = Vec::new();
    if rank == 1 {
        out.push(EstimatorEntry::from_result("pure", estimate_pure(&bloch), oracle));
    }
    if let Some((s, psi)) = as_degenerate_rank2(m, tol) {
        out.push(EstimatorEntry::value("degenerate-rank2", estimate_rank2_degenerate(&s), oracle));
        if (s.lambda - 0.5).abs() <= tol {
            let v = inv.clone().and_then(|i| estimate_projection2(&i).map_err(|e| e.to_string()));
            out.push(EstimatorEntry::from_result("two-dim-projection", v, oracle));
        }
        let singlet = PureState::from_raw([
            0.0.into(),
            FRAC_1_SQRT_2.into(),
            (-FRAC_1_SQRT_2).into(),
            0.0.into(),
        ]);
        if (1.0 - singlet.inner(&psi).norm()).abs() <= tol {
            out.push(EstimatorEntry::value("ladder-one-minus-rho11", 1.0 - rho.population(0), oracle));
            let szpz = expectation(rho, Observable::ZZ);
            out.push(EstimatorEntry::value("ladder-from-szpz", ladder_from_correlation(szpz), oracle));
        }
    }
    if let Some(x) = as_xstate(m, tol) {
        out.push(EstimatorEntry::value("xstate-direct", xstate_concurrence(&x), oracle));
        let v = inv.clone().and_then(|i| xstate_concurrence_invariant(&i).map_err(|e| e.to_string()));
        out.push(EstimatorEntry::from_result("xstate-invariant", v, oracle));
    }
    if rank == 2 {
        let v = inv.map(|i| estimate_rank2_sep2(&i));
        out.push(EstimatorEntry::from_result("rank2-separable-decomposition", v, oracle));
    }
    out
}

pub fn concurrence_report(rho: &DensityOperator, tol: f64, seed: Option<u64>) -> Result<ConcurrenceReport> {
    let diag = concurrence_oracle(rho)?;
    let (invariants, invariants_error) = match invariant_vector(&decompose(rho)) {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(ConcurrenceReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        seed,
        tolerance: tol,
        rank: rank_of(rho, tol),
        purity: rho.purity(),
        oracle: diag.value,
        lambdas: diag.lambdas,
        invariants,
        invariants_error,
        estimators: family_estimates(rho, diag.value, tol),
    })
}

fn read_state(path: &Path) -> Result<(DensityOperator, Option<u64>)> {
    let file = StateFile::read(path).map_err(|e| match e {
        Error::Io(io) => Error::BadArgs(format!("cannot read {}: {io}", path.display())),
        other => other,
    })?;
    let seed = file.provenance.as_ref().and_then(|p| p.seed);
    Ok((file.to_density()?, seed))
}

fn cmd_concurrence(g: &GlobalArgs, input: &Path) -> Result<i32> {
    let (rho, seed) = read_state(input)?;
    let report = concurrence_report(&rho, g.tol.unwrap_or(DEFAULT_RANK_TOL), seed)?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => emit(g, &json_bytes(&report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "value", "deviation"])?;
            let mut row = |k: &str, v: String, d: String| w.write_record([k, &v, &d]);
            row("tool", report.tool.clone(), String::new())?;
            row("version", report.version.clone(), String::new())?;
            if let Some(s) = report.seed {
                row("seed", s.to_string(), String::new())?;
            }
            row("tolerance", report.tolerance.to_string(), String::new())?;
            row("rank", report.rank.to_string(), String::new())?;
            row("purity", report.purity.to_string(), String::new())?;
            row("oracle", report.oracle.to_string(), String::new())?;
            for (i, l) in report.lambdas.iter().enumerate() {
                row(&format!("lambda{}", i + 1), l.to_string(), String::new())?;
            }
            if let Some(inv) = &report.invariants {
                for (i, v) in inv.as_array().iter().enumerate() {
                    row(&format!("I{}", i + 1), v.to_string(), String::new())?;
                }
            }
            for e in &report.estimators {
                let value = e.value.map(|v| v.to_string()).or(e.error.clone()).unwrap_or_default();
                row(&e.name, value, e.deviation.map(|d| d.to_string()).unwrap_or_default())?;
            }
            let bytes = w.into_inner().map_err(|e| Error::BadArgs(e.to_string()))?;
            emit(g, &bytes)?;
        }
    }
    Ok(0)
}

fn cmd_validate(g: &GlobalArgs, names: &[String]) -> Result<i32> {
    let suites: Vec<Suite> = if names.is_empty() {
        Suite::ALL.to_vec()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_>>()?
    };
    if g.samples == Some(0) {
        return Err(Error::BadArgs("--samples must be at least 1".into()));
    }
    let config = ValidationConfig { seed: g.seed, samples: g.samples, tolerance: g.tol, execution: execution(g) };
    let report = validate::run(&suites, &config);
    match g.format.unwrap_or(Format::Json) {
        Format::Json => emit(g, &json_bytes(&report)?)?,
        Format::Csv => {
            let mut bytes = csv_header_comment(g.seed, g.tol).into_bytes();
            validate::write_checks_csv(&report, &mut bytes)?;
            emit(g, &bytes)?;
        }
    }
    for s in &report.suites {
        let verdict = if s.passed { "PASS" } else { "FAIL" };
        let worst = s.checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
        eprintln!("{verdict} {:<18} samples={:<6} max_deviation={worst:.3e}", s.suite.name(), s.samples);
    }
    Ok(if report.passed { 0 } else { EXIT_VALIDATION_FAILED })
}

fn cmd_region(g: &GlobalArgs, grid: usize) -> Result<i32> {
    let cells = rank4_region(grid, execution(g))?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut bytes = csv_header_comment(g.seed, None).into_bytes();
            write_region_csv(&cells, &mut bytes)?;
            emit(g, &bytes)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct RegionReport<'a> {
                tool: &'a str,
                version: &'a str,
                seed: u64,
                grid: usize,
                cells: &'a [crate::bounds::RegionCell],
            }
            let report = RegionReport { tool: TOOL, version: VERSION, seed: g.seed, grid, cells: &cells };
            emit(g, &json_bytes(&report)?)?;
        }
    }
    Ok(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderRow {
    pub lambda: f64,
    pub concurrence: f64,
    pub szpz: f64,
    pub rho11: f64,
}

pub fn ladder_sweep(steps: usize, exec: Execution) -> Result<Vec<LadderRow>> {
    if steps < 2 {
        return Err(Error::BadArgs(format!("ladder needs at least 2 steps, got {steps}")));
    }
    par::map_indexed(steps, exec, |i| {
        let lambda = i as f64 / (steps - 1) as f64;
        let rho = ladder_state(lambda)?.assemble();
        Ok(LadderRow {
            lambda,
            concurrence: concurrence_oracle(&rho)?.value,
            szpz: expectation(&rho, Observable::ZZ),
            rho11: rho.population(0),
        })
    })
    .into_iter()
    .collect()
}

fn cmd_ladder(g: &GlobalArgs, steps: usize) -> Result<i32> {
    let rows = ladder_sweep(steps, execution(g))?;
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut bytes = csv_header_comment(g.seed, None).into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut bytes);
                for r in &rows {
                    w.serialize(r)?;
                }
                w.flush()?;
            }
            emit(g, &bytes)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct LadderReport<'a> {
                tool: &'a str,
                version: &'a str,
                seed: u64,
                rows: &'a [LadderRow],
            }
            emit(g, &json_bytes(&LadderReport { tool: TOOL, version: VERSION, seed: g.seed, rows: &rows })?)?;
        }
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inversions {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_from_szpz: Option<Clamped>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights_from_sxpx_szpz: Option<MixtureWeights>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    pub records: Vec<MeasurementRecord>,
    pub inversions: Inversions,
}

fn cmd_measure(g: &GlobalArgs, input: &Path, names: &[String], shots: Option<u64>) -> Result<i32> {
    let (rho, _) = read_state(input)?;
    let observables: Vec<Observable> = if names.is_empty() {
        Observable::nontrivial()
    } else {
        names.iter().map(|n| n.parse()).collect::<Result<_>>()?
    };
    let records = match shots {
        Some(n) => sample_batch(&rho, &observables, n, g.seed, execution(g))?,
        None => observables.iter().map(|&o| exact_record(&rho, o)).collect(),
    };
    let find = |o: Observable| records.iter().find(|r| r.obs == o).map(|r| r.expectation);
    let inversions = Inversions {
        lambda_from_szpz: find(Observable::ZZ).map(lambda_from_szpz),
        weights_from_sxpx_szpz: find(Observable::XX).zip(find(Observable::ZZ)).map(|(x, z)| MixtureWeights::solve(x, z)),
    };
    match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            let report = MeasurementReport { tool: TOOL.into(), version: VERSION.into(), seed: g.seed, shots, records, inversions };
            emit(g, &json_bytes(&report)?)?;
        }
        Format::Csv => {
            let mut bytes = csv_header_comment(g.seed, None).into_bytes();
            {
                let mut w = csv::Writer::from_writer(&mut bytes);
                w.write_record(["obs", "expectation", "shots", "std_error"])?;
                for r in &records {
                    w.write_record([
                        r.obs.to_string(),
                        r.expectation.to_string(),
                        r.shots.map(|s| s.to_string()).unwrap_or_default(),
                        r.std_error.map(|s| s.to_string()).unwrap_or_default(),
                    ])?;
                }
                w.flush()?;
            }
            emit(g, &bytes)?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn report(name: &str) -> ConcurrenceReport {
        concurrence_report(&named_state(name).unwrap(), DEFAULT_RANK_TOL, None).unwrap()
    }

    fn entry<'a>(r: &'a ConcurrenceReport, name: &str) -> &'a EstimatorEntry {
        r.estimators.iter().find(|e| e.name == name).unwrap_or_else(|| panic!("{name} missing: {:?}", r.estimators))
    }

    #[test]
    fn named_registry() {
        for name in ["bell-phi+", "bell-phi-", "bell-psi+", "bell-psi-", "bell-psi\u{2212}"] {
            assert_abs_diff_eq!(concurrence_oracle(&named_state(name).unwrap()).unwrap().value, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(concurrence_oracle(&named_state("werner:0.5").unwrap()).unwrap().value, 0.25, epsilon = 1e-12);
        assert!(named_state("werner").is_err());
        assert!(named_state("werner:abc").is_err());
        assert!(named_state("werner:1.5").is_err());
        assert!(named_state("xstate:0.1,0.1,0.35,0.35,0.25").is_err());
        assert!(named_state("rank4-max:0.7,0.4").is_err());
        assert!(named_state("bogus").is_err());
    }

    #[test]
    fn bell_report() {
        let r = report("bell-phi+");
        assert_eq!(r.rank, 1);
        assert_abs_diff_eq!(r.oracle, 1.0, epsilon = 1e-12);
        let pure = entry(&r, "pure");
        assert_abs_diff_eq!(pure.value.unwrap(), 1.0, epsilon = 1e-12);
        assert!(pure.deviation.unwrap() < 1e-12);
    }

    #[test]
    fn ladder_report() {
        let r = report("ladder:0.5");
        assert_abs_diff_eq!(r.oracle, 0.5, epsilon = 1e-12);
        for name in ["two-dim-projection", "ladder-one-minus-rho11", "degenerate-rank2", "ladder-from-szpz"] {
            assert_abs_diff_eq!(entry(&r, name).value.unwrap(), 0.5, epsilon = 1e-8);
        }
    }

    #[test]
    fn xstate_report_is_three_way() {
        let r = report("xstate:0,0.3,0.35,0.35,0.2");
        assert_abs_diff_eq!(entry(&r, "xstate-direct").value.unwrap(), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(r.oracle, 0.4, epsilon = 1e-12);
        assert!(entry(&r, "xstate-invariant").error.is_some());
    }

    #[test]
    fn werner_is_detected_as_flipped_xstate() {
        let r = report("werner:0.5");
        assert_abs_diff_eq!(entry(&r, "xstate-direct").value.unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn ladder_sweep_endpoints() {
        let rows = ladder_sweep(11, Execution::Sequential).unwrap();
        assert_abs_diff_eq!(rows[0].concurrence, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[10].concurrence, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[10].szpz, 1.0, epsilon = 1e-12);
        assert!(ladder_sweep(1, Execution::Sequential).is_err());
    }

    #[test]
    fn parse_errors_exit_one() {
        assert_eq!(main_with_args(["concurrence", "gen"]), EXIT_BAD_INPUT);
        assert_eq!(main_with_args(["concurrence", "frobnicate"]), EXIT_BAD_INPUT);
        assert_eq!(main_with_args(["concurrence", "--version"]), 0);
    }
}
