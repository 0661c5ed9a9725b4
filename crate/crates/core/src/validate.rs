//! Monte-Carlo validation harness: every estimator and bound is compared
//! against the Wootters oracle on seeded random samples, and the deviation
//! statistics are collected into a serializable report.
//!
//! Sample `i` of suite `s` draws from stream `(s << 40) | i` of a ChaCha8
//! generator seeded with the run seed, so reports are identical across
//! thread counts and execution modes.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    rank3_bound, rank3_max_state, rank4_bound, rank4_max_concurrence, rank4_max_state, rank4_region,
    region_boundary, RegionClass, Rank3Mixture, Rank4Mixture,
};
use crate::concurrence::concurrence_oracle;
use crate::error::{Error, Result};
use crate::estimators::{
    assemble_rank2, estimate_projection2, estimate_pure, estimate_rank2_degenerate, estimate_rank2_sep2,
    ladder_from_correlation, ladder_state, local_observables_rank2, reconstruct_rank2, xstate_concurrence,
    xstate_concurrence_invariant, Rank2Canonical, Rank2Degenerate, Rank2SepDecomp, XState,
    DEFAULT_DEGENERACY_TOL,
};
use crate::invariants::{invariant_vector, purity_residuals, InvariantVector};
use crate::measurement::{
    correlations_from_lambdas, expectation, lambda_from_szpz, sample_expectation_with, MixtureWeights,
    Observable,
};
use crate::par::{self, Execution};
use crate::qstate::{
    apply_local, decompose, dirichlet_uniform, named, random_local_unitary, random_product_state,
    random_pure_with, random_rank_k_with, DensityOperator, StateFile,
};

pub const TOOL: &str = "concurrence";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const WORST_KEPT: usize = 5;
const ERRORS_KEPT: usize = 3;
/// Keeps sampled angles this far from the reconstruction singularities.
const ANGLE_MARGIN: f64 = 0.05;
pub const SHOTS: u64 = 10_000;
pub const REGION_GRID: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Oracle,
    Pure,
    Invariance,
    Rank2Recon,
    Rank2Sep,
    Degenerate,
    Projection,
    Xstate,
    XstateInvariant,
    Ladder,
    Bounds,
    Rank4Max,
    Shots,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::Oracle,
        Suite::Pure,
        Suite::Invariance,
        Suite::Rank2Recon,
        Suite::Rank2Sep,
        Suite::Degenerate,
        Suite::Projection,
        Suite::Xstate,
        Suite::XstateInvariant,
        Suite::Ladder,
        Suite::Bounds,
        Suite::Rank4Max,
        Suite::Shots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Pure => "pure",
            Suite::Invariance => "invariance",
            Suite::Rank2Recon => "rank2-recon",
            Suite::Rank2Sep => "rank2-sep",
            Suite::Degenerate => "degenerate",
            Suite::Projection => "projection",
            Suite::Xstate => "xstate",
            Suite::XstateInvariant => "xstate-invariant",
            Suite::Ladder => "ladder",
            Suite::Bounds => "bounds",
            Suite::Rank4Max => "rank4-max",
            Suite::Shots => "shots",
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Suite::Pure | Suite::Invariance | Suite::Bounds => 10_000,
            _ => 1_000,
        }
    }

    fn id(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::BadArgs(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// Every sample within `tolerance`; errors count as violations.
    MaxDeviation { tolerance: f64 },
    /// At least `min_fraction` of samples within their own per-sample bound.
    PassFraction { min_fraction: f64 },
    /// Statistics only.
    Report,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub criterion: Criterion,
    pub samples: usize,
    pub errors: usize,
    pub violations: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub worst: Vec<Offender>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub error_examples: Vec<Offender>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl ValidationReport {
    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationConfig {
    pub seed: u64,
    /// Overrides every suite's default sample count.
    pub samples: Option<usize>,
    /// Overrides every fixed `MaxDeviation` tolerance.
    pub tolerance: Option<f64>,
    pub execution: Execution,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { seed: 0, samples: None, tolerance: None, execution: Execution::Parallel }
    }
}

/// One sample's outcome.
#[derive(Clone, Debug, Default)]
pub struct Sample {
    pub deviation: f64,
    /// Per-sample bound for `PassFraction` checks.
    pub allowed: Option<f64>,
    /// Secondary quantity summarized in `extra` (min/mean/max).
    pub aux: Option<f64>,
    pub detail: String,
    pub state: Option<DensityOperator>,
}

impl Sample {
    pub fn new(deviation: f64) -> Self {
        Self { deviation, ..Default::default() }
    }

    pub fn with_state(mut self, rho: &DensityOperator) -> Self {
        self.state = Some(rho.clone());
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }
}

type Outcome = std::result::Result<Sample, String>;

struct Ctx {
    seed: u64,
    suite: Suite,
    tolerance: Option<f64>,
    exec: Execution,
}

impl Ctx {
    fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((self.suite.id() << 40) | i as u64);
        rng
    }

    fn check<F>(&self, name: &str, criterion: Criterion, n: usize, aux_name: Option<&str>, f: F) -> CheckReport
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Outcome + Sync + Send,
    {
        let criterion = match (criterion, self.tolerance) {
            (Criterion::MaxDeviation { .. }, Some(tolerance)) => Criterion::MaxDeviation { tolerance },
            (c, _) => c,
        };
        let outcomes = par::map_indexed(n, self.exec, |i| f(i, &mut self.rng(i)));
        summarize(name, criterion, outcomes, aux_name)
    }
}

fn summarize(name: &str, criterion: Criterion, outcomes: Vec<Outcome>, aux_name: Option<&str>) -> CheckReport {
    let samples = outcomes.len();
    let mut errors = 0;
    let mut violations = 0;
    let mut max_deviation: f64 = 0.0;
    let mut sum = 0.0;
    let mut ok = 0usize;
    let mut worst: Vec<(usize, f64)> = Vec::new();
    let mut error_examples = Vec::new();
    let mut aux = Vec::new();
    for (i, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Err(msg) => {
                errors += 1;
                if error_examples.len() < ERRORS_KEPT {
                    error_examples.push(Offender { index: i, deviation: None, detail: msg.clone(), state: None });
                }
            }
            Ok(s) => {
                ok += 1;
                let dev = if s.deviation.is_nan() { f64::INFINITY } else { s.deviation };
                max_deviation = max_deviation.max(dev);
                sum += dev;
                let bound = match criterion {
                    Criterion::MaxDeviation { tolerance } => Some(tolerance),
                    Criterion::PassFraction { .. } => s.allowed,
                    Criterion::Report => None,
                };
                if bound.is_some_and(|b| !(dev <= b)) {
                    violations += 1;
                }
                worst.push((i, dev));
                if let Some(a) = s.aux.filter(|a| a.is_finite()) {
                    aux.push(a);
                }
            }
        }
    }
    worst.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    worst.truncate(WORST_KEPT);
    let worst = worst
        .into_iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|(i, dev)| {
            let s = outcomes[i].as_ref().expect("worst entries are successes");
            Offender {
                index: i,
                deviation: Some(dev),
                detail: s.detail.clone(),
                state: s.state.as_ref().map(StateFile::new),
            }
        })
        .collect();
    let passed = match criterion {
        Criterion::MaxDeviation { .. } => errors == 0 && violations == 0,
        Criterion::PassFraction { min_fraction } => {
            samples > 0 && (samples - violations - errors) as f64 / samples as f64 >= min_fraction
        }
        Criterion::Report => true,
    };
    let mut extra = BTreeMap::new();
    if let (Some(label), false) = (aux_name, aux.is_empty()) {
        let n = aux.len() as f64;
        extra.insert(format!("{label}_min"), aux.iter().copied().fold(f64::INFINITY, f64::min));
        extra.insert(format!("{label}_max"), aux.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        extra.insert(format!("{label}_mean"), aux.iter().sum::<f64>() / n);
    }
    if matches!(criterion, Criterion::PassFraction { .. }) && samples > 0 {
        extra.insert("pass_fraction".into(), (samples - violations - errors) as f64 / samples as f64);
    }
    CheckReport {
        name: name.to_string(),
        criterion,
        samples,
        errors,
        violations,
        max_deviation,
        mean_deviation: if ok > 0 { sum / ok as f64 } else { 0.0 },
        passed,
        worst,
        error_examples,
        extra,
    }
}

fn oracle(rho: &DensityOperator) -> std::result::Result<f64, String> {
    concurrence_oracle(rho).map(|d| d.value).map_err(|e| e.to_string())
}

fn invariants(rho: &DensityOperator) -> std::result::Result<InvariantVector, String> {
    invariant_vector(&decompose(rho)).map_err(|e| e.to_string())
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn uniform_avoiding<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, avoid: &[f64]) -> f64 {
    loop {
        let x = rng.gen_range(lo..hi);
        if avoid.iter().all(|a| (x - a).abs() > ANGLE_MARGIN) {
            return x;
        }
    }
}

/// Canonical rank-2 parameters away from every reconstruction singularity.
pub fn sample_rank2_canonical<R: Rng + ?Sized>(rng: &mut R) -> Rank2Canonical {
    let m = ANGLE_MARGIN;
    Rank2Canonical {
        nu: rng.gen_range(m..1.0 - m),
        alpha: uniform_avoiding(rng, m, FRAC_PI_2 - m, &[FRAC_PI_4]),
        beta: rng.gen_range(m..FRAC_PI_2 - m),
        gamma: uniform_avoiding(rng, m, TAU - m, &[PI]),
        eta: rng.gen_range(m..FRAC_PI_2 - m),
    }
}

/// The three singular inputs: cos2α = 0, sinγ = 0 and ν = 1.
pub fn degenerate_rank2_inputs() -> [Rank2Canonical; 3] {
    let base = Rank2Canonical { nu: 0.7, alpha: PI / 4.0, beta: PI / 3.0, gamma: PI / 2.0, eta: PI / 6.0 };
    [
        base,
        Rank2Canonical { gamma: 0.0, alpha: 0.4, ..base },
        Rank2Canonical { nu: 1.0, alpha: 0.4, ..base },
    ]
}

pub fn sample_rank2_sep<R: Rng + ?Sized>(rng: &mut R) -> Rank2SepDecomp {
    let (b, a) = rng.gen_range(0.0..FRAC_PI_2).sin_cos();
    Rank2SepDecomp {
        lambda: rng.gen(),
        mu: rng.gen(),
        a,
        b,
        theta: rng.gen_range(0.0..FRAC_PI_2),
        phase: rng.gen_range(0.0..TAU),
    }
}

/// λ|00⟩⟨00| + (1−λ)|ψ⟩⟨ψ| with ψ Haar-distributed on span{|01⟩,|10⟩,|11⟩}.
pub fn sample_rank2_degenerate<R: Rng + ?Sized>(rng: &mut R, lambda: Option<f64>) -> Rank2Degenerate {
    loop {
        let g = [gaussian_c(rng), gaussian_c(rng), gaussian_c(rng)];
        let n = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-12 {
            continue;
        }
        let lambda = lambda.unwrap_or_else(|| rng.gen());
        let (r1, c) = (g[0].norm() / n, g[1] / n);
        let r2 = (1.0 - r1 * r1 - c.norm_sqr()).max(0.0).sqrt();
        if let Ok(s) = Rank2Degenerate::new(lambda, r1, r2, c) {
            return s;
        }
    }
}

pub fn sample_xstate<R: Rng + ?Sized>(rng: &mut R) -> XState {
    loop {
        let w = dirichlet_uniform(4, rng);
        let r: f64 = rng.gen();
        let z = Complex64::from_polar((w[2] * w[3]).sqrt() * r, rng.gen_range(0.0..TAU));
        if let Ok(x) = XState::new(w[0], w[1], w[2], w[3], z) {
            return x;
        }
    }
}

fn rank4_sample<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let w = dirichlet_uniform(3, rng);
    (w[0], w[1])
}

pub fn run_suite(suite: Suite, config: &ValidationConfig) -> SuiteReport {
    let n = config.samples.unwrap_or_else(|| suite.default_samples()).max(1);
    let ctx = Ctx { seed: config.seed, suite, tolerance: config.tolerance, exec: config.execution };
    let max = |tolerance| Criterion::MaxDeviation { tolerance };
    let checks = match suite {
        Suite::Oracle => oracle_checks(&ctx, n),
        Suite::Pure => vec![
            ctx.check("pure-formula", max(1e-8), n, None, |_, rng| {
                let rho = DensityOperator::from_pure(&random_pure_with(rng));
                let est = estimate_pure(&decompose(&rho)).map_err(|e| e.to_string())?;
                Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho))
            }),
            ctx.check("purity-residuals", max(1e-10), n, None, |_, rng| {
                let rho = DensityOperator::from_pure(&random_pure_with(rng));
                let (r1, r2) = purity_residuals(&decompose(&rho));
                Ok(Sample::new(r1.abs().max(r2.abs())).with_state(&rho))
            }),
        ],
        Suite::Invariance => {
            let draw = |i: usize, rng: &mut ChaCha8Rng| {
                let rho = random_rank_k_with(1 + i % 4, rng).expect("rank in 1..=4");
                let u = random_local_unitary(rng);
                let rotated = apply_local(&rho, &u);
                (rho, rotated)
            };
            vec![
                ctx.check("invariants", max(1e-9), n, None, move |i, rng| {
                    let (rho, rotated) = draw(i, rng);
                    let d = invariants(&rho)?.max_abs_diff(&invariants(&rotated)?);
                    Ok(Sample::new(d).with_state(&rho))
                }),
                ctx.check("oracle", max(1e-9), n, None, move |i, rng| {
                    let (rho, rotated) = draw(i, rng);
                    Ok(Sample::new((oracle(&rho)? - oracle(&rotated)?).abs()).with_state(&rho))
                }),
            ]
        }
        Suite::Rank2Recon => rank2_recon_checks(&ctx, n),
        Suite::Rank2Sep => vec![
            ctx.check("separable-decomposition-family", Criterion::Report, n, None, |_, rng| {
                let d = sample_rank2_sep(rng);
                let rho = d.assemble();
                let est = estimate_rank2_sep2(&invariants(&rho)?);
                Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho).detail(format!("{d:?}")))
            }),
            ctx.check("generic-rank2", Criterion::Report, n, None, |_, rng| {
                let rho = random_rank_k_with(2, rng).expect("rank 2");
                let est = estimate_rank2_sep2(&invariants(&rho)?);
                Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho))
            }),
        ],
        Suite::Degenerate => vec![ctx.check("degenerate-family", max(1e-8), n, None, |_, rng| {
            let s = sample_rank2_degenerate(rng, None);
            let rho = s.assemble();
            let d = (estimate_rank2_degenerate(&s) - oracle(&rho)?).abs();
            Ok(Sample::new(d).with_state(&rho).detail(format!("{s:?}")))
        })],
        Suite::Projection => vec![ctx.check("two-dim-projection", max(1e-8), n, None, |_, rng| {
            let s = sample_rank2_degenerate(rng, Some(0.5));
            let rho = s.assemble();
            let est = estimate_projection2(&invariants(&rho)?).map_err(|e| e.to_string())?;
            Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho).detail(format!("{s:?}")))
        })],
        Suite::Xstate => vec![ctx.check("direct-formula", max(1e-8), n, None, |_, rng| {
            let x = sample_xstate(rng);
            let rho = x.assemble();
            Ok(Sample::new((xstate_concurrence(&x) - oracle(&rho)?).abs()).with_state(&rho))
        })],
        Suite::XstateInvariant => vec![ctx.check("invariant-formula", Criterion::Report, n, None, |_, rng| {
            let x = sample_xstate(rng);
            let rho = x.assemble();
            let est = xstate_concurrence_invariant(&invariants(&rho)?).map_err(|e| e.to_string())?;
            Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho))
        })],
        Suite::Ladder => vec![
            ctx.check("one-minus-rho11", max(1e-8), n, None, |_, rng| {
                let rho = ladder_state(rng.gen()).map_err(|e| e.to_string())?.assemble();
                Ok(Sample::new((1.0 - rho.population(0) - oracle(&rho)?).abs()).with_state(&rho))
            }),
            ctx.check("from-szpz", max(1e-8), n, None, |_, rng| {
                let rho = ladder_state(rng.gen()).map_err(|e| e.to_string())?.assemble();
                let est = ladder_from_correlation(expectation(&rho, Observable::ZZ));
                Ok(Sample::new((est - oracle(&rho)?).abs()).with_state(&rho))
            }),
        ],
        Suite::Bounds => bounds_checks(&ctx, n),
        Suite::Rank4Max => vec![
            ctx.check("oracle-vs-closed-form", Criterion::Report, n, Some("oracle_over_closed_form"), |_, rng| {
                let (l1, l2) = rank4_sample(rng);
                let rho = rank4_max_state(l1, l2).map_err(|e| e.to_string())?;
                let c = oracle(&rho)?;
                let closed = rank4_max_concurrence(l1, l2);
                let ratio = (closed > 1e-6).then(|| c / closed);
                Ok(Sample { aux: ratio, ..Sample::new((closed.max(0.0) - c).abs()) }
                    .detail(format!("lambda1={l1} lambda2={l2} closed_form={closed}")))
            }),
            ctx.check("boundary-root", max(1e-12), n, None, |_, rng| {
                let t: f64 = rng.gen();
                let (l1, l2) = (t * 2.0 / 3.0, (1.0 - t) * 0.75);
                Ok(Sample::new(rank4_max_concurrence(l1, l2).abs()))
            }),
        ],
        Suite::Shots => shots_checks(&ctx, n),
    };
    SuiteReport { suite, samples: n, passed: checks.iter().all(|c| c.passed), checks }
}

fn oracle_checks(ctx: &Ctx, n: usize) -> Vec<CheckReport> {
    let bells = [named::bell_phi_plus(), named::bell_phi_minus(), named::bell_psi_plus(), named::bell_psi_minus()];
    let werner_p = [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0];
    vec![
        ctx.check("bell", Criterion::MaxDeviation { tolerance: 1e-12 }, bells.len(), None, |i, _| {
            let rho = DensityOperator::from_pure(&bells[i]);
            Ok(Sample::new((oracle(&rho)? - 1.0).abs()).with_state(&rho))
        }),
        ctx.check("product", Criterion::MaxDeviation { tolerance: 1e-10 }, n, None, |_, rng| {
            let rho = random_product_state(rng);
            Ok(Sample::new(oracle(&rho)?.abs()).with_state(&rho))
        }),
        ctx.check("werner", Criterion::MaxDeviation { tolerance: 1e-10 }, werner_p.len(), None, |i, _| {
            let p = werner_p[i];
            let rho = named::werner(p).map_err(|e| e.to_string())?;
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            Ok(Sample::new((oracle(&rho)? - want).abs()).detail(format!("p={p}")))
        }),
    ]
}

fn rank2_recon_checks(ctx: &Ctx, n: usize) -> Vec<CheckReport> {
    let round_trip = |rng: &mut ChaCha8Rng| -> std::result::Result<(DensityOperator, DensityOperator, Rank2Canonical), String> {
        let params = sample_rank2_canonical(rng);
        let (p, s) = local_observables_rank2(&params);
        let back = reconstruct_rank2(&p, &s, DEFAULT_DEGENERACY_TOL).map_err(|e| format!("{e} for {params:?}"))?;
        Ok((assemble_rank2(&params), assemble_rank2(&back), params))
    };
    let degenerate = degenerate_rank2_inputs();
    vec![
        ctx.check("invariants", Criterion::MaxDeviation { tolerance: 1e-6 }, n, None, move |_, rng| {
            let (a, b, params) = round_trip(rng)?;
            let d = invariants(&a)?.max_abs_diff(&invariants(&b)?);
            Ok(Sample::new(d).with_state(&a).detail(format!("{params:?}")))
        }),
        ctx.check("oracle", Criterion::MaxDeviation { tolerance: 1e-6 }, n, None, move |_, rng| {
            let (a, b, params) = round_trip(rng)?;
            Ok(Sample::new((oracle(&a)? - oracle(&b)?).abs()).with_state(&a).detail(format!("{params:?}")))
        }),
        // Deviation 1 marks an input that was not reported as degenerate.
        ctx.check("degenerate-inputs", Criterion::MaxDeviation { tolerance: 0.0 }, degenerate.len(), None, move |i, _| {
            let params = degenerate[i];
            let (p, s) = local_observables_rank2(&params);
            let hit = matches!(
                reconstruct_rank2(&p, &s, DEFAULT_DEGENERACY_TOL),
                Err(Error::ReconstructionDegenerate(_))
            );
            Ok(Sample::new(if hit { 0.0 } else { 1.0 }).detail(format!("{params:?}")))
        }),
    ]
}

fn bounds_checks(ctx: &Ctx, n: usize) -> Vec<CheckReport> {
    let h = FRAC_1_SQRT_2;
    let dominance = Criterion::MaxDeviation { tolerance: 1e-9 };
    let exact = Criterion::MaxDeviation { tolerance: 1e-10 };
    let mut checks = vec![
        ctx.check("rank3-dominance", dominance, n, None, |_, rng| {
            let m = Rank3Mixture::random(rng);
            let rho = m.assemble();
            Ok(Sample::new((oracle(&rho)? - rank3_bound(&m)).max(0.0)).with_state(&rho))
        }),
        ctx.check("rank4-dominance", dominance, n, None, |_, rng| {
            let m = Rank4Mixture::random(rng);
            let rho = m.assemble();
            Ok(Sample::new((oracle(&rho)? - rank4_bound(&m)).max(0.0)).with_state(&rho))
        }),
        // 0.74 must be entangled and 0.76 separable; deviation 1 marks a miss.
        ctx.check("rank3-threshold-bracket", Criterion::MaxDeviation { tolerance: 0.0 }, 2, Some("oracle"), move |i, _| {
            let lambda = [0.74, 0.76][i];
            let c = oracle(&rank3_max_state(lambda, h, h))?;
            let ok = if i == 0 { c > 0.0 } else { c <= 1e-12 };
            Ok(Sample { aux: Some(c), ..Sample::new(if ok { 0.0 } else { 1.0 }) }.detail(format!("lambda={lambda} oracle={c}")))
        }),
        ctx.check("zz-inversion", exact, n, None, move |_, rng| {
            let lambda: f64 = rng.gen();
            let szpz = expectation(&rank3_max_state(lambda, h, h), Observable::ZZ);
            Ok(Sample::new((lambda_from_szpz(szpz).value - lambda).abs()))
        }),
        ctx.check("xx-zz-inversion", exact, n, None, |_, rng| {
            let (l1, l2) = rank4_sample(rng);
            let rho = rank4_max_state(l1, l2).map_err(|e| e.to_string())?;
            let w = MixtureWeights::solve(expectation(&rho, Observable::XX), expectation(&rho, Observable::ZZ));
            let (sx, sz) = correlations_from_lambdas(l1, l2);
            let forward = (sx - expectation(&rho, Observable::XX)).abs().max((sz - expectation(&rho, Observable::ZZ)).abs());
            Ok(Sample::new((w.lambda1 - l1).abs().max((w.lambda2 - l2).abs()).max(forward)))
        }),
    ];

    let grid = REGION_GRID;
    let resolution = 1.0 / (grid - 1) as f64;
    let cells = rank4_region(grid, ctx.exec).expect("grid >= 2");
    let boundary = region_boundary(&cells, grid);
    // Euclidean distance from the cell to the line 9λ₁ + 8λ₂ = 6.
    let norm = 145f64.sqrt();
    checks.push(ctx.check("region-boundary", Criterion::MaxDeviation { tolerance: resolution }, boundary.len(), None, |i, _| {
        let c = boundary[i];
        Ok(Sample::new((9.0 * c.lambda1 + 8.0 * c.lambda2 - 6.0).abs() / norm)
            .detail(format!("lambda1={} lambda2={}", c.lambda1, c.lambda2)))
    }));
    let feasible: Vec<_> = cells.iter().filter(|c| c.class != RegionClass::Infeasible).copied().collect();
    checks.push(ctx.check("region-consistency", Criterion::MaxDeviation { tolerance: 0.0 }, feasible.len(), None, |i, _| {
        let c = feasible[i];
        let value = oracle(&rank4_max_state(c.lambda1, c.lambda2).map_err(|e| e.to_string())?)?;
        let ok = match c.class {
            RegionClass::Entangled => value > 0.0,
            _ => value <= 1e-10,
        };
        Ok(Sample::new(if ok { 0.0 } else { 1.0 })
            .detail(format!("lambda1={} lambda2={} class={} oracle={value}", c.lambda1, c.lambda2, c.class.code())))
    }));
    checks
}

fn shots_checks(ctx: &Ctx, n: usize) -> Vec<CheckReport> {
    let h = FRAC_1_SQRT_2;
    let fraction = Criterion::PassFraction { min_fraction: 0.99 };
    let sample = |rho: &DensityOperator, obs, rng: &mut ChaCha8Rng| {
        let r = sample_expectation_with(rho, obs, SHOTS, rng).map_err(|e| e.to_string())?;
        Ok::<_, String>((r.expectation, r.std_error.unwrap_or(0.0)))
    };
    vec![
        ctx.check("zz-lambda", fraction, n, None, move |_, rng| {
            let lambda: f64 = rng.gen();
            let rho = rank3_max_state(lambda, h, h);
            let (m, se) = sample(&rho, Observable::ZZ, rng)?;
            let est = lambda_from_szpz(m).value;
            Ok(Sample { allowed: Some(5.0 * 0.75 * se), ..Sample::new((est - lambda).abs()) }
                .detail(format!("lambda={lambda} szpz={m} se={se}")))
        }),
        ctx.check("xx-zz-lambdas", fraction, n, None, move |_, rng| {
            let (l1, l2) = rank4_sample(rng);
            let rho = rank4_max_state(l1, l2).map_err(|e| e.to_string())?;
            let (sx, se_x) = sample(&rho, Observable::XX, rng)?;
            let (sz, se_z) = sample(&rho, Observable::ZZ, rng)?;
            let w = MixtureWeights::solve(sx, sz);
            let se1 = (4.0 * se_x * se_x + se_z * se_z).sqrt();
            let se2 = 1.5 * (se_x * se_x + se_z * se_z).sqrt();
            // Normalized so that 1 means "exactly at 5 standard errors".
            let score = |err: f64, se: f64| if se > 0.0 { err / (5.0 * se) } else if err == 0.0 { 0.0 } else { f64::INFINITY };
            let dev = score((w.lambda1 - l1).abs(), se1).max(score((w.lambda2 - l2).abs(), se2));
            Ok(Sample { allowed: Some(1.0), ..Sample::new(dev) }
                .detail(format!("lambda1={l1} lambda2={l2} sxpx={sx} szpz={sz}")))
        }),
    ]
}

pub fn run(suites: &[Suite], config: &ValidationConfig) -> ValidationReport {
    let suites: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, config)).collect();
    ValidationReport {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        seed: config.seed,
        samples: config.samples,
        tolerance: config.tolerance,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

pub fn write_checks_csv<W: std::io::Write>(report: &ValidationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "suite", "check", "criterion", "samples", "errors", "violations", "max_deviation", "mean_deviation", "passed",
    ])?;
    for s in &report.suites {
        for c in &s.checks {
            let criterion = match c.criterion {
                Criterion::MaxDeviation { tolerance } => format!("max_deviation<={tolerance:e}"),
                Criterion::PassFraction { min_fraction } => format!("pass_fraction>={min_fraction}"),
                Criterion::Report => "report".to_string(),
            };
            w.write_record([
                s.suite.name().to_string(),
                c.name.clone(),
                criterion,
                c.samples.to_string(),
                c.errors.to_string(),
                c.violations.to_string(),
                format!("{:e}", c.max_deviation),
                format!("{:e}", c.mean_deviation),
                c.passed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> ValidationConfig {
        ValidationConfig { seed, samples: Some(50), ..Default::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn thresholded_suites_pass_on_small_runs() {
        let report = run(&Suite::ALL, &small(1));
        for s in &report.suites {
            assert!(s.passed, "{}: {:#?}", s.suite, s.checks);
        }
    }

    #[test]
    fn reports_are_reproducible_and_mode_independent() {
        let a = run(&[Suite::Xstate, Suite::Shots], &small(5));
        let b = run(&[Suite::Xstate, Suite::Shots], &ValidationConfig { execution: Execution::Sequential, ..small(5) });
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = run(&[Suite::Xstate], &small(6));
        assert_ne!(a.suites[0].checks[0].max_deviation, c.suites[0].checks[0].max_deviation);
    }

    #[test]
    fn tolerance_override_can_fail_a_suite() {
        let cfg = ValidationConfig { tolerance: Some(0.0), ..small(2) };
        let r = run_suite(Suite::Pure, &cfg);
        assert!(!r.passed);
        assert_eq!(r.checks[0].criterion, Criterion::MaxDeviation { tolerance: 0.0 });
    }

    #[test]
    fn pass_fraction_counts_errors_as_failures() {
        let outcomes = vec![Ok(Sample { allowed: Some(1.0), ..Sample::new(0.5) }), Err("boom".to_string())];
        let r = summarize("t", Criterion::PassFraction { min_fraction: 0.9 }, outcomes, None);
        assert!(!r.passed);
        assert_eq!(r.errors, 1);
        assert_eq!(r.error_examples.len(), 1);
    }

    #[test]
    fn samplers_produce_valid_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            DensityOperator::new(sample_xstate(&mut rng).assemble().into_matrix()).unwrap();
            DensityOperator::new(sample_rank2_degenerate(&mut rng, None).assemble().into_matrix()).unwrap();
            DensityOperator::new(sample_rank2_sep(&mut rng).assemble().into_matrix()).unwrap();
            let p = sample_rank2_canonical(&mut rng);
            assert!((p.alpha - FRAC_PI_4).abs() > ANGLE_MARGIN);
        }
    }
}
