//! Simulated measurements: Pauli-product expectations, finite-shot sampling
//! and the inversions from correlation data back to mixture weights.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Pauli};
use crate::par::{self, Execution};
use crate::qstate::DensityOperator;

const FEASIBILITY_TOL: f64 = 1e-9;

/// σᵢ ⊗ σⱼ; serialized as a two-element array such as `["z","z"]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observable(pub Pauli, pub Pauli);

impl Observable {
    pub const ZZ: Observable = Observable(Pauli::Z, Pauli::Z);
    pub const XX: Observable = Observable(Pauli::X, Pauli::X);

    /// The 15 non-identity products.
    pub fn nontrivial() -> Vec<Observable> {
        Pauli::ALL
            .iter()
            .flat_map(|&a| Pauli::ALL.iter().map(move |&b| Observable(a, b)))
            .filter(|o| *o != Observable(Pauli::I, Pauli::I))
            .collect()
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0.symbol(), self.1.symbol())
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// Accepts `zz`, `z0`, `z,z` or `z z`.
    fn from_str(s: &str) -> Result<Self> {
        let labels: Vec<char> = s.chars().filter(|c| !matches!(c, ',' | ' ')).collect();
        if labels.len() != 2 {
            return Err(Error::BadArgs(format!("observable '{s}' needs two Pauli labels")));
        }
        Ok(Observable(labels[0].to_string().parse()?, labels[1].to_string().parse()?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub obs: Observable,
    pub expectation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

/// Tr(ρ σᵢ⊗σⱼ).
pub fn expectation(rho: &DensityOperator, obs: Observable) -> f64 {
    let op = linalg::pauli_product(obs.0, obs.1);
    linalg::trace(&(rho.matrix() * op)).re
}

pub fn exact_record(rho: &DensityOperator, obs: Observable) -> MeasurementRecord {
    MeasurementRecord { obs, expectation: expectation(rho, obs), shots: None, std_error: None }
}

/// As [`sample_expectation`], drawing from a caller-supplied generator.
pub fn sample_expectation_with<R: Rng + ?Sized>(
    rho: &DensityOperator,
    obs: Observable,
    shots: u64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::BadArgs("shots must be at least 1".into()));
    }
    let p_plus = ((1.0 + expectation(rho, obs)) / 2.0).clamp(0.0, 1.0);
    let ups = Binomial::new(shots, p_plus)
        .map_err(|e| Error::BadArgs(format!("binomial: {e}")))?
        .sample(rng);
    let mean = (2.0 * ups as f64 - shots as f64) / shots as f64;
    let std_error = ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt();
    Ok(MeasurementRecord { obs, expectation: mean, shots: Some(shots), std_error: Some(std_error) })
}

/// Draws `shots` ±1 outcomes with P(+1) = (1 + ⟨σᵢ⊗σⱼ⟩)/2.
pub fn sample_expectation(rho: &DensityOperator, obs: Observable, shots: u64, seed: u64) -> Result<MeasurementRecord> {
    sample_expectation_with(rho, obs, shots, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// One record per observable; record `k` uses stream `k` of the seeded
/// generator, so results do not depend on scheduling.
pub fn sample_batch(
    rho: &DensityOperator,
    observables: &[Observable],
    shots: u64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<MeasurementRecord>> {
    par::map_indexed(observables.len(), exec, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        sample_expectation_with(rho, observables[k], shots, &mut rng)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clamped {
    pub value: f64,
    pub clamped: bool,
}

impl Clamped {
    fn unit(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self { value, clamped: value != raw }
    }
}

/// λ = ¾(⟨s_z p_z⟩ + 1), clamped to [0, 1].
pub fn lambda_from_szpz(szpz: f64) -> Clamped {
    Clamped::unit(0.75 * (szpz + 1.0))
}

/// ⟨s_z p_z⟩ = 4λ/3 − 1 for the maximal rank-3 mixture.
pub fn szpz_from_lambda(lambda: f64) -> f64 {
    4.0 * lambda / 3.0 - 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda1_nonnegative: bool,
    pub lambda2_nonnegative: bool,
    pub sum_at_most_one: bool,
}

impl MixtureWeights {
    /// Unconstrained solution of
    /// sxpx = 1 − λ₁ − 2λ₂/3, szpz = λ₁ + 4λ₂/3 − 1.
    pub fn solve(sxpx: f64, szpz: f64) -> Self {
        let lambda2 = 1.5 * (sxpx + szpz);
        let lambda1 = 1.0 - 2.0 * sxpx - szpz;
        Self {
            lambda1,
            lambda2,
            lambda1_nonnegative: lambda1 >= 0.0,
            lambda2_nonnegative: lambda2 >= 0.0,
            sum_at_most_one: lambda1 + lambda2 <= 1.0,
        }
    }

    pub fn feasible(&self) -> bool {
        self.lambda1_nonnegative && self.lambda2_nonnegative && self.sum_at_most_one
    }
}

/// (⟨s_x p_x⟩, ⟨s_z p_z⟩) for the maximal rank-4 mixture.
pub fn correlations_from_lambdas(lambda1: f64, lambda2: f64) -> (f64, f64) {
    (1.0 - lambda1 - 2.0 * lambda2 / 3.0, lambda1 + 4.0 * lambda2 / 3.0 - 1.0)
}

pub fn lambdas_from_correlations(sxpx: f64, szpz: f64) -> Result<MixtureWeights> {
    let w = MixtureWeights::solve(sxpx, szpz);
    if w.lambda1 < -FEASIBILITY_TOL
        || w.lambda2 < -FEASIBILITY_TOL
        || w.lambda1 + w.lambda2 > 1.0 + FEASIBILITY_TOL
    {
        return Err(Error::Infeasible { lambda1: w.lambda1, lambda2: w.lambda2 });
    }
    Ok(w)
}

/// |00⟩ weight from the rung correlation: ½(⟨s_z p_z⟩ + 1).
pub fn rho11_from_szpz(szpz: f64) -> f64 {
    0.5 * (szpz + 1.0)
}
