use nalgebra::{Matrix2, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use super::{DensityOperator, LocalUnitary, PureState};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix4c};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-uniform pure state: normalized complex Gaussian vector.
pub fn random_pure_with<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let amps = [gaussian_c(rng), gaussian_c(rng), gaussian_c(rng), gaussian_c(rng)];
        if let Ok(psi) = PureState::normalized(amps) {
            return psi;
        }
    }
}

pub fn random_pure(seed: u64) -> PureState {
    random_pure_with(&mut rng_from_seed(seed))
}

/// `k` Haar-random orthonormal vectors (columns of a Haar unitary) via Gram-Schmidt.
pub fn random_orthonormal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<PureState> {
    let mut out: Vec<PureState> = Vec::with_capacity(k);
    while out.len() < k {
        let mut v = *random_pure_with(rng).amplitudes();
        for q in &out {
            let overlap: Complex64 = q.amplitudes().iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q.amplitudes()) {
                *vi -= overlap * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            out.push(PureState::from_raw(v.map(|z| z / norm)));
        }
    }
    out
}

/// Flat Dirichlet(1, …, 1) weights.
pub(crate) fn dirichlet_uniform<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

pub fn random_rank_k_with<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<DensityOperator> {
    if !(1..=4).contains(&k) {
        return Err(Error::BadArgs(format!("rank {k} outside 1..=4")));
    }
    let vectors = random_orthonormal(k, rng);
    let weights = dirichlet_uniform(k, rng);
    let m = vectors
        .iter()
        .zip(&weights)
        .fold(Matrix4c::zeros(), |acc, (v, w)| acc + linalg::outer(v.amplitudes()).scale(*w));
    Ok(DensityOperator::from_matrix_unchecked(linalg::hermitian_part(&m)))
}

pub fn random_rank_k(k: usize, seed: u64) -> Result<DensityOperator> {
    random_rank_k_with(k, &mut rng_from_seed(seed))
}

pub fn random_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> LocalUnitary {
    let mut quat = || -> [f64; 4] { std::array::from_fn(|_| rng.sample(StandardNormal)) };
    let u_a = LocalUnitary::su2_from_quaternion(quat());
    let u_b = LocalUnitary::su2_from_quaternion(quat());
    LocalUnitary { u_a, u_b }
}

/// Single-qubit density matrix with Bloch vector uniform in the unit ball.
pub fn random_mixed_qubit<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<Complex64> {
    let dir = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
    let r = rng.gen::<f64>().cbrt();
    let b = dir * r;
    let half = 0.5;
    Matrix2::new(
        Complex64::new(half * (1.0 + b.z), 0.0),
        Complex64::new(half * b.x, -half * b.y),
        Complex64::new(half * b.x, half * b.y),
        Complex64::new(half * (1.0 - b.z), 0.0),
    )
}

/// ρ_A ⊗ ρ_B with both factors drawn from [`random_mixed_qubit`].
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    let a = random_mixed_qubit(rng);
    let b = random_mixed_qubit(rng);
    DensityOperator::from_matrix_unchecked(linalg::kron(&a, &b))
}
