//! Rank-3 and rank-4 concurrence bounds, the λ < 3/4 threshold and the
//! (λ₁, λ₂) entangled/separable region.
//!
//! Mixtures live in H₃ = span{|00⟩, |11⟩, a|01⟩ + b|10⟩}; Π₃ is the
//! projector onto H₃ and enters with weight Π₃/3 so that λ is a probability.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::concurrence::concurrence_pure;
use crate::error::{Error, Result};
use crate::estimators::Rank2Canonical;
use crate::linalg::{self, Matrix4c};
use crate::par::{self, Execution};
use crate::qstate::{DensityOperator, PureState};

const WEIGHT_TOL: f64 = 1e-12;

/// The pure and separable parts shared by rank-3 and rank-4 mixtures.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureCore {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub phi: f64,
    /// ρ_sep = w|s₁⟩⟨s₁| + (1−w)|s₂⟩⟨s₂| with product states in H₃.
    pub sep_weight: f64,
    pub sep_states: [PureState; 2],
}

impl MixtureCore {
    /// Core with no separable part (μ = 0).
    pub fn pure_only(a: f64, b: f64, theta: f64, phi: f64) -> Self {
        Self {
            mu: 0.0,
            a,
            b,
            theta,
            phi,
            sep_weight: 1.0,
            sep_states: [PureState::basis(0), PureState::basis(3)],
        }
    }

    pub fn psi_ab(&self) -> [Complex64; 4] {
        [0.0.into(), self.a.into(), self.b.into(), 0.0.into()]
    }

    /// |ψ⟩ = cosθ(a|01⟩ + b|10⟩) + sinθ cosφ|00⟩ + sinθ sinφ|11⟩.
    pub fn psi(&self) -> PureState {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        PureState::from_raw([
            (st * cp).into(),
            (ct * self.a).into(),
            (ct * self.b).into(),
            (st * sp).into(),
        ])
    }

    pub fn pi3(&self) -> Matrix4c {
        let mut m = linalg::outer(&self.psi_ab());
        m[(0, 0)] += Complex64::new(1.0, 0.0);
        m[(3, 3)] += Complex64::new(1.0, 0.0);
        m
    }

    pub fn rho_sep(&self) -> Matrix4c {
        linalg::outer(self.sep_states[0].amplitudes()).scale(self.sep_weight)
            + linalg::outer(self.sep_states[1].amplitudes()).scale(1.0 - self.sep_weight)
    }

    /// μρ_sep + (1−μ)|ψ⟩⟨ψ|.
    pub fn rho2(&self) -> Matrix4c {
        self.rho_sep().scale(self.mu) + linalg::outer(self.psi().amplitudes()).scale(1.0 - self.mu)
    }

    pub fn pure_concurrence(&self) -> f64 {
        concurrence_pure(&self.psi()).unwrap_or(0.0)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let omega = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
        let (b, a) = omega.sin_cos();
        Self {
            mu: rng.gen(),
            a,
            b,
            theta: rng.gen_range(0.0..std::f64::consts::TAU),
            phi: rng.gen_range(0.0..std::f64::consts::TAU),
            sep_weight: rng.gen(),
            sep_states: [random_h3_product(a, b, rng), random_h3_product(a, b, rng)],
        }
    }
}

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Product state (p₀|0⟩+p₁|1⟩)⊗(q₀|0⟩+q₁|1⟩) inside H₃, i.e. with
/// p₀q₁ : p₁q₀ = a : b.
pub fn random_h3_product<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> PureState {
    loop {
        let (p0, p1, q0) = (gaussian_c(rng), gaussian_c(rng), gaussian_c(rng));
        let (p, q) = if b.abs() > 1e-9 {
            let q1 = p1 * q0 * a / (p0 * b);
            ([p0, p1], [q0, q1])
        } else if rng.gen::<bool>() {
            // b = 0: |10⟩ must vanish, so either p₁ = 0 or q₀ = 0.
            ([p0, 0.0.into()], [q0, gaussian_c(rng)])
        } else {
            ([p0, p1], [0.0.into(), gaussian_c(rng)])
        };
        if let Ok(psi) = PureState::product(p, q) {
            if psi.amplitudes().iter().all(|z| z.is_finite()) {
                return psi;
            }
        }
    }
}

/// ρ₃ = λΠ₃/3 + (1−λ)[μρ_sep + (1−μ)|ψ⟩⟨ψ|].
#[derive(Clone, Debug, PartialEq)]
pub struct Rank3Mixture {
    pub lambda: f64,
    pub core: MixtureCore,
}

impl Rank3Mixture {
    pub fn assemble(&self) -> DensityOperator {
        let m = self.core.pi3().scale(self.lambda / 3.0) + self.core.rho2().scale(1.0 - self.lambda);
        DensityOperator::from_matrix_unchecked(linalg::hermitian_part(&m))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self { lambda: rng.gen(), core: MixtureCore::random(rng) }
    }
}

/// ρ₄ = λ₁·1/4 + λ₂Π₃/3 + (1−λ₁−λ₂)[μρ_sep + (1−μ)|ψ⟩⟨ψ|].
#[derive(Clone, Debug, PartialEq)]
pub struct Rank4Mixture {
    pub lambda1: f64,
    pub lambda2: f64,
    pub core: MixtureCore,
}

impl Rank4Mixture {
    pub fn new(lambda1: f64, lambda2: f64, core: MixtureCore) -> Result<Self> {
        if lambda1 < -WEIGHT_TOL || lambda2 < -WEIGHT_TOL || lambda1 + lambda2 > 1.0 + WEIGHT_TOL {
            return Err(Error::Infeasible { lambda1, lambda2 });
        }
        Ok(Self { lambda1, lambda2, core })
    }

    pub fn assemble(&self) -> DensityOperator {
        let rest = 1.0 - self.lambda1 - self.lambda2;
        let m = Matrix4c::identity().scale(self.lambda1 / 4.0)
            + self.core.pi3().scale(self.lambda2 / 3.0)
            + self.core.rho2().scale(rest);
        DensityOperator::from_matrix_unchecked(linalg::hermitian_part(&m))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let w = crate::qstate::dirichlet_uniform(3, rng);
        Self { lambda1: w[0], lambda2: w[1], core: MixtureCore::random(rng) }
    }
}

/// C(ρ₃) ≤ (1−λ)(1−μ)C(ψ).
pub fn rank3_bound(m: &Rank3Mixture) -> f64 {
    (1.0 - m.lambda) * (1.0 - m.core.mu) * m.core.pure_concurrence()
}

/// λΠ₃/3 + (1−λ)|ψ_ab⟩⟨ψ_ab|: diag(λ/3, ·, ·, λ/3) with the
/// (1 − 2λ/3)(a², ab; ab, b²) block.
pub fn rank3_max_state(lambda: f64, a: f64, b: f64) -> DensityOperator {
    Rank3Mixture { lambda, core: MixtureCore::pure_only(a, b, 0.0, 0.0) }.assemble()
}

/// 2(1 − 2λ/3)ab − 2λ/3.
pub fn rank3_max_concurrence(lambda: f64, a: f64, b: f64) -> f64 {
    2.0 * (1.0 - 2.0 * lambda / 3.0) * a * b - 2.0 * lambda / 3.0
}

/// Largest λ for which the maximal rank-3 mixture is entangled: 3ab/(1+2ab).
pub fn rank3_threshold(a: f64, b: f64) -> f64 {
    let ab = a * b;
    3.0 * ab / (1.0 + 2.0 * ab)
}

/// C(ρ₄) ≤ (1−λ₁−λ₂)(1−μ)C(ψ).
pub fn rank4_bound(m: &Rank4Mixture) -> f64 {
    (1.0 - m.lambda1 - m.lambda2) * (1.0 - m.core.mu) * m.core.pure_concurrence()
}

/// ρ₄ with no separable part and |ψ⟩ = (|01⟩ + |10⟩)/√2.
pub fn rank4_max_state(lambda1: f64, lambda2: f64) -> Result<DensityOperator> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Rank4Mixture::new(lambda1, lambda2, MixtureCore::pure_only(h, h, 0.0, 0.0))?.assemble())
}

/// λ₂ab/3 + (1−λ₁−λ₂)/2 − λ₁/4 − λ₂/3 at ab = ½.
pub fn rank4_max_concurrence(lambda1: f64, lambda2: f64) -> f64 {
    let ab = 0.5;
    lambda2 * ab / 3.0 + (1.0 - lambda1 - lambda2) / 2.0 - lambda1 / 4.0 - lambda2 / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionClass {
    #[serde(rename = "E")]
    Entangled,
    #[serde(rename = "S")]
    Separable,
    #[serde(rename = "X")]
    Infeasible,
}

impl RegionClass {
    pub fn code(self) -> &'static str {
        match self {
            RegionClass::Entangled => "E",
            RegionClass::Separable => "S",
            RegionClass::Infeasible => "X",
        }
    }
}

pub fn classify(lambda1: f64, lambda2: f64) -> RegionClass {
    if lambda1 + lambda2 > 1.0 + WEIGHT_TOL {
        RegionClass::Infeasible
    } else if 9.0 * lambda1 + 8.0 * lambda2 < 6.0 {
        RegionClass::Entangled
    } else {
        RegionClass::Separable
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    #[serde(skip)]
    pub i: usize,
    #[serde(skip)]
    pub j: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub class: RegionClass,
}

/// Classifies the `grid_n × grid_n` grid λ₁ = i/(n−1), λ₂ = j/(n−1),
/// row-major in i. Classification uses exact integer arithmetic on indices.
pub fn rank4_region(grid_n: usize, exec: Execution) -> Result<Vec<RegionCell>> {
    if grid_n < 2 {
        return Err(Error::BadArgs(format!("grid size {grid_n} < 2")));
    }
    let last = grid_n - 1;
    Ok(par::map_indexed(grid_n * grid_n, exec, |k| {
        let (i, j) = (k / grid_n, k % grid_n);
        let class = if i + j > last {
            RegionClass::Infeasible
        } else if 9 * i + 8 * j < 6 * last {
            RegionClass::Entangled
        } else {
            RegionClass::Separable
        };
        RegionCell { i, j, lambda1: i as f64 / last as f64, lambda2: j as f64 / last as f64, class }
    }))
}

/// Cells classified E with an S 4-neighbour, or S with an E 4-neighbour.
pub fn region_boundary(cells: &[RegionCell], grid_n: usize) -> Vec<RegionCell> {
    let at = |i: usize, j: usize| cells[i * grid_n + j].class;
    cells
        .iter()
        .filter(|c| {
            let opposite = match c.class {
                RegionClass::Entangled => RegionClass::Separable,
                RegionClass::Separable => RegionClass::Entangled,
                RegionClass::Infeasible => return false,
            };
            let mut neighbours = Vec::with_capacity(4);
            if c.i > 0 {
                neighbours.push((c.i - 1, c.j));
            }
            if c.i + 1 < grid_n {
                neighbours.push((c.i + 1, c.j));
            }
            if c.j > 0 {
                neighbours.push((c.i, c.j - 1));
            }
            if c.j + 1 < grid_n {
                neighbours.push((c.i, c.j + 1));
            }
            neighbours.into_iter().any(|(i, j)| at(i, j) == opposite)
        })
        .copied()
        .collect()
}

pub fn write_region_csv<W: Write>(cells: &[RegionCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lambda1", "lambda2", "class"])?;
    for c in cells {
        w.write_record([c.lambda1.to_string(), c.lambda2.to_string(), c.class.code().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// ρ₃ = ν₁|χ₁⟩⟨χ₁| + ν₂|χ₂⟩⟨χ₂| + (1−ν₁−ν₂)|χ₃⟩⟨χ₃| with χ₁, χ₂ as in the
/// rank-2 canonical form and
/// |χ₃⟩ = cosξ(sinα|00⟩ − cosα|11⟩) + sinξ(sinθ e^{−iφ₁}|01⟩ + cosθ e^{−iφ₂}|10⟩).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank3Canonical {
    pub nu1: f64,
    pub nu2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub xi: f64,
    pub theta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Rank3Canonical {
    /// Fixes ξ and φ₂ from ⟨χ₂|χ₃⟩ = 0, leaving eight free parameters.
    /// `branch` selects between the two φ₂ solutions.
    #[allow(clippy::too_many_arguments)]
    pub fn solve(
        nu1: f64,
        nu2: f64,
        alpha: f64,
        beta: f64,
        gamma: f64,
        eta: f64,
        theta: f64,
        phi1: f64,
        branch: bool,
    ) -> Result<Self> {
        let nu3 = 1.0 - nu1 - nu2;
        if !(nu1 >= 0.0 && nu1 <= nu2 && nu2 <= nu3) {
            return Err(Error::BadArgs(format!(
                "eigenvalues must be nondecreasing and nonnegative (got {nu1}, {nu2}, {nu3})"
            )));
        }
        let (sb, cb) = beta.sin_cos();
        let (st, ct) = theta.sin_cos();
        let (se, ce) = eta.sin_cos();
        let k = Complex64::from_polar(sb * st, gamma - phi1);
        let scale = cb * ct;
        if scale.abs() < 1e-14 {
            return Err(Error::DomainError("cosβ cosθ = 0 leaves φ₂ unconstrained".into()));
        }
        let sin_phi2 = k.im / scale;
        if sin_phi2.abs() > 1.0 {
            return Err(Error::DomainError(format!("orthogonality needs sin φ₂ = {sin_phi2}")));
        }
        let base = sin_phi2.asin();
        let phi2 = if branch { std::f64::consts::PI - base } else { base };
        let real = k.re + scale * phi2.cos();
        let xi = (-ce).atan2(se * real);
        Ok(Self { nu1, nu2, alpha, beta, gamma, eta, xi, theta, phi1, phi2 })
    }

    fn rank2_part(&self) -> Rank2Canonical {
        Rank2Canonical { nu: 0.0, alpha: self.alpha, beta: self.beta, gamma: self.gamma, eta: self.eta }
    }

    pub fn eigenvectors(&self) -> [[Complex64; 4]; 3] {
        let r2 = self.rank2_part();
        let (sa, ca) = self.alpha.sin_cos();
        let (sx, cx) = self.xi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        let chi3 = [
            (cx * sa).into(),
            Complex64::from_polar(sx * st, -self.phi1),
            Complex64::from_polar(sx * ct, -self.phi2),
            (-cx * ca).into(),
        ];
        [r2.chi(), r2.chi_perp(), chi3]
    }

    /// max |⟨χᵢ|χⱼ⟩ − δᵢⱼ|.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.eigenvectors();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let ip: Complex64 = v[i].iter().zip(v[j].iter()).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn assemble(&self) -> DensityOperator {
        let v = self.eigenvectors();
        let weights = [self.nu1, self.nu2, 1.0 - self.nu1 - self.nu2];
        let m = v
            .iter()
            .zip(weights)
            .fold(Matrix4c::zeros(), |acc, (x, w)| acc + linalg::outer(x).scale(w));
        DensityOperator::from_matrix_unchecked(m)
    }
}
