//! Rank-2 states: canonical form, closed-form local observables, and the
//! reconstruction of the canonical parameters from the two polarizations.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::linalg::{self, Matrix4c};
use crate::qstate::DensityOperator;

/// Absolute threshold below which a reconstruction denominator counts as zero.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-8;
/// Largest forward residual accepted from a reconstructed candidate.
const RECONSTRUCTION_RESIDUAL_TOL: f64 = 1e-6;

/// ρ₂ = ν|χ⟩⟨χ| + (1−ν)|χ⊥⟩⟨χ⊥| with
/// |χ⟩ = cosα|00⟩ + sinα|11⟩ and
/// |χ⊥⟩ = cosη(sinα|00⟩ − cosα|11⟩) + sinη(sinβ e^{−iγ}|01⟩ + cosβ|10⟩).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Canonical {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl Rank2Canonical {
    pub fn chi(&self) -> [Complex64; 4] {
        let (s, c) = self.alpha.sin_cos();
        [c.into(), 0.0.into(), 0.0.into(), s.into()]
    }

    pub fn chi_perp(&self) -> [Complex64; 4] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let (se, ce) = self.eta.sin_cos();
        [
            (ce * sa).into(),
            Complex64::from_polar(se * sb, -self.gamma),
            (se * cb).into(),
            (-ce * ca).into(),
        ]
    }
}

pub fn assemble_rank2(params: &Rank2Canonical) -> DensityOperator {
    let m = linalg::outer(&params.chi()).scale(params.nu)
        + linalg::outer(&params.chi_perp()).scale(1.0 - params.nu);
    DensityOperator::from_matrix_unchecked(m)
}

/// Closed-form (P, S) of the canonical rank-2 state.
pub fn local_observables_rank2(params: &Rank2Canonical) -> (Vector3<f64>, Vector3<f64>) {
    let Rank2Canonical { nu, alpha, beta, gamma, eta } = *params;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let (se, ce) = eta.sin_cos();
    let k = 2.0 * (1.0 - nu) * ce * se;
    let c2a = (2.0 * alpha).cos();
    let c2b = (2.0 * beta).cos();
    let p = Vector3::new(
        k * (sa * cb - ca * sb * cg),
        -k * ca * sb * sg,
        nu * c2a - (1.0 - nu) * (ce * ce * c2a + se * se * c2b),
    );
    let s = Vector3::new(
        k * (sa * sb * cg - ca * cb),
        -k * sa * sb * sg,
        nu * c2a - (1.0 - nu) * (ce * ce * c2a - se * se * c2b),
    );
    (p, s)
}

fn forward_residual(params: &Rank2Canonical, p: &Vector3<f64>, s: &Vector3<f64>) -> f64 {
    let (fp, fs) = local_observables_rank2(params);
    (fp - p).amax().max((fs - s).amax())
}

/// Recovers the canonical parameters from the two single-qubit polarizations.
///
/// 1. tanα = S_y / P_y.
/// 2. R₁ = P_x/S_x and R₂ = P_y/P_x fix X = sinβ cosγ and Y = sinβ sinγ
///    relative to cosβ; normalization X² + Y² + cos²β = 1 gives β.
/// 3. P_z − S_z (or P_z + S_z when cos2β ≈ 0) together with the transverse
///    scale k = 2(1−ν)cosη sinη give η and ν.
/// 4. sinγ takes the sign of −P_y.
pub fn reconstruct_rank2(p: &Vector3<f64>, s: &Vector3<f64>, tol: f64) -> Result<Rank2Canonical> {
    let finite = p.iter().chain(s.iter()).all(|x| x.is_finite());
    if !finite {
        return Err(Error::BadArgs("non-finite polarization".into()));
    }
    if p.y.abs() <= tol || s.y.abs() <= tol {
        return Err(Error::ReconstructionDegenerate("P_y or S_y vanishes"));
    }
    if p.y * s.y < 0.0 {
        return Err(Error::InconsistentData { residual: (p.y * s.y).abs() });
    }
    let alpha = s.y.abs().atan2(p.y.abs());
    let (sa, ca) = alpha.sin_cos();

    if s.x.abs() <= tol || p.x.abs() <= tol {
        return Err(Error::ReconstructionDegenerate("P_x or S_x vanishes"));
    }
    let r1 = p.x / s.x;
    let r2 = p.y / p.x;
    let denom = ca + r1 * sa;
    if denom.abs() <= tol {
        return Err(Error::ReconstructionDegenerate("cos 2α = 0 or cos β = 0"));
    }
    let x_over_c = (sa + r1 * ca) / denom;
    let y_over_c = -r2 * (sa - ca * x_over_c) / ca;
    let cos_beta = 1.0 / (1.0 + x_over_c * x_over_c + y_over_c * y_over_c).sqrt();
    let beta = cos_beta.acos();
    let sin_beta = (1.0 - cos_beta * cos_beta).max(0.0).sqrt();
    let x = x_over_c * cos_beta;
    let gamma0 = (x / sin_beta).clamp(-1.0, 1.0).acos();
    let gamma = if p.y > 0.0 { 2.0 * PI - gamma0 } else { gamma0 };
    let sin_gamma = gamma.sin();

    // k·Y = −(cosα P_y + sinα S_y)
    let k = -(ca * p.y + sa * s.y) / (sin_beta * sin_gamma);
    if !(k > tol) {
        return Err(Error::ReconstructionDegenerate("transverse polarization scale vanishes"));
    }

    let c2a = (2.0 * alpha).cos();
    let c2b = (2.0 * beta).cos();
    let mut etas = Vec::with_capacity(3);
    if c2b.abs() > tol {
        // (1−ν) sin²η cos2β = −(P_z − S_z)/2
        let f = -(p.z - s.z) / (2.0 * c2b);
        etas.push((2.0 * f).atan2(k));
    }
    // ν − (1−ν)cos²η = (P_z + S_z)/(2cos2α): quadratic in tanη.
    let d = (p.z + s.z) / (2.0 * c2a);
    let r = (1.0 - d) / k;
    let disc = r * r - 2.0;
    if disc >= 0.0 {
        let root = disc.sqrt();
        etas.extend([(r + root).atan(), (r - root).atan()]);
    }

    let mut best: Option<(f64, Rank2Canonical)> = None;
    for eta in etas {
        let sin2eta = (2.0 * eta).sin();
        if !(0.0..=PI / 2.0).contains(&eta) || sin2eta.abs() <= tol {
            continue;
        }
        let nu = 1.0 - k / sin2eta;
        if !(-tol..=1.0 + tol).contains(&nu) {
            continue;
        }
        let candidate = Rank2Canonical { nu: nu.clamp(0.0, 1.0), alpha, beta, gamma, eta };
        let residual = forward_residual(&candidate, p, s);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, candidate));
        }
    }
    match best {
        Some((residual, params)) if residual <= RECONSTRUCTION_RESIDUAL_TOL => Ok(params),
        Some((residual, _)) => Err(Error::InconsistentData { residual }),
        None => Err(Error::InconsistentData { residual: f64::INFINITY }),
    }
}

/// ρ₂ = λρ_s + (1−λ)|ψ⟩⟨ψ| with ρ_s = μ|00⟩⟨00| + (1−μ)|χ₂⟩⟨χ₂|,
/// |χ₂⟩ = a|10⟩ + b|11⟩ and |ψ⟩ = cosθ|00⟩ + e^{i·phase} sinθ |χ₂⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2SepDecomp {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub phase: f64,
}

impl Rank2SepDecomp {
    pub fn chi2(&self) -> [Complex64; 4] {
        [0.0.into(), 0.0.into(), self.a.into(), self.b.into()]
    }

    pub fn psi(&self) -> [Complex64; 4] {
        let (st, ct) = self.theta.sin_cos();
        let ph = Complex64::from_polar(st, self.phase);
        [ct.into(), 0.0.into(), ph * self.a, ph * self.b]
    }

    pub fn assemble(&self) -> DensityOperator {
        let mut up = [Complex64::new(0.0, 0.0); 4];
        up[0] = 1.0.into();
        let sep: Matrix4c = linalg::outer(&up).scale(self.mu)
            + linalg::outer(&self.chi2()).scale(1.0 - self.mu);
        let m = sep.scale(self.lambda) + linalg::outer(&self.psi()).scale(1.0 - self.lambda);
        DensityOperator::from_matrix_unchecked(m)
    }
}

/// C = max(√(1−I₁), √(1−I₂)).
pub fn estimate_rank2_sep2(inv: &InvariantVector) -> f64 {
    (1.0 - inv.i1).max(0.0).sqrt().max((1.0 - inv.i2).max(0.0).sqrt())
}
