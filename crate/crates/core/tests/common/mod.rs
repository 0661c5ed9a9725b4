//! Brute-force reference implementations used only by the integration tests.
//! Nothing here shares code with the library's linear algebra: eigenvectors
//! come from a cyclic complex Jacobi sweep, and the concurrence from the
//! singular values of τᵢⱼ = wᵢᵀ(σ_y⊗σ_y)wⱼ with wᵢ = √pᵢ vᵢ.

#![allow(dead_code)]

use concurrence_core::DensityOperator;
use num_complex::Complex64;

pub type M4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn to_array(rho: &DensityOperator) -> M4 {
    let m = rho.matrix();
    std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)]))
}

fn off_norm(a: &M4) -> f64 {
    let mut s = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            if r != c {
                s += a[r][c].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues and eigenvectors (columns of the second result) of a
/// Hermitian 4×4 matrix.
pub fn jacobi_eigh(mut a: M4) -> ([f64; 4], M4) {
    let mut v: M4 = std::array::from_fn(|r| std::array::from_fn(|c| if r == c { Complex64::new(1.0, 0.0) } else { ZERO }));
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    for _sweep in 0..100 {
        if off_norm(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                let apq = a[p][q];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                // Phase q so that a_pq becomes real, then a real rotation.
                let phase = Complex64::from_polar(1.0, -apq.arg());
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(a[q][q].re - a[p][p].re);
                let (s, c) = theta.sin_cos();
                // U = D·R with D = diag(.., phase at q, ..); columns p, q of U:
                // u_p = c e_p − s·phase e_q, u_q = s e_p + c·phase e_q.
                let up = [(p, Complex64::new(c, 0.0)), (q, -phase * s)];
                let uq = [(p, Complex64::new(s, 0.0)), (q, phase * c)];
                // A ← A U (columns p, q).
                for r in 0..4 {
                    let cp: Complex64 = up.iter().map(|&(k, u)| a[r][k] * u).sum();
                    let cq: Complex64 = uq.iter().map(|&(k, u)| a[r][k] * u).sum();
                    a[r][p] = cp;
                    a[r][q] = cq;
                }
                // A ← U† A (rows p, q).
                for c2 in 0..4 {
                    let rp: Complex64 = up.iter().map(|&(k, u)| u.conj() * a[k][c2]).sum();
                    let rq: Complex64 = uq.iter().map(|&(k, u)| u.conj() * a[k][c2]).sum();
                    a[p][c2] = rp;
                    a[q][c2] = rq;
                }
                for r in 0..4 {
                    let cp: Complex64 = up.iter().map(|&(k, u)| v[r][k] * u).sum();
                    let cq: Complex64 = uq.iter().map(|&(k, u)| v[r][k] * u).sum();
                    v[r][p] = cp;
                    v[r][q] = cq;
                }
            }
        }
    }
    (std::array::from_fn(|k| a[k][k].re), v)
}

/// Singular values of a complex matrix given by its columns (one-sided Jacobi).
pub fn singular_values(mut cols: Vec<Vec<Complex64>>) -> Vec<f64> {
    let n = cols.len();
    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]).re;
                let beta = dot(&cols[q], &cols[q]).re;
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= 1e-17 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = Complex64::from_polar(1.0, -gamma.arg());
                for z in cols[q].iter_mut() {
                    *z *= phase;
                }
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..cols[p].len() {
                    let (xp, xq) = (cols[p][k], cols[q][k]);
                    cols[p][k] = xp * c - xq * s;
                    cols[q][k] = xp * s + xq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = cols.iter().map(|c| dot(c, c).re.sqrt()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// (λ₁ ≥ … ≥ λ₄, concurrence).
pub fn brute_force(rho: &DensityOperator) -> ([f64; 4], f64) {
    let (p, v) = jacobi_eigh(to_array(rho));
    let pmax = p.iter().copied().fold(0.0, f64::max);
    // Weights below round-off are dropped: √p would otherwise inject
    // spurious O(1e-8) columns.
    let ws: Vec<[Complex64; 4]> = (0..4)
        .filter(|&k| p[k] > 1e-13 * pmax)
        .map(|k| std::array::from_fn(|r| v[r][k] * p[k].sqrt()))
        .collect();
    // σ_y⊗σ_y acts as |00⟩↔ −|11⟩, |01⟩↔ |10⟩ on the basis amplitudes.
    let flip = |w: &[Complex64; 4]| [-w[3], w[2], w[1], -w[0]];
    let cols: Vec<Vec<Complex64>> = ws
        .iter()
        .map(|wj| {
            let fj = flip(wj);
            ws.iter().map(|wi| (0..4).map(|k| wi[k] * fj[k]).sum()).collect()
        })
        .collect();
    let mut s = singular_values(cols);
    s.resize(4, 0.0);
    let lambdas = [s[0], s[1], s[2], s[3]];
    (lambdas, (s[0] - s[1] - s[2] - s[3]).max(0.0))
}

pub fn brute_force_concurrence(rho: &DensityOperator) -> f64 {
    brute_force(rho).1
}
