//! Logarithmic negativity: partial transpose in the Fock basis, trace norm
//! via Hermitian eigendecomposition, the pure-state shortcut, and closed
//! forms for the squeezed and photon-subtracted families.
//!
//! The dense eigensolve is the baseline. States that commute with the
//! photon-number difference have a partial transpose that is block diagonal
//! in total photon number; the blockwise path exploits this and is validated
//! against the dense route in the tests.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{DensityMatrixFock, SchmidtDiagonalState, TwoModeFockMixture};

/// Outcome of a logarithmic-negativity computation. `value` is in bits.
#[derive(Debug, Clone, Copy)]
pub struct LnResult {
    pub value: f64,
    pub trace_norm: f64,
    pub min_pt_eigenvalue: f64,
}

/// Partial transpose on mode B: the entry at ((m_a, m_b), (n_a, n_b)) moves
/// to ((m_a, n_b), (n_a, m_b)). Hermiticity and trace are preserved.
pub fn partial_transpose(rho: &DensityMatrixFock) -> DMatrix<Complex64> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let dim = da * db;
    let mut out = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for ma in 0..da {
        for mb in 0..db {
            for na in 0..da {
                for nb in 0..db {
                    out[(ma * db + nb, na * db + mb)] = rho.get(ma, mb, na, nb);
                }
            }
        }
    }
    out
}

fn hermitize(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (h + h.adjoint()).map(|z| z * 0.5)
}

fn eigenvalues_complex(h: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 50_000)
        .ok_or_else(|| Error::numeric("Hermitian eigensolver failed to converge"))?;
    Ok(eig.eigenvalues.iter().cloned().collect())
}

fn eigenvalues_real(h: DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 50_000)
        .ok_or_else(|| Error::numeric("symmetric eigensolver failed to converge"))?;
    Ok(eig.eigenvalues.iter().cloned().collect())
}

/// Σ|eigenvalues| of a Hermitian matrix via dense eigendecomposition. The
/// input is symmetrized first; floating-point partial transposes drift at
/// the 1e-16 level.
pub fn trace_norm(h: &DMatrix<Complex64>) -> Result<f64> {
    let eigs = eigenvalues_complex(hermitize(h))?;
    Ok(eigs.iter().map(|v| v.abs()).sum())
}

/// Splits a flattened two-mode Hermitian matrix into blocks of constant
/// total photon number, provided every entry coupling different totals is
/// negligible. Returns None when the structure is absent.
fn number_blocks(h: &DMatrix<Complex64>, da: usize, db: usize) -> Option<Vec<Vec<usize>>> {
    let dim = da * db;
    let total = |r: usize| r / db + r % db;
    for r in 0..dim {
        for c in 0..dim {
            if total(r) != total(c) && h[(r, c)].norm() > 1e-14 {
                return None;
            }
        }
    }
    let mut blocks = vec![Vec::new(); da + db - 1];
    for r in 0..dim {
        blocks[total(r)].push(r);
    }
    Some(blocks)
}

fn spectrum_summary(eigs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut sum_abs = 0.0f64;
    let mut min = f64::INFINITY;
    for v in eigs {
        sum_abs += v.abs();
        min = min.min(v);
    }
    (sum_abs, min)
}

/// E_N = log₂‖ρ^PT‖ for an arbitrary two-mode density matrix. Uses the
/// number-block decomposition when the partial transpose has it, and the
/// dense eigensolver otherwise.
pub fn log_negativity(rho: &DensityMatrixFock) -> Result<LnResult> {
    let pt = hermitize(&partial_transpose(rho));
    let (sum_abs, min) = match number_blocks(&pt, rho.dim_a(), rho.dim_b()) {
        Some(blocks) => {
            let mut sum_abs = 0.0;
            let mut min = f64::INFINITY;
            for idx in blocks {
                let s = idx.len();
                let mut sub = DMatrix::from_element(s, s, Complex64::new(0.0, 0.0));
                for (r, &ir) in idx.iter().enumerate() {
                    for (c, &ic) in idx.iter().enumerate() {
                        sub[(r, c)] = pt[(ir, ic)];
                    }
                }
                let (s_abs, s_min) = spectrum_summary(eigenvalues_complex(sub)?);
                sum_abs += s_abs;
                min = min.min(s_min);
            }
            (sum_abs, min)
        }
        None => spectrum_summary(eigenvalues_complex(pt)?),
    };
    Ok(LnResult {
        value: sum_abs.log2(),
        trace_norm: sum_abs,
        min_pt_eigenvalue: min,
    })
}

/// Pure-state shortcut E_N = 2 log₂(Σ_n c_n) for Schmidt-diagonal states.
pub fn log_negativity_pure(state: &SchmidtDiagonalState) -> f64 {
    let sum: f64 = state.coeffs().iter().sum();
    let norm = state.norm_sq().sqrt();
    2.0 * (sum / norm).log2()
}

/// Logarithmic negativity of an on/off-heralded mixture, assembling the
/// partial-transpose blocks directly from the components. This never
/// materializes the dense two-mode density matrix, so it scales to the
/// truncations the correlation sweeps need.
pub fn log_negativity_mixture(mix: &TwoModeFockMixture) -> Result<LnResult> {
    let d = mix.fock_dim();
    let n_blocks = 2 * d - 1;
    // block M covers rows r with max(0, M-(d-1)) <= r <= min(M, d-1)
    let row_min = |m: usize| m.saturating_sub(d - 1);
    let row_max = |m: usize| m.min(d - 1);
    let mut blocks: Vec<DMatrix<f64>> = (0..n_blocks)
        .map(|m| {
            let s = row_max(m) - row_min(m) + 1;
            DMatrix::zeros(s, s)
        })
        .collect();
    let inv_norm = 1.0 / mix.norm();
    for comp in mix.components() {
        let (i, j) = (comp.offset_a, comp.offset_b);
        let base = i.max(j);
        for (p, &ap) in comp.amps.iter().enumerate() {
            let n1 = base + p;
            for (q, &aq) in comp.amps.iter().enumerate() {
                let n2 = base + q;
                // PT entry between rows (n1 - i, ...) and (n2 - i, ...) of
                // the block with total photon number n1 + n2 - i - j
                let r = n1 - i;
                let c = n2 - i;
                let m = n1 + n2 - i - j;
                let lo = row_min(m);
                blocks[m][(r - lo, c - lo)] += ap * aq * inv_norm;
            }
        }
    }
    let mut sum_abs = 0.0;
    let mut min = f64::INFINITY;
    for block in blocks {
        let (s_abs, s_min) = spectrum_summary(eigenvalues_real(block)?);
        sum_abs += s_abs;
        min = min.min(s_min);
    }
    Ok(LnResult {
        value: sum_abs.log2(),
        trace_norm: sum_abs,
        min_pt_eigenvalue: min,
    })
}

/// Which closed-form family to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnKind {
    /// Two-mode squeezed state.
    Sq,
    /// Photon-subtracted pure state (PNR heralding).
    Ng,
}

/// Closed-form logarithmic negativities: log₂((1+λ)/(1−λ)) for the squeezed
/// state and log₂((1+λT)³/((1+λ²T²)(1−λT))) for the subtracted pure state.
pub fn closed_form_en(kind: EnKind, lambda: f64, transmittance: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::domain("lambda must lie in [0, 1)"));
    }
    match kind {
        EnKind::Sq => Ok(((1.0 + lambda) / (1.0 - lambda)).log2()),
        EnKind::Ng => {
            if !(0.0..=1.0).contains(&transmittance) || transmittance == 0.0 {
                return Err(Error::domain("transmittance must lie in (0, 1]"));
            }
            let q = lambda * transmittance;
            if q >= 1.0 {
                return Err(Error::domain("lambda*T must be below 1 (divergence)"));
            }
            Ok(((1.0 + q).powi(3) / ((1.0 + q * q) * (1.0 - q))).log2())
        }
    }
}

/// λ_LN^P, the squeezing parameter below which the subtracted pure state has
/// the higher logarithmic negativity:
/// λ_LN^P = (−1 + T + √(−7T² + 18T − 7)) / (2T(2−T)).
pub fn lambda_threshold_pure(transmittance: f64) -> Result<f64> {
    if !(transmittance > 0.0 && transmittance <= 1.0) {
        return Err(Error::domain("transmittance must lie in (0, 1]"));
    }
    let t = transmittance;
    let disc = -7.0 * t * t + 18.0 * t - 7.0;
    if disc < 0.0 {
        return Err(Error::domain(
            "negative discriminant: no crossing in this transmittance regime",
        ));
    }
    Ok((-1.0 + t + disc.sqrt()) / (2.0 * t * (2.0 - t)))
}

/// Independent route to the threshold: bisection on
/// E_N^SQ(λ) = E_N^NG(λ, T).
pub fn lambda_threshold_bisect(transmittance: f64) -> Result<f64> {
    let gap = |lambda: f64| -> Result<f64> {
        Ok(closed_form_en(EnKind::Ng, lambda, transmittance)?
            - closed_form_en(EnKind::Sq, lambda, transmittance)?)
    };
    let mut lo = 1e-4;
    let mut hi = 1.0 - 1e-12;
    if gap(lo)? <= 0.0 || gap(hi)? >= 0.0 {
        return Err(Error::domain(
            "no sign change: the curves do not cross in (0, 1)",
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
