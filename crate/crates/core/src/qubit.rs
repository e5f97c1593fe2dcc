//! Fisher-information/negativity correspondence for entangled
//! photon-number-qubit states.
//!
//! The qubit outcome density is phase sensitive: J₀ depends on the relative
//! argument φ of the qubit amplitudes because the QPSK encoding singles out
//! directions in phase space. Averaging over φ removes that arbitrariness
//! and leaves a quantity that depends on the state only through t|c₀||c₁|,
//! the same combination that fixes the qubit logarithmic negativity.

use crate::bell::{fisher_information, BellSource, DerivativeConfig, IntegratorConfig};
use crate::error::{Error, Result};
use crate::states::{local_flip, make_qubit_state, Mode, QubitEntangledState};

/// φ-resolved and φ-averaged Fisher information for one qubit state.
#[derive(Debug, Clone)]
pub struct QubitFisherResult {
    pub j_phi: Vec<(f64, f64)>,
    pub j_avg: f64,
    /// t·|c₀|·|c₁|.
    pub product: f64,
}

/// J₀ for ρ_qubit at a single phase. Displacement matrix elements only
/// involve Fock indices 0 and 1, so there is no truncation error here.
pub fn qubit_fisher(
    q: &QubitEntangledState,
    phi_override: Option<f64>,
    dcfg: &DerivativeConfig,
    icfg: &IntegratorConfig,
) -> Result<f64> {
    let state = match phi_override {
        Some(phi) => q.with_phase(phi),
        None => *q,
    };
    let rho = make_qubit_state(&state, false);
    fisher_information(BellSource::General(&rho), dcfg, icfg)
}

/// Trapezoidal φ-average of J₀ over a uniform grid on [0, 2π). On a periodic
/// integrand the trapezoid rule degenerates to the plain mean of the grid
/// values and converges spectrally.
pub fn averaged_qubit_fisher(
    q: &QubitEntangledState,
    n_phi: usize,
    dcfg: &DerivativeConfig,
    icfg: &IntegratorConfig,
) -> Result<QubitFisherResult> {
    if n_phi < 8 {
        return Err(Error::domain("phi average needs at least 8 grid points"));
    }
    let mut j_phi = Vec::with_capacity(n_phi);
    for m in 0..n_phi {
        let phi = 2.0 * std::f64::consts::PI * m as f64 / n_phi as f64;
        let j = qubit_fisher(q, Some(phi), dcfg, icfg)?;
        j_phi.push((phi, j));
    }
    let j_avg = j_phi.iter().map(|(_, j)| j).sum::<f64>() / n_phi as f64;
    Ok(QubitFisherResult {
        j_phi,
        j_avg,
        product: q.coherence_product(),
    })
}

/// Closed-form qubit logarithmic negativity E_N = log₂(1 + 2t|c₀||c₁|).
pub fn ln_qubit(q: &QubitEntangledState) -> f64 {
    (1.0 + 2.0 * q.coherence_product()).log2()
}

/// φ-averaged Fisher information of the flip-decoded pipeline: the state is
/// built in the |ξ'⟩ = c₀|0,0⟩ + c₁|1,1⟩ form and the 0↔1 flip on mode B is
/// applied before decoding, which restores the |ξ⟩ form exactly.
pub fn flipped_fisher(
    q: &QubitEntangledState,
    n_phi: usize,
    dcfg: &DerivativeConfig,
    icfg: &IntegratorConfig,
) -> Result<f64> {
    if n_phi < 8 {
        return Err(Error::domain("phi average needs at least 8 grid points"));
    }
    let mut total = 0.0;
    for m in 0..n_phi {
        let phi = 2.0 * std::f64::consts::PI * m as f64 / n_phi as f64;
        let primed = make_qubit_state(&q.with_phase(phi), true);
        let decoded = local_flip(&primed, Mode::B)?;
        total += fisher_information(BellSource::General(&decoded), dcfg, icfg)?;
    }
    Ok(total / n_phi as f64)
}

/// φ-averaged Fisher information of the |ξ'⟩-form state decoded *without*
/// the flip; with it the one-to-one correspondence with the negativity is
/// lost, which the tests demonstrate by counterexample.
pub fn unflipped_primed_fisher(
    q: &QubitEntangledState,
    n_phi: usize,
    dcfg: &DerivativeConfig,
    icfg: &IntegratorConfig,
) -> Result<f64> {
    if n_phi < 8 {
        return Err(Error::domain("phi average needs at least 8 grid points"));
    }
    let mut total = 0.0;
    for m in 0..n_phi {
        let phi = 2.0 * std::f64::consts::PI * m as f64 / n_phi as f64;
        let primed = make_qubit_state(&q.with_phase(phi), true);
        total += fisher_information(BellSource::General(&primed), dcfg, icfg)?;
    }
    Ok(total / n_phi as f64)
}
