//! The entanglement-assisted QPSK coding channel: CV Bell-measurement
//! outcome densities, the quadrant channel matrix, mutual information, and
//! Fisher information in the weak-modulation limit.
//!
//! # Measurement convention
//!
//! Quadratures satisfy [x̂, p̂] = i/2. A Bell outcome is the complex point
//! ζ = x + ip and the signal displacement for letter amplitudes
//! x_s = ±√2 β, p_s = ±√2 β is β_s = (x_s + ip_s)/√2. The scale is anchored
//! by the displaced vacuum: for the vacuum resource and signal (x_s, p_s)
//! the outcome density is (1/π)·exp(−|ζ − β_s|²), a Gaussian centered at
//! (x_s/√2, p_s/√2) with per-axis variance 1/2. Every kernel below inherits
//! its normalization from this anchor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{fill_displacement_matrix, log_factorial, scaled_laguerre_row};
use crate::negativity::EnKind;
use crate::states::{DensityMatrixFock, SchmidtDiagonalState, TwoModeFockMixture};

use std::f64::consts::{LN_2, PI};

/// Scale conventions of the CV Bell measurement; see the module docs. The
/// constants exist so the convention is pinned in one place.
pub struct MeasurementConvention;

impl MeasurementConvention {
    /// [x̂, p̂] = i · COMMUTATOR_SCALE.
    pub const COMMUTATOR_SCALE: f64 = 0.5;

    /// Bell outcome coordinate ζ = x + ip.
    pub fn outcome(x: f64, p: f64) -> Complex64 {
        Complex64::new(x, p)
    }

    /// Signal displacement amplitude β_s = (x_s + ip_s)/√2.
    pub fn signal_amplitude(x_s: f64, p_s: f64) -> Complex64 {
        Complex64::new(x_s, p_s) / 2f64.sqrt()
    }
}

/// Letter sign pairs (sign_x, sign_p) in QPSK order:
/// a₀=(+,+), a₁=(−,+), a₂=(−,−), a₃=(+,−). Quadrants Q_l use the same
/// convention.
pub const QPSK_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];

/// Four displacement letters at (±β, ±β) in Bell-outcome coordinates, each
/// with prior 1/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpskConstellation {
    beta: f64,
}

impl QpskConstellation {
    pub fn new(beta: f64) -> Result<Self> {
        if beta < 0.0 {
            return Err(Error::domain("signal amplitude beta must be nonnegative"));
        }
        Ok(QpskConstellation { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// β_s for letter k, i.e. β(±1 ± i).
    pub fn signal_displacement(&self, letter: usize) -> Complex64 {
        let (sx, sp) = QPSK_SIGNS[letter];
        Complex64::new(self.beta * sx, self.beta * sp)
    }

    /// Deterministic quadrant decision; boundary points (x = 0 or p = 0) go
    /// to the positive side.
    pub fn quadrant_of(x: f64, p: f64) -> usize {
        match (x >= 0.0, p >= 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        }
    }
}

/// 4×4 conditional probabilities `p[k][l]` = P(b_l | a_k).
#[derive(Debug, Clone, Copy)]
pub struct ChannelMatrix {
    probs: [[f64; 4]; 4],
    beta: f64,
}

impl ChannelMatrix {
    pub fn probs(&self) -> &[[f64; 4]; 4] {
        &self.probs
    }

    pub fn entry(&self, letter: usize, outcome: usize) -> f64 {
        self.probs[letter][outcome]
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn row_sums(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (k, row) in self.probs.iter().enumerate() {
            out[k] = row.iter().sum();
        }
        out
    }
}

/// Tensor Gauss–Legendre quadrature per quadrant. With `half_width: None`
/// the domain [0, L]² is grown from L = 6 in steps of 2 until the four
/// quadrants capture all but 1e-9 of the probability mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub points: usize,
    pub half_width: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            points: 160,
            half_width: None,
        }
    }
}

/// Central-difference configuration for the β-derivative at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeConfig {
    pub step: f64,
    pub richardson_levels: usize,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            step: 1e-3,
            richardson_levels: 2,
        }
    }
}

/// Any state the Bell-measurement kernels accept.
#[derive(Clone, Copy)]
pub enum BellSource<'a> {
    Schmidt(&'a SchmidtDiagonalState),
    Mixture(&'a TwoModeFockMixture),
    General(&'a DensityMatrixFock),
}

struct MixtureGroup {
    /// Diagonal offset |i − j| shared by every component in the group.
    k: usize,
    /// Per-component weights a_n √(l!/(l+k)!) with l = n − max(i, j).
    comps: Vec<Vec<f64>>,
}

enum PreparedBell<'a> {
    Schmidt {
        coeffs: Vec<f64>,
    },
    Mixture {
        inv_norm: f64,
        groups: Vec<MixtureGroup>,
    },
    General {
        rho: &'a DensityMatrixFock,
        dim: usize,
    },
}

struct BellWorkspace {
    row: Vec<f64>,
    mat: DMatrix<Complex64>,
    vec: Vec<Complex64>,
}

impl<'a> PreparedBell<'a> {
    fn prepare(src: BellSource<'a>) -> (Self, BellWorkspace) {
        match src {
            BellSource::Schmidt(state) => {
                let norm = state.norm_sq().sqrt();
                let coeffs: Vec<f64> = state.coeffs().iter().map(|c| c / norm).collect();
                let ws = BellWorkspace {
                    row: vec![0.0; coeffs.len()],
                    mat: DMatrix::from_element(0, 0, Complex64::new(0.0, 0.0)),
                    vec: Vec::new(),
                };
                (PreparedBell::Schmidt { coeffs }, ws)
            }
            BellSource::Mixture(mix) => {
                let mut groups: Vec<MixtureGroup> = Vec::new();
                let mut max_len = 0;
                for comp in mix.components() {
                    let (i, j) = (comp.offset_a, comp.offset_b);
                    let k = i.abs_diff(j);
                    let weights: Vec<f64> = comp
                        .amps
                        .iter()
                        .enumerate()
                        .map(|(l, &a)| {
                            a * (0.5 * (log_factorial(l) - log_factorial(l + k))).exp()
                        })
                        .collect();
                    max_len = max_len.max(weights.len());
                    match groups.iter_mut().find(|g| g.k == k) {
                        Some(g) => g.comps.push(weights),
                        None => groups.push(MixtureGroup {
                            k,
                            comps: vec![weights],
                        }),
                    }
                }
                let ws = BellWorkspace {
                    row: vec![0.0; max_len],
                    mat: DMatrix::from_element(0, 0, Complex64::new(0.0, 0.0)),
                    vec: Vec::new(),
                };
                (
                    PreparedBell::Mixture {
                        inv_norm: 1.0 / mix.norm(),
                        groups,
                    },
                    ws,
                )
            }
            BellSource::General(rho) => {
                let dim = rho.dim_a().max(rho.dim_b());
                let ws = BellWorkspace {
                    row: vec![0.0; dim],
                    mat: DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0)),
                    vec: vec![Complex64::new(0.0, 0.0); rho.dim_a() * rho.dim_b()],
                };
                (PreparedBell::General { rho, dim }, ws)
            }
        }
    }

    /// Outcome density at displacement argument δ = β_s − ζ.
    fn density(&self, delta: Complex64, ws: &mut BellWorkspace) -> f64 {
        let u = delta.norm_sqr();
        match self {
            PreparedBell::Schmidt { coeffs } => {
                let row = &mut ws.row[..coeffs.len()];
                scaled_laguerre_row(0, u, row);
                let s: f64 = coeffs.iter().zip(row.iter()).map(|(c, l)| c * l).sum();
                s * s / PI
            }
            PreparedBell::Mixture { inv_norm, groups } => {
                let mut acc = 0.0;
                for group in groups {
                    let len = group.comps.iter().map(|c| c.len()).max().unwrap_or(0);
                    let row = &mut ws.row[..len];
                    scaled_laguerre_row(group.k, u, row);
                    let u_pow = u.powf(0.5 * group.k as f64);
                    for comp in &group.comps {
                        let s: f64 = comp.iter().zip(row.iter()).map(|(w, l)| w * l).sum();
                        let t = u_pow * s;
                        acc += t * t;
                    }
                }
                acc * inv_norm / PI
            }
            PreparedBell::General { rho, dim } => {
                fill_displacement_matrix(*dim, delta, &mut ws.row, &mut ws.mat);
                let (da, db) = (rho.dim_a(), rho.dim_b());
                for na in 0..da {
                    for nb in 0..db {
                        // v[(n_a, n_b)] = ⟨n_b|D(δ)|n_a⟩*
                        ws.vec[na * db + nb] = ws.mat[(nb, na)].conj();
                    }
                }
                let m = rho.matrix();
                let mut total = Complex64::new(0.0, 0.0);
                for r in 0..ws.vec.len() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (c, vc) in ws.vec.iter().enumerate() {
                        acc += m[(r, c)] * vc;
                    }
                    total += ws.vec[r].conj() * acc;
                }
                total.re / PI
            }
        }
    }
}

fn density_at(src: BellSource<'_>, x_s: f64, p_s: f64, x: f64, p: f64) -> f64 {
    let (prep, mut ws) = PreparedBell::prepare(src);
    let delta = MeasurementConvention::signal_amplitude(x_s, p_s)
        - MeasurementConvention::outcome(x, p);
    prep.density(delta, &mut ws)
}

/// P(x, p | x_s, p_s) = (1/π) e^(−u) (Σ_n c_n L_n(u))² with u = |β_s − ζ|²,
/// for Schmidt-diagonal states.
pub fn bell_density_schmidt(
    state: &SchmidtDiagonalState,
    x_s: f64,
    p_s: f64,
    x: f64,
    p: f64,
) -> f64 {
    density_at(BellSource::Schmidt(state), x_s, p_s, x, p)
}

/// Outcome density of an on/off-heralded mixture; components add
/// incoherently so the result depends on ζ only through |β_s − ζ|.
pub fn bell_density_mixture(mix: &TwoModeFockMixture, x_s: f64, p_s: f64, x: f64, p: f64) -> f64 {
    density_at(BellSource::Mixture(mix), x_s, p_s, x, p)
}

/// Outcome density for an arbitrary two-mode density matrix, contracting ρ
/// with displacement matrix elements on both sides. Relative phases between
/// coherences are carried by the matrix elements themselves.
pub fn bell_density_general(rho: &DensityMatrixFock, x_s: f64, p_s: f64, x: f64, p: f64) -> f64 {
    density_at(BellSource::General(rho), x_s, p_s, x, p)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0f64;
            let mut p1 = 0.0f64;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            pp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct ResolvedIntegrator {
    xs: Vec<f64>,
    ws: Vec<f64>,
}

fn build_integrator(t_nodes: &[f64], t_weights: &[f64], l: f64) -> ResolvedIntegrator {
    ResolvedIntegrator {
        xs: t_nodes.iter().map(|t| 0.5 * l * (t + 1.0)).collect(),
        ws: t_weights.iter().map(|w| 0.5 * l * w).collect(),
    }
}

const AUTO_L_START: f64 = 6.0;
const AUTO_L_STEP: f64 = 2.0;
const AUTO_L_MAX: f64 = 40.0;

fn resolve_integrator(
    prep: &PreparedBell<'_>,
    ws: &mut BellWorkspace,
    cfg: &IntegratorConfig,
) -> Result<ResolvedIntegrator> {
    if cfg.points < 2 {
        return Err(Error::domain("integrator needs at least 2 points per axis"));
    }
    let (t_nodes, t_weights) = gauss_legendre(cfg.points);
    if let Some(l) = cfg.half_width {
        if l.is_nan() || l <= 0.0 {
            return Err(Error::domain("integrator half-width must be positive"));
        }
        return Ok(build_integrator(&t_nodes, &t_weights, l));
    }
    let mut l = AUTO_L_START;
    loop {
        let integ = build_integrator(&t_nodes, &t_weights, l);
        let mass: f64 = quadrant_probabilities(prep, ws, &integ, Complex64::new(0.0, 0.0))
            .iter()
            .sum();
        if mass >= 1.0 - 1e-9 {
            return Ok(integ);
        }
        l += AUTO_L_STEP;
        if l > AUTO_L_MAX {
            return Err(Error::numeric(
                "integration domain grew past its cap without capturing the probability mass",
            ));
        }
    }
}

fn quadrant_probabilities(
    prep: &PreparedBell<'_>,
    work: &mut BellWorkspace,
    integ: &ResolvedIntegrator,
    beta_s: Complex64,
) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (l, &(sx, sp)) in QPSK_SIGNS.iter().enumerate() {
        let mut acc = 0.0;
        for (xi, wi) in integ.xs.iter().zip(&integ.ws) {
            let x = sx * xi;
            let mut inner = 0.0;
            for (pj, wj) in integ.xs.iter().zip(&integ.ws) {
                let p = sp * pj;
                let delta = Complex64::new(beta_s.re - x, beta_s.im - p);
                inner += wj * prep.density(delta, work);
            }
            acc += wi * inner;
        }
        out[l] = acc;
    }
    out
}

fn check_mass(mass: f64) -> Result<()> {
    if (1.0 - mass).abs() > 1e-8 {
        return Err(Error::numeric(format!(
            "integration mass deficit: captured {mass:.12} instead of 1"
        )));
    }
    Ok(())
}

/// Channel matrix P(b_l | a_k) by integrating the outcome density over the
/// four quadrants for each QPSK letter.
pub fn channel_matrix(
    src: BellSource<'_>,
    beta: f64,
    cfg: &IntegratorConfig,
) -> Result<ChannelMatrix> {
    let constellation = QpskConstellation::new(beta)?;
    let (prep, mut ws) = PreparedBell::prepare(src);
    let integ = resolve_integrator(&prep, &mut ws, cfg)?;
    let mut probs = [[0.0; 4]; 4];
    for (k, slot) in probs.iter_mut().enumerate() {
        let beta_s = constellation.signal_displacement(k);
        let row = quadrant_probabilities(&prep, &mut ws, &integ, beta_s);
        check_mass(row.iter().sum())?;
        *slot = row;
    }
    Ok(ChannelMatrix { probs, beta })
}

/// Mutual information of the channel in bits, with uniform letter priors
/// and the 0·log 0 = 0 convention.
pub fn mutual_information(cm: &ChannelMatrix) -> f64 {
    let mut marginals = [0.0f64; 4];
    for row in cm.probs() {
        for (l, &p) in row.iter().enumerate() {
            marginals[l] += 0.25 * p;
        }
    }
    let mut info = 0.0;
    for row in cm.probs() {
        for (l, &p) in row.iter().enumerate() {
            if p > 0.0 && marginals[l] > 0.0 {
                info += 0.25 * p * (p / marginals[l]).log2();
            }
        }
    }
    info
}

fn fisher_from_derivs(derivs: &[f64; 4], baseline: &[f64; 4]) -> f64 {
    derivs
        .iter()
        .zip(baseline)
        .map(|(d, p)| d * d / p)
        .sum::<f64>()
        / LN_2
}

/// Fisher information J₀ of the channel with respect to the constellation
/// radius β at β = 0, evaluated for letter a₀:
///
/// J₀ = (1/ln 2) · Σ_b [dP_β(b|a₀)/dβ]² / P₀(b|a₀)
///
/// The explicit 1/ln 2 fixes the normalization so the closed forms for the
/// squeezed and photon-subtracted states come out in the units used
/// throughout; with it, I_β/β² → J₀/2 as β → 0. Derivatives are central
/// differences with Richardson extrapolation; baseline probabilities are
/// integrated, not assumed uniform.
pub fn fisher_information(
    src: BellSource<'_>,
    dcfg: &DerivativeConfig,
    icfg: &IntegratorConfig,
) -> Result<f64> {
    if dcfg.step.is_nan() || dcfg.step <= 0.0 {
        return Err(Error::domain("derivative step must be positive"));
    }
    if dcfg.richardson_levels < 1 {
        return Err(Error::domain("derivative needs at least one Richardson level"));
    }
    let (prep, mut ws) = PreparedBell::prepare(src);
    let integ = resolve_integrator(&prep, &mut ws, icfg)?;

    let baseline = quadrant_probabilities(&prep, &mut ws, &integ, Complex64::new(0.0, 0.0));
    check_mass(baseline.iter().sum())?;

    let levels = dcfg.richardson_levels;
    let mut tableau: Vec<Vec<[f64; 4]>> = Vec::with_capacity(levels);
    for lv in 0..levels {
        let h = dcfg.step / 2f64.powi(lv as i32);
        let plus = quadrant_probabilities(&prep, &mut ws, &integ, Complex64::new(h, h));
        let minus = quadrant_probabilities(&prep, &mut ws, &integ, Complex64::new(-h, -h));
        let mut diff = [0.0; 4];
        for b in 0..4 {
            diff[b] = (plus[b] - minus[b]) / (2.0 * h);
        }
        let mut row = vec![diff];
        for j in 1..=lv {
            let factor = 4f64.powi(j as i32);
            let above = tableau[lv - 1][j - 1];
            let left = row[j - 1];
            let mut extrap = [0.0; 4];
            for b in 0..4 {
                extrap[b] = (factor * left[b] - above[b]) / (factor - 1.0);
            }
            row.push(extrap);
        }
        tableau.push(row);
    }
    let j_final = fisher_from_derivs(&tableau[levels - 1][levels - 1], &baseline);
    if levels >= 2 {
        let j_prev = fisher_from_derivs(&tableau[levels - 2][levels - 2], &baseline);
        if (j_final - j_prev).abs() > 1e-3 * j_final.abs().max(1e-12) {
            return Err(Error::numeric(format!(
                "derivative did not converge: successive Richardson estimates {j_prev} and {j_final}"
            )));
        }
    }
    Ok(j_final)
}

/// Closed-form Fisher informations:
/// J₀^SQ = (8/(π ln 2)) (1+λ)/(1−λ) and
/// J₀^NG = (1/(2π ln 2)) (3λ²T²+4λT+4)²/(1+λ²T²)² · (1+λT)/(1−λT).
pub fn closed_form_fisher(kind: EnKind, lambda: f64, transmittance: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::domain("lambda must lie in [0, 1)"));
    }
    match kind {
        EnKind::Sq => Ok(8.0 / (PI * LN_2) * (1.0 + lambda) / (1.0 - lambda)),
        EnKind::Ng => {
            let q = lambda * transmittance;
            if q >= 1.0 {
                return Err(Error::domain("lambda*T must be below 1 (divergence)"));
            }
            let poly = 3.0 * q * q + 4.0 * q + 4.0;
            Ok(1.0 / (2.0 * PI * LN_2) * (poly / (1.0 + q * q)).powi(2) * (1.0 + q)
                / (1.0 - q))
        }
    }
}

/// f(λT) = 16(1+λT)²(1+λ²T²)/(3λ²T²+4λT+4)², the factor relating the
/// subtracted-state closed forms; close to unity over the physical range.
pub fn f_factor(lambda_t: f64) -> f64 {
    let q = lambda_t;
    let poly = 3.0 * q * q + 4.0 * q + 4.0;
    16.0 * (1.0 + q).powi(2) * (1.0 + q * q) / (poly * poly)
}

/// Predicted logarithmic negativity from a Fisher information:
/// log₂(f · (π ln 2 / 8) · J). With f = 1 this is the squeezed-state
/// relation, used as the predictor for mixed states.
pub fn en_from_fisher(j: f64, f: f64) -> f64 {
    (f * PI * LN_2 / 8.0 * j).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{BeamSplitterSpec, TruncationSpec};
    use crate::states::{
        make_photon_subtracted_mixed, make_photon_subtracted_pure, make_qubit_state,
        make_squeezed, MixtureComponent, QubitEntangledState,
    };

    fn trunc(n_max: usize) -> TruncationSpec {
        TruncationSpec::new(n_max, 1e-12).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for &n in &[5usize, 20, 160] {
            let (xs, ws) = gauss_legendre(n);
            let total: f64 = ws.iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
            // ∫_{-1}^{1} x^4 = 2/5
            let quartic: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(4)).sum();
            assert!((quartic - 0.4).abs() < 1e-13);
            // ∫_{-1}^{1} cos x = 2 sin 1; only high orders pin this one down
            if n >= 20 {
                let cosine: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.cos()).sum();
                assert!((cosine - 2.0 * 1f64.sin()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn displaced_vacuum_anchor() {
        let vac = make_squeezed(0.0, trunc(10)).unwrap();
        let (x_s, p_s) = (0.7, -0.4);
        for &(x, p) in &[(0.0, 0.0), (0.3, 0.2), (-1.0, 0.8), (0.7, -0.4)] {
            let got = bell_density_schmidt(&vac, x_s, p_s, x, p);
            let cx = x_s / 2f64.sqrt();
            let cp = p_s / 2f64.sqrt();
            let expect = (-(x - cx).powi(2) - (p - cp).powi(2)).exp() / PI;
            assert!((got - expect).abs() < 1e-14, "({x},{p}): {got} vs {expect}");
        }
    }

    #[test]
    fn squeezed_density_gaussian_closed_form() {
        // resummation of the Laguerre series: P = (s/π) e^(−s u)
        let lambda = 0.45;
        let st = make_squeezed(lambda, trunc(60)).unwrap();
        let s = (1.0 + lambda) / (1.0 - lambda);
        let (x_s, p_s) = (0.2, 0.1);
        let beta_s = MeasurementConvention::signal_amplitude(x_s, p_s);
        for i in 0..20 {
            let x = -2.0 + 4.0 * i as f64 / 19.0;
            let p = 0.3 * (i as f64).sin();
            let u = (beta_s - Complex64::new(x, p)).norm_sqr();
            let expect = s / PI * (-s * u).exp();
            let got = bell_density_schmidt(&st, x_s, p_s, x, p);
            assert!(
                (got - expect).abs() < 1e-10 * expect.max(1e-6),
                "({x},{p}): {got} vs {expect}"
            );
        }
    }

    #[test]
    fn general_kernel_matches_schmidt_kernel() {
        let st = make_squeezed(0.4, trunc(14)).unwrap();
        let rho = st.to_density_matrix();
        for i in 0..10 {
            let x = -1.5 + 3.0 * i as f64 / 9.0;
            let p = 0.8 - 0.15 * i as f64;
            let a = bell_density_schmidt(&st, 0.3, -0.2, x, p);
            let b = bell_density_general(&rho, 0.3, -0.2, x, p);
            assert!((a - b).abs() < 1e-10, "({x},{p}): {a} vs {b}");
        }
    }

    #[test]
    fn mixture_kernel_single_component_reduces_to_diagonal_form() {
        // |Φ_11⟩ with a single n = 1 term: density is (1/π) e^(−u)
        let comp = MixtureComponent {
            offset_a: 1,
            offset_b: 1,
            amps: vec![0.37],
        };
        let mix =
            crate::states::TwoModeFockMixture::from_components(vec![comp], trunc(4)).unwrap();
        for &(x, p) in &[(0.0, 0.0), (0.5, -0.3), (1.2, 0.4)] {
            let got = bell_density_mixture(&mix, 0.0, 0.0, x, p);
            let expect = (-(x * x + p * p)).exp() / PI;
            assert!((got - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn mixture_kernel_matches_general_kernel() {
        let bs = BeamSplitterSpec::new(0.9).unwrap();
        let mix = make_photon_subtracted_mixed(0.4, &bs, trunc(12), 1e-12).unwrap();
        let rho = mix.to_density_matrix();
        for i in 0..8 {
            let x = -1.0 + 2.0 * i as f64 / 7.0;
            let p = 0.2 + 0.1 * i as f64;
            let a = bell_density_mixture(&mix, 0.1, 0.3, x, p);
            let b = bell_density_general(&rho, 0.1, 0.3, x, p);
            assert!((a - b).abs() < 1e-11, "({x},{p}): {a} vs {b}");
        }
    }

    #[test]
    fn mixture_density_is_radially_symmetric() {
        let bs = BeamSplitterSpec::new(0.8).unwrap();
        let mix = make_photon_subtracted_mixed(0.5, &bs, trunc(14), 1e-12).unwrap();
        let (x_s, p_s) = (0.4, 0.6);
        let beta_s = MeasurementConvention::signal_amplitude(x_s, p_s);
        let w = Complex64::new(0.8, -0.5);
        let base = bell_density_mixture(&mix, x_s, p_s, beta_s.re + w.re, beta_s.im + w.im);
        for &phi in &[0.3, 1.1, 2.9, 4.4] {
            let rotated = w * Complex64::from_polar(1.0, phi);
            let got = bell_density_mixture(
                &mix,
                x_s,
                p_s,
                beta_s.re + rotated.re,
                beta_s.im + rotated.im,
            );
            assert!((got - base).abs() < 1e-12, "phi={phi}: {got} vs {base}");
        }
    }

    #[test]
    fn qubit_density_hand_expansion() {
        // t = 1, c₀ = 1/√2, φ = 0, no signal: P = (2/π) e^(−x²−p²) p²
        let q = QubitEntangledState::new(1.0 / 2f64.sqrt(), 0.0, 1.0).unwrap();
        let rho = make_qubit_state(&q, false);
        for &(x, p) in &[(0.3, 0.5), (-0.7, 0.2), (1.1, -0.9), (0.0, 1.3)] {
            let got = bell_density_general(&rho, 0.0, 0.0, x, p);
            let expect = 2.0 / PI * (-(x * x + p * p)).exp() * p * p;
            assert!((got - expect).abs() < 1e-13, "({x},{p}): {got} vs {expect}");
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let cfg = IntegratorConfig::default();
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let (prep, mut ws) = PreparedBell::prepare(BellSource::Schmidt(&st));
        let integ = resolve_integrator(&prep, &mut ws, &cfg).unwrap();
        let beta_s = MeasurementConvention::signal_amplitude(0.3, 0.3);
        let mass: f64 = quadrant_probabilities(&prep, &mut ws, &integ, beta_s)
            .iter()
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "schmidt mass {mass}");

        let bs = BeamSplitterSpec::new(0.9).unwrap();
        let mix = make_photon_subtracted_mixed(0.4, &bs, trunc(20), 1e-12).unwrap();
        let (prep, mut ws) = PreparedBell::prepare(BellSource::Mixture(&mix));
        let integ = resolve_integrator(&prep, &mut ws, &cfg).unwrap();
        let mass: f64 = quadrant_probabilities(&prep, &mut ws, &integ, beta_s)
            .iter()
            .sum();
        assert!((mass - 1.0).abs() < 1e-8, "mixture mass {mass}");

        let q = QubitEntangledState::new(0.6, 1.2, 0.7).unwrap();
        let rho = make_qubit_state(&q, false);
        let (prep, mut ws) = PreparedBell::prepare(BellSource::General(&rho));
        let integ = resolve_integrator(&prep, &mut ws, &cfg).unwrap();
        let mass: f64 = quadrant_probabilities(&prep, &mut ws, &integ, beta_s)
            .iter()
            .sum();
        assert!((mass - 1.0).abs() < 1e-9, "qubit mass {mass}");
    }

    #[test]
    fn quadrant_decision_boundaries() {
        assert_eq!(QpskConstellation::quadrant_of(1.0, 1.0), 0);
        assert_eq!(QpskConstellation::quadrant_of(-1.0, 1.0), 1);
        assert_eq!(QpskConstellation::quadrant_of(-1.0, -1.0), 2);
        assert_eq!(QpskConstellation::quadrant_of(1.0, -1.0), 3);
        // boundary goes to the positive side
        assert_eq!(QpskConstellation::quadrant_of(0.0, -1.0), 3);
        assert_eq!(QpskConstellation::quadrant_of(0.0, 0.0), 0);
        assert_eq!(QpskConstellation::quadrant_of(-1.0, 0.0), 1);
    }

    fn erf_channel_row(lambda: f64, beta: f64) -> [f64; 4] {
        let s = (1.0 + lambda) / (1.0 - lambda);
        let g = 0.5 * (1.0 + libm::erf(s.sqrt() * beta));
        [g * g, (1.0 - g) * g, (1.0 - g) * (1.0 - g), g * (1.0 - g)]
    }

    #[test]
    fn channel_matrix_uniform_at_zero_signal() {
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let cm = channel_matrix(BellSource::Schmidt(&st), 0.0, &IntegratorConfig::default())
            .unwrap();
        for row in cm.probs() {
            for &p in row {
                assert!((p - 0.25).abs() < 1e-9, "{p}");
            }
        }
    }

    #[test]
    fn channel_matrix_matches_erf_oracle() {
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let cm = channel_matrix(BellSource::Schmidt(&st), 0.1, &IntegratorConfig::default())
            .unwrap();
        let expect = erf_channel_row(0.4, 0.1);
        for (l, want) in expect.iter().enumerate() {
            assert!(
                (cm.entry(0, l) - want).abs() < 1e-9,
                "l={l}: {} vs {want}",
                cm.entry(0, l)
            );
        }
        for sum in cm.row_sums() {
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn channel_rows_are_permutations_of_row_zero() {
        let bs = BeamSplitterSpec::new(0.9).unwrap();
        let (st, _) = make_photon_subtracted_pure(0.4, &bs, trunc(20)).unwrap();
        let cm = channel_matrix(BellSource::Schmidt(&st), 0.15, &IntegratorConfig::default())
            .unwrap();
        for k in 1..4 {
            for l in 0..4 {
                let expect = cm.entry(0, (l + 4 - k) % 4);
                assert!(
                    (cm.entry(k, l) - expect).abs() < 1e-9,
                    "k={k} l={l}: {} vs {}",
                    cm.entry(k, l),
                    expect
                );
            }
        }
    }

    #[test]
    fn channel_matrix_rejects_lost_mass() {
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let cfg = IntegratorConfig {
            points: 160,
            half_width: Some(1.0),
        };
        assert!(channel_matrix(BellSource::Schmidt(&st), 0.1, &cfg).is_err());
    }

    #[test]
    fn domain_grows_past_the_starting_half_width() {
        // |40,40⟩ spreads its Bell density out to u ≈ 160, far beyond the
        // L = 6 seed; the fixed width loses mass while auto-growth recovers
        let comp = MixtureComponent {
            offset_a: 1,
            offset_b: 1,
            amps: std::iter::repeat_n(0.0, 40).chain([1.0]).collect(),
        };
        let mix =
            crate::states::TwoModeFockMixture::from_components(vec![comp], trunc(45)).unwrap();
        let fixed = IntegratorConfig {
            points: 160,
            half_width: Some(6.0),
        };
        assert!(channel_matrix(BellSource::Mixture(&mix), 0.1, &fixed).is_err());
        let auto = IntegratorConfig::default();
        let cm = channel_matrix(BellSource::Mixture(&mix), 0.1, &auto).unwrap();
        for s in cm.row_sums() {
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mutual_information_extremes() {
        let uniform = ChannelMatrix {
            probs: [[0.25; 4]; 4],
            beta: 0.0,
        };
        assert!(mutual_information(&uniform).abs() < 1e-15);
        let mut ident = [[0.0; 4]; 4];
        for (k, row) in ident.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        let ident = ChannelMatrix {
            probs: ident,
            beta: 1.0,
        };
        assert!((mutual_information(&ident) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_matches_erf_oracle() {
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let cm = channel_matrix(BellSource::Schmidt(&st), 0.1, &IntegratorConfig::default())
            .unwrap();
        let numeric = mutual_information(&cm);
        let row = erf_channel_row(0.4, 0.1);
        // dihedral symmetry: marginals are uniform, each row a permutation
        let oracle: f64 = row.iter().map(|&p| p * (4.0 * p).log2()).sum();
        assert!((numeric - oracle).abs() < 1e-6, "{numeric} vs {oracle}");
    }

    #[test]
    fn fisher_squeezed_matches_closed_form() {
        let st = make_squeezed(0.4, trunc(20)).unwrap();
        let j = fisher_information(
            BellSource::Schmidt(&st),
            &DerivativeConfig::default(),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let closed = closed_form_fisher(EnKind::Sq, 0.4, 0.0).unwrap();
        assert!((j - closed).abs() / closed < 1e-5, "{j} vs {closed}");
        assert!((j - 8.572).abs() / 8.572 < 1e-3, "{j}");
    }

    #[test]
    fn fisher_rejects_bad_config() {
        let st = make_squeezed(0.3, trunc(12)).unwrap();
        let bad_step = DerivativeConfig {
            step: 0.0,
            richardson_levels: 2,
        };
        assert!(fisher_information(
            BellSource::Schmidt(&st),
            &bad_step,
            &IntegratorConfig::default()
        )
        .is_err());
    }

    #[test]
    fn closed_form_fisher_values() {
        let sq0 = closed_form_fisher(EnKind::Sq, 0.0, 0.0).unwrap();
        assert!((sq0 - 8.0 / (PI * LN_2)).abs() < 1e-12);
        assert!((sq0 - 3.6737928).abs() < 1e-6);
        let sq = closed_form_fisher(EnKind::Sq, 0.4, 0.0).unwrap();
        assert!((sq - 8.5721831).abs() < 1e-6);
        // reference value 8.572
        assert!((sq - 8.572).abs() / 8.572 < 1e-3);
        let ng = closed_form_fisher(EnKind::Ng, 0.4, 0.9).unwrap();
        assert!((ng - 12.9915972).abs() < 1e-6);
        // reference value 12.992
        assert!((ng - 12.992).abs() / 12.992 < 1e-3);
    }

    #[test]
    fn f_factor_values() {
        assert_eq!(f_factor(0.0), 1.0);
        assert!((f_factor(0.36) - 0.9839299).abs() < 1e-6);
        // within 2% of unity through λT ≈ 0.78; the deviation crosses 2%
        // just before the end of the physical range and reaches 2.22% at 0.8
        for i in 0..=78 {
            let q = i as f64 / 100.0;
            assert!((f_factor(q) - 1.0).abs() <= 0.02, "q={q}: {}", f_factor(q));
        }
        assert!((f_factor(0.80) - 1.0221607).abs() < 1e-6);
    }

    #[test]
    fn en_from_fisher_identities() {
        assert!((en_from_fisher(8.5721831, 1.0) - 1.2223924).abs() < 1e-7);
        let j = closed_form_fisher(EnKind::Sq, 0.4, 0.0).unwrap();
        let en = crate::negativity::closed_form_en(EnKind::Sq, 0.4, 0.0).unwrap();
        assert!((en_from_fisher(j, 1.0) - en).abs() < 1e-12);
        let j = closed_form_fisher(EnKind::Ng, 0.4, 0.9).unwrap();
        let en = crate::negativity::closed_form_en(EnKind::Ng, 0.4, 0.9).unwrap();
        assert!((en_from_fisher(j, f_factor(0.36)) - en).abs() < 1e-12);
        assert!(en_from_fisher(8.0 / (PI * LN_2), 1.0).abs() < 1e-12);
    }
}
