//! Constructors for the entangled states under study: the two-mode squeezed
//! state, the photon-subtracted pure state heralded by photon-number-resolving
//! detection, the on/off-heralded mixed state, and photon-number-qubit states.
//!
//! A brute-force four-mode oracle builds the tap interaction explicitly and
//! validates the closed-form constructors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{bs_split_with_vacuum, BeamSplitterSpec, TruncationSpec};

/// Bipartite pure state of the form Σ_n c_n |n⟩_A |n⟩_B with nonnegative
/// coefficients, truncated at n_max.
#[derive(Debug, Clone)]
pub struct SchmidtDiagonalState {
    coeffs: Vec<f64>,
    trunc: TruncationSpec,
}

impl SchmidtDiagonalState {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// ρ = |ψ⟩⟨ψ| over the truncated two-mode Fock basis, normalized so the
    /// trace is exactly one.
    pub fn to_density_matrix(&self) -> DensityMatrixFock {
        let d = self.coeffs.len();
        let dim = d * d;
        let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        let norm_sq = self.norm_sq();
        for (n, &cn) in self.coeffs.iter().enumerate() {
            for (m, &cm) in self.coeffs.iter().enumerate() {
                entries[(n * d + n, m * d + m)] = Complex64::new(cn * cm / norm_sq, 0.0);
            }
        }
        DensityMatrixFock {
            dim_a: d,
            dim_b: d,
            entries,
        }
    }
}

/// One unnormalized ket |Φ_ij⟩ = Σ_n a_n |n−i⟩_A |n−j⟩_B of the on/off
/// mixture; `amps[0]` corresponds to n = max(i, j).
#[derive(Debug, Clone)]
pub struct MixtureComponent {
    pub offset_a: usize,
    pub offset_b: usize,
    pub amps: Vec<f64>,
}

impl MixtureComponent {
    pub fn weight(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }
}

/// Incoherent sum of offset kets, ρ = (1/norm) Σ_ij |Φ_ij⟩⟨Φ_ij|. The stored
/// norm is the total squared weight of the retained components, which equals
/// the detection probability up to truncation and component cutoffs.
#[derive(Debug, Clone)]
pub struct TwoModeFockMixture {
    components: Vec<MixtureComponent>,
    norm: f64,
    trunc: TruncationSpec,
}

impl TwoModeFockMixture {
    /// Assembles a mixture from explicit components. Every component must
    /// carry at least one amplitude and both offsets must be at least one
    /// (an on/off click means at least one photon).
    pub fn from_components(
        components: Vec<MixtureComponent>,
        trunc: TruncationSpec,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        let mut norm = 0.0;
        for comp in &components {
            if comp.offset_a < 1 || comp.offset_b < 1 {
                return Err(Error::domain("component offsets must be >= 1"));
            }
            if comp.amps.is_empty() {
                return Err(Error::domain("component has no amplitudes"));
            }
            norm += comp.weight();
        }
        if norm <= 0.0 {
            return Err(Error::domain("mixture has zero total weight"));
        }
        Ok(TwoModeFockMixture {
            components,
            norm,
            trunc,
        })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    /// Largest Fock index appearing on either mode.
    pub fn fock_dim(&self) -> usize {
        self.components
            .iter()
            .map(|c| {
                let base = c.offset_a.max(c.offset_b);
                let n_top = base + c.amps.len() - 1;
                (n_top - c.offset_a).max(n_top - c.offset_b) + 1
            })
            .max()
            .unwrap_or(1)
    }

    pub fn to_density_matrix(&self) -> DensityMatrixFock {
        let d = self.fock_dim();
        let dim = d * d;
        let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for comp in &self.components {
            let base = comp.offset_a.max(comp.offset_b);
            for (p, &ap) in comp.amps.iter().enumerate() {
                let (pa, pb) = (base + p - comp.offset_a, base + p - comp.offset_b);
                for (q, &aq) in comp.amps.iter().enumerate() {
                    let (qa, qb) = (base + q - comp.offset_a, base + q - comp.offset_b);
                    entries[(pa * d + pb, qa * d + qb)] +=
                        Complex64::new(ap * aq / self.norm, 0.0);
                }
            }
        }
        DensityMatrixFock {
            dim_a: d,
            dim_b: d,
            entries,
        }
    }
}

/// Dense Hermitian two-mode density matrix in the Fock basis, indexed by
/// flattened pairs (m_a, m_b) ↦ m_a · dim_b + m_b.
#[derive(Debug, Clone)]
pub struct DensityMatrixFock {
    dim_a: usize,
    dim_b: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrixFock {
    /// Wraps a dense matrix after checking hermiticity (1e-12) and unit trace
    /// (1e-10).
    pub fn from_matrix(dim_a: usize, dim_b: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != dim_a * dim_b || entries.ncols() != dim_a * dim_b {
            return Err(Error::domain("density matrix dimensions do not match"));
        }
        let rho = DensityMatrixFock {
            dim_a,
            dim_b,
            entries,
        };
        if rho.hermiticity_defect() > 1e-12 {
            return Err(Error::domain("density matrix is not Hermitian"));
        }
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::domain("density matrix trace is not one"));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(dim_a: usize, dim_b: usize, entries: DMatrix<Complex64>) -> Self {
        DensityMatrixFock {
            dim_a,
            dim_b,
            entries,
        }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    #[inline]
    pub fn index(&self, ma: usize, mb: usize) -> usize {
        ma * self.dim_b + mb
    }

    #[inline]
    pub fn get(&self, ma: usize, mb: usize, na: usize, nb: usize) -> Complex64 {
        self.entries[(self.index(ma, mb), self.index(na, nb))]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.entries.nrows())
            .map(|i| self.entries[(i, i)].re)
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.entries.nrows() {
            for c in r..self.entries.ncols() {
                let d = (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Smallest eigenvalue; used to confirm positive semidefiniteness.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = (&self.entries + self.entries.adjoint()).map(|z| z * 0.5);
        let eig = nalgebra::SymmetricEigen::try_new(herm, f64::EPSILON, 50_000)
            .ok_or_else(|| Error::numeric("eigensolver failed to converge"))?;
        Ok(eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min))
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        let herm = (&self.entries + self.entries.adjoint()).map(|z| z * 0.5);
        let eig = nalgebra::SymmetricEigen::try_new(herm, f64::EPSILON, 50_000)
            .ok_or_else(|| Error::numeric("eigensolver failed to converge"))?;
        Ok(eig.eigenvalues.iter().filter(|&&v| v > tol).count())
    }
}

/// Detector placed on each tapped beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorModel {
    /// Photon-number-resolving projection onto |count⟩ on both taps.
    /// Only counts 0 and 1 are supported.
    Pnr { count: usize },
    /// Binary POVM {|0⟩⟨0|, 1 − |0⟩⟨0|}, conditioning on "on" at both taps.
    OnOff,
}

/// Which mode of a bipartite state an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::domain(format!(
            "squeezing parameter lambda must lie in [0, 1), got {lambda}"
        )));
    }
    Ok(())
}

fn check_tap(bs: &BeamSplitterSpec) -> Result<()> {
    let t = bs.transmittance();
    if t == 0.0 || t == 1.0 {
        return Err(Error::domain(
            "degenerate tap: transmittance must lie strictly between 0 and 1",
        ));
    }
    Ok(())
}

fn squeezed_coeff(lambda: f64, n: usize) -> f64 {
    (1.0 - lambda * lambda).sqrt() * lambda.powi(n as i32)
}

/// Two-mode squeezed state with c_n = √(1−λ²) λ^n.
pub fn make_squeezed(lambda: f64, trunc: TruncationSpec) -> Result<SchmidtDiagonalState> {
    check_lambda(lambda)?;
    let coeffs = (0..=trunc.n_max())
        .map(|n| squeezed_coeff(lambda, n))
        .collect();
    Ok(SchmidtDiagonalState { coeffs, trunc })
}

/// Detection probability for simultaneous single-photon events on both taps.
pub fn pnr_success_probability(lambda: f64, bs: &BeamSplitterSpec) -> f64 {
    let t = bs.transmittance();
    let r = bs.reflectance();
    let q = lambda * lambda * t * t;
    (1.0 - lambda * lambda) * q * (1.0 + q) / (1.0 - q).powi(3) * (r / t).powi(2)
}

/// Detection probability for simultaneous on/off clicks on both taps.
pub fn onoff_success_probability(lambda: f64, bs: &BeamSplitterSpec) -> f64 {
    let t = bs.transmittance();
    let a = lambda * lambda;
    a * (1.0 - t).powi(2) * (1.0 + a * t) / ((1.0 - a * t) * (1.0 - a * t * t))
}

/// Non-Gaussian pure state heralded by single-photon detection on both taps,
/// with unnormalized coefficients α_{n+1} ξ_{(n+1),1}². Returns the
/// normalized state and the closed-form success probability.
pub fn make_photon_subtracted_pure(
    lambda: f64,
    bs: &BeamSplitterSpec,
    trunc: TruncationSpec,
) -> Result<(SchmidtDiagonalState, f64)> {
    check_lambda(lambda)?;
    check_tap(bs)?;
    if lambda == 0.0 {
        return Err(Error::domain(
            "vacuum input cannot herald a photon subtraction (zero-probability event)",
        ));
    }
    let t = bs.transmittance();
    let r = bs.reflectance();
    let mut coeffs: Vec<f64> = (0..=trunc.n_max())
        .map(|n| {
            // ξ_{(n+1),1}² = (n+1) T^n R
            squeezed_coeff(lambda, n + 1) * (n as f64 + 1.0) * t.powi(n as i32) * r
        })
        .collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    Ok((
        SchmidtDiagonalState { coeffs, trunc },
        pnr_success_probability(lambda, bs),
    ))
}

/// Mixed state heralded by on/off clicks on both taps: components |Φ_ij⟩
/// with i, j ≥ 1 and amplitudes α_n ξ_{ni} ξ_{nj}. Components whose squared
/// norm falls below `component_tol` times the detection probability are
/// dropped.
pub fn make_photon_subtracted_mixed(
    lambda: f64,
    bs: &BeamSplitterSpec,
    trunc: TruncationSpec,
    component_tol: f64,
) -> Result<TwoModeFockMixture> {
    check_lambda(lambda)?;
    check_tap(bs)?;
    if lambda == 0.0 {
        return Err(Error::domain(
            "vacuum input cannot herald a photon subtraction (zero-probability event)",
        ));
    }
    if component_tol < 0.0 {
        return Err(Error::domain("component_tol must be nonnegative"));
    }
    let n_max = trunc.n_max();
    let xi: Vec<Vec<(usize, f64)>> = (0..=n_max).map(|n| bs_split_with_vacuum(n, bs)).collect();
    let alpha: Vec<f64> = (0..=n_max).map(|n| squeezed_coeff(lambda, n)).collect();
    let p_det = onoff_success_probability(lambda, bs);
    let cutoff = component_tol * p_det;

    let mut components = Vec::new();
    let mut norm = 0.0;
    for i in 1..=n_max {
        for j in 1..=n_max {
            let base = i.max(j);
            let amps: Vec<f64> = (base..=n_max)
                .map(|n| alpha[n] * xi[n][i].1 * xi[n][j].1)
                .collect();
            let weight: f64 = amps.iter().map(|a| a * a).sum();
            if weight > cutoff {
                norm += weight;
                components.push(MixtureComponent {
                    offset_a: i,
                    offset_b: j,
                    amps,
                });
            }
        }
    }
    if components.is_empty() {
        return Err(Error::domain("all mixture components fell below the cutoff"));
    }
    Ok(TwoModeFockMixture {
        components,
        norm,
        trunc,
    })
}

/// Brute-force oracle: explicitly builds the four-mode state
/// |ψ⟩_ABCD = Σ_n α_n Σ_k ξ_{nk}|n−k⟩_A|k⟩_C Σ_l ξ_{nl}|n−l⟩_B|l⟩_D,
/// applies the detector POVM on the taps C and D, traces them out, and
/// normalizes. Intended for validation at moderate truncations.
pub fn four_mode_tap_oracle(
    lambda: f64,
    bs: &BeamSplitterSpec,
    trunc: TruncationSpec,
    det: DetectorModel,
) -> Result<(DensityMatrixFock, f64)> {
    check_lambda(lambda)?;
    let d = trunc.n_max() + 1;
    if d > 46 {
        return Err(Error::domain(
            "four-mode oracle is limited to n_max <= 45 (brute force)",
        ));
    }
    if let DetectorModel::Pnr { count } = det {
        if count > 1 {
            return Err(Error::domain("PNR counts above 1 are not supported"));
        }
    }

    // psi[a][c][b][dd], stored flat
    let idx = |a: usize, c: usize, b: usize, dd: usize| ((a * d + c) * d + b) * d + dd;
    let mut psi = vec![0.0f64; d * d * d * d];
    for n in 0..d {
        let an = squeezed_coeff(lambda, n);
        let split = bs_split_with_vacuum(n, bs);
        for &(k, xk) in &split {
            for &(l, xl) in &split {
                psi[idx(n - k, k, n - l, l)] += an * xk * xl;
            }
        }
    }

    let selected: Vec<(usize, usize)> = match det {
        DetectorModel::Pnr { count } => vec![(count, count)],
        DetectorModel::OnOff => (1..d)
            .flat_map(|c| (1..d).map(move |dd| (c, dd)))
            .collect(),
    };

    let dim = d * d;
    let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut p_det = 0.0f64;
    let mut slice: Vec<(usize, f64)> = Vec::new();
    for (c, dd) in selected {
        slice.clear();
        for a in 0..d {
            for b in 0..d {
                let amp = psi[idx(a, c, b, dd)];
                if amp != 0.0 {
                    slice.push((a * d + b, amp));
                }
            }
        }
        for &(row, ar) in &slice {
            p_det += ar * ar;
            for &(col, ac) in &slice {
                entries[(row, col)] += Complex64::new(ar * ac, 0.0);
            }
        }
    }
    if p_det < 1e-300 {
        return Err(Error::domain(
            "zero-probability detection event for this detector model",
        ));
    }
    entries /= Complex64::new(p_det, 0.0);
    Ok((DensityMatrixFock::from_parts(d, d, entries), p_det))
}

/// Photon-number-qubit state parameters: ρ_qubit is a mixture of the coherent
/// superposition |ξ⟩ = c₀|0,1⟩ + c₁|1,0⟩ (weight t) and its diagonal
/// counterpart (weight 1−t), with |c₀|² + |c₁|² = 1 and φ the relative
/// argument of c₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEntangledState {
    c0_abs: f64,
    phase: f64,
    mixedness: f64,
}

impl QubitEntangledState {
    pub fn new(c0_abs: f64, phase: f64, mixedness: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c0_abs) {
            return Err(Error::domain("|c0| must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&mixedness) {
            return Err(Error::domain("mixedness t must lie in [0, 1]"));
        }
        Ok(QubitEntangledState {
            c0_abs,
            phase: phase.rem_euclid(2.0 * std::f64::consts::PI),
            mixedness,
        })
    }

    pub fn c0_abs(&self) -> f64 {
        self.c0_abs
    }

    pub fn c1_abs(&self) -> f64 {
        (1.0 - self.c0_abs * self.c0_abs).max(0.0).sqrt()
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mixedness(&self) -> f64 {
        self.mixedness
    }

    /// t·|c₀|·|c₁|, the combination the averaged Fisher information and the
    /// qubit logarithmic negativity both depend on.
    pub fn coherence_product(&self) -> f64 {
        self.mixedness * self.c0_abs * self.c1_abs()
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        QubitEntangledState {
            phase: phase.rem_euclid(2.0 * std::f64::consts::PI),
            ..*self
        }
    }
}

/// Builds ρ_qubit on a 2×2 Fock cutoff. With `flipped` the coherent part is
/// |ξ'⟩ = c₀|0,0⟩ + c₁|1,1⟩ and the diagonal weights move accordingly.
pub fn make_qubit_state(q: &QubitEntangledState, flipped: bool) -> DensityMatrixFock {
    let c0 = q.c0_abs();
    let c1 = q.c1_abs();
    let t = q.mixedness();
    let coh = Complex64::from_polar(t * c0 * c1, -q.phase()); // t c₀ c₁*
    let mut entries = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    // flattened (m_a, m_b) -> 2 m_a + m_b
    let (ket0, ket1) = if flipped { (0, 3) } else { (1, 2) }; // |0,1⟩,|1,0⟩ or |0,0⟩,|1,1⟩
    entries[(ket0, ket0)] = Complex64::new(c0 * c0, 0.0);
    entries[(ket1, ket1)] = Complex64::new(c1 * c1, 0.0);
    entries[(ket0, ket1)] = coh;
    entries[(ket1, ket0)] = coh.conj();
    DensityMatrixFock::from_parts(2, 2, entries)
}

/// Swaps Fock levels 0 ↔ 1 on the chosen mode. The state must have no
/// support above level 1 on that mode.
pub fn local_flip(rho: &DensityMatrixFock, mode: Mode) -> Result<DensityMatrixFock> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let dim_flip = match mode {
        Mode::A => da,
        Mode::B => db,
    };
    if dim_flip < 2 {
        return Err(Error::domain("flipped mode must have dimension >= 2"));
    }
    let mode_index = |ma: usize, mb: usize| match mode {
        Mode::A => ma,
        Mode::B => mb,
    };
    for ma in 0..da {
        for mb in 0..db {
            for na in 0..da {
                for nb in 0..db {
                    if (mode_index(ma, mb) > 1 || mode_index(na, nb) > 1)
                        && rho.get(ma, mb, na, nb).norm() > 1e-12
                    {
                        return Err(Error::domain(
                            "state has support above Fock level 1 on the flipped mode",
                        ));
                    }
                }
            }
        }
    }
    let swap = |i: usize| match i {
        0 => 1,
        1 => 0,
        other => other,
    };
    let mut entries = DMatrix::from_element(da * db, da * db, Complex64::new(0.0, 0.0));
    for ma in 0..da {
        for mb in 0..db {
            for na in 0..da {
                for nb in 0..db {
                    let (fma, fmb, fna, fnb) = match mode {
                        Mode::A => (swap(ma), mb, swap(na), nb),
                        Mode::B => (ma, swap(mb), na, swap(nb)),
                    };
                    entries[(fma * db + fmb, fna * db + fnb)] = rho.get(ma, mb, na, nb);
                }
            }
        }
    }
    Ok(DensityMatrixFock::from_parts(da, db, entries))
}
