//! Numerically stable special functions and Fock-space building blocks:
//! factorials, associated Laguerre polynomials, displacement-operator matrix
//! elements and beam-splitter tap coefficients.
//!
//! Everything factorial-bearing is evaluated in log-space with separate sign
//! tracking so that coefficients remain usable out to Fock indices of a few
//! hundred without overflow.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LOG_FACTORIAL_TABLE_LEN: usize = 10_001;

static LOG_FACTORIAL_TABLE: OnceLock<Vec<f64>> = OnceLock::new();

fn log_factorial_table() -> &'static [f64] {
    LOG_FACTORIAL_TABLE.get_or_init(|| {
        let mut table = vec![0.0; LOG_FACTORIAL_TABLE_LEN];
        // Kahan-compensated running sum of ln(n); plain accumulation loses
        // about a digit by n = 10^4.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (n, slot) in table.iter_mut().enumerate().skip(1) {
            let term = (n as f64).ln() - comp;
            let next = sum + term;
            comp = (next - sum) - term;
            sum = next;
            *slot = sum;
        }
        table
    })
}

/// ln(n!), exact at the ends and accurate to better than 1e-13 relative for
/// n ≤ 10000 (tabulated); Stirling's series beyond that.
pub fn log_factorial(n: usize) -> f64 {
    let table = log_factorial_table();
    if n < table.len() {
        table[n]
    } else {
        let x = n as f64;
        (x + 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

/// Associated Laguerre polynomial L_n^(k)(u) by the upward three-term
/// recurrence in n, which is stable for u ≥ 0.
pub fn associated_laguerre(n: usize, k: usize, u: f64) -> f64 {
    let kf = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + kf - u;
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + kf + 1.0 - u) * cur - (lf + kf) * prev) / (lf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// e^(-u/2) · L_n^(k)(u): the combination that actually appears in
/// displacement matrix elements. Folding the Gaussian into the recurrence
/// start keeps every iterate of order one instead of e^(u/2).
fn scaled_laguerre(n: usize, k: usize, u: f64) -> f64 {
    let e = (-0.5 * u).exp();
    if n == 0 {
        return e;
    }
    let kf = k as f64;
    let mut prev = e;
    let mut cur = (1.0 + kf - u) * e;
    for l in 1..n {
        let lf = l as f64;
        let next = ((2.0 * lf + kf + 1.0 - u) * cur - (lf + kf) * prev) / (lf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[l] = e^(-u/2) · L_l^(k)(u)` for l = 0..out.len().
pub(crate) fn scaled_laguerre_row(k: usize, u: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let e = (-0.5 * u).exp();
    let kf = k as f64;
    out[0] = e;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.0 + kf - u) * e;
    for l in 1..out.len() - 1 {
        let lf = l as f64;
        out[l + 1] = ((2.0 * lf + kf + 1.0 - u) * out[l] - (lf + kf) * out[l - 1]) / (lf + 1.0);
    }
}

/// The Fock matrix element ⟨m|D(α)|n⟩ of the displacement operator.
///
/// For m ≥ n this is √(n!/m!) α^(m−n) e^(−|α|²/2) L_n^(m−n)(|α|²), and the
/// transpose-conjugate pattern with −α* for m < n. Magnitudes are assembled
/// in log-space so that high Fock indices and large |α| do not overflow.
pub fn displacement_matrix_element(m: usize, n: usize, alpha: Complex64) -> Complex64 {
    let u = alpha.norm_sqr();
    if u == 0.0 {
        return if m == n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let (lo, diff) = if m >= n { (n, m - n) } else { (m, n - m) };
    let lag = scaled_laguerre(lo, diff, u);
    if lag == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let log_mag = 0.5 * (log_factorial(lo) - log_factorial(lo + diff))
        + 0.5 * diff as f64 * u.ln()
        + lag.abs().ln();
    let mag = lag.signum() * log_mag.exp();
    if diff == 0 {
        return Complex64::new(mag, 0.0);
    }
    let w = if m >= n { alpha } else { -alpha.conj() };
    let theta = w.arg() * diff as f64;
    Complex64::new(mag * theta.cos(), mag * theta.sin())
}

/// Dense truncated displacement matrix with entries ⟨m|D(α)|n⟩ for
/// m, n < dim, built one diagonal at a time so each diagonal shares a single
/// Laguerre recurrence.
pub fn displacement_matrix(dim: usize, alpha: Complex64) -> nalgebra::DMatrix<Complex64> {
    let mut out = nalgebra::DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut row = vec![0.0; dim];
    fill_displacement_matrix(dim, alpha, &mut row, &mut out);
    out
}

/// As [`displacement_matrix`], writing into caller-provided buffers.
pub(crate) fn fill_displacement_matrix(
    dim: usize,
    alpha: Complex64,
    row: &mut [f64],
    out: &mut nalgebra::DMatrix<Complex64>,
) {
    let u = alpha.norm_sqr();
    if u == 0.0 {
        out.fill(Complex64::new(0.0, 0.0));
        for i in 0..dim {
            out[(i, i)] = Complex64::new(1.0, 0.0);
        }
        return;
    }
    for diff in 0..dim {
        let len = dim - diff;
        scaled_laguerre_row(diff, u, &mut row[..len]);
        // upper diagonal: row index lo, column lo + diff, carries (−α*)^diff
        let w_up = -alpha.conj();
        let theta_up = w_up.arg() * diff as f64;
        let phase_up = Complex64::new(theta_up.cos(), theta_up.sin());
        // lower diagonal: column index lo, row lo + diff, carries α^diff
        let theta_dn = alpha.arg() * diff as f64;
        let phase_dn = Complex64::new(theta_dn.cos(), theta_dn.sin());
        let amp_pow = u.powf(0.5 * diff as f64);
        for lo in 0..len {
            let fr = (0.5 * (log_factorial(lo) - log_factorial(lo + diff))).exp();
            let mag = fr * amp_pow * row[lo];
            out[(lo, lo + diff)] = phase_up * mag;
            out[(lo + diff, lo)] = phase_dn * mag;
        }
    }
}

/// Truncation bookkeeping for the Fock-space cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    n_max: usize,
    tail_tol: f64,
}

const N_MAX_CLAMP: (usize, usize) = (10, 200);

impl TruncationSpec {
    pub fn new(n_max: usize, tail_tol: f64) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::domain("n_max must be at least 1"));
        }
        if tail_tol.is_nan() || tail_tol <= 0.0 {
            return Err(Error::domain("tail_tol must be positive"));
        }
        Ok(TruncationSpec { n_max, tail_tol })
    }

    /// Picks n_max for a squeezed state with parameter λ so that the
    /// neglected Schmidt weight λ^(2(n_max+1))/(1−λ²) stays below `tail_tol`,
    /// clamped to [10, 200].
    pub fn auto_squeezed(lambda: f64, tail_tol: f64) -> Result<Self> {
        Self::auto_geometric(lambda, tail_tol, false)
    }

    /// Cutoff for photon-subtracted states, whose Schmidt coefficients decay
    /// as (n+1)(λT)^n. Seeds with the geometric rule at λT and then extends
    /// for the polynomial prefactor.
    pub fn auto_subtracted(lambda: f64, transmittance: f64, tail_tol: f64) -> Result<Self> {
        Self::auto_geometric(lambda * transmittance, tail_tol, true)
    }

    fn auto_geometric(x: f64, tail_tol: f64, polynomial_margin: bool) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::domain(format!(
                "decay parameter must lie in [0, 1), got {x}"
            )));
        }
        if tail_tol.is_nan() || tail_tol <= 0.0 {
            return Err(Error::domain("tail_tol must be positive"));
        }
        let mut n_max = if x < 1e-8 {
            N_MAX_CLAMP.0
        } else {
            let raw = ((tail_tol * (1.0 - x * x)).ln() / (2.0 * x.ln())).ceil();
            (raw.max(0.0) as usize).clamp(N_MAX_CLAMP.0, N_MAX_CLAMP.1)
        };
        if polynomial_margin && x > 0.0 {
            let tail = |n: usize| {
                let m = (n + 1) as f64;
                m * m * x.powi(2 * (n as i32 + 1)) / (1.0 - x * x)
            };
            while n_max < N_MAX_CLAMP.1 && tail(n_max) > tail_tol {
                n_max += 1;
            }
        }
        TruncationSpec::new(n_max, tail_tol)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }
}

/// Tap beam splitter. Only the transmittance is stored; the reflectance is
/// always 1−T so the pair sums to one exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    transmittance: f64,
}

impl BeamSplitterSpec {
    pub fn new(transmittance: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::domain(format!(
                "transmittance must lie in [0, 1], got {transmittance}"
            )));
        }
        Ok(BeamSplitterSpec { transmittance })
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.transmittance
    }

    /// Mixing angle θ with tan θ = √((1−T)/T).
    pub fn mixing_angle(&self) -> f64 {
        (self.reflectance() / self.transmittance).sqrt().atan()
    }
}

/// ξ_{nk} = (−1)^k √C(n,k) (√T)^(n−k) (√R)^k, the amplitude for a
/// beam splitter to peel k photons out of |n⟩ into a vacuum ancilla.
pub fn xi_coeff(n: usize, k: usize, bs: &BeamSplitterSpec) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!(
            "xi coefficient requires k <= n, got n={n}, k={k}"
        )));
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let t = bs.transmittance();
    let r = bs.reflectance();
    if t == 0.0 {
        return Ok(if k == n { sign } else { 0.0 });
    }
    if r == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let log_binom = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    let log_mag = 0.5 * (log_binom + (n - k) as f64 * t.ln() + k as f64 * r.ln());
    Ok(sign * log_mag.exp())
}

/// Expansion V|n⟩|0⟩ = Σ_k ξ_{nk} |n−k⟩|k⟩ of the tap beam splitter acting
/// on a Fock state with a vacuum ancilla. Returns all (k, ξ_{nk}).
pub fn bs_split_with_vacuum(n: usize, bs: &BeamSplitterSpec) -> Vec<(usize, f64)> {
    (0..=n)
        .map(|k| (k, xi_coeff(n, k, bs).expect("k <= n by construction")))
        .collect()
}
