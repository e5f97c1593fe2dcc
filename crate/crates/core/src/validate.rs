//! Self-check suite wiring the oracle cross-checks into one runnable report:
//! the four-mode tap oracle against the closed-form constructors, numeric
//! Fisher information against the closed forms, quadrature mass, and the
//! negativity closed forms.

use crate::bell::{
    channel_matrix, fisher_information, BellSource, DerivativeConfig, IntegratorConfig,
};
use crate::fock::{bs_split_with_vacuum, BeamSplitterSpec, TruncationSpec};
use crate::negativity::{
    closed_form_en, lambda_threshold_bisect, lambda_threshold_pure, log_negativity,
    log_negativity_pure, EnKind,
};
use crate::qubit::ln_qubit;
use crate::states::{
    four_mode_tap_oracle, make_photon_subtracted_mixed, make_photon_subtracted_pure,
    make_qubit_state, make_squeezed, DetectorModel, QubitEntangledState,
};

/// Knobs for fault-injection in tests. Defaults are the honest pipeline.
#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Multiplies the numeric Fisher information before comparison; setting
    /// this to ln 2 simulates getting the logarithm convention wrong.
    pub fisher_scale: f64,
    /// Forces the integration half-width instead of auto-growing it.
    pub force_half_width: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            fisher_scale: 1.0,
            force_half_width: None,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn integrator(opts: &ValidateOptions) -> IntegratorConfig {
    IntegratorConfig {
        points: 160,
        half_width: opts.force_half_width,
    }
}

fn max_elementwise_diff(
    a: &crate::states::DensityMatrixFock,
    b: &crate::states::DensityMatrixFock,
) -> f64 {
    let (da, db) = (a.dim_a().min(b.dim_a()), a.dim_b().min(b.dim_b()));
    let mut worst = 0.0f64;
    for ma in 0..da {
        for mb in 0..db {
            for na in 0..da {
                for nb in 0..db {
                    worst = worst.max((a.get(ma, mb, na, nb) - b.get(ma, mb, na, nb)).norm());
                }
            }
        }
    }
    worst
}

/// Runs every check and returns one result per check. All checks pass on an
/// unperturbed build.
pub fn run_validation(opts: &ValidateOptions) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let bs9 = BeamSplitterSpec::new(0.9).expect("valid T");
    let trunc30 = TruncationSpec::new(30, 1e-12).expect("valid trunc");

    // beam-splitter unitarity
    {
        let mut worst = 0.0f64;
        for &t in &[0.1, 0.5, 0.9] {
            let bs = BeamSplitterSpec::new(t).expect("valid T");
            for n in 0..=60 {
                let total: f64 = bs_split_with_vacuum(n, &bs).iter().map(|(_, a)| a * a).sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
        out.push(check(
            "beam_splitter_unitarity",
            worst <= 1e-12,
            format!("max |Σξ²−1| = {worst:.3e}"),
        ));
    }

    // four-mode oracle vs closed-form constructors, PNR heralding
    {
        let result = (|| -> crate::error::Result<(f64, f64)> {
            let (st, p_closed) = make_photon_subtracted_pure(0.4, &bs9, trunc30)?;
            let (rho_oracle, p_oracle) =
                four_mode_tap_oracle(0.4, &bs9, trunc30, DetectorModel::Pnr { count: 1 })?;
            let diff = max_elementwise_diff(&st.to_density_matrix(), &rho_oracle);
            Ok((diff, ((p_oracle - p_closed) / p_closed).abs()))
        })();
        match result {
            Ok((diff, p_rel)) => out.push(check(
                "four_mode_oracle_pnr",
                diff <= 1e-10 && p_rel <= 1e-10,
                format!("max state diff {diff:.3e}, p_det rel diff {p_rel:.3e}"),
            )),
            Err(e) => out.push(check("four_mode_oracle_pnr", false, e.to_string())),
        }
    }

    // four-mode oracle vs mixture constructor, on/off heralding
    {
        let result = (|| -> crate::error::Result<(f64, f64)> {
            let mix = make_photon_subtracted_mixed(0.4, &bs9, trunc30, 1e-14)?;
            let (rho_oracle, p_oracle) =
                four_mode_tap_oracle(0.4, &bs9, trunc30, DetectorModel::OnOff)?;
            let diff = max_elementwise_diff(&mix.to_density_matrix(), &rho_oracle);
            Ok((diff, ((p_oracle - mix.norm()) / p_oracle).abs()))
        })();
        match result {
            Ok((diff, p_rel)) => out.push(check(
                "four_mode_oracle_onoff",
                diff <= 1e-10 && p_rel <= 1e-10,
                format!("max state diff {diff:.3e}, p_det rel diff {p_rel:.3e}"),
            )),
            Err(e) => out.push(check("four_mode_oracle_onoff", false, e.to_string())),
        }
    }

    // quadrature mass over the four quadrants
    {
        let result = (|| -> crate::error::Result<f64> {
            let st = make_squeezed(0.4, TruncationSpec::auto_squeezed(0.4, 1e-12)?)?;
            let cm = channel_matrix(BellSource::Schmidt(&st), 0.1, &integrator(opts))?;
            let worst = cm
                .row_sums()
                .iter()
                .map(|s| (s - 1.0).abs())
                .fold(0.0f64, f64::max);
            Ok(worst)
        })();
        match result {
            Ok(worst) => out.push(check(
                "bell_density_mass",
                worst <= 1e-8,
                format!("max |row sum − 1| = {worst:.3e}"),
            )),
            Err(e) => out.push(check("bell_density_mass", false, e.to_string())),
        }
    }

    // numeric Fisher information against the squeezed-state closed form
    {
        let result = (|| -> crate::error::Result<f64> {
            let st = make_squeezed(0.4, TruncationSpec::auto_squeezed(0.4, 1e-12)?)?;
            let j = fisher_information(
                BellSource::Schmidt(&st),
                &DerivativeConfig::default(),
                &integrator(opts),
            )? * opts.fisher_scale;
            let closed = crate::bell::closed_form_fisher(EnKind::Sq, 0.4, 0.0)?;
            Ok(((j - closed) / closed).abs())
        })();
        match result {
            Ok(rel) => out.push(check(
                "fisher_sq_closed_form",
                rel <= 1e-4,
                format!("relative deviation {rel:.3e}"),
            )),
            Err(e) => out.push(check("fisher_sq_closed_form", false, e.to_string())),
        }
    }

    // numeric Fisher information against the subtracted-state closed form
    {
        let result = (|| -> crate::error::Result<f64> {
            let (st, _) =
                make_photon_subtracted_pure(0.4, &bs9, TruncationSpec::auto_subtracted(0.4, 0.9, 1e-12)?)?;
            let j = fisher_information(
                BellSource::Schmidt(&st),
                &DerivativeConfig::default(),
                &integrator(opts),
            )? * opts.fisher_scale;
            let closed = crate::bell::closed_form_fisher(EnKind::Ng, 0.4, 0.9)?;
            Ok(((j - closed) / closed).abs())
        })();
        match result {
            Ok(rel) => out.push(check(
                "fisher_ng_closed_form",
                rel <= 1e-4,
                format!("relative deviation {rel:.3e}"),
            )),
            Err(e) => out.push(check("fisher_ng_closed_form", false, e.to_string())),
        }
    }

    // negativity closed forms
    {
        let result = (|| -> crate::error::Result<(f64, f64)> {
            let st = make_squeezed(0.4, TruncationSpec::new(25, 1e-12)?)?;
            let dense = log_negativity(&st.to_density_matrix())?.value;
            let sq_dev = (dense - closed_form_en(EnKind::Sq, 0.4, 0.0)?).abs();
            let (ng_state, _) = make_photon_subtracted_pure(0.4, &bs9, trunc30)?;
            let ng_dev =
                (log_negativity_pure(&ng_state) - closed_form_en(EnKind::Ng, 0.4, 0.9)?).abs();
            Ok((sq_dev, ng_dev))
        })();
        match result {
            Ok((sq_dev, ng_dev)) => out.push(check(
                "ln_closed_forms",
                sq_dev <= 1e-6 && ng_dev <= 1e-6,
                format!("SQ deviation {sq_dev:.3e}, NG deviation {ng_dev:.3e}"),
            )),
            Err(e) => out.push(check("ln_closed_forms", false, e.to_string())),
        }
    }

    // threshold formula against the bisection root
    {
        let result = (|| -> crate::error::Result<f64> {
            Ok((lambda_threshold_pure(0.9)? - lambda_threshold_bisect(0.9)?).abs())
        })();
        match result {
            Ok(dev) => out.push(check(
                "ln_threshold_root",
                dev <= 1e-9,
                format!("|formula − bisection| = {dev:.3e}"),
            )),
            Err(e) => out.push(check("ln_threshold_root", false, e.to_string())),
        }
    }

    // channel matrix uniformity at zero signal
    {
        let result = (|| -> crate::error::Result<f64> {
            let st = make_squeezed(0.4, TruncationSpec::auto_squeezed(0.4, 1e-12)?)?;
            let cm = channel_matrix(BellSource::Schmidt(&st), 0.0, &integrator(opts))?;
            let worst = cm
                .probs()
                .iter()
                .flatten()
                .map(|p| (p - 0.25).abs())
                .fold(0.0f64, f64::max);
            Ok(worst)
        })();
        match result {
            Ok(worst) => out.push(check(
                "channel_uniform_at_zero",
                worst <= 1e-9,
                format!("max |entry − 1/4| = {worst:.3e}"),
            )),
            Err(e) => out.push(check("channel_uniform_at_zero", false, e.to_string())),
        }
    }

    // qubit closed form against the dense negativity
    {
        let result = (|| -> crate::error::Result<f64> {
            let mut worst = 0.0f64;
            for &t in &[0.0, 0.5, 1.0] {
                for &c0 in &[0.3, 0.7] {
                    let q = QubitEntangledState::new(c0, 1.1, t)?;
                    let dense = log_negativity(&make_qubit_state(&q, false))?.value;
                    worst = worst.max((ln_qubit(&q) - dense).abs());
                }
            }
            Ok(worst)
        })();
        match result {
            Ok(worst) => out.push(check(
                "qubit_ln_consistency",
                worst <= 1e-9,
                format!("max deviation {worst:.3e}"),
            )),
            Err(e) => out.push(check("qubit_ln_consistency", false, e.to_string())),
        }
    }

    out
}
