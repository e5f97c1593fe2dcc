//! Correlation sweeps between the Fisher information and the logarithmic
//! negativity over (λ, T) grids: one row per point with both measures, the
//! squeezed-state-relation predictor, and the relative error between them.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{
    en_from_fisher, f_factor, fisher_information, BellSource, DerivativeConfig, IntegratorConfig,
};
use crate::error::Result;
use crate::fock::{BeamSplitterSpec, TruncationSpec};
use crate::negativity::{closed_form_en, log_negativity_mixture, EnKind};
use crate::states::{
    make_photon_subtracted_mixed, onoff_success_probability, pnr_success_probability,
};

/// Which family the sweep covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// PNR-heralded pure states; closed forms on both axes.
    Pure,
    /// On/off-heralded mixed states; fully numeric J₀ and E_N.
    Mixed,
}

/// One grid point of a correlation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub transmittance: f64,
    pub lambda_t: f64,
    pub j0: f64,
    pub en: f64,
    pub en_pred: f64,
    pub f: f64,
    pub rel_err: f64,
    pub p_det: f64,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(lambda: f64, transmittance: f64, message: String) -> Self {
        SweepRow {
            lambda,
            transmittance,
            lambda_t: lambda * transmittance,
            j0: f64::NAN,
            en: f64::NAN,
            en_pred: f64::NAN,
            f: f64::NAN,
            rel_err: f64::NAN,
            p_det: f64::NAN,
            error: Some(message),
        }
    }
}

/// Everything a sweep row needs beyond the grid itself.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub tail_tol: f64,
    pub component_tol: f64,
    pub n_max_override: Option<usize>,
    pub integrator: IntegratorConfig,
    pub derivative: DerivativeConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            tail_tol: 1e-12,
            component_tol: 1e-10,
            n_max_override: None,
            integrator: IntegratorConfig::default(),
            derivative: DerivativeConfig::default(),
        }
    }
}

fn pure_row(lambda: f64, transmittance: f64) -> Result<SweepRow> {
    let j0 = crate::bell::closed_form_fisher(EnKind::Ng, lambda, transmittance)?;
    let en = closed_form_en(EnKind::Ng, lambda, transmittance)?;
    let lambda_t = lambda * transmittance;
    let f = f_factor(lambda_t);
    let en_pred = en_from_fisher(j0, f);
    let rel_err = if en != 0.0 {
        ((en - en_pred) / en).abs()
    } else {
        0.0
    };
    let bs = BeamSplitterSpec::new(transmittance)?;
    Ok(SweepRow {
        lambda,
        transmittance,
        lambda_t,
        j0,
        en,
        en_pred,
        f,
        rel_err,
        p_det: pnr_success_probability(lambda, &bs),
        error: None,
    })
}

fn mixed_row(lambda: f64, transmittance: f64, cfg: &SweepConfig) -> Result<SweepRow> {
    let bs = BeamSplitterSpec::new(transmittance)?;
    let trunc = match cfg.n_max_override {
        Some(n_max) => TruncationSpec::new(n_max, cfg.tail_tol)?,
        None => TruncationSpec::auto_squeezed(lambda, cfg.tail_tol)?,
    };
    let mix = make_photon_subtracted_mixed(lambda, &bs, trunc, cfg.component_tol)?;
    let j0 = fisher_information(
        BellSource::Mixture(&mix),
        &cfg.derivative,
        &cfg.integrator,
    )?;
    let en = log_negativity_mixture(&mix)?.value;
    let lambda_t = lambda * transmittance;
    // squeezed-state relation (f = 1) used as the predictor for mixed states
    let en_pred = en_from_fisher(j0, 1.0);
    let rel_err = if en != 0.0 {
        ((en - en_pred) / en).abs()
    } else {
        0.0
    };
    Ok(SweepRow {
        lambda,
        transmittance,
        lambda_t,
        j0,
        en,
        en_pred,
        f: f_factor(lambda_t),
        rel_err,
        p_det: onoff_success_probability(lambda, &bs),
        error: None,
    })
}

/// Runs the sweep over the cartesian product of `lambdas` and `t_list`,
/// one row per point, in deterministic grid order. Row failures are
/// recorded in the row's `error` field without aborting the sweep.
pub fn correlation_sweep(
    kind: SweepKind,
    lambdas: &[f64],
    t_list: &[f64],
    cfg: &SweepConfig,
) -> Vec<SweepRow> {
    let grid: Vec<(f64, f64)> = t_list
        .iter()
        .flat_map(|&t| lambdas.iter().map(move |&l| (l, t)))
        .collect();
    grid.par_iter()
        .map(|&(lambda, t)| {
            let row = match kind {
                SweepKind::Pure => pure_row(lambda, t),
                SweepKind::Mixed => mixed_row(lambda, t, cfg),
            };
            row.unwrap_or_else(|e| SweepRow::failed(lambda, t, e.to_string()))
        })
        .collect()
}
