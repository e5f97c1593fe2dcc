//! Run configuration: CLI flags merged over an optional JSON config file,
//! flags winning. The merged config serializes to a canonical form that
//! reparses identically.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Point,
    SweepPure,
    SweepMixed,
    Qubit,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Sq,
    NgPure,
    NgMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_count: Option<usize>,
    #[serde(default)]
    pub transmittance: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<StateKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_c0: Option<f64>,
    pub n_phi: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    pub tail_tol: f64,
    pub component_tol: f64,
    pub quad_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    pub deriv_step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// The same fields, all optional: the shape of a config file and of the
/// flag layer before merging.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PartialConfig {
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub lambda_start: Option<f64>,
    #[serde(default)]
    pub lambda_stop: Option<f64>,
    #[serde(default)]
    pub lambda_count: Option<usize>,
    #[serde(default)]
    pub transmittance: Option<Vec<f64>>,
    #[serde(default)]
    pub kind: Option<StateKind>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub qubit_t: Option<f64>,
    #[serde(default)]
    pub qubit_c0: Option<f64>,
    #[serde(default)]
    pub n_phi: Option<usize>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub tail_tol: Option<f64>,
    #[serde(default)]
    pub component_tol: Option<f64>,
    #[serde(default)]
    pub quad_points: Option<usize>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub deriv_step: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

impl PartialConfig {
    /// Flags win over the file layer.
    pub fn merged_over(self, file: PartialConfig) -> PartialConfig {
        PartialConfig {
            lambda: self.lambda.or(file.lambda),
            lambda_start: self.lambda_start.or(file.lambda_start),
            lambda_stop: self.lambda_stop.or(file.lambda_stop),
            lambda_count: self.lambda_count.or(file.lambda_count),
            transmittance: self.transmittance.or(file.transmittance),
            kind: self.kind.or(file.kind),
            beta: self.beta.or(file.beta),
            qubit_t: self.qubit_t.or(file.qubit_t),
            qubit_c0: self.qubit_c0.or(file.qubit_c0),
            n_phi: self.n_phi.or(file.n_phi),
            n_max: self.n_max.or(file.n_max),
            tail_tol: self.tail_tol.or(file.tail_tol),
            component_tol: self.component_tol.or(file.component_tol),
            quad_points: self.quad_points.or(file.quad_points),
            half_width: self.half_width.or(file.half_width),
            deriv_step: self.deriv_step.or(file.deriv_step),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        }
    }

    pub fn resolve(self, command: CommandKind) -> RunConfig {
        RunConfig {
            command,
            lambda: self.lambda,
            lambda_start: self.lambda_start,
            lambda_stop: self.lambda_stop,
            lambda_count: self.lambda_count,
            transmittance: self.transmittance.unwrap_or_default(),
            kind: self.kind,
            beta: self.beta,
            qubit_t: self.qubit_t,
            qubit_c0: self.qubit_c0,
            n_phi: self.n_phi.unwrap_or(32),
            n_max: self.n_max,
            tail_tol: self.tail_tol.unwrap_or(1e-12),
            component_tol: self.component_tol.unwrap_or(1e-10),
            quad_points: self.quad_points.unwrap_or(160),
            half_width: self.half_width,
            deriv_step: self.deriv_step.unwrap_or(1e-3),
            out: self.out,
            format: self.format.unwrap_or(OutputFormat::Csv),
        }
    }
}

impl RunConfig {
    /// λ grid from the start/stop/count spec; empty when count is 0.
    pub fn lambda_grid(&self) -> Vec<f64> {
        let count = self.lambda_count.unwrap_or(0);
        let start = self.lambda_start.unwrap_or(0.0);
        let stop = self.lambda_stop.unwrap_or(start);
        match count {
            0 => Vec::new(),
            1 => vec![start],
            n => (0..n)
                .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    pub fn integrator(&self) -> entfi::IntegratorConfig {
        entfi::IntegratorConfig {
            points: self.quad_points,
            half_width: self.half_width,
        }
    }

    pub fn derivative(&self) -> entfi::DerivativeConfig {
        entfi::DerivativeConfig {
            step: self.deriv_step,
            richardson_levels: 2,
        }
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
