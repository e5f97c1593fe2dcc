//! Quantifies continuous-variable entanglement two ways and verifies their
//! correspondence: the logarithmic negativity (partial transpose plus trace
//! norm in a truncated Fock basis) and the Fisher information of an
//! entanglement-assisted QPSK coding channel read out by a CV Bell
//! measurement.
//!
//! Covered state families: two-mode squeezed states, photon-subtracted
//! squeezed states heralded by PNR or on/off detectors (pure and mixed), and
//! entangled photon-number qubits.

pub mod bell;
pub mod error;
pub mod fock;
pub mod negativity;
pub mod qubit;
pub mod states;
pub mod sweep;
pub mod validate;

pub use bell::{
    bell_density_general, bell_density_mixture, bell_density_schmidt, channel_matrix,
    closed_form_fisher, en_from_fisher, f_factor, fisher_information, mutual_information,
    BellSource, ChannelMatrix, DerivativeConfig, IntegratorConfig, MeasurementConvention,
    QpskConstellation,
};
pub use error::{Error, Result};
pub use fock::{
    associated_laguerre, bs_split_with_vacuum, displacement_matrix, displacement_matrix_element,
    log_factorial, xi_coeff, BeamSplitterSpec, TruncationSpec,
};
pub use negativity::{
    closed_form_en, lambda_threshold_bisect, lambda_threshold_pure, log_negativity,
    log_negativity_mixture, log_negativity_pure, partial_transpose, trace_norm, EnKind, LnResult,
};
pub use qubit::{
    averaged_qubit_fisher, flipped_fisher, ln_qubit, qubit_fisher, unflipped_primed_fisher,
    QubitFisherResult,
};
pub use states::{
    four_mode_tap_oracle, local_flip, make_photon_subtracted_mixed, make_photon_subtracted_pure,
    make_qubit_state, make_squeezed, onoff_success_probability, pnr_success_probability,
    DensityMatrixFock, DetectorModel, MixtureComponent, Mode, QubitEntangledState,
    SchmidtDiagonalState, TwoModeFockMixture,
};
pub use sweep::{correlation_sweep, SweepConfig, SweepKind, SweepRow};
pub use validate::{run_validation, CheckResult, ValidateOptions};
