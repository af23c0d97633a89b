//! Simulation and stability certification for nonlinear time-delay systems
//! whose state jumps at prescribed impulse times, with the jump maps allowed
//! to read delayed state (discrete delays or sliding integrals).
//!
//! The crate has two halves that meet in the certificate engine:
//!
//! * a method-of-steps Runge-Kutta integrator over piecewise right-continuous
//!   histories ([`simulate`]), producing dense [`Trajectory`] records with
//!   both limits stored at every impulse; and
//! * a dwell-time analysis toolkit: impulse counting over half-open windows,
//!   average and reverse average dwell-time checks, the per-impulse exponent
//!   `sigma` in its four defining cases, and the unified inequality
//!   `-sigma N(t,s) - (c - lambda)(t - s) <= mu` ([`certify`]).
//!
//! Lyapunov pairs can be evaluated along simulated trajectories to confirm a
//! certificate's runtime consequences ([`check_envelope`],
//! [`check_final_bound`]), and the built-in [`presets`] reproduce three fully
//! worked example systems end to end.

// constructors test `!(x > 0.0)` on purpose: the negation also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod error;
pub mod history;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod lyapunov;
pub mod presets;
pub mod schedule;
pub mod system;
pub mod trajectory;

pub use certificate::{
    adt_parameters, certify, classify_case, full_precision, sigma_closed_form, sigma_feasible_max,
    window_count_bounds, CertificateParams, CertificateReport, ConditionV, DwellDirection, Regime,
    SigmaCase, SigmaResult, Verdict, WindowCountBand,
};
pub use error::{CoreError, CoreResult};
pub use history::{history_integral, weighted_integral, History, HistoryFunction, StateVector};
pub use integrate::{convergence_probe, distributed_integral, simulate, SimConfig};
pub use linalg::{spectral_norm, sym_lambda_max, Mat};
pub use lyapunov::{
    check_envelope, check_final_bound, diagnostics, dini_rate_check, evaluate_w, CheckOutcome,
    DiagnosticRow, LyapunovPair, WValues, DINI_TOL, ENVELOPE_TOL,
};
pub use schedule::{
    check_adt, check_reverse_adt, minimal_mu, window_counts, AdtParams, DwellVerdict,
    ImpulseSchedule, MuBound, WindowCountReport,
};
pub use system::{SystemDefinition, SystemSpec, Term};
pub use trajectory::{Side, Trajectory, WindowView};
