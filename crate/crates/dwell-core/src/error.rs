//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation, and simulation routines.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A history was evaluated outside its domain [-tau, 0].
    #[error("offset {offset} outside history domain [{}, 0]", -tau)]
    OffsetOutOfDomain { offset: f64, tau: f64 },

    /// Left limit requested at the left endpoint of the domain.
    #[error("left limit undefined at offset {offset} (left end of the domain)")]
    NoLeftNeighborhood { offset: f64 },

    /// A trajectory read fell outside the covered time range.
    #[error("time {t} outside trajectory coverage [{start}, {end}]")]
    Coverage { t: f64, start: f64, end: f64 },

    /// Vector or matrix dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// Invalid construction data (monotonicity, sign, or shape violations).
    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    /// A query ran past the declared horizon of an explicit impulse list.
    #[error("query at {query} exceeds schedule horizon {horizon}")]
    HorizonExceeded { query: f64, horizon: f64 },

    /// An impulse time precedes the simulation start.
    #[error("impulse time {impulse} precedes start time {t0}")]
    ImpulseBeforeStart { impulse: f64, t0: f64 },

    /// A sigma routine was called for the wrong classification case.
    #[error("operation applies to case {expected}, parameters classify as {found}")]
    WrongCase {
        expected: &'static str,
        found: &'static str,
    },

    /// The window inequality already fails as sigma approaches zero.
    #[error("window inequality infeasible: left side {lhs} >= 1 at sigma -> 0+")]
    InfeasibleSigma { lhs: f64 },

    /// The jump map annihilates the state; every sigma satisfies the inequality.
    #[error("no largest sigma: the window inequality holds for every sigma > 0")]
    UnboundedSigma,

    /// No finite dwell-time reformulation of the unified inequality exists.
    #[error("no finite dwell-time reformulation for sigma = {sigma}, c = {c}, lambda = {lambda}")]
    NoDwellTimeForm { sigma: f64, c: f64, lambda: f64 },

    /// The xi optimization of the jump constants has no real solution.
    #[error("xi optimization infeasible: {why}")]
    XiInfeasible { why: String },

    /// The upper window-count bound is undefined.
    #[error("window-count upper bound undefined: rho1*e^sigma = {value} >= 1")]
    UpperBoundUndefined { value: f64 },

    /// The simulated state left the finite range.
    #[error("trajectory diverged at t = {t} (component magnitude above {limit:e})")]
    Divergence { t: f64, limit: f64 },

    /// The vector fields do not vanish on the zero history.
    #[error("map {which} does not vanish on the zero history (|value| = {norm:e} at t = {t})")]
    NonVanishing {
        which: &'static str,
        t: f64,
        norm: f64,
    },
}

pub type CoreResult<T> = Result<T, CoreError>;
