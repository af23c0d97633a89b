//! Lyapunov pair evaluation along trajectories and the runtime consequences
//! of a certificate: the per-node decay envelope
//! `W(t) <= W(t0) e^{-sigma N(t, t0) - c (t - t0)}`, the final norm bound
//! through the inverse class-K lower envelope, and a finite-difference check
//! of the continuous decay rate.

use crate::error::CoreResult;
use crate::history::{History, StateVector};
use crate::schedule::ImpulseSchedule;
use crate::trajectory::{Side, Trajectory};

/// Default relative tolerance for the envelope and final-bound checks; the
/// trapezoid discretization of the functional part dominates the error.
pub const ENVELOPE_TOL: f64 = 0.05;
/// Default tolerance for the forward-difference decay-rate check.
pub const DINI_TOL: f64 = 1e-2;

pub type PointFn = dyn Fn(f64, &StateVector) -> f64 + Send + Sync;
pub type FunctionalFn = dyn Fn(f64, &dyn History) -> CoreResult<f64> + Send + Sync;
pub type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// The split Lyapunov candidate: a pointwise part `v1`, a functional part
/// `v2` (continuous along solutions), and the inverse of the class-K lower
/// bound on `v1`.
pub struct LyapunovPair {
    pub v1: Box<PointFn>,
    pub v2: Box<FunctionalFn>,
    pub alpha1_inv: Box<ScalarFn>,
}

impl LyapunovPair {
    pub fn new(v1: Box<PointFn>, v2: Box<FunctionalFn>, alpha1_inv: Box<ScalarFn>) -> Self {
        Self { v1, v2, alpha1_inv }
    }
}

impl std::fmt::Debug for LyapunovPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("LyapunovPair { .. }")
    }
}

/// `(W1, W2, W)` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WValues {
    pub w1: f64,
    pub w2: f64,
    pub w: f64,
}

/// Evaluates the pair along the trajectory at `t` with the chosen side
/// convention for the pointwise part.
fn evaluate_w_side(
    pair: &LyapunovPair,
    traj: &Trajectory,
    t: f64,
    side: Side,
) -> CoreResult<WValues> {
    let x = match side {
        Side::At => traj.eval(t)?,
        Side::Before => traj.left_limit(t)?,
    };
    let w1 = (pair.v1)(t, &x);
    let view = traj.window_view(t, side)?;
    let w2 = (pair.v2)(t, &view)?;
    Ok(WValues { w1, w2, w: w1 + w2 })
}

/// `W1(t) = V1(t, x(t))`, `W2(t) = V2(t, x_t)`, `W = W1 + W2`.
pub fn evaluate_w(pair: &LyapunovPair, traj: &Trajectory, t: f64) -> CoreResult<WValues> {
    evaluate_w_side(pair, traj, t, Side::At)
}

/// Outcome of a per-node check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// Worst relative (envelope, norm) or absolute (rate) excess observed.
    pub worst_excess: f64,
    pub worst_time: f64,
    pub samples: usize,
}

/// Checks `W(t) <= (1 + tol) * W(t0) e^{-sigma N(t, t0) - c (t - t0)}` at
/// every recorded node, both limits at impulses. Comparisons run in log space
/// so strongly unstable flows cannot overflow the bound.
pub fn check_envelope(
    pair: &LyapunovPair,
    traj: &Trajectory,
    sched: &ImpulseSchedule,
    sigma: f64,
    c: f64,
    tol: f64,
) -> CoreResult<CheckOutcome> {
    let t0 = traj.t0();
    let w0 = evaluate_w(pair, traj, t0)?.w;
    let log_w0 = w0.ln(); // -inf for the zero solution

    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_time = t0;
    let mut samples = 0usize;
    let mut count = 0usize;
    let mut next_event_count_at = t0;

    for (i, &t) in traj.times().iter().enumerate() {
        // impulse counts walk forward with the nodes
        if t > next_event_count_at {
            count += sched.count_impulses(next_event_count_at, t)?;
            next_event_count_at = t;
        }
        let is_impulse = traj.is_impulse_node(i);
        let mut record = |w: f64, n_for_sample: usize| {
            let log_bound = log_w0 - sigma * n_for_sample as f64 - c * (t - t0);
            let excess = if w == 0.0 {
                // zero is below any envelope
                -1.0
            } else {
                (w.ln() - log_bound).exp_m1()
            };
            if excess > worst_excess {
                worst_excess = excess;
                worst_time = t;
            }
            samples += 1;
        };
        if is_impulse && t > t0 {
            // the left limit belongs to the pre-jump interval
            let pre = evaluate_w_side(pair, traj, t, Side::Before)?;
            record(pre.w, count - 1);
        }
        let at = evaluate_w(pair, traj, t)?;
        record(at.w, count);
    }
    Ok(CheckOutcome {
        holds: worst_excess <= tol,
        worst_excess,
        worst_time,
        samples,
    })
}

/// Checks `||x(t)|| <= (1 + tol) * alpha1_inv(e^mu W(t0) e^{-lambda (t - t0)})`
/// at every recorded node (both limits at impulses).
pub fn check_final_bound(
    pair: &LyapunovPair,
    traj: &Trajectory,
    mu: f64,
    lambda: f64,
    tol: f64,
) -> CoreResult<CheckOutcome> {
    let t0 = traj.t0();
    let w0 = evaluate_w(pair, traj, t0)?.w;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_time = t0;
    let mut samples = 0usize;

    for (i, &t) in traj.times().iter().enumerate() {
        let bound = (pair.alpha1_inv)(mu.exp() * w0 * (-lambda * (t - t0)).exp());
        let mut record = |norm: f64| {
            let excess = if norm == 0.0 {
                -1.0
            } else if bound == 0.0 {
                f64::INFINITY
            } else {
                norm / bound - 1.0
            };
            if excess > worst_excess {
                worst_excess = excess;
                worst_time = t;
            }
            samples += 1;
        };
        if traj.is_impulse_node(i) && t > t0 {
            record(traj.left_limit(t)?.norm());
        }
        record(traj.eval(t)?.norm());
    }
    Ok(CheckOutcome {
        holds: worst_excess <= tol,
        worst_excess,
        worst_time,
        samples,
    })
}

/// Forward-difference check of the continuous decay rate: between impulses,
/// `(W(t+h) - W(t))/h <= -c W(t) + tol * (1 + W(t))`. Differences across an
/// impulse node are excluded. Meaningful on densely recorded trajectories.
pub fn dini_rate_check(
    pair: &LyapunovPair,
    traj: &Trajectory,
    c: f64,
    tol: f64,
) -> CoreResult<CheckOutcome> {
    let times = traj.times();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_time = traj.t0();
    let mut samples = 0usize;
    let mut prev: Option<(f64, f64)> = None;

    for (i, &t) in times.iter().enumerate() {
        let w_here = evaluate_w(pair, traj, t)?.w;
        if let Some((t_prev, w_prev)) = prev {
            // skip differences that straddle a jump
            if !traj.is_impulse_node(i) {
                let rate = (w_here - w_prev) / (t - t_prev);
                let slack = tol * (1.0 + w_prev);
                let excess = rate + c * w_prev - slack;
                if excess > worst_excess {
                    worst_excess = excess;
                    worst_time = t_prev;
                }
                samples += 1;
            }
        }
        prev = Some((t, w_here));
    }
    Ok(CheckOutcome {
        holds: worst_excess <= 0.0,
        worst_excess,
        worst_time,
        samples,
    })
}

/// One row of the diagnostic table emitted alongside simulations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub w1: f64,
    pub w2: f64,
    pub w: f64,
    pub envelope_bound: f64,
    pub norm_bound: f64,
}

/// Samples the Lyapunov values and both certified bounds at every node
/// (both limits at impulses, left limit first).
pub fn diagnostics(
    pair: &LyapunovPair,
    traj: &Trajectory,
    sched: &ImpulseSchedule,
    sigma: f64,
    c: f64,
    mu: f64,
    lambda: f64,
) -> CoreResult<Vec<DiagnosticRow>> {
    let t0 = traj.t0();
    let w0 = evaluate_w(pair, traj, t0)?.w;
    let mut rows = Vec::with_capacity(traj.times().len() + traj.impulse_nodes().len());
    let mut count = 0usize;
    let mut cursor = t0;
    for (i, &t) in traj.times().iter().enumerate() {
        if t > cursor {
            count += sched.count_impulses(cursor, t)?;
            cursor = t;
        }
        let norm_bound = (pair.alpha1_inv)(mu.exp() * w0 * (-lambda * (t - t0)).exp());
        if traj.is_impulse_node(i) && t > t0 {
            let pre = evaluate_w_side(pair, traj, t, Side::Before)?;
            rows.push(DiagnosticRow {
                t,
                w1: pre.w1,
                w2: pre.w2,
                w: pre.w,
                envelope_bound: w0 * (-sigma * (count as f64 - 1.0) - c * (t - t0)).exp(),
                norm_bound,
            });
        }
        let at = evaluate_w(pair, traj, t)?;
        rows.push(DiagnosticRow {
            t,
            w1: at.w1,
            w2: at.w2,
            w: at.w,
            envelope_bound: w0 * (-sigma * count as f64 - c * (t - t0)).exp(),
            norm_bound,
        });
    }
    Ok(rows)
}
