//! Method-of-steps integration: classical fixed-stage Runge-Kutta between
//! impulse times, delayed reads served from the accumulating trajectory, and
//! exact alignment of steps with every impulse.

use crate::error::{CoreError, CoreResult};
use crate::history::{
    history_integral, CellVisitor, History, HistoryFunction, StateVector, DOMAIN_EPS,
};
use crate::schedule::ImpulseSchedule;
use crate::system::SystemDefinition;
use crate::trajectory::{Side, Trajectory};

/// Component magnitude beyond which the run is declared divergent.
const DIVERGENCE_LIMIT: f64 = 1e12;

/// Fixed-step configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub base_step: f64,
    pub t_end: f64,
    /// Keep every n-th node in the output (impulse nodes and segment
    /// endpoints are always kept). Integration itself always runs dense.
    pub record_stride: usize,
}

impl SimConfig {
    pub fn new(base_step: f64, t_end: f64) -> Self {
        Self {
            base_step,
            t_end,
            record_stride: 1,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride.max(1);
        self
    }

    fn validate(&self, sys: &SystemDefinition, sched: &ImpulseSchedule, t0: f64) -> CoreResult<()> {
        if !(self.base_step > 0.0) || !self.base_step.is_finite() {
            return Err(CoreError::Invalid {
                what: "simulation config",
                why: format!("base_step must be positive, got {}", self.base_step),
            });
        }
        if !(self.t_end > t0) {
            return Err(CoreError::Invalid {
                what: "simulation config",
                why: format!("t_end {} must exceed t0 {t0}", self.t_end),
            });
        }
        let max_step = sys.tau() / 4.0;
        if self.base_step > max_step * (1.0 + 1e-12) {
            return Err(CoreError::Invalid {
                what: "simulation config",
                why: format!(
                    "base_step {} exceeds tau/4 = {max_step} (delayed reads must stay behind the current step)",
                    self.base_step
                ),
            });
        }
        if let Some(gap) = sched.min_gap() {
            if gap > 0.0 && self.base_step > gap / 2.0 * (1.0 + 1e-12) {
                return Err(CoreError::Invalid {
                    what: "simulation config",
                    why: format!(
                        "base_step {} exceeds half the minimal impulse gap {gap}",
                        self.base_step
                    ),
                });
            }
        }
        Ok(())
    }
}

/// History view used for stage evaluations: past reads come from the stored
/// trajectory, the offset-0 read is the running stage state, and reads inside
/// the current (partial) step interpolate between the step base and the stage
/// state.
///
/// `exact_hit_side` resolves delayed reads that land exactly on an impulse
/// node: the end-of-step stage integrates the flow's left branch and must see
/// the pre-jump value, while the start-of-step stage sees the post-jump one.
struct StageView<'a> {
    traj: &'a Trajectory,
    base_t: f64,
    base_x: &'a StateVector,
    stage_t: f64,
    stage_x: &'a StateVector,
    exact_hit_side: Side,
}

impl StageView<'_> {
    fn read(&self, u: f64) -> CoreResult<StateVector> {
        if u >= self.stage_t {
            return Ok(self.stage_x.clone());
        }
        if u > self.base_t {
            let theta = (u - self.base_t) / (self.stage_t - self.base_t);
            return Ok(crate::history::lerp_slices(
                self.base_x.as_slice(),
                self.stage_x.as_slice(),
                theta,
            ));
        }
        match self.exact_hit_side {
            Side::At => self.traj.eval(u),
            // differs from eval only exactly at impulse nodes
            Side::Before => self.traj.left_limit(u),
        }
    }
}

impl History for StageView<'_> {
    fn dim(&self) -> usize {
        self.traj.dim()
    }

    fn tau(&self) -> f64 {
        self.traj.tau()
    }

    fn eval(&self, offset: f64) -> CoreResult<StateVector> {
        let tau = self.tau();
        let slack = DOMAIN_EPS * tau.max(1.0);
        if offset < -tau - slack || offset > slack {
            return Err(CoreError::OffsetOutOfDomain { offset, tau });
        }
        self.read(self.stage_t + offset.clamp(-tau, 0.0))
    }

    fn left_limit(&self, offset: f64) -> CoreResult<StateVector> {
        let tau = self.tau();
        let slack = DOMAIN_EPS * tau.max(1.0);
        if offset < -tau - slack || offset > slack {
            return Err(CoreError::OffsetOutOfDomain { offset, tau });
        }
        let offset = offset.clamp(-tau, 0.0);
        if offset == -tau {
            return Err(CoreError::NoLeftNeighborhood { offset });
        }
        let u = self.stage_t + offset;
        if u > self.base_t {
            return self.read(u);
        }
        self.traj.left_limit(u)
    }

    fn for_each_cell(&self, from: f64, to: f64, visit: &mut CellVisitor) -> CoreResult<()> {
        let tau = self.tau();
        let slack = DOMAIN_EPS * tau.max(1.0);
        if from < -tau - slack || to > slack {
            return Err(CoreError::OffsetOutOfDomain {
                offset: if from < -tau - slack { from } else { to },
                tau,
            });
        }
        let from = from.clamp(-tau, 0.0);
        let to = to.clamp(-tau, 0.0);
        if to <= from {
            return Ok(());
        }
        let abs_from = self.stage_t + from;
        let abs_to = self.stage_t + to;

        // stored part
        if abs_from < self.base_t {
            let stored_to = abs_to.min(self.base_t);
            let view = self.traj.window_view(self.base_t, Side::At)?;
            view.for_each_cell(
                abs_from - self.base_t,
                stored_to - self.base_t,
                &mut |s0, v0, s1, v1| {
                    visit(
                        s0 + self.base_t - self.stage_t,
                        v0,
                        s1 + self.base_t - self.stage_t,
                        v1,
                    )
                },
            )?;
        }
        // overlap cell between the step base and the stage point
        if abs_to > self.base_t && self.stage_t > self.base_t {
            let lo = abs_from.max(self.base_t);
            let v_lo = self.read(lo)?;
            let v_hi = self.read(abs_to)?;
            visit(
                lo - self.stage_t,
                v_lo.as_slice(),
                abs_to - self.stage_t,
                v_hi.as_slice(),
            );
        }
        Ok(())
    }
}

fn check_finite(t: f64, x: &StateVector) -> CoreResult<()> {
    if !x.is_finite() || x.max_abs() > DIVERGENCE_LIMIT {
        return Err(CoreError::Divergence {
            t,
            limit: DIVERGENCE_LIMIT,
        });
    }
    Ok(())
}

/// One classical 4-stage Runge-Kutta step from `(t, y)` over `h`, stage
/// history reads served by [`StageView`].
fn rk4_step(
    sys: &SystemDefinition,
    traj: &Trajectory,
    t: f64,
    y: &StateVector,
    h: f64,
) -> CoreResult<StateVector> {
    let eval = |stage_t: f64, stage_x: &StateVector, side: Side| -> CoreResult<StateVector> {
        let view = StageView {
            traj,
            base_t: t,
            base_x: y,
            stage_t,
            stage_x,
            exact_hit_side: side,
        };
        sys.flow_at(stage_t, &view)
    };
    let k1 = eval(t, y, Side::At)?;

    let mut y2 = y.clone();
    y2.add_scaled(0.5 * h, &k1);
    let k2 = eval(t + 0.5 * h, &y2, Side::At)?;

    let mut y3 = y.clone();
    y3.add_scaled(0.5 * h, &k2);
    let k3 = eval(t + 0.5 * h, &y3, Side::At)?;

    let mut y4 = y.clone();
    y4.add_scaled(h, &k3);
    let k4 = eval(t + h, &y4, Side::Before)?;

    let mut out = y.clone();
    out.add_scaled(h / 6.0, &k1);
    out.add_scaled(h / 3.0, &k2);
    out.add_scaled(h / 3.0, &k3);
    out.add_scaled(h / 6.0, &k4);
    Ok(out)
}

/// Simulates the system from `t0` to `cfg.t_end`. Steps never lengthen: each
/// inter-impulse segment is split uniformly so the last node lands exactly on
/// the impulse time, where the jump map is applied to the pre-jump window.
pub fn simulate(
    sys: &SystemDefinition,
    sched: &ImpulseSchedule,
    phi: &HistoryFunction,
    t0: f64,
    cfg: &SimConfig,
) -> CoreResult<Trajectory> {
    cfg.validate(sys, sched, t0)?;
    if phi.dim() != sys.dimension() {
        return Err(CoreError::Dimension {
            expected: sys.dimension(),
            got: phi.dim(),
        });
    }
    if (phi.tau() - sys.tau()).abs() > 1e-12 * sys.tau().max(1.0) {
        return Err(CoreError::Invalid {
            what: "initial history",
            why: format!(
                "history domain length {} does not match the system delay {}",
                phi.tau(),
                sys.tau()
            ),
        });
    }
    if let Some(first) = sched.first_event() {
        if first < t0 {
            return Err(CoreError::ImpulseBeforeStart { impulse: first, t0 });
        }
    }

    let events = sched.events_between_closed(t0, cfg.t_end)?;
    let mut traj = Trajectory::new(t0, phi.clone())?;

    let mut first_event_at_start = false;
    // impulse exactly at the start: applied before any continuous step
    if events.first().copied() == Some(t0) {
        let pre = phi.left_limit(0.0)?;
        let pre_window = PhiBefore { phi, pre: &pre };
        let jump = sys.jump_at(t0, &pre_window)?;
        let mut post = pre.clone();
        post.add_scaled(1.0, &jump);
        check_finite(t0, &post)?;
        traj.apply_jump_at_start(pre, post)?;
        first_event_at_start = true;
    }

    let boundaries = segment_boundaries(
        sys,
        if first_event_at_start {
            &events[1..]
        } else {
            &events
        },
        t0,
        cfg.t_end,
    );

    let mut t = t0;
    let mut y = traj.last_state().clone();
    for &(seg_end, is_event) in &boundaries {
        let span = seg_end - t;
        let steps = (span / cfg.base_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for i in 1..=steps {
            let target = if i == steps {
                seg_end
            } else {
                t + h * i as f64
            };
            let base_t = traj.last_time();
            let next = rk4_step(sys, &traj, base_t, &y, target - base_t)?;
            check_finite(target, &next)?;
            traj.push_node(target, next.clone())?;
            if i == steps && is_event {
                let window = traj.window_view(target, Side::Before)?;
                let jump = sys.jump_at(target, &window)?;
                let mut post = next.clone();
                post.add_scaled(1.0, &jump);
                check_finite(target, &post)?;
                traj.convert_last_to_impulse(next, post)?;
            }
            y = traj.last_state().clone();
        }
        t = seg_end;
    }

    if cfg.record_stride > 1 {
        return thin_trajectory(&traj, cfg.record_stride);
    }
    Ok(traj)
}

/// How many delay propagations of each solution kink to align steps with;
/// kinks smooth by one derivative order per propagation, so three levels
/// leave only fourth-order-harmless nonsmoothness unaligned.
const KINK_GENERATIONS: usize = 3;

/// Segment boundaries in `(t0, t_end]`: every impulse time (flagged) plus the
/// solution kinks the flow's discrete delays propagate from the start time
/// and from each impulse.
fn segment_boundaries(
    sys: &SystemDefinition,
    events: &[f64],
    t0: f64,
    t_end: f64,
) -> Vec<(f64, bool)> {
    let scale = t_end.abs().max(1.0);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * scale;

    let mut kinks: Vec<f64> = Vec::new();
    if !sys.flow_delays().is_empty() {
        let mut frontier: Vec<f64> = std::iter::once(t0).chain(events.iter().copied()).collect();
        for _ in 0..KINK_GENERATIONS {
            let mut next = Vec::new();
            for &base in &frontier {
                for &d in sys.flow_delays() {
                    let p = base + d;
                    if p > t0 && p < t_end {
                        next.push(p);
                    }
                }
            }
            kinks.extend_from_slice(&next);
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
    }

    let mut boundaries: Vec<(f64, bool)> = events.iter().map(|&e| (e, true)).collect();
    for k in kinks {
        if close(k, t0) || close(k, t_end) || events.iter().any(|&e| close(k, e)) {
            continue;
        }
        boundaries.push((k, false));
    }
    boundaries.push((t_end, false));
    boundaries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // merge near-coincident kinks, keeping event flags; two distinct
    // impulses stay separate no matter how close
    boundaries.dedup_by(|b, a| {
        if close(a.0, b.0) && !(a.1 && b.1) {
            a.1 |= b.1;
            true
        } else {
            false
        }
    });
    boundaries
}

/// The pre-jump window at the start time: the initial history with the
/// offset-0 read replaced by its left limit.
struct PhiBefore<'a> {
    phi: &'a HistoryFunction,
    pre: &'a StateVector,
}

impl History for PhiBefore<'_> {
    fn dim(&self) -> usize {
        self.phi.dim()
    }
    fn tau(&self) -> f64 {
        self.phi.tau()
    }
    fn eval(&self, offset: f64) -> CoreResult<StateVector> {
        if offset == 0.0 {
            return Ok(self.pre.clone());
        }
        self.phi.eval(offset)
    }
    fn left_limit(&self, offset: f64) -> CoreResult<StateVector> {
        self.phi.left_limit(offset)
    }
    fn for_each_cell(&self, from: f64, to: f64, visit: &mut CellVisitor) -> CoreResult<()> {
        self.phi.for_each_cell(from, to, visit)
    }
}

fn thin_trajectory(traj: &Trajectory, stride: usize) -> CoreResult<Trajectory> {
    let mut out = Trajectory::new(traj.t0(), traj.initial_history().clone())?;
    if let Some(pre0) = traj.pre_state(0) {
        out.apply_jump_at_start(pre0.clone(), traj.states()[0].clone())?;
    }
    let n = traj.times().len();
    let mut since_kept = 0usize;
    for i in 1..n {
        let t = traj.times()[i];
        since_kept += 1;
        let keep = traj.is_impulse_node(i) || i == n - 1 || since_kept >= stride;
        if !keep {
            continue;
        }
        since_kept = 0;
        match traj.pre_state(i) {
            Some(p) => out.push_impulse(t, p.clone(), traj.states()[i].clone())?,
            None => out.push_node(t, traj.states()[i].clone())?,
        }
    }
    Ok(out)
}

/// Trapezoid integral of the solution over `[t - tau, t]`, splitting cells at
/// interior jumps.
pub fn distributed_integral(traj: &Trajectory, t: f64, tau: f64) -> CoreResult<StateVector> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(CoreError::Invalid {
            what: "integral window",
            why: format!("tau must be positive, got {tau}"),
        });
    }
    if tau > traj.tau() * (1.0 + 1e-12) {
        return Err(CoreError::Invalid {
            what: "integral window",
            why: format!("window {tau} exceeds the trajectory delay {}", traj.tau()),
        });
    }
    let view = traj.window_view(t, Side::At)?;
    history_integral(&view, -tau, 0.0)
}

/// Self-convergence study: runs the same problem at each step size and
/// reports the observed order between consecutive step pairs, using the
/// finest run as the reference.
pub fn convergence_probe(
    sys: &SystemDefinition,
    sched: &ImpulseSchedule,
    phi: &HistoryFunction,
    t0: f64,
    t_end: f64,
    steps: &[f64],
) -> CoreResult<Vec<f64>> {
    if steps.len() < 3 {
        return Err(CoreError::Invalid {
            what: "convergence probe",
            why: "need at least three step sizes".into(),
        });
    }
    if !steps.windows(2).all(|w| w[0] > w[1]) {
        return Err(CoreError::Invalid {
            what: "convergence probe",
            why: "steps must be strictly decreasing".into(),
        });
    }
    let mut finals = Vec::with_capacity(steps.len());
    for &h in steps {
        let cfg = SimConfig::new(h, t_end);
        let traj = simulate(sys, sched, phi, t0, &cfg)?;
        finals.push(traj.last_state().clone());
    }
    let reference = finals.last().unwrap().clone();
    let errors: Vec<f64> = finals[..finals.len() - 1]
        .iter()
        .map(|x| x.sub(&reference).norm())
        .collect();
    let mut orders = Vec::new();
    for i in 0..errors.len() - 1 {
        let ratio_e = errors[i] / errors[i + 1].max(1e-300);
        let ratio_h = steps[i] / steps[i + 1];
        orders.push(ratio_e.ln() / ratio_h.ln());
    }
    Ok(orders)
}
