//! Dense solution records with impulse discontinuities.

use crate::error::{CoreError, CoreResult};
use crate::history::{lerp_slices, CellVisitor, History, HistoryFunction, StateVector, DOMAIN_EPS};

/// Which value a history window takes at offset 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Right-continuous value `x(t)`.
    At,
    /// Left limit `x(t^-)` (the window seen by a jump map).
    Before,
}

/// A simulated solution: strictly increasing nodes, both limits at impulse
/// nodes, and the initial history covering `[t0 - tau, t0]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    t0: f64,
    initial: HistoryFunction,
    times: Vec<f64>,
    states: Vec<StateVector>,
    /// Sorted `(node index, left limit)` pairs at impulse nodes.
    impulses: Vec<(usize, StateVector)>,
}

impl Trajectory {
    /// Starts a trajectory at `t0` from its initial history. The first node
    /// takes the history's value at offset 0.
    pub fn new(t0: f64, initial: HistoryFunction) -> CoreResult<Self> {
        if !t0.is_finite() {
            return Err(CoreError::NonFinite { context: "t0" });
        }
        let first = initial.eval(0.0)?;
        Ok(Self {
            t0,
            initial,
            times: vec![t0],
            states: vec![first],
            impulses: Vec::new(),
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tau(&self) -> f64 {
        self.initial.tau()
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    pub fn initial_history(&self) -> &HistoryFunction {
        &self.initial
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last_state(&self) -> &StateVector {
        self.states.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// Impulse nodes as `(node index, left limit)` in increasing order.
    pub fn impulse_nodes(&self) -> &[(usize, StateVector)] {
        &self.impulses
    }

    pub fn impulse_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.impulses.iter().map(|(i, _)| self.times[*i])
    }

    pub fn is_impulse_node(&self, idx: usize) -> bool {
        self.pre_state(idx).is_some()
    }

    /// Left limit stored at an impulse node, if any.
    pub fn pre_state(&self, idx: usize) -> Option<&StateVector> {
        self.impulses
            .binary_search_by_key(&idx, |(i, _)| *i)
            .ok()
            .map(|k| &self.impulses[k].1)
    }

    /// Appends a continuous node at `t > last_time()`.
    pub fn push_node(&mut self, t: f64, state: StateVector) -> CoreResult<()> {
        self.push_checked(t, state)?;
        Ok(())
    }

    /// Appends an impulse node carrying both limits.
    pub fn push_impulse(&mut self, t: f64, pre: StateVector, post: StateVector) -> CoreResult<()> {
        if pre.dim() != self.dim() {
            return Err(CoreError::Dimension {
                expected: self.dim(),
                got: pre.dim(),
            });
        }
        self.push_checked(t, post)?;
        self.impulses.push((self.times.len() - 1, pre));
        Ok(())
    }

    /// Converts the most recently pushed continuous node into an impulse node
    /// carrying the given limits.
    pub(crate) fn convert_last_to_impulse(
        &mut self,
        pre: StateVector,
        post: StateVector,
    ) -> CoreResult<()> {
        let idx = self.times.len() - 1;
        if self.is_impulse_node(idx) {
            return Err(CoreError::Invalid {
                what: "trajectory",
                why: "last node already carries a jump".into(),
            });
        }
        self.states[idx] = post;
        self.impulses.push((idx, pre));
        Ok(())
    }

    /// Marks the start node as an impulse applied at `t0` (jump before the
    /// first continuous step): replaces the stored value and records the
    /// pre-jump left limit.
    pub fn apply_jump_at_start(&mut self, pre: StateVector, post: StateVector) -> CoreResult<()> {
        if self.times.len() != 1 || !self.impulses.is_empty() {
            return Err(CoreError::Invalid {
                what: "trajectory",
                why: "start jump must be applied before any step".into(),
            });
        }
        self.states[0] = post;
        self.impulses.push((0, pre));
        Ok(())
    }

    fn push_checked(&mut self, t: f64, state: StateVector) -> CoreResult<()> {
        if !t.is_finite() {
            return Err(CoreError::NonFinite {
                context: "node time",
            });
        }
        if t <= self.last_time() {
            return Err(CoreError::Invalid {
                what: "trajectory",
                why: format!("node time {t} not after {}", self.last_time()),
            });
        }
        if state.dim() != self.dim() {
            return Err(CoreError::Dimension {
                expected: self.dim(),
                got: state.dim(),
            });
        }
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    fn coverage_error(&self, t: f64) -> CoreError {
        CoreError::Coverage {
            t,
            start: self.t0 - self.tau(),
            end: self.last_time(),
        }
    }

    fn time_slack(&self) -> f64 {
        DOMAIN_EPS * self.tau().max(self.last_time().abs()).max(1.0)
    }

    /// Node index by exact time, or the cell index to its left.
    fn locate(&self, t: f64) -> (usize, bool) {
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => (i, true),
            Err(ins) => (ins.saturating_sub(1), false),
        }
    }

    /// Right-continuous solution value at absolute time `t`, served from the
    /// initial history for `t < t0`.
    pub fn eval(&self, t: f64) -> CoreResult<StateVector> {
        let slack = self.time_slack();
        if t < self.t0 - self.tau() - slack || t > self.last_time() + slack {
            return Err(self.coverage_error(t));
        }
        let t = t.clamp(self.t0 - self.tau(), self.last_time());
        if t < self.t0 {
            return self.initial.eval(t - self.t0);
        }
        let (i, exact) = self.locate(t);
        if exact {
            return Ok(self.states[i].clone());
        }
        let (t0c, t1c) = (self.times[i], self.times[i + 1]);
        let right = match self.pre_state(i + 1) {
            Some(pre) => pre.as_slice(),
            None => self.states[i + 1].as_slice(),
        };
        let theta = (t - t0c) / (t1c - t0c);
        Ok(lerp_slices(self.states[i].as_slice(), right, theta))
    }

    /// Left limit of the solution at absolute time `t`.
    pub fn left_limit(&self, t: f64) -> CoreResult<StateVector> {
        let slack = self.time_slack();
        if t < self.t0 - self.tau() - slack || t > self.last_time() + slack {
            return Err(self.coverage_error(t));
        }
        let t = t.clamp(self.t0 - self.tau(), self.last_time());
        if t < self.t0 {
            return self.initial.left_limit(t - self.t0);
        }
        let (i, exact) = self.locate(t);
        if exact {
            if let Some(pre) = self.pre_state(i) {
                return Ok(pre.clone());
            }
            if i == 0 {
                // continuous at t0: approach through the initial history
                return self.initial.left_limit(0.0);
            }
            return Ok(self.states[i].clone());
        }
        self.eval(t)
    }

    /// Restriction of the solution to `[t - tau, t]` re-indexed to `[-tau, 0]`
    /// as a lightweight view.
    pub fn window_view(&self, t: f64, side: Side) -> CoreResult<WindowView<'_>> {
        let slack = self.time_slack();
        if t < self.t0 - slack || t > self.last_time() + slack {
            return Err(self.coverage_error(t));
        }
        Ok(WindowView {
            traj: self,
            t: t.clamp(self.t0, self.last_time()),
            side,
        })
    }

    /// Materialized history window at `t`; grid nodes are the solution's own
    /// nodes inside the window plus exact endpoints.
    pub fn window(&self, t: f64, side: Side) -> CoreResult<HistoryFunction> {
        let view = self.window_view(t, side)?;
        let tau = self.tau();
        let lo = t - tau;

        let mut offsets: Vec<f64> = Vec::new();
        let mut values: Vec<StateVector> = Vec::new();
        let mut jumps: Vec<(usize, StateVector)> = Vec::new();

        fn push(
            offsets: &mut Vec<f64>,
            values: &mut Vec<StateVector>,
            s: f64,
            v: StateVector,
        ) -> bool {
            if offsets.last().map(|last| s > *last).unwrap_or(true) {
                offsets.push(s);
                values.push(v);
                true
            } else {
                false
            }
        }

        push(&mut offsets, &mut values, -tau, view.eval(-tau)?);

        // nodes of the initial history strictly before t0 and inside the
        // window; offsets formed so that extraction at t == t0 reuses the
        // history's own grid bit for bit
        if lo < self.t0 {
            let shift = self.t0 - t;
            for (i, s_h) in self.initial.offsets().iter().enumerate() {
                let s = shift + s_h;
                if *s_h >= 0.0 || s <= -tau || s >= 0.0 {
                    continue;
                }
                if push(
                    &mut offsets,
                    &mut values,
                    s,
                    self.initial.value_at_node(i).clone(),
                ) {
                    if let Some((_, l)) = self.initial.jump_nodes().find(|(j, _)| *j == i) {
                        jumps.push((offsets.len() - 1, l.clone()));
                    }
                }
            }
        }

        // trajectory nodes inside the open window
        for (i, &abs) in self.times.iter().enumerate() {
            if abs <= lo || abs >= t {
                continue;
            }
            let s = abs - t;
            if push(&mut offsets, &mut values, s, self.states[i].clone()) {
                let pre = match self.pre_state(i) {
                    Some(p) => Some(p.clone()),
                    // the start node may carry a discontinuity from the
                    // initial history itself
                    None if i == 0 => {
                        let l = self.initial.left_limit(0.0)?;
                        (l != self.states[0]).then_some(l)
                    }
                    None => None,
                };
                if let Some(pre) = pre {
                    jumps.push((offsets.len() - 1, pre));
                }
            }
        }

        // exact right endpoint with the side convention
        let end_val = view.eval(0.0)?;
        let end_left = view.left_limit(0.0).unwrap_or_else(|_| end_val.clone());
        push(&mut offsets, &mut values, 0.0, end_val.clone());
        if side == Side::At && end_left != end_val {
            jumps.push((offsets.len() - 1, end_left));
        }

        HistoryFunction::from_parts(offsets, values, jumps)
    }
}

/// Zero-copy history window over a trajectory, centered at time `t`.
pub struct WindowView<'a> {
    traj: &'a Trajectory,
    t: f64,
    side: Side,
}

impl WindowView<'_> {
    pub fn center(&self) -> f64 {
        self.t
    }
}

impl History for WindowView<'_> {
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
        let offset = offset.clamp(-tau, 0.0);
        if offset == 0.0 && self.side == Side::Before {
            return self.traj.left_limit(self.t);
        }
        self.traj.eval(self.t + offset)
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
        self.traj.left_limit(self.t + offset)
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
        let t = self.t;
        let abs_from = t + from;
        let abs_to = t + to;

        // history part of the window
        if abs_from < self.traj.t0 {
            let h_to = abs_to.min(self.traj.t0);
            self.traj.initial.for_each_cell(
                abs_from - self.traj.t0,
                h_to - self.traj.t0,
                &mut |s0, v0, s1, v1| visit(s0 + self.traj.t0 - t, v0, s1 + self.traj.t0 - t, v1),
            )?;
        }
        if abs_to <= self.traj.t0 {
            return Ok(());
        }

        // trajectory part
        let lo = abs_from.max(self.traj.t0);
        let start_val = self.traj.eval(lo)?;
        let mut cursor = lo;
        let mut cursor_val = start_val;
        let (mut i, _) = self.traj.locate(lo);
        while i + 1 < self.traj.times.len() && self.traj.times[i + 1] < abs_to {
            let right = i + 1;
            let right_slice = match self.traj.pre_state(right) {
                Some(pre) => pre.as_slice(),
                None => self.traj.states[right].as_slice(),
            };
            visit(
                cursor - t,
                cursor_val.as_slice(),
                self.traj.times[right] - t,
                right_slice,
            );
            cursor = self.traj.times[right];
            cursor_val = self.traj.states[right].clone();
            i = right;
        }
        if abs_to > cursor {
            let end = self.traj.left_limit(abs_to)?;
            visit(cursor - t, cursor_val.as_slice(), to, end.as_slice());
        }
        Ok(())
    }
}
