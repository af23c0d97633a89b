//! States and the piecewise right-continuous histories they live on.
//!
//! A history is a function on the offset interval `[-tau, 0]`, sampled on a
//! strictly increasing grid with linear interpolation between nodes. Nodes may
//! carry a recorded left limit distinct from the stored (right-continuous)
//! value, which is how state jumps inside the window are represented. Time is
//! a plain `f64` throughout the crate; constructors reject non-finite values.

use crate::error::{CoreError, CoreResult};

/// Dense state of the system at one instant, `x(t)` in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: Vec<f64>,
}

impl StateVector {
    /// Builds a state, rejecting empty or non-finite data.
    pub fn new(components: Vec<f64>) -> CoreResult<Self> {
        if components.is_empty() {
            return Err(CoreError::Invalid {
                what: "state vector",
                why: "zero components".into(),
            });
        }
        if !components.iter().all(|c| c.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "state vector",
            });
        }
        Ok(Self { components })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            components: vec![0.0; dim],
        }
    }

    pub(crate) fn from_raw(components: Vec<f64>) -> Self {
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.components
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    /// Largest component magnitude.
    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `self + a * other`, in place.
    pub fn add_scaled(&mut self, a: f64, other: &StateVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (s, o) in self.components.iter_mut().zip(&other.components) {
            *s += a * o;
        }
    }

    pub fn scaled(&self, a: f64) -> StateVector {
        StateVector {
            components: self.components.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        debug_assert_eq!(self.dim(), other.dim());
        StateVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        debug_assert_eq!(self.dim(), other.dim());
        StateVector {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.components[i]
    }
}

/// Linear interpolation between two raw component slices.
pub(crate) fn lerp_slices(a: &[f64], b: &[f64], theta: f64) -> StateVector {
    StateVector::from_raw(a.iter().zip(b).map(|(x, y)| x + theta * (y - x)).collect())
}

/// Visitor over trapezoid cells:
/// `(s_left, value_at_left, s_right, left_limit_at_right)`.
pub type CellVisitor<'a> = dyn FnMut(f64, &[f64], f64, &[f64]) + 'a;

/// Read access to a solution segment re-indexed to offsets in `[-tau, 0]`.
///
/// Offset 0 is "now"; negative offsets look into the past. Implementors are
/// sampled representations: between grid nodes the function is linear, and at
/// a node it takes the stored right-continuous value while approaching the
/// node's left limit from below.
pub trait History {
    fn dim(&self) -> usize;

    fn tau(&self) -> f64;

    /// Value at the given offset (right-continuous at jumps).
    fn eval(&self, offset: f64) -> CoreResult<StateVector>;

    /// Left limit at the given offset; equals `eval` away from jumps.
    fn left_limit(&self, offset: f64) -> CoreResult<StateVector>;

    /// Visits the trapezoid cells of the sampled grid on `[from, to]`,
    /// left to right. The callback receives
    /// `(s_left, value_at_s_left, s_right, left_limit_at_s_right)` so that a
    /// jump node splits the surrounding cells without any interior
    /// discontinuity. Endpoints inside a cell are interpolated.
    fn for_each_cell(&self, from: f64, to: f64, visit: &mut CellVisitor) -> CoreResult<()>;
}

/// Trapezoid integral of `f(offset, state)` over `[from, to]` on a history's grid.
pub fn weighted_integral(
    h: &dyn History,
    from: f64,
    to: f64,
    mut f: impl FnMut(f64, &[f64]) -> f64,
) -> CoreResult<f64> {
    let mut acc = 0.0;
    h.for_each_cell(from, to, &mut |s0, v0, s1, v1| {
        acc += 0.5 * (s1 - s0) * (f(s0, v0) + f(s1, v1));
    })?;
    Ok(acc)
}

/// Componentwise trapezoid integral of the history itself over `[from, to]`.
pub fn history_integral(h: &dyn History, from: f64, to: f64) -> CoreResult<StateVector> {
    let mut acc = vec![0.0; h.dim()];
    h.for_each_cell(from, to, &mut |s0, v0, s1, v1| {
        let half = 0.5 * (s1 - s0);
        for (a, (x, y)) in acc.iter_mut().zip(v0.iter().zip(v1)) {
            *a += half * (x + y);
        }
    })?;
    Ok(StateVector::from_raw(acc))
}

/// Relative slack allowed when locating an offset inside the domain; absorbs
/// the rounding of offsets computed as differences of absolute times.
pub(crate) const DOMAIN_EPS: f64 = 1e-9;

/// A sampled history function on `[-tau, 0]` with explicit jump markers.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryFunction {
    dim: usize,
    /// Strictly increasing, first is -tau, last is exactly 0.
    offsets: Vec<f64>,
    /// Right-continuous value at each node.
    values: Vec<StateVector>,
    /// Recorded left limit where it differs from the stored value.
    left_limits: Vec<Option<StateVector>>,
}

impl HistoryFunction {
    /// Full-control constructor. `jumps` maps node indices (>= 1) to left limits.
    pub fn from_parts(
        offsets: Vec<f64>,
        values: Vec<StateVector>,
        jumps: Vec<(usize, StateVector)>,
    ) -> CoreResult<Self> {
        if offsets.len() < 2 {
            return Err(CoreError::Invalid {
                what: "history",
                why: "needs at least two grid nodes".into(),
            });
        }
        if offsets.len() != values.len() {
            return Err(CoreError::Dimension {
                expected: offsets.len(),
                got: values.len(),
            });
        }
        if !offsets.iter().all(|s| s.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "history offsets",
            });
        }
        if !offsets.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::Invalid {
                what: "history",
                why: "offsets must be strictly increasing".into(),
            });
        }
        if *offsets.last().unwrap() != 0.0 {
            return Err(CoreError::Invalid {
                what: "history",
                why: format!("last offset must be 0, got {}", offsets.last().unwrap()),
            });
        }
        if offsets[0] >= 0.0 {
            return Err(CoreError::Invalid {
                what: "history",
                why: "domain must have positive length (tau > 0)".into(),
            });
        }
        let dim = values[0].dim();
        for v in &values {
            if v.dim() != dim {
                return Err(CoreError::Dimension {
                    expected: dim,
                    got: v.dim(),
                });
            }
            if !v.is_finite() {
                return Err(CoreError::NonFinite {
                    context: "history values",
                });
            }
        }
        let mut left_limits = vec![None; offsets.len()];
        for (idx, limit) in jumps {
            if idx == 0 || idx >= offsets.len() {
                return Err(CoreError::Invalid {
                    what: "history",
                    why: format!("jump index {idx} outside interior node range"),
                });
            }
            if limit.dim() != dim {
                return Err(CoreError::Dimension {
                    expected: dim,
                    got: limit.dim(),
                });
            }
            if !limit.is_finite() {
                return Err(CoreError::NonFinite {
                    context: "history left limits",
                });
            }
            left_limits[idx] = Some(limit);
        }
        Ok(Self {
            dim,
            offsets,
            values,
            left_limits,
        })
    }

    /// Constant history `phi(s) = value` on `[-tau, 0]`.
    pub fn constant(tau: f64, value: StateVector) -> CoreResult<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(CoreError::Invalid {
                what: "history",
                why: format!("tau must be positive and finite, got {tau}"),
            });
        }
        Self::from_parts(vec![-tau, 0.0], vec![value.clone(), value], Vec::new())
    }

    /// Samples `phi` on a uniform grid with `cells >= 1` intervals.
    pub fn sampled(tau: f64, cells: usize, phi: impl Fn(f64) -> StateVector) -> CoreResult<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(CoreError::Invalid {
                what: "history",
                why: format!("tau must be positive and finite, got {tau}"),
            });
        }
        let cells = cells.max(1);
        let mut offsets = Vec::with_capacity(cells + 1);
        let mut values = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            let s = if i == cells {
                0.0
            } else {
                -tau + tau * (i as f64) / (cells as f64)
            };
            offsets.push(s);
            values.push(phi(s));
        }
        Self::from_parts(offsets, values, Vec::new())
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn value_at_node(&self, idx: usize) -> &StateVector {
        &self.values[idx]
    }

    pub fn jump_nodes(&self) -> impl Iterator<Item = (usize, &StateVector)> {
        self.left_limits
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.as_ref().map(|v| (i, v)))
    }

    /// Clamps an offset into `[-tau, 0]` when it is within rounding slack of
    /// the domain, or reports a domain error.
    fn clamp_offset(&self, offset: f64) -> CoreResult<f64> {
        let tau = self.tau();
        let slack = DOMAIN_EPS * tau.max(1.0);
        if offset < -tau - slack || offset > slack {
            return Err(CoreError::OffsetOutOfDomain { offset, tau });
        }
        Ok(offset.clamp(-tau, 0.0))
    }

    /// Index of the grid cell containing the offset: returns `i` such that
    /// `offsets[i] <= s < offsets[i+1]`, or the node index on exact hits.
    fn locate(&self, s: f64) -> (usize, bool) {
        match self
            .offsets
            .binary_search_by(|o| o.partial_cmp(&s).unwrap())
        {
            Ok(i) => (i, true),
            Err(ins) => (ins - 1, false),
        }
    }

    fn cell_right_slice(&self, idx: usize) -> &[f64] {
        match &self.left_limits[idx] {
            Some(l) => l.as_slice(),
            None => self.values[idx].as_slice(),
        }
    }
}

impl History for HistoryFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn tau(&self) -> f64 {
        -self.offsets[0]
    }

    fn eval(&self, offset: f64) -> CoreResult<StateVector> {
        let s = self.clamp_offset(offset)?;
        let (i, exact) = self.locate(s);
        if exact {
            return Ok(self.values[i].clone());
        }
        let (s0, s1) = (self.offsets[i], self.offsets[i + 1]);
        let theta = (s - s0) / (s1 - s0);
        Ok(lerp_slices(
            self.values[i].as_slice(),
            self.cell_right_slice(i + 1),
            theta,
        ))
    }

    fn left_limit(&self, offset: f64) -> CoreResult<StateVector> {
        let s = self.clamp_offset(offset)?;
        let (i, exact) = self.locate(s);
        if exact {
            if i == 0 {
                return Err(CoreError::NoLeftNeighborhood { offset: s });
            }
            return Ok(match &self.left_limits[i] {
                Some(l) => l.clone(),
                None => self.values[i].clone(),
            });
        }
        self.eval(s)
    }

    fn for_each_cell(&self, from: f64, to: f64, visit: &mut CellVisitor) -> CoreResult<()> {
        let from = self.clamp_offset(from)?;
        let to = self.clamp_offset(to)?;
        if to <= from {
            return Ok(());
        }
        let start = self.eval(from)?;
        let (mut i, _) = self.locate(from);
        let mut cursor = from;
        let mut cursor_val = start;
        // Walk full interior nodes strictly inside (from, to).
        while i + 1 < self.offsets.len() && self.offsets[i + 1] < to {
            let right = i + 1;
            visit(
                cursor,
                cursor_val.as_slice(),
                self.offsets[right],
                self.cell_right_slice(right),
            );
            cursor = self.offsets[right];
            cursor_val = self.values[right].clone();
            i = right;
        }
        let end = self.left_limit(to)?;
        if to > cursor {
            visit(cursor, cursor_val.as_slice(), to, end.as_slice());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(xs: &[f64]) -> StateVector {
        StateVector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn constant_history_evaluates_everywhere() {
        // constant phi(s) = 0.5
        let h = HistoryFunction::constant(1.0, sv(&[0.5])).unwrap();
        for s in [-1.0, -0.7, -0.25, 0.0] {
            assert_eq!(h.eval(s).unwrap()[0], 0.5);
        }
    }

    #[test]
    fn linear_interpolation_midpoint() {
        // nodes (-1, 0), (0, 2): midpoint value 1
        let h =
            HistoryFunction::from_parts(vec![-1.0, 0.0], vec![sv(&[0.0]), sv(&[2.0])], Vec::new())
                .unwrap();
        assert!((h.eval(-0.5).unwrap()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jump_node_is_right_continuous() {
        // jump at s = -0.5 with left limit 1, value 3
        let h = HistoryFunction::from_parts(
            vec![-1.0, -0.5, 0.0],
            vec![sv(&[1.0]), sv(&[3.0]), sv(&[3.0])],
            vec![(1, sv(&[1.0]))],
        )
        .unwrap();
        assert_eq!(h.eval(-0.5).unwrap()[0], 3.0);
        assert_eq!(h.left_limit(-0.5).unwrap()[0], 1.0);
        // approaching the jump from the left follows the left limit
        assert!((h.eval(-0.5 - 1e-9).unwrap()[0] - 1.0).abs() < 1e-6);
        // just after the jump interpolates from the stored value
        assert!((h.eval(-0.25).unwrap()[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn left_limit_matches_eval_on_smooth_history() {
        let h = HistoryFunction::sampled(2.0, 8, |s| sv(&[s * s])).unwrap();
        for s in [-1.75, -1.0, -0.3, 0.0] {
            let a = h.eval(s).unwrap();
            match h.left_limit(s) {
                Ok(b) => assert_eq!(a, b),
                Err(_) => panic!("unexpected error"),
            }
        }
    }

    #[test]
    fn left_limit_at_domain_start_errors() {
        let h = HistoryFunction::constant(1.0, sv(&[1.0])).unwrap();
        assert!(matches!(
            h.left_limit(-1.0),
            Err(CoreError::NoLeftNeighborhood { .. })
        ));
    }

    #[test]
    fn jump_exactly_at_offset_zero() {
        // pre-jump value recorded at the right end realizes the x_{t^-} read
        let h = HistoryFunction::from_parts(
            vec![-1.0, 0.0],
            vec![sv(&[1.0]), sv(&[3.0])],
            vec![(1, sv(&[1.0]))],
        )
        .unwrap();
        assert_eq!(h.eval(0.0).unwrap()[0], 3.0);
        assert_eq!(h.left_limit(0.0).unwrap()[0], 1.0);
    }

    #[test]
    fn eval_outside_domain_errors() {
        let h = HistoryFunction::constant(1.0, sv(&[0.5])).unwrap();
        assert!(matches!(
            h.eval(-1.5),
            Err(CoreError::OffsetOutOfDomain { .. })
        ));
        assert!(matches!(
            h.eval(0.5),
            Err(CoreError::OffsetOutOfDomain { .. })
        ));
    }

    #[test]
    fn node_values_are_exact() {
        let h = HistoryFunction::sampled(1.0, 7, |s| sv(&[s.sin(), s.cos()])).unwrap();
        for (i, s) in h.offsets().to_vec().iter().enumerate() {
            assert_eq!(&h.eval(*s).unwrap(), h.value_at_node(i));
        }
    }

    #[test]
    fn integral_is_exact_for_linear_data() {
        // x(s) = s on [-1, 0] integrates to -1/2
        let h = HistoryFunction::sampled(1.0, 4, |s| sv(&[s])).unwrap();
        let v = history_integral(&h, -1.0, 0.0).unwrap();
        assert!((v[0] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn integral_splits_at_jumps() {
        // piecewise constant: 1 on [-1, -0.5), 3 on [-0.5, 0]
        let h = HistoryFunction::from_parts(
            vec![-1.0, -0.5, 0.0],
            vec![sv(&[1.0]), sv(&[3.0]), sv(&[3.0])],
            vec![(1, sv(&[1.0]))],
        )
        .unwrap();
        let v = history_integral(&h, -1.0, 0.0).unwrap();
        assert!((v[0] - (0.5 * 1.0 + 0.5 * 3.0)).abs() < 1e-14);
    }

    #[test]
    fn weighted_integral_partial_range() {
        let h = HistoryFunction::sampled(2.0, 200, |s| sv(&[s])).unwrap();
        // integral of s^2 over [-1, 0] ~ 1/3 (trapezoid on the sampled grid)
        let w = weighted_integral(&h, -1.0, 0.0, |_, v| v[0] * v[0]).unwrap();
        assert!((w - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(HistoryFunction::from_parts(
            vec![-1.0, -1.0, 0.0],
            vec![sv(&[0.0]), sv(&[0.0]), sv(&[0.0])],
            Vec::new()
        )
        .is_err());
        assert!(HistoryFunction::from_parts(
            vec![-1.0, 0.5],
            vec![sv(&[0.0]), sv(&[0.0])],
            Vec::new()
        )
        .is_err());
        assert!(HistoryFunction::constant(0.0, sv(&[1.0])).is_err());
        assert!(HistoryFunction::constant(-1.0, sv(&[1.0])).is_err());
    }
}
