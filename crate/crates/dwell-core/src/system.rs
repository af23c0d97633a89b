//! System definitions: a continuous vector field on histories plus a jump map.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::history::{history_integral, History, HistoryFunction, StateVector};
use crate::presets::sat;

/// Dynamics maps take the current time and the history window.
pub type DynamicsFn = dyn Fn(f64, &dyn History) -> CoreResult<StateVector> + Send + Sync;

/// The pair `(f, g)`: continuous field between impulses and jump map at them.
/// Both must vanish on the zero history so that the zero solution exists.
pub struct SystemDefinition {
    dimension: usize,
    tau: f64,
    flow: Box<DynamicsFn>,
    jump: Box<DynamicsFn>,
    /// Positive discrete delays (and integral windows) the flow map reads;
    /// the integrator aligns steps with kinks these propagate.
    flow_delays: Vec<f64>,
}

impl SystemDefinition {
    pub fn new(
        dimension: usize,
        tau: f64,
        flow: Box<DynamicsFn>,
        jump: Box<DynamicsFn>,
    ) -> CoreResult<Self> {
        if dimension == 0 {
            return Err(CoreError::Invalid {
                what: "system",
                why: "dimension must be positive".into(),
            });
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(CoreError::Invalid {
                what: "system",
                why: format!("tau must be positive and finite, got {tau}"),
            });
        }
        let sys = Self {
            dimension,
            tau,
            flow,
            jump,
            flow_delays: Vec::new(),
        };
        sys.probe_zero()?;
        Ok(sys)
    }

    /// Declares the flow map's discrete delays so the integrator can split
    /// steps at solution kinks they propagate. Delays outside `(0, tau]` are
    /// dropped.
    pub fn with_flow_delays(mut self, delays: Vec<f64>) -> Self {
        self.flow_delays = delays
            .into_iter()
            .filter(|d| d.is_finite() && *d > 0.0 && *d <= self.tau)
            .collect();
        self
    }

    pub fn flow_delays(&self) -> &[f64] {
        &self.flow_delays
    }

    /// Both maps must return (numerically) zero on the zero history.
    fn probe_zero(&self) -> CoreResult<()> {
        let zero = HistoryFunction::constant(self.tau, StateVector::zeros(self.dimension))?;
        for t in [0.0, 1.0, 10.0] {
            let f = self.flow_at(t, &zero)?;
            if f.norm() > 1e-9 {
                return Err(CoreError::NonVanishing {
                    which: "f",
                    t,
                    norm: f.norm(),
                });
            }
            let g = self.jump_at(t, &zero)?;
            if g.norm() > 1e-9 {
                return Err(CoreError::NonVanishing {
                    which: "g",
                    t,
                    norm: g.norm(),
                });
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn flow_at(&self, t: f64, history: &dyn History) -> CoreResult<StateVector> {
        (self.flow)(t, history)
    }

    pub fn jump_at(&self, t: f64, history: &dyn History) -> CoreResult<StateVector> {
        (self.jump)(t, history)
    }
}

impl std::fmt::Debug for SystemDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemDefinition")
            .field("dimension", &self.dimension)
            .field("tau", &self.tau)
            .finish_non_exhaustive()
    }
}

/// One additive term of a flow or jump expression.
///
/// The expression family is deliberately small: linear gains on (possibly
/// delayed) state reads, componentwise saturation of delayed reads, and
/// saturation of a sliding integral of the state. It is rich enough for every
/// built-in preset while keeping the file format checkable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// `M * x(t - delay)`; at an impulse time the delay-0 read is `x(t^-)`.
    Linear { matrix: Vec<Vec<f64>>, delay: f64 },
    /// `M * sat(x(t - delay))`, saturation applied componentwise.
    Sat { matrix: Vec<Vec<f64>>, delay: f64 },
    /// `M * sat(integral of x over [t - window, t])`, componentwise saturation.
    SatIntegral { matrix: Vec<Vec<f64>>, window: f64 },
}

impl Term {
    fn matrix(&self) -> &Vec<Vec<f64>> {
        match self {
            Term::Linear { matrix, .. } => matrix,
            Term::Sat { matrix, .. } => matrix,
            Term::SatIntegral { matrix, .. } => matrix,
        }
    }

    fn reach(&self) -> f64 {
        match self {
            Term::Linear { delay, .. } | Term::Sat { delay, .. } => *delay,
            Term::SatIntegral { window, .. } => *window,
        }
    }

    fn validate(&self, dim: usize) -> CoreResult<()> {
        let m = self.matrix();
        if m.len() != dim || m.iter().any(|row| row.len() != dim) {
            return Err(CoreError::Invalid {
                what: "term",
                why: format!("matrix must be {dim}x{dim}"),
            });
        }
        if m.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "term matrix",
            });
        }
        let reach = self.reach();
        if !reach.is_finite() || reach < 0.0 {
            return Err(CoreError::Invalid {
                what: "term",
                why: format!("delay/window must be a nonnegative finite number, got {reach}"),
            });
        }
        if matches!(self, Term::SatIntegral { .. }) && reach == 0.0 {
            return Err(CoreError::Invalid {
                what: "term",
                why: "integral window must be positive".into(),
            });
        }
        Ok(())
    }

    fn eval(&self, h: &dyn History) -> CoreResult<StateVector> {
        match self {
            Term::Linear { matrix, delay } => {
                let x = h.eval(-delay)?;
                Ok(mat_vec(matrix, x.as_slice()))
            }
            Term::Sat { matrix, delay } => {
                let x = h.eval(-delay)?;
                let s: Vec<f64> = x.as_slice().iter().map(|&z| sat(z)).collect();
                Ok(mat_vec(matrix, &s))
            }
            Term::SatIntegral { matrix, window } => {
                let v = history_integral(h, -window, 0.0)?;
                let s: Vec<f64> = v.as_slice().iter().map(|&z| sat(z)).collect();
                Ok(mat_vec(matrix, &s))
            }
        }
    }
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> StateVector {
    let mut out = vec![0.0; m.len()];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    StateVector::new(out).unwrap_or_else(|_| StateVector::zeros(m.len()))
}

/// Declarative system description: sums of [`Term`]s for the flow and jump
/// maps. This is the on-disk form of a system and what presets export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub dimension: usize,
    /// Maximum delay. Defaults to the largest delay/window any term reads.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default)]
    pub flow: Vec<Term>,
    #[serde(default)]
    pub jump: Vec<Term>,
    /// Constant initial history for simulation runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

impl SystemSpec {
    /// Maximum history reach of any term.
    pub fn max_reach(&self) -> f64 {
        self.flow
            .iter()
            .chain(&self.jump)
            .map(Term::reach)
            .fold(0.0, f64::max)
    }

    /// Effective tau: the declared value or the maximum reach.
    pub fn effective_tau(&self) -> f64 {
        self.tau.unwrap_or_else(|| self.max_reach())
    }

    pub fn build(&self) -> CoreResult<SystemDefinition> {
        if self.dimension == 0 {
            return Err(CoreError::Invalid {
                what: "system",
                why: "dimension must be positive".into(),
            });
        }
        for term in self.flow.iter().chain(&self.jump) {
            term.validate(self.dimension)?;
        }
        let tau = self.effective_tau();
        if let Some(declared) = self.tau {
            if declared < self.max_reach() {
                return Err(CoreError::Invalid {
                    what: "system",
                    why: format!(
                        "declared tau {declared} smaller than the largest term reach {}",
                        self.max_reach()
                    ),
                });
            }
        }
        if !(tau > 0.0) {
            return Err(CoreError::Invalid {
                what: "system",
                why: "tau must be positive; declare tau explicitly for delay-free terms".into(),
            });
        }
        let dim = self.dimension;
        let flow_delays: Vec<f64> = self
            .flow
            .iter()
            .map(Term::reach)
            .filter(|d| *d > 0.0)
            .collect();
        let flow_terms = self.flow.clone();
        let jump_terms = self.jump.clone();
        let flow = Box::new(move |_t: f64, h: &dyn History| sum_terms(dim, &flow_terms, h));
        let jump = Box::new(move |_t: f64, h: &dyn History| sum_terms(dim, &jump_terms, h));
        Ok(SystemDefinition::new(dim, tau, flow, jump)?.with_flow_delays(flow_delays))
    }
}

fn sum_terms(dim: usize, terms: &[Term], h: &dyn History) -> CoreResult<StateVector> {
    let mut acc = StateVector::zeros(dim);
    for term in terms {
        let v = term.eval(h)?;
        acc.add_scaled(1.0, &v);
    }
    Ok(acc)
}
