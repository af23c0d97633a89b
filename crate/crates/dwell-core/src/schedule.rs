//! Impulse time sequences, the counting function N(t, s), and dwell-time
//! condition checks.
//!
//! All checks reduce to the supremum of `a*N(t,s) + b*(t-s)` over pairs
//! `t0 <= s < t <= horizon`. Between impulse times that expression is linear
//! in both arguments, so the supremum sits at corner pairs: `s` exactly at an
//! impulse time or approaching one from below, `t` at an impulse time,
//! approaching one from below, or at the horizon. The corner enumeration is
//! exact; the brute-force grid scan in the tests exists to cross-check it.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};

/// Strictly increasing impulse times, either as a periodic offset pattern
/// (unbounded) or as an explicit finite list with a declared horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleRepr", into = "ScheduleRepr")]
pub enum ImpulseSchedule {
    /// Times `origin + offset + j*period` for `j >= 0`; offsets lie in
    /// `(0, period]` so the first impulse follows the origin strictly.
    Periodic {
        offsets: Vec<f64>,
        period: f64,
        origin: f64,
    },
    /// A finite list; queries beyond `horizon` are errors.
    Explicit { times: Vec<f64>, horizon: f64 },
}

/// On-disk form: either a `[pattern]` table or top-level `times`/`horizon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScheduleRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<PatternRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternRepr {
    offsets: Vec<f64>,
    period: f64,
    origin: f64,
}

impl TryFrom<ScheduleRepr> for ImpulseSchedule {
    type Error = CoreError;
    fn try_from(r: ScheduleRepr) -> CoreResult<Self> {
        match (r.pattern, r.times, r.horizon) {
            (Some(p), None, None) => ImpulseSchedule::periodic(p.offsets, p.period, p.origin),
            (None, Some(times), Some(horizon)) => ImpulseSchedule::explicit(times, horizon),
            _ => Err(CoreError::Invalid {
                what: "schedule",
                why: "give either [pattern] or times + horizon".into(),
            }),
        }
    }
}

impl From<ImpulseSchedule> for ScheduleRepr {
    fn from(s: ImpulseSchedule) -> Self {
        match s {
            ImpulseSchedule::Periodic {
                offsets,
                period,
                origin,
            } => ScheduleRepr {
                pattern: Some(PatternRepr {
                    offsets,
                    period,
                    origin,
                }),
                times: None,
                horizon: None,
            },
            ImpulseSchedule::Explicit { times, horizon } => ScheduleRepr {
                pattern: None,
                times: Some(times),
                horizon: Some(horizon),
            },
        }
    }
}

impl ImpulseSchedule {
    pub fn periodic(offsets: Vec<f64>, period: f64, origin: f64) -> CoreResult<Self> {
        if !(period > 0.0) || !period.is_finite() || !origin.is_finite() {
            return Err(CoreError::Invalid {
                what: "schedule",
                why: format!("period must be positive and finite, got {period}"),
            });
        }
        if offsets.is_empty() {
            return Err(CoreError::Invalid {
                what: "schedule",
                why: "periodic pattern needs at least one offset".into(),
            });
        }
        if !offsets
            .iter()
            .all(|o| o.is_finite() && *o > 0.0 && *o <= period)
        {
            return Err(CoreError::Invalid {
                what: "schedule",
                why: "offsets must lie in (0, period]".into(),
            });
        }
        if !offsets.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::Invalid {
                what: "schedule",
                why: "offsets must be strictly increasing".into(),
            });
        }
        Ok(Self::Periodic {
            offsets,
            period,
            origin,
        })
    }

    pub fn explicit(times: Vec<f64>, horizon: f64) -> CoreResult<Self> {
        if !horizon.is_finite() {
            return Err(CoreError::NonFinite {
                context: "schedule horizon",
            });
        }
        if !times.iter().all(|t| t.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "schedule times",
            });
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(CoreError::Invalid {
                what: "schedule",
                why: "times must be strictly increasing".into(),
            });
        }
        if let Some(last) = times.last() {
            if *last > horizon {
                return Err(CoreError::Invalid {
                    what: "schedule",
                    why: format!("last time {last} exceeds the declared horizon {horizon}"),
                });
            }
        }
        Ok(Self::Explicit { times, horizon })
    }

    /// Declared horizon of an explicit list; periodic schedules are unbounded.
    pub fn horizon(&self) -> Option<f64> {
        match self {
            Self::Periodic { .. } => None,
            Self::Explicit { horizon, .. } => Some(*horizon),
        }
    }

    fn check_horizon(&self, query: f64) -> CoreResult<()> {
        if let Self::Explicit { horizon, .. } = self {
            if query > *horizon {
                return Err(CoreError::HorizonExceeded {
                    query,
                    horizon: *horizon,
                });
            }
        }
        Ok(())
    }

    /// First impulse time, if any exists within the declared range.
    pub fn first_event(&self) -> Option<f64> {
        match self {
            Self::Periodic {
                offsets, origin, ..
            } => Some(origin + offsets[0]),
            Self::Explicit { times, .. } => times.first().copied(),
        }
    }

    /// Smallest gap between consecutive impulse times. For periodic patterns
    /// this includes the wrap-around gap to the next period.
    pub fn min_gap(&self) -> Option<f64> {
        match self {
            Self::Periodic {
                offsets, period, ..
            } => {
                let mut gap = f64::INFINITY;
                for w in offsets.windows(2) {
                    gap = gap.min(w[1] - w[0]);
                }
                gap = gap.min(offsets[0] + period - offsets.last().unwrap());
                Some(gap)
            }
            Self::Explicit { times, .. } => times
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(None, |acc: Option<f64>, g| {
                    Some(acc.map_or(g, |a| a.min(g)))
                }),
        }
    }

    /// Mean spacing of one period (periodic schedules only).
    pub fn average_interval(&self) -> Option<f64> {
        match self {
            Self::Periodic {
                offsets, period, ..
            } => Some(period / offsets.len() as f64),
            Self::Explicit { .. } => None,
        }
    }

    /// Impulses per period (periodic schedules only).
    pub fn impulses_per_period(&self) -> Option<usize> {
        match self {
            Self::Periodic { offsets, .. } => Some(offsets.len()),
            Self::Explicit { .. } => None,
        }
    }

    /// Impulse times in `(s, t]` (or `[s, t]` with `include_start`), in
    /// increasing order. Periodic generation uses the canonical formula
    /// `origin + offset + j*period` so repeated queries agree bit for bit.
    fn events_in(&self, s: f64, t: f64, include_start: bool) -> CoreResult<Vec<f64>> {
        if t < s {
            return Err(CoreError::Invalid {
                what: "interval",
                why: format!("end {t} before start {s}"),
            });
        }
        self.check_horizon(t)?;
        let keep = |x: f64| {
            if include_start {
                x >= s && x <= t
            } else {
                x > s && x <= t
            }
        };
        match self {
            Self::Explicit { times, .. } => {
                Ok(times.iter().copied().filter(|&x| keep(x)).collect())
            }
            Self::Periodic {
                offsets,
                period,
                origin,
            } => {
                let mut out = Vec::new();
                let j_lo = (((s - origin - period) / period).floor() as i64).max(0);
                let j_hi = ((t - origin) / period).ceil() as i64 + 1;
                for j in j_lo..=j_hi.max(j_lo) {
                    for o in offsets {
                        let x = origin + o + (j as f64) * period;
                        if keep(x) {
                            out.push(x);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// All impulse times in the closed interval `[a, b]`.
    pub fn events_between_closed(&self, a: f64, b: f64) -> CoreResult<Vec<f64>> {
        self.events_in(a, b, true)
    }

    /// N(t, s): number of impulse times in the half-open interval `(s, t]`.
    pub fn count_impulses(&self, s: f64, t: f64) -> CoreResult<usize> {
        Ok(self.events_in(s, t, false)?.len())
    }
}

/// Average dwell-time parameters: `t_star` is the average spacing bound,
/// `n_star` the chatter allowance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdtParams {
    pub t_star: f64,
    pub n_star: f64,
}

impl AdtParams {
    pub fn new(t_star: f64, n_star: f64) -> CoreResult<Self> {
        if !(t_star > 0.0) || !t_star.is_finite() {
            return Err(CoreError::Invalid {
                what: "dwell parameters",
                why: format!("t_star must be positive and finite, got {t_star}"),
            });
        }
        if !(n_star >= 0.0) || !n_star.is_finite() {
            return Err(CoreError::Invalid {
                what: "dwell parameters",
                why: format!("n_star must be nonnegative and finite, got {n_star}"),
            });
        }
        Ok(Self { t_star, n_star })
    }
}

/// Outcome of a dwell-time condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellVerdict {
    pub holds: bool,
    /// Supremum of the violation margin; the condition holds iff <= 0.
    pub worst_slack: f64,
    /// Pair `(s, t)` attaining (or approached by) the supremum.
    pub witness: (f64, f64),
}

/// Window counts N(t_k - tau, t_k] for every impulse time up to the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCountReport {
    /// `(k, t_k, count)` with k starting at 1.
    pub rows: Vec<(usize, f64, usize)>,
    /// Exact supremum over all k for periodic schedules; the maximum observed
    /// count for explicit lists.
    pub supremum: usize,
    /// True when the supremum is only known up to the declared horizon.
    pub horizon_limited: bool,
}

/// Per-pair supremum of `a*N(t,s) + b*(t-s)` over `t0 <= s < t <= horizon`.
///
/// Corner pairs: for `s`, the start `t0`, each impulse time (attained), and
/// each impulse time approached from below (which counts that impulse); for
/// `t`, each impulse time (attained, counted), each impulse time approached
/// from below (not counted), and the horizon. Length-zero limits contribute
/// `a*count` and the event-free limit contributes 0.
fn sup_affine_count(events: &[f64], t0: f64, horizon: f64, a: f64, b: f64) -> (f64, (f64, f64)) {
    // the t -> s+ limit in any event-free stretch
    let mut best = 0.0;
    let mut witness = (t0, t0);
    let m = events.len();

    // s candidates: (position, first counted event index)
    let mut s_cands: Vec<(f64, usize)> = Vec::with_capacity(2 * m + 1);
    s_cands.push((t0, 0));
    for (j, &e) in events.iter().enumerate() {
        s_cands.push((e, j + 1)); // s = e_j attained, e_j not counted
        s_cands.push((e, j)); // s -> e_j^- limit, e_j counted
    }

    // t candidates: (position, last counted event index + 1)
    let mut t_cands: Vec<(f64, usize)> = Vec::with_capacity(2 * m + 1);
    for (k, &e) in events.iter().enumerate() {
        t_cands.push((e, k + 1)); // t = e_k attained, counted
        t_cands.push((e, k)); // t -> e_k^- limit, not counted
    }
    t_cands.push((horizon, m));

    for &(s_pos, j0) in &s_cands {
        for &(t_pos, k1) in &t_cands {
            if t_pos < s_pos {
                continue;
            }
            let count = k1.saturating_sub(j0);
            if t_pos == s_pos && count == 0 {
                continue;
            }
            let value = a * (count as f64) + b * (t_pos - s_pos);
            if value > best {
                best = value;
                witness = (s_pos, t_pos);
            }
        }
    }
    (best, witness)
}

fn events_for_checks(sched: &ImpulseSchedule, t0: f64, horizon: f64) -> CoreResult<Vec<f64>> {
    if horizon <= t0 {
        return Err(CoreError::Invalid {
            what: "check interval",
            why: format!("horizon {horizon} must exceed t0 {t0}"),
        });
    }
    sched.events_in(t0, horizon, false)
}

/// Checks the average dwell-time condition
/// `N(t, s) <= (t - s)/t_star + n_star` on `[t0, horizon]`.
pub fn check_adt(
    sched: &ImpulseSchedule,
    adt: &AdtParams,
    t0: f64,
    horizon: f64,
) -> CoreResult<DwellVerdict> {
    let events = events_for_checks(sched, t0, horizon)?;
    let (sup, witness) = sup_affine_count(&events, t0, horizon, 1.0, -1.0 / adt.t_star);
    let worst_slack = sup - adt.n_star;
    Ok(DwellVerdict {
        holds: worst_slack <= 1e-12,
        worst_slack,
        witness,
    })
}

/// Checks the reverse condition `N(t, s) >= (t - s)/t_star - n_star`.
pub fn check_reverse_adt(
    sched: &ImpulseSchedule,
    adt: &AdtParams,
    t0: f64,
    horizon: f64,
) -> CoreResult<DwellVerdict> {
    let events = events_for_checks(sched, t0, horizon)?;
    let (sup, witness) = sup_affine_count(&events, t0, horizon, -1.0, 1.0 / adt.t_star);
    let worst_slack = sup - adt.n_star;
    Ok(DwellVerdict {
        holds: worst_slack <= 1e-12,
        worst_slack,
        witness,
    })
}

/// Least `mu` making `-sigma*N(t,s) - (c - lambda)*(t - s) <= mu` hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuBound {
    /// Supremum over the queried horizon, clamped at 0.
    Finite(f64),
    /// The supremum grows linearly with the horizon (periodic drift test).
    Unbounded,
}

impl MuBound {
    pub fn finite(&self) -> Option<f64> {
        match self {
            MuBound::Finite(v) => Some(*v),
            MuBound::Unbounded => None,
        }
    }
}

/// Supremum of `-sigma*N(t,s) - (c - lambda)*(t - s)` over the horizon,
/// clamped below at 0. Periodic schedules with positive per-period drift
/// report `Unbounded` instead (no finite `mu` works as the horizon grows).
pub fn minimal_mu(
    sched: &ImpulseSchedule,
    sigma: f64,
    c: f64,
    lambda: f64,
    t0: f64,
    horizon: f64,
) -> CoreResult<MuBound> {
    let a = -sigma;
    let b = lambda - c;
    if let ImpulseSchedule::Periodic {
        offsets, period, ..
    } = sched
    {
        let drift = a * offsets.len() as f64 + b * period;
        if drift > 1e-12 * (a.abs() + b.abs() + 1.0) {
            return Ok(MuBound::Unbounded);
        }
    }
    let events = events_for_checks(sched, t0, horizon)?;
    let (sup, _) = sup_affine_count(&events, t0, horizon, a, b);
    Ok(MuBound::Finite(sup.max(0.0)))
}

/// Raw supremum of the unified inequality's left side (no clamping); used by
/// the certificate report's slack.
pub fn condition_v_sup(
    sched: &ImpulseSchedule,
    sigma: f64,
    c: f64,
    lambda: f64,
    t0: f64,
    horizon: f64,
) -> CoreResult<(f64, (f64, f64))> {
    let events = events_for_checks(sched, t0, horizon)?;
    Ok(sup_affine_count(&events, t0, horizon, -sigma, lambda - c))
}

/// The count N(t_k - tau, t_k] for every impulse time up to `horizon`, plus
/// the supremum over all k (exact for periodic schedules).
pub fn window_counts(
    sched: &ImpulseSchedule,
    tau: f64,
    horizon: f64,
) -> CoreResult<WindowCountReport> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(CoreError::Invalid {
            what: "window length",
            why: format!("tau must be positive and finite, got {tau}"),
        });
    }
    let first = sched.first_event().ok_or_else(|| CoreError::Invalid {
        what: "schedule",
        why: "no impulses to report window counts for".into(),
    })?;
    if first > horizon {
        return Err(CoreError::Invalid {
            what: "window report",
            why: format!("horizon {horizon} covers no impulse (first is at {first})"),
        });
    }
    let events = sched.events_in(f64::NEG_INFINITY, horizon, false)?;
    let mut rows = Vec::with_capacity(events.len());
    for (k, &t_k) in events.iter().enumerate() {
        let count = events
            .iter()
            .filter(|&&e| e > t_k - tau && e <= t_k)
            .count();
        rows.push((k + 1, t_k, count));
    }
    let observed = rows.iter().map(|r| r.2).max().unwrap_or(0);
    match sched {
        ImpulseSchedule::Explicit { .. } => Ok(WindowCountReport {
            rows,
            supremum: observed,
            horizon_limited: true,
        }),
        ImpulseSchedule::Periodic {
            offsets,
            period,
            origin,
        } => {
            // Far enough out, counts repeat with the pattern; evaluate one
            // representative period where the window cannot reach before the
            // first impulse.
            let periods_back = (tau / period).ceil() as i64 + 1;
            let mut sup = 0;
            for o in offsets {
                let t_k = origin + o + (periods_back as f64) * period;
                let count = sched.count_impulses(t_k - tau, t_k)?;
                sup = sup.max(count);
            }
            Ok(WindowCountReport {
                rows,
                supremum: sup.max(observed),
                horizon_limited: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1_schedule() -> ImpulseSchedule {
        // t_{4k-3} = 10k-9, t_{4k-2} = 10k-7, t_{4k-1} = 10k-4, t_{4k} = 10k
        ImpulseSchedule::periodic(vec![1.0, 3.0, 6.0, 10.0], 10.0, 0.0).unwrap()
    }

    fn example3_schedule() -> ImpulseSchedule {
        // t_{2k-1} = 0.08k - 0.03, t_{2k} = 0.08k
        ImpulseSchedule::periodic(vec![0.05, 0.08], 0.08, 0.0).unwrap()
    }

    fn c3_schedule() -> ImpulseSchedule {
        ImpulseSchedule::periodic(vec![0.04, 0.08, 0.12, 0.52], 0.52, 0.0).unwrap()
    }

    #[test]
    fn counts_uniform_schedule() {
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        assert_eq!(sched.count_impulses(0.0, 5.5).unwrap(), 5);
    }

    #[test]
    fn counts_example1_first_period() {
        assert_eq!(example1_schedule().count_impulses(0.0, 10.0).unwrap(), 4);
    }

    #[test]
    fn empty_interval_counts_zero() {
        assert_eq!(example1_schedule().count_impulses(3.0, 3.0).unwrap(), 0);
        let expl = ImpulseSchedule::explicit(vec![1.0, 2.0], 5.0).unwrap();
        assert_eq!(expl.count_impulses(2.0, 2.0).unwrap(), 0);
    }

    #[test]
    fn additivity_on_fixed_points() {
        let sched = example1_schedule();
        for (s, u, t) in [(0.0, 4.0, 9.0), (0.5, 6.0, 21.0), (3.0, 3.0, 3.5)] {
            let total = sched.count_impulses(s, t).unwrap();
            let split = sched.count_impulses(s, u).unwrap() + sched.count_impulses(u, t).unwrap();
            assert_eq!(total, split);
        }
    }

    #[test]
    fn explicit_list_horizon_errors() {
        let sched = ImpulseSchedule::explicit(vec![1.0, 2.0], 5.0).unwrap();
        assert_eq!(sched.count_impulses(0.0, 5.0).unwrap(), 2);
        assert!(matches!(
            sched.count_impulses(0.0, 6.0),
            Err(CoreError::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn coincident_times_rejected() {
        assert!(ImpulseSchedule::explicit(vec![1.0, 1.0], 5.0).is_err());
        assert!(ImpulseSchedule::periodic(vec![0.5, 0.5], 1.0, 0.0).is_err());
        assert!(ImpulseSchedule::periodic(vec![0.0, 0.5], 1.0, 0.0).is_err());
        assert!(ImpulseSchedule::periodic(vec![0.5, 1.5], 1.0, 0.0).is_err());
    }

    #[test]
    fn window_counts_example3_all_one() {
        let report = window_counts(&example3_schedule(), 0.02, 2.0).unwrap();
        assert!(report.rows.iter().all(|r| r.2 == 1));
        assert_eq!(report.supremum, 1);
        assert!(!report.horizon_limited);
    }

    #[test]
    fn window_counts_c3_supremum_three() {
        let report = window_counts(&c3_schedule(), 0.1, 3.0).unwrap();
        assert_eq!(report.supremum, 3);
    }

    #[test]
    fn window_counts_uniform_period_above_tau() {
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        let report = window_counts(&sched, 0.7, 10.0).unwrap();
        assert!(report.rows.iter().all(|r| r.2 == 1));
        assert_eq!(report.supremum, 1);
    }

    #[test]
    fn adt_example1_holds() {
        // t_star slightly above |sigma|/c from the worked scalar example
        let adt = AdtParams::new(2.1789, 4.0).unwrap();
        let verdict = check_adt(&example1_schedule(), &adt, 0.0, 100.0).unwrap();
        assert!(verdict.holds, "worst slack {}", verdict.worst_slack);
    }

    #[test]
    fn adt_single_impulse_holds_with_unit_allowance() {
        let sched = ImpulseSchedule::explicit(vec![3.0], 10.0).unwrap();
        let adt = AdtParams::new(7.0, 1.0).unwrap();
        let verdict = check_adt(&sched, &adt, 0.0, 10.0).unwrap();
        assert!(verdict.holds);
    }

    #[test]
    fn adt_uniform_fails_when_t_star_exceeds_period() {
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        let adt = AdtParams::new(2.5, 0.0).unwrap();
        let verdict = check_adt(&sched, &adt, 0.0, 20.0).unwrap();
        assert!(!verdict.holds);
        // the witness itself violates the condition
        let (s, t) = verdict.witness;
        let n = sched.count_impulses(s, t).unwrap() as f64;
        // witness s is a left-limit position when it sits on an impulse time
        let n_limit = n + if sched
            .events_between_closed(s, s)
            .map(|e| !e.is_empty())
            .unwrap_or(false)
        {
            1.0
        } else {
            0.0
        };
        assert!(n_limit - (t - s) / adt.t_star - adt.n_star > 0.0);
    }

    #[test]
    fn reverse_adt_c3_holds_at_quoted_values() {
        let adt = AdtParams::new(0.2264, 3.0).unwrap();
        let verdict = check_reverse_adt(&c3_schedule(), &adt, 0.0, 20.0).unwrap();
        assert!(verdict.holds, "worst slack {}", verdict.worst_slack);
    }

    #[test]
    fn reverse_adt_empty_schedule_fails() {
        let sched = ImpulseSchedule::explicit(vec![], 10.0).unwrap();
        let adt = AdtParams::new(1.0, 0.0).unwrap();
        let verdict = check_reverse_adt(&sched, &adt, 0.0, 10.0).unwrap();
        assert!(!verdict.holds);
        assert!((verdict.worst_slack - 10.0).abs() < 1e-12);
    }

    #[test]
    fn reverse_adt_uniform_at_matching_rate_holds() {
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        let adt = AdtParams::new(1.0, 1.0).unwrap();
        let verdict = check_reverse_adt(&sched, &adt, 0.0, 20.0).unwrap();
        assert!(verdict.holds, "worst slack {}", verdict.worst_slack);
    }

    #[test]
    fn minimal_mu_zero_when_sides_balance() {
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        let mu = minimal_mu(&sched, 0.0, 0.5, 0.5, 0.0, 20.0).unwrap();
        assert_eq!(mu, MuBound::Finite(0.0));
    }

    #[test]
    fn minimal_mu_unbounded_by_drift() {
        // per period: |sigma|*1 - (c - lambda)*1 = 1 - 0.5 > 0
        let sched = ImpulseSchedule::periodic(vec![1.0], 1.0, 0.0).unwrap();
        let mu = minimal_mu(&sched, -1.0, 0.5, 0.0, 0.0, 20.0).unwrap();
        assert_eq!(mu, MuBound::Unbounded);
    }

    #[test]
    fn minimal_mu_example1_below_four_sigma() {
        let sigma = -1.7431_f64;
        let c = 0.8;
        let t_star_avg = 2.5; // one period of length 10 holds 4 impulses
        let lambda = c - sigma.abs() / t_star_avg;
        let mu = minimal_mu(&example1_schedule(), sigma, c, lambda, 0.0, 200.0)
            .unwrap()
            .finite()
            .expect("drift is nonpositive at the per-period average");
        assert!(mu > 0.0);
        assert!(mu <= 4.0 * sigma.abs(), "mu = {mu}");
    }

    #[test]
    fn periodic_shift_consistency() {
        let sched = example1_schedule();
        for (s, t) in [(0.0, 7.0), (2.0, 13.0), (5.5, 6.0)] {
            let a = sched.count_impulses(s, t).unwrap();
            let b = sched.count_impulses(s + 10.0, t + 10.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn serde_round_trip_shapes() {
        let p = example1_schedule();
        let toml_p = toml_like(&p);
        assert!(toml_p.contains("pattern"));
        let e = ImpulseSchedule::explicit(vec![0.5, 1.5], 10.0).unwrap();
        let toml_e = toml_like(&e);
        assert!(toml_e.contains("times") && toml_e.contains("horizon"));
    }

    fn toml_like(s: &ImpulseSchedule) -> String {
        // serde_json-style debug of the repr is enough to check the shape here;
        // real TOML round trips are exercised in the cli crate.
        format!("{:?}", ScheduleRepr::from(s.clone()))
    }
}
