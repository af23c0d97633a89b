//! The stability-certificate engine: classify the jump/flow regime, derive
//! the per-impulse exponent sigma, check the unified dwell inequality, and
//! translate it into (reverse) average dwell-time parameters.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, CoreResult};
use crate::schedule::{
    condition_v_sup, minimal_mu, window_counts, AdtParams, ImpulseSchedule, MuBound,
};

/// Absolute bisection tolerance on sigma.
const SIGMA_BISECTION_TOL: f64 = 1e-10;
/// Bisection iteration cap.
const SIGMA_BISECTION_CAP: usize = 200;

/// Scalar bundle consumed by the certificate engine.
///
/// `c` is the continuous decay rate (positive = stabilizing flow), `rho1` and
/// `rho2` the jump gains on the instantaneous and delayed state, `kappa` the
/// functional-part bound, `tau` the maximum delay, `lambda` the demanded
/// convergence rate, and `mu` the allowance in the unified inequality
/// (derived from the schedule when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct CertificateParams {
    pub c: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub kappa: f64,
    pub tau: f64,
    pub lambda: f64,
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsRepr {
    c: f64,
    rho1: f64,
    rho2: f64,
    kappa: f64,
    tau: f64,
    lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
}

impl TryFrom<ParamsRepr> for CertificateParams {
    type Error = CoreError;
    fn try_from(r: ParamsRepr) -> CoreResult<Self> {
        CertificateParams::new(r.c, r.rho1, r.rho2, r.kappa, r.tau, r.lambda, r.mu)
    }
}

impl From<CertificateParams> for ParamsRepr {
    fn from(p: CertificateParams) -> Self {
        ParamsRepr {
            c: p.c,
            rho1: p.rho1,
            rho2: p.rho2,
            kappa: p.kappa,
            tau: p.tau,
            lambda: p.lambda,
            mu: p.mu,
        }
    }
}

impl CertificateParams {
    pub fn new(
        c: f64,
        rho1: f64,
        rho2: f64,
        kappa: f64,
        tau: f64,
        lambda: f64,
        mu: Option<f64>,
    ) -> CoreResult<Self> {
        for (name, v) in [
            ("c", c),
            ("rho1", rho1),
            ("rho2", rho2),
            ("kappa", kappa),
            ("tau", tau),
            ("lambda", lambda),
        ] {
            if !v.is_finite() {
                return Err(CoreError::Invalid {
                    what: "certificate parameters",
                    why: format!("{name} must be finite"),
                });
            }
        }
        if rho1 < 0.0 || rho2 < 0.0 || kappa < 0.0 {
            return Err(CoreError::Invalid {
                what: "certificate parameters",
                why: "rho1, rho2, kappa must be nonnegative".into(),
            });
        }
        if !(tau > 0.0) {
            return Err(CoreError::Invalid {
                what: "certificate parameters",
                why: format!("tau must be positive, got {tau}"),
            });
        }
        if !(lambda > 0.0) {
            return Err(CoreError::Invalid {
                what: "certificate parameters",
                why: format!("lambda must be positive, got {lambda}"),
            });
        }
        if let Some(m) = mu {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(CoreError::Invalid {
                    what: "certificate parameters",
                    why: format!("mu must be nonnegative and finite, got {m}"),
                });
            }
        }
        Ok(Self {
            c,
            rho1,
            rho2,
            kappa,
            tau,
            lambda,
            mu,
        })
    }
}

/// Which defining relation produces sigma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaCase {
    /// Stable flow with expansive jump gain (`c > 0`, `rho1 >= 1`):
    /// closed form `sigma = -ln(rho1 + rho2 e^{c tau}) <= 0`.
    D1,
    /// Stable flow, contractive gain, but the combined factor still reaches 1
    /// (`c > 0`, `rho1 < 1`, `rho1 + [(1-rho1)kappa + rho2] e^{c tau} >= 1`):
    /// closed form on the combined factor, `sigma <= 0`.
    D2,
    /// Stable flow with strictly contractive combined factor: sigma > 0
    /// bounded by the window inequality with the `e^{c tau}` weight.
    D3,
    /// Nonpositive `c` with strictly contractive combined factor: sigma > 0
    /// bounded by the window inequality without the weight.
    D4,
    /// `c <= 0` and the contraction requirement fails: no sigma exists.
    Infeasible,
}

impl SigmaCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            SigmaCase::D1 => "D1",
            SigmaCase::D2 => "D2",
            SigmaCase::D3 => "D3",
            SigmaCase::D4 => "D4",
            SigmaCase::Infeasible => "infeasible",
        }
    }
}

impl std::fmt::Display for SigmaCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sigma together with the case that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaResult {
    pub case: SigmaCase,
    pub sigma: Option<f64>,
    /// Supremum of the per-window impulse count used (window cases only).
    pub binding_window_count: Option<usize>,
}

/// Sign regime of the pair (c, sigma); mirrors the qualitative discussion of
/// which side stabilizes the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// c > 0, sigma < 0: stabilizing flow, destabilizing jumps.
    StableFlowDestabilizingJumps,
    /// c > 0, sigma = 0: stabilizing flow, neutral jumps.
    StableFlowNeutralJumps,
    /// c > 0, sigma > 0: both parts stabilizing.
    StableFlowStabilizingJumps,
    /// c < 0, sigma > 0: unstable flow rescued by jumps.
    UnstableFlowStabilizingJumps,
    /// c = 0, sigma > 0: marginal flow, stabilizing jumps.
    NeutralFlowStabilizingJumps,
    /// c <= 0, sigma <= 0: both parts destabilizing; never certifiable.
    BothDestabilizing,
}

impl Regime {
    pub fn classify(c: f64, sigma: f64) -> Regime {
        if c > 0.0 {
            if sigma < 0.0 {
                Regime::StableFlowDestabilizingJumps
            } else if sigma == 0.0 {
                Regime::StableFlowNeutralJumps
            } else {
                Regime::StableFlowStabilizingJumps
            }
        } else if sigma > 0.0 {
            if c < 0.0 {
                Regime::UnstableFlowStabilizingJumps
            } else {
                Regime::NeutralFlowStabilizingJumps
            }
        } else {
            Regime::BothDestabilizing
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::StableFlowDestabilizingJumps => "c > 0, sigma < 0",
            Regime::StableFlowNeutralJumps => "c > 0, sigma = 0",
            Regime::StableFlowStabilizingJumps => "c > 0, sigma > 0",
            Regime::UnstableFlowStabilizingJumps => "c < 0, sigma > 0",
            Regime::NeutralFlowStabilizingJumps => "c = 0, sigma > 0",
            Regime::BothDestabilizing => "c <= 0, sigma <= 0",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which dwell-time reformulation the unified inequality reduces to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DwellDirection {
    /// sigma < 0 < lambda < c: impulses must be sparse on average.
    Adt,
    /// sigma > 0, c < lambda: impulses must be frequent on average.
    ReverseAdt,
    /// sigma >= 0 and c >= lambda: arbitrary impulse times are admissible.
    Unconstrained,
}

impl DwellDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            DwellDirection::Adt => "ADT (impulses at most one per t_star on average)",
            DwellDirection::ReverseAdt => {
                "reverse ADT (impulses at least one per t_star on average)"
            }
            DwellDirection::Unconstrained => "unconstrained (arbitrary impulse times)",
        }
    }
}

impl std::fmt::Display for DwellDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The combined jump factor `rho1 + [(1 - rho1) kappa + rho2] e^{c tau}`.
fn combined_factor(c: f64, rho1: f64, rho2: f64, kappa: f64, tau: f64) -> f64 {
    rho1 + ((1.0 - rho1) * kappa + rho2) * (c * tau).exp()
}

/// Picks the defining case for sigma from the scalar bundle.
pub fn classify_case(c: f64, rho1: f64, rho2: f64, kappa: f64, tau: f64) -> SigmaCase {
    if c > 0.0 {
        if rho1 >= 1.0 {
            SigmaCase::D1
        } else if combined_factor(c, rho1, rho2, kappa, tau) >= 1.0 {
            SigmaCase::D2
        } else {
            SigmaCase::D3
        }
    } else if rho1 < 1.0 && rho1 + (1.0 - rho1) * kappa + rho2 < 1.0 {
        SigmaCase::D4
    } else {
        SigmaCase::Infeasible
    }
}

/// Closed-form sigma for the nonpositive cases.
pub fn sigma_closed_form(params: &CertificateParams) -> CoreResult<SigmaResult> {
    let case = classify_case(params.c, params.rho1, params.rho2, params.kappa, params.tau);
    let sigma = match case {
        SigmaCase::D1 => -(params.rho1 + params.rho2 * (params.c * params.tau).exp()).ln(),
        SigmaCase::D2 => {
            -combined_factor(params.c, params.rho1, params.rho2, params.kappa, params.tau).ln()
        }
        other => {
            return Err(CoreError::WrongCase {
                expected: "D1 or D2",
                found: other.as_str(),
            })
        }
    };
    Ok(SigmaResult {
        case,
        // -ln(1) is IEEE negative zero; keep the boundary sign clean
        sigma: Some(sigma + 0.0),
        binding_window_count: None,
    })
}

/// Left side of the window inequality at a candidate sigma.
fn window_lhs(rho1: f64, weight: f64, sigma: f64, window_count: f64) -> f64 {
    rho1 * sigma.exp() + weight * (sigma * window_count).exp()
}

/// Largest sigma > 0 satisfying the window inequality
/// `rho1 e^sigma + K e^{sigma N} <= 1`, where `K` carries the `e^{c tau}`
/// weight in the stable-flow case. Monotone in sigma, so bisection on the
/// boundary; with N = 1 the bound collapses to `-ln(rho1 + K)`.
pub fn sigma_feasible_max(
    params: &CertificateParams,
    window_count: usize,
) -> CoreResult<SigmaResult> {
    let case = classify_case(params.c, params.rho1, params.rho2, params.kappa, params.tau);
    let weight = match case {
        SigmaCase::D3 => {
            ((1.0 - params.rho1) * params.kappa + params.rho2) * (params.c * params.tau).exp()
        }
        SigmaCase::D4 => (1.0 - params.rho1) * params.kappa + params.rho2,
        other => {
            return Err(CoreError::WrongCase {
                expected: "D3 or D4",
                found: other.as_str(),
            })
        }
    };
    if window_count == 0 {
        return Err(CoreError::Invalid {
            what: "window count",
            why: "the window ending at an impulse always contains it".into(),
        });
    }
    let n = window_count as f64;
    let at_zero = params.rho1 + weight;
    if at_zero >= 1.0 {
        return Err(CoreError::InfeasibleSigma { lhs: at_zero });
    }
    if params.rho1 == 0.0 && weight == 0.0 {
        return Err(CoreError::UnboundedSigma);
    }

    let sigma = if window_count == 1 {
        -(params.rho1 + weight).ln()
    } else {
        // bracket: either factor alone pins the boundary
        let mut hi = f64::INFINITY;
        if params.rho1 > 0.0 {
            hi = hi.min(-params.rho1.ln());
        }
        if weight > 0.0 {
            hi = hi.min(-weight.ln() / n);
        }
        debug_assert!(hi.is_finite());
        if window_lhs(params.rho1, weight, hi, n) <= 1.0 {
            // only possible when the other factor vanishes; boundary exact
            hi
        } else {
            let mut lo = 0.0;
            let mut hi = hi;
            for _ in 0..SIGMA_BISECTION_CAP {
                let mid = 0.5 * (lo + hi);
                if window_lhs(params.rho1, weight, mid, n) <= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= SIGMA_BISECTION_TOL {
                    break;
                }
            }
            lo
        }
    };
    Ok(SigmaResult {
        case,
        sigma: Some(sigma),
        binding_window_count: Some(window_count),
    })
}

/// Dwell-time reformulation of the unified inequality:
/// `t_star = |sigma| / |c - lambda|`, `n_star = mu / |sigma|`.
pub fn adt_parameters(
    sigma: f64,
    c: f64,
    lambda: f64,
    mu: f64,
) -> CoreResult<(Option<AdtParams>, DwellDirection)> {
    if sigma >= 0.0 && c >= lambda {
        let params = if sigma > 0.0 && c > lambda {
            Some(AdtParams::new(
                sigma.abs() / (c - lambda).abs(),
                mu / sigma.abs(),
            )?)
        } else {
            None
        };
        return Ok((params, DwellDirection::Unconstrained));
    }
    if sigma < 0.0 && c > lambda {
        let params = AdtParams::new(sigma.abs() / (c - lambda).abs(), mu / sigma.abs())?;
        return Ok((Some(params), DwellDirection::Adt));
    }
    if sigma > 0.0 && c < lambda {
        let params = AdtParams::new(sigma.abs() / (c - lambda).abs(), mu / sigma.abs())?;
        return Ok((Some(params), DwellDirection::ReverseAdt));
    }
    Err(CoreError::NoDwellTimeForm { sigma, c, lambda })
}

/// Bounds on the per-window impulse count implied by a positive sigma:
/// the window inequality caps it above, the reverse dwell condition from
/// below. `empty_band` flags `lower > upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCountBand {
    pub lower: f64,
    pub upper: f64,
    pub empty_band: bool,
}

pub fn window_count_bounds(
    params: &CertificateParams,
    sigma: f64,
    adt: &AdtParams,
) -> CoreResult<WindowCountBand> {
    let case = classify_case(params.c, params.rho1, params.rho2, params.kappa, params.tau);
    let weight = match case {
        SigmaCase::D3 => {
            ((1.0 - params.rho1) * params.kappa + params.rho2) * (params.c * params.tau).exp()
        }
        SigmaCase::D4 => (1.0 - params.rho1) * params.kappa + params.rho2,
        other => {
            return Err(CoreError::WrongCase {
                expected: "D3 or D4",
                found: other.as_str(),
            })
        }
    };
    if !(sigma > 0.0) {
        return Err(CoreError::Invalid {
            what: "window-count bounds",
            why: format!("sigma must be positive, got {sigma}"),
        });
    }
    let head = params.rho1 * sigma.exp();
    if head >= 1.0 {
        return Err(CoreError::UpperBoundUndefined { value: head });
    }
    let upper = if weight == 0.0 {
        f64::INFINITY
    } else {
        ((1.0 - head) / weight).ln() / sigma
    };
    let lower = params.tau / adt.t_star - adt.n_star;
    Ok(WindowCountBand {
        lower,
        upper,
        empty_band: lower > upper,
    })
}

/// Outcome of the unified-inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionV {
    pub holds: bool,
    /// Supremum of the left side minus the allowance used.
    pub worst_slack: f64,
    pub witness: (f64, f64),
}

/// Final verdict of the certificate engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Certified,
    NotCertified { reason: String },
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

/// Everything the engine computed, with every intermediate scalar.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub params: CertificateParams,
    pub t0: f64,
    pub horizon: f64,
    pub case: SigmaCase,
    pub sigma: Option<f64>,
    pub binding_window_count: Option<usize>,
    pub regime: Option<Regime>,
    pub direction: Option<DwellDirection>,
    pub adt: Option<AdtParams>,
    /// Least allowance making the unified inequality hold on the horizon.
    pub mu_required: Option<MuBound>,
    /// Allowance actually used (given, or the derived minimum).
    pub mu_used: Option<f64>,
    pub condition_v: Option<ConditionV>,
    /// True when an explicit schedule limits window counts to the horizon.
    pub horizon_limited: bool,
    pub verdict: Verdict,
}

/// Runs the full pipeline: classification, sigma, unified-inequality check,
/// regime and dwell-direction labels.
pub fn certify(
    params: &CertificateParams,
    sched: &ImpulseSchedule,
    t0: f64,
    horizon: f64,
) -> CoreResult<CertificateReport> {
    let case = classify_case(params.c, params.rho1, params.rho2, params.kappa, params.tau);

    let mut report = CertificateReport {
        params: params.clone(),
        t0,
        horizon,
        case,
        sigma: None,
        binding_window_count: None,
        regime: None,
        direction: None,
        adt: None,
        mu_required: None,
        mu_used: None,
        condition_v: None,
        horizon_limited: false,
        verdict: Verdict::NotCertified {
            reason: String::new(),
        },
    };

    let sigma_result = match case {
        SigmaCase::D1 | SigmaCase::D2 => sigma_closed_form(params)?,
        SigmaCase::D3 | SigmaCase::D4 => {
            let counts = window_counts(sched, params.tau, horizon)?;
            report.horizon_limited = counts.horizon_limited;
            sigma_feasible_max(params, counts.supremum)?
        }
        SigmaCase::Infeasible => {
            report.verdict = Verdict::NotCertified {
                reason: "no sigma case applies (c <= 0 with non-contractive impulses)".into(),
            };
            return Ok(report);
        }
    };
    let sigma = sigma_result.sigma.expect("feasible cases carry sigma");
    report.sigma = Some(sigma);
    report.binding_window_count = sigma_result.binding_window_count;
    report.regime = Some(Regime::classify(params.c, sigma));

    // unified inequality on the horizon
    let (raw_sup, witness) = condition_v_sup(sched, sigma, params.c, params.lambda, t0, horizon)?;
    let mu_required = minimal_mu(sched, sigma, params.c, params.lambda, t0, horizon)?;
    report.mu_required = Some(mu_required);

    let (mu_used, holds) = match (mu_required, params.mu) {
        (MuBound::Unbounded, _) => (params.mu, false),
        (MuBound::Finite(min_mu), Some(given)) => (Some(given), min_mu <= given + 1e-12),
        (MuBound::Finite(min_mu), None) => (Some(min_mu), true),
    };
    report.mu_used = mu_used;
    report.condition_v = Some(ConditionV {
        holds,
        worst_slack: raw_sup - mu_used.unwrap_or(0.0),
        witness,
    });

    if let Some(mu) = mu_used {
        if let Ok((adt, direction)) = adt_parameters(sigma, params.c, params.lambda, mu) {
            report.adt = adt;
            report.direction = Some(direction);
        }
    }

    report.verdict = if holds {
        Verdict::Certified
    } else {
        let reason = match mu_required {
            MuBound::Unbounded => {
                "unified inequality unbounded: per-period drift of -sigma*N - (c - lambda)*(t - s) is positive".into()
            }
            MuBound::Finite(min_mu) => format!(
                "unified inequality needs mu >= {min_mu:.6e}, larger than the given allowance"
            ),
        };
        Verdict::NotCertified { reason }
    };
    Ok(report)
}

/// 17-significant-digit rendering; round-trips through f64 parsing.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

impl std::fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[certificate]")?;
        writeln!(f, "c = {}", full_precision(self.params.c))?;
        writeln!(f, "rho1 = {}", full_precision(self.params.rho1))?;
        writeln!(f, "rho2 = {}", full_precision(self.params.rho2))?;
        writeln!(f, "kappa = {}", full_precision(self.params.kappa))?;
        writeln!(f, "tau = {}", full_precision(self.params.tau))?;
        writeln!(f, "lambda = {}", full_precision(self.params.lambda))?;
        writeln!(f, "t0 = {}", full_precision(self.t0))?;
        writeln!(f, "horizon = {}", full_precision(self.horizon))?;
        writeln!(f, "case = {}", self.case)?;
        if let Some(s) = self.sigma {
            writeln!(f, "sigma = {}", full_precision(s))?;
        }
        if let Some(n) = self.binding_window_count {
            writeln!(f, "binding_window_count = {n}")?;
        }
        if let Some(r) = self.regime {
            writeln!(f, "regime = \"{r}\"")?;
        }
        if let Some(d) = self.direction {
            writeln!(f, "direction = \"{d}\"")?;
        }
        if let Some(adt) = &self.adt {
            writeln!(f, "t_star = {}", full_precision(adt.t_star))?;
            writeln!(f, "n_star = {}", full_precision(adt.n_star))?;
        }
        match self.mu_required {
            Some(MuBound::Finite(m)) => writeln!(f, "mu_required = {}", full_precision(m))?,
            Some(MuBound::Unbounded) => writeln!(f, "mu_required = \"unbounded\"")?,
            None => {}
        }
        if let Some(m) = self.mu_used {
            writeln!(f, "mu_used = {}", full_precision(m))?;
        }
        if let Some(cv) = &self.condition_v {
            writeln!(f, "condition_v_holds = {}", cv.holds)?;
            writeln!(
                f,
                "condition_v_worst_slack = {}",
                full_precision(cv.worst_slack)
            )?;
            writeln!(
                f,
                "condition_v_witness = [{}, {}]",
                full_precision(cv.witness.0),
                full_precision(cv.witness.1)
            )?;
        }
        if self.horizon_limited {
            writeln!(f, "horizon_limited = true")?;
        }
        match &self.verdict {
            Verdict::Certified => writeln!(f, "verdict = \"GAS-certified\"")?,
            Verdict::NotCertified { reason } => {
                writeln!(f, "verdict = \"not-certified\"")?;
                writeln!(f, "reason = \"{reason}\"")?;
            }
        }
        Ok(())
    }
}
