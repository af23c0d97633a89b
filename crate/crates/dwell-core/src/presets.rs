//! Built-in example systems: a scalar saturated system with a distributed-
//! delay jump map, a linear system with discrete delays in both the flow and
//! the jumps, and a delayed network control system. Each preset bundles the
//! dynamics, the Lyapunov pair, derived certificate parameters, the impulse
//! schedule, and the expected scalar table.

use crate::certificate::CertificateParams;
use crate::error::{CoreError, CoreResult};
use crate::history::{weighted_integral, History, HistoryFunction, StateVector};
use crate::linalg::{spectral_norm, sym_lambda_max, Mat};
use crate::lyapunov::LyapunovPair;
use crate::schedule::{window_counts, ImpulseSchedule};
use crate::system::{SystemSpec, Term};

/// Default convergence-rate knob: small enough that the dwell bound
/// approaches `|sigma| / |c|`.
pub const DEFAULT_LAMBDA: f64 = 1e-6;

/// Saturation `sat(z) = (|z + 1| - |z - 1|) / 2`: identity on [-1, 1],
/// clamped to +-1 outside. Evaluated as a clamp so the bound and the
/// identity hold exactly in floating point.
pub fn sat(z: f64) -> f64 {
    z.clamp(-1.0, 1.0)
}

/// A complete, runnable example bundle.
pub struct ExamplePreset {
    pub name: &'static str,
    pub system: SystemSpec,
    pub pair: LyapunovPair,
    pub params: CertificateParams,
    pub schedule: ImpulseSchedule,
    pub initial: HistoryFunction,
    pub t0: f64,
    pub horizon: f64,
    pub base_step: f64,
    /// Named scalars this preset is expected to reproduce.
    pub expected: Vec<(&'static str, f64)>,
    pub notes: Vec<String>,
}

pub fn preset_names() -> &'static [&'static str] {
    &["ex1", "ex2-c1", "ex2-c2", "ex2-c3", "ex3"]
}

pub fn preset(name: &str) -> CoreResult<ExamplePreset> {
    match name {
        "ex1" => example1_preset(0.2, 0.25, 1.0, 4.0),
        "ex2-c1" => example2_preset(Ex2Case::C1),
        "ex2-c2" => example2_preset(Ex2Case::C2),
        "ex2-c3" => example2_preset(Ex2Case::C3),
        "ex3" => example3_preset(),
        other => Err(CoreError::Invalid {
            what: "preset name",
            why: format!("unknown preset {other:?}; known: {:?}", preset_names()),
        }),
    }
}

// --- xi-optimized jump constants -----------------------------------------

/// Jump constants at the optimal splitting parameter xi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiOptimum {
    pub xi: f64,
    /// Minimized combination value (the feasibility quantity).
    pub value: f64,
    pub rho1: f64,
    pub rho2: f64,
}

/// Minimizes `rho1(xi) e^sigma + [(1 - rho1(xi)) kappa + rho2(xi)] * W` with
/// `rho1 = (1 + xi) p^2`, `rho2 = (1 + 1/xi) q^2` and
/// `W = e_ctau * e^{sigma * n}`. Closed form:
/// `(sqrt(e^sigma - kappa W) p + sqrt(W) q)^2 + kappa W` at
/// `xi = sqrt(W) q / (sqrt(e^sigma - kappa W) p)`.
pub fn est02_optimum(
    p: f64,
    q: f64,
    kappa: f64,
    e_ctau: f64,
    sigma: f64,
    window_count: usize,
) -> CoreResult<XiOptimum> {
    let w = e_ctau * (sigma * window_count as f64).exp();
    let head = sigma.exp() - kappa * w;
    if head <= 0.0 {
        return Err(CoreError::XiInfeasible {
            why: format!("e^sigma - kappa*W = {head} <= 0 leaves no real splitting"),
        });
    }
    if p == 0.0 {
        return Ok(XiOptimum {
            xi: f64::INFINITY,
            value: q * q * w + kappa * w,
            rho1: 0.0,
            rho2: q * q,
        });
    }
    if q == 0.0 {
        return Ok(XiOptimum {
            xi: 0.0,
            value: p * p * head + kappa * w,
            rho1: p * p,
            rho2: 0.0,
        });
    }
    let xi = (w.sqrt() * q) / (head.sqrt() * p);
    let root = head.sqrt() * p + w.sqrt() * q;
    Ok(XiOptimum {
        xi,
        value: root * root + kappa * w,
        rho1: (1.0 + xi) * p * p,
        rho2: (1.0 + 1.0 / xi) * q * q,
    })
}

/// The sigma = 0, single-window specialization: minimizes
/// `rho1 + [(1 - rho1) kappa + rho2] * e_ctau` over xi.
pub fn est01_optimum(p: f64, q: f64, kappa: f64, e_ctau: f64) -> CoreResult<XiOptimum> {
    est02_optimum(p, q, kappa, e_ctau, 0.0, 1)
}

/// Largest sigma > 0 whose xi-minimized window combination stays at or below
/// 1, together with the optimum at that sigma.
pub fn est02_sigma_max(
    p: f64,
    q: f64,
    kappa: f64,
    e_ctau: f64,
    window_count: usize,
) -> CoreResult<(f64, XiOptimum)> {
    let feasible = |sigma: f64| -> bool {
        est02_optimum(p, q, kappa, e_ctau, sigma, window_count)
            .map(|o| o.value <= 1.0)
            .unwrap_or(false)
    };
    let at_zero = est02_optimum(p, q, kappa, e_ctau, 0.0, window_count)?;
    if at_zero.value >= 1.0 {
        return Err(CoreError::InfeasibleSigma { lhs: at_zero.value });
    }
    let mut hi = 0.25;
    let mut doublings = 0;
    while feasible(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 80 {
            return Err(CoreError::UnboundedSigma);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-10 {
            break;
        }
    }
    let opt = est02_optimum(p, q, kappa, e_ctau, lo, window_count)?;
    Ok((lo, opt))
}

// --- linear impulsive systems ---------------------------------------------

/// `xdot = A x + B x(t - r1)`, `jump = C x(t^-) + D x(t - r2)`.
#[derive(Debug, Clone)]
pub struct LinearImpulsiveSpec {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
    pub r1: f64,
    pub r2: f64,
}

/// Scalars derived from a linear spec: norms, the decay rate estimate, and
/// the xi-optimized closed-form combination when it exists.
#[derive(Debug, Clone)]
pub struct LinearDerivation {
    pub eps: f64,
    pub c_rate: f64,
    pub kappa: f64,
    pub tau: f64,
    pub lambda_max_sym: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    pub norm_d: f64,
    pub norm_i_plus_c: f64,
    /// xi-optimized combined jump factor with the `e^{c tau}` weight;
    /// None when the optimization is infeasible (`kappa e^{c tau} >= 1`).
    pub est01: Option<XiOptimum>,
    pub folded_flow_delay: bool,
    pub folded_jump_delay: bool,
}

/// Derives the certificate scalars from the matrices: `eps = ||B||`,
/// `c = -(lambda_max(A + A^T) + 2 ||B||)`, `kappa = eps * r1`, delay-free
/// sides folded into their undelayed matrices.
pub fn linear_derivation(spec: &LinearImpulsiveSpec) -> CoreResult<LinearDerivation> {
    for (name, r) in [("r1", spec.r1), ("r2", spec.r2)] {
        if !r.is_finite() || r < 0.0 {
            return Err(CoreError::Invalid {
                what: "linear system",
                why: format!("{name} must be a nonnegative finite number, got {r}"),
            });
        }
    }
    let tau = spec.r1.max(spec.r2);
    if !(tau > 0.0) {
        return Err(CoreError::Invalid {
            what: "linear system",
            why: "r1 and r2 cannot both be zero".into(),
        });
    }
    let n = spec.a.n();
    for (name, m) in [("b", &spec.b), ("c", &spec.c), ("d", &spec.d)] {
        if m.n() != n {
            return Err(CoreError::Invalid {
                what: "linear system",
                why: format!("matrix {name} is {}x{0}, expected {n}x{n}", m.n()),
            });
        }
    }
    let folded_flow = spec.r1 == 0.0;
    let folded_jump = spec.r2 == 0.0;
    let zero = Mat::scaled_identity(n, 0.0);
    let (a_eff, b_eff) = if folded_flow {
        (spec.a.add(&spec.b), zero.clone())
    } else {
        (spec.a.clone(), spec.b.clone())
    };
    let (c_eff, d_eff) = if folded_jump {
        (spec.c.add(&spec.d), zero)
    } else {
        (spec.c.clone(), spec.d.clone())
    };

    let eps = spectral_norm(&b_eff);
    let lambda_max = sym_lambda_max(&a_eff.add(&a_eff.transpose()))?;
    let c_rate = -(lambda_max + 2.0 * eps);
    let kappa = eps * spec.r1;
    let norm_i_plus_c = spectral_norm(&Mat::identity(n).add(&c_eff));
    let norm_d = spectral_norm(&d_eff);
    let est01 = est01_optimum(norm_i_plus_c, norm_d, kappa, (c_rate * tau).exp()).ok();

    Ok(LinearDerivation {
        eps,
        c_rate,
        kappa,
        tau,
        lambda_max_sym: lambda_max,
        norm_a: spectral_norm(&a_eff),
        norm_b: eps,
        norm_d,
        norm_i_plus_c,
        est01,
        folded_flow_delay: folded_flow,
        folded_jump_delay: folded_jump,
    })
}

/// Linear system as a declarative spec plus its quadratic Lyapunov pair.
fn linear_system_spec(spec: &LinearImpulsiveSpec) -> SystemSpec {
    SystemSpec {
        dimension: spec.a.n(),
        tau: Some(spec.r1.max(spec.r2)),
        flow: vec![
            Term::Linear {
                matrix: spec.a.rows(),
                delay: 0.0,
            },
            Term::Linear {
                matrix: spec.b.rows(),
                delay: spec.r1,
            },
        ],
        jump: vec![
            Term::Linear {
                matrix: spec.c.rows(),
                delay: 0.0,
            },
            Term::Linear {
                matrix: spec.d.rows(),
                delay: spec.r2,
            },
        ],
        initial: None,
    }
}

fn quadratic_pair(eps: f64, depth: f64) -> LyapunovPair {
    LyapunovPair::new(
        Box::new(|_t, x: &StateVector| x.as_slice().iter().map(|c| c * c).sum()),
        Box::new(move |_t, h: &dyn History| {
            if depth == 0.0 || eps == 0.0 {
                return Ok(0.0);
            }
            weighted_integral(h, -depth, 0.0, |_s, v| {
                eps * v.iter().map(|c| c * c).sum::<f64>()
            })
        }),
        Box::new(|z: f64| z.max(0.0).sqrt()),
    )
}

// --- example 1: scalar saturated system ------------------------------------

/// Scalar system `xdot = -sat(x) + a sat(x(t - tau))` with jump
/// `b sat(integral of x over the trailing tau window)`. Defaults reproduce
/// the worked values at `(0.2, 0.25, 1, 4)`.
pub fn example1_preset(a: f64, b: f64, tau: f64, epsilon: f64) -> CoreResult<ExamplePreset> {
    for (name, v, strict) in [
        ("a", a, false),
        ("b", b, false),
        ("tau", tau, true),
        ("epsilon", epsilon, true),
    ] {
        if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
            return Err(CoreError::Invalid {
                what: "example 1 parameters",
                why: format!("{name} = {v} out of range"),
            });
        }
    }
    let c = (2.0 - (epsilon + 2.0) * a.abs()).min(epsilon / ((epsilon + 1.0) * tau));
    let rho1 = 2.0 * std::f64::consts::E;
    let rho2 = 2.0 * b * b * tau * tau;
    let kappa = a.abs() * tau * (1.0 + 0.5 * epsilon);

    let mut notes = Vec::new();
    if c <= 0.0 {
        notes.push(format!(
            "decay rate c = {c} is not positive at epsilon = {epsilon}; the certificate regime changes"
        ));
    }

    let system = SystemSpec {
        dimension: 1,
        tau: Some(tau),
        flow: vec![
            Term::Sat {
                matrix: vec![vec![-1.0]],
                delay: 0.0,
            },
            Term::Sat {
                matrix: vec![vec![a]],
                delay: tau,
            },
        ],
        jump: vec![Term::SatIntegral {
            matrix: vec![vec![b]],
            window: tau,
        }],
        initial: Some(vec![0.5]),
    };

    let abs_a = a.abs();
    let pair = LyapunovPair::new(
        Box::new(|_t, x: &StateVector| {
            let z = x[0].abs();
            if z <= 1.0 {
                z * z
            } else {
                (2.0 * (z - 1.0)).exp()
            }
        }),
        Box::new(move |_t, h: &dyn History| {
            weighted_integral(h, -tau, 0.0, |s, v| {
                let w = epsilon + 1.0 + epsilon * s / tau;
                let sz = sat(v[0]);
                abs_a * sz * sz * w
            })
        }),
        Box::new(|z: f64| {
            if z <= 0.0 {
                0.0
            } else if z <= 1.0 {
                z.sqrt()
            } else {
                1.0 + 0.5 * z.ln()
            }
        }),
    );

    let params = CertificateParams::new(c, rho1, rho2, kappa, tau, DEFAULT_LAMBDA, None)?;
    let schedule = ImpulseSchedule::periodic(vec![1.0, 3.0, 6.0, 10.0], 10.0, 0.0)?;
    let initial = HistoryFunction::constant(tau, StateVector::new(vec![0.5])?)?;

    Ok(ExamplePreset {
        name: "ex1",
        system,
        pair,
        params,
        schedule,
        initial,
        t0: 0.0,
        horizon: 20.0,
        base_step: 1e-3,
        expected: vec![("c", 0.8), ("sigma", -1.7431), ("t_star", 2.1789)],
        notes,
    })
}

// --- example 2: linear system with discrete delays --------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ex2Case {
    C1,
    C2,
    C3,
}

fn ex2_matrices(case: Ex2Case) -> LinearImpulsiveSpec {
    let a1 = Mat::from_rows(&[&[-1.1834, -0.8284], &[-0.8284, -1.7751]]).unwrap();
    let b1 = Mat::from_rows(&[&[0.25, 0.175], &[0.175, 0.375]]).unwrap();
    let c1 = Mat::from_rows(&[&[-0.7375, 0.175], &[0.125, -0.6]]).unwrap();
    let (a, b, c, d) = match case {
        Ex2Case::C1 => (a1, b1.clone(), c1, b1),
        Ex2Case::C2 => (
            a1,
            b1.clone(),
            Mat::from_rows(&[&[-0.895, 0.07], &[0.05, -0.84]]).unwrap(),
            b1,
        ),
        Ex2Case::C3 => (
            Mat::from_rows(&[&[0.2, 0.12], &[0.1, 0.25]]).unwrap(),
            b1,
            c1,
            Mat::from_rows(&[&[0.105, 0.07], &[0.05, 0.16]]).unwrap(),
        ),
    };
    LinearImpulsiveSpec {
        a,
        b,
        c,
        d,
        r1: 0.1,
        r2: 0.1,
    }
}

fn ex2_schedule(case: Ex2Case) -> ImpulseSchedule {
    match case {
        // t_{2k-1} = 0.26k - 0.18, t_{2k} = 0.26k
        Ex2Case::C1 => ImpulseSchedule::periodic(vec![0.08, 0.26], 0.26, 0.0).unwrap(),
        // t_{2k-1} = 0.14k - 0.11, t_{2k} = 0.14k
        Ex2Case::C2 => ImpulseSchedule::periodic(vec![0.03, 0.14], 0.14, 0.0).unwrap(),
        // t_{4k-3} = 0.52k - 0.48 .. t_{4k} = 0.52k
        Ex2Case::C3 => ImpulseSchedule::periodic(vec![0.04, 0.08, 0.12, 0.52], 0.52, 0.0).unwrap(),
    }
}

pub fn example2_preset(case: Ex2Case) -> CoreResult<ExamplePreset> {
    let spec = ex2_matrices(case);
    let deriv = linear_derivation(&spec)?;
    let schedule = ex2_schedule(case);
    let horizon = 6.0;

    let (name, rho1, rho2, expected) = match case {
        Ex2Case::C1 => {
            let est = deriv.est01.ok_or_else(|| CoreError::XiInfeasible {
                why: "closed-form combination infeasible for these matrices".into(),
            })?;
            let expected = vec![
                ("lambda_max_sym", -1.1993),
                ("norm_b", 0.4983),
                ("norm_i_plus_c", 0.4972),
                ("c", 0.2027),
                ("sigma", -0.0262),
                ("t_star", 0.1293),
            ];
            ("ex2-c1", est.rho1, est.rho2, expected)
        }
        Ex2Case::C2 => {
            let counts = window_counts(&schedule, deriv.tau, horizon)?;
            let e_ctau = (deriv.c_rate * deriv.tau).exp();
            let (_sigma, opt) = est02_sigma_max(
                deriv.norm_i_plus_c,
                deriv.norm_d,
                deriv.kappa,
                e_ctau,
                counts.supremum,
            )?;
            let expected = vec![
                ("c", 0.2027),
                ("norm_i_plus_c", 0.1989),
                ("combined_factor", 0.5369),
                ("window_supremum", counts.supremum as f64),
            ];
            ("ex2-c2", opt.rho1, opt.rho2, expected)
        }
        Ex2Case::C3 => {
            let counts = window_counts(&schedule, deriv.tau, horizon)?;
            let (_sigma, opt) = est02_sigma_max(
                deriv.norm_i_plus_c,
                deriv.norm_d,
                deriv.kappa,
                1.0,
                counts.supremum,
            )?;
            let expected = vec![
                ("lambda_max_sym", 0.6756),
                ("c", -1.6722),
                ("norm_d", 0.1989),
                ("sigma_feasible", 0.3786),
                ("window_supremum", counts.supremum as f64),
                ("reverse_t_star", 0.2264),
                ("gap_bound", 0.3945),
            ];
            ("ex2-c3", opt.rho1, opt.rho2, expected)
        }
    };

    let params = CertificateParams::new(
        deriv.c_rate,
        rho1,
        rho2,
        deriv.kappa,
        deriv.tau,
        DEFAULT_LAMBDA,
        None,
    )?;
    let mut system = linear_system_spec(&spec);
    system.initial = Some(vec![0.5, 0.7]);
    let initial = HistoryFunction::constant(deriv.tau, StateVector::new(vec![0.5, 0.7])?)?;
    let pair = quadratic_pair(deriv.eps, spec.r1);

    Ok(ExamplePreset {
        name,
        system,
        pair,
        params,
        schedule,
        initial,
        t0: 0.0,
        horizon,
        base_step: 1e-3,
        expected,
        notes: Vec::new(),
    })
}

/// Derivation record for a given case, exposed for analysis and tests.
pub fn example2_derivation(case: Ex2Case) -> CoreResult<LinearDerivation> {
    linear_derivation(&ex2_matrices(case))
}

/// The comparison bound `ln(rho1 + rho2 + (1 - rho1) kappa) / c` at the
/// xi-optimized undiscounted combination (uniform-gap criteria use it).
pub fn example2_c3_gap_bound() -> CoreResult<f64> {
    let deriv = example2_derivation(Ex2Case::C3)?;
    let plain = est01_optimum(deriv.norm_i_plus_c, deriv.norm_d, deriv.kappa, 1.0)?;
    Ok(plain.value.ln() / deriv.c_rate)
}

// --- example 3: delayed network control system ------------------------------

/// Matrices and scalars of the network control example.
#[derive(Debug, Clone)]
pub struct Example3Derivation {
    pub l: f64,
    pub r: f64,
    pub d: f64,
    pub c_rate: f64,
    pub kappa: f64,
    pub norm_a: f64,
    pub norm_b: f64,
    pub norm_i_plus_b: f64,
    pub lambda_max_sym: f64,
    /// Largest impulse count strictly inside any `(t_k - d, t_k)`.
    pub zeta: usize,
    pub est: XiOptimum,
}

fn example3_matrices() -> (Mat, Mat) {
    let a = Mat::from_rows(&[
        &[-18.0 / 7.0, 9.0, 0.0],
        &[1.0, -1.0, 1.0],
        &[0.0, -100.0 / 7.0, 0.0],
    ])
    .unwrap();
    let b = Mat::scaled_identity(3, -0.5418);
    (a, b)
}

/// Jump-constant derivation for the network control system against a given
/// schedule; the impulse delay `d` makes the delayed-state gain depend on how
/// many impulses can crowd inside one `d`-window.
pub fn example3_derivation(sched: &ImpulseSchedule) -> CoreResult<Example3Derivation> {
    let (a, b) = example3_matrices();
    let l = 27.0 / 7.0;
    let r = 0.02;
    let d = 0.01;
    let norm_a = spectral_norm(&a);
    let norm_b = spectral_norm(&b);
    let norm_i_plus_b = spectral_norm(&Mat::identity(3).add(&b));
    let lambda_max = sym_lambda_max(&a.add(&a.transpose()))?;
    let c_rate = -(lambda_max + 2.0 * l);
    let kappa = r * l;
    let zeta = window_counts(sched, d, 1.0)?.supremum.saturating_sub(1);
    let q = d * norm_b * (norm_a + l) + (zeta as f64) * norm_b * norm_b;
    let est = est01_optimum(norm_i_plus_b, q, kappa, 1.0)?;
    Ok(Example3Derivation {
        l,
        r,
        d,
        c_rate,
        kappa,
        norm_a,
        norm_b,
        norm_i_plus_b,
        lambda_max_sym: lambda_max,
        zeta,
        est,
    })
}

pub fn example3_preset() -> CoreResult<ExamplePreset> {
    let schedule = ImpulseSchedule::periodic(vec![0.05, 0.08], 0.08, 0.0)?;
    let deriv = example3_derivation(&schedule)?;
    let (a, b) = example3_matrices();
    let l = deriv.l;
    let r = deriv.r;
    let d = deriv.d;
    let tau = r.max(d);

    let mut notes = Vec::new();
    if deriv.zeta > 0 {
        notes.push(format!(
            "schedule packs {} impulse(s) inside one impulse-delay window; the delayed-state gain \
             was recomputed accordingly",
            deriv.zeta
        ));
    }

    let system = SystemSpec {
        dimension: 3,
        tau: Some(tau),
        flow: vec![
            Term::Linear {
                matrix: a.rows(),
                delay: 0.0,
            },
            Term::Sat {
                matrix: vec![vec![l, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
                delay: r,
            },
        ],
        jump: vec![Term::Linear {
            matrix: b.rows(),
            delay: d,
        }],
        initial: Some(vec![0.5, 0.45, -0.2]),
    };

    let pair = quadratic_pair(l, r);
    let params = CertificateParams::new(
        deriv.c_rate,
        deriv.est.rho1,
        deriv.est.rho2,
        deriv.kappa,
        tau,
        DEFAULT_LAMBDA,
        None,
    )?;
    let initial = HistoryFunction::constant(tau, StateVector::new(vec![0.5, 0.45, -0.2])?)?;

    Ok(ExamplePreset {
        name: "ex3",
        system,
        pair,
        params,
        schedule,
        initial,
        t0: 0.0,
        horizon: 2.0,
        base_step: 1e-3,
        expected: vec![
            ("sigma", 0.9619),
            ("sigma_over_c", 0.041),
            ("average_interval", 0.04),
            ("window_supremum", 1.0),
        ],
        notes,
    })
}
