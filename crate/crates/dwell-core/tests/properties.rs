//! Property tests for the structural invariants: counting additivity,
//! classification exhaustiveness, sigma monotonicity, time-rescaling
//! invariance of the certificate, dwell-parameter consistency, and format
//! round trips.

use dwell_core::io::{read_trajectory_csv, write_trajectory_csv, TrajectoryData};
use dwell_core::presets::{preset, sat};
use dwell_core::*;

use proptest::prelude::*;

fn periodic_strategy() -> impl Strategy<Value = ImpulseSchedule> {
    (
        0.5f64..4.0,
        prop::collection::vec(0.02f64..=1.0, 1..=4),
        0.0f64..2.0,
    )
        .prop_filter_map("offsets collapse", |(period, fracs, origin)| {
            let mut offsets: Vec<f64> = fracs.iter().map(|f| f * period).collect();
            offsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
            offsets.dedup_by(|b, a| (*b - *a) < 0.01 * period);
            ImpulseSchedule::periodic(offsets, period, origin).ok()
        })
}

fn explicit_strategy() -> impl Strategy<Value = ImpulseSchedule> {
    prop::collection::vec(0.05f64..19.9, 0..25).prop_filter_map("times collapse", |mut times| {
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup_by(|b, a| (*b - *a) < 1e-3);
        ImpulseSchedule::explicit(times, 20.0).ok()
    })
}

fn schedule_strategy() -> impl Strategy<Value = ImpulseSchedule> {
    prop_oneof![periodic_strategy(), explicit_strategy()]
}

proptest! {
    #[test]
    fn saturation_is_odd_bounded_lipschitz(z in -50.0f64..50.0, w in -50.0f64..50.0) {
        prop_assert_eq!(sat(-z), -sat(z));
        prop_assert!(sat(z).abs() <= 1.0);
        prop_assert!((sat(z) - sat(w)).abs() <= (z - w).abs());
        if z.abs() <= 1.0 {
            prop_assert_eq!(sat(z), z);
        }
    }

    #[test]
    fn counting_is_additive(
        sched in schedule_strategy(),
        raw in prop::collection::vec(0.0f64..20.0, 3),
    ) {
        let mut pts = raw;
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (s, u, t) = (pts[0], pts[1], pts[2]);
        let whole = sched.count_impulses(s, t).unwrap();
        let split = sched.count_impulses(s, u).unwrap() + sched.count_impulses(u, t).unwrap();
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn periodic_counts_are_shift_invariant(
        sched in periodic_strategy(),
        s in 2.0f64..10.0,
        len in 0.0f64..8.0,
    ) {
        let (period, origin) = match &sched {
            ImpulseSchedule::Periodic { period, origin, .. } => (*period, *origin),
            _ => unreachable!(),
        };
        let s = origin + s;
        let a = sched.count_impulses(s, s + len).unwrap();
        let b = sched.count_impulses(s + period, s + len + period).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn classification_is_a_partition(
        c in -3.0f64..3.0,
        rho1 in 0.0f64..4.0,
        rho2 in 0.0f64..2.0,
        kappa in 0.0f64..2.0,
        tau in 0.01f64..2.0,
    ) {
        let case = classify_case(c, rho1, rho2, kappa, tau);
        let combined = rho1 + ((1.0 - rho1) * kappa + rho2) * (c * tau).exp();
        let flat = rho1 + (1.0 - rho1) * kappa + rho2;
        // exactly one predicate matches the returned tag
        let expected = if c > 0.0 {
            if rho1 >= 1.0 {
                SigmaCase::D1
            } else if combined >= 1.0 {
                SigmaCase::D2
            } else {
                SigmaCase::D3
            }
        } else if rho1 < 1.0 && flat < 1.0 {
            SigmaCase::D4
        } else {
            SigmaCase::Infeasible
        };
        prop_assert_eq!(case, expected);
    }

    #[test]
    fn window_sigma_monotone_in_gains(
        c in -1.0f64..1.0,
        rho1 in 0.0f64..0.6,
        rho2 in 0.0f64..0.25,
        kappa in 0.0f64..0.25,
        tau in 0.05f64..1.0,
        n in 1usize..5,
    ) {
        let params = CertificateParams::new(c, rho1, rho2, kappa, tau, 1e-6, None).unwrap();
        let Ok(base) = sigma_feasible_max(&params, n) else { return Ok(()); };
        let base_sigma = base.sigma.unwrap();

        for bumped in [
            CertificateParams::new(c, rho1 + 0.1, rho2, kappa, tau, 1e-6, None).unwrap(),
            CertificateParams::new(c, rho1, rho2 + 0.1, kappa, tau, 1e-6, None).unwrap(),
            CertificateParams::new(c, rho1, rho2, kappa + 0.1, tau, 1e-6, None).unwrap(),
        ] {
            if let Ok(r) = sigma_feasible_max(&bumped, n) {
                prop_assert!(r.sigma.unwrap() <= base_sigma + 1e-9);
            }
        }
        // more impulses per window never raise the admissible sigma
        if let Ok(r) = sigma_feasible_max(&params, n + 1) {
            prop_assert!(r.sigma.unwrap() <= base_sigma + 1e-9);
        }
        // a longer delay weighs the window term up when the flow is stable
        if c > 0.0 {
            let longer = CertificateParams::new(c, rho1, rho2, kappa, tau + 0.2, 1e-6, None).unwrap();
            if classify_case(c, rho1, rho2, kappa, tau + 0.2) == SigmaCase::D3 {
                if let Ok(r) = sigma_feasible_max(&longer, n) {
                    prop_assert!(r.sigma.unwrap() <= base_sigma + 1e-9);
                }
            }
        }
    }

    #[test]
    fn closed_form_sigma_strictly_decreases_with_delay(
        c in 0.05f64..1.5,
        rho1 in 1.0f64..3.0,
        rho2 in 0.01f64..1.0,
        tau in 0.05f64..1.0,
    ) {
        // positive delayed gain makes longer delays strictly worse
        let p1 = CertificateParams::new(c, rho1, rho2, 0.1, tau, 1e-6, None).unwrap();
        let p2 = CertificateParams::new(c, rho1, rho2, 0.1, tau + 0.1, 1e-6, None).unwrap();
        let s1 = sigma_closed_form(&p1).unwrap().sigma.unwrap();
        let s2 = sigma_closed_form(&p2).unwrap().sigma.unwrap();
        prop_assert!(s2 < s1);
    }

    #[test]
    fn certify_is_invariant_under_time_rescaling(
        sched in periodic_strategy(),
        c in -1.0f64..1.5,
        rho1 in 0.0f64..2.0,
        rho2 in 0.0f64..0.8,
        kappa in 0.0f64..0.8,
        tau in 0.05f64..1.0,
        alpha in 0.25f64..4.0,
    ) {
        let params = CertificateParams::new(c, rho1, rho2, kappa, tau, 1e-3, None).unwrap();
        let (offsets, period, origin) = match &sched {
            ImpulseSchedule::Periodic { offsets, period, origin } => {
                (offsets.clone(), *period, *origin)
            }
            _ => unreachable!(),
        };
        let horizon = origin + 15.0;
        let report = certify(&params, &sched, origin, horizon).unwrap();

        let scaled_params = CertificateParams::new(
            c / alpha, rho1, rho2, kappa, tau * alpha, 1e-3 / alpha, None,
        ).unwrap();
        let scaled_sched = ImpulseSchedule::periodic(
            offsets.iter().map(|o| o * alpha).collect(),
            period * alpha,
            origin * alpha,
        ).unwrap();
        let scaled = certify(&scaled_params, &scaled_sched, origin * alpha, horizon * alpha).unwrap();

        prop_assert_eq!(report.verdict.is_certified(), scaled.verdict.is_certified());
        prop_assert_eq!(report.case, scaled.case);
        match (report.sigma, scaled.sigma) {
            (Some(a), Some(b)) => {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{a} vs {b}")
            }
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
        match (report.mu_required, scaled.mu_required) {
            (Some(MuBound::Finite(a)), Some(MuBound::Finite(b))) => {
                prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{a} vs {b}")
            }
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn minimal_mu_is_consistent_and_monotone_in_lambda(
        sched in schedule_strategy(),
        sigma in -2.0f64..-0.05,
        c in 0.3f64..1.5,
        lambda_frac in 0.05f64..0.8,
    ) {
        let lambda = lambda_frac * c;
        let lambda2 = lambda * 1.2;
        let t0 = 0.0;
        let horizon = 20.0;
        let mu1 = minimal_mu(&sched, sigma, c, lambda, t0, horizon).unwrap();
        let mu2 = minimal_mu(&sched, sigma, c, lambda2, t0, horizon).unwrap();
        match (mu1, mu2) {
            (MuBound::Finite(a), MuBound::Finite(b)) => {
                // demanding a faster rate can only raise the needed allowance
                prop_assert!(b >= a - 1e-12, "{a} vs {b}");
                // and the derived dwell parameters make the check pass
                let (adt, dir) = adt_parameters(sigma, c, lambda, a).unwrap();
                prop_assert_eq!(dir, DwellDirection::Adt);
                let verdict = check_adt(&sched, &adt.unwrap(), t0, horizon).unwrap();
                prop_assert!(verdict.holds, "worst slack {}", verdict.worst_slack);
            }
            (MuBound::Unbounded, b) => {
                // a positive drift stays positive as lambda grows
                prop_assert_eq!(b, MuBound::Unbounded);
            }
            (MuBound::Finite(_), MuBound::Unbounded) => {}
        }
    }

    #[test]
    fn trajectory_csv_round_trip(
        rows in prop::collection::vec(
            (0.0f64..100.0, prop::collection::vec(-5.0f64..5.0, 2), any::<bool>()),
            1..20,
        ),
    ) {
        // build monotone times; impulse rows are duplicated like the writer does
        let mut t = 0.0;
        let mut data_rows = Vec::new();
        for (dt, state, imp) in rows {
            t += dt + 0.01;
            if imp {
                data_rows.push((t, state.clone(), true));
                data_rows.push((t, state.iter().map(|x| x * 0.5).collect(), true));
            } else {
                data_rows.push((t, state, false));
            }
        }
        let data = TrajectoryData { dim: 2, rows: data_rows };
        let text = write_trajectory_csv(&data);
        let back = read_trajectory_csv(&text).unwrap();
        prop_assert_eq!(data, back);
    }
}

#[test]
fn history_round_trip_through_embedding() {
    // embedding a history into a trajectory and extracting the window at t0
    // reproduces it at all shared grid nodes, jumps included
    let phi = HistoryFunction::from_parts(
        vec![-2.0, -1.3, -0.7, -0.2, 0.0],
        vec![
            StateVector::new(vec![0.1]).unwrap(),
            StateVector::new(vec![0.4]).unwrap(),
            StateVector::new(vec![1.9]).unwrap(),
            StateVector::new(vec![-0.3]).unwrap(),
            StateVector::new(vec![-0.3]).unwrap(),
        ],
        vec![
            (2, StateVector::new(vec![0.9]).unwrap()),
            (3, StateVector::new(vec![0.1]).unwrap()),
        ],
    )
    .unwrap();
    let traj = Trajectory::new(5.0, phi.clone()).unwrap();
    let window = traj.window(5.0, Side::At).unwrap();
    for &s in phi.offsets() {
        assert_eq!(window.eval(s).unwrap(), phi.eval(s).unwrap(), "offset {s}");
        if s > -2.0 {
            assert_eq!(
                window.left_limit(s).unwrap(),
                phi.left_limit(s).unwrap(),
                "left limit at {s}"
            );
        }
    }
}

#[test]
fn functional_part_respects_kappa_bound_on_presets() {
    // v2(t, x_t) <= kappa * sup over the window of v1
    for name in ["ex1", "ex2-c1", "ex3"] {
        let p = preset(name).unwrap();
        let sys = p.system.build().unwrap();
        let horizon = (p.horizon / 4.0).max(10.0 * p.params.tau);
        let cfg = SimConfig::new(p.params.tau / 20.0, horizon);
        let traj = simulate(&sys, &p.schedule, &p.initial, p.t0, &cfg).unwrap();
        let n_samples = 25;
        for i in 0..=n_samples {
            let t = p.t0 + (horizon - p.t0) * i as f64 / n_samples as f64;
            let view = traj.window_view(t, Side::At).unwrap();
            let w2 = (p.pair.v2)(t, &view).unwrap();
            let mut sup_v1 = (p.pair.v1)(t, &traj.eval(t).unwrap());
            view.for_each_cell(-p.params.tau, 0.0, &mut |s0, v0, s1, v1| {
                let x0 = StateVector::new(v0.to_vec()).unwrap();
                let x1 = StateVector::new(v1.to_vec()).unwrap();
                sup_v1 = sup_v1
                    .max((p.pair.v1)(t + s0, &x0))
                    .max((p.pair.v1)(t + s1, &x1));
            })
            .unwrap();
            assert!(
                w2 <= p.params.kappa * sup_v1 * (1.0 + 1e-9) + 1e-15,
                "{name} at t = {t}: w2 = {w2}, kappa*sup = {}",
                p.params.kappa * sup_v1
            );
        }
    }
}

#[test]
fn envelope_check_is_monotone_in_claimed_rates() {
    // metamorphic: a certificate that holds keeps holding when both claimed
    // rates weaken
    let p = preset("ex3").unwrap();
    let sys = p.system.build().unwrap();
    let report = certify(&p.params, &p.schedule, p.t0, p.horizon).unwrap();
    let sigma = report.sigma.unwrap();
    let cfg = SimConfig::new(2e-3, 1.0);
    let traj = simulate(&sys, &p.schedule, &p.initial, p.t0, &cfg).unwrap();
    let base = check_envelope(&p.pair, &traj, &p.schedule, sigma, p.params.c, 0.05).unwrap();
    assert!(base.holds);
    for (ds, dc) in [(0.0, 0.5), (0.2, 0.0), (0.3, 1.0)] {
        let weaker = check_envelope(
            &p.pair,
            &traj,
            &p.schedule,
            sigma - ds,
            p.params.c - dc,
            0.05,
        )
        .unwrap();
        assert!(weaker.holds, "sigma-{ds}, c-{dc}");
    }
}
