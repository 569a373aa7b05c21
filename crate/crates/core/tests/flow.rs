use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wallach_flow::curvature::valiev_margin;
use wallach_flow::*;

fn metric(x1: f64, x2: f64, x3: f64, kind: SpaceKind) -> Metric {
    Metric::new(x1, x2, x3, kind).unwrap()
}

/// Flow time after which a metric near scale `x_min` is still far from extinction.
fn safe_horizon(m: &Metric) -> f64 {
    let x_min = m.x().iter().copied().fold(f64::INFINITY, f64::min);
    let rate = flow_vector_field(m).iter().fold(0.0f64, |a, b| a.max(b.abs()));
    0.25 * x_min / rate
}

fn random_coord(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.5f64..1.5).exp()
}

#[test]
fn diagonal_decay_matches_analytic_solution() {
    for kind in SpaceKind::ALL {
        let rate = f64::from(kind.diagonal_rate());
        let opts = FlowOptions {
            record_stride: 1e-6,
            ..FlowOptions::with_t_end(1.0)
        };
        let traj = integrate(&metric(1.0, 1.0, 1.0, kind), &opts).unwrap();
        assert!(traj.points.len() > 3);
        let max_err = traj
            .points
            .iter()
            .flat_map(|p| p.metric.x().map(|x| (x - (1.0 - rate * p.t)).abs()))
            .fold(0.0, f64::max);
        assert!(max_err <= 10.0 * (opts.rel_tol + opts.abs_tol), "{kind}: {max_err}");
        let ev = traj.extinction.unwrap();
        let t_ext = 1.0 / rate;
        assert!(
            ev.t_lo >= t_ext - opts.extinction_floor / rate - 1e-9 && ev.t_hi <= t_ext,
            "{kind}: {ev:?}"
        );
        assert!(traj.points.iter().all(|p| p.metric.x().iter().all(|x| *x > 0.0)));
    }
}

#[test]
fn diagonal_decay_from_other_scales() {
    for c in [0.3, 2.0] {
        let traj = integrate(&metric(c, c, c, SpaceKind::Su3), &FlowOptions::with_t_end(0.01)).unwrap();
        for p in &traj.points {
            for x in p.metric.x() {
                assert!((x - (c - 10.0 * p.t)).abs() <= 10.0 * (1e-10 * c + 1e-12));
            }
        }
    }
}

#[test]
fn trajectories_commute_with_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for kind in SpaceKind::ALL {
        for _ in 0..50 {
            let m0 = metric(
                random_coord(&mut rng),
                random_coord(&mut rng),
                random_coord(&mut rng),
                kind,
            );
            let opts = FlowOptions::with_t_end(safe_horizon(&m0));
            let base = integrate(&m0, &opts).unwrap();
            for p in Permutation::ALL {
                let moved = integrate(&m0.permuted(p), &opts).unwrap();
                let a = p.apply(base.last().metric.x());
                let b = moved.last().metric.x();
                for i in 0..3 {
                    assert!((a[i] - b[i]).abs() <= 1e-9 * a[i].abs().max(1.0), "{kind} {m0:?} {p:?}");
                }
            }
        }
    }
}

#[test]
fn equality_sets_and_strict_order_are_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in SpaceKind::ALL {
        for _ in 0..100 {
            let a = random_coord(&mut rng);
            let b = random_coord(&mut rng);
            for m0 in [metric(a, a, b, kind), metric(a, b, a, kind), metric(b, a, a, kind)] {
                let opts = FlowOptions {
                    record_stride: 1e-5,
                    ..FlowOptions::with_t_end(safe_horizon(&m0))
                };
                let traj = integrate(&m0, &opts).unwrap();
                let pair = match m0.x() {
                    [x, y, _] if x == y => (0, 1),
                    [x, _, z] if x == z => (0, 2),
                    _ => (1, 2),
                };
                for p in &traj.points {
                    let x = p.metric.x();
                    let norm = x.iter().fold(0.0f64, |s, v| s.max(*v));
                    assert!((x[pair.0] - x[pair.1]).abs() <= 1e-8 * norm);
                }
            }

            // x2 > x1 > x3
            let mut xs = [a, b, random_coord(&mut rng)];
            xs.sort_by(f64::total_cmp);
            if xs[0] == xs[1] || xs[1] == xs[2] {
                continue;
            }
            let m0 = metric(xs[1], xs[2], xs[0], kind);
            let traj = integrate(&m0, &FlowOptions::with_t_end(safe_horizon(&m0))).unwrap();
            for p in &traj.points {
                let [x1, x2, x3] = p.metric.x();
                assert!(x2 > x1 && x1 > x3, "{kind}: {:?} at t = {}", p.metric, p.t);
            }
        }
    }
}

#[test]
fn backward_flow_is_inverse_of_forward_flow() {
    let m0 = metric(1.0, 1.3, 0.6, SpaceKind::Sp3);
    let t = safe_horizon(&m0);
    let fwd = integrate(&m0, &FlowOptions::with_t_end(t)).unwrap();
    let back = integrate(&fwd.last().metric, &FlowOptions::with_t_end(-t)).unwrap();
    assert_eq!(back.last().t, -t);
    for i in 0..3 {
        assert!((back.last().metric.x()[i] - m0.x()[i]).abs() < 1e-8);
    }
}

#[test]
fn ratio_forward_difference_at_four_thirds() {
    for kind in SpaceKind::ALL {
        let d = f64::from(kind.d());
        // q'' reaches ~1e3 for d = 8, so the one-sided step must stay small
        let h = 1e-8;
        let trace = ratio_trace(&metric(1.0, 1.0, 4.0 / 3.0, kind), &FlowOptions::with_t_end(h)).unwrap();
        let (t0, q0) = trace[0];
        let (t1, q1) = *trace.last().unwrap();
        assert_eq!((t0, t1), (0.0, h));
        let slope = (q1 - q0) / h;
        let expected = 4.0 / 3.0 * (4.0 * d / 3.0 - 2.0);
        assert!((slope - expected).abs() < 1e-4, "{kind}: {slope} vs {expected}");
    }
}

#[test]
fn ratio_fixed_at_one() {
    for kind in SpaceKind::ALL {
        let trace = ratio_trace(&metric(2.0, 2.0, 2.0, kind), &FlowOptions::with_t_end(0.02)).unwrap();
        assert!(trace.iter().all(|(_, q)| (q - 1.0).abs() <= 1e-9));
    }
}

#[test]
fn ratio_moves_toward_attractor() {
    let kind = SpaceKind::Su3;
    let opts = FlowOptions {
        record_stride: 1e-4,
        ..FlowOptions::with_t_end(1.0)
    };
    let trace = ratio_trace(&metric(1.0, 1.0, 1.01, kind), &opts).unwrap();
    assert!(trace.len() > 10);
    for w in trace.windows(2) {
        assert!(w[1].1 > w[0].1, "q must increase: {:?}", w);
        assert!(w[1].1 < kind.attractor_ratio());
    }
}

#[test]
fn ratio_sign_law_on_equal_pair_slice() {
    for kind in SpaceKind::ALL {
        let a = kind.attractor_ratio();
        let regions = [(0.0, 1.0, -1.0), (1.0, a, 1.0), (a, a + 3.0, -1.0)];
        for (lo, hi, sign) in regions {
            for i in 0..100 {
                let q = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
                let m0 = metric(1.0, 1.0, q, kind);
                let h = 1e-6 * safe_horizon(&m0);
                let trace = ratio_trace(&m0, &FlowOptions::with_t_end(h)).unwrap();
                let dq = trace.last().unwrap().1 - trace[0].1;
                assert_eq!(dq.signum(), sign, "{kind} q = {q}: dq = {dq}");
                let predicted = ratio_derivative_equal_pair(q, q, kind).unwrap();
                assert_eq!(predicted.signum(), sign);
            }
        }
    }
}

#[test]
fn tighter_tolerance_reduces_global_error() {
    let m0 = metric(1.0, 1.4, 0.45, SpaceKind::Su3);
    let t_ext = integrate(&m0, &FlowOptions::with_t_end(10.0))
        .unwrap()
        .extinction
        .unwrap()
        .t_lo;
    let t_end = 0.9 * t_ext;
    let run = |tol: f64| {
        let opts = FlowOptions {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            max_step: 1.0,
            ..FlowOptions::with_t_end(t_end)
        };
        integrate(&m0, &opts).unwrap().last().metric.x()
    };
    let reference = run(1e-14);
    let err = |x: [f64; 3]| (0..3).map(|i| (x[i] - reference[i]).abs()).fold(0.0, f64::max);
    let coarse = err(run(1e-5));
    let fine = err(run(1e-7));
    assert!(coarse > 0.0);
    assert!(coarse / fine >= 4.0, "coarse {coarse:e} fine {fine:e}");
}

#[test]
fn sectional_transition_through_four_thirds() {
    for kind in SpaceKind::ALL {
        let m0 = metric(1.0, 1.0, 4.0 / 3.0, kind);
        let back = integrate(&m0, &FlowOptions::with_t_end(-0.01)).unwrap();
        let fwd = integrate(&m0, &FlowOptions::with_t_end(0.01)).unwrap();
        assert_eq!(back.last().sectional.tag, CurvatureTag::StrictlyPositive, "{kind}");
        assert_eq!(fwd.last().sectional.tag, CurvatureTag::Mixed, "{kind}");
    }
}

#[test]
fn events_near_four_thirds() {
    let m0 = metric(1.0, 1.0, 4.0 / 3.0 + 1e-3, SpaceKind::Su3);
    let monitors = [EventKind::RatioCrossesFourThirds, EventKind::SectionalClassChange];
    let back = detect_events(&m0, &FlowOptions::with_t_end(-0.01), &monitors).unwrap();
    let kinds: Vec<EventKind> = back.iter().map(|e| e.kind).collect();
    assert!(kinds.contains(&EventKind::RatioCrossesFourThirds));
    assert!(kinds.contains(&EventKind::SectionalClassChange));
    for e in &back {
        assert!(e.t_lo <= e.t_hi && e.t_hi - e.t_lo <= 1e-9);
        assert!(valiev_margin(&e.state_at_t_lo.metric) < 0.0);
        assert!(valiev_margin(&e.state_at_t_hi.metric) > 0.0);
    }
    let fwd = detect_events(&m0, &FlowOptions::with_t_end(0.01), &monitors).unwrap();
    assert!(fwd.is_empty());
}

#[test]
fn ricci_transition_below_threshold() {
    for kind in SpaceKind::ALL {
        let s = 0.1f64.min(critical_threshold(kind).unwrap() / 2.0);
        let m0 = metric(1.0, 1.0 + boundary_root(s, kind).unwrap() - 1e-6, s, kind);
        let d = kind.d();
        assert_eq!(ricci_signature(&m0), RicciSignature::new(3 * d, 0, 0));
        let (traj, events) = simulate(&m0, &FlowOptions::with_t_end(1e-3), &EventKind::MONITORS).unwrap();
        let first = events.first().expect("rho1 must cross zero");
        assert_eq!(first.kind, EventKind::RicciEigenvalueZero(1), "{kind}");
        assert!(first.state_at_t_lo.ricci.rho[0] > 0.0 && first.state_at_t_hi.ricci.rho[0] < 0.0);
        assert_eq!(traj.last().signature, RicciSignature::new(2 * d, 0, d));
    }
}

#[test]
fn diagonal_sp3_reports_only_extinction() {
    let events = detect_events(
        &metric(1.0, 1.0, 1.0, SpaceKind::Sp3),
        &FlowOptions::with_t_end(1.0),
        &EventKind::MONITORS,
    )
    .unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].kind, EventKind::Extinction);
}

#[test]
fn step_underflow_is_reported() {
    let opts = FlowOptions {
        rel_tol: 1e-16,
        abs_tol: 1e-300,
        min_step: 1e-3,
        max_step: 1e-2,
        ..FlowOptions::with_t_end(0.01)
    };
    let err = integrate(&metric(1.0, 1.7, 0.2, SpaceKind::F4), &opts).unwrap_err();
    assert!(matches!(err, Error::StepSizeUnderflow { .. }), "{err:?}");
    assert!(err.is_numerical());
}

#[test]
fn invalid_options_are_rejected() {
    let opts = FlowOptions {
        extinction_floor: -1.0,
        ..FlowOptions::default()
    };
    assert!(matches!(
        integrate(&metric(1.0, 1.0, 1.0, SpaceKind::Su3), &opts),
        Err(Error::InvalidOptions(_))
    ));
}

#[test]
fn recorded_points_are_reclassified() {
    let traj = integrate(&metric(1.0, 1.2, 0.5, SpaceKind::Su3), &FlowOptions::with_t_end(0.01)).unwrap();
    for p in &traj.points {
        assert_eq!(*p, TrajectoryPoint::at(p.t, p.metric));
    }
}
