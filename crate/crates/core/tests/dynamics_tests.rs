//! Time-evolution checks: a dense matrix-exponential oracle on the corpus,
//! conservation and stationarity, basis equivalence, and the two verified
//! inequality reports.

mod common;

use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gendyn::dense::symmetric_eigen;
use gendyn::dynamics::{
    conserved_projection, evolve, generalized_centrality, mixing_bound_check, retention_check,
    stationary_distribution, DynamicsError, StateVector,
};
use gendyn::graph::VertexSet;
use gendyn::operators::{change_basis, Rho};

const BASES: [Rho; 3] = [Rho::RandomWalk, Rho::Symmetric, Rho::Consensus];

fn random_state(n: usize, seed: u64, rho: Rho) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    StateVector::new(values, rho, 0.0).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// exp(−tL) from the dense eigendecomposition of the symmetric form.
fn dense_evolution(op: &gendyn::operators::OperatorSpec, x: &[f64], t: f64) -> Vec<f64> {
    let n = op.n();
    let dense = op.to_dense(Rho::Symmetric).unwrap();
    let (values, vectors) = symmetric_eigen(&dense, n);
    let mut out = vec![0.0; n];
    for k in 0..n {
        let coef: f64 = (0..n).map(|i| vectors[k][i] * x[i]).sum();
        let decay = (-t * values[k]).exp();
        for i in 0..n {
            out[i] += decay * coef * vectors[k][i];
        }
    }
    out
}

#[test]
fn corpus_evolution_matches_dense_exponential() {
    for (gi, g) in common::corpus().iter().enumerate().take(15) {
        for op in common::all_special_ops(g) {
            let theta0 = random_state(g.n(), 0x6000 + gi as u64, Rho::Symmetric);
            for &t in &[0.3, 1.7] {
                let fast = evolve(&op, &theta0, t, 1).unwrap();
                let oracle = dense_evolution(&op, &theta0.values, t);
                let err = max_abs_diff(&fast.values, &oracle);
                assert!(err <= 1e-8, "graph {gi} t={t}: max deviation {err}");
            }
        }
    }
}

#[test]
fn evolution_conserves_the_projection() {
    for (gi, g) in common::corpus().iter().enumerate().take(20) {
        let base = &common::all_special_ops(g)[gi % 4];
        for &rho in &BASES {
            let op = base.with_rho(rho);
            let theta0 = random_state(g.n(), 0x7000 + gi as u64, rho);
            let p0 = conserved_projection(&op, &theta0);
            for &t in &[0.1, 1.0, 10.0] {
                let theta = evolve(&op, &theta0, t, 1).unwrap();
                let p = conserved_projection(&op, &theta);
                assert!(
                    (p - p0).abs() <= 1e-10 * p0.abs().max(1.0),
                    "graph {gi} {rho:?} t={t}: drift {} from {p0}",
                    (p - p0).abs()
                );
            }
        }
    }
}

/// The same trajectory seen from all three bases: evolve in basis ρ, map to
/// the symmetric picture, and compare against evolving there directly.
#[test]
fn bases_evolve_equivalently() {
    for (gi, g) in common::corpus().iter().enumerate().take(10) {
        let sym = &common::all_special_ops(g)[0];
        let theta_sym = random_state(g.n(), 0x8000 + gi as u64, Rho::Symmetric);
        let t = 1.3;
        let reference = evolve(sym, &theta_sym, t, 1).unwrap();
        for &rho in &[Rho::RandomWalk, Rho::Consensus] {
            let op = sym.with_rho(rho);
            let start = StateVector::new(
                change_basis(&theta_sym.values, Rho::Symmetric, rho, sym),
                rho,
                0.0,
            )
            .unwrap();
            let moved = evolve(&op, &start, t, 1).unwrap();
            let back = change_basis(&moved.values, rho, Rho::Symmetric, sym);
            let err = max_abs_diff(&back, &reference.values);
            assert!(err <= 1e-8, "graph {gi} {rho:?}: bases disagree by {err}");
        }
    }
}

/// Long-time limits land on the stationary state predicted from the initial
/// condition alone.
#[test]
fn trajectories_reach_their_declared_limit() {
    for (gi, g) in common::corpus().iter().enumerate().take(10) {
        for op_sym in [&common::all_special_ops(g)[0], &common::all_special_ops(g)[2]] {
            let op = op_sym.with_rho(Rho::RandomWalk);
            let theta0 = random_state(g.n(), 0x9000 + gi as u64, Rho::RandomWalk);
            let limit = stationary_distribution(&op, Some(&theta0)).unwrap();
            let lambda2 = common::solve_second(op_sym).eigenvalue;
            let t = (25.0 / lambda2).min(600.0);
            let late = evolve(&op, &theta0, t, 1).unwrap();
            let err = max_abs_diff(&late.values, &limit.values);
            assert!(err <= 1e-8, "graph {gi}: residual distance {err} at t={t}");
        }
    }
}

#[test]
fn stationary_states_are_fixed_points() {
    for (gi, g) in common::corpus().iter().enumerate().take(10) {
        let base = &common::all_special_ops(g)[gi % 4];
        for &rho in &BASES {
            let op = base.with_rho(rho);
            let pi = stationary_distribution(&op, None).unwrap();
            let moved = evolve(&op, &StateVector::new(pi.values.clone(), rho, 0.0).unwrap(), 3.0, 1)
                .unwrap();
            let err = max_abs_diff(&moved.values, &pi.values);
            assert!(err <= 1e-10, "graph {gi} {rho:?}: stationary drifted {err}");
        }
    }
}

#[test]
fn centrality_is_the_generalized_degree() {
    let g = common::karate();
    for op in common::all_special_ops(&g) {
        let c = generalized_centrality(&op);
        assert_eq!(c.values, op.dwt().to_vec());
    }
    // With unit delays the most central karate vertex is the one of highest
    // degree (the instructor, label "33", degree 17).
    let op = &common::all_special_ops(&g)[0];
    let c = generalized_centrality(op);
    let top = (0..g.n()).max_by(|&a, &b| c.values[a].total_cmp(&c.values[b])).unwrap();
    assert_eq!(g.label(top), "33");
    assert_eq!(c.values[top], 17.0);
}

/// Random sets below half volume must satisfy both retention clauses on a
/// uniform grid, for every named operator.
#[test]
fn retention_bound_holds_on_corpus() {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
    for (gi, g) in common::corpus().iter().enumerate().take(20) {
        for op_sym in common::all_special_ops(g) {
            let op = op_sym.with_rho(Rho::RandomWalk);
            let dwt = op.dwt();
            let half: f64 = op.volume_total() / 2.0;
            let mut order: Vec<usize> = (0..g.n()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0xa000 + gi as u64);
            order.shuffle(&mut rng);
            let mut s = VertexSet::new(g.n());
            let mut vol = 0.0;
            for &i in &order {
                if vol + dwt[i] <= half && s.cardinality() + 1 < g.n() {
                    s.insert(i);
                    vol += dwt[i];
                }
            }
            if s.cardinality() == 0 {
                let min = (0..g.n()).min_by(|&a, &b| dwt[a].total_cmp(&dwt[b])).unwrap();
                s.insert(min);
            }
            let report = retention_check(&op, &s, &grid).unwrap();
            assert!(report.non_increasing, "graph {gi}: retention grew");
            assert!(report.pass, "graph {gi}: {report:?}");
            assert!(report.theta[0] <= 1.0 + 1e-12);
            common::assert_close(
                report.derivative_at_zero,
                -report.h,
                1e-12,
                "initial slope is minus the conductance",
            );
        }
    }
}

#[test]
fn mixing_bound_holds_on_corpus() {
    for (gi, g) in common::corpus().iter().enumerate().take(15) {
        let ops = common::all_special_ops(g);
        for op in &ops[..2] {
            let u = 0;
            let v = g.n() / 2;
            for &t in &[0.5, 2.0] {
                let report = mixing_bound_check(op, u, v, t).unwrap();
                assert!(
                    report.pass,
                    "graph {gi} t={t}: lhs {} vs rhs {}",
                    report.lhs, report.rhs
                );
                assert!(report.h_star_u >= 0.0 && report.h_star_v >= 0.0);
            }
        }
    }
}

#[test]
fn input_validation_errors() {
    let g = common::path_graph(3);
    let op = common::all_special_ops(&g)[0].with_rho(Rho::RandomWalk);
    let theta = random_state(3, 1, Rho::RandomWalk);

    assert!(matches!(evolve(&op, &theta, -1.0, 1), Err(DynamicsError::BadTime(_))));
    assert!(matches!(evolve(&op, &theta, f64::NAN, 1), Err(DynamicsError::BadTime(_))));
    assert!(matches!(evolve(&op, &theta, 1.0, 0), Err(DynamicsError::BadSteps)));

    let sym_state = random_state(3, 2, Rho::Symmetric);
    assert!(matches!(evolve(&op, &sym_state, 1.0, 1), Err(DynamicsError::BasisMismatch { .. })));

    assert!(matches!(
        StateVector::new(vec![1.0, f64::INFINITY, 0.0], Rho::RandomWalk, 0.0),
        Err(DynamicsError::NonFinite { index: 1, .. })
    ));

    let empty = VertexSet::new(3);
    assert!(matches!(
        retention_check(&op, &empty, &[0.0, 1.0]),
        Err(DynamicsError::BadSet { card: 0, .. })
    ));
    let all = VertexSet::from_indices(3, 0..3);
    assert!(matches!(
        retention_check(&op, &all, &[0.0, 1.0]),
        Err(DynamicsError::BadSet { card: 3, .. })
    ));

    // {0,1} on P3 holds volume 3 of 4 — more than half.
    let heavy = VertexSet::from_indices(3, [0, 1]);
    assert!(matches!(
        retention_check(&op, &heavy, &[0.0, 1.0]),
        Err(DynamicsError::VolumeTooLarge { .. })
    ));

    let light = VertexSet::from_indices(3, [0]);
    assert!(matches!(
        retention_check(&op, &light, &[0.0, 1.0, 0.5]),
        Err(DynamicsError::BadGrid(_))
    ));
    assert!(matches!(
        retention_check(&op, &light, &[]),
        Err(DynamicsError::BadGrid(_))
    ));

    assert!(matches!(
        mixing_bound_check(&op, 9, 0, 1.0),
        Err(DynamicsError::BadVertex { index: 9, .. })
    ));
    assert!(matches!(mixing_bound_check(&op, 0, 1, -2.0), Err(DynamicsError::BadTime(_))));
}

#[test]
fn delta_states_are_unit_mass() {
    let delta = StateVector::delta(5, 2, Rho::RandomWalk).unwrap();
    assert_eq!(delta.values, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    assert_eq!(delta.sum(), 1.0);
    assert_eq!(delta.rho, Rho::RandomWalk);
    assert_eq!(delta.t, 0.0);
    assert!(matches!(
        StateVector::delta(5, 7, Rho::Symmetric),
        Err(DynamicsError::BadVertex { index: 7, n: 5 })
    ));
}

/// t = 0 must return the input bit-for-bit, whatever the basis.
#[test]
fn zero_time_is_the_identity() {
    let g = common::cycle_graph(5);
    for &rho in &BASES {
        let op = common::all_special_ops(&g)[1].with_rho(rho);
        let theta = random_state(5, 99, rho);
        let out = evolve(&op, &theta, 0.0, 1).unwrap();
        assert_eq!(theta.values, out.values);
    }
}

#[test]
fn two_state_graph_matches_the_closed_form() {
    let g = common::complete_graph(2);
    let op = common::all_special_ops(&g)[0].with_rho(Rho::RandomWalk);
    let theta0 = StateVector::delta(2, 0, Rho::RandomWalk).unwrap();
    for &t in &[0.25, 1.0, 3.5] {
        let theta = evolve(&op, &theta0, t, 1).unwrap();
        // two symmetric states exchange mass at unit rate: the gap decays as
        // e^{−2t} around the (1/2, 1/2) limit
        let expected0 = 0.5 + 0.5 * (-2.0 * t).exp();
        common::assert_close(theta.values[0], expected0, 1e-12, "K2 occupancy");
        common::assert_close(theta.values[1], 1.0 - expected0, 1e-12, "K2 complement");
    }
}
