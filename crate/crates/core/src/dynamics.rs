//! Time evolution θ(t) = e^{−Lt}·θ(0) under a spreading operator, stationary
//! states, the conserved linear functional, and the two numerical
//! verification routines for the decay bounds: set-mass retention and
//! pairwise mixing.
//!
//! The exponential action is computed by scaling-and-stepping: the interval
//! is split into substeps short enough that ‖L‖₁·Δt ≤ 1, and each substep is
//! a truncated Taylor series evaluated with sparse matvecs only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexSet;
use crate::operators::{OperatorSpec, Rho};
use crate::partition::{self, PartitionError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("time must be finite and non-negative, got {0}")]
    BadTime(f64),
    #[error("substep minimum must be at least 1")]
    BadSteps,
    #[error("state vector is tagged rho={state_rho} but the operator uses rho={op_rho}; convert with change_basis first")]
    BasisMismatch { op_rho: f64, state_rho: f64 },
    #[error("expected a vector of length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state entry {value} at position {index} is not finite")]
    NonFinite { index: usize, value: f64 },
    #[error("state became non-finite during substep {step}")]
    Numeric { step: usize },
    #[error("operator is disconnected; stationary states and mixing bounds need one component (extract the giant component first)")]
    Disconnected,
    #[error("set volume {vol} exceeds half the total volume {limit}")]
    VolumeTooLarge { vol: f64, limit: f64 },
    #[error("retention needs a nonempty proper subset; got {card} of {n} vertices")]
    BadSet { card: usize, n: usize },
    #[error("time grid: {0}")]
    BadGrid(String),
    #[error("vertex index {index} out of range for {n} vertices")]
    BadVertex { index: usize, n: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A dynamical state: per-vertex values tagged with the basis they live in
/// and the time they were observed at.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub values: Vec<f64>,
    pub rho: Rho,
    pub t: f64,
}

impl StateVector {
    pub fn new(values: Vec<f64>, rho: Rho, t: f64) -> Result<StateVector, DynamicsError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(DynamicsError::BadTime(t));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(DynamicsError::NonFinite { index, value });
            }
        }
        Ok(StateVector { values, rho, t })
    }

    /// Point mass at one vertex at time zero.
    pub fn delta(n: usize, vertex: usize, rho: Rho) -> Result<StateVector, DynamicsError> {
        if vertex >= n {
            return Err(DynamicsError::BadVertex { index: vertex, n });
        }
        let mut values = vec![0.0; n];
        values[vertex] = 1.0;
        Ok(StateVector { values, rho, t: 0.0 })
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Per-vertex importance c_i = d_W,i·τ_i — the unnormalized stationary mass.
/// The values do not depend on the basis parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CentralityVector {
    pub values: Vec<f64>,
}

pub fn generalized_centrality(op: &OperatorSpec) -> CentralityVector {
    CentralityVector { values: op.dwt().to_vec() }
}

const TAYLOR_CUTOFF: f64 = 1e-18;
const TAYLOR_MAX_TERMS: usize = 60;

/// Core exponential stepper on raw values in an explicit basis.
fn evolve_values(
    op: &OperatorSpec,
    values: &[f64],
    basis: Rho,
    duration: f64,
    min_steps: usize,
) -> Result<Vec<f64>, DynamicsError> {
    let n = op.n();
    if values.len() != n {
        return Err(DynamicsError::LengthMismatch { expected: n, found: values.len() });
    }
    if duration == 0.0 {
        return Ok(values.to_vec());
    }
    let norm1 = op.one_norm(basis);
    let substeps = ((norm1 * duration).ceil() as usize).max(min_steps).max(1);
    let h = duration / substeps as f64;
    let mut current = values.to_vec();
    for step in 0..substeps {
        let mut acc = current.clone();
        let mut term = current.clone();
        for k in 1..=TAYLOR_MAX_TERMS {
            let lt = op.apply_in_basis(&term, basis).expect("sized to the operator");
            let scale = -h / k as f64;
            let mut term_max = 0.0f64;
            let mut acc_max = 0.0f64;
            for i in 0..n {
                term[i] = scale * lt[i];
                acc[i] += term[i];
                term_max = term_max.max(term[i].abs());
                acc_max = acc_max.max(acc[i].abs());
            }
            if term_max <= TAYLOR_CUTOFF * acc_max.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::Numeric { step });
        }
        current = acc;
    }
    Ok(current)
}

/// Advance a state by `t` time units. `steps` is a floor on the substep
/// count; more substeps are used automatically whenever ‖L‖₁·t demands it.
/// `t = 0` returns the input bit-for-bit.
pub fn evolve(
    op: &OperatorSpec,
    theta0: &StateVector,
    t: f64,
    steps: usize,
) -> Result<StateVector, DynamicsError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(DynamicsError::BadTime(t));
    }
    if steps < 1 {
        return Err(DynamicsError::BadSteps);
    }
    if theta0.rho != op.rho() {
        return Err(DynamicsError::BasisMismatch {
            op_rho: op.rho().value(),
            state_rho: theta0.rho.value(),
        });
    }
    let values = evolve_values(op, &theta0.values, theta0.rho, t, steps)?;
    Ok(StateVector { values, rho: theta0.rho, t: theta0.t + t })
}

/// The t→∞ limit of the dynamics.
///
/// Without a reference state the conventional normalizations are returned:
/// the unit-mass distribution d_W,iτ_i/Σ in the random-walk basis, the unit
/// vector √(d_W,iτ_i)/√Σ in the symmetric basis, and the constant 1/Σ in the
/// consensus basis. With `theta0` supplied the limit of its own trajectory is
/// returned instead: the stationary direction scaled so the conserved
/// projection matches `theta0`'s.
pub fn stationary_distribution(
    op: &OperatorSpec,
    theta0: Option<&StateVector>,
) -> Result<StateVector, DynamicsError> {
    if !op.w().is_connected() {
        return Err(DynamicsError::Disconnected);
    }
    let n = op.n();
    let dwt = op.dwt();
    let total = op.volume_total();
    let sqrt_total = total.sqrt();
    let values: Vec<f64> = match theta0 {
        None => match op.rho() {
            Rho::RandomWalk => dwt.iter().map(|&c| c / total).collect(),
            Rho::Symmetric => op.sqrt_dwt().iter().map(|&s| s / sqrt_total).collect(),
            Rho::Consensus => vec![1.0 / total; n],
        },
        Some(theta0) => {
            if theta0.values.len() != n {
                return Err(DynamicsError::LengthMismatch {
                    expected: n,
                    found: theta0.values.len(),
                });
            }
            let proj = conserved_projection(op, theta0);
            // the right stationary direction normalized against the conserved
            // functional, so proj · z is the exact trajectory limit
            match op.rho() {
                Rho::RandomWalk => dwt.iter().map(|&c| proj * c / sqrt_total).collect(),
                Rho::Symmetric => {
                    op.sqrt_dwt().iter().map(|&s| proj * s / sqrt_total).collect()
                }
                Rho::Consensus => vec![proj / sqrt_total; n],
            }
        }
    };
    Ok(StateVector { values, rho: op.rho(), t: f64::INFINITY })
}

/// The linear functional u₁ᵀθ that evolution preserves, with u₁ chosen per
/// basis: 1/√Σ in the random-walk basis, √(d_W τ)/√Σ in the symmetric basis,
/// and d_W τ/√Σ in the consensus basis.
pub fn conserved_projection(op: &OperatorSpec, theta: &StateVector) -> f64 {
    assert_eq!(theta.values.len(), op.n(), "state length does not match operator");
    assert_eq!(theta.rho, op.rho(), "state must be tagged with the operator's basis");
    let sqrt_total = op.volume_total().sqrt();
    let raw: f64 = match op.rho() {
        Rho::RandomWalk => theta.values.iter().sum(),
        Rho::Symmetric => {
            theta.values.iter().zip(op.sqrt_dwt().iter()).map(|(x, s)| x * s).sum()
        }
        Rho::Consensus => theta.values.iter().zip(op.dwt().iter()).map(|(x, c)| x * c).sum(),
    };
    raw / sqrt_total
}

/// One grid point of a verified inequality: the measured left side, the
/// bound, and whether the check passed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundEntry {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Outcome of [`retention_check`] on one vertex set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetentionReport {
    /// Conductance of the tested set (the decay-rate bound).
    pub h: f64,
    /// Generalized volume of the tested set.
    pub volume: f64,
    /// Exact initial derivative −cut/vol(S) of the retained mass.
    pub derivative_at_zero: f64,
    pub times: Vec<f64>,
    /// Retained mass Θ(t) at each grid time.
    pub theta: Vec<f64>,
    /// Finite-difference derivative checks between consecutive grid times
    /// (entry k spans times[k] → times[k+1]).
    pub entries: Vec<BoundEntry>,
    pub non_increasing: bool,
    pub pass: bool,
}

const RETENTION_MONOTONE_SLACK: f64 = 1e-9;
const RETENTION_DERIVATIVE_SLACK: f64 = 1e-6;

/// Track the total mass Θ(t) = Σ_{i∈S} θ_i(t) of the random-walk evolution
/// started from the volume-proportional distribution on S, and verify Θ never
/// increases and never decays faster than the conductance of S allows.
pub fn retention_check(
    op: &OperatorSpec,
    s: &VertexSet,
    t_grid: &[f64],
) -> Result<RetentionReport, DynamicsError> {
    let n = op.n();
    if s.cardinality() == 0 || s.cardinality() == n {
        return Err(DynamicsError::BadSet { card: s.cardinality(), n });
    }
    if t_grid.is_empty() {
        return Err(DynamicsError::BadGrid("grid must contain at least one time".into()));
    }
    for (k, &t) in t_grid.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(DynamicsError::BadGrid(format!("grid entry {k} is {t}")));
        }
        if k > 0 && t <= t_grid[k - 1] {
            return Err(DynamicsError::BadGrid(format!(
                "grid must be strictly increasing, entries {} and {k} are {} and {t}",
                k - 1,
                t_grid[k - 1]
            )));
        }
    }
    let dwt = op.dwt();
    let vol_s: f64 = s.iter().map(|i| dwt[i]).sum();
    let total = op.volume_total();
    if vol_s > total / 2.0 + 1e-12 {
        return Err(DynamicsError::VolumeTooLarge { vol: vol_s, limit: total / 2.0 });
    }
    let h = partition::generalized_conductance(op.w(), op.t(), s)?;
    let cut = h * vol_s;

    let mut values = vec![0.0; n];
    for i in s.iter() {
        values[i] = dwt[i] / vol_s;
    }
    let mut theta = Vec::with_capacity(t_grid.len());
    let mut cur_t = 0.0;
    for &t in t_grid {
        values = evolve_values(op, &values, Rho::RandomWalk, t - cur_t, 1)?;
        cur_t = t;
        theta.push(s.iter().map(|i| values[i]).sum::<f64>());
    }

    let mut entries = Vec::with_capacity(t_grid.len().saturating_sub(1));
    let mut non_increasing = true;
    for k in 0..t_grid.len() - 1 {
        let dt = t_grid[k + 1] - t_grid[k];
        let monotone = theta[k + 1] <= theta[k] + RETENTION_MONOTONE_SLACK;
        non_increasing &= monotone;
        let lhs = (theta[k + 1] - theta[k]).abs() / dt;
        let pass = monotone && lhs <= h + RETENTION_DERIVATIVE_SLACK;
        entries.push(BoundEntry { t: t_grid[k], lhs, rhs: h, pass });
    }
    let pass = non_increasing && entries.iter().all(|e| e.pass);
    Ok(RetentionReport {
        h,
        volume: vol_s,
        derivative_at_zero: -cut / vol_s,
        times: t_grid.to_vec(),
        theta,
        entries,
        non_increasing,
        pass,
    })
}

/// Outcome of [`mixing_bound_check`] for one vertex pair and time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingReport {
    pub t: f64,
    pub u: String,
    pub v: String,
    /// Minimum sweep conductance of the evolved state started at u.
    pub h_star_u: f64,
    /// Minimum sweep conductance of the evolved state started at v.
    pub h_star_v: f64,
    /// |θ_u(t)[v] − stationary[v]|.
    pub lhs: f64,
    /// (d_uτ_u·d_vτ_v)^{−1/2}·exp(−t(h*_u² + h*_v²)/4).
    pub rhs: f64,
    pub pass: bool,
}

impl MixingReport {
    pub fn entry(&self) -> BoundEntry {
        BoundEntry { t: self.t, lhs: self.lhs, rhs: self.rhs, pass: self.pass }
    }
}

const MIXING_SLACK: f64 = 1e-9;

fn sym_delta_state(op: &OperatorSpec, vertex: usize) -> Vec<f64> {
    let mut values = vec![0.0; op.n()];
    values[vertex] = 1.0 / op.sqrt_dwt()[vertex];
    values
}

fn h_star(op: &OperatorSpec, state: &[f64]) -> Result<f64, DynamicsError> {
    let scores: Vec<f64> =
        state.iter().zip(op.sqrt_dwt().iter()).map(|(x, s)| x / s).collect();
    let profile = partition::sweep_profile_from_scores(op, &scores)?;
    Ok(profile.best_h())
}

/// Verify the pointwise mixing bound at time `t` for the symmetric-basis
/// evolution started from the normalized indicator of `u`: the deviation of
/// component `v` from its stationary value must fall at the rate set by the
/// sweep conductances of the two evolving states (recomputed fresh at this
/// `t` for both endpoints).
pub fn mixing_bound_check(
    op: &OperatorSpec,
    u: usize,
    v: usize,
    t: f64,
) -> Result<MixingReport, DynamicsError> {
    let n = op.n();
    if u >= n {
        return Err(DynamicsError::BadVertex { index: u, n });
    }
    if v >= n {
        return Err(DynamicsError::BadVertex { index: v, n });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(DynamicsError::BadTime(t));
    }
    if !op.w().is_connected() {
        return Err(DynamicsError::Disconnected);
    }
    let dwt = op.dwt();
    let total = op.volume_total();

    let theta_u = evolve_values(op, &sym_delta_state(op, u), Rho::Symmetric, t, 1)?;
    let h_star_u = h_star(op, &theta_u)?;
    let h_star_v = if v == u {
        h_star_u
    } else {
        let theta_v = evolve_values(op, &sym_delta_state(op, v), Rho::Symmetric, t, 1)?;
        h_star(op, &theta_v)?
    };

    let stationary_v = dwt[v].sqrt() / total;
    let lhs = (theta_u[v] - stationary_v).abs();
    let rhs = (dwt[u] * dwt[v]).sqrt().recip()
        * (-t * (h_star_u * h_star_u + h_star_v * h_star_v) / 4.0).exp();
    Ok(MixingReport {
        t,
        u: op.w().label(u).to_string(),
        v: op.w().label(v).to_string(),
        h_star_u,
        h_star_v,
        lhs,
        rhs,
        pass: lhs <= rhs + MIXING_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::operators::{build_operator, change_basis, Rho};

    fn k2() -> Graph {
        Graph::from_unit_edges(2, &[(0, 1)]).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_unit_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn star4() -> Graph {
        Graph::from_unit_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn op_of(g: &Graph, t: Vec<f64>, rho: Rho) -> OperatorSpec {
        build_operator(g.clone(), t, rho).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let op = op_of(&p3(), vec![1.0, 2.0, 1.5], Rho::RandomWalk);
        let theta0 = StateVector::new(vec![0.25, 0.5, 0.25], Rho::RandomWalk, 0.0).unwrap();
        let out = evolve(&op, &theta0, 0.0, 1).unwrap();
        assert_eq!(out.values, theta0.values);
        assert_eq!(out.t, 0.0);
    }

    #[test]
    fn k2_matches_the_two_state_solution() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::RandomWalk);
        let theta0 = StateVector::delta(2, 0, Rho::RandomWalk).unwrap();
        for t in [0.3, 0.7, 2.0] {
            let out = evolve(&op, &theta0, t, 1).unwrap();
            let decay = (-2.0 * t).exp();
            assert!((out.values[0] - (1.0 + decay) / 2.0).abs() < 1e-12);
            assert!((out.values[1] - (1.0 - decay) / 2.0).abs() < 1e-12);
        }
        let out = evolve(&op, &theta0, 40.0, 1).unwrap();
        assert!((out.values[0] - 0.5).abs() < 1e-10);
        assert!((out.values[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn stationary_examples() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::RandomWalk);
        let pi = stationary_distribution(&op, None).unwrap();
        assert_eq!(pi.values, vec![0.5, 0.5]);

        let op = op_of(&star4(), vec![1.0; 4], Rho::RandomWalk);
        let pi = stationary_distribution(&op, None).unwrap();
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in pi.values.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn stationary_scales_with_the_conserved_projection() {
        let op = op_of(&p3(), vec![1.0, 2.0, 1.5], Rho::RandomWalk);
        let theta0 = StateVector::new(vec![0.9, 0.3, 1.8], Rho::RandomWalk, 0.0).unwrap();
        let limit = stationary_distribution(&op, Some(&theta0)).unwrap();
        let far = evolve(&op, &theta0, 200.0, 1).unwrap();
        for (a, b) in far.values.iter().zip(limit.values.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn stationary_state_is_a_fixed_point() {
        for rho in [Rho::RandomWalk, Rho::Symmetric, Rho::Consensus] {
            let op = op_of(&p3(), vec![1.0, 2.0, 1.5], rho);
            let pi = stationary_distribution(&op, None).unwrap();
            let residual = op.apply(&pi.values).unwrap();
            for v in residual {
                assert!(v.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn projection_examples() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::RandomWalk);
        let theta0 = StateVector::delta(2, 0, Rho::RandomWalk).unwrap();
        assert!((conserved_projection(&op, &theta0) - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);

        let zero = StateVector::new(vec![0.0, 0.0], Rho::RandomWalk, 0.0).unwrap();
        assert_eq!(conserved_projection(&op, &zero), 0.0);

        let op = op_of(&p3(), vec![1.0, 2.0, 1.5], Rho::Consensus);
        let ones = StateVector::new(vec![1.0; 3], Rho::Consensus, 0.0).unwrap();
        let total = op.volume_total();
        assert!((conserved_projection(&op, &ones) - total / total.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_is_conserved_along_trajectories() {
        let op = op_of(&p3(), vec![1.0, 2.0, 1.5], Rho::RandomWalk);
        let theta0 = StateVector::new(vec![0.2, -1.0, 2.5], Rho::RandomWalk, 0.0).unwrap();
        let before = conserved_projection(&op, &theta0);
        for t in [0.1, 1.0, 10.0] {
            let out = evolve(&op, &theta0, t, 1).unwrap();
            let after = conserved_projection(&op, &out);
            assert!((after - before).abs() <= 1e-10 * before.abs());
        }
    }

    #[test]
    fn bases_evolve_equivalently() {
        let g = p3();
        let t = vec![1.0, 2.0, 1.5];
        let op_rw = op_of(&g, t.clone(), Rho::RandomWalk);
        let op_sym = op_of(&g, t, Rho::Symmetric);
        let theta0 = StateVector::new(vec![1.0, 0.0, 0.5], Rho::RandomWalk, 0.0).unwrap();

        let evolved_rw = evolve(&op_rw, &theta0, 1.3, 1).unwrap();
        let converted_after =
            change_basis(&evolved_rw.values, Rho::RandomWalk, Rho::Symmetric, &op_rw);

        let converted_first =
            change_basis(&theta0.values, Rho::RandomWalk, Rho::Symmetric, &op_sym);
        let theta0_sym = StateVector::new(converted_first, Rho::Symmetric, 0.0).unwrap();
        let evolved_sym = evolve(&op_sym, &theta0_sym, 1.3, 1).unwrap();

        for (a, b) in converted_after.iter().zip(evolved_sym.values.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn basis_mismatch_is_rejected() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::RandomWalk);
        let theta0 = StateVector::delta(2, 0, Rho::Symmetric).unwrap();
        assert!(matches!(
            evolve(&op, &theta0, 1.0, 1),
            Err(DynamicsError::BasisMismatch { .. })
        ));
    }

    #[test]
    fn retention_on_k2_is_exact_at_zero() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::RandomWalk);
        let s = VertexSet::from_indices(2, [0].into_iter());
        let grid = [0.0, 0.25, 0.5, 1.0, 2.0];
        let report = retention_check(&op, &s, &grid).unwrap();
        assert_eq!(report.h, 1.0);
        assert_eq!(report.derivative_at_zero, -1.0);
        assert_eq!(report.theta[0], 1.0);
        assert!(report.non_increasing);
        assert!(report.pass);
    }

    #[test]
    fn retention_with_zero_cut_is_constant() {
        // two components; the tested set is one of them, so nothing leaks
        let g = Graph::from_unit_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let op = op_of(&g, vec![1.0; 4], Rho::RandomWalk);
        let s = VertexSet::from_indices(4, [0, 1].into_iter());
        let report = retention_check(&op, &s, &[0.0, 1.0, 5.0]).unwrap();
        assert_eq!(report.h, 0.0);
        for &th in &report.theta {
            assert!((th - 1.0).abs() < 1e-12);
        }
        assert!(report.pass);
    }

    #[test]
    fn retention_volume_precondition() {
        let op = op_of(&star4(), vec![1.0; 4], Rho::RandomWalk);
        let s = VertexSet::from_indices(4, [0, 1].into_iter());
        // vol(S) = 4 > 6/2
        assert!(matches!(
            retention_check(&op, &s, &[0.0, 1.0]),
            Err(DynamicsError::VolumeTooLarge { .. })
        ));
    }

    #[test]
    fn mixing_on_k2_matches_the_closed_form() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::Symmetric);
        let report = mixing_bound_check(&op, 0, 1, 1.0).unwrap();
        assert!((report.lhs - (-2.0f64).exp() / 2.0).abs() < 1e-10);
        assert_eq!(report.h_star_u, 1.0);
        assert_eq!(report.h_star_v, 1.0);
        assert!((report.rhs - (-0.5f64).exp()).abs() < 1e-10);
        assert!(report.pass);
    }

    #[test]
    fn mixing_at_zero_same_vertex() {
        let op = op_of(&k2(), vec![1.0, 1.0], Rho::Symmetric);
        let report = mixing_bound_check(&op, 0, 0, 0.0).unwrap();
        assert!((report.lhs - 0.5).abs() < 1e-12);
        assert!((report.rhs - 1.0).abs() < 1e-12);
        assert!(report.pass);
    }

    #[test]
    fn mixing_requires_connectivity() {
        let g = Graph::from_unit_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let op = op_of(&g, vec![1.0; 4], Rho::Symmetric);
        assert!(matches!(
            mixing_bound_check(&op, 0, 2, 1.0),
            Err(DynamicsError::Disconnected)
        ));
    }

    #[test]
    fn evolve_matches_dense_propagation() {
        use crate::dense::symmetric_eigen;
        let g = Graph::from_unit_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let t = vec![1.0, 3.0, 1.0, 2.0];
        let op = op_of(&g, t, Rho::Symmetric);
        let dense = op.to_dense(Rho::Symmetric).unwrap();
        let (vals, vecs) = symmetric_eigen(&dense, 4);
        let x0 = vec![1.0, -0.5, 0.25, 0.0];
        for t in [0.5, 2.0, 7.0] {
            let theta0 = StateVector::new(x0.clone(), Rho::Symmetric, 0.0).unwrap();
            let ours = evolve(&op, &theta0, t, 1).unwrap();
            let mut expect = vec![0.0; 4];
            for k in 0..4 {
                let coeff: f64 = (0..4).map(|i| vecs[k][i] * x0[i]).sum();
                let decay = (-vals[k] * t).exp();
                for i in 0..4 {
                    expect[i] += decay * coeff * vecs[k][i];
                }
            }
            for (a, b) in ours.values.iter().zip(expect.iter()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
