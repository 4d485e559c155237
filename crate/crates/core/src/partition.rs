//! Generalized conductance, the spectral sweep partitioner, a brute-force
//! oracle for small graphs, and the Cheeger-style certification report.
//!
//! The conductance of a vertex set S is `cut_W(S,S̄) / min(vol(S), vol(S̄))`
//! with volumes measured as Σ d_W,i·τ_i. The sweep partitioner sorts vertices
//! by `g_i = f_i/√(d_W,i·τ_i)` (f the second eigenvector in the symmetric
//! basis) and scans all prefixes with incremental cut/volume updates.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{cut_weight, generalized_volume, Graph, VertexSet};
use crate::operators::OperatorSpec;
use crate::spectra::EigenResult;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("conductance needs a nonempty proper subset; got {card} of {n} vertices")]
    NotProperSubset { card: usize, n: usize },
    #[error("smaller side has zero generalized volume")]
    ZeroVolume,
    #[error("expected a vector of length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exact search limited to n <= {max}, graph has {n} vertices")]
    TooLarge { n: usize, max: usize },
    #[error("sweep minimum {h:.12e} exceeds the certified bound {bound:.12e}; eigenpair and operator are inconsistent")]
    BoundViolated { h: f64, bound: f64 },
    #[error("graph/operator size mismatch: {graph_n} vs {op_n}")]
    SizeMismatch { graph_n: usize, op_n: usize },
}

/// `h(S) = cut_W(S,S̄) / min(vol(S), vol(S̄))` over the interaction weights
/// and per-vertex delays.
pub fn generalized_conductance(
    w: &Graph,
    t: &[f64],
    s: &VertexSet,
) -> Result<f64, PartitionError> {
    let n = w.n();
    if t.len() != n {
        return Err(PartitionError::LengthMismatch { expected: n, found: t.len() });
    }
    if s.cardinality() == 0 || s.cardinality() == n {
        return Err(PartitionError::NotProperSubset { card: s.cardinality(), n });
    }
    let cut = cut_weight(w, s);
    let vol_s = generalized_volume(w, t, s);
    let vol_sbar = generalized_volume(w, t, &s.complement());
    let denom = vol_s.min(vol_sbar);
    if denom <= 0.0 {
        return Err(PartitionError::ZeroVolume);
    }
    Ok(cut / denom)
}

/// Full record of one sweep: the vertex order and, for every prefix size
/// `k+1` with `k` indexing the arrays (sizes 1..n−1), the cut weight, both
/// side volumes, and the conductance value.
#[derive(Debug, Clone)]
pub struct SweepProfile {
    pub order: Vec<usize>,
    pub cut: Vec<f64>,
    pub vol_s: Vec<f64>,
    pub vol_sbar: Vec<f64>,
    pub h: Vec<f64>,
    /// Array index of the minimum h (smallest prefix on ties); the winning
    /// set is the first `argmin + 1` vertices of `order`.
    pub argmin: usize,
}

impl SweepProfile {
    pub fn best_prefix_size(&self) -> usize {
        self.argmin + 1
    }

    pub fn best_h(&self) -> f64 {
        self.h[self.argmin]
    }

    pub fn best_set(&self, n: usize) -> VertexSet {
        prefix_set(&self.order, self.argmin + 1, n)
    }

    pub fn prefix_set(&self, size: usize, n: usize) -> VertexSet {
        prefix_set(&self.order, size, n)
    }
}

fn prefix_set(order: &[usize], size: usize, n: usize) -> VertexSet {
    VertexSet::from_indices(n, order[..size].iter().cloned())
}

/// Run the prefix scan for an arbitrary score vector: vertices are sorted by
/// score descending (ties by ascending index) and every proper prefix is
/// evaluated with O(deg) incremental updates. The conductance bounds on the
/// evolving state vectors reuse this directly.
pub fn sweep_profile_from_scores(
    op: &OperatorSpec,
    scores: &[f64],
) -> Result<SweepProfile, PartitionError> {
    let n = op.n();
    if scores.len() != n {
        return Err(PartitionError::LengthMismatch { expected: n, found: scores.len() });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let w = op.w();
    let dwt = op.dwt();
    let vol_total = op.volume_total();
    let mut in_s = vec![false; n];
    let mut cut_acc = 0.0f64;
    let mut vol_acc = 0.0f64;
    let mut cut = Vec::with_capacity(n - 1);
    let mut vol_s = Vec::with_capacity(n - 1);
    let mut vol_sbar = Vec::with_capacity(n - 1);
    let mut h = Vec::with_capacity(n - 1);
    for (k, &v) in order.iter().enumerate() {
        for (u, wuv) in w.neighbors(v) {
            if in_s[u] {
                cut_acc -= wuv;
            } else {
                cut_acc += wuv;
            }
        }
        in_s[v] = true;
        vol_acc += dwt[v];
        if k + 1 == n {
            break;
        }
        let bar = vol_total - vol_acc;
        cut.push(cut_acc);
        vol_s.push(vol_acc);
        vol_sbar.push(bar);
        h.push(cut_acc / vol_acc.min(bar));
    }
    let mut argmin = 0;
    for k in 1..h.len() {
        if h[k] < h[argmin] {
            argmin = k;
        }
    }
    Ok(SweepProfile { order, cut, vol_s, vol_sbar, h, argmin })
}

/// A chosen bisection with the numbers that certify it.
#[derive(Debug, Clone)]
pub struct Partition {
    pub s: VertexSet,
    pub complement: VertexSet,
    pub h: f64,
    /// Free-form tag for reports (the CLI fills in the operator kind).
    pub operator: String,
    pub lambda2: f64,
    pub epsilon: f64,
}

/// Spectral sweep bisection from a second eigenpair (symmetric basis).
///
/// The returned minimum is checked against `√(2(1+ε)λ₂) + 1e−9`, which the
/// one-sided prefix scan is guaranteed to beat when the eigenpair really
/// belongs to the operator; a violation reports an error rather than a
/// partition.
pub fn sweep_partition(
    g: &Graph,
    op: &OperatorSpec,
    eig: &EigenResult,
) -> Result<(Partition, SweepProfile), PartitionError> {
    if g.n() != op.n() {
        return Err(PartitionError::SizeMismatch { graph_n: g.n(), op_n: op.n() });
    }
    let n = op.n();
    let sqrt_dwt = op.sqrt_dwt();
    if eig.eigenvector.len() != n {
        return Err(PartitionError::LengthMismatch { expected: n, found: eig.eigenvector.len() });
    }
    let scores: Vec<f64> = (0..n).map(|i| eig.eigenvector[i] / sqrt_dwt[i]).collect();
    let profile = sweep_profile_from_scores(op, &scores)?;
    let h = profile.best_h();
    let bound = (2.0 * (1.0 + eig.epsilon) * eig.eigenvalue).sqrt() + 1e-9;
    if h > bound {
        return Err(PartitionError::BoundViolated { h, bound });
    }
    let s = profile.best_set(n);
    let partition = Partition {
        complement: s.complement(),
        s,
        h,
        operator: format!("rho={:+.1}", op.rho().value()),
        lambda2: eig.eigenvalue,
        epsilon: eig.epsilon,
    };
    Ok((partition, profile))
}

/// Exact minimum conductance by enumerating every unordered bisection
/// (canonicalized to the side containing vertex 0). Ties resolve to the
/// lexicographically smallest vertex list, so results are reproducible.
pub fn brute_force_conductance(
    w: &Graph,
    t: &[f64],
    n_max: usize,
) -> Result<(f64, VertexSet), PartitionError> {
    let n = w.n();
    if n > n_max {
        return Err(PartitionError::TooLarge { n, max: n_max });
    }
    if t.len() != n {
        return Err(PartitionError::LengthMismatch { expected: n, found: t.len() });
    }
    let edges: Vec<(usize, usize, f64)> = w.edges().collect();
    let dwt: Vec<f64> = (0..n).map(|i| w.degree(i) * t[i]).collect();
    let vol_total: f64 = dwt.iter().sum();

    let mut best_h = f64::INFINITY;
    let mut best_members: Vec<usize> = Vec::new();
    // masks with bit 0 set, excluding the full set: each unordered bisection
    // exactly once
    let full: u64 = (1u64 << n) - 1;
    let mut mask: u64 = 1;
    while mask < full {
        let mut cut = 0.0;
        for &(u, v, wt) in &edges {
            if ((mask >> u) & 1) != ((mask >> v) & 1) {
                cut += wt;
            }
        }
        let mut vol_s = 0.0;
        for (i, &c) in dwt.iter().enumerate() {
            if (mask >> i) & 1 == 1 {
                vol_s += c;
            }
        }
        let h = cut / vol_s.min(vol_total - vol_s);
        if h < best_h {
            best_h = h;
            best_members = members_of(mask, n);
        } else if h == best_h {
            let members = members_of(mask, n);
            if members < best_members {
                best_members = members;
            }
        }
        mask += 2;
    }
    let set = VertexSet::from_indices(n, best_members.into_iter());
    Ok((best_h, set))
}

fn members_of(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| (mask >> i) & 1 == 1).collect()
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Timings {
    pub eigensolve_ms: f64,
    pub sweep_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_ms: Option<f64>,
}

/// The certification record: the spectral gap, the sweep value, the optional
/// exact optimum, and one boolean per inequality. All booleans are
/// recomputable from the stored numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerReport {
    pub lambda2: f64,
    pub h_sweep: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_exact: Option<f64>,
    pub epsilon: f64,
    /// φ²/2 ≤ λ₂ (only with the oracle value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_lower_ok: Option<bool>,
    /// λ₂ ≤ 2φ (only with the oracle value).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_upper_ok: Option<bool>,
    /// λ₂ ≤ 2·h_sweep.
    pub lambda_upper_ok: bool,
    /// h_sweep ≤ √(2(1+ε)λ₂).
    pub sweep_bound_ok: bool,
    pub pass: bool,
    pub timings: Timings,
}

impl CheegerReport {
    pub fn pass(&self) -> bool {
        self.pass
    }
}

const SLACK: f64 = 1e-9;

/// Evaluate the inequality sandwich for one run. Failures are report fields,
/// never errors; `timings` starts zeroed for the caller to fill.
pub fn cheeger_check(
    lambda2: f64,
    h_sweep: f64,
    phi_exact: Option<f64>,
    epsilon: f64,
) -> CheegerReport {
    assert!(lambda2 > 0.0, "spectral gap must be positive");
    let (phi_lower_ok, phi_upper_ok) = match phi_exact {
        Some(phi) => (
            Some(phi * phi / 2.0 <= lambda2 + SLACK),
            Some(lambda2 <= 2.0 * phi + SLACK),
        ),
        None => (None, None),
    };
    let lambda_upper_ok = lambda2 <= 2.0 * h_sweep + SLACK;
    let sweep_bound_ok = h_sweep <= (2.0 * (1.0 + epsilon) * lambda2).sqrt() + SLACK;
    let pass = phi_lower_ok.unwrap_or(true)
        && phi_upper_ok.unwrap_or(true)
        && lambda_upper_ok
        && sweep_bound_ok;
    CheegerReport {
        lambda2,
        h_sweep,
        phi_exact,
        epsilon,
        phi_lower_ok,
        phi_upper_ok,
        lambda_upper_ok,
        sweep_bound_ok,
        pass,
        timings: Timings::default(),
    }
}

/// Convenience wrapper timing the full solve → sweep → (optional oracle)
/// pipeline for one operator.
pub fn certify(
    g: &Graph,
    op: &OperatorSpec,
    tol: f64,
    max_iter: usize,
    oracle_max_n: Option<usize>,
) -> Result<(Partition, SweepProfile, CheegerReport), crate::spectra::SpectraError> {
    let t0 = Instant::now();
    let eig = crate::spectra::second_eigenpair(op, tol, max_iter)?;
    let eigensolve_ms = t0.elapsed().as_secs_f64() * 1e3;

    let t1 = Instant::now();
    let (partition, profile) = sweep_partition(g, op, &eig).expect("validated inputs");
    let sweep_ms = t1.elapsed().as_secs_f64() * 1e3;

    let mut oracle_ms = None;
    let phi = match oracle_max_n {
        Some(maxn) if g.n() <= maxn => {
            let t2 = Instant::now();
            let (phi, _) = brute_force_conductance(op.w(), op.t(), maxn)
                .expect("size checked against the cap");
            oracle_ms = Some(t2.elapsed().as_secs_f64() * 1e3);
            Some(phi)
        }
        _ => None,
    };
    let mut report = cheeger_check(eig.eigenvalue, partition.h, phi, eig.epsilon);
    report.timings = Timings { eigensolve_ms, sweep_ms, oracle_ms };
    Ok((partition, profile, report))
}
