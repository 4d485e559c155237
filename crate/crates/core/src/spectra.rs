//! Iterative eigensolvers for the two spectral quantities everything else
//! consumes: the dominant adjacency eigenpair (Perron vector, used by the
//! replicator construction) and the second-smallest eigenpair of the
//! symmetric operator form (used for sweep partitioning), together with the
//! ε-certificate that the conductance bounds are stated in terms of.
//!
//! Both solvers work matrix-free over the sparse matvec: a shifted power
//! iteration for the dominant pair and a kernel-deflated Lanczos iteration
//! for the second-smallest pair. Start vectors are fixed and deterministic,
//! so repeated runs give bit-identical results.

use thiserror::Error;

use crate::graph::Graph;
use crate::operators::{OperatorSpec, Rho};

/// Default relative residual target.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default iteration cap for an n-vertex solve.
pub fn default_max_iter(n: usize) -> usize {
    10 * n + 1000
}

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("graph is disconnected; spectral routines need a single component (extract the giant component first)")]
    Disconnected,
    #[error("no convergence after {iterations} iterations: residual {residual:.3e}, target {target:.3e}")]
    NoConvergence { iterations: usize, residual: f64, target: f64 },
    #[error("dominant eigenvector entry {value:.3e} at vertex {vertex:?} is not strictly positive")]
    NonPositiveEntry { vertex: String, value: f64 },
    #[error("second eigenvalue estimate {0:.3e} is numerically zero; the operator behaves as disconnected (extract the giant component first)")]
    VanishingGap(f64),
    #[error("zero vector supplied")]
    ZeroVector,
    #[error("reference eigenvalue {0} must be positive")]
    BadReference(f64),
}

/// Converged eigenpair estimate.
///
/// The eigenvector has unit 2-norm and, for [`second_eigenpair`], lives in
/// the symmetric basis and is orthogonal to the kernel direction v₁.
/// `epsilon` is the certified Rayleigh-quotient slack implied by the final
/// residual: the true eigenvalue is within `residual` of `eigenvalue`, so
/// RQ ≤ (1+ε)·λ with ε = residual/(eigenvalue − residual).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub epsilon: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Dominant eigenpair of the (weighted) adjacency matrix by shifted power
/// iteration. The shift `s = max degree` makes the spectrum of `A + sI`
/// non-negative, so the iteration cannot oscillate on bipartite graphs.
/// Deterministic: the start vector is the normalized all-ones vector.
pub fn dominant_adjacency_eigenpair(
    a: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult, SpectraError> {
    if !a.is_connected() {
        return Err(SpectraError::Disconnected);
    }
    let n = a.n();
    let s = a.max_degree();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    let mut last_target = 0.0;
    for it in 1..=max_iter {
        for i in 0..n {
            let mut acc = s * x[i];
            for (j, wij) in a.neighbors(i) {
                acc += wij * x[j];
            }
            y[i] = acc;
        }
        // x is unit, so xᵀ(A+sI)x − s is the Rayleigh quotient of A itself
        let lam = dot(&x, &y) - s;
        let shifted = lam + s;
        let mut rsq = 0.0;
        for i in 0..n {
            let d = y[i] - shifted * x[i];
            rsq += d * d;
        }
        let residual = rsq.sqrt();
        let target = tol * lam.abs();
        if residual <= target {
            for (i, &v) in x.iter().enumerate() {
                if v <= 0.0 {
                    return Err(SpectraError::NonPositiveEntry {
                        vertex: a.label(i).to_string(),
                        value: v,
                    });
                }
            }
            let epsilon = if lam > residual { residual / (lam - residual) } else { f64::INFINITY };
            return Ok(EigenResult {
                eigenvalue: lam,
                eigenvector: x,
                residual,
                iterations: it,
                epsilon,
            });
        }
        last_residual = residual;
        last_target = target;
        let ny = norm(&y);
        for i in 0..n {
            x[i] = y[i] / ny;
        }
    }
    Err(SpectraError::NoConvergence {
        iterations: max_iter,
        residual: last_residual,
        target: last_target,
    })
}

/// How often the tridiagonal Ritz problem is solved during the Lanczos run.
const RITZ_CHECK_EVERY: usize = 8;
/// Hard cap on the Krylov dimension (full reorthogonalization stores every
/// basis vector, so memory and the dense Ritz solve stay bounded).
const KRYLOV_CAP: usize = 400;

/// Fixed pseudorandom start for the Krylov iteration. Structured starts
/// (ramps, indicators) can be *exactly* orthogonal to the target eigenspace
/// on graphs with automorphisms, in which case the iteration converges to a
/// perfectly valid — but wrong — higher eigenpair that no residual test can
/// flag. A splitmix64-derived vector has no such alignment with any graph
/// eigenspace, and being pure integer arithmetic it is bit-identical across
/// platforms and runs, so determinism is kept.
fn seeded_start(n: usize) -> Vec<f64> {
    let mut state: u64 = 0x51ec_7ea1_0000_0000 ^ n as u64;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Second-smallest eigenpair of the symmetric operator form.
///
/// Lanczos iteration with full reorthogonalization, deflated against the
/// kernel direction v₁ = √(d_W τ)/‖·‖ at every step so the smallest Ritz
/// value converges to λ₂ rather than 0. Deterministic: starts from a fixed
/// seeded vector (see [`seeded_start`]) projected against v₁, with a fixed
/// check schedule. On graphs with at most [`KRYLOV_CAP`] vertices the Krylov
/// space can exhaust the complement of the kernel, so termination is exact
/// even when eigenvalues cluster. Converges when the residual falls below
/// `tol·min(1, λ₂)`, keeping it both absolutely and relatively below `tol`.
pub fn second_eigenpair(
    op: &OperatorSpec,
    tol: f64,
    max_iter: usize,
) -> Result<EigenResult, SpectraError> {
    if !op.w().is_connected() {
        return Err(SpectraError::Disconnected);
    }
    let n = op.n();
    let mut v1: Vec<f64> = op.sqrt_dwt().to_vec();
    let nv1 = norm(&v1);
    for v in v1.iter_mut() {
        *v /= nv1;
    }

    let mut q0 = seeded_start(n);
    project_out(&mut q0, &v1);
    let nq = norm(&q0);
    for v in q0.iter_mut() {
        *v /= nq;
    }

    let cap = (n - 1).min(max_iter).min(KRYLOV_CAP).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cap);
    basis.push(q0);
    let mut alphas: Vec<f64> = Vec::with_capacity(cap);
    let mut betas: Vec<f64> = Vec::with_capacity(cap);

    for j in 0.. {
        let qj = &basis[j];
        let mut w = op
            .apply_in_basis(qj, Rho::Symmetric)
            .expect("basis vector length matches the operator");
        let alpha = dot(qj, &w);
        alphas.push(alpha);
        for i in 0..n {
            w[i] -= alpha * qj[i];
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            let qprev = &basis[j - 1];
            for i in 0..n {
                w[i] -= beta_prev * qprev[i];
            }
        }
        // full reorthogonalization, twice, against the kernel and the whole
        // basis: keeps the recurrence honest when Ritz values converge early
        for _ in 0..2 {
            project_out(&mut w, &v1);
            for q in &basis {
                project_out(&mut w, q);
            }
        }
        let beta = norm(&w);
        let scale = alphas.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
            + betas.iter().fold(0.0f64, |a, &x| a.max(x));
        let breakdown = beta <= 1e-14 * scale.max(1.0);
        let exhausted = j + 1 >= cap || breakdown;
        if exhausted || (j + 1) % RITZ_CHECK_EVERY == 0 {
            let (theta, svec) = smallest_ritz_pair(&alphas, &betas);
            if theta <= 1e-12 {
                return Err(SpectraError::VanishingGap(theta));
            }
            let estimate = if exhausted { 0.0 } else { beta * svec[j].abs() };
            if exhausted || estimate <= tol * theta.min(1.0) {
                let mut y = vec![0.0; n];
                for (k, qk) in basis.iter().enumerate() {
                    let c = svec[k];
                    for i in 0..n {
                        y[i] += c * qk[i];
                    }
                }
                project_out(&mut y, &v1);
                let ny = norm(&y);
                for v in y.iter_mut() {
                    *v /= ny;
                }
                let ly = op
                    .apply_in_basis(&y, Rho::Symmetric)
                    .expect("candidate length matches the operator");
                let lam = dot(&y, &ly);
                if lam <= 1e-12 {
                    return Err(SpectraError::VanishingGap(lam));
                }
                let mut rsq = 0.0;
                for i in 0..n {
                    let d = ly[i] - lam * y[i];
                    rsq += d * d;
                }
                let residual = rsq.sqrt();
                let target = tol * lam.min(1.0);
                if residual <= target {
                    fix_sign(&mut y);
                    let epsilon =
                        if lam > residual { residual / (lam - residual) } else { f64::INFINITY };
                    return Ok(EigenResult {
                        eigenvalue: lam,
                        eigenvector: y,
                        residual,
                        iterations: j + 1,
                        epsilon,
                    });
                }
                if exhausted {
                    return Err(SpectraError::NoConvergence {
                        iterations: j + 1,
                        residual,
                        target,
                    });
                }
            }
        }
        betas.push(beta);
        let mut qnext = w;
        for v in qnext.iter_mut() {
            *v /= beta;
        }
        basis.push(qnext);
    }
    unreachable!("the exhaustion branch always returns")
}

/// Smallest eigenpair of the tridiagonal Lanczos matrix, via the dense
/// symmetric solver (the Krylov dimension stays small).
fn smallest_ritz_pair(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = vec![0.0; m * m];
    for (i, &a) in alphas.iter().enumerate() {
        t[i * m + i] = a;
    }
    for (i, &b) in betas.iter().take(m.saturating_sub(1)).enumerate() {
        t[i * m + i + 1] = b;
        t[(i + 1) * m + i] = b;
    }
    let (vals, vecs) = crate::dense::symmetric_eigen(&t, m);
    (vals[0], vecs[0].clone())
}

fn project_out(x: &mut [f64], unit: &[f64]) {
    let c = dot(x, unit);
    for i in 0..x.len() {
        x[i] -= c * unit[i];
    }
}

/// Flip the vector so the entry of largest magnitude is positive (first such
/// index on exact ties). Keeps solver output reproducible across runs.
fn fix_sign(x: &mut [f64]) {
    let mut imax = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[imax].abs() {
            imax = i;
        }
    }
    if x[imax] < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
}

/// Rayleigh quotient `(u·L^SYM u)/(u·u)` of the symmetric form, evaluated
/// matrix-free. Non-negative up to roundoff for any u.
pub fn rayleigh_quotient(op: &OperatorSpec, u: &[f64]) -> Result<f64, SpectraError> {
    assert_eq!(u.len(), op.n(), "vector length does not match operator");
    let uu = dot(u, u);
    if uu == 0.0 {
        return Err(SpectraError::ZeroVector);
    }
    let lu = op.apply_in_basis(u, Rho::Symmetric).expect("length checked above");
    Ok(dot(u, &lu) / uu)
}

/// Certified slack of a candidate second eigenvector: ε such that
/// `RQ(u) = (1+ε)·λ₂_ref`, clamped at 0. The input is projected against the
/// kernel direction first if it is not already orthogonal to it.
pub fn epsilon_certificate(
    op: &OperatorSpec,
    u: &[f64],
    lambda2_ref: f64,
) -> Result<f64, SpectraError> {
    assert_eq!(u.len(), op.n(), "vector length does not match operator");
    if lambda2_ref <= 0.0 {
        return Err(SpectraError::BadReference(lambda2_ref));
    }
    let mut v1: Vec<f64> = op.sqrt_dwt().to_vec();
    let nv1 = norm(&v1);
    for v in v1.iter_mut() {
        *v /= nv1;
    }
    let nu = norm(u);
    if nu == 0.0 {
        return Err(SpectraError::ZeroVector);
    }
    let mut work = u.to_vec();
    if dot(&work, &v1).abs() > 1e-8 * nu {
        project_out(&mut work, &v1);
        if norm(&work) == 0.0 {
            return Err(SpectraError::ZeroVector);
        }
    }
    let rq = rayleigh_quotient(op, &work)?;
    Ok((rq / lambda2_ref - 1.0).max(0.0))
}
