//! Construction and application of the parameterized spreading operators
//! `⟨ρ, T, W⟩ = (T D_W)^(−1/2−ρ) (D_W − W) (D_W T)^(−1/2+ρ)`.
//!
//! `ρ` selects the basis: `−1/2` is the random-walk form, `0` the symmetric
//! form, `+1/2` the consensus form. The three are similar matrices, applied
//! here matrix-free in O(nnz) without densifying.

use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;
use crate::spectra::{self, SpectraError};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("vertex {vertex:?} has zero interaction degree; operators require d_W,i > 0")]
    ZeroDegree { vertex: String },
    #[error("delay factor {value} at vertex {vertex:?} is below 1; rescale the delay vector with normalize_delays first")]
    DelayTooSmall { vertex: String, value: f64 },
    #[error("delay factor {value} at position {index} must be positive and finite")]
    NonPositiveDelay { index: usize, value: f64 },
    #[error("expected a vector of length {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("bias {value} at position {index} must be strictly positive and finite")]
    NonPositiveBias { index: usize, value: f64 },
    #[error("vertex {vertex:?} has zero degree; d^beta bias with beta={beta} is undefined")]
    ZeroDegreeBias { vertex: String, beta: f64 },
    #[error("graph is disconnected; special-case operators require a connected graph (extract the giant component first)")]
    Disconnected,
    #[error("dominant eigenvector entry {value:.3e} at vertex {vertex:?} is below the positivity floor {floor:.3e}; pass a clamp value to proceed anyway")]
    ReplicatorPositivity { vertex: String, value: f64, floor: f64 },
    #[error("dense materialization limited to n <= {max}, graph has {n} vertices")]
    DenseTooLarge { n: usize, max: usize },
    #[error("rho must be -0.5, 0, or 0.5, found {0}")]
    BadRho(f64),
    #[error("operator configuration: {0}")]
    Config(String),
    #[error("delay file: {0}")]
    DelayFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Basis selector for the operator family. Only the three values the
/// centrality/conductance identities cover are representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rho {
    /// ρ = −1/2, the random-walk form `(D_W − W)(D_W T)^{-1}`.
    RandomWalk,
    /// ρ = 0, the symmetric form `(T D_W)^{-1/2}(D_W − W)(D_W T)^{-1/2}`.
    Symmetric,
    /// ρ = +1/2, the consensus form `(T D_W)^{-1}(D_W − W)`.
    Consensus,
}

impl Rho {
    pub fn value(self) -> f64 {
        match self {
            Rho::RandomWalk => -0.5,
            Rho::Symmetric => 0.0,
            Rho::Consensus => 0.5,
        }
    }

    pub fn try_from_value(x: f64) -> Result<Rho, OperatorError> {
        if x == -0.5 {
            Ok(Rho::RandomWalk)
        } else if x == 0.0 {
            Ok(Rho::Symmetric)
        } else if x == 0.5 {
            Ok(Rho::Consensus)
        } else {
            Err(OperatorError::BadRho(x))
        }
    }
}

impl Serialize for Rho {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Rho {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rho, D::Error> {
        let x = f64::deserialize(deserializer)?;
        Rho::try_from_value(x).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// A validated operator `⟨ρ, T, W⟩` with its derived degree data.
///
/// Immutable after construction; `apply` is pure and safe to call from many
/// threads on a shared instance.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    rho: Rho,
    w: Graph,
    t: Vec<f64>,
    d_w: Vec<f64>,
    dwt: Vec<f64>,
    sqrt_dwt: Vec<f64>,
}

impl OperatorSpec {
    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn rho(&self) -> Rho {
        self.rho
    }

    pub fn w(&self) -> &Graph {
        &self.w
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn d_w(&self) -> &[f64] {
        &self.d_w
    }

    /// Componentwise products d_W,i · τ_i (the generalized vertex volumes,
    /// also the centrality values).
    pub fn dwt(&self) -> &[f64] {
        &self.dwt
    }

    /// Componentwise √(d_W,i · τ_i); the unnormalized kernel vector of the
    /// symmetric form.
    pub fn sqrt_dwt(&self) -> &[f64] {
        &self.sqrt_dwt
    }

    /// Total generalized volume Σ_i d_W,i τ_i.
    pub fn volume_total(&self) -> f64 {
        self.dwt.iter().sum()
    }

    /// Same operator with a different basis tag (`W`, `T` unchanged).
    pub fn with_rho(&self, rho: Rho) -> OperatorSpec {
        let mut op = self.clone();
        op.rho = rho;
        op
    }

    /// `y = (D_W − W) z`, the common core of all three bases.
    fn apply_core(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.d_w[i] * z[i];
            for (j, wij) in self.w.neighbors(i) {
                acc -= wij * z[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Apply the operator in its own basis. O(nnz) and allocation-light.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        self.apply_in_basis(x, self.rho)
    }

    /// Apply the operator in an explicit basis, regardless of `self.rho()`.
    pub fn apply_in_basis(&self, x: &[f64], rho: Rho) -> Result<Vec<f64>, OperatorError> {
        let n = self.n();
        if x.len() != n {
            return Err(OperatorError::LengthMismatch { expected: n, found: x.len() });
        }
        match rho {
            Rho::RandomWalk => {
                let z: Vec<f64> = (0..n).map(|i| x[i] / self.dwt[i]).collect();
                Ok(self.apply_core(&z))
            }
            Rho::Symmetric => {
                let z: Vec<f64> = (0..n).map(|i| x[i] / self.sqrt_dwt[i]).collect();
                let mut y = self.apply_core(&z);
                for i in 0..n {
                    y[i] /= self.sqrt_dwt[i];
                }
                Ok(y)
            }
            Rho::Consensus => {
                let mut y = self.apply_core(x);
                for i in 0..n {
                    y[i] /= self.dwt[i];
                }
                Ok(y)
            }
        }
    }

    /// Column-sum norm ‖L‖₁ of the operator in the given basis, computed
    /// without materializing the matrix. Used to pick substep counts for the
    /// matrix exponential.
    pub fn one_norm(&self, rho: Rho) -> f64 {
        let n = self.n();
        let (pre, post): (Vec<f64>, Vec<f64>) = match rho {
            Rho::RandomWalk => ((0..n).map(|i| 1.0 / self.dwt[i]).collect(), vec![1.0; n]),
            Rho::Symmetric => (
                (0..n).map(|i| 1.0 / self.sqrt_dwt[i]).collect(),
                (0..n).map(|i| 1.0 / self.sqrt_dwt[i]).collect(),
            ),
            Rho::Consensus => (vec![1.0; n], (0..n).map(|i| 1.0 / self.dwt[i]).collect()),
        };
        // column j of L is post .* (D−W) e_j * pre[j]
        let mut best = 0.0f64;
        for j in 0..n {
            let mut col = post[j] * self.d_w[j];
            for (i, wij) in self.w.neighbors(j) {
                col += post[i] * wij;
            }
            best = best.max(col * pre[j]);
        }
        best
    }

    /// Dense row-major materialization of the operator in the given basis.
    /// A debug path for oracle tests; limited to n ≤ 200.
    pub fn to_dense(&self, rho: Rho) -> Result<Vec<f64>, OperatorError> {
        const MAX: usize = 200;
        let n = self.n();
        if n > MAX {
            return Err(OperatorError::DenseTooLarge { n, max: MAX });
        }
        let mut m = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply_in_basis(&e, rho)?;
            e[j] = 0.0;
            for i in 0..n {
                m[i * n + j] = col[i];
            }
        }
        Ok(m)
    }
}

/// Validate and assemble an operator from an interaction matrix, delay
/// factors, and a basis selector.
pub fn build_operator(w: Graph, t: Vec<f64>, rho: Rho) -> Result<OperatorSpec, OperatorError> {
    let n = w.n();
    if t.len() != n {
        return Err(OperatorError::LengthMismatch { expected: n, found: t.len() });
    }
    for i in 0..n {
        if w.degree(i) <= 0.0 {
            return Err(OperatorError::ZeroDegree { vertex: w.label(i).to_string() });
        }
        if !(t[i].is_finite() && t[i] >= 1.0) {
            return Err(OperatorError::DelayTooSmall { vertex: w.label(i).to_string(), value: t[i] });
        }
    }
    let d_w = w.degrees().to_vec();
    let dwt: Vec<f64> = (0..n).map(|i| d_w[i] * t[i]).collect();
    let sqrt_dwt: Vec<f64> = dwt.iter().map(|&x| x.sqrt()).collect();
    Ok(OperatorSpec { rho, w, t, d_w, dwt, sqrt_dwt })
}

/// Rescale raw positive delay factors so the minimum becomes exactly 1 and
/// ratios are preserved (divide by the minimum).
pub fn normalize_delays(t_raw: &[f64]) -> Result<Vec<f64>, OperatorError> {
    for (i, &x) in t_raw.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(OperatorError::NonPositiveDelay { index: i, value: x });
        }
    }
    let min = t_raw.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(t_raw.iter().map(|&x| x / min).collect())
}

/// `w_ij = b_i · a_ij · b_j`: symmetric reweighing by a per-vertex bias.
pub fn reweigh_bias(a: &Graph, b: &[f64]) -> Result<Graph, OperatorError> {
    if b.len() != a.n() {
        return Err(OperatorError::LengthMismatch { expected: a.n(), found: b.len() });
    }
    for (i, &x) in b.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(OperatorError::NonPositiveBias { index: i, value: x });
        }
    }
    Ok(a.map_weights(|i, j, w| b[i] * w * b[j]))
}

/// Power-law degree bias b_i = d_i^β.
pub fn degree_power_bias(a: &Graph, beta: f64) -> Result<Vec<f64>, OperatorError> {
    if beta < 0.0 {
        for i in 0..a.n() {
            if a.degree(i) == 0.0 {
                return Err(OperatorError::ZeroDegreeBias { vertex: a.label(i).to_string(), beta });
            }
        }
    }
    Ok(a.degrees().iter().map(|&d| d.powf(beta)).collect())
}

/// The four named operator constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialCase {
    /// W = A, T = I.
    NormalizedLaplacian,
    /// W = A, T = d_max·D_A^{-1}: delays inversely proportional to degree.
    ScaledLaplacian,
    /// W = V_A·A·V_A with V_A the dominant adjacency eigenvector, T = I.
    Replicator,
    /// W = D_A^{-1/2}·A·D_A^{-1/2}, T = d_W,max·D_W^{-1}.
    UnbiasedLaplacian,
}

impl SpecialCase {
    pub const ALL: [SpecialCase; 4] = [
        SpecialCase::NormalizedLaplacian,
        SpecialCase::ScaledLaplacian,
        SpecialCase::Replicator,
        SpecialCase::UnbiasedLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpecialCase::NormalizedLaplacian => "normalized_laplacian",
            SpecialCase::ScaledLaplacian => "scaled_laplacian",
            SpecialCase::Replicator => "replicator",
            SpecialCase::UnbiasedLaplacian => "unbiased_laplacian",
        }
    }
}

impl fmt::Display for SpecialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs for [`special_case`]. The replicator needs the dominant adjacency
/// eigenpair; it is solved much tighter than partitioning tolerances so the
/// degree identity d_W,i = λ_max·v_i² holds to high relative accuracy.
#[derive(Debug, Clone, Copy)]
pub struct SpecialCaseOptions {
    /// Opt-in clamp: dominant-eigenvector entries below this value are raised
    /// to it instead of failing the positivity check.
    pub replicator_clamp: Option<f64>,
    /// Relative residual tolerance for the dominant eigenpair.
    pub perron_tol: f64,
    /// Iteration cap for the dominant eigenpair; `None` means 10·n + 1000.
    pub perron_max_iter: Option<usize>,
}

impl Default for SpecialCaseOptions {
    fn default() -> Self {
        SpecialCaseOptions { replicator_clamp: None, perron_tol: 1e-13, perron_max_iter: None }
    }
}

/// Construct `(W, T)` for one of the named special cases.
/// Connectivity is required for every kind so the four stay comparable on the
/// same input (and the replicator's Perron vector exists at all).
pub fn special_case(
    a: &Graph,
    kind: SpecialCase,
    opts: &SpecialCaseOptions,
) -> Result<(Graph, Vec<f64>), OperatorError> {
    if !a.is_connected() {
        return Err(OperatorError::Disconnected);
    }
    let n = a.n();
    match kind {
        SpecialCase::NormalizedLaplacian => Ok((a.clone(), vec![1.0; n])),
        SpecialCase::ScaledLaplacian => {
            let dmax = a.max_degree();
            let t: Vec<f64> = a.degrees().iter().map(|&d| dmax / d).collect();
            Ok((a.clone(), t))
        }
        SpecialCase::Replicator => {
            let max_iter = opts.perron_max_iter.unwrap_or(10 * n + 1000);
            let eig = spectra::dominant_adjacency_eigenpair(a, opts.perron_tol, max_iter)?;
            let mut v = eig.eigenvector;
            let vmax = v.iter().cloned().fold(0.0, f64::max);
            let floor = 1e-12 * vmax;
            match opts.replicator_clamp {
                None => {
                    for (i, &x) in v.iter().enumerate() {
                        if x < floor {
                            return Err(OperatorError::ReplicatorPositivity {
                                vertex: a.label(i).to_string(),
                                value: x,
                                floor,
                            });
                        }
                    }
                }
                Some(eps) => {
                    for x in v.iter_mut() {
                        if *x < eps {
                            *x = eps;
                        }
                    }
                }
            }
            let w = reweigh_bias(a, &v)?;
            Ok((w, vec![1.0; n]))
        }
        SpecialCase::UnbiasedLaplacian => {
            let b = degree_power_bias(a, -0.5)?;
            let w = reweigh_bias(a, &b)?;
            let dwmax = w.max_degree();
            let t: Vec<f64> = w.degrees().iter().map(|&d| dwmax / d).collect();
            Ok((w, t))
        }
    }
}

/// Componentwise basis change: multiply by (d_W,i·τ_i)^(from − to).
/// A round trip returns the original vector within 1e−12.
pub fn change_basis(x: &[f64], from: Rho, to: Rho, op: &OperatorSpec) -> Vec<f64> {
    assert_eq!(x.len(), op.n(), "vector length does not match operator");
    let diff = ((from.value() - to.value()) * 2.0).round() as i32;
    let dwt = op.dwt();
    let sqrt = op.sqrt_dwt();
    match diff {
        -2 => x.iter().enumerate().map(|(i, &v)| v / dwt[i]).collect(),
        -1 => x.iter().enumerate().map(|(i, &v)| v / sqrt[i]).collect(),
        0 => x.to_vec(),
        1 => x.iter().enumerate().map(|(i, &v)| v * sqrt[i]).collect(),
        2 => x.iter().enumerate().map(|(i, &v)| v * dwt[i]).collect(),
        _ => unreachable!("rho values are restricted to multiples of 1/2"),
    }
}

/// JSON description of an operator, the `--ops` file entry format:
/// `{"kind": "...", "beta": 0.0, "rho": -0.5, "delays": {"mode": "...", "path": "..."}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub kind: ConfigKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_rho")]
    pub rho: Rho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delays: Option<DelaysConfig>,
}

fn default_rho() -> Rho {
    Rho::Symmetric
}

/// Operator kinds accepted in configuration files: the four named special
/// cases plus the degree-biased walk `W = B A B` with `b_i = d_i^β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    NormalizedLaplacian,
    ScaledLaplacian,
    Replicator,
    UnbiasedLaplacian,
    BiasedWalk,
}

impl ConfigKind {
    pub fn name(self) -> &'static str {
        match self {
            ConfigKind::NormalizedLaplacian => "normalized_laplacian",
            ConfigKind::ScaledLaplacian => "scaled_laplacian",
            ConfigKind::Replicator => "replicator",
            ConfigKind::UnbiasedLaplacian => "unbiased_laplacian",
            ConfigKind::BiasedWalk => "biased_walk",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DelaysConfig {
    pub mode: DelayMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMode {
    Identity,
    InverseDegree,
    File,
}

/// Read a `vertex value` delay file covering every vertex exactly once;
/// values are rescaled via [`normalize_delays`].
pub fn load_delay_file(w: &Graph, path: &Path) -> Result<Vec<f64>, OperatorError> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut raw = vec![f64::NAN; w.n()];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 2 {
            return Err(OperatorError::DelayFile(format!(
                "line {lineno}: expected `vertex value`, found {} tokens",
                tokens.len()
            )));
        }
        let idx = w.index_of(tokens[0]).ok_or_else(|| {
            OperatorError::DelayFile(format!("line {lineno}: unknown vertex {:?}", tokens[0]))
        })?;
        if !raw[idx].is_nan() {
            return Err(OperatorError::DelayFile(format!(
                "line {lineno}: vertex {:?} listed twice",
                tokens[0]
            )));
        }
        raw[idx] = tokens[1].parse::<f64>().map_err(|_| {
            OperatorError::DelayFile(format!("line {lineno}: unparsable value {:?}", tokens[1]))
        })?;
    }
    for i in 0..w.n() {
        if raw[i].is_nan() {
            return Err(OperatorError::DelayFile(format!(
                "vertex {:?} has no delay entry",
                w.label(i)
            )));
        }
    }
    normalize_delays(&raw)
}

/// Build an operator from a configuration entry against a loaded graph.
///
/// Custom delay vectors are only meaningful where the kind does not already
/// pin `T` (the normalized Laplacian and the biased walk); for the other
/// kinds a `delays` entry is a configuration error, as is `beta` outside
/// `biased_walk`.
pub fn build_from_config(
    a: &Graph,
    config: &OperatorConfig,
    opts: &SpecialCaseOptions,
    base_dir: &Path,
) -> Result<OperatorSpec, OperatorError> {
    if config.beta.is_some() && config.kind != ConfigKind::BiasedWalk {
        return Err(OperatorError::Config(format!(
            "beta only applies to kind \"biased_walk\", not {:?}",
            config.kind.name()
        )));
    }
    let delays_allowed =
        matches!(config.kind, ConfigKind::NormalizedLaplacian | ConfigKind::BiasedWalk);
    if config.delays.is_some() && !delays_allowed {
        return Err(OperatorError::Config(format!(
            "kind {:?} pins the delay vector; remove the delays entry",
            config.kind.name()
        )));
    }

    let resolve_delays = |w: &Graph| -> Result<Vec<f64>, OperatorError> {
        match &config.delays {
            None => Ok(vec![1.0; w.n()]),
            Some(d) => match d.mode {
                DelayMode::Identity => Ok(vec![1.0; w.n()]),
                DelayMode::InverseDegree => {
                    let raw: Vec<f64> = w.degrees().iter().map(|&x| 1.0 / x).collect();
                    normalize_delays(&raw)
                }
                DelayMode::File => {
                    let path = d.path.as_ref().ok_or_else(|| {
                        OperatorError::Config("delays mode \"file\" requires a path".to_string())
                    })?;
                    load_delay_file(w, &base_dir.join(path))
                }
            },
        }
    };

    let (w, t) = match config.kind {
        ConfigKind::NormalizedLaplacian => {
            if !a.is_connected() {
                return Err(OperatorError::Disconnected);
            }
            let t = resolve_delays(a)?;
            (a.clone(), t)
        }
        ConfigKind::ScaledLaplacian => special_case(a, SpecialCase::ScaledLaplacian, opts)?,
        ConfigKind::Replicator => special_case(a, SpecialCase::Replicator, opts)?,
        ConfigKind::UnbiasedLaplacian => special_case(a, SpecialCase::UnbiasedLaplacian, opts)?,
        ConfigKind::BiasedWalk => {
            if !a.is_connected() {
                return Err(OperatorError::Disconnected);
            }
            let beta = config.beta.unwrap_or(0.0);
            let b = degree_power_bias(a, beta)?;
            let w = reweigh_bias(a, &b)?;
            let t = resolve_delays(&w)?;
            (w, t)
        }
    };
    build_operator(w, t, config.rho)
}
