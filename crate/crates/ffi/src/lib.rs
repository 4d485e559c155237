//! C bindings for the gendyn spreading-operator library.
//!
//! Conventions, mirrored in the generated `include/gendyn_ffi.h`:
//!
//! - [`GdGraph`] and [`GdOperator`] are opaque heap handles. Create them with
//!   the constructor functions, free them exactly once with the matching
//!   `*_free`, and never dereference them from C.
//! - Every fallible function returns a [`GdStatus`]. Anything other than
//!   `GD_STATUS_OK` leaves a human-readable message in thread-local storage,
//!   readable via [`gd_last_error_message`].
//! - Output buffers are caller-allocated. Unless documented otherwise their
//!   required length is `gd_graph_vertex_count` / `gd_operator_order`
//!   elements. Nullable outputs are marked as such and simply skipped.
//! - Panics cannot cross the boundary: they are caught and reported as
//!   `GD_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use gendyn::dynamics::{self, DynamicsError, StateVector};
use gendyn::graph::{self, Graph, GraphError, LoadOptions};
use gendyn::operators::{
    build_operator, special_case, OperatorError, OperatorSpec, Rho, SpecialCase,
    SpecialCaseOptions,
};
use gendyn::partition;
use gendyn::spectra::{self, SpectraError};

/// Status code returned by every fallible function in this interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was structurally valid but semantically rejected
    /// (bad ρ, zero steps, vertex out of range, ...).
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    Utf8 = 3,
    /// The underlying file could not be opened or read.
    Io = 4,
    /// The edge-list file was readable but malformed.
    Parse = 5,
    /// The graph is not connected (and no component extraction was asked for).
    Disconnected = 6,
    /// The iterative eigensolver failed to converge.
    Solver = 7,
    /// A panic was caught at the language boundary; state may be stale but
    /// memory is intact.
    Panic = 8,
}

/// The four named operator constructions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdSpecialCase {
    NormalizedLaplacian = 0,
    ScaledLaplacian = 1,
    Replicator = 2,
    UnbiasedLaplacian = 3,
}

impl From<GdSpecialCase> for SpecialCase {
    fn from(kind: GdSpecialCase) -> SpecialCase {
        match kind {
            GdSpecialCase::NormalizedLaplacian => SpecialCase::NormalizedLaplacian,
            GdSpecialCase::ScaledLaplacian => SpecialCase::ScaledLaplacian,
            GdSpecialCase::Replicator => SpecialCase::Replicator,
            GdSpecialCase::UnbiasedLaplacian => SpecialCase::UnbiasedLaplacian,
        }
    }
}

/// Opaque handle around a loaded graph.
pub struct GdGraph {
    inner: Graph,
}

/// Opaque handle around a built spreading operator.
pub struct GdOperator {
    inner: OperatorSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: GdStatus, message: impl std::fmt::Display) -> GdStatus {
    let mut text = message.to_string().into_bytes();
    text.retain(|&b| b != 0);
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).unwrap_or_default());
    status
}

fn guard(body: impl FnOnce() -> GdStatus) -> GdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(GdStatus::Panic, "internal panic caught at the C boundary"),
    }
}

fn graph_status(e: &GraphError) -> GdStatus {
    match e {
        GraphError::Io(_) => GdStatus::Io,
        GraphError::Empty | GraphError::IndexOutOfRange { .. } => GdStatus::InvalidArgument,
        _ => GdStatus::Parse,
    }
}

fn operator_status(e: &OperatorError) -> GdStatus {
    match e {
        OperatorError::Disconnected => GdStatus::Disconnected,
        _ => GdStatus::InvalidArgument,
    }
}

fn spectra_status(e: &SpectraError) -> GdStatus {
    match e {
        SpectraError::Disconnected => GdStatus::Disconnected,
        _ => GdStatus::Solver,
    }
}

fn dynamics_status(e: &DynamicsError) -> GdStatus {
    match e {
        DynamicsError::Disconnected => GdStatus::Disconnected,
        _ => GdStatus::InvalidArgument,
    }
}

fn rho_from(value: f64) -> Result<Rho, GdStatus> {
    Rho::try_from_value(value).map_err(|e| fail(GdStatus::InvalidArgument, e))
}

/// Library version as a static NUL-terminated string. Never null; do not
/// free.
#[no_mangle]
pub extern "C" fn gd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread, empty
/// if nothing failed yet. The pointer stays valid until the next failing
/// call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn gd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Load a whitespace-separated edge list (`u v [w]` per line, `#` comments)
/// from `path`. With `keep_giant_component` set, a disconnected input is
/// reduced to its largest connected component instead of being kept as-is.
///
/// On success `*out` owns the graph; free it with [`gd_graph_free`].
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` to a writable
/// pointer slot; both must stay valid for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_load(
    path: *const c_char,
    keep_giant_component: bool,
    out: *mut *mut GdGraph,
) -> GdStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(GdStatus::NullArgument, "path and out must be non-null");
        }
        unsafe { *out = std::ptr::null_mut() };
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(s) => s,
            Err(e) => return fail(GdStatus::Utf8, format!("path is not UTF-8: {e}")),
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => return fail(GdStatus::Io, format!("open {path}: {e}")),
        };
        let loaded = graph::load_edge_list(BufReader::new(file), LoadOptions::default());
        let g = match loaded {
            Ok(g) => g,
            Err(e) => return fail(graph_status(&e), e),
        };
        let g = if keep_giant_component {
            match graph::giant_component(&g) {
                Ok(g) => g,
                Err(e) => return fail(graph_status(&e), e),
            }
        } else {
            g
        };
        unsafe { *out = Box::into_raw(Box::new(GdGraph { inner: g })) };
        GdStatus::Ok
    })
}

/// Build a graph from parallel edge arrays. Vertex ids become decimal
/// labels; the vertex count is `1 + max(id)`. `weights` may be null, in
/// which case every edge has weight 1. Self-loops, non-positive weights and
/// an empty edge set are rejected; duplicate edges accumulate.
///
/// # Safety
/// `sources` and `targets` must point to `n_edges` readable elements,
/// `weights` to `n_edges` readable doubles or be null, and `out` to a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_from_edges(
    n_edges: usize,
    sources: *const u32,
    targets: *const u32,
    weights: *const f64,
    out: *mut *mut GdGraph,
) -> GdStatus {
    guard(|| {
        if out.is_null() || (n_edges > 0 && (sources.is_null() || targets.is_null())) {
            return fail(GdStatus::NullArgument, "sources, targets and out must be non-null");
        }
        unsafe { *out = std::ptr::null_mut() };
        if n_edges == 0 {
            return fail(GdStatus::InvalidArgument, "graph has no vertices");
        }
        let src = unsafe { std::slice::from_raw_parts(sources, n_edges) };
        let dst = unsafe { std::slice::from_raw_parts(targets, n_edges) };
        let mut edges = Vec::with_capacity(n_edges);
        let mut n = 0usize;
        for k in 0..n_edges {
            let (u, v) = (src[k] as usize, dst[k] as usize);
            let w = if weights.is_null() { 1.0 } else { unsafe { *weights.add(k) } };
            n = n.max(u + 1).max(v + 1);
            edges.push((u, v, w));
        }
        // accumulate duplicates before Graph::build, which rejects them
        let mut acc: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for &(u, v, w) in &edges {
            *acc.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let merged: Vec<(usize, usize, f64)> =
            acc.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        let labels = (0..n).map(|i| i.to_string()).collect();
        match Graph::build(labels, &merged) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(GdGraph { inner: g })) };
                GdStatus::Ok
            }
            Err(e) => fail(GdStatus::InvalidArgument, e),
        }
    })
}

/// Free a graph handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a pointer obtained from a `gd_graph_*` constructor
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_free(g: *mut GdGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_vertex_count(g: *const GdGraph) -> usize {
    if g.is_null() {
        0
    } else {
        unsafe { &*g }.inner.n()
    }
}

/// Number of undirected edges, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_edge_count(g: *const GdGraph) -> usize {
    if g.is_null() {
        0
    } else {
        unsafe { &*g }.inner.edge_count()
    }
}

/// Copy the label of `vertex` into `buffer` as a NUL-terminated string.
/// Fails with `GD_STATUS_INVALID_ARGUMENT` when the vertex is out of range
/// or `capacity` is too small for the label plus terminator.
///
/// # Safety
/// `buffer` must point to `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gd_graph_vertex_label(
    g: *const GdGraph,
    vertex: usize,
    buffer: *mut c_char,
    capacity: usize,
) -> GdStatus {
    guard(|| {
        if g.is_null() || buffer.is_null() {
            return fail(GdStatus::NullArgument, "graph and buffer must be non-null");
        }
        let g = &unsafe { &*g }.inner;
        if vertex >= g.n() {
            return fail(
                GdStatus::InvalidArgument,
                format!("vertex {vertex} out of range for graph with {} vertices", g.n()),
            );
        }
        let label = g.label(vertex).as_bytes();
        if capacity < label.len() + 1 {
            return fail(
                GdStatus::InvalidArgument,
                format!("label needs {} bytes, buffer holds {capacity}", label.len() + 1),
            );
        }
        unsafe {
            std::ptr::copy_nonoverlapping(label.as_ptr(), buffer as *mut u8, label.len());
            *buffer.add(label.len()) = 0;
        }
        GdStatus::Ok
    })
}

/// Build one of the four named operators on `g` in the basis selected by
/// `rho` (must be −0.5, 0.0 or +0.5). The graph must be connected.
///
/// On success `*out` owns the operator; free it with [`gd_operator_free`].
/// The handle is independent of `g`, which may be freed first.
///
/// # Safety
/// `g` must be a live graph handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_special(
    g: *const GdGraph,
    kind: GdSpecialCase,
    rho: f64,
    out: *mut *mut GdOperator,
) -> GdStatus {
    guard(|| {
        if g.is_null() || out.is_null() {
            return fail(GdStatus::NullArgument, "graph and out must be non-null");
        }
        unsafe { *out = std::ptr::null_mut() };
        let rho = match rho_from(rho) {
            Ok(r) => r,
            Err(status) => return status,
        };
        let g = &unsafe { &*g }.inner;
        let (w, t) = match special_case(g, kind.into(), &SpecialCaseOptions::default()) {
            Ok(pair) => pair,
            Err(e) => return fail(operator_status(&e), e),
        };
        match build_operator(w, t, rho) {
            Ok(op) => {
                unsafe { *out = Box::into_raw(Box::new(GdOperator { inner: op })) };
                GdStatus::Ok
            }
            Err(e) => fail(operator_status(&e), e),
        }
    })
}

/// Build the general operator from an explicit weight structure and delay
/// vector. `delays` holds one strictly positive entry per vertex, or is null
/// for unit delays. `rho` must be −0.5, 0.0 or +0.5.
///
/// # Safety
/// `w` must be a live graph handle, `delays` null or `gd_graph_vertex_count`
/// readable doubles, and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_build(
    w: *const GdGraph,
    delays: *const f64,
    rho: f64,
    out: *mut *mut GdOperator,
) -> GdStatus {
    guard(|| {
        if w.is_null() || out.is_null() {
            return fail(GdStatus::NullArgument, "graph and out must be non-null");
        }
        unsafe { *out = std::ptr::null_mut() };
        let rho = match rho_from(rho) {
            Ok(r) => r,
            Err(status) => return status,
        };
        let g = &unsafe { &*w }.inner;
        let t = if delays.is_null() {
            vec![1.0; g.n()]
        } else {
            unsafe { std::slice::from_raw_parts(delays, g.n()) }.to_vec()
        };
        match build_operator(g.clone(), t, rho) {
            Ok(op) => {
                unsafe { *out = Box::into_raw(Box::new(GdOperator { inner: op })) };
                GdStatus::Ok
            }
            Err(e) => fail(operator_status(&e), e),
        }
    })
}

/// Free an operator handle. Null is ignored.
///
/// # Safety
/// `op` must be null or a pointer obtained from an operator constructor that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_free(op: *mut GdOperator) {
    if !op.is_null() {
        drop(unsafe { Box::from_raw(op) });
    }
}

/// Dimension of the operator (number of vertices), or 0 for a null handle.
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_order(op: *const GdOperator) -> usize {
    if op.is_null() {
        0
    } else {
        unsafe { &*op }.inner.n()
    }
}

/// The basis parameter the operator was built with (−0.5, 0.0 or +0.5), or
/// NaN for a null handle.
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_rho(op: *const GdOperator) -> f64 {
    if op.is_null() {
        f64::NAN
    } else {
        unsafe { &*op }.inner.rho().value()
    }
}

/// Apply the operator once: `y = L x`. Both arrays hold
/// `gd_operator_order` doubles and must not alias.
///
/// # Safety
/// `x` must point to `gd_operator_order` readable doubles and `y` to as many
/// writable ones.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_apply(
    op: *const GdOperator,
    x: *const f64,
    y: *mut f64,
) -> GdStatus {
    guard(|| {
        if op.is_null() || x.is_null() || y.is_null() {
            return fail(GdStatus::NullArgument, "operator, x and y must be non-null");
        }
        let op = &unsafe { &*op }.inner;
        let x = unsafe { std::slice::from_raw_parts(x, op.n()) };
        match op.apply(x) {
            Ok(values) => {
                unsafe { std::ptr::copy_nonoverlapping(values.as_ptr(), y, values.len()) };
                GdStatus::Ok
            }
            Err(e) => fail(operator_status(&e), e),
        }
    })
}

/// Write the generalized degree centrality (unnormalized, one value per
/// vertex) into `out_values`.
///
/// # Safety
/// `out_values` must point to `gd_operator_order` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_operator_centrality(
    op: *const GdOperator,
    out_values: *mut f64,
) -> GdStatus {
    guard(|| {
        if op.is_null() || out_values.is_null() {
            return fail(GdStatus::NullArgument, "operator and out_values must be non-null");
        }
        let op = &unsafe { &*op }.inner;
        let c = dynamics::generalized_centrality(op);
        unsafe { std::ptr::copy_nonoverlapping(c.values.as_ptr(), out_values, c.values.len()) };
        GdStatus::Ok
    })
}

/// Smallest nontrivial eigenpair of the operator. `max_iter` of 0 selects
/// the built-in iteration cap. `out_vector` (length `gd_operator_order`, in
/// the operator's own basis) and `out_epsilon` (the residual certificate)
/// may be null when not wanted.
///
/// # Safety
/// Non-null outputs must be writable; `out_vector` must hold
/// `gd_operator_order` doubles.
#[no_mangle]
pub unsafe extern "C" fn gd_second_eigenpair(
    op: *const GdOperator,
    tol: f64,
    max_iter: usize,
    out_value: *mut f64,
    out_vector: *mut f64,
    out_epsilon: *mut f64,
) -> GdStatus {
    guard(|| {
        if op.is_null() || out_value.is_null() {
            return fail(GdStatus::NullArgument, "operator and out_value must be non-null");
        }
        let op = &unsafe { &*op }.inner;
        let cap = if max_iter == 0 { spectra::default_max_iter(op.n()) } else { max_iter };
        match spectra::second_eigenpair(op, tol, cap) {
            Ok(eig) => {
                unsafe { *out_value = eig.eigenvalue };
                if !out_vector.is_null() {
                    unsafe {
                        std::ptr::copy_nonoverlapping(
                            eig.eigenvector.as_ptr(),
                            out_vector,
                            eig.eigenvector.len(),
                        )
                    };
                }
                if !out_epsilon.is_null() {
                    unsafe { *out_epsilon = eig.epsilon };
                }
                GdStatus::Ok
            }
            Err(e) => fail(spectra_status(&e), e),
        }
    })
}

/// Evolve a state under the operator's dynamics for time `t` using at least
/// `steps` integrator steps (must be ≥ 1). `theta0` is interpreted in the
/// operator's own basis; the result lands in `out_values`. In-place
/// evolution (`theta0 == out_values`) is allowed.
///
/// # Safety
/// `theta0` and `out_values` must each reference `gd_operator_order`
/// doubles, readable and writable respectively.
#[no_mangle]
pub unsafe extern "C" fn gd_evolve(
    op: *const GdOperator,
    theta0: *const f64,
    t: f64,
    steps: usize,
    out_values: *mut f64,
) -> GdStatus {
    guard(|| {
        if op.is_null() || theta0.is_null() || out_values.is_null() {
            return fail(GdStatus::NullArgument, "operator, theta0 and out_values must be non-null");
        }
        let op = &unsafe { &*op }.inner;
        let theta0 = unsafe { std::slice::from_raw_parts(theta0, op.n()) }.to_vec();
        let state = match StateVector::new(theta0, op.rho(), 0.0) {
            Ok(s) => s,
            Err(e) => return fail(dynamics_status(&e), e),
        };
        match dynamics::evolve(op, &state, t, steps) {
            Ok(theta) => {
                unsafe {
                    std::ptr::copy_nonoverlapping(
                        theta.values.as_ptr(),
                        out_values,
                        theta.values.len(),
                    )
                };
                GdStatus::Ok
            }
            Err(e) => fail(dynamics_status(&e), e),
        }
    })
}

/// Run the full spectral certification on a graph/operator pair built from
/// the same vertex set: solve for λ₂, sweep for a bisection, and check the
/// two-sided conductance bounds. `max_iter` of 0 selects the built-in cap;
/// graphs with at most `oracle_max_n` vertices are additionally checked
/// against the exact brute-force conductance (pass 0 to skip that).
///
/// `out_epsilon`, `out_pass` and `out_side` may be null. `out_side` receives
/// one byte per vertex: 1 when the vertex lies in the certified side of the
/// bisection, 0 otherwise.
///
/// # Safety
/// `g` and `op` must be live handles; non-null outputs must be writable,
/// `out_side` with `gd_operator_order` bytes.
#[no_mangle]
pub unsafe extern "C" fn gd_certify(
    g: *const GdGraph,
    op: *const GdOperator,
    tol: f64,
    max_iter: usize,
    oracle_max_n: usize,
    out_lambda2: *mut f64,
    out_h: *mut f64,
    out_epsilon: *mut f64,
    out_pass: *mut bool,
    out_side: *mut u8,
) -> GdStatus {
    guard(|| {
        if g.is_null() || op.is_null() || out_lambda2.is_null() || out_h.is_null() {
            return fail(
                GdStatus::NullArgument,
                "graph, operator, out_lambda2 and out_h must be non-null",
            );
        }
        let g = &unsafe { &*g }.inner;
        let op = &unsafe { &*op }.inner;
        if g.n() != op.n() {
            return fail(
                GdStatus::InvalidArgument,
                format!("graph has {} vertices but the operator has {}", g.n(), op.n()),
            );
        }
        let cap = if max_iter == 0 { spectra::default_max_iter(op.n()) } else { max_iter };
        let oracle = if oracle_max_n == 0 { None } else { Some(oracle_max_n) };
        match partition::certify(g, op, tol, cap, oracle) {
            Ok((part, _profile, report)) => {
                unsafe {
                    *out_lambda2 = report.lambda2;
                    *out_h = report.h_sweep;
                }
                if !out_epsilon.is_null() {
                    unsafe { *out_epsilon = report.epsilon };
                }
                if !out_pass.is_null() {
                    unsafe { *out_pass = report.pass };
                }
                if !out_side.is_null() {
                    for i in 0..op.n() {
                        unsafe { *out_side.add(i) = u8::from(part.s.contains(i)) };
                    }
                }
                GdStatus::Ok
            }
            Err(e) => fail(spectra_status(&e), e),
        }
    })
}
