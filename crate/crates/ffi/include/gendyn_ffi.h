#ifndef GENDYN_FFI_H
#define GENDYN_FFI_H

/* Generated by cbindgen from the gendyn-ffi crate. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function in this interface.
 */
typedef enum {
  /**
   * The call succeeded.
   */
  GD_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  GD_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument was structurally valid but semantically rejected
   * (bad ρ, zero steps, vertex out of range, ...).
   */
  GD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A string argument was not valid UTF-8.
   */
  GD_STATUS_UTF8 = 3,
  /**
   * The underlying file could not be opened or read.
   */
  GD_STATUS_IO = 4,
  /**
   * The edge-list file was readable but malformed.
   */
  GD_STATUS_PARSE = 5,
  /**
   * The graph is not connected (and no component extraction was asked for).
   */
  GD_STATUS_DISCONNECTED = 6,
  /**
   * The iterative eigensolver failed to converge.
   */
  GD_STATUS_SOLVER = 7,
  /**
   * A panic was caught at the language boundary; state may be stale but
   * memory is intact.
   */
  GD_STATUS_PANIC = 8,
} GdStatus;

/**
 * The four named operator constructions.
 */
typedef enum {
  GD_SPECIAL_CASE_NORMALIZED_LAPLACIAN = 0,
  GD_SPECIAL_CASE_SCALED_LAPLACIAN = 1,
  GD_SPECIAL_CASE_REPLICATOR = 2,
  GD_SPECIAL_CASE_UNBIASED_LAPLACIAN = 3,
} GdSpecialCase;

/**
 * Opaque handle around a loaded graph.
 */
typedef struct GdGraph GdGraph;

/**
 * Opaque handle around a built spreading operator.
 */
typedef struct GdOperator GdOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Never null; do not
 * free.
 */
const char *gd_version(void);

/**
 * Message describing the most recent failure on the calling thread, empty
 * if nothing failed yet. The pointer stays valid until the next failing
 * call on the same thread; do not free it.
 */
const char *gd_last_error_message(void);

/**
 * Load a whitespace-separated edge list (`u v [w]` per line, `#` comments)
 * from `path`. With `keep_giant_component` set, a disconnected input is
 * reduced to its largest connected component instead of being kept as-is.
 *
 * On success `*out` owns the graph; free it with [`gd_graph_free`].
 *
 * # Safety
 * `path` must point to a NUL-terminated string and `out` to a writable
 * pointer slot; both must stay valid for the duration of the call.
 */
GdStatus gd_graph_load(const char *path, bool keep_giant_component, GdGraph **out);

/**
 * Build a graph from parallel edge arrays. Vertex ids become decimal
 * labels; the vertex count is `1 + max(id)`. `weights` may be null, in
 * which case every edge has weight 1. Self-loops, non-positive weights and
 * an empty edge set are rejected; duplicate edges accumulate.
 *
 * # Safety
 * `sources` and `targets` must point to `n_edges` readable elements,
 * `weights` to `n_edges` readable doubles or be null, and `out` to a
 * writable pointer slot.
 */
GdStatus gd_graph_from_edges(size_t n_edges,
                             const uint32_t *sources,
                             const uint32_t *targets,
                             const double *weights,
                             GdGraph **out);

/**
 * Free a graph handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a pointer obtained from a `gd_graph_*` constructor
 * that has not been freed yet.
 */
void gd_graph_free(GdGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t gd_graph_vertex_count(const GdGraph *g);

/**
 * Number of undirected edges, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t gd_graph_edge_count(const GdGraph *g);

/**
 * Copy the label of `vertex` into `buffer` as a NUL-terminated string.
 * Fails with `GD_STATUS_INVALID_ARGUMENT` when the vertex is out of range
 * or `capacity` is too small for the label plus terminator.
 *
 * # Safety
 * `buffer` must point to `capacity` writable bytes.
 */
GdStatus gd_graph_vertex_label(const GdGraph *g, size_t vertex, char *buffer, size_t capacity);

/**
 * Build one of the four named operators on `g` in the basis selected by
 * `rho` (must be −0.5, 0.0 or +0.5). The graph must be connected.
 *
 * On success `*out` owns the operator; free it with [`gd_operator_free`].
 * The handle is independent of `g`, which may be freed first.
 *
 * # Safety
 * `g` must be a live graph handle and `out` a writable pointer slot.
 */
GdStatus gd_operator_special(const GdGraph *g, GdSpecialCase kind, double rho, GdOperator **out);

/**
 * Build the general operator from an explicit weight structure and delay
 * vector. `delays` holds one strictly positive entry per vertex, or is null
 * for unit delays. `rho` must be −0.5, 0.0 or +0.5.
 *
 * # Safety
 * `w` must be a live graph handle, `delays` null or `gd_graph_vertex_count`
 * readable doubles, and `out` a writable pointer slot.
 */
GdStatus gd_operator_build(const GdGraph *w, const double *delays, double rho, GdOperator **out);

/**
 * Free an operator handle. Null is ignored.
 *
 * # Safety
 * `op` must be null or a pointer obtained from an operator constructor that
 * has not been freed yet.
 */
void gd_operator_free(GdOperator *op);

/**
 * Dimension of the operator (number of vertices), or 0 for a null handle.
 *
 * # Safety
 * `op` must be null or a live operator handle.
 */
size_t gd_operator_order(const GdOperator *op);

/**
 * The basis parameter the operator was built with (−0.5, 0.0 or +0.5), or
 * NaN for a null handle.
 *
 * # Safety
 * `op` must be null or a live operator handle.
 */
double gd_operator_rho(const GdOperator *op);

/**
 * Apply the operator once: `y = L x`. Both arrays hold
 * `gd_operator_order` doubles and must not alias.
 *
 * # Safety
 * `x` must point to `gd_operator_order` readable doubles and `y` to as many
 * writable ones.
 */
GdStatus gd_operator_apply(const GdOperator *op, const double *x, double *y);

/**
 * Write the generalized degree centrality (unnormalized, one value per
 * vertex) into `out_values`.
 *
 * # Safety
 * `out_values` must point to `gd_operator_order` writable doubles.
 */
GdStatus gd_operator_centrality(const GdOperator *op, double *out_values);

/**
 * Smallest nontrivial eigenpair of the operator. `max_iter` of 0 selects
 * the built-in iteration cap. `out_vector` (length `gd_operator_order`, in
 * the operator's own basis) and `out_epsilon` (the residual certificate)
 * may be null when not wanted.
 *
 * # Safety
 * Non-null outputs must be writable; `out_vector` must hold
 * `gd_operator_order` doubles.
 */
GdStatus gd_second_eigenpair(const GdOperator *op,
                             double tol,
                             size_t max_iter,
                             double *out_value,
                             double *out_vector,
                             double *out_epsilon);

/**
 * Evolve a state under the operator's dynamics for time `t` using at least
 * `steps` integrator steps (must be ≥ 1). `theta0` is interpreted in the
 * operator's own basis; the result lands in `out_values`. In-place
 * evolution (`theta0 == out_values`) is allowed.
 *
 * # Safety
 * `theta0` and `out_values` must each reference `gd_operator_order`
 * doubles, readable and writable respectively.
 */
GdStatus gd_evolve(const GdOperator *op,
                   const double *theta0,
                   double t,
                   size_t steps,
                   double *out_values);

/**
 * Run the full spectral certification on a graph/operator pair built from
 * the same vertex set: solve for λ₂, sweep for a bisection, and check the
 * two-sided conductance bounds. `max_iter` of 0 selects the built-in cap;
 * graphs with at most `oracle_max_n` vertices are additionally checked
 * against the exact brute-force conductance (pass 0 to skip that).
 *
 * `out_epsilon`, `out_pass` and `out_side` may be null. `out_side` receives
 * one byte per vertex: 1 when the vertex lies in the certified side of the
 * bisection, 0 otherwise.
 *
 * # Safety
 * `g` and `op` must be live handles; non-null outputs must be writable,
 * `out_side` with `gd_operator_order` bytes.
 */
GdStatus gd_certify(const GdGraph *g,
                    const GdOperator *op,
                    double tol,
                    size_t max_iter,
                    size_t oracle_max_n,
                    double *out_lambda2,
                    double *out_h,
                    double *out_epsilon,
                    bool *out_pass,
                    uint8_t *out_side);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENDYN_FFI_H */
