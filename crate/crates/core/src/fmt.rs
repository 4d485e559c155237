//! Deterministic numeric formatting for file output.
//!
//! All floating-point values written to CSV/JSON reports use a fixed
//! 17-significant-digit decimal form, enough to round-trip any f64 exactly,
//! so identical runs produce byte-identical files.

/// Format with 17 significant digits (scientific, lowercase `e`).
/// Parsing the result with `f64::from_str` recovers the original bits
/// (including distinguishing `-0.0`; NaN never appears in outputs).
pub fn f64_repr(x: f64) -> String {
    format!("{x:.16e}")
}
