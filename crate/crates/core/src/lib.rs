//! Generalized-Laplacian toolkit for network dynamics.
//!
//! The crate builds parameterized spreading operators `⟨ρ, T, W⟩` over weighted
//! undirected graphs and exposes the quantities they induce:
//!
//! * [`graph`] — immutable weighted graphs, cut and generalized-volume primitives;
//! * [`operators`] — operator construction (reweighing, delay scaling, the four
//!   named special cases) and matrix-free application in any of the three bases;
//! * [`spectra`] — deterministic iterative eigensolvers with ε-certificates;
//! * [`dynamics`] — time evolution `θ(t) = e^{-Lt} θ(0)`, stationary
//!   distributions, centrality, conservation and convergence checks;
//! * [`partition`] — generalized conductance, the spectral sweep partitioner,
//!   a brute-force oracle, and Cheeger-inequality certification;
//! * [`dense`] — small dense symmetric eigendecomposition used as a test oracle.
//!
//! The `gendyn` binary wraps the pipeline: load a graph, build operators,
//! write centrality/sweep/partition profiles and certificate reports.

pub mod dense;
pub mod dynamics;
pub mod fmt;
pub mod graph;
pub mod operators;
pub mod partition;
pub mod spectra;
