//! Shared fixtures for the integration suite: bundled datasets, small named
//! graphs with known spectra, and a seeded corpus of random connected graphs.

#![allow(dead_code)]

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gendyn::graph::{self, Graph, LoadOptions};
use gendyn::operators::{self, OperatorSpec, Rho, SpecialCase, SpecialCaseOptions};
use gendyn::spectra::{self, EigenResult};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load_data(name: &str) -> Graph {
    let path = data_path(name);
    let file = File::open(&path).unwrap_or_else(|e| panic!("open {}: {e}", path.display()));
    graph::load_edge_list(BufReader::new(file), LoadOptions::default())
        .unwrap_or_else(|e| panic!("parse {}: {e}", path.display()))
}

pub fn karate() -> Graph {
    load_data("karate.edges")
}

pub fn football() -> Graph {
    load_data("football.edges")
}

/// Parse a `vertex group` label file into label -> group.
pub fn load_groups(name: &str) -> HashMap<String, String> {
    let path = data_path(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let vertex = parts.next().expect("vertex column").to_string();
        let group = parts.next().expect("group column").to_string();
        map.insert(vertex, group);
    }
    map
}

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Graph::from_unit_edges(n, &edges).expect("path graph")
}

pub fn cycle_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_unit_edges(n, &edges).expect("cycle graph")
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    Graph::from_unit_edges(n, &edges).expect("complete graph")
}

pub fn star_graph(leaves: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_unit_edges(leaves + 1, &edges).expect("star graph")
}

/// Fixed seed so every run (and every machine) sees the same corpus.
pub const CORPUS_SEED: u64 = 0x5eed_cafe;
pub const CORPUS_SIZE: usize = 50;

/// Erdős–Rényi-style draws, rejected until connected: 50 graphs, n in 4..=12.
pub fn corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut graphs = Vec::with_capacity(CORPUS_SIZE);
    while graphs.len() < CORPUS_SIZE {
        let n = rng.gen_range(4..=12);
        let p = rng.gen_range(0.25..0.65);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        if edges.len() < n - 1 {
            continue;
        }
        let g = Graph::from_unit_edges(n, &edges).expect("corpus graph");
        if g.is_connected() {
            graphs.push(g);
        }
    }
    graphs
}

/// A weighted variant of the corpus for identities that must hold with
/// non-unit weights (same topology draw, weights in [0.5, 2.5]).
pub fn weighted_corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED ^ 0xffff);
    let mut graphs = Vec::with_capacity(20);
    while graphs.len() < 20 {
        let n = rng.gen_range(4..=12);
        let p = rng.gen_range(0.3..0.7);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j, rng.gen_range(0.5..2.5)));
                }
            }
        }
        if edges.len() < n - 1 {
            continue;
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        let g = Graph::build(labels, &edges).expect("weighted corpus graph");
        if g.is_connected() {
            graphs.push(g);
        }
    }
    graphs
}

/// Build all four named spreading operators on a graph (symmetric basis).
pub fn all_special_ops(g: &Graph) -> Vec<OperatorSpec> {
    SpecialCase::ALL
        .iter()
        .map(|&kind| {
            let (w, t) = operators::special_case(g, kind, &SpecialCaseOptions::default())
                .unwrap_or_else(|e| panic!("{}: {e}", kind.name()));
            operators::build_operator(w, t, Rho::Symmetric)
                .unwrap_or_else(|e| panic!("{}: {e}", kind.name()))
        })
        .collect()
}

pub fn solve_second(op: &OperatorSpec) -> EigenResult {
    try_solve(op).expect("second eigenpair")
}

pub fn try_solve(op: &OperatorSpec) -> Result<EigenResult, spectra::SpectraError> {
    spectra::second_eigenpair(op, spectra::DEFAULT_TOL, spectra::default_max_iter(op.n()))
}

pub fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol,
        "{what}: got {actual:.*e}, expected {expected:.*e} (tol {tol:e})",
        16,
        16,
    );
}

pub fn assert_rel_close(actual: f64, expected: f64, rel: f64, what: &str) {
    let scale = expected.abs().max(1e-300);
    assert!(
        (actual - expected).abs() / scale <= rel,
        "{what}: got {actual:.*e}, expected {expected:.*e} (rel tol {rel:e})",
        16,
        16,
    );
}
