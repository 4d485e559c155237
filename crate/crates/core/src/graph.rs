//! Immutable weighted undirected graphs with dense indexing and string labels,
//! plus the cut and generalized-volume primitives every other module builds on.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("i/o error reading edge list: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: self-loop on vertex {vertex:?} rejected (diagonal entries must be zero)")]
    SelfLoop { line: usize, vertex: String },
    #[error("line {line}: edge weight {value} rejected (weights must be finite and > 0)")]
    InvalidWeight { line: usize, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate edge {u:?} -- {v:?} (enable sum_duplicates to accumulate)")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
}

/// Options controlling [`load_edge_list`].
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Accept an optional third `w` token per line. When false, lines must be
    /// exactly `u v` and all weights are 1.
    pub weighted: bool,
    /// Sum repeated undirected edges instead of rejecting them.
    pub sum_duplicates: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { weighted: true, sum_duplicates: true }
    }
}

/// Immutable weighted undirected graph in compressed sparse rows.
///
/// Invariants established at construction and never mutated afterwards:
/// the adjacency is symmetric with zero diagonal, all weights are finite and
/// strictly positive, `degrees[i]` is exactly the stored row sum, and
/// `total_weight` is exactly half the degree sum (so the handshake identity
/// `Σ d_i = 2·total_weight` holds bit-for-bit).
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Build a graph from explicit labels and undirected edges `(i, j, w)`
    /// given in dense indices. Rejects self-loops, out-of-range indices and
    /// non-positive weights; duplicate pairs are summed.
    pub fn build(labels: Vec<String>, edges: &[(usize, usize, f64)]) -> Result<Graph, GraphError> {
        let n = labels.len();
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (line, &(u, v, w)) in edges.iter().enumerate() {
            let line = line + 1;
            if u >= n {
                return Err(GraphError::IndexOutOfRange { index: u, n });
            }
            if v >= n {
                return Err(GraphError::IndexOutOfRange { index: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, vertex: labels[u].clone() });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::InvalidWeight { line, value: w });
            }
            let key = (u.min(v), u.max(v));
            *acc.entry(key).or_insert(0.0) += w;
        }
        Ok(Graph::from_dedup(labels, &acc))
    }

    /// Convenience constructor for unit-weight test fixtures on `0..n`.
    pub fn from_unit_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let weighted: Vec<(usize, usize, f64)> =
            edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Graph::build(labels, &weighted)
    }

    fn from_dedup(labels: Vec<String>, acc: &BTreeMap<(usize, usize), f64>) -> Graph {
        let n = labels.len();
        let mut counts = vec![0usize; n];
        for &(i, j) in acc.keys() {
            counts[i] += 1;
            counts[j] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + counts[i];
        }
        let nnz = offsets[n];
        let mut targets = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        let mut cursor = offsets.clone();
        // BTreeMap iterates keys ascending, so each row's targets come out sorted.
        for (&(i, j), &w) in acc.iter() {
            targets[cursor[i]] = j;
            weights[cursor[i]] = w;
            cursor[i] += 1;
            targets[cursor[j]] = i;
            weights[cursor[j]] = w;
            cursor[j] += 1;
        }
        let degrees: Vec<f64> = (0..n)
            .map(|i| weights[offsets[i]..offsets[i + 1]].iter().sum())
            .collect();
        let total_weight = degrees.iter().sum::<f64>() / 2.0;
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Graph { n, labels, label_index, offsets, targets, weights, degrees, total_weight }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Sum of undirected edge weights, exactly half the degree sum.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn max_degree(&self) -> f64 {
        self.degrees.iter().cloned().fold(0.0, f64::max)
    }

    /// Neighbors of `i` as `(target, weight)` pairs, targets ascending.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Undirected edges `(i, j, w)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| i < j)
                .map(move |(j, w)| (i, j, w))
        })
    }

    /// Rebuild with the same structure but edge weights transformed by `f`.
    /// The sparsity pattern and label set are preserved.
    pub(crate) fn map_weights(&self, f: impl Fn(usize, usize, f64) -> f64) -> Graph {
        let mut g = self.clone();
        for i in 0..g.n {
            for k in g.offsets[i]..g.offsets[i + 1] {
                let j = g.targets[k];
                g.weights[k] = f(i, j, self.weights[k]);
            }
        }
        g.degrees = (0..g.n)
            .map(|i| g.weights[g.offsets[i]..g.offsets[i + 1]].iter().sum())
            .collect();
        g.total_weight = g.degrees.iter().sum::<f64>() / 2.0;
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let comp = self.components();
        comp.iter().all(|&c| c == 0)
    }

    /// Component id per vertex; ids are assigned in order of first appearance
    /// (vertex 0 is always in component 0).
    fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for (v, _) in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Membership set over the dense vertex range `[0..n)` with O(1) test and a
/// cached cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    universe: usize,
    bits: Vec<u64>,
    card: usize,
}

impl VertexSet {
    pub fn new(universe: usize) -> VertexSet {
        VertexSet { universe, bits: vec![0; universe.div_ceil(64)], card: 0 }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> VertexSet {
        let mut s = VertexSet::new(universe);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn cardinality(&self) -> usize {
        self.card
    }

    pub fn contains(&self, i: usize) -> bool {
        assert!(i < self.universe, "vertex {i} outside universe {}", self.universe);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "vertex {i} outside universe {}", self.universe);
        if !self.contains(i) {
            self.bits[i / 64] |= 1 << (i % 64);
            self.card += 1;
        }
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = VertexSet::new(self.universe);
        for i in 0..self.universe {
            if !self.contains(i) {
                out.insert(i);
            }
        }
        out
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }
}

/// Parse a `u v [w]` edge list. `#` starts a comment (whole line or trailing),
/// tokens are separated by whitespace or commas, vertices get dense indices in
/// first-appearance order.
pub fn load_edge_list(source: impl BufRead, options: LoadOptions) -> Result<Graph, GraphError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut first_seen: HashMap<(usize, usize), usize> = HashMap::new();

    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let cleaned = content.replace(',', " ");
        let tokens: Vec<&str> = cleaned.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let expected = if options.weighted { 2..=3 } else { 2..=2 };
        if !expected.contains(&tokens.len()) {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!(
                    "expected `u v{}` but found {} tokens",
                    if options.weighted { " [w]" } else { "" },
                    tokens.len()
                ),
            });
        }
        let (u, v) = (tokens[0], tokens[1]);
        if u == v {
            return Err(GraphError::SelfLoop { line: lineno, vertex: u.to_string() });
        }
        let w = if tokens.len() == 3 {
            tokens[2].parse::<f64>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("unparsable weight token {:?}", tokens[2]),
            })?
        } else {
            1.0
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(GraphError::InvalidWeight { line: lineno, value: w });
        }
        let mut id = |name: &str| -> usize {
            match index.get(name) {
                Some(&i) => i,
                None => {
                    let i = labels.len();
                    labels.push(name.to_string());
                    index.insert(name.to_string(), i);
                    i
                }
            }
        };
        let iu = id(u);
        let iv = id(v);
        let key = (iu.min(iv), iu.max(iv));
        if let Some(&seen) = first_seen.get(&key) {
            if !options.sum_duplicates {
                let _ = seen;
                return Err(GraphError::DuplicateEdge {
                    line: lineno,
                    u: u.to_string(),
                    v: v.to_string(),
                });
            }
        } else {
            first_seen.insert(key, lineno);
        }
        *acc.entry(key).or_insert(0.0) += w;
    }

    Ok(Graph::from_dedup(labels, &acc))
}

/// Total weight crossing from `S` to its complement in `w`.
pub fn cut_weight(w: &Graph, s: &VertexSet) -> f64 {
    assert_eq!(w.n(), s.universe(), "vertex set universe does not match graph");
    let mut cut = 0.0;
    for i in s.iter() {
        for (j, wij) in w.neighbors(i) {
            if !s.contains(j) {
                cut += wij;
            }
        }
    }
    cut
}

/// Generalized volume `Σ_{i∈S} d_W,i · τ_i`.
pub fn generalized_volume(w: &Graph, t: &[f64], s: &VertexSet) -> f64 {
    assert_eq!(w.n(), s.universe(), "vertex set universe does not match graph");
    assert_eq!(w.n(), t.len(), "delay vector length does not match graph");
    s.iter().map(|i| w.degree(i) * t[i]).sum()
}

/// Induced subgraph of the largest connected component, original labels kept.
/// Size ties go to the component whose minimum original index is smallest;
/// the operation is idempotent.
pub fn giant_component(g: &Graph) -> Result<Graph, GraphError> {
    if g.n() == 0 {
        return Err(GraphError::Empty);
    }
    let comp = g.components();
    let ncomp = comp.iter().copied().max().unwrap() + 1;
    let mut sizes = vec![0usize; ncomp];
    for &c in &comp {
        sizes[c] += 1;
    }
    // Component ids are assigned by ascending first vertex, so scanning ids in
    // order and keeping strict improvements implements the min-index tie-break.
    let mut best = 0;
    for c in 1..ncomp {
        if sizes[c] > sizes[best] {
            best = c;
        }
    }
    let keep: Vec<usize> = (0..g.n()).filter(|&i| comp[i] == best).collect();
    let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let labels: Vec<String> = keep.iter().map(|&i| g.label(i).to_string()).collect();
    let mut edges = Vec::new();
    for (i, j, w) in g.edges() {
        if let (Some(&ni), Some(&nj)) = (remap.get(&i), remap.get(&j)) {
            edges.push((ni, nj, w));
        }
    }
    Graph::build(labels, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load(text: &str, options: LoadOptions) -> Result<Graph, GraphError> {
        load_edge_list(Cursor::new(text), options)
    }

    #[test]
    fn p3_loads_with_first_appearance_order() {
        let g = load("0 1\n1 2\n", LoadOptions::default()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.labels(), &["0", "1", "2"]);
    }

    #[test]
    fn duplicate_edges_sum() {
        let g = load("a b 2.0\nb a 3.0", LoadOptions::default()).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degrees(), &[5.0, 5.0]);
    }

    #[test]
    fn duplicate_edges_rejected_when_disabled() {
        let opts = LoadOptions { sum_duplicates: false, ..LoadOptions::default() };
        let err = load("a b\nb a\n", opts).unwrap_err();
        match err {
            GraphError::DuplicateEdge { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn self_loop_rejected_with_line_number() {
        let err = load("0 1\n2 2\n", LoadOptions::default()).unwrap_err();
        match err {
            GraphError::SelfLoop { line, vertex } => {
                assert_eq!(line, 2);
                assert_eq!(vertex, "2");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_weight_rejected() {
        assert!(matches!(
            load("0 1 -2.0\n", LoadOptions::default()),
            Err(GraphError::InvalidWeight { line: 1, .. })
        ));
        assert!(matches!(
            load("0 1 0\n", LoadOptions::default()),
            Err(GraphError::InvalidWeight { line: 1, .. })
        ));
        assert!(matches!(
            load("0 1 zebra\n", LoadOptions::default()),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_commas_accepted() {
        let g = load("# header\nu,v,2.5 # trailing\n", LoadOptions::default()).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.total_weight(), 2.5);
    }

    #[test]
    fn cut_examples() {
        let p3 = Graph::from_unit_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(cut_weight(&p3, &VertexSet::from_indices(3, [0])), 1.0);
        assert_eq!(cut_weight(&p3, &VertexSet::from_indices(3, [1])), 2.0);
        let c4 = Graph::from_unit_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(cut_weight(&c4, &VertexSet::from_indices(4, [0, 1])), 2.0);
        // empty and full sets cut nothing
        assert_eq!(cut_weight(&c4, &VertexSet::new(4)), 0.0);
        assert_eq!(cut_weight(&c4, &VertexSet::from_indices(4, 0..4)), 0.0);
    }

    #[test]
    fn volume_examples() {
        let p3 = Graph::from_unit_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let t = vec![1.0; 3];
        assert_eq!(generalized_volume(&p3, &t, &VertexSet::from_indices(3, [0, 1])), 3.0);
        let star = Graph::from_unit_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(
            generalized_volume(&star, &vec![1.0; 4], &VertexSet::from_indices(4, [0])),
            3.0
        );
    }

    #[test]
    fn giant_component_picks_largest_and_preserves_labels() {
        let g = load("a b\nb c\nx y\n", LoadOptions::default()).unwrap();
        let gc = giant_component(&g).unwrap();
        assert_eq!(gc.n(), 3);
        assert_eq!(gc.labels(), &["a", "b", "c"]);
        let again = giant_component(&gc).unwrap();
        assert_eq!(again.n(), 3);
        assert_eq!(again.labels(), gc.labels());
    }

    #[test]
    fn giant_component_tie_break_smallest_min_index() {
        // two components of equal size; the one containing the first-seen vertex wins
        let g = load("p q\nr s\n", LoadOptions::default()).unwrap();
        let gc = giant_component(&g).unwrap();
        assert_eq!(gc.labels(), &["p", "q"]);
    }

    #[test]
    fn empty_graph_rejected_by_giant_component() {
        let g = load("", LoadOptions::default()).unwrap();
        assert!(matches!(giant_component(&g), Err(GraphError::Empty)));
    }
}
