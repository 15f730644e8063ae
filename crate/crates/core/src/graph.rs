//! Weighted undirected graphs, vertex sets and the cut / volume / conductance
//! metrics shared by every algorithm in the crate.
//!
//! Vertices are dense `0..n` ids. The stored graph has no self-loops: the lazy
//! self-loop of weight `d_i` used by the random walks exists only implicitly
//! (inside the walk engine and in the doubled volume `vol'(S) = 2 vol(S)`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Immutable weighted undirected graph in CSR form.
///
/// `total_weight` is `m = Σ_j d_j`, i.e. twice the sum of edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    /// Inclusive prefix sums of `weights` restricted to each vertex's range.
    cumulative: Vec<f64>,
    degrees: Vec<f64>,
    /// Inclusive prefix sums of `degrees`, for degree-proportional sampling.
    degree_prefix: Vec<f64>,
    total_weight: f64,
    max_degree: f64,
}

impl WeightedGraph {
    /// Builds a graph on `n` vertices. Parallel edges are merged by summing
    /// their weights; self-loops and non-positive weights are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) has non-positive or non-finite weight {w}"
                )));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        Ok(Self::from_merged(n, &merged))
    }

    fn from_merged(n: usize, merged: &BTreeMap<(usize, usize), f64>) -> Self {
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(u, v), &w) in merged {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * merged.len());
        let mut weights = Vec::with_capacity(2 * merged.len());
        let mut cumulative = Vec::with_capacity(2 * merged.len());
        let mut degrees = Vec::with_capacity(n);
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
            let mut acc = 0.0;
            for &(v, w) in list.iter() {
                acc += w;
                targets.push(v);
                weights.push(w);
                cumulative.push(acc);
            }
            degrees.push(acc);
            offsets.push(targets.len());
        }
        let mut degree_prefix = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &d in &degrees {
            acc += d;
            degree_prefix.push(acc);
        }
        let max_degree = degrees.iter().copied().fold(0.0, f64::max);
        WeightedGraph {
            offsets,
            targets,
            weights,
            cumulative,
            degrees,
            degree_prefix,
            total_weight: acc,
            max_degree,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    /// Number of distinct (merged) edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// `m = Σ_j d_j`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Sum of edge weights, `m / 2`.
    pub fn edge_weight(&self) -> f64 {
        self.total_weight / 2.0
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn max_degree(&self) -> f64 {
        self.max_degree
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[v]..self.offsets[v + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_count(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Each undirected edge once, as `(u, v, w)` with `u < v`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// Picks a neighbour of `v` with probability proportional to edge weight,
    /// given a uniform draw `unit` in `[0, 1)`. Returns `None` for isolated `v`.
    #[inline]
    pub fn neighbor_by_unit(&self, v: usize, unit: f64) -> Option<usize> {
        let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
        if lo == hi {
            return None;
        }
        let table = &self.cumulative[lo..hi];
        let target = unit * table[table.len() - 1];
        let idx = table.partition_point(|&c| c <= target).min(table.len() - 1);
        Some(self.targets[lo + idx])
    }

    /// Vertex `i` with probability `d_i / m`.
    pub fn sample_vertex_by_degree<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if !(self.total_weight > 0.0) {
            return Err(Error::InvalidInput(
                "cannot sample by degree from a graph without edges".into(),
            ));
        }
        let target = rng.gen::<f64>() * self.total_weight;
        let idx = self.degree_prefix.partition_point(|&c| c <= target);
        Ok(idx.min(self.vertex_count() - 1))
    }

    /// Subgraph induced on `vertices` (given in original ids, any order).
    /// Local vertex `k` of the result corresponds to `vertices[k]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> WeightedGraph {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        let mut merged = BTreeMap::new();
        for (k, &v) in vertices.iter().enumerate() {
            for (u, w) in self.neighbors(v) {
                let lu = local[u];
                if lu != usize::MAX && k < lu {
                    merged.insert((k, lu), w);
                }
            }
        }
        Self::from_merged(vertices.len(), &merged)
    }

    /// Edge-list text: a `# vertices: N` header followed by `u v w` lines.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# vertices: {}", self.vertex_count());
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }
}

/// Reads the edge-list format: one edge `u v [w]` per line (weight defaults
/// to 1.0), `#` comments and blank lines ignored. A `# vertices: N` comment
/// raises the vertex count to at least `N` so trailing isolated vertices
/// survive a save/load cycle.
pub fn load_graph<R: Read>(mut source: R) -> Result<WeightedGraph> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    let mut n = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(count) = comment.trim().strip_prefix("vertices:") {
                let count: usize = count.trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad vertex count {:?}", count.trim()),
                })?;
                n = n.max(count);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `u v [w]`, got {line:?}"),
            });
        }
        let parse_id = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad vertex id {s:?}"),
            })
        };
        let u = parse_id(fields[0])?;
        let v = parse_id(fields[1])?;
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("bad weight {s:?}"),
            })?,
            None => 1.0,
        };
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("self-loop at vertex {u} (laziness is implicit in the walk)"),
            });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("weight must be positive and finite, got {w}"),
            });
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    WeightedGraph::from_edges(n, edges)
}

/// Membership mask with a cached volume `vol(S) = Σ_{i∈S} d_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSet {
    mask: Vec<bool>,
    len: usize,
    volume: f64,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: vec![false; n], len: 0, volume: 0.0 }
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(g: &WeightedGraph, vertices: I) -> Self {
        let mut set = Self::empty(g.vertex_count());
        for v in vertices {
            set.insert(g, v);
        }
        set
    }

    pub fn from_mask(g: &WeightedGraph, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), g.vertex_count());
        let mut len = 0;
        let mut volume = 0.0;
        for (v, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
            len += 1;
            volume += g.degree(v);
        }
        VertexSet { mask, len, volume }
    }

    /// Returns `false` if `v` was already present.
    pub fn insert(&mut self, g: &WeightedGraph, v: usize) -> bool {
        if self.mask[v] {
            return false;
        }
        self.mask[v] = true;
        self.len += 1;
        self.volume += g.degree(v);
        true
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Lazy volume `vol'(S) = 2 vol(S)`.
    pub fn lazy_volume(&self) -> f64 {
        2.0 * self.volume
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v)
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self, g: &WeightedGraph) -> VertexSet {
        VertexSet::from_mask(g, self.mask.iter().map(|b| !b).collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !(a & b))
    }
}

/// Edge-weight totals for a pair of disjoint vertex sets.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CutMetrics {
    /// Weight of edges with one endpoint in each set.
    pub good: f64,
    /// Weight of edges with exactly one endpoint in the union.
    pub cross: f64,
    /// Weight of edges touching the union.
    pub inc: f64,
    /// `good + cross / 2`.
    pub cut: f64,
}

impl CutMetrics {
    /// `cut / inc`, or 0 when nothing is incident.
    pub fn ratio(&self) -> f64 {
        if self.inc > 0.0 {
            self.cut / self.inc
        } else {
            0.0
        }
    }
}

/// Metrics for a labelling where `side(v)` is `Some(false|true)` for the two
/// classified sets and `None` otherwise. Vertices are scanned in id order so
/// the floating-point result is reproducible.
pub(crate) fn metrics_by<F>(g: &WeightedGraph, side: F) -> CutMetrics
where
    F: Fn(usize) -> Option<bool>,
{
    let (mut good, mut cross, mut internal) = (0.0, 0.0, 0.0);
    for u in 0..g.vertex_count() {
        let Some(su) = side(u) else { continue };
        for (v, w) in g.neighbors(u) {
            match side(v) {
                None => cross += w,
                Some(sv) if u < v => {
                    if su != sv {
                        good += w;
                    } else {
                        internal += w;
                    }
                }
                Some(_) => {}
            }
        }
    }
    CutMetrics { good, cross, inc: good + cross + internal, cut: good + cross / 2.0 }
}

pub fn cut_metrics(g: &WeightedGraph, a: &VertexSet, b: &VertexSet) -> Result<CutMetrics> {
    if !a.is_disjoint(b) {
        return Err(Error::InvalidInput("cut_metrics requires disjoint sets".into()));
    }
    Ok(metrics_by(g, |v| {
        if a.contains(v) {
            Some(false)
        } else if b.contains(v) {
            Some(true)
        } else {
            None
        }
    }))
}

/// Weight of edges leaving `s`.
pub fn boundary_weight(g: &WeightedGraph, s: &VertexSet) -> f64 {
    let mut total = 0.0;
    for u in s.iter() {
        for (v, w) in g.neighbors(u) {
            if !s.contains(v) {
                total += w;
            }
        }
    }
    total
}

/// Lazy-walk conductance `w(E(S, S̄)) / min(vol'(S), vol'(S̄))`.
pub fn conductance(g: &WeightedGraph, s: &VertexSet) -> Result<f64> {
    if s.is_empty() || s.len() == g.vertex_count() {
        return Err(Error::InvalidInput("conductance needs a proper nonempty subset".into()));
    }
    let inside = s.lazy_volume();
    let outside = 2.0 * (g.total_weight() - s.volume());
    let denom = inside.min(outside);
    if !(denom > 0.0) {
        return Err(Error::InvalidInput("one side of the cut has zero volume".into()));
    }
    Ok(boundary_weight(g, s) / denom)
}

/// Classification state of one vertex within a tripartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Even,
    Odd,
    Unclassified,
}

/// Vertices split into `Even`, `Odd` and unclassified. A vertex, once
/// classified, keeps its side for the lifetime of the tripartition.
#[derive(Debug, Clone, PartialEq)]
pub struct Tripartition {
    sides: Vec<Side>,
    classified: usize,
}

impl Tripartition {
    pub fn new(n: usize) -> Self {
        Tripartition { sides: vec![Side::Unclassified; n], classified: 0 }
    }

    pub fn side(&self, v: usize) -> Side {
        self.sides[v]
    }

    /// Classifies `v` if it is still unclassified; returns whether it moved.
    pub fn classify(&mut self, v: usize, side: Side) -> bool {
        if side == Side::Unclassified || self.sides[v] != Side::Unclassified {
            return false;
        }
        self.sides[v] = side;
        self.classified += 1;
        true
    }

    pub fn classified_count(&self) -> usize {
        self.classified
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn members(&self, side: Side) -> impl Iterator<Item = usize> + '_ {
        self.sides.iter().enumerate().filter(move |(_, &s)| s == side).map(|(v, _)| v)
    }

    pub fn set(&self, g: &WeightedGraph, side: Side) -> VertexSet {
        VertexSet::from_vertices(g, self.members(side))
    }

    /// `vol(Even ∪ Odd)`, summed in vertex order.
    pub fn classified_volume(&self, g: &WeightedGraph) -> f64 {
        self.sides
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != Side::Unclassified)
            .map(|(v, _)| g.degree(v))
            .sum()
    }

    pub fn metrics(&self, g: &WeightedGraph) -> CutMetrics {
        metrics_by(g, |v| match self.sides[v] {
            Side::Even => Some(false),
            Side::Odd => Some(true),
            Side::Unclassified => None,
        })
    }
}

/// Fraction of edge weight crossing `(left, V \ left)`. Zero for edgeless graphs.
pub fn cut_value(g: &WeightedGraph, left: &VertexSet) -> f64 {
    if !(g.total_weight() > 0.0) {
        return 0.0;
    }
    boundary_weight(g, left) / g.edge_weight()
}

/// A full two-sided partition; `true` means the vertex is on the left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    left: Vec<bool>,
}

impl Partition {
    pub fn new(left: Vec<bool>) -> Self {
        Partition { left }
    }

    pub fn is_left(&self, v: usize) -> bool {
        self.left[v]
    }

    pub fn sides(&self) -> &[bool] {
        &self.left
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Total weight of edges with endpoints on different sides.
    pub fn cut_weight(&self, g: &WeightedGraph) -> f64 {
        g.edges()
            .filter(|&(u, v, _)| self.left[u] != self.left[v])
            .map(|(_, _, w)| w)
            .sum()
    }

    pub fn value(&self, g: &WeightedGraph) -> f64 {
        if !(g.total_weight() > 0.0) {
            return 0.0;
        }
        self.cut_weight(g) / g.edge_weight()
    }

    pub fn left_set(&self, g: &WeightedGraph) -> VertexSet {
        VertexSet::from_mask(g, self.left.clone())
    }

    /// One `vertex_id L|R` line per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.left.len() * 6);
        for (v, &l) in self.left.iter().enumerate() {
            let _ = writeln!(out, "{v} {}", if l { 'L' } else { 'R' });
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse { line: idx + 1, msg: format!("expected `vertex L|R`, got {line:?}") };
            let mut it = line.split_whitespace();
            let v: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let side = match it.next() {
                Some("L") => true,
                Some("R") => false,
                _ => return Err(bad()),
            };
            entries.push((v, side));
        }
        let n = entries.iter().map(|&(v, _)| v + 1).max().unwrap_or(0);
        let mut seen = vec![false; n];
        let mut left = vec![false; n];
        for (v, side) in entries {
            if seen[v] {
                return Err(Error::InvalidInput(format!("vertex {v} listed twice")));
            }
            seen[v] = true;
            left[v] = side;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput("partition file skips vertex ids".into()));
        }
        Ok(Partition { left })
    }
}
