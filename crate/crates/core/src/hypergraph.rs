//! Immutable k-uniform hypergraphs and the structural queries used by the
//! recoloring analysis: degrees, l-simplicity, 3-cycles (triangles) and the
//! triangle degrees `D(u', u)` and `d(v, u)`.
//!
//! Vertices are 1-based everywhere in the public API. Edges are identified by
//! their index in the (stable) edge list.

mod format;

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use format::{read_hypergraph, write_hypergraph, ParseError};

/// Above this vertex count edges are intersected by sorted merge instead of
/// bitmask popcount.
pub const MASK_MAX_VERTICES: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("vertex count must be positive")]
    NoVertices,
    #[error("edge size k must be at least 2, got {0}")]
    EdgeSizeTooSmall(usize),
    #[error("vertex {vertex} is out of range 1..={n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("edge index {index} is out of range (m = {m})")]
    InvalidEdge { index: usize, m: usize },
    #[error("edge {index} has {got} vertices, expected {k}")]
    WrongEdgeSize { index: usize, got: usize, k: usize },
    #[error("edge {index} is not strictly increasing")]
    NotIncreasing { index: usize },
    #[error("edge {index} duplicates an earlier edge")]
    DuplicateEdge { index: usize },
    #[error("coloring has length {got}, hypergraph has {n} vertices")]
    LengthMismatch { got: usize, n: usize },
    #[error("edges u' and u must differ (both are {0})")]
    SameEdge(usize),
}

/// Intersection bitmasks, one row of `words` u64 per edge.
#[derive(Debug, Clone)]
struct EdgeMasks {
    words: usize,
    bits: Vec<u64>,
}

impl EdgeMasks {
    fn row(&self, e: usize) -> &[u64] {
        &self.bits[e * self.words..(e + 1) * self.words]
    }
}

/// A k-uniform hypergraph on vertices `1..=n`.
#[derive(Clone)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    /// Flat edge storage, stride `k`, each edge strictly increasing.
    edges: Vec<u32>,
    /// `incidence[v - 1]` lists the edges containing `v`, ascending.
    incidence: Vec<Vec<u32>>,
    masks: Option<EdgeMasks>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// An unordered 3-cycle, stored as three ascending edge indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triangle(pub [usize; 3]);

impl Triangle {
    fn new(a: usize, b: usize, c: usize) -> Self {
        let mut e = [a, b, c];
        e.sort_unstable();
        Triangle(e)
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(&e)
    }

    /// The two member edges other than `e` (which must be a member).
    pub fn others(&self, e: usize) -> (usize, usize) {
        let mut it = self.0.iter().copied().filter(|&x| x != e);
        (it.next().unwrap(), it.next().unwrap())
    }
}

impl Hypergraph {
    /// Builds a hypergraph, validating every edge.
    ///
    /// Each edge must hold exactly `k` strictly increasing vertex ids in
    /// `1..=n`, and no edge may repeat.
    pub fn new(n: usize, k: usize, edges: Vec<Vec<u32>>) -> Result<Self, HypergraphError> {
        Self::check_shape(n, k)?;
        let mut flat = Vec::with_capacity(edges.len() * k);
        let mut seen: HashSet<&[u32]> = HashSet::with_capacity(edges.len());
        for (index, e) in edges.iter().enumerate() {
            Self::check_edge(n, k, index, e)?;
            if !seen.insert(e.as_slice()) {
                return Err(HypergraphError::DuplicateEdge { index });
            }
            flat.extend_from_slice(e);
        }
        Ok(Self::from_flat_unchecked(n, k, flat))
    }

    /// The hypergraph with no edges.
    pub fn empty(n: usize, k: usize) -> Result<Self, HypergraphError> {
        Self::check_shape(n, k)?;
        Ok(Self::from_flat_unchecked(n, k, Vec::new()))
    }

    /// The complete k-uniform hypergraph `K_n^(k)`, edges in colex order.
    pub fn complete(n: usize, k: usize) -> Result<Self, HypergraphError> {
        Self::check_shape(n, k)?;
        let table = crate::combinatorics::BinomialTable::new(n, k);
        let total = table.get(n, k) as usize;
        let mut flat = vec![0u32; total * k];
        for (rank, chunk) in flat.chunks_mut(k).enumerate() {
            table.unrank_colex(rank as u64, chunk);
        }
        Ok(Self::from_flat_unchecked(n, k, flat))
    }

    fn check_shape(n: usize, k: usize) -> Result<(), HypergraphError> {
        if n == 0 {
            return Err(HypergraphError::NoVertices);
        }
        if k < 2 {
            return Err(HypergraphError::EdgeSizeTooSmall(k));
        }
        Ok(())
    }

    fn check_edge(n: usize, k: usize, index: usize, e: &[u32]) -> Result<(), HypergraphError> {
        if e.len() != k {
            return Err(HypergraphError::WrongEdgeSize { index, got: e.len(), k });
        }
        if let Some(&v) = e.iter().find(|&&v| v == 0 || v as usize > n) {
            return Err(HypergraphError::InvalidVertex { vertex: v as usize, n });
        }
        if e.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HypergraphError::NotIncreasing { index });
        }
        Ok(())
    }

    /// Caller guarantees the flat edge list is valid and duplicate-free.
    pub(crate) fn from_flat_unchecked(n: usize, k: usize, edges: Vec<u32>) -> Self {
        let m = edges.len() / k;
        let mut incidence = vec![Vec::new(); n];
        for (e, chunk) in edges.chunks_exact(k).enumerate() {
            for &v in chunk {
                incidence[v as usize - 1].push(e as u32);
            }
        }
        let masks = (n <= MASK_MAX_VERTICES).then(|| {
            let words = n.div_ceil(64);
            let mut bits = vec![0u64; m * words];
            for (e, chunk) in edges.chunks_exact(k).enumerate() {
                for &v in chunk {
                    let i = v as usize - 1;
                    bits[e * words + i / 64] |= 1u64 << (i % 64);
                }
            }
            EdgeMasks { words, bits }
        });
        Hypergraph { n, k, edges, incidence, masks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of edges `m`.
    pub fn m(&self) -> usize {
        self.edges.len() / self.k
    }

    /// The vertices of edge `e`, ascending. Panics on a bad index.
    pub fn edge(&self, e: usize) -> &[u32] {
        &self.edges[e * self.k..(e + 1) * self.k]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.edges.chunks_exact(self.k)
    }

    /// Edges containing vertex `v` (1-based), ascending by index.
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        &self.incidence[v - 1]
    }

    fn check_vertex(&self, v: usize) -> Result<(), HypergraphError> {
        if v == 0 || v > self.n {
            return Err(HypergraphError::InvalidVertex { vertex: v, n: self.n });
        }
        Ok(())
    }

    fn check_edge_index(&self, e: usize) -> Result<(), HypergraphError> {
        if e >= self.m() {
            return Err(HypergraphError::InvalidEdge { index: e, m: self.m() });
        }
        Ok(())
    }

    /// Whether vertex `v` (1-based) lies in edge `e`.
    #[inline]
    pub fn edge_contains(&self, e: usize, v: usize) -> bool {
        match &self.masks {
            Some(masks) => {
                let i = v - 1;
                masks.row(e)[i / 64] & (1u64 << (i % 64)) != 0
            }
            None => self.edge(e).binary_search(&(v as u32)).is_ok(),
        }
    }

    /// `|e ∩ f|`.
    pub fn intersection_size(&self, e: usize, f: usize) -> usize {
        match &self.masks {
            Some(masks) => masks
                .row(e)
                .iter()
                .zip(masks.row(f))
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum(),
            None => merge_count(self.edge(e), self.edge(f), |_| true),
        }
    }

    /// Whether `(a ∩ b) \ c` is nonempty.
    fn meet_outside(&self, a: usize, b: usize, c: usize) -> bool {
        match &self.masks {
            Some(masks) => masks
                .row(a)
                .iter()
                .zip(masks.row(b))
                .zip(masks.row(c))
                .any(|((x, y), z)| x & y & !z != 0),
            None => merge_count(self.edge(a), self.edge(b), |v| !self.edge_contains(c, v as usize)) > 0,
        }
    }

    /// Number of edges containing `v`.
    pub fn vertex_degree(&self, v: usize) -> Result<usize, HypergraphError> {
        self.check_vertex(v)?;
        Ok(self.incidence[v - 1].len())
    }

    /// Maximum vertex degree `Δ(H)`.
    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges other than `e` meeting `e`, ascending.
    pub fn neighbors(&self, e: usize) -> Result<Vec<usize>, HypergraphError> {
        self.check_edge_index(e)?;
        let mut out: Vec<usize> = self
            .edge(e)
            .iter()
            .flat_map(|&v| self.incidence[v as usize - 1].iter().map(|&f| f as usize))
            .filter(|&f| f != e)
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Number of other edges intersecting edge `e`.
    pub fn edge_degree(&self, e: usize) -> Result<usize, HypergraphError> {
        Ok(self.neighbors(e)?.len())
    }

    /// Maximum edge degree over all edges (0 for an edgeless hypergraph).
    pub fn max_edge_degree(&self) -> usize {
        (0..self.m()).map(|e| self.neighbors(e).map_or(0, |v| v.len())).max().unwrap_or(0)
    }

    /// For every pair `e < f` of edges that meet, calls `visit(e, f, |e ∩ f|)`.
    fn for_each_meeting_pair(&self, mut visit: impl FnMut(usize, usize, usize)) {
        let mut shared = vec![0usize; self.m()];
        let mut touched = Vec::new();
        for e in 0..self.m() {
            for &v in self.edge(e) {
                for &f in &self.incidence[v as usize - 1] {
                    let f = f as usize;
                    if f > e {
                        if shared[f] == 0 {
                            touched.push(f);
                        }
                        shared[f] += 1;
                    }
                }
            }
            for &f in &touched {
                visit(e, f, shared[f]);
                shared[f] = 0;
            }
            touched.clear();
        }
    }

    /// True iff every two distinct edges share at most `l` vertices.
    pub fn is_l_simple(&self, l: usize) -> bool {
        let mut ok = true;
        self.for_each_meeting_pair(|_, _, size| ok &= size <= l);
        ok
    }

    /// Number of pairs `e < f` with `|e ∩ f| >= min_size`.
    pub fn count_heavy_pairs(&self, min_size: usize) -> usize {
        let min_size = min_size.max(1);
        let mut count = 0;
        self.for_each_meeting_pair(|_, _, size| count += usize::from(size >= min_size));
        count
    }

    /// All 3-cycles `{e, f, h}` containing edge `e`: the three sets
    /// `(e∩f)\h`, `(e∩h)\f`, `(f∩h)\e` must all be nonempty.
    ///
    /// Each triangle is reported once, ascending.
    pub fn triangles_containing(&self, e: usize) -> Result<Vec<Triangle>, HypergraphError> {
        let nbrs = self.neighbors(e)?;
        let mut out = Vec::new();
        for (i, &f) in nbrs.iter().enumerate() {
            for &h in &nbrs[i + 1..] {
                if self.meet_outside(e, f, h) && self.meet_outside(e, h, f) && self.meet_outside(f, h, e) {
                    out.push(Triangle::new(e, f, h));
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// `|T_e|` for every edge.
    pub fn triangle_counts(&self) -> Vec<usize> {
        (0..self.m()).map(|e| self.triangles_containing(e).map_or(0, |t| t.len())).collect()
    }

    /// Max over edges of the number of triangles containing it.
    pub fn max_triangles_per_edge(&self) -> usize {
        self.triangle_counts().into_iter().max().unwrap_or(0)
    }

    /// Total number of distinct triangles.
    pub fn triangle_count(&self) -> usize {
        self.triangle_counts().iter().sum::<usize>() / 3
    }

    /// `D(u', u)`: the number of triangles in `T_u` that contain `u'`.
    pub fn edge_degree_wrt(&self, u_prime: usize, u: usize) -> Result<usize, HypergraphError> {
        self.check_edge_index(u_prime)?;
        if u_prime == u {
            return Err(HypergraphError::SameEdge(u));
        }
        Ok(self.triangles_containing(u)?.iter().filter(|t| t.contains(u_prime)).count())
    }

    /// `d(v, u)`: the number of triangles `(u, u', u'')` in `T_u` with
    /// `v ∈ (u' ∩ u'') \ u`. Always 0 when `v ∈ u`.
    pub fn vertex_degree_wrt(&self, v: usize, u: usize) -> Result<usize, HypergraphError> {
        self.check_vertex(v)?;
        let triangles = self.triangles_containing(u)?;
        if self.edge_contains(u, v) {
            return Ok(0);
        }
        Ok(triangles
            .iter()
            .filter(|t| {
                let (a, b) = t.others(u);
                self.edge_contains(a, v) && self.edge_contains(b, v)
            })
            .count())
    }

    /// True iff no edge is monochromatic under `coloring`.
    pub fn is_proper(&self, coloring: &Coloring) -> Result<bool, HypergraphError> {
        if coloring.len() != self.n {
            return Err(HypergraphError::LengthMismatch { got: coloring.len(), n: self.n });
        }
        Ok(self.first_monochromatic(coloring.as_slice()).is_none())
    }

    /// Index of the first monochromatic edge under a length-n color slice.
    pub(crate) fn first_monochromatic(&self, colors: &[u32]) -> Option<usize> {
        self.edges().position(|e| {
            let c = colors[e[0] as usize - 1];
            e[1..].iter().all(|&v| colors[v as usize - 1] == c)
        })
    }

    /// The subhypergraph keeping the edges selected by `keep`, order preserved.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &[u32]) -> bool) -> Hypergraph {
        let flat = self
            .edges()
            .enumerate()
            .filter(|(i, e)| keep(*i, e))
            .flat_map(|(_, e)| e.iter().copied())
            .collect();
        Self::from_flat_unchecked(self.n, self.k, flat)
    }

    /// Whole-hypergraph triangle statistics (see [`StructuralReport`]).
    pub fn structural_report(&self, omega: usize) -> StructuralReport {
        let mut max_triangles = 0;
        let mut total = 0;
        let mut max_edge_wrt = 0;
        let mut max_vertex_wrt = 0;
        let mut per_edge = vec![0usize; self.m()];
        let mut per_vertex = vec![0usize; self.n];
        for u in 0..self.m() {
            let triangles = self.triangles_containing(u).expect("valid edge index");
            max_triangles = max_triangles.max(triangles.len());
            total += triangles.len();
            for t in &triangles {
                let (a, b) = t.others(u);
                per_edge[a] += 1;
                per_edge[b] += 1;
                for &v in self.edge(a) {
                    if self.edge_contains(b, v as usize) && !self.edge_contains(u, v as usize) {
                        per_vertex[v as usize - 1] += 1;
                    }
                }
            }
            for t in &triangles {
                let (a, b) = t.others(u);
                max_edge_wrt = max_edge_wrt.max(per_edge[a]).max(per_edge[b]);
                per_edge[a] = 0;
                per_edge[b] = 0;
                for &v in self.edge(a) {
                    max_vertex_wrt = max_vertex_wrt.max(per_vertex[v as usize - 1]);
                    per_vertex[v as usize - 1] = 0;
                }
            }
        }
        let is_2simple = self.is_l_simple(2);
        StructuralReport {
            n: self.n,
            k: self.k,
            m: self.m(),
            max_degree: self.max_degree(),
            max_edge_degree: self.max_edge_degree(),
            is_2simple,
            heavy_pairs: self.count_heavy_pairs(3),
            triangles: total / 3,
            max_triangles,
            omega,
            max_triangles_le_omega: max_triangles <= omega,
            max_edge_degree_wrt: max_edge_wrt,
            max_vertex_degree_wrt: max_vertex_wrt,
            max_edge_degree_wrt_le_4: max_edge_wrt <= 4,
            max_vertex_degree_wrt_le_4: max_vertex_wrt <= 4,
        }
    }
}

/// Counts elements common to two ascending slices that pass `pred`.
fn merge_count(a: &[u32], b: &[u32], pred: impl Fn(u32) -> bool) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += usize::from(pred(a[i]));
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Structural statistics of a hypergraph: the events that decide membership
/// in the class of 2-simple hypergraphs with few 3-cycles per edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub max_degree: usize,
    pub max_edge_degree: usize,
    pub is_2simple: bool,
    /// Pairs of edges sharing at least 3 vertices.
    pub heavy_pairs: usize,
    /// Total number of distinct triangles.
    pub triangles: usize,
    /// `max_e |T_e|`.
    pub max_triangles: usize,
    pub omega: usize,
    pub max_triangles_le_omega: bool,
    /// `max D(u', u)` over all pairs of edges.
    pub max_edge_degree_wrt: usize,
    /// `max d(v, u)` over all vertices and edges.
    pub max_vertex_degree_wrt: usize,
    pub max_edge_degree_wrt_le_4: bool,
    pub max_vertex_degree_wrt_le_4: bool,
}

impl StructuralReport {
    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("m", self.m.to_string()),
            ("max_degree", self.max_degree.to_string()),
            ("max_edge_degree", self.max_edge_degree.to_string()),
            ("2simple", self.is_2simple.to_string()),
            ("heavy_pairs", self.heavy_pairs.to_string()),
            ("triangles", self.triangles.to_string()),
            ("max_triangles", self.max_triangles.to_string()),
            ("omega", self.omega.to_string()),
            ("max_triangles_le_omega", self.max_triangles_le_omega.to_string()),
            ("max_D", self.max_edge_degree_wrt.to_string()),
            ("max_d", self.max_vertex_degree_wrt.to_string()),
            ("max_D_le_4", self.max_edge_degree_wrt_le_4.to_string()),
            ("max_d_le_4", self.max_vertex_degree_wrt_le_4.to_string()),
        ]
    }
}

/// A vertex coloring: entry `i` is the (positive) color of vertex `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("vertex {0} has color 0; colors are positive")]
    ZeroColor(usize),
    #[error("vertex {vertex} has a list of size {got}, expected {r}")]
    ListSize { vertex: usize, got: usize, r: usize },
    #[error("vertex {0} has a list with a repeated or zero color")]
    BadList(usize),
}

impl Coloring {
    pub fn new(colors: Vec<u32>) -> Result<Self, ColoringError> {
        if let Some(i) = colors.iter().position(|&c| c == 0) {
            return Err(ColoringError::ZeroColor(i + 1));
        }
        Ok(Coloring(colors))
    }

    pub(crate) fn from_vec_unchecked(colors: Vec<u32>) -> Self {
        debug_assert!(colors.iter().all(|&c| c > 0));
        Coloring(colors)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Color of vertex `v` (1-based).
    pub fn color(&self, v: usize) -> u32 {
        self.0[v - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Lists of admissible colors, one r-set per vertex, each stored ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ListAssignment {
    r: usize,
    lists: Vec<Vec<u32>>,
}

impl ListAssignment {
    pub fn new(r: usize, lists: Vec<Vec<u32>>) -> Result<Self, ColoringError> {
        let mut sorted = Vec::with_capacity(lists.len());
        for (i, mut list) in lists.into_iter().enumerate() {
            if list.len() != r {
                return Err(ColoringError::ListSize { vertex: i + 1, got: list.len(), r });
            }
            list.sort_unstable();
            if list.first() == Some(&0) || list.windows(2).any(|w| w[0] == w[1]) {
                return Err(ColoringError::BadList(i + 1));
            }
            sorted.push(list);
        }
        Ok(ListAssignment { r, lists: sorted })
    }

    /// Every vertex gets the list `{1, ..., r}`.
    pub fn uniform(n: usize, r: usize) -> Self {
        ListAssignment { r, lists: vec![(1..=r as u32).collect(); n] }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// `L(v)` for 1-based `v`.
    pub fn list(&self, v: usize) -> &[u32] {
        &self.lists[v - 1]
    }

    /// `M(e) = ⋂_{s ∈ e} L(s)`.
    pub fn common_colors(&self, edge: &[u32]) -> Vec<u32> {
        let mut common = self.list(edge[0] as usize).to_vec();
        for &v in &edge[1..] {
            let l = self.list(v as usize);
            common.retain(|c| l.binary_search(c).is_ok());
        }
        common
    }

    /// Whether every vertex's color is drawn from its list.
    pub fn admits(&self, coloring: &Coloring) -> bool {
        coloring.len() == self.len()
            && coloring.as_slice().iter().zip(&self.lists).all(|(c, l)| l.binary_search(c).is_ok())
    }
}
