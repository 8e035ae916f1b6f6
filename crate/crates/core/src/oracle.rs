//! Exact reference procedures for small instances: r-colorability,
//! chromatic number, list colorability and choosability over a bounded
//! palette.
//!
//! All searches are capped. A search that runs out of budget reports
//! `Unknown` rather than a guess.

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::binomial;
use crate::hypergraph::{Coloring, Hypergraph, ListAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    pub max_vertices: usize,
    /// Search nodes (single-vertex assignments) per colorability query.
    pub max_assignments: u64,
    /// List assignments enumerated by the choosability check.
    pub max_list_assignments: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vertices: 24, max_assignments: 100_000_000, max_list_assignments: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} vertices exceed the oracle cap of {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("{count} list assignments exceed the cap of {max}")]
    TooManyListAssignments { count: String, max: u64 },
    #[error("{0}")]
    Params(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Decision {
    Colorable(Coloring),
    NotColorable,
    /// The search budget ran out.
    Unknown,
}

impl Decision {
    pub fn is_colorable(&self) -> Option<bool> {
        match self {
            Decision::Colorable(_) => Some(true),
            Decision::NotColorable => Some(false),
            Decision::Unknown => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChromaticNumber {
    Exact { chi: usize, witness: Coloring },
    /// Budget ran out while deciding colorability with `at_least` colors.
    Unknown { at_least: usize },
}

/// Verdict of the palette-restricted choosability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Choosability {
    /// Every assignment of r-subsets of `{1, ..., palette}` admits a proper
    /// coloring from the lists. This says nothing about larger palettes.
    ChoosableOverPalette,
    /// This assignment admits no proper coloring.
    NotChoosable(ListAssignment),
    Unknown,
}

fn check_size(h: &Hypergraph, limits: &OracleLimits) -> Result<(), OracleError> {
    if h.n() > limits.max_vertices {
        return Err(OracleError::TooManyVertices { n: h.n(), max: limits.max_vertices });
    }
    Ok(())
}

enum Palette<'a> {
    /// Colors `1..=r`, new colors introduced in order.
    Symmetric(u32),
    Lists(&'a ListAssignment),
}

struct Search<'a> {
    h: &'a Hypergraph,
    palette: Palette<'a>,
    /// Vertices (0-based) in decreasing degree order.
    order: Vec<usize>,
    colors: Vec<u32>,
    /// `counts[e * stride + c]`: assigned vertices of edge `e` with color `c`.
    counts: Vec<u16>,
    stride: usize,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(h: &'a Hypergraph, palette: Palette<'a>, budget: u64) -> Self {
        let max_color = match &palette {
            Palette::Symmetric(r) => *r as usize,
            Palette::Lists(l) => (1..=l.len()).flat_map(|v| l.list(v).iter().copied()).max().unwrap_or(0) as usize,
        };
        let stride = max_color + 1;
        let mut order: Vec<usize> = (0..h.n()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(h.incident_edges(v + 1).len()));
        Search {
            h,
            palette,
            order,
            colors: vec![0; h.n()],
            counts: vec![0; h.m() * stride],
            stride,
            nodes: 0,
            budget,
        }
    }

    fn fits(&self, v: usize, c: u32) -> bool {
        let full = self.h.k() as u16 - 1;
        self.h.incident_edges(v + 1).iter().all(|&e| self.counts[e as usize * self.stride + c as usize] < full)
    }

    fn set(&mut self, v: usize, c: u32, add: bool) {
        for &e in self.h.incident_edges(v + 1) {
            let slot = &mut self.counts[e as usize * self.stride + c as usize];
            if add {
                *slot += 1;
            } else {
                *slot -= 1;
            }
        }
        self.colors[v] = if add { c } else { 0 };
    }

    /// `Some(true)` when a proper completion exists, `None` on budget exhaustion.
    fn dfs(&mut self, depth: usize, max_used: u32) -> Option<bool> {
        if depth == self.order.len() {
            return Some(true);
        }
        let v = self.order[depth];
        let candidates: Vec<u32> = match &self.palette {
            Palette::Symmetric(r) => (1..=(*r).min(max_used + 1)).collect(),
            Palette::Lists(l) => l.list(v + 1).to_vec(),
        };
        for c in candidates {
            if !self.fits(v, c) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            self.set(v, c, true);
            let found = self.dfs(depth + 1, max_used.max(c));
            if found != Some(false) {
                return found;
            }
            self.set(v, c, false);
        }
        Some(false)
    }

    fn decide(mut self) -> Decision {
        match self.dfs(0, 0) {
            Some(true) => {
                let witness = Coloring::from_vec_unchecked(self.colors);
                debug_assert!(self.h.is_proper(&witness).unwrap());
                Decision::Colorable(witness)
            }
            Some(false) => Decision::NotColorable,
            None => Decision::Unknown,
        }
    }
}

/// Decides whether `h` has a proper coloring with `r` colors.
pub fn is_r_colorable(h: &Hypergraph, r: usize, limits: &OracleLimits) -> Result<Decision, OracleError> {
    check_size(h, limits)?;
    if r == 0 {
        return Err(OracleError::Params("r must be at least 1".into()));
    }
    let decision = Search::new(h, Palette::Symmetric(r as u32), limits.max_assignments).decide();
    if let Decision::Colorable(w) = &decision {
        assert!(h.is_proper(w).unwrap_or(false), "oracle witness must be proper");
    }
    Ok(decision)
}

/// The least `r` for which `h` is r-colorable; 1 for an edgeless `h`.
pub fn chromatic_number(h: &Hypergraph, limits: &OracleLimits) -> Result<ChromaticNumber, OracleError> {
    check_size(h, limits)?;
    for r in 1..=h.n().max(1) {
        match is_r_colorable(h, r, limits)? {
            Decision::Colorable(witness) => return Ok(ChromaticNumber::Exact { chi: r, witness }),
            Decision::NotColorable => {}
            Decision::Unknown => return Ok(ChromaticNumber::Unknown { at_least: r }),
        }
    }
    unreachable!("n distinct colors always give a proper coloring of a uniform hypergraph with k >= 2")
}

/// Decides whether `h` has a proper coloring with every vertex colored from its list.
pub fn is_list_colorable(h: &Hypergraph, lists: &ListAssignment, limits: &OracleLimits) -> Result<Decision, OracleError> {
    check_size(h, limits)?;
    if lists.len() != h.n() {
        return Err(OracleError::Params(format!("{} lists for {} vertices", lists.len(), h.n())));
    }
    let decision = Search::new(h, Palette::Lists(lists), limits.max_assignments).decide();
    if let Decision::Colorable(w) = &decision {
        assert!(h.is_proper(w).unwrap_or(false) && lists.admits(w), "oracle witness must be a proper list coloring");
    }
    Ok(decision)
}

/// All r-subsets of `{1, ..., palette}` in lexicographic order.
fn r_subsets(palette: usize, r: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (1..=r as u32).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..r).rev().find(|&i| (cur[i] as usize) < palette - (r - 1 - i)) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Checks every assignment of r-subsets of `{1, ..., palette}` to the
/// non-isolated vertices for a proper list coloring. Isolated vertices get
/// `{1, ..., r}`, which cannot matter.
pub fn is_r_choosable_over_palette(
    h: &Hypergraph,
    r: usize,
    palette: usize,
    limits: &OracleLimits,
) -> Result<Choosability, OracleError> {
    check_size(h, limits)?;
    if r == 0 || palette < r {
        return Err(OracleError::Params(format!("need 1 <= r <= palette, got r = {r}, palette = {palette}")));
    }
    let active: Vec<usize> = (1..=h.n()).filter(|&v| !h.incident_edges(v).is_empty()).collect();
    let per_vertex = binomial(palette as u64, r as u64).unwrap_or(u64::MAX);
    let total = (per_vertex as u128).checked_pow(active.len() as u32);
    match total {
        Some(t) if t <= limits.max_list_assignments as u128 => {}
        _ => {
            return Err(OracleError::TooManyListAssignments {
                count: format!("C({palette}, {r})^{}", active.len()),
                max: limits.max_list_assignments,
            })
        }
    }
    let subsets = r_subsets(palette, r);
    let mut digits = vec![0usize; active.len()];
    let mut lists: Vec<Vec<u32>> = vec![(1..=r as u32).collect(); h.n()];
    let mut unknown = false;
    loop {
        for (&v, &d) in active.iter().zip(&digits) {
            lists[v - 1] = subsets[d].clone();
        }
        let assignment = ListAssignment::new(r, lists.clone()).expect("subsets are valid lists");
        match is_list_colorable(h, &assignment, limits)? {
            Decision::NotColorable => return Ok(Choosability::NotChoosable(assignment)),
            Decision::Unknown => unknown = true,
            Decision::Colorable(_) => {}
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(if unknown { Choosability::Unknown } else { Choosability::ChoosableOverPalette });
            }
            digits[i] += 1;
            if digits[i] < subsets.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
