//! Two-phase random recoloring.
//!
//! Phase 1 colors every vertex uniformly at random. Phase 2 walks the
//! vertices in ascending order; vertex `i` takes its proposal `η_i` instead
//! of its Phase 1 color `ξ_i` when
//!
//! - `D_i`: some edge through `i` was monochromatic under `ξ` and none of its
//!   already processed vertices has been recolored,
//! - `η_i != 0`, and
//! - not `A_i`: no edge `f` through `i` that is almost monochromatic in
//!   `u = η_i` under `ξ` would become monochromatic in `u` by the recolor.
//!
//! An edge is almost monochromatic in `u` when between 1 and `t + ω - 2` of
//! its vertices have a `ξ`-color other than `u`.
//!
//! Each trial draws from its own stream `(seed, trial index)`: `n` Phase 1
//! colors, then `n` proposals (one per vertex, whether used or not).

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::hypergraph::{Coloring, Hypergraph, HypergraphError, ListAssignment};
use crate::rng::{stream_rng, StreamRng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecolorError {
    #[error("invalid recoloring parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("list assignment has {lists} lists of size {r_lists}; expected {n} lists of size {r}")]
    ListMismatch { lists: usize, r_lists: usize, n: usize, r: usize },
}

fn params_err(msg: impl Into<String>) -> RecolorError {
    RecolorError::Params(msg.into())
}

/// Parameters of the recoloring procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecoloringParams {
    pub r: usize,
    pub alpha: f64,
    pub b: f64,
    pub t: u64,
    pub q: f64,
    /// Probability of each nonzero proposal, `q / (r - 1)`.
    pub p_recolor: f64,
    pub omega: u64,
    /// `b <= t < k - ω`.
    pub condition1: bool,
    /// `2/k <= q <= 1/2`.
    pub condition2: bool,
    /// The derived `q` was lowered to `(r - 1)/r` so that `r p_recolor <= 1`.
    pub q_capped: bool,
}

/// Validity flags carried into every [`TrialOutcome`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamFlags {
    pub condition1: bool,
    pub condition2: bool,
    pub q_capped: bool,
}

/// Derives `t` and `q` from `(k, α)` and flags the two parameter conditions.
pub fn derive_params(k: usize, r: usize, alpha: f64, b: f64, omega: u64) -> Result<RecoloringParams, RecolorError> {
    if k < 3 {
        return Err(params_err(format!("k must be at least 3, got {k}")));
    }
    if r < 2 {
        return Err(params_err(format!("r must be at least 2, got {r}")));
    }
    let kf = k as f64;
    let t = bounds::t_param(kf, alpha)?;
    let q_raw = alpha * kf.ln() / kf;
    let q_max = (r - 1) as f64 / r as f64;
    let q_capped = q_raw > q_max;
    let q = q_raw.min(q_max);
    Ok(RecoloringParams {
        r,
        alpha,
        b,
        t,
        q,
        p_recolor: q / (r - 1) as f64,
        omega,
        condition1: b <= t as f64 && t + omega < k as u64,
        condition2: 2.0 / kf <= q_raw && q_raw <= 0.5,
        q_capped,
    })
}

impl RecoloringParams {
    /// Replaces `q` (and `p_recolor`). Rejects values with `r p_recolor > 1`.
    pub fn with_q(mut self, q: f64) -> Result<Self, RecolorError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(params_err(format!("q must lie in (0, 1), got {q}")));
        }
        let p = q / (self.r - 1) as f64;
        if self.r as f64 * p > 1.0 + 1e-12 {
            return Err(params_err(format!("r * p_recolor = {} exceeds 1", self.r as f64 * p)));
        }
        self.q = q;
        self.p_recolor = p;
        self.q_capped = false;
        Ok(self)
    }

    pub fn with_t(mut self, t: u64) -> Self {
        self.t = t;
        self
    }

    pub fn with_omega(mut self, omega: u64) -> Self {
        self.omega = omega;
        self
    }

    pub fn flags(&self) -> ParamFlags {
        ParamFlags { condition1: self.condition1, condition2: self.condition2, q_capped: self.q_capped }
    }

    /// Upper end `t + ω - 2` of the almost-monochromatic window.
    fn am_limit(&self) -> i64 {
        self.t as i64 + self.omega as i64 - 2
    }

    fn validate(&self) -> Result<(), RecolorError> {
        if self.r < 2 {
            return Err(params_err(format!("r must be at least 2, got {}", self.r)));
        }
        if !(self.p_recolor > 0.0) || self.r as f64 * self.p_recolor > 1.0 + 1e-12 {
            return Err(params_err(format!("need 0 < p_recolor and r * p_recolor <= 1, got p_recolor = {}", self.p_recolor)));
        }
        Ok(())
    }
}

/// `AM(e, u)`: between 1 and `t + ω - 2` vertices of `e` have a `ξ`-color
/// other than `u`.
pub fn is_almost_monochromatic(h: &Hypergraph, e: usize, u: u32, xi: &Coloring, params: &RecoloringParams) -> bool {
    almost_mono(h.edge(e), u, xi.as_slice(), params.am_limit())
}

fn almost_mono(edge: &[u32], u: u32, xi: &[u32], limit: i64) -> bool {
    let off = edge.iter().filter(|&&s| xi[s as usize - 1] != u).count() as i64;
    off >= 1 && off <= limit
}

/// Phase 1: each vertex uniform on `{1, ..., r}`.
pub fn phase1(h: &Hypergraph, params: &RecoloringParams, rng: &mut StreamRng) -> Coloring {
    let r = params.r as u32;
    Coloring::from_vec_unchecked((0..h.n()).map(|_| rng.random_range(1..=r)).collect())
}

fn phase1_lists(lists: &ListAssignment, rng: &mut StreamRng) -> Coloring {
    let r = lists.r();
    Coloring::from_vec_unchecked((1..=lists.len()).map(|v| lists.list(v)[rng.random_range(0..r)]).collect())
}

/// Proposals: slot `j < r` with probability `p` each, otherwise 0.
fn draw_slots(n: usize, r: usize, p: f64, rng: &mut StreamRng) -> Vec<Option<usize>> {
    (0..n)
        .map(|_| {
            let slot = (rng.random::<f64>() / p) as usize;
            (slot < r).then_some(slot)
        })
        .collect()
}

fn draw_eta(n: usize, params: &RecoloringParams, rng: &mut StreamRng) -> Vec<u32> {
    draw_slots(n, params.r, params.p_recolor, rng).into_iter().map(|s| s.map_or(0, |j| j as u32 + 1)).collect()
}

fn draw_eta_lists(lists: &ListAssignment, params: &RecoloringParams, rng: &mut StreamRng) -> Vec<u32> {
    draw_slots(lists.len(), lists.r(), params.p_recolor, rng)
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.map_or(0, |j| lists.list(i + 1)[j]))
        .collect()
}

/// The Phase 2 pass, one vertex per [`ColorerState::step`].
#[derive(Debug, Clone)]
pub struct ColorerState<'h> {
    h: &'h Hypergraph,
    xi: Vec<u32>,
    eta: Vec<u32>,
    /// Final for vertices before the cursor, equal to `ξ` from it on.
    zeta: Vec<u32>,
    /// 0-based index of the next vertex to process.
    cursor: usize,
    /// Edges monochromatic under `ξ`.
    xi_mono: Vec<bool>,
    /// A processed vertex of the edge changed color.
    broken: Vec<bool>,
    am_limit: i64,
    recolored: usize,
}

impl<'h> ColorerState<'h> {
    pub fn new(h: &'h Hypergraph, params: &RecoloringParams, xi: &Coloring, eta: Vec<u32>) -> Self {
        assert_eq!(xi.len(), h.n(), "xi length");
        assert_eq!(eta.len(), h.n(), "eta length");
        let xi = xi.as_slice().to_vec();
        let xi_mono = h
            .edges()
            .map(|e| {
                let c = xi[e[0] as usize - 1];
                e[1..].iter().all(|&s| xi[s as usize - 1] == c)
            })
            .collect::<Vec<_>>();
        ColorerState {
            h,
            zeta: xi.clone(),
            xi,
            eta,
            cursor: 0,
            broken: vec![false; xi_mono.len()],
            xi_mono,
            am_limit: params.am_limit(),
            recolored: 0,
        }
    }

    pub fn xi(&self) -> &[u32] {
        &self.xi
    }

    pub fn eta(&self) -> &[u32] {
        &self.eta
    }

    pub fn zeta(&self) -> &[u32] {
        &self.zeta
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_done(&self) -> bool {
        self.cursor == self.h.n()
    }

    /// Vertices whose final color differs from `ξ` so far.
    pub fn recolored_count(&self) -> usize {
        self.recolored
    }

    /// Event `D_i` for the vertex at the cursor.
    fn event_d(&self, i: usize) -> bool {
        self.h.incident_edges(i + 1).iter().any(|&e| self.xi_mono[e as usize] && !self.broken[e as usize])
    }

    /// Event `A_i` for the vertex at the cursor with proposal `u`.
    fn event_a(&self, i: usize, u: u32) -> bool {
        if self.xi[i] == u {
            return false;
        }
        let v = i as u32 + 1;
        self.h.incident_edges(i + 1).iter().any(|&f| {
            let edge = self.h.edge(f as usize);
            almost_mono(edge, u, &self.xi, self.am_limit)
                && edge.iter().filter(|&&s| s != v).all(|&s| self.zeta[s as usize - 1] == u)
        })
    }

    /// Decides `ζ` for the vertex at the cursor and advances. Returns whether
    /// the vertex took its proposal.
    pub fn step(&mut self) -> bool {
        assert!(!self.is_done(), "phase 2 already finished");
        let i = self.cursor;
        let u = self.eta[i];
        let take = u != 0 && self.event_d(i) && !self.event_a(i, u);
        if take && u != self.xi[i] {
            self.zeta[i] = u;
            self.recolored += 1;
            for &e in self.h.incident_edges(i + 1) {
                self.broken[e as usize] = true;
            }
        }
        self.cursor += 1;
        take
    }

    pub fn run(self) -> Coloring {
        self.finish().0
    }

    /// Processes the remaining vertices; returns `ζ` and the recolored count.
    pub fn finish(mut self) -> (Coloring, usize) {
        while !self.is_done() {
            self.step();
        }
        (Coloring::from_vec_unchecked(self.zeta), self.recolored)
    }
}

/// Phase 2 with explicit proposals (0 = none).
pub fn phase2_with_eta(h: &Hypergraph, params: &RecoloringParams, xi: &Coloring, eta: Vec<u32>) -> Coloring {
    ColorerState::new(h, params, xi, eta).run()
}

/// Phase 2: draws a proposal for every vertex from `rng`, then runs the pass.
pub fn phase2(h: &Hypergraph, params: &RecoloringParams, xi: &Coloring, rng: &mut StreamRng) -> Coloring {
    let eta = draw_eta(h.n(), params, rng);
    phase2_with_eta(h, params, xi, eta)
}

/// Result of a retry run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub coloring: Option<Coloring>,
    pub trials_used: usize,
    /// Vertices recolored in Phase 2 of the successful trial.
    pub recolored_count: Option<usize>,
    pub flags: ParamFlags,
}

/// One trial's full trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub xi: Coloring,
    pub eta: Vec<u32>,
    pub zeta: Coloring,
    pub recolored: usize,
}

fn run_trial(h: &Hypergraph, params: &RecoloringParams, lists: Option<&ListAssignment>, seed: u64, index: u64) -> Trial {
    let mut rng = stream_rng(seed, index);
    let (xi, eta) = match lists {
        None => {
            let xi = phase1(h, params, &mut rng);
            (xi, draw_eta(h.n(), params, &mut rng))
        }
        Some(l) => {
            let xi = phase1_lists(l, &mut rng);
            (xi, draw_eta_lists(l, params, &mut rng))
        }
    };
    let (zeta, recolored) = ColorerState::new(h, params, &xi, eta.clone()).finish();
    Trial { xi, eta, zeta, recolored }
}

/// The trace of trial `index` under `seed`.
pub fn trial(h: &Hypergraph, params: &RecoloringParams, seed: u64, index: u64) -> Result<Trial, RecolorError> {
    params.validate()?;
    Ok(run_trial(h, params, None, seed, index))
}

/// The trace of trial `index` under `seed` for the list variant.
pub fn trial_from_lists(
    h: &Hypergraph,
    lists: &ListAssignment,
    params: &RecoloringParams,
    seed: u64,
    index: u64,
) -> Result<Trial, RecolorError> {
    check_lists(h, lists, params)?;
    Ok(run_trial(h, params, Some(lists), seed, index))
}

fn check_lists(h: &Hypergraph, lists: &ListAssignment, params: &RecoloringParams) -> Result<(), RecolorError> {
    params.validate()?;
    if lists.len() != h.n() || lists.r() != params.r {
        return Err(RecolorError::ListMismatch { lists: lists.len(), r_lists: lists.r(), n: h.n(), r: params.r });
    }
    Ok(())
}

fn accept(h: &Hypergraph, lists: Option<&ListAssignment>, t: Trial) -> Option<Trial> {
    let ok = h.first_monochromatic(t.zeta.as_slice()).is_none();
    ok.then(|| {
        assert!(h.is_proper(&t.zeta).unwrap_or(false), "returned coloring must be proper");
        if let Some(l) = lists {
            assert!(l.admits(&t.zeta), "returned coloring must respect the lists");
        }
        t
    })
}

fn outcome(found: Option<(u64, Trial)>, max_trials: usize, params: &RecoloringParams) -> TrialOutcome {
    match found {
        Some((i, t)) => TrialOutcome {
            success: true,
            coloring: Some(t.zeta),
            trials_used: i as usize + 1,
            recolored_count: Some(t.recolored),
            flags: params.flags(),
        },
        None => TrialOutcome {
            success: false,
            coloring: None,
            trials_used: max_trials,
            recolored_count: None,
            flags: params.flags(),
        },
    }
}

fn search(
    h: &Hypergraph,
    params: &RecoloringParams,
    lists: Option<&ListAssignment>,
    max_trials: usize,
    seed: u64,
    parallel: bool,
) -> Result<TrialOutcome, RecolorError> {
    if max_trials == 0 {
        return Err(params_err("max_trials must be at least 1"));
    }
    let attempt = |i: u64| accept(h, lists, run_trial(h, params, lists, seed, i)).map(|t| (i, t));
    let found = if parallel {
        (0..max_trials as u64).into_par_iter().find_map_first(attempt)
    } else {
        (0..max_trials as u64).find_map(attempt)
    };
    Ok(outcome(found, max_trials, params))
}

/// Runs trials `0, 1, ...` until one yields a proper coloring or
/// `max_trials` are spent.
pub fn color(h: &Hypergraph, params: &RecoloringParams, max_trials: usize, seed: u64) -> Result<TrialOutcome, RecolorError> {
    params.validate()?;
    search(h, params, None, max_trials, seed, false)
}

/// [`color`] with trials spread over the rayon pool; the reported trial is
/// the lowest-index success, so the outcome equals the serial one.
pub fn color_par(h: &Hypergraph, params: &RecoloringParams, max_trials: usize, seed: u64) -> Result<TrialOutcome, RecolorError> {
    params.validate()?;
    search(h, params, None, max_trials, seed, true)
}

/// List variant: `ξ_i` uniform on `L(i)`, proposals drawn from `L(i)`.
pub fn color_from_lists(
    h: &Hypergraph,
    lists: &ListAssignment,
    params: &RecoloringParams,
    max_trials: usize,
    seed: u64,
) -> Result<TrialOutcome, RecolorError> {
    check_lists(h, lists, params)?;
    search(h, params, Some(lists), max_trials, seed, false)
}
