//! Colorability of random k-uniform hypergraphs.
//!
//! The crate is organised around a handful of independent pieces:
//!
//! - [`hypergraph`]: immutable k-uniform hypergraphs, colorings, structural
//!   statistics (l-simplicity, 3-cycles, triangle degrees) and a text format.
//! - [`model`]: sampling from the binomial model `H(n, k, p)`.
//! - [`recolor`]: the two-phase random recoloring colorer, for ordinary
//!   r-colorings and for colorings from lists.
//! - [`bounds`]: log-space evaluation of threshold and degree bounds and of
//!   the Local Lemma feasibility conditions.
//! - [`oracle`]: exact backtracking answers for small instances.
//! - [`sweep`]: the seeded, parallel Monte Carlo harness producing CSV rows.

pub mod bounds;
pub mod combinatorics;
pub mod hypergraph;
pub mod logspace;
pub mod model;
pub mod oracle;
pub mod recolor;
pub mod rng;
pub mod sweep;

pub use hypergraph::{Coloring, Hypergraph, HypergraphError, ListAssignment, ParseError, Triangle};
pub use logspace::LogValue;
pub use model::ModelParams;
