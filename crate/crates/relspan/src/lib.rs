//! Reliable spanners for finite metric spaces.
//!
//! A `t`-spanner is a sparse graph on the points of a metric space that
//! preserves all pairwise distances up to a factor `t`. A spanner is
//! *reliable* if removing an arbitrary attack set `B` of vertices only voids
//! the guarantee on a slightly larger damaged set `B̂ ⊇ B`: every pair of
//! points outside `B̂` still has a short path in the residual graph.
//!
//! This crate builds reliable spanners for uniform, ultrametric, tree,
//! planar, and general finite metrics, and certifies them empirically:
//!
//! * [`metric`], [`graph`], [`plane`], [`hst`] — finite metrics, weighted
//!   graphs, plane embeddings, and hierarchically well-separated trees.
//! * [`instance`] — deterministic instance generators (uniform, random
//!   trees, grids, random planar triangulations, layered lower-bound
//!   metrics).
//! * [`cover`] — metric covers: validation plus constructions for HSTs,
//!   trees, planar graphs, and general metrics, including the planar
//!   cycle-separator machinery.
//! * [`uniform`] — reliable spanners for the uniform metric: oblivious
//!   constellations and permutation-model expander constructions, with the
//!   shadow-closure damage computation.
//! * [`lab`] — empirical expander certification: second eigenvalue, mixing
//!   inequality, vertex-expansion and self-edge density checks.
//! * [`compose`] — cover-to-spanner reductions, constructive damaged sets,
//!   and residual stretch/hop verification.
//! * [`attack`] — attack generation, greedy damaged-set upper bounds, and
//!   batch experiments.
//! * [`io`] — file formats, [`cli`] — the command-line front end, and
//!   [`suite`] — the smoke/acceptance batteries.
//!
//! Every construction is deterministic given its seed. See the `examples/`
//! directory for one runnable walkthrough per capability.

pub mod attack;
pub mod cli;
pub mod compose;
pub mod cover;
pub mod error;
pub mod graph;
pub mod hst;
pub mod instance;
pub mod io;
pub mod lab;
pub mod metric;
pub mod plane;
pub mod suite;
pub mod uniform;
pub mod util;

pub use error::{Error, Result};
