//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: vertex {0} unreachable from {1}")]
    DisconnectedGraph(usize, usize),
    #[error("metric needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("net seed point {seed} is not in the ground set")]
    SeedOutsideGround { seed: usize },
    #[error("not an ultrametric: d({x},{z}) > max(d({x},{y}), d({y},{z}))")]
    NotUltrametric { x: usize, y: usize, z: usize },
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("cluster index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("input graph is not a tree")]
    NotATree,
    #[error("not a planar embedding: {0}")]
    NotPlanar(String),
    #[error("plane graph is not triangulated: face of length {0} found")]
    NotTriangulated(usize),
    #[error("vertex sequence is not a shortest path")]
    NotAShortestPath,
    #[error("cover size exceeded its envelope after {retries} retries (size {size}, envelope {envelope})")]
    EnvelopeExceeded {
        retries: usize,
        size: usize,
        envelope: f64,
    },
    #[error("permutation model needs even n and even d, got n={n}, d={d}")]
    BadParity { n: usize, d: usize },
    #[error("cannot block n={n} into q={q} groups for t={t}")]
    InfeasibleBlocking { n: usize, q: usize, t: usize },
    #[error("bipartite expander needs equal sides, got {left} and {right}")]
    UnequalSides { left: usize, right: usize },
    #[error("operation does not apply to spanner mode {0}")]
    WrongMode(&'static str),
    #[error("graph is not regular: vertex {vertex} has degree {got}, expected {expected}")]
    NotRegular {
        vertex: usize,
        got: usize,
        expected: usize,
    },
    #[error("parameter ordering 0 < eps < 1/(3d) < 3/d < eta < 1 violated: eps={eps}, eta={eta}, d={d}")]
    BadParamOrder { eps: f64, eta: f64, d: usize },
    #[error("attack spec does not match target: {0}")]
    SpecMismatch(String),
    #[error("invalid cover: {0} uncovered pairs at t={1}")]
    InvalidCover(usize, f64),
    #[error("instance does not match family {0}")]
    FamilyMismatch(&'static str),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
