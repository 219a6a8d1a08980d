//! Graph-directed iterated function systems on the real line.
//!
//! Construction from exact symbolic parameters, separation checks, gap-length
//! sets and a certified decision procedure for whether a graph-directed
//! attractor is also a self-similar set.

pub mod exactnum;
pub mod digraph;
pub mod construct;
pub mod gaps;
pub mod classify;
