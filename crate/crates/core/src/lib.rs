//! Loopy annealing belief propagation (LABP) for maximum fractional matching
//! and minimum half-integral vertex cover.
//!
//! The crate is organised around the message-passing recursion
//! `m[u→v] = z / (1 + Σ_{w∈∂u∖v} m[w→u])` on the directed edges of a simple
//! graph:
//!
//! * [`bp`] runs the finite-`z` iteration with certified even/odd envelopes
//!   and extracts the fractional matching `x(z)`.
//! * [`zero_temp`] solves the `z → ∞` limit exactly: the smallest fixed point
//!   of the extended maps, the boolean max-product map, the half-integral
//!   cover and, on bipartite graphs, an integral minimum vertex cover.
//! * [`bethe`] evaluates the Bethe free entropy, exact matching polynomials
//!   and the loop-series correction.
//! * [`oracle`] holds deliberately naive brute-force ground truth used to
//!   certify everything above.
//!
//! The numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the CLI
//! and the acceptance suite use.

pub mod bethe;
pub mod bp;
mod error;
pub mod generators;
pub mod graph;
mod half;
pub mod oracle;
mod scalar;
pub mod zero_temp;

pub use error::{Error, Result};
pub use graph::{Bipartition, DirEdge, Graph, Side, Vertex};
pub use half::HalfInt;
pub use scalar::Scalar;

/// Finite-temperature messages with `f64` entries.
pub type MessageVec = bp::Messages<f64>;
/// Even/odd envelope state with `f64` entries.
pub type EnvelopeState = bp::Envelope<f64>;
/// Fractional matching with `f64` weights.
pub type FractionalMatching = bp::FractionalMatching<f64>;
/// Zero-temperature messages over `[0, ∞]` with `f64` finite parts.
pub type ExtMessageVec = zero_temp::ExtMessages<f64>;
/// Bethe analysis report with `f64` quantities.
pub type BetheReport = bethe::BetheReport<f64>;
pub use zero_temp::{BoolMsgVec, HalfIntegralCover, VertexCover};
