//! Brownian paths and truncated signatures of the time-augmented path `(t, W_t)`.
//!
//! Signatures are those of the piecewise-linear interpolation of the sampled
//! path, i.e. Stratonovich iterated integrals in the Wong–Zakai limit.

mod brownian;
pub mod dump;
mod expected;
mod functional;
mod sparse;
mod stream;

pub use brownian::{path_rng, sample_brownian, BrownianPath, TimeGrid};
pub use expected::{expected_signature, ito_residual};
pub use functional::{Functional, TimeVaryingFunctional};
pub use sparse::SparseSignature;
pub use stream::{evaluate, extend_by_segment, signature_stream, SegmentScratch, SignatureStream, SignatureWalker};
