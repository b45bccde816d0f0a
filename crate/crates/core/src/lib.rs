//! Signature representations of linear stochastic Volterra and delay processes.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor_algebra`] holds the truncated tensor algebra `T^M(R^d)` with
//!   concatenation and shuffle products, resolvents and shuffle exponentials.
//! * [`signature_engine`] samples Brownian paths and builds signature streams
//!   of the time-augmented path `(t, W_t)`.
//! * [`representations`] constructs the coefficient tensors `ℓ` for Volterra,
//!   delay and Gaussian Volterra processes.
//! * [`analysis`] provides the weight functions, norms and moment bounds.
//! * [`simulators`] are reference schemes driven by the same increments.
//! * [`experiments`] wires everything into MSE tables, trajectories and the
//!   invariant report used by the `sigrep` binary.
//!
//! Letter `1` of the alphabet is always the time coordinate.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod representations;
pub mod signature_engine;
pub mod simulators;
pub mod tensor_algebra;

pub use error::{Error, Result};
pub use experiments::{CheckReport, ExperimentConfig, ModelId, MseTable};
pub use representations::{
    DelayParams, DiracMixture, ExpSumKernel, Functional, SmoothKernel, TimeVaryingFunctional,
    VolterraParams,
};
pub use signature_engine::{BrownianPath, SignatureStream, TimeGrid};
pub use simulators::ReferenceSeries;
pub use tensor_algebra::{Alphabet, DominationWitness, TruncatedTensor, Word, WitnessSide};
