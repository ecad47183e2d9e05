//! Reverse map projection embeddings and equivariant quantum circuits.
//!
//! This crate implements the family `E_alpha` of classical-to-quantum
//! embeddings obtained by inverting central projections of the unit
//! hypersphere onto its tangent hyperplane, together with the machinery
//! needed to use them in practice:
//!
//! - [`projections`]: central projections, the `P_alpha` family and the
//!   restricted domains on which each `P_alpha` is a bijection,
//! - [`embeddings`]: the reverse maps `E_alpha`, their closed-form last
//!   coordinate, and the amplitude-embedding baseline,
//! - [`symmetry`]: finite-group unitary representations, twirling, and
//!   equivariance checks,
//! - [`simulator`]: a dense complex statevector simulator,
//! - [`model`]: the two 8-qubit ansatz circuits and the forward pass,
//! - [`data`]: Fashion-MNIST ingestion and the image pipeline,
//! - [`optimize`]: derivative-free minimizers (Nelder-Mead, SPSA),
//! - [`training`]: the end-to-end classification experiment.
//!
//! The geometric core is generic over the scalar type through the
//! [`Real`] trait; `f64` aliases are exported at the crate root.

pub mod data;
pub mod embeddings;
pub mod model;
pub mod optimize;
pub mod projections;
pub mod simulator;
pub mod symmetry;
pub mod training;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Scalar type the geometric core is generic over: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Sum<Self> + Debug + Display + 'static {}

impl<T> Real for T where T: Float + FromPrimitive + Sum<Self> + Debug + Display + 'static {}

/// Double-precision aliases for the generic core types.
pub type Alpha64 = projections::Alpha<f64>;
pub type HyperplaneSpec64 = projections::HyperplaneSpec<f64>;
pub type ProjectionDomain64 = projections::ProjectionDomain<f64>;
pub type EmbeddingConfig64 = embeddings::EmbeddingConfig<f64>;
pub type EmbeddedVector64 = embeddings::EmbeddedVector<f64>;
pub type Representation64 = symmetry::Representation<f64>;
pub type QuantumState64 = simulator::QuantumState<f64>;
