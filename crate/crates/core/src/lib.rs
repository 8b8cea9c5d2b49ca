//! # qot-core
//!
//! Transportation cost and Lipschitz contraction for quantum channels on matrix
//! algebras, with the surrounding entropy and mixing-time tooling.
//!
//! Every supremum-type quantity (transportation cost, Lipschitz constant, dual
//! seminorm, expected length) is returned as a [`CostReport`]: a witness that
//! reproduces a certified lower bound, together with an upper bound and the
//! method tags that produced it. Exact values are only reported where a closed
//! form or exact combinatorics is available (finite groups, the depolarizing
//! family, SU(2) distances).
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, norms, functional calculus.
//! - [`channel`]: Kraus channels, superoperators, commutants, conditional expectations, index, Choi order.
//! - [`seminorm`]: commutator Lipschitz seminorms and their duals.
//! - [`transport`]: transportation cost, expected length, Wasserstein L-metric, property harness.
//! - [`contraction`]: Lipschitz constants, BKM machinery, relative entropy, LogLip.
//! - [`groups`]: Cayley word lengths and the commutative model.
//! - [`geometry`]: SU(2) Carnot–Carathéodory distance.
//! - [`mixing`]: trace, return and cost-induced mixing times.

#![forbid(unsafe_code)]

pub mod ascent;
pub mod channel;
pub mod contraction;
pub mod error;
pub mod geometry;
pub mod groups;
pub mod json;
pub mod linalg;
pub mod mixing;
pub mod report;
pub mod sampling;
pub mod seminorm;
pub mod transport;

pub use ascent::AscentConfig;
pub use channel::{ConditionalExpectation, QuantumChannel, SuperOperator};
pub use error::{Error, Result};
pub use groups::{FiniteGroupTable, WordLengthProfile};
pub use linalg::{ComplexMatrix, DensityMatrix, EigenDecomposition, HermitianMatrix, C64};
pub use report::{CostReport, Method};
pub use seminorm::{ResourceSet, SeminormKind, SeminormSpec};
