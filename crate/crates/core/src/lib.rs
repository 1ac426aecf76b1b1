//! Trainability laboratory for variational quantum circuits.
//!
//! Builds logical ansatz circuits, compiles them for a coupling-constrained
//! backend, and compares parameter-shift gradient variance before and after
//! compilation.

pub mod ansatz;
pub mod backend;
pub mod circuit;
pub mod error;
pub mod grad;
pub mod harness;
pub mod rng;
pub mod sim;
pub mod text;
pub mod transpiler;

pub use ansatz::AnsatzKind;
pub use backend::{BackendModel, BackendRef};
pub use circuit::{Circuit, ConcreteCircuit, Gate, GateKind, ParamExpr, StructuralMetrics};
pub use error::{Error, Result};
pub use grad::{GradStats, ReparamMode};
pub use transpiler::{TranspileOptions, TranspiledCircuit};
