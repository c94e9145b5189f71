//! Dense linear algebra and tape-based reverse-mode differentiation sized for
//! the relational message passing model: matrix-vector products, elementwise
//! nonlinearities, softmax, and Adam updates. All arithmetic is `f64`.

mod adam;
mod matrix;
mod tape;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use matrix::{dot, leaky_relu, matvec, relu, softmax, Matrix};
pub use tape::{Gradients, ParamId, ParamStore, Tape, Var};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("shape mismatch in {op}: expected {expected}, got {actual}")]
    Shape {
        op: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in {op}")]
    NonFinite { op: &'static str },
    #[error("{op} of an empty input")]
    Empty { op: &'static str },
    #[error("unknown tape node {0}")]
    UnknownNode(usize),
    #[error("recorded graph has a cycle at node {0}")]
    Cycle(usize),
}
