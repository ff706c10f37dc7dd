//! Gradients of variational qubit and continuous-variable circuits using the
//! recipes a hardware backend can run: parameter shifts, ancilla-controlled
//! linear combinations of unitaries, and Heisenberg-picture shift rules.
//!
//! Everything is generic over the real scalar type; the aliases at the crate
//! root fix it to `f64`.

pub mod circuit;
pub mod cv;
pub mod error;
pub mod hybrid;
pub mod linalg;
pub mod qubit;
pub mod scalar;

pub use error::{Error, ErrorKind, Result};
pub use hybrid::{check, expectation, grad, optimize, GradMethod, GradOptions, Gradient, OptTrace};
pub use scalar::Real;

/// A derivative together with the number of expectation evaluations spent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative<T> {
    pub value: T,
    pub evaluations: usize,
}

pub type Circuit = circuit::CircuitIR<f64>;
pub type Matrix = linalg::CMatrix<f64>;
pub type State = qubit::StateVector<f64>;
pub type Polynomial = cv::poly::QuadPolynomial<f64>;
