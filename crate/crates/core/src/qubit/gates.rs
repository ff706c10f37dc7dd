//! Qubit gate matrices and their Hermitian generators.
//!
//! Local matrices order their wires most-significant first: for a gate on
//! wires `[a, b]`, the first tensor factor acts on `a`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_traits::{One, Zero};

use crate::circuit::{GateKind, Pauli};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianEigen};
use crate::scalar::{creal, cx, lit, to_f64, tol, Cx, Real};

/// Hermiticity tolerance for generators.
pub const GENERATOR_HERMITIAN_TOL: f64 = 1e-12;

pub fn identity<T: Real>() -> CMatrix<T> {
    CMatrix::identity(2)
}

pub fn pauli<T: Real>(p: Pauli) -> CMatrix<T> {
    let (o, l, i) = (Cx::<T>::zero(), Cx::<T>::one(), cx(T::zero(), T::one()));
    match p {
        Pauli::X => CMatrix::from_rows(2, 2, vec![o, l, l, o]),
        Pauli::Y => CMatrix::from_rows(2, 2, vec![o, -i, i, o]),
        Pauli::Z => CMatrix::from_rows(2, 2, vec![l, o, o, -l]),
    }
}

pub fn pauli_word<T: Real>(word: &[Pauli]) -> CMatrix<T> {
    word.iter()
        .fold(CMatrix::identity(1), |acc, &p| acc.kron(&pauli::<T>(p)))
}

/// Hermitian generator `G` of a one-parameter gate `exp(−iμG)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator<T> {
    matrix: CMatrix<T>,
    label: String,
}

impl<T: Real> Generator<T> {
    pub fn new(matrix: CMatrix<T>, label: impl Into<String>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: matrix.cols(),
            });
        }
        let residual = (&matrix - &matrix.adjoint()).max_abs();
        if residual > tol::<T>(GENERATOR_HERMITIAN_TOL) * matrix.max_abs().max(T::one()) {
            return Err(Error::NonHermitian {
                residual: to_f64(residual),
            });
        }
        Ok(Self {
            matrix,
            label: label.into(),
        })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigen(&self) -> HermitianEigen<T> {
        HermitianEigen::new(&self.matrix)
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(c),
            label: format!("{c}*{}", self.label),
        }
    }
}

/// `exp(−iμG)` via the eigendecomposition of `G`.
pub fn gate_unitary<T: Real>(g: &Generator<T>, mu: T) -> CMatrix<T> {
    g.eigen().map(|lambda| {
        let phase = -mu * lambda;
        cx(phase.cos(), phase.sin())
    })
}

/// Generator for the differentiable argument of a parametrized qubit gate,
/// given the gate's resolved arguments. `None` for fixed gates.
pub fn gate_generator<T: Real>(kind: &GateKind<T>, args: &[T]) -> Option<Generator<T>> {
    let half = lit::<T>(0.5);
    let matrix = match kind {
        GateKind::Rx => pauli::<T>(Pauli::X).scale_real(half),
        GateKind::Ry => pauli::<T>(Pauli::Y).scale_real(half),
        GateKind::Rz => pauli::<T>(Pauli::Z).scale_real(half),
        GateKind::PauliRot(word) => pauli_word::<T>(word).scale_real(half),
        GateKind::ExpW => {
            let delta = args[1];
            &pauli::<T>(Pauli::X).scale_real(delta.cos()) + &pauli::<T>(Pauli::Y).scale_real(delta.sin())
        }
        GateKind::ExpZ => pauli(Pauli::Z),
        GateKind::Exp11 => {
            let mut m = CMatrix::zeros(4, 4);
            m[(3, 3)] = Cx::one();
            m
        }
        GateKind::CrossRes => cross_resonance_generator(args[1], args[2]),
        GateKind::Custom { generator, .. } => (**generator).clone(),
        _ => return None,
    };
    Some(Generator {
        matrix,
        label: kind.name(),
    })
}

/// `σx⊗I − b σz⊗σx + c I⊗σx`.
pub fn cross_resonance_generator<T: Real>(b: T, c: T) -> CMatrix<T> {
    let x = pauli::<T>(Pauli::X);
    let z = pauli::<T>(Pauli::Z);
    let i = identity::<T>();
    let xi = x.kron(&i);
    let zx = z.kron(&x).scale_real(b);
    let ix = i.kron(&x).scale_real(c);
    &(&xi - &zx) + &ix
}

/// Full local matrix of a qubit gate with resolved arguments.
pub fn gate_matrix<T: Real>(kind: &GateKind<T>, args: &[T]) -> CMatrix<T> {
    if let Some(g) = gate_generator(kind, args) {
        return gate_unitary(&g, args[0]);
    }
    let (o, l) = (Cx::<T>::zero(), Cx::<T>::one());
    let h = creal(lit::<T>(FRAC_1_SQRT_2));
    match kind {
        GateKind::Hadamard => CMatrix::from_rows(2, 2, vec![h, h, h, -h]),
        GateKind::PauliX => pauli(Pauli::X),
        GateKind::PauliY => pauli(Pauli::Y),
        GateKind::PauliZ => pauli(Pauli::Z),
        GateKind::SGate => CMatrix::diagonal(&[l, cx(T::zero(), T::one())]),
        GateKind::TGate => {
            let q = lit::<T>(std::f64::consts::FRAC_PI_4);
            CMatrix::diagonal(&[l, cx(q.cos(), q.sin())])
        }
        GateKind::Cnot => CMatrix::from_rows(4, 4, vec![l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o]),
        GateKind::Cz => CMatrix::diagonal(&[l, l, l, -l]),
        GateKind::Swap => CMatrix::from_rows(4, 4, vec![l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l]),
        other => panic!("{} is not a qubit gate", other.name()),
    }
}
