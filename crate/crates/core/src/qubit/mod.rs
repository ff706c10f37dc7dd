//! Qubit statevector simulation and gradient recipes.

pub mod engine;
pub mod gates;
pub mod grad;
pub mod lcu;

pub use engine::{
    circuit_expectation, expectation, run, sample_expectation, sample_observable, HermitianObservable,
    SampleEstimate, StateVector,
};
pub use gates::{gate_generator, gate_matrix, gate_unitary, Generator};
pub use grad::{
    analyze_generator, exact_gradient, finite_difference, sampled_shift_rule_gradient, shift_rule_gradient,
    GeneratorSpectrum, SampledDerivative, ShiftRule,
};
pub use lcu::{
    branch_closed_form, combine, decompose_derivative, lcu_circuit_run, lcu_gradient, AncillaRunResult,
    DecompositionMethod, UnitaryDecomposition,
};
