//! Continuous-variable circuits in the Heisenberg picture.
//!
//! Quadratures follow the `ħ = 2` convention: `[x, p] = 2i`, `x = a + a†`,
//! `p = −i(a − a†)`, and the vacuum has `⟨x²⟩ = ⟨p²⟩ = 1`.

pub mod engine;
pub mod gates;
pub mod grad;
pub mod ladder;
pub mod poly;

pub use engine::{conjugate, cv_expectation, heisenberg_evolve, heisenberg_evolve_matrix};
pub use gates::{gaussian_matrix, GateAction, HeisenbergMatrix};
pub use grad::{
    cv_finite_difference, cv_gradient_circuit_shift, cv_gradient_heisenberg, cv_shift_rule, CVShiftRule,
};
pub use ladder::vacuum_expectation;
pub use poly::{canonicalize, QuadMonomial, QuadPolynomial, Quadrature};

/// Reduced Planck constant in quadrature units.
pub const HBAR: f64 = 2.0;

/// Default cap on the observable degree during Heisenberg evolution.
pub const DEFAULT_MAX_DEGREE: u32 = 8;

/// Default free shift for the displacement and squeezing rules.
pub const DEFAULT_SHIFT_S: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvConfig {
    pub max_degree: u32,
    pub shift_s: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            max_degree: DEFAULT_MAX_DEGREE,
            shift_s: DEFAULT_SHIFT_S,
        }
    }
}
