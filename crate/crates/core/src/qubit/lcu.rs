//! Differentiation of arbitrary qubit gates with an ancilla-controlled linear
//! combination of unitaries.
//!
//! `∂μ𝒢 = Σₖ αₖ Aₖ` with real `αₖ` and unitary `Aₖ`; each term
//! `⟨ψ|𝒢†Q̂Aₖ|ψ⟩ + h.c.` is read off an ancilla-interference circuit as
//! `2(p₀Ẽ₀ − p₁Ẽ₁)`.

use num_traits::Zero;

use crate::circuit::{CircuitIR, Platform};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianEigen};
use crate::qubit::engine::{apply_gates, expectation, HermitianObservable, StateVector};
use crate::qubit::gates::{gate_matrix, gate_unitary, Generator};
use crate::qubit::grad::occurrence_generator;
use crate::scalar::{creal, cx, lit, to_f64, tol, Cx, Real};
use crate::Derivative;

/// Maximum reconstruction error `‖Σ αₖAₖ − ∂μ𝒢‖∞` accepted.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// Branch probabilities below this carry no usable conditional expectation.
pub const BRANCH_PROBABILITY_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DecompositionMethod {
    /// Polar factors of `∂μ𝒢`; at most two unitaries.
    #[default]
    Polar,
    /// Hermitian/anti-Hermitian split into four unitaries.
    HermitianParts,
}

impl DecompositionMethod {
    pub fn name(self) -> &'static str {
        match self {
            DecompositionMethod::Polar => "polar",
            DecompositionMethod::HermitianParts => "hermitian-parts",
        }
    }
}

#[derive(Clone, Debug)]
pub struct UnitaryDecomposition<T> {
    pub alpha: Vec<T>,
    pub unitaries: Vec<CMatrix<T>>,
    pub method: DecompositionMethod,
}

impl<T: Real> UnitaryDecomposition<T> {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn reconstruct(&self, dim: usize) -> CMatrix<T> {
        self.alpha
            .iter()
            .zip(&self.unitaries)
            .fold(CMatrix::zeros(dim, dim), |acc, (&a, u)| &acc + &u.scale_real(a))
    }
}

/// `∂μ𝒢 = −iG·exp(−iμG)`.
pub fn derivative_matrix<T: Real>(g: &Generator<T>, mu: T) -> CMatrix<T> {
    g.eigen().map(|lambda| {
        let phase = -mu * lambda;
        cx(T::zero(), -lambda) * cx(phase.cos(), phase.sin())
    })
}

/// `√(1 − x²)` with the radicand clamped at zero.
fn complement<T: Real>(x: T) -> T {
    (T::one() - x * x).max(T::zero()).sqrt()
}

/// Writes `∂μ𝒢` as a real combination of unitaries.
pub fn decompose_derivative<T: Real>(
    g: &Generator<T>,
    mu: T,
    method: DecompositionMethod,
) -> Result<UnitaryDecomposition<T>> {
    let dim = g.dim();
    let target = derivative_matrix(g, mu);
    let decomposition = match method {
        DecompositionMethod::Polar => polar(g, mu),
        DecompositionMethod::HermitianParts => hermitian_parts(&target),
    };
    let residual = (&decomposition.reconstruct(dim) - &target).norm_inf();
    let scale = target.norm_inf().max(T::one());
    if residual > tol::<T>(DECOMPOSITION_TOL) * scale {
        return Err(Error::DecompositionResidual {
            residual: to_f64(residual),
        });
    }
    Ok(decomposition)
}

/// `∂μ𝒢` is a function of `G`, hence normal, so its polar factors `U·P`
/// share `G`'s eigenbasis: eigenvalue `−iλe^{−iμλ}` splits into phase
/// `−i·sgn(λ)e^{−iμλ}` and modulus `|λ|`. With `P` scaled by
/// `α = max|λ|`, `U·P = ½U(P + i√(I−P²)) + ½U(P − i√(I−P²))`.
fn polar<T: Real>(g: &Generator<T>, mu: T) -> UnitaryDecomposition<T> {
    let eig = g.eigen();
    let alpha = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if alpha.is_zero() {
        return UnitaryDecomposition {
            alpha: Vec::new(),
            unitaries: Vec::new(),
            method: DecompositionMethod::Polar,
        };
    }
    let phase = |lambda: T| {
        let p = -mu * lambda;
        let sign = if lambda < T::zero() { -T::one() } else { T::one() };
        cx(T::zero(), -sign) * cx(p.cos(), p.sin())
    };
    let modulus = |lambda: T| (lambda.abs() / alpha).min(T::one());
    let unit_modulus = eig
        .values
        .iter()
        .all(|&l| (modulus(l) - T::one()).abs() <= tol::<T>(1e-12));
    if unit_modulus {
        return UnitaryDecomposition {
            alpha: vec![alpha],
            unitaries: vec![eig.map(phase)],
            method: DecompositionMethod::Polar,
        };
    }
    let i = cx(T::zero(), T::one());
    let plus = eig.map(|l| phase(l) * (creal(modulus(l)) + i * complement(modulus(l))));
    let minus = eig.map(|l| phase(l) * (creal(modulus(l)) - i * complement(modulus(l))));
    let half = alpha * lit::<T>(0.5);
    UnitaryDecomposition {
        alpha: vec![half, half],
        unitaries: vec![plus, minus],
        method: DecompositionMethod::Polar,
    }
}

/// `M = α/2·(A₁ + A₁† + iA₂ + iA₂†)` with `A₁ = M_re + i√(I − M_re²)`,
/// `A₂ = M_im + i√(I − M_im²)` for `M/α = M_re + iM_im`, `α = ‖M‖₂`.
/// The factor `i` is absorbed into the unitaries.
fn hermitian_parts<T: Real>(m: &CMatrix<T>) -> UnitaryDecomposition<T> {
    let alpha = m.spectral_norm();
    if alpha.is_zero() {
        return UnitaryDecomposition {
            alpha: Vec::new(),
            unitaries: Vec::new(),
            method: DecompositionMethod::HermitianParts,
        };
    }
    let n = m.scale_real(T::one() / alpha);
    let nd = n.adjoint();
    let half = lit::<T>(0.5);
    let re = (&n + &nd).scale_real(half);
    let im = (&n - &nd).scale(cx(T::zero(), -half));
    let i = cx(T::zero(), T::one());
    let lift = |h: &CMatrix<T>| HermitianEigen::new(h).map(|x| creal(x) + i * complement(x));
    let a1 = lift(&re);
    let a2 = lift(&im);
    let ia2 = a2.scale(i);
    let ia2d = a2.adjoint().scale(i);
    let c = alpha * half;
    UnitaryDecomposition {
        alpha: vec![c, c, c, c],
        unitaries: vec![a1.adjoint(), a1, ia2, ia2d],
        method: DecompositionMethod::HermitianParts,
    }
}

/// Ancilla statistics of one interference run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AncillaRunResult<T> {
    pub p0: T,
    pub p1: T,
    /// `Ẽ₀`, the observable conditioned on ancilla outcome 0.
    pub e0: T,
    /// `Ẽ₁`, conditioned on outcome 1.
    pub e1: T,
}

fn check_block<T: Real>(psi: &StateVector<T>, wires: &[usize], gate: &CMatrix<T>, a: &CMatrix<T>) -> Result<()> {
    let dim = 1usize << wires.len();
    for m in [gate, a] {
        if m.rows() != dim || m.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.rows(),
            });
        }
    }
    if let Some(&w) = wires.iter().find(|&&w| w >= psi.wire_count()) {
        return Err(Error::DimensionMismatch {
            expected: w + 1,
            found: psi.wire_count(),
        });
    }
    Ok(())
}

fn conditioned<T: Real>(
    branch: StateVector<T>,
    measure: &impl Fn(&StateVector<T>) -> Result<T>,
) -> Result<(T, T)> {
    let p = branch.norm_sqr();
    if p < lit::<T>(BRANCH_PROBABILITY_FLOOR) {
        return Ok((p, T::zero()));
    }
    let e = measure(&branch.scaled(T::one() / p.sqrt()))?;
    Ok((p, e))
}

/// Simulates the interference circuit with the ancilla appended as the last
/// wire: H on the ancilla, `𝒢` controlled on |0⟩, `A` controlled on |1⟩, H.
/// `measure` evaluates `Q̂` on a normalized branch state.
pub fn lcu_circuit_run_with<T: Real>(
    psi: &StateVector<T>,
    wires: &[usize],
    gate: &CMatrix<T>,
    a: &CMatrix<T>,
    measure: impl Fn(&StateVector<T>) -> Result<T>,
) -> Result<AncillaRunResult<T>> {
    check_block(psi, wires, gate, a)?;
    let n = psi.wire_count();
    let ancilla = n;
    let mut amps = vec![Cx::zero(); psi.dim() * 2];
    for (i, &amp) in psi.amplitudes().iter().enumerate() {
        amps[2 * i] = amp;
    }
    let mut state = StateVector::from_amplitudes(amps)?;
    let h = gate_matrix::<T>(&crate::circuit::GateKind::Hadamard, &[]);
    state.apply(&h, &[ancilla]);

    let dim = gate.rows();
    let controlled = CMatrix::from_fn(2 * dim, 2 * dim, |i, j| match (i < dim, j < dim) {
        (true, true) => gate[(i, j)],
        (false, false) => a[(i - dim, j - dim)],
        _ => Cx::zero(),
    });
    let mut block_wires = Vec::with_capacity(wires.len() + 1);
    block_wires.push(ancilla);
    block_wires.extend_from_slice(wires);
    state.apply(&controlled, &block_wires);
    state.apply(&h, &[ancilla]);

    let branch = |bit: usize| -> Result<StateVector<T>> {
        StateVector::from_amplitudes(state.amplitudes().iter().skip(bit).step_by(2).copied().collect())
    };
    let (p0, e0) = conditioned(branch(0)?, &measure)?;
    let (p1, e1) = conditioned(branch(1)?, &measure)?;
    Ok(AncillaRunResult { p0, p1, e0, e1 })
}

/// [`lcu_circuit_run_with`] measuring a fixed observable `Q̂`.
pub fn lcu_circuit_run<T: Real>(
    psi: &StateVector<T>,
    wires: &[usize],
    gate: &CMatrix<T>,
    a: &CMatrix<T>,
    q_obs: &HermitianObservable<T>,
) -> Result<AncillaRunResult<T>> {
    lcu_circuit_run_with(psi, wires, gate, a, |s| expectation(s, q_obs))
}

/// The same four quantities from the branch formulas
/// `p₀ = ¼⟨ψ|(𝒢+A)†(𝒢+A)|ψ⟩`, `Ẽ₀ = ⟨ψ|(𝒢+A)†Q̂(𝒢+A)|ψ⟩ / 4p₀` (and with
/// `𝒢−A` for outcome 1), evaluated by direct matrix algebra.
pub fn branch_closed_form<T: Real>(
    psi: &StateVector<T>,
    wires: &[usize],
    gate: &CMatrix<T>,
    a: &CMatrix<T>,
    q_obs: &HermitianObservable<T>,
) -> Result<AncillaRunResult<T>> {
    check_block(psi, wires, gate, a)?;
    let quarter = lit::<T>(0.25);
    let branch = |m: CMatrix<T>| -> Result<(T, T)> {
        let mut s = psi.clone();
        s.apply(&m, wires);
        let p = s.norm_sqr() * quarter;
        if p < lit::<T>(BRANCH_PROBABILITY_FLOOR) {
            return Ok((p, T::zero()));
        }
        let e = q_obs.matrix_element(&s, &s)?.re * quarter / p;
        Ok((p, e))
    };
    let (p0, e0) = branch(gate + a)?;
    let (p1, e1) = branch(gate - a)?;
    Ok(AncillaRunResult { p0, p1, e0, e1 })
}

/// `⟨ψ|𝒢†Q̂A|ψ⟩ + h.c. = 2(p₀Ẽ₀ − p₁Ẽ₁)`. Both outcomes contribute.
pub fn combine<T: Real>(res: &AncillaRunResult<T>) -> T {
    lit::<T>(2.0) * (res.p0 * res.e0 - res.p1 * res.e1)
}

/// Gradient of `f` in `θ[k]` via ancilla-controlled LCU runs, one per
/// decomposition term and occurrence.
pub fn lcu_gradient<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    method: DecompositionMethod,
) -> Result<Derivative<T>> {
    circuit.expect_platform(Platform::Qubit)?;
    circuit.check_params(theta)?;
    let occurrences = circuit.occurrences(k)?;
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let args = circuit.resolve(theta);
    let mut value = T::zero();
    let mut evaluations = 0;
    for occ in &occurrences {
        let generator = occurrence_generator(circuit, &args, occ)?;
        let mu = args[occ.gate][occ.arg];
        let split = circuit.split_at(occ.gate)?;
        let mut psi = StateVector::zero(circuit.wire_count());
        apply_gates(&mut psi, split.before, &args[..occ.gate]);
        let unitary = gate_unitary(&generator, mu);
        let decomposition = decompose_derivative(&generator, mu, method)?;
        let after_args = &args[occ.gate + 1..];
        let measure = |branch: &StateVector<T>| -> Result<T> {
            let mut s = branch.clone();
            apply_gates(&mut s, split.after, after_args);
            expectation(&s, &obs)
        };
        for (&alpha, a) in decomposition.alpha.iter().zip(&decomposition.unitaries) {
            let res = lcu_circuit_run_with(&psi, &split.target.wires, &unitary, a, measure)?;
            value += occ.coefficient * alpha * combine(&res);
            evaluations += 1;
        }
    }
    Ok(Derivative { value, evaluations })
}
