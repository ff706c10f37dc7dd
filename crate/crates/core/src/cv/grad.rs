//! Gradients of CV circuits: matrix-level shift rules for Gaussian gates,
//! the circuit-level shift rule for first-degree observables, the product
//! rule for higher degrees, and central differences.

use std::f64::consts::FRAC_PI_2;

use crate::circuit::{CircuitIR, GateKind, Occurrence, Platform};
use crate::cv::engine::{evolve_gates, real_vacuum_expectation, resolved_cv_expectation};
use crate::cv::gates::{gaussian_matrix, GateAction, HeisenbergMatrix};
use crate::cv::poly::QuadPolynomial;
use crate::cv::CvConfig;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::Derivative;

/// `∂μM = Σ γᵢ M(μ + sᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVShiftRule<T> {
    /// `(γ, s)` pairs.
    pub terms: Vec<(T, T)>,
    /// The free shift used by the displacement-magnitude and squeezing rules.
    pub free_shift: Option<T>,
}

impl<T: Real> CVShiftRule<T> {
    fn quarter_turn() -> Self {
        let h = lit::<T>(0.5);
        let s = lit::<T>(FRAC_PI_2);
        Self {
            terms: vec![(h, s), (-h, -s)],
            free_shift: None,
        }
    }

    fn symmetric(gamma: T, s: T) -> Self {
        Self {
            terms: vec![(gamma, s), (-gamma, -s)],
            free_shift: Some(s),
        }
    }

    /// `Σ γᵢ M(μ + sᵢ)` for argument `arg` of a Gaussian gate.
    pub fn apply(&self, kind: &GateKind<T>, args: &[T], arg: usize) -> Result<HeisenbergMatrix<T>> {
        self.combine(kind, args, arg, |m| m)
    }

    /// [`apply`](Self::apply) with every shifted matrix embedded on `wires`
    /// of a `modes`-mode system.
    pub fn apply_embedded(
        &self,
        kind: &GateKind<T>,
        args: &[T],
        arg: usize,
        wires: &[usize],
        modes: usize,
    ) -> Result<HeisenbergMatrix<T>> {
        self.combine(kind, args, arg, |m| m.embed(wires, modes))
    }

    fn combine(
        &self,
        kind: &GateKind<T>,
        args: &[T],
        arg: usize,
        place: impl Fn(HeisenbergMatrix<T>) -> HeisenbergMatrix<T>,
    ) -> Result<HeisenbergMatrix<T>> {
        let mut acc: Option<HeisenbergMatrix<T>> = None;
        for &(gamma, shift) in &self.terms {
            let mut shifted = args.to_vec();
            shifted[arg] += shift;
            let m = place(gaussian_matrix(kind, &shifted)?);
            acc = Some(match acc {
                None => HeisenbergMatrix::zeros(m.modes()).add_scaled(&m, gamma),
                Some(a) => a.add_scaled(&m, gamma),
            });
        }
        acc.ok_or_else(|| Error::InvalidArgument("empty shift rule".into()))
    }
}

fn arg_name<T: Real>(kind: &GateKind<T>, arg: usize) -> String {
    kind.arg_names().get(arg).copied().unwrap_or("?").to_string()
}

/// Shift rule for argument `arg` of a Gaussian gate. `s` defaults to 1.
pub fn cv_shift_rule<T: Real>(kind: &GateKind<T>, arg: usize, s: Option<T>) -> Result<CVShiftRule<T>> {
    let s = s.unwrap_or_else(T::one);
    let free = |gamma: T| -> Result<CVShiftRule<T>> {
        if s.is_zero() || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("free shift must be finite and nonzero, got {s}")));
        }
        Ok(CVShiftRule::symmetric(gamma, s))
    };
    match (kind, arg) {
        (GateKind::Rotation, 0) | (GateKind::Displacement, 1) | (GateKind::BeamSplitter, 0 | 1) => {
            Ok(CVShiftRule::quarter_turn())
        }
        (GateKind::Displacement, 0) => free(T::one() / (lit::<T>(2.0) * s)),
        (GateKind::Squeeze, 0) => free(T::one() / (lit::<T>(2.0) * s.sinh())),
        _ => Err(Error::NoShiftRule {
            gate: kind.name(),
            param: arg_name(kind, arg),
        }),
    }
}

fn prepare<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
) -> Result<(Vec<Occurrence<T>>, QuadPolynomial<T>)> {
    circuit.expect_platform(Platform::Cv)?;
    circuit.check_params(theta)?;
    let occurrences = circuit.occurrences(k)?;
    let obs = circuit
        .observable()
        .cv_polynomial()
        .cloned()
        .ok_or_else(|| Error::InvalidCircuit("CV circuit without a quadrature observable".into()))?;
    Ok((occurrences, obs))
}

/// Checks the circuit-level shift rule preconditions for `θ[k]`.
pub fn circuit_shift_preconditions<T: Real>(circuit: &CircuitIR<T>, k: usize) -> Result<()> {
    circuit.expect_platform(Platform::Cv)?;
    let degree = circuit.observable().cv_polynomial().map_or(0, |p| p.degree());
    if degree > 1 {
        return Err(Error::DegreeTooHigh { degree });
    }
    for occ in circuit.occurrences(k)? {
        let kind = &circuit.gates()[occ.gate].kind;
        cv_shift_rule(kind, occ.arg, None::<T>)?;
        if let Some((offset, gate)) = circuit.gates()[occ.gate + 1..]
            .iter()
            .enumerate()
            .find(|(_, g)| !g.kind.is_gaussian())
        {
            return Err(Error::NonGaussianAfterGate {
                position: occ.gate + 1 + offset,
                gate: gate.kind.name(),
            });
        }
    }
    Ok(())
}

/// Circuit-level CV shift rule: `Σ_occ c·Σᵢ γᵢ f(μ + sᵢ)` from whole-circuit
/// expectations. Needs a first-degree observable and only Gaussian gates
/// after every occurrence.
pub fn cv_gradient_circuit_shift<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    config: &CvConfig,
) -> Result<Derivative<T>> {
    let (occurrences, obs) = prepare(circuit, theta, k)?;
    circuit_shift_preconditions(circuit, k)?;
    let base = circuit.resolve(theta);
    let s = lit::<T>(config.shift_s);
    let mut value = T::zero();
    let mut evaluations = 0;
    for occ in occurrences {
        let rule = cv_shift_rule(&circuit.gates()[occ.gate].kind, occ.arg, Some(s))?;
        for (gamma, shift) in rule.terms {
            let mut args = base.clone();
            args[occ.gate][occ.arg] += shift;
            value += occ.coefficient * gamma * resolved_cv_expectation(circuit, &obs, &args, config)?;
            evaluations += 1;
        }
    }
    Ok(Derivative { value, evaluations })
}

/// `∂Ω[F₁⋯F_d] = Σᵢ Ω[F₁]⋯∂Ω[Fᵢ]⋯Ω[F_d]` with `Ω` from `m` and `∂Ω` from `dm`.
pub fn product_rule<T: Real>(
    poly: &QuadPolynomial<T>,
    m: &HeisenbergMatrix<T>,
    dm: &HeisenbergMatrix<T>,
) -> QuadPolynomial<T> {
    let action = GateAction::Linear(m.clone());
    let derivative = GateAction::Linear(dm.clone());
    let mut out = QuadPolynomial::zero();
    for (mono, &c) in poly.terms() {
        let factors = mono.factors();
        let images: Vec<_> = factors.iter().map(|&q| action.image(q)).collect();
        let d_images: Vec<_> = factors.iter().map(|&q| derivative.image(q)).collect();
        for i in 0..factors.len() {
            let term = (0..factors.len()).fold(QuadPolynomial::constant(c), |acc, j| {
                acc.mul(if i == j { &d_images[j] } else { &images[j] })
            });
            out = out.add(&term);
        }
    }
    out
}

/// Heisenberg-picture gradient: the differentiated gate's matrix is replaced
/// by its shift-rule combination and the product rule handles observables
/// of any degree. Non-Gaussian gates may follow within the degree cap.
pub fn cv_gradient_heisenberg<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    config: &CvConfig,
) -> Result<Derivative<T>> {
    let (occurrences, obs) = prepare(circuit, theta, k)?;
    let args = circuit.resolve(theta);
    let modes = circuit.wire_count();
    let s = lit::<T>(config.shift_s);
    let mut value = T::zero();
    let mut evaluations = 0;
    for occ in occurrences {
        let gate = &circuit.gates()[occ.gate];
        let rule = cv_shift_rule(&gate.kind, occ.arg, Some(s))?;
        let split = circuit.split_at(occ.gate)?;
        let after = evolve_gates(
            &obs,
            split.after,
            &args[occ.gate + 1..],
            modes,
            occ.gate + 1,
            config.max_degree,
        )?;
        let m = gaussian_matrix(&gate.kind, &args[occ.gate])?.embed(&gate.wires, modes);
        // identity blocks on untouched modes cancel since the weights sum to zero
        let dm = rule.apply_embedded(&gate.kind, &args[occ.gate], occ.arg, &gate.wires, modes)?;
        let differentiated = product_rule(&after, &m, &dm);
        let full = evolve_gates(&differentiated, split.before, &args[..occ.gate], modes, 0, config.max_degree)?;
        value += occ.coefficient * real_vacuum_expectation(&full)?;
        evaluations += 1;
    }
    Ok(Derivative { value, evaluations })
}

/// Central difference of the CV expectation in `θ[k]`.
pub fn cv_finite_difference<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    delta: T,
    config: &CvConfig,
) -> Result<Derivative<T>> {
    let (_, obs) = prepare(circuit, theta, k)?;
    if delta.is_nan() || delta <= T::zero() {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let half = delta * lit::<T>(0.5);
    let eval = |offset: T| -> Result<T> {
        let mut t = theta.to_vec();
        t[k] += offset;
        resolved_cv_expectation(circuit, &obs, &circuit.resolve(&t), config)
    };
    let value = (eval(half)? - eval(-half)?) / delta;
    Ok(Derivative { value, evaluations: 2 })
}
