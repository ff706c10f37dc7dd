//! Gradient back ends for qubit circuits: the two-eigenvalue parameter-shift
//! rule, the exact derivative-insertion oracle, and central differences.

use rand_chacha::ChaCha8Rng;

use crate::circuit::{CircuitIR, Occurrence, Platform};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qubit::engine::{
    apply_gates, expectation, resolved_expectation, run_resolved, sample_observable, HermitianObservable,
    StateVector,
};
use crate::qubit::gates::{gate_generator, gate_matrix, Generator};
use crate::scalar::{cx, lit, Real};
use crate::Derivative;

/// Absolute tolerance for deciding two eigenvalues are the same.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-9;

/// Default step for central finite differences.
pub const DEFAULT_FD_DELTA: f64 = 1e-4;

/// Clustered spectrum of a generator and the shift-rule data derived from it.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpectrum<T> {
    /// Cluster means, ascending.
    pub distinct_eigenvalues: Vec<T>,
    /// Half the gap between the two clusters, when there are exactly two.
    pub r: Option<T>,
    /// Midpoint of the two clusters; contributes only a global phase.
    pub phase_offset: Option<T>,
    /// At most two distinct eigenvalues.
    pub applicable: bool,
}

impl<T: Real> GeneratorSpectrum<T> {
    pub fn cluster_count(&self) -> usize {
        self.distinct_eigenvalues.len()
    }

    /// Shift `s = π/(4r)`.
    pub fn shift(&self) -> Option<T> {
        self.r.map(|r| T::PI() / (lit::<T>(4.0) * r))
    }

    pub fn rule(&self) -> Option<ShiftRule<T>> {
        self.r.map(ShiftRule::two_eigenvalue)
    }
}

/// `∂f = Σ γᵢ f(μ + sᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRule<T> {
    /// `(γ, s)` pairs.
    pub terms: Vec<(T, T)>,
}

impl<T: Real> ShiftRule<T> {
    pub fn two_eigenvalue(r: T) -> Self {
        let s = T::PI() / (lit::<T>(4.0) * r);
        Self {
            terms: vec![(r, s), (-r, -s)],
        }
    }
}

/// Clusters the generator's eigenvalues with absolute tolerance
/// [`EIGEN_CLUSTER_TOL`].
pub fn analyze_generator<T: Real>(g: &Generator<T>) -> GeneratorSpectrum<T> {
    let values = g.eigen().values;
    let tol = lit::<T>(EIGEN_CLUSTER_TOL);
    let mut clusters: Vec<Vec<T>> = Vec::new();
    for v in values {
        match clusters.last_mut() {
            Some(c) if v - *c.last().unwrap() <= tol => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    let distinct: Vec<T> = clusters
        .iter()
        .map(|c| c.iter().copied().sum::<T>() / T::from_usize(c.len()).unwrap())
        .collect();
    let applicable = distinct.len() <= 2;
    let (r, phase_offset) = if distinct.len() == 2 {
        let half = lit::<T>(0.5);
        (
            Some((distinct[1] - distinct[0]) * half),
            Some((distinct[1] + distinct[0]) * half),
        )
    } else {
        (None, None)
    };
    GeneratorSpectrum {
        distinct_eigenvalues: distinct,
        r,
        phase_offset,
        applicable,
    }
}

pub(crate) fn occurrence_generator<T: Real>(
    circuit: &CircuitIR<T>,
    args: &[Vec<T>],
    occ: &Occurrence<T>,
) -> Result<Generator<T>> {
    let gate = &circuit.gates()[occ.gate];
    if occ.arg != 0 {
        return Err(not_differentiable(circuit, occ));
    }
    gate_generator(&gate.kind, &args[occ.gate]).ok_or_else(|| not_differentiable(circuit, occ))
}

fn not_differentiable<T: Real>(circuit: &CircuitIR<T>, occ: &Occurrence<T>) -> Error {
    Error::NotDifferentiable {
        position: occ.gate,
        gate: circuit.gates()[occ.gate].kind.name(),
        arg: occ.arg,
    }
}

fn prepare<T: Real>(circuit: &CircuitIR<T>, theta: &[T], k: usize) -> Result<Vec<Occurrence<T>>> {
    circuit.expect_platform(Platform::Qubit)?;
    circuit.check_params(theta)?;
    circuit.occurrences(k)
}

/// Per-occurrence spectra for `θ[k]`, failing on the first gate the shift
/// rule cannot handle.
pub fn shift_rule_spectra<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
) -> Result<Vec<(Occurrence<T>, GeneratorSpectrum<T>)>> {
    let occurrences = prepare(circuit, theta, k)?;
    let args = circuit.resolve(theta);
    let mut out = Vec::with_capacity(occurrences.len());
    for occ in occurrences {
        let spectrum = analyze_generator(&occurrence_generator(circuit, &args, &occ)?);
        if !spectrum.applicable {
            return Err(Error::ShiftRuleInapplicable {
                position: occ.gate,
                gate: circuit.gates()[occ.gate].kind.name(),
                clusters: spectrum.cluster_count(),
            });
        }
        out.push((occ, spectrum));
    }
    Ok(out)
}

/// Parameter-shift gradient `Σ_occ c·r·(f(μ+s) − f(μ−s))`, shifting one
/// occurrence at a time.
pub fn shift_rule_gradient<T: Real>(circuit: &CircuitIR<T>, theta: &[T], k: usize) -> Result<Derivative<T>> {
    let spectra = shift_rule_spectra(circuit, theta, k)?;
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let base = circuit.resolve(theta);
    let mut value = T::zero();
    let mut evaluations = 0;
    for (occ, spectrum) in spectra {
        // a single eigenvalue cluster only rotates the global phase
        let Some(rule) = spectrum.rule() else { continue };
        for (gamma, shift) in rule.terms {
            let mut args = base.clone();
            args[occ.gate][occ.arg] += shift;
            value += occ.coefficient * gamma * resolved_expectation(circuit, &obs, &args)?;
            evaluations += 1;
        }
    }
    Ok(Derivative { value, evaluations })
}

/// Shift-rule gradient estimated from finite shots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledDerivative<T> {
    pub value: T,
    pub stderr: T,
    pub evaluations: usize,
}

/// Parameter-shift gradient with every shifted expectation estimated from
/// `shots` measurement samples drawn from `rng`.
pub fn sampled_shift_rule_gradient<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SampledDerivative<T>> {
    let spectra = shift_rule_spectra(circuit, theta, k)?;
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let base = circuit.resolve(theta);
    let mut value = T::zero();
    let mut variance = T::zero();
    let mut evaluations = 0;
    for (occ, spectrum) in spectra {
        let Some(rule) = spectrum.rule() else { continue };
        for (gamma, shift) in rule.terms {
            let mut args = base.clone();
            args[occ.gate][occ.arg] += shift;
            let state = run_resolved(circuit, &args);
            let est = sample_observable(&state, &obs, shots, rng)?;
            let w = occ.coefficient * gamma;
            value += w * est.estimate;
            variance += w * w * est.stderr * est.stderr;
            evaluations += 1;
        }
    }
    Ok(SampledDerivative {
        value,
        stderr: variance.sqrt(),
        evaluations,
    })
}

/// Exact derivative by inserting `−i·c·G` right after the differentiated gate:
/// `Σ_occ 2·Re⟨ψ|B|ψ_ins⟩`. Simulator-only ground truth.
pub fn exact_gradient<T: Real>(circuit: &CircuitIR<T>, theta: &[T], k: usize) -> Result<Derivative<T>> {
    let occurrences = prepare(circuit, theta, k)?;
    if occurrences.is_empty() {
        return Ok(Derivative {
            value: T::zero(),
            evaluations: 0,
        });
    }
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let args = circuit.resolve(theta);
    let full = run_resolved(circuit, &args);
    let mut value = T::zero();
    for occ in &occurrences {
        let generator = occurrence_generator(circuit, &args, occ)?;
        let inserted: CMatrix<T> = generator.matrix().scale(cx(T::zero(), -occ.coefficient));
        let split = circuit.split_at(occ.gate)?;
        let mut state = StateVector::zero(circuit.wire_count());
        apply_gates(&mut state, split.before, &args[..occ.gate]);
        state.apply(&gate_matrix(&split.target.kind, &args[occ.gate]), &split.target.wires);
        state.apply(&inserted, &split.target.wires);
        apply_gates(&mut state, split.after, &args[occ.gate + 1..]);
        value += lit::<T>(2.0) * obs.matrix_element(&full, &state)?.re;
    }
    Ok(Derivative {
        value,
        evaluations: 1 + occurrences.len(),
    })
}

/// Central difference `(f(θ + Δe_k/2) − f(θ − Δe_k/2)) / Δ`.
pub fn finite_difference<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    delta: T,
) -> Result<Derivative<T>> {
    circuit.expect_platform(Platform::Qubit)?;
    circuit.check_params(theta)?;
    if k >= circuit.param_count() {
        return Err(Error::ParamOutOfRange {
            index: k,
            count: circuit.param_count(),
        });
    }
    if delta.is_nan() || delta <= T::zero() {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let half = delta * lit::<T>(0.5);
    let eval = |offset: T| -> Result<T> {
        let mut t = theta.to_vec();
        t[k] += offset;
        expectation(&run_resolved(circuit, &circuit.resolve(&t)), &obs)
    };
    let value = (eval(half)? - eval(-half)?) / delta;
    Ok(Derivative { value, evaluations: 2 })
}
