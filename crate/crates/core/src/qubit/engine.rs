//! Dense statevector simulation of qubit circuits.
//!
//! Wire `w` of an `n`-qubit register is bit `n − 1 − w` of the basis index,
//! so wire 0 is the most significant qubit.

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{CircuitIR, Gate, ObservableSpec, PauliTerm, Platform};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianEigen};
use crate::qubit::gates::{gate_matrix, pauli};
use crate::scalar::{creal, lit, to_f64, tol, Cx, Real};

/// Largest imaginary part tolerated on an expectation value.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Cx<T>>,
    wire_count: usize,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩` on `wire_count` qubits.
    pub fn zero(wire_count: usize) -> Self {
        let mut amplitudes = vec![Cx::zero(); 1 << wire_count];
        amplitudes[0] = Cx::one();
        Self { amplitudes, wire_count }
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// not required to be normalized (branch states in LCU runs are not).
    pub fn from_amplitudes(amplitudes: Vec<Cx<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "state length {len} is not a power of two"
            )));
        }
        Ok(Self {
            wire_count: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|&a| a * creal(s)).collect(),
            wire_count: self.wire_count,
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Cx::zero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// Applies a `2^k × 2^k` matrix to the listed wires (first wire most
    /// significant in the local matrix). The matrix need not be unitary.
    pub fn apply(&mut self, matrix: &CMatrix<T>, wires: &[usize]) {
        let k = wires.len();
        let local = 1usize << k;
        assert_eq!(matrix.rows(), local, "gate dimension does not match wire count");
        let n = self.wire_count;
        let offsets: Vec<usize> = (0..local)
            .map(|l| {
                wires
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &w)| 1usize << (n - 1 - w))
                    .sum()
            })
            .collect();
        let mask: usize = offsets.iter().fold(0, |m, &o| m | o);
        let mut gathered = vec![Cx::zero(); local];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, &o) in offsets.iter().enumerate() {
                gathered[l] = self.amplitudes[base | o];
            }
            for (i, &o) in offsets.iter().enumerate() {
                let mut acc = Cx::zero();
                for (j, &g) in gathered.iter().enumerate() {
                    acc += matrix[(i, j)] * g;
                }
                self.amplitudes[base | o] = acc;
            }
        }
    }

    fn apply_pauli_word(&mut self, word: &[(usize, crate::circuit::Pauli)]) {
        for &(w, p) in word {
            self.apply(&pauli::<T>(p), &[w]);
        }
    }
}

/// Observable on a qubit register.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianObservable<T> {
    PauliSum(Vec<PauliTerm<T>>),
    Dense { wires: Vec<usize>, matrix: CMatrix<T> },
}

impl<T: Real> HermitianObservable<T> {
    pub fn from_spec(spec: &ObservableSpec<T>) -> Result<Self> {
        match spec {
            ObservableSpec::PauliSum(terms) => Ok(HermitianObservable::PauliSum(terms.clone())),
            ObservableSpec::Matrix { wires, matrix } => Ok(HermitianObservable::Dense {
                wires: wires.clone(),
                matrix: matrix.clone(),
            }),
            ObservableSpec::Cv { .. } => Err(Error::PlatformMismatch {
                expected: "qubit",
                found: "cv",
            }),
        }
    }

    /// Dense matrix on explicit wires, checked for Hermiticity.
    pub fn dense(wires: Vec<usize>, matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() != 1 << wires.len() || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: 1 << wires.len(),
                found: matrix.rows(),
            });
        }
        let residual = (&matrix - &matrix.adjoint()).max_abs();
        if residual > tol(1e-12) {
            return Err(Error::NonHermitian {
                residual: to_f64(residual),
            });
        }
        Ok(HermitianObservable::Dense { wires, matrix })
    }

    pub fn identity() -> Self {
        HermitianObservable::PauliSum(vec![PauliTerm {
            coefficient: T::one(),
            word: Vec::new(),
        }])
    }

    fn max_wire(&self) -> Option<usize> {
        match self {
            HermitianObservable::PauliSum(terms) => terms.iter().flat_map(|t| t.word.iter().map(|&(w, _)| w)).max(),
            HermitianObservable::Dense { wires, .. } => wires.iter().copied().max(),
        }
    }

    /// `B|ψ⟩`
    pub fn apply(&self, state: &StateVector<T>) -> StateVector<T> {
        match self {
            HermitianObservable::PauliSum(terms) => {
                let mut out = vec![Cx::zero(); state.dim()];
                for term in terms {
                    let mut s = state.clone();
                    s.apply_pauli_word(&term.word);
                    let c = creal(term.coefficient);
                    for (o, a) in out.iter_mut().zip(&s.amplitudes) {
                        *o += c * *a;
                    }
                }
                StateVector {
                    amplitudes: out,
                    wire_count: state.wire_count,
                }
            }
            HermitianObservable::Dense { wires, matrix } => {
                let mut s = state.clone();
                s.apply(matrix, wires);
                s
            }
        }
    }

    /// `⟨bra|B|ket⟩`
    pub fn matrix_element(&self, bra: &StateVector<T>, ket: &StateVector<T>) -> Result<Cx<T>> {
        check_dims(self, bra)?;
        if bra.dim() != ket.dim() {
            return Err(Error::DimensionMismatch {
                expected: bra.dim(),
                found: ket.dim(),
            });
        }
        Ok(bra.inner(&self.apply(ket)))
    }
}

fn check_dims<T: Real>(obs: &HermitianObservable<T>, state: &StateVector<T>) -> Result<()> {
    if let Some(w) = obs.max_wire() {
        if w >= state.wire_count() {
            return Err(Error::DimensionMismatch {
                expected: w + 1,
                found: state.wire_count(),
            });
        }
    }
    if let HermitianObservable::Dense { wires, matrix } = obs {
        if matrix.rows() != 1 << wires.len() {
            return Err(Error::DimensionMismatch {
                expected: 1 << wires.len(),
                found: matrix.rows(),
            });
        }
    }
    Ok(())
}

/// `⟨ψ|B|ψ⟩`, asserting the imaginary residue is negligible.
pub fn expectation<T: Real>(state: &StateVector<T>, obs: &HermitianObservable<T>) -> Result<T> {
    let value = obs.matrix_element(state, state)?;
    let scale = value.re.abs().max(T::one());
    if value.im.abs() > tol::<T>(IMAGINARY_RESIDUE_TOL) * scale {
        return Err(Error::ImaginaryResidue {
            residue: to_f64(value.im),
        });
    }
    Ok(value.re)
}

pub fn apply_gate<T: Real>(state: &mut StateVector<T>, gate: &Gate<T>, args: &[T]) {
    state.apply(&gate_matrix(&gate.kind, args), &gate.wires);
}

/// Applies `gates` in order, with `args[i]` the resolved arguments of `gates[i]`.
pub fn apply_gates<T: Real>(state: &mut StateVector<T>, gates: &[Gate<T>], args: &[Vec<T>]) {
    for (gate, a) in gates.iter().zip(args) {
        apply_gate(state, gate, a);
    }
}

/// Runs the circuit from `|0…0⟩` with explicitly resolved gate arguments.
pub fn run_resolved<T: Real>(circuit: &CircuitIR<T>, args: &[Vec<T>]) -> StateVector<T> {
    let mut state = StateVector::zero(circuit.wire_count());
    apply_gates(&mut state, circuit.gates(), args);
    state
}

/// `U(θ)|0…0⟩`
pub fn run<T: Real>(circuit: &CircuitIR<T>, theta: &[T]) -> Result<StateVector<T>> {
    circuit.expect_platform(Platform::Qubit)?;
    circuit.check_params(theta)?;
    Ok(run_resolved(circuit, &circuit.resolve(theta)))
}

/// `f(θ) = ⟨0|U†(θ) B U(θ)|0⟩`
pub fn circuit_expectation<T: Real>(circuit: &CircuitIR<T>, theta: &[T]) -> Result<T> {
    let state = run(circuit, theta)?;
    expectation(&state, &HermitianObservable::from_spec(circuit.observable())?)
}

/// Expectation with explicitly resolved arguments; skips parameter checks.
pub fn resolved_expectation<T: Real>(
    circuit: &CircuitIR<T>,
    obs: &HermitianObservable<T>,
    args: &[Vec<T>],
) -> Result<T> {
    expectation(&run_resolved(circuit, args), obs)
}

/// Sample mean of an observable and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleEstimate<T> {
    pub estimate: T,
    pub stderr: T,
}

/// Mean and standard error of `counts[j]` draws of `values[j]`.
fn summarize<T: Real>(values: &[T], counts: &[u64]) -> (T, T) {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return (T::zero(), T::zero());
    }
    let nf = T::from_u64(n).unwrap();
    let mean = values
        .iter()
        .zip(counts)
        .map(|(&v, &c)| v * T::from_u64(c).unwrap())
        .sum::<T>()
        / nf;
    if n == 1 {
        return (mean, T::zero());
    }
    let ss = values
        .iter()
        .zip(counts)
        .map(|(&v, &c)| (v - mean) * (v - mean) * T::from_u64(c).unwrap())
        .sum::<T>();
    let var = ss / (nf - T::one());
    (mean, (var / nf).sqrt())
}

/// Multinomial draw via sequential binomials.
fn multinomial<T: Real>(probs: &[T], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut remaining = shots;
    let mut mass = 1.0f64;
    let mut out = Vec::with_capacity(probs.len());
    for (j, &p) in probs.iter().enumerate() {
        let p = to_f64(p).clamp(0.0, 1.0);
        if j + 1 == probs.len() || remaining == 0 {
            out.push(remaining);
            remaining = 0;
            continue;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining, q).expect("valid binomial").sample(rng);
        out.push(k);
        remaining -= k;
        mass -= p;
    }
    out
}

/// Born-rule outcome probabilities of a dense observable's eigenvalues.
fn eigen_probabilities<T: Real>(
    state: &StateVector<T>,
    wires: &[usize],
    eig: &HermitianEigen<T>,
) -> Vec<T> {
    let mut rotated = state.clone();
    rotated.apply(&eig.vectors.adjoint(), wires);
    let n = state.wire_count();
    let k = wires.len();
    let mut probs = vec![T::zero(); 1 << k];
    for (idx, a) in rotated.amplitudes.iter().enumerate() {
        let local = wires
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &w)| acc | (((idx >> (n - 1 - w)) & 1) << (k - 1 - j)));
        probs[local] += a.norm_sqr();
    }
    probs
}

/// Shot-based estimate of `⟨ψ|B|ψ⟩` drawing measurement outcomes from the
/// exact Born distribution. Pauli sums are sampled term by term with shots
/// split equally across non-identity terms.
pub fn sample_observable<T: Real>(
    state: &StateVector<T>,
    obs: &HermitianObservable<T>,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<SampleEstimate<T>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    check_dims(obs, state)?;
    match obs {
        HermitianObservable::PauliSum(terms) => {
            let measured: Vec<&PauliTerm<T>> = terms.iter().filter(|t| !t.word.is_empty()).collect();
            let constant: T = terms.iter().filter(|t| t.word.is_empty()).map(|t| t.coefficient).sum();
            if measured.is_empty() {
                return Ok(SampleEstimate {
                    estimate: constant,
                    stderr: T::zero(),
                });
            }
            let per = shots / measured.len() as u64;
            let extra = shots % measured.len() as u64;
            if per == 0 {
                return Err(Error::InvalidArgument(format!(
                    "{shots} shot(s) cannot cover {} observable terms",
                    measured.len()
                )));
            }
            let mut estimate = constant;
            let mut variance = T::zero();
            for (j, term) in measured.iter().enumerate() {
                let n = per + u64::from((j as u64) < extra);
                let single = HermitianObservable::PauliSum(vec![PauliTerm {
                    coefficient: T::one(),
                    word: term.word.clone(),
                }]);
                let exact = expectation(state, &single)?;
                let p_plus = (T::one() + exact) * lit::<T>(0.5);
                let counts = multinomial(&[p_plus, T::one() - p_plus], n, rng);
                let (mean, se) = summarize(&[T::one(), -T::one()], &counts);
                estimate += term.coefficient * mean;
                variance += term.coefficient * term.coefficient * se * se;
            }
            Ok(SampleEstimate {
                estimate,
                stderr: variance.sqrt(),
            })
        }
        HermitianObservable::Dense { wires, matrix } => {
            let eig = HermitianEigen::new(matrix);
            let probs = eigen_probabilities(state, wires, &eig);
            let counts = multinomial(&probs, shots, rng);
            let (estimate, stderr) = summarize(&eig.values, &counts);
            Ok(SampleEstimate { estimate, stderr })
        }
    }
}

/// Seeded shot-based estimate of the circuit's expectation value.
pub fn sample_expectation<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    shots: u64,
    seed: u64,
) -> Result<SampleEstimate<T>> {
    let state = run(circuit, theta)?;
    let obs = HermitianObservable::from_spec(circuit.observable())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_observable(&state, &obs, shots, &mut rng)
}
