//! Circuit intermediate representation shared by every engine.
//!
//! A [`CircuitIR`] is a platform-tagged gate list whose arguments are bound to
//! the parameter vector through affine expressions `c·θ[k] + o`, plus the
//! observable measured at the end. It is immutable once validated.

mod parse;
mod print;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub use parse::parse_circuit;

use crate::cv::poly::{canonicalize, Quadrature, QuadPolynomial};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{lit, to_f64, tol, Real};

/// Tolerance for the Hermiticity check on user-supplied observables.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest wire count for an explicit-matrix observable.
pub const MAX_MATRIX_OBSERVABLE_WIRES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Platform {
    Qubit,
    Cv,
}

impl Platform {
    pub fn name(self) -> &'static str {
        match self {
            Platform::Qubit => "qubit",
            Platform::Cv => "cv",
        }
    }
}

/// Real gate parameters θ, optionally labelled.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector<T> {
    values: Vec<T>,
    names: Option<Vec<String>>,
}

impl<T: Real> ParamVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter {i} is not finite")));
        }
        Ok(Self { values, names: None })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![T::zero(); len],
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<T> std::ops::Deref for ParamVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.values
    }
}

/// How a gate argument is obtained from θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamBinding<T> {
    Literal(T),
    /// `coefficient·θ[index] + offset`
    Affine { coefficient: T, index: usize, offset: T },
}

impl<T: Real> ParamBinding<T> {
    pub fn param(index: usize) -> Self {
        ParamBinding::Affine {
            coefficient: T::one(),
            index,
            offset: T::zero(),
        }
    }

    pub fn resolve(&self, theta: &[T]) -> T {
        match *self {
            ParamBinding::Literal(v) => v,
            ParamBinding::Affine {
                coefficient,
                index,
                offset,
            } => coefficient * theta[index] + offset,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match *self {
            ParamBinding::Literal(_) => None,
            ParamBinding::Affine { index, .. } => Some(index),
        }
    }

    /// Multiplies the bound value by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        match *self {
            ParamBinding::Literal(v) => ParamBinding::Literal(v * factor),
            ParamBinding::Affine {
                coefficient,
                index,
                offset,
            } => ParamBinding::Affine {
                coefficient: coefficient * factor,
                index,
                offset: offset * factor,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind<T> {
    // qubit, parametrized by a Hermitian generator
    Rx,
    Ry,
    Rz,
    /// `exp(−iθ/2 · P)` for a Pauli word `P` acting on the gate's wires in order.
    PauliRot(Vec<Pauli>),
    /// `exp(−iμ(cos δ σx + sin δ σy))`; args `(μ, δ)`, δ literal.
    ExpW,
    /// `exp(−iμ σz)`
    ExpZ,
    /// `exp(−iμ |11⟩⟨11|)`
    Exp11,
    /// `exp(−iμ(σx⊗I − b σz⊗σx + c I⊗σx))`; args `(μ, b, c)`, b and c literal.
    CrossRes,
    /// `exp(−iμG)` for a user-supplied Hermitian `G`. Not expressible in text.
    Custom { label: String, generator: Arc<CMatrix<T>> },
    // qubit, fixed
    Hadamard,
    Cnot,
    Cz,
    Swap,
    PauliX,
    PauliY,
    PauliZ,
    SGate,
    TGate,
    // continuous variable
    /// Phase rotation `R(φ)`.
    Rotation,
    /// Displacement `D(r, φ)`.
    Displacement,
    /// Zero-angle squeezing `S(r)`.
    Squeeze,
    /// Beamsplitter `BS(θ, φ)`.
    BeamSplitter,
    /// Cubic phase `V(γ)`.
    CubicPhase,
}

impl<T: Real> GateKind<T> {
    pub fn platform(&self) -> Platform {
        use GateKind::*;
        match self {
            Rotation | Displacement | Squeeze | BeamSplitter | CubicPhase => Platform::Cv,
            _ => Platform::Qubit,
        }
    }

    /// Text-format keyword.
    pub fn name(&self) -> String {
        use GateKind::*;
        match self {
            Rx => "RX".into(),
            Ry => "RY".into(),
            Rz => "RZ".into(),
            PauliRot(word) => format!("PAULIROT({})", word.iter().map(|p| p.as_char()).collect::<String>()),
            ExpW => "EXPW".into(),
            ExpZ => "EXPZ".into(),
            Exp11 => "EXP11".into(),
            CrossRes => "CROSSRES".into(),
            Custom { label, .. } => format!("CUSTOM({label})"),
            Hadamard => "H".into(),
            Cnot => "CNOT".into(),
            Cz => "CZ".into(),
            Swap => "SWAP".into(),
            PauliX => "X".into(),
            PauliY => "Y".into(),
            PauliZ => "Z".into(),
            SGate => "S".into(),
            TGate => "T".into(),
            Rotation => "R".into(),
            Displacement => "D".into(),
            Squeeze => "S".into(),
            BeamSplitter => "BS".into(),
            CubicPhase => "CUBICPHASE".into(),
        }
    }

    /// Number of wires the gate acts on.
    pub fn wire_count(&self) -> usize {
        use GateKind::*;
        match self {
            PauliRot(word) => word.len(),
            Custom { generator, .. } => generator.rows().trailing_zeros() as usize,
            Exp11 | CrossRes | Cnot | Cz | Swap | BeamSplitter => 2,
            _ => 1,
        }
    }

    pub fn arity(&self) -> usize {
        use GateKind::*;
        match self {
            Hadamard | Cnot | Cz | Swap | PauliX | PauliY | PauliZ | SGate | TGate => 0,
            ExpW | Displacement | BeamSplitter => 2,
            CrossRes => 3,
            _ => 1,
        }
    }

    /// Whether argument `arg` may be bound to θ.
    pub fn is_differentiable_arg(&self, arg: usize) -> bool {
        use GateKind::*;
        match self {
            Rx | Ry | Rz | PauliRot(_) | ExpW | ExpZ | Exp11 | CrossRes | Custom { .. } => arg == 0,
            Rotation | Squeeze | CubicPhase => arg == 0,
            Displacement | BeamSplitter => arg < 2,
            _ => false,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        !matches!(self, GateKind::CubicPhase)
    }

    /// Names of the gate arguments, used in diagnostics.
    pub fn arg_names(&self) -> &'static [&'static str] {
        use GateKind::*;
        match self {
            Rx | Ry | Rz | PauliRot(_) | ExpZ | Exp11 | Custom { .. } => &["mu"],
            ExpW => &["mu", "delta"],
            CrossRes => &["mu", "b", "c"],
            Rotation => &["phi"],
            Displacement => &["r", "phi"],
            Squeeze => &["r"],
            BeamSplitter => &["theta", "phi"],
            CubicPhase => &["gamma"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T> {
    pub kind: GateKind<T>,
    pub wires: Vec<usize>,
    pub args: Vec<ParamBinding<T>>,
}

impl<T: Real> Gate<T> {
    pub fn new(kind: GateKind<T>, wires: Vec<usize>, args: Vec<ParamBinding<T>>) -> Self {
        Self { kind, wires, args }
    }

    pub fn resolve_args(&self, theta: &[T]) -> Vec<T> {
        self.args.iter().map(|b| b.resolve(theta)).collect()
    }
}

/// Expands the two-parameter squeezer `S̃(r, φ)` into `R(φ/2) S(r) R(−φ/2)`.
///
/// The returned gates are in circuit order (first applied first).
pub fn general_squeeze<T: Real>(wire: usize, r: ParamBinding<T>, phi: ParamBinding<T>) -> [Gate<T>; 3] {
    let half = lit::<T>(0.5);
    // Operator product R(φ/2) S(r) R(−φ/2): R(−φ/2) acts first.
    [
        Gate::new(GateKind::Rotation, vec![wire], vec![phi.scaled(-half)]),
        Gate::new(GateKind::Squeeze, vec![wire], vec![r]),
        Gate::new(GateKind::Rotation, vec![wire], vec![phi.scaled(half)]),
    ]
}

/// Weighted Pauli word; an empty word is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm<T> {
    pub coefficient: T,
    pub word: Vec<(usize, Pauli)>,
}

/// A CV observable term as written: real coefficient times an operator word.
#[derive(Clone, Debug, PartialEq)]
pub struct CvTerm<T> {
    pub coefficient: T,
    pub word: Vec<Quadrature>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec<T> {
    PauliSum(Vec<PauliTerm<T>>),
    Matrix { wires: Vec<usize>, matrix: CMatrix<T> },
    /// Source terms plus their canonical polynomial.
    Cv { terms: Vec<CvTerm<T>>, poly: QuadPolynomial<T> },
}

impl<T: Real> ObservableSpec<T> {
    pub fn cv(terms: Vec<CvTerm<T>>) -> Self {
        let poly = terms.iter().fold(QuadPolynomial::zero(), |acc, t| {
            acc.add(&canonicalize::<T>(&t.word).scale(crate::scalar::creal(t.coefficient)))
        });
        ObservableSpec::Cv { terms, poly }
    }

    pub fn pauli(terms: Vec<PauliTerm<T>>) -> Self {
        ObservableSpec::PauliSum(terms)
    }

    pub fn platform(&self) -> Platform {
        match self {
            ObservableSpec::Cv { .. } => Platform::Cv,
            _ => Platform::Qubit,
        }
    }

    pub fn cv_polynomial(&self) -> Option<&QuadPolynomial<T>> {
        match self {
            ObservableSpec::Cv { poly, .. } => Some(poly),
            _ => None,
        }
    }
}

/// One affine appearance of a parameter in a gate argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Occurrence<T> {
    pub gate: usize,
    pub arg: usize,
    /// Chain-rule factor `∂(argument)/∂θ[k]`.
    pub coefficient: T,
}

/// `U = V·𝒢·W` around a single gate.
#[derive(Clone, Copy, Debug)]
pub struct CircuitSplit<'a, T> {
    pub before: &'a [Gate<T>],
    pub target: &'a Gate<T>,
    pub after: &'a [Gate<T>],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR<T> {
    platform: Platform,
    wire_count: usize,
    param_count: usize,
    gates: Vec<Gate<T>>,
    observable: ObservableSpec<T>,
}

impl<T: Real> CircuitIR<T> {
    /// Validates and assembles a circuit.
    pub fn new(
        platform: Platform,
        wire_count: usize,
        param_count: usize,
        gates: Vec<Gate<T>>,
        observable: ObservableSpec<T>,
    ) -> Result<Self> {
        if wire_count == 0 {
            return Err(Error::InvalidCircuit("wire count must be positive".into()));
        }
        for (pos, gate) in gates.iter().enumerate() {
            validate_gate(platform, wire_count, param_count, pos, gate)?;
        }
        validate_observable(platform, wire_count, &observable)?;
        Ok(Self {
            platform,
            wire_count,
            param_count,
            gates,
            observable,
        })
    }

    pub fn platform(&self) -> Platform {
        self.platform
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn observable(&self) -> &ObservableSpec<T> {
        &self.observable
    }

    /// Same gates, different observable.
    pub fn with_observable(&self, observable: ObservableSpec<T>) -> Result<Self> {
        Self::new(self.platform, self.wire_count, self.param_count, self.gates.clone(), observable)
    }

    pub fn expect_platform(&self, platform: Platform) -> Result<()> {
        if self.platform != platform {
            return Err(Error::PlatformMismatch {
                expected: platform.name(),
                found: self.platform.name(),
            });
        }
        Ok(())
    }

    /// Checks that `theta` has the right length and finite entries.
    pub fn check_params(&self, theta: &[T]) -> Result<()> {
        if theta.len() != self.param_count {
            return Err(Error::DimensionMismatch {
                expected: self.param_count,
                found: theta.len(),
            });
        }
        if let Some(i) = theta.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("parameter {i} is not finite")));
        }
        Ok(())
    }

    /// Resolved argument values of every gate.
    pub fn resolve(&self, theta: &[T]) -> Vec<Vec<T>> {
        self.gates.iter().map(|g| g.resolve_args(theta)).collect()
    }

    /// Every gate argument bound to `θ[k]`, in circuit order.
    pub fn occurrences(&self, k: usize) -> Result<Vec<Occurrence<T>>> {
        if k >= self.param_count {
            return Err(Error::ParamOutOfRange {
                index: k,
                count: self.param_count,
            });
        }
        let mut out = Vec::new();
        for (gate_pos, gate) in self.gates.iter().enumerate() {
            for (arg, binding) in gate.args.iter().enumerate() {
                if let ParamBinding::Affine { coefficient, index, .. } = *binding {
                    if index == k {
                        out.push(Occurrence {
                            gate: gate_pos,
                            arg,
                            coefficient,
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn split_at(&self, position: usize) -> Result<CircuitSplit<'_, T>> {
        if position >= self.gates.len() {
            return Err(Error::PositionOutOfRange {
                position,
                count: self.gates.len(),
            });
        }
        Ok(CircuitSplit {
            before: &self.gates[..position],
            target: &self.gates[position],
            after: &self.gates[position + 1..],
        })
    }

    /// Renders the circuit in the line-oriented text format.
    ///
    /// Fails for [`GateKind::Custom`] gates, which have no text form.
    pub fn to_text(&self) -> Result<String> {
        print::print_circuit(self)
    }
}

fn validate_gate<T: Real>(
    platform: Platform,
    wire_count: usize,
    param_count: usize,
    pos: usize,
    gate: &Gate<T>,
) -> Result<()> {
    let name = gate.kind.name();
    if gate.kind.platform() != platform {
        return Err(Error::InvalidCircuit(format!(
            "gate {pos} ({name}) is a {} gate in a {} circuit",
            gate.kind.platform().name(),
            platform.name()
        )));
    }
    if let GateKind::Custom { generator, .. } = &gate.kind {
        let dim = generator.rows();
        if !generator.is_square() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidCircuit(format!(
                "gate {pos} ({name}) generator must be square with power-of-two dimension"
            )));
        }
        if !generator.is_hermitian(tol(HERMITIAN_TOL)) {
            return Err(Error::InvalidCircuit(format!("gate {pos} ({name}) generator is not Hermitian")));
        }
    }
    if let GateKind::PauliRot(word) = &gate.kind {
        if word.is_empty() {
            return Err(Error::InvalidCircuit(format!("gate {pos}: empty Pauli word")));
        }
    }
    if gate.wires.len() != gate.kind.wire_count() {
        return Err(Error::InvalidCircuit(format!(
            "gate {pos} ({name}) expects {} wire(s), got {}",
            gate.kind.wire_count(),
            gate.wires.len()
        )));
    }
    for (i, &w) in gate.wires.iter().enumerate() {
        if w >= wire_count {
            return Err(Error::WireOutOfRange { wire: w, wire_count });
        }
        if gate.wires[..i].contains(&w) {
            return Err(Error::InvalidCircuit(format!("gate {pos} ({name}) repeats wire {w}")));
        }
    }
    if gate.args.len() != gate.kind.arity() {
        return Err(Error::InvalidCircuit(format!(
            "gate {pos} ({name}) expects {} argument(s), got {}",
            gate.kind.arity(),
            gate.args.len()
        )));
    }
    for (arg, binding) in gate.args.iter().enumerate() {
        match *binding {
            ParamBinding::Literal(v) => {
                if !v.is_finite() {
                    return Err(Error::InvalidCircuit(format!("gate {pos} ({name}) has a non-finite argument")));
                }
            }
            ParamBinding::Affine {
                coefficient,
                index,
                offset,
            } => {
                if index >= param_count {
                    return Err(Error::ParamOutOfRange {
                        index,
                        count: param_count,
                    });
                }
                if coefficient.is_zero() || !coefficient.is_finite() || !offset.is_finite() {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {pos} ({name}) has an invalid affine binding"
                    )));
                }
                if !gate.kind.is_differentiable_arg(arg) {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {pos} ({name}) argument `{}` must be a literal",
                        gate.kind.arg_names().get(arg).copied().unwrap_or("?")
                    )));
                }
            }
        }
    }
    Ok(())
}

fn validate_observable<T: Real>(platform: Platform, wire_count: usize, obs: &ObservableSpec<T>) -> Result<()> {
    if obs.platform() != platform {
        return Err(Error::InvalidCircuit(format!(
            "{} observable in a {} circuit",
            obs.platform().name(),
            platform.name()
        )));
    }
    match obs {
        ObservableSpec::PauliSum(terms) => {
            for term in terms {
                if !term.coefficient.is_finite() {
                    return Err(Error::InvalidCircuit("non-finite observable coefficient".into()));
                }
                for (i, &(w, _)) in term.word.iter().enumerate() {
                    if w >= wire_count {
                        return Err(Error::WireOutOfRange { wire: w, wire_count });
                    }
                    if term.word[..i].iter().any(|&(v, _)| v == w) {
                        return Err(Error::InvalidCircuit(format!("Pauli word repeats wire {w}")));
                    }
                }
            }
        }
        ObservableSpec::Matrix { wires, matrix } => {
            if wires.is_empty() || wires.len() > MAX_MATRIX_OBSERVABLE_WIRES {
                return Err(Error::InvalidCircuit(format!(
                    "matrix observables act on 1..={MAX_MATRIX_OBSERVABLE_WIRES} wires"
                )));
            }
            for (i, &w) in wires.iter().enumerate() {
                if w >= wire_count {
                    return Err(Error::WireOutOfRange { wire: w, wire_count });
                }
                if wires[..i].contains(&w) {
                    return Err(Error::InvalidCircuit(format!("observable repeats wire {w}")));
                }
            }
            let dim = 1usize << wires.len();
            if matrix.rows() != dim || matrix.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: matrix.rows(),
                });
            }
            let residual = (matrix - &matrix.adjoint()).max_abs();
            if residual > tol(HERMITIAN_TOL) {
                return Err(Error::NonHermitian {
                    residual: to_f64(residual),
                });
            }
        }
        ObservableSpec::Cv { poly, .. } => {
            if poly.mode_count() > wire_count {
                return Err(Error::WireOutOfRange {
                    wire: poly.mode_count() - 1,
                    wire_count,
                });
            }
            let residual = poly.hermiticity_residual();
            if residual > tol(HERMITIAN_TOL) {
                return Err(Error::NonHermitian {
                    residual: to_f64(residual),
                });
            }
        }
    }
    Ok(())
}

impl<T: Real> fmt::Display for CircuitIR<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(text) => f.write_str(&text),
            Err(_) => write!(
                f,
                "<{} circuit, {} wires, {} gates>",
                self.platform.name(),
                self.wire_count,
                self.gates.len()
            ),
        }
    }
}

/// Groups Pauli terms by word, summing coefficients. Useful for callers that
/// build observables programmatically.
pub fn merge_pauli_terms<T: Real>(terms: &[PauliTerm<T>]) -> Vec<PauliTerm<T>> {
    let mut map: BTreeMap<Vec<(usize, Pauli)>, T> = BTreeMap::new();
    for t in terms {
        let mut word = t.word.clone();
        word.sort();
        *map.entry(word).or_insert_with(T::zero) += t.coefficient;
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(word, coefficient)| PauliTerm { coefficient, word })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ry_circuit() -> CircuitIR<f64> {
        CircuitIR::new(
            Platform::Qubit,
            1,
            2,
            vec![
                Gate::new(GateKind::Ry, vec![0], vec![ParamBinding::param(0)]),
                Gate::new(GateKind::Hadamard, vec![0], vec![]),
                Gate::new(
                    GateKind::Rx,
                    vec![0],
                    vec![ParamBinding::Affine {
                        coefficient: 0.5,
                        index: 1,
                        offset: 0.1,
                    }],
                ),
            ],
            ObservableSpec::pauli(vec![PauliTerm {
                coefficient: 1.0,
                word: vec![(0, Pauli::Z)],
            }]),
        )
        .unwrap()
    }

    #[test]
    fn occurrences_report_chain_factor() {
        let c = ry_circuit();
        assert_eq!(
            c.occurrences(0).unwrap(),
            vec![Occurrence {
                gate: 0,
                arg: 0,
                coefficient: 1.0
            }]
        );
        assert_eq!(c.occurrences(1).unwrap()[0].coefficient, 0.5);
        assert!(matches!(c.occurrences(2), Err(Error::ParamOutOfRange { .. })));
    }

    #[test]
    fn unused_parameter_has_no_occurrences() {
        let c = CircuitIR::<f64>::new(Platform::Qubit, 1, 1, vec![], ObservableSpec::pauli(vec![])).unwrap();
        assert!(c.occurrences(0).unwrap().is_empty());
    }

    #[test]
    fn split_positions() {
        let c = ry_circuit();
        let s = c.split_at(1).unwrap();
        assert_eq!(s.before.len(), 1);
        assert_eq!(s.target.kind, GateKind::Hadamard);
        assert_eq!(s.after.len(), 1);
        assert!(c.split_at(0).unwrap().before.is_empty());
        assert!(c.split_at(2).unwrap().after.is_empty());
        assert!(matches!(c.split_at(3), Err(Error::PositionOutOfRange { .. })));
    }

    #[test]
    fn general_squeeze_splits_phase() {
        let gates = general_squeeze::<f64>(0, ParamBinding::param(0), ParamBinding::param(1));
        assert_eq!(gates[0].kind, GateKind::Rotation);
        assert_eq!(gates[1].kind, GateKind::Squeeze);
        assert_eq!(
            gates[0].args[0],
            ParamBinding::Affine {
                coefficient: -0.5,
                index: 1,
                offset: -0.0
            }
        );
        assert_eq!(
            gates[2].args[0],
            ParamBinding::Affine {
                coefficient: 0.5,
                index: 1,
                offset: 0.0
            }
        );
    }

    #[test]
    fn validation_rejects_bad_gates() {
        let obs = ObservableSpec::<f64>::pauli(vec![]);
        let bad_wire = vec![Gate::new(GateKind::Rx, vec![3], vec![ParamBinding::Literal(0.1)])];
        assert!(matches!(
            CircuitIR::new(Platform::Qubit, 1, 0, bad_wire, obs.clone()),
            Err(Error::WireOutOfRange { .. })
        ));
        let cv_gate = vec![Gate::new(GateKind::Squeeze, vec![0], vec![ParamBinding::Literal(0.1)])];
        assert!(CircuitIR::new(Platform::Qubit, 1, 0, cv_gate, obs.clone()).is_err());
        let bound_phase = vec![Gate::new(
            GateKind::ExpW,
            vec![0],
            vec![ParamBinding::Literal(0.1), ParamBinding::param(0)],
        )];
        assert!(CircuitIR::new(Platform::Qubit, 1, 1, bound_phase, obs).is_err());
    }

    #[test]
    fn validation_rejects_non_hermitian_matrix_observable() {
        let m = CMatrix::<f64>::from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let obs = ObservableSpec::Matrix { wires: vec![0], matrix: m };
        assert!(matches!(
            CircuitIR::new(Platform::Qubit, 1, 0, vec![], obs),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn merge_sums_duplicate_words() {
        let t = |c: f64| PauliTerm {
            coefficient: c,
            word: vec![(0, Pauli::Z)],
        };
        let merged = merge_pauli_terms(&[t(1.0), t(0.5)]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].coefficient, 1.5);
    }
}
