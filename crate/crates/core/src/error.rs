use thiserror::Error;

/// Broad failure class, used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input or an IR that violates its invariants.
    Validation,
    /// The requested differentiation method does not apply to the circuit.
    Inapplicable,
    /// A numerical check failed at run time.
    Numerical,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("wire {wire} out of range for {wire_count} wire(s)")]
    WireOutOfRange { wire: usize, wire_count: usize },
    #[error("parameter index {index} out of range for {count} parameter(s)")]
    ParamOutOfRange { index: usize, count: usize },
    #[error("gate position {position} out of range for {count} gate(s)")]
    PositionOutOfRange { position: usize, count: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("observable is not Hermitian (residual {residual:.3e})")]
    NonHermitian { residual: f64 },
    #[error("platform mismatch: expected {expected}, found {found}")]
    PlatformMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expectation has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },
    #[error("shift rule inapplicable: gate {position} ({gate}) has {clusters} distinct generator eigenvalues")]
    ShiftRuleInapplicable {
        position: usize,
        gate: String,
        clusters: usize,
    },
    #[error("gate {position} ({gate}) has no differentiable generator for argument {arg}")]
    NotDifferentiable {
        position: usize,
        gate: String,
        arg: usize,
    },
    #[error("derivative decomposition residual {residual:.3e} exceeds tolerance")]
    DecompositionResidual { residual: f64 },
    #[error("no shift rule for {gate} parameter `{param}`")]
    NoShiftRule { gate: String, param: String },
    #[error("circuit-level shift rule needs a degree-1 observable, found degree {degree}")]
    DegreeTooHigh { degree: u32 },
    #[error("non-Gaussian gate {position} ({gate}) follows the differentiated gate")]
    NonGaussianAfterGate { position: usize, gate: String },
    #[error("gate {position} ({gate}) raised the observable degree to {degree}, above the cap of {max_degree}")]
    DegreeBoundExceeded {
        position: usize,
        gate: String,
        degree: u32,
        max_degree: u32,
    },
    #[error("method {method} is not applicable: {reason}")]
    MethodInapplicable { method: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("at optimization step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Syntax { .. }
            | UnknownGate { .. }
            | WireOutOfRange { .. }
            | ParamOutOfRange { .. }
            | PositionOutOfRange { .. }
            | InvalidCircuit(_)
            | NonHermitian { .. }
            | PlatformMismatch { .. }
            | DimensionMismatch { .. }
            | InvalidArgument(_) => ErrorKind::Validation,
            ShiftRuleInapplicable { .. }
            | NotDifferentiable { .. }
            | NoShiftRule { .. }
            | DegreeTooHigh { .. }
            | NonGaussianAfterGate { .. }
            | MethodInapplicable { .. } => ErrorKind::Inapplicable,
            ImaginaryResidue { .. } | DecompositionResidual { .. } | DegreeBoundExceeded { .. } => {
                ErrorKind::Numerical
            }
            AtStep { source, .. } => source.kind(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
