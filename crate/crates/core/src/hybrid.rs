//! Method dispatch, full gradients and the gradient-descent outer loop.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{CircuitIR, Platform};
use crate::cv::grad::{
    circuit_shift_preconditions, cv_finite_difference, cv_gradient_circuit_shift, cv_gradient_heisenberg,
    cv_shift_rule,
};
use crate::cv::{cv_expectation, CvConfig};
use crate::error::{Error, ErrorKind, Result};
use crate::qubit::grad::{
    analyze_generator, exact_gradient, finite_difference, occurrence_generator, sampled_shift_rule_gradient,
    shift_rule_gradient, shift_rule_spectra, DEFAULT_FD_DELTA,
};
use crate::qubit::lcu::{lcu_gradient, DecompositionMethod};
use crate::qubit::{circuit_expectation, sample_expectation, SampleEstimate};
use crate::scalar::{lit, to_f64, Real};
use crate::Derivative;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GradMethod {
    Shift,
    Lcu,
    Exact,
    FiniteDiff,
    CvShift,
    CvHeisenberg,
    Auto,
}

impl GradMethod {
    pub const ALL: [GradMethod; 7] = [
        GradMethod::Shift,
        GradMethod::Lcu,
        GradMethod::Exact,
        GradMethod::FiniteDiff,
        GradMethod::CvShift,
        GradMethod::CvHeisenberg,
        GradMethod::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GradMethod::Shift => "shift",
            GradMethod::Lcu => "lcu",
            GradMethod::Exact => "exact",
            GradMethod::FiniteDiff => "finite-diff",
            GradMethod::CvShift => "cv-shift",
            GradMethod::CvHeisenberg => "cv-heisenberg",
            GradMethod::Auto => "auto",
        }
    }

    /// Platforms the method can run on; `None` means both.
    pub fn platform(self) -> Option<Platform> {
        match self {
            GradMethod::Shift | GradMethod::Lcu | GradMethod::Exact => Some(Platform::Qubit),
            GradMethod::CvShift | GradMethod::CvHeisenberg => Some(Platform::Cv),
            GradMethod::FiniteDiff | GradMethod::Auto => None,
        }
    }
}

impl fmt::Display for GradMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GradMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        let m = match norm.as_str() {
            "shift" => GradMethod::Shift,
            "lcu" => GradMethod::Lcu,
            "exact" => GradMethod::Exact,
            "finite-diff" | "finitediff" | "fd" => GradMethod::FiniteDiff,
            "cv-shift" | "cvshift" => GradMethod::CvShift,
            "cv-heisenberg" | "cvheisenberg" => GradMethod::CvHeisenberg,
            "auto" => GradMethod::Auto,
            _ => return Err(Error::InvalidArgument(format!("unknown gradient method `{s}`"))),
        };
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradOptions {
    pub method: GradMethod,
    /// Step for finite differences.
    pub delta: f64,
    pub cv: CvConfig,
    pub decomposition: DecompositionMethod,
    /// Estimate shift-rule expectations from this many shots per term.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl Default for GradOptions {
    fn default() -> Self {
        Self {
            method: GradMethod::Auto,
            delta: DEFAULT_FD_DELTA,
            cv: CvConfig::default(),
            decomposition: DecompositionMethod::Polar,
            shots: None,
            seed: 0,
        }
    }
}

impl GradOptions {
    pub fn with_method(method: GradMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

/// How one gradient component was computed.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamDiagnostics {
    pub method: GradMethod,
    pub evaluations: usize,
    /// Why `Auto` fell back from the preferred method.
    pub fallback_reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradient<T> {
    pub values: Vec<T>,
    /// Standard errors when estimated from shots.
    pub stderr: Option<Vec<T>>,
    pub per_param: Vec<ParamDiagnostics>,
}

impl<T> Gradient<T> {
    pub fn evaluations(&self) -> usize {
        self.per_param.iter().map(|d| d.evaluations).sum()
    }
}

fn inapplicable(method: GradMethod, reason: impl Into<String>) -> Error {
    Error::MethodInapplicable {
        method: method.name().into(),
        reason: reason.into(),
    }
}

/// Picks the method for `θ[k]`. Explicit methods are checked against the
/// platform; `Auto` prefers a shift rule and falls back to LCU (qubit) or
/// the Heisenberg product rule (CV).
pub fn resolve_method<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    method: GradMethod,
) -> Result<(GradMethod, Option<String>)> {
    if let Some(p) = method.platform() {
        if p != circuit.platform() {
            return Err(inapplicable(
                method,
                format!("needs a {} circuit, found {}", p.name(), circuit.platform().name()),
            ));
        }
    }
    if method != GradMethod::Auto {
        return Ok((method, None));
    }
    match circuit.platform() {
        Platform::Qubit => match shift_rule_spectra(circuit, theta, k) {
            Ok(_) => Ok((GradMethod::Shift, None)),
            Err(e @ Error::ShiftRuleInapplicable { .. }) => Ok((GradMethod::Lcu, Some(e.to_string()))),
            Err(e) => Err(e),
        },
        Platform::Cv => match circuit_shift_preconditions(circuit, k) {
            Ok(()) => Ok((GradMethod::CvShift, None)),
            Err(e @ (Error::DegreeTooHigh { .. } | Error::NonGaussianAfterGate { .. })) => {
                Ok((GradMethod::CvHeisenberg, Some(e.to_string())))
            }
            Err(e) => Err(e),
        },
    }
}

/// Expectation value `f(θ)` on either platform.
pub fn expectation<T: Real>(circuit: &CircuitIR<T>, theta: &[T], cv: &CvConfig) -> Result<T> {
    match circuit.platform() {
        Platform::Qubit => circuit_expectation(circuit, theta),
        Platform::Cv => cv_expectation(circuit, theta, cv),
    }
}

/// Shot-based estimate of `f(θ)`; qubit circuits only.
pub fn sample<T: Real>(circuit: &CircuitIR<T>, theta: &[T], shots: u64, seed: u64) -> Result<SampleEstimate<T>> {
    if circuit.platform() != Platform::Qubit {
        return Err(Error::MethodInapplicable {
            method: "sample".into(),
            reason: "measurement sampling is only implemented for qubit circuits".into(),
        });
    }
    sample_expectation(circuit, theta, shots, seed)
}

fn component<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    k: usize,
    method: GradMethod,
    opts: &GradOptions,
) -> Result<Derivative<T>> {
    match method {
        GradMethod::Shift => shift_rule_gradient(circuit, theta, k),
        GradMethod::Lcu => lcu_gradient(circuit, theta, k, opts.decomposition),
        GradMethod::Exact => exact_gradient(circuit, theta, k),
        GradMethod::FiniteDiff => match circuit.platform() {
            Platform::Qubit => finite_difference(circuit, theta, k, lit(opts.delta)),
            Platform::Cv => cv_finite_difference(circuit, theta, k, lit(opts.delta), &opts.cv),
        },
        GradMethod::CvShift => cv_gradient_circuit_shift(circuit, theta, k, &opts.cv),
        GradMethod::CvHeisenberg => cv_gradient_heisenberg(circuit, theta, k, &opts.cv),
        GradMethod::Auto => unreachable!("resolved before dispatch"),
    }
}

fn grad_with_rng<T: Real>(
    circuit: &CircuitIR<T>,
    theta: &[T],
    opts: &GradOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Gradient<T>> {
    circuit.check_params(theta)?;
    let m = circuit.param_count();
    let mut values = Vec::with_capacity(m);
    let mut stderr = opts.shots.map(|_| Vec::with_capacity(m));
    let mut per_param = Vec::with_capacity(m);
    for k in 0..m {
        let (method, fallback_reason) = resolve_method(circuit, theta, k, opts.method)?;
        let evaluations = match (opts.shots, stderr.as_mut()) {
            (Some(shots), Some(errs)) => {
                if method != GradMethod::Shift {
                    return Err(inapplicable(method, "shot-based estimates are only available for the shift rule"));
                }
                let d = sampled_shift_rule_gradient(circuit, theta, k, shots, rng)?;
                values.push(d.value);
                errs.push(d.stderr);
                d.evaluations
            }
            _ => {
                let d = component(circuit, theta, k, method, opts)?;
                values.push(d.value);
                d.evaluations
            }
        };
        per_param.push(ParamDiagnostics {
            method,
            evaluations,
            fallback_reason,
        });
    }
    Ok(Gradient {
        values,
        stderr,
        per_param,
    })
}

/// Full gradient `∇f(θ)` with per-parameter diagnostics.
pub fn grad<T: Real>(circuit: &CircuitIR<T>, theta: &[T], opts: &GradOptions) -> Result<Gradient<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    grad_with_rng(circuit, theta, opts, &mut rng)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<T> {
    pub step: usize,
    pub theta: Vec<T>,
    pub value: T,
    /// Empty for the final record, which is not followed by an update.
    pub gradient: Vec<T>,
    pub methods: Vec<GradMethod>,
    /// Expectation evaluations spent at this step, including `f(θ)` itself.
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptTrace<T> {
    pub records: Vec<StepRecord<T>>,
}

impl<T: Real> OptTrace<T> {
    pub fn final_value(&self) -> T {
        self.records.last().map(|r| r.value).unwrap_or_else(T::nan)
    }

    pub fn final_theta(&self) -> &[T] {
        self.records.last().map(|r| r.theta.as_slice()).unwrap_or(&[])
    }

    pub fn evaluations(&self) -> usize {
        self.records.iter().map(|r| r.evaluations).sum()
    }
}

/// Plain gradient descent `θ ← θ − η∇f(θ)` for `steps` updates. The trace
/// holds `steps + 1` records; the last one has no gradient.
pub fn optimize<T: Real>(
    circuit: &CircuitIR<T>,
    theta0: &[T],
    opts: &GradOptions,
    learning_rate: T,
    steps: usize,
) -> Result<OptTrace<T>> {
    if learning_rate <= T::zero() || !learning_rate.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be positive, got {learning_rate}"
        )));
    }
    circuit.check_params(theta0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut theta = theta0.to_vec();
    let mut records = Vec::with_capacity(steps + 1);
    let at = |step: usize| move |e: Error| Error::AtStep {
        step,
        source: Box::new(e),
    };
    for step in 0..=steps {
        let value = expectation(circuit, &theta, &opts.cv).map_err(at(step))?;
        if step == steps {
            records.push(StepRecord {
                step,
                theta: theta.clone(),
                value,
                gradient: Vec::new(),
                methods: Vec::new(),
                evaluations: 1,
            });
            break;
        }
        let g = grad_with_rng(circuit, &theta, opts, &mut rng).map_err(at(step))?;
        records.push(StepRecord {
            step,
            theta: theta.clone(),
            value,
            gradient: g.values.clone(),
            methods: g.per_param.iter().map(|d| d.method).collect(),
            evaluations: 1 + g.evaluations(),
        });
        for (t, d) in theta.iter_mut().zip(&g.values) {
            *t -= learning_rate * *d;
        }
    }
    Ok(OptTrace { records })
}

/// Differentiability analysis of one gate argument bound to a parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct OccurrenceAnalysis {
    pub position: usize,
    pub gate: String,
    pub arg: String,
    pub coefficient: f64,
    pub detail: OccurrenceDetail,
}

#[derive(Clone, Debug, PartialEq)]
pub enum OccurrenceDetail {
    Qubit {
        eigenvalues: Vec<f64>,
        r: Option<f64>,
        shift: Option<f64>,
    },
    Cv {
        /// `(γ, s)` pairs; `None` when the argument has no rule.
        rule: Option<Vec<(f64, f64)>>,
    },
    NotDifferentiable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamAnalysis {
    pub index: usize,
    pub occurrences: Vec<OccurrenceAnalysis>,
    /// The method `Auto` would use, or `None` when nothing applies.
    pub method: Option<GradMethod>,
    pub summary: String,
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Reports, for every parameter, which recipe applies and why, without
/// computing any gradient.
pub fn check<T: Real>(circuit: &CircuitIR<T>, theta: &[T], cv: &CvConfig) -> Result<Vec<ParamAnalysis>> {
    circuit.check_params(theta)?;
    let args = circuit.resolve(theta);
    let mut out = Vec::with_capacity(circuit.param_count());
    for k in 0..circuit.param_count() {
        let mut occurrences = Vec::new();
        let mut notes = Vec::new();
        for occ in circuit.occurrences(k)? {
            let gate = &circuit.gates()[occ.gate];
            let arg = gate.kind.arg_names().get(occ.arg).copied().unwrap_or("?").to_string();
            let detail = match circuit.platform() {
                Platform::Qubit => match occurrence_generator(circuit, &args, &occ) {
                    Ok(g) => {
                        let s = analyze_generator(&g);
                        let eigenvalues: Vec<f64> = s.distinct_eigenvalues.iter().map(|&v| to_f64(v)).collect();
                        let clusters = eigenvalues.len();
                        let plural = if clusters == 1 { "" } else { "s" };
                        notes.push(match (s.r, s.shift()) {
                            (Some(r), Some(sh)) => format!(
                                "{} {clusters} eigenvalue cluster{plural}; r = {}, s = {}",
                                gate.kind.name(),
                                fmt_num(to_f64(r)),
                                fmt_num(to_f64(sh))
                            ),
                            _ if s.applicable => {
                                format!("{} {clusters} eigenvalue cluster{plural}; constant in this argument", gate.kind.name())
                            }
                            _ => format!("{clusters} eigenvalue clusters; shift rule inapplicable"),
                        });
                        OccurrenceDetail::Qubit {
                            eigenvalues,
                            r: s.r.map(to_f64),
                            shift: s.shift().map(to_f64),
                        }
                    }
                    Err(_) => OccurrenceDetail::NotDifferentiable,
                },
                Platform::Cv => match cv_shift_rule(&gate.kind, occ.arg, Some(lit::<T>(cv.shift_s))) {
                    Ok(rule) => {
                        let terms: Vec<(f64, f64)> =
                            rule.terms.iter().map(|&(g, s)| (to_f64(g), to_f64(s))).collect();
                        let mut desc = String::new();
                        for (i, (g, s)) in terms.iter().enumerate() {
                            let sign = match (i, *g < 0.0) {
                                (0, false) => "",
                                (0, true) => "-",
                                (_, false) => " + ",
                                (_, true) => " - ",
                            };
                            let dir = if *s < 0.0 { '-' } else { '+' };
                            desc.push_str(&format!("{sign}{}·M({arg}{dir}{})", fmt_num(g.abs()), fmt_num(s.abs())));
                        }
                        notes.push(format!("{} {arg}: {desc}", gate.kind.name()));
                        OccurrenceDetail::Cv { rule: Some(terms) }
                    }
                    Err(_) => {
                        notes.push(format!("{} {arg}: no shift rule", gate.kind.name()));
                        OccurrenceDetail::Cv { rule: None }
                    }
                },
            };
            occurrences.push(OccurrenceAnalysis {
                position: occ.gate,
                gate: gate.kind.name(),
                arg,
                coefficient: to_f64(occ.coefficient),
                detail,
            });
        }
        let (method, tail) = match resolve_method(circuit, theta, k, GradMethod::Auto) {
            Ok((m, None)) if m == GradMethod::Shift => (Some(m), "shift rule applicable; Shift selected".to_string()),
            Ok((m, None)) if m == GradMethod::CvShift => {
                (Some(m), "circuit-level shift rule applicable; CVShift selected".to_string())
            }
            Ok((GradMethod::Lcu, Some(_))) => (Some(GradMethod::Lcu), "LCU selected".to_string()),
            Ok((m, Some(reason))) => (Some(m), format!("{reason}; CVHeisenberg selected")),
            Ok((m, None)) => (Some(m), format!("{} selected", m.name())),
            Err(e) if e.kind() == ErrorKind::Inapplicable || matches!(e, Error::NotDifferentiable { .. }) => {
                (None, format!("{e}; only finite differences apply"))
            }
            Err(e) => return Err(e),
        };
        let summary = if occurrences.is_empty() {
            "unused; gradient is zero".to_string()
        } else {
            let mut parts = notes;
            parts.push(tail);
            parts.join("; ")
        };
        out.push(ParamAnalysis {
            index: k,
            occurrences,
            method,
            summary,
        });
    }
    Ok(out)
}
