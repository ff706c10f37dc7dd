//! `qgrad`: evaluate, differentiate, sample, optimize and analyse circuits
//! written in the qgrad text format. Every run prints one JSON object.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::value::RawValue;

use qgrad::cv::CvConfig;
use qgrad::hybrid::{self, OccurrenceDetail, ParamAnalysis};
use qgrad::qubit::DecompositionMethod;
use qgrad::{Circuit, Error, ErrorKind, GradMethod, GradOptions};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "qgrad", version, about = "Gradients of variational qubit and CV circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expectation value f(θ).
    Eval(Common),
    /// Gradient ∇f(θ).
    Grad(Common),
    /// Shot-based estimate of f(θ) (qubit circuits).
    Sample(Common),
    /// Gradient descent from θ.
    Optimize(Common),
    /// Per-parameter method analysis; computes no gradients.
    Check(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Gradient method: auto, shift, lcu, exact, finite-diff, cv-shift, cv-heisenberg.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Comma-separated parameter values; zeros when omitted.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Measurement shots.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, env = "QGRAD_SEED", default_value_t = 0)]
    seed: u64,
    /// Learning rate.
    #[arg(long, default_value_t = 0.1)]
    lr: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = qgrad::qubit::grad::DEFAULT_FD_DELTA)]
    delta: f64,
    /// Free shift of the CV displacement and squeezing rules.
    #[arg(long = "shift-s", default_value_t = qgrad::cv::DEFAULT_SHIFT_S)]
    shift_s: f64,
    #[arg(long = "max-degree", default_value_t = qgrad::cv::DEFAULT_MAX_DEGREE)]
    max_degree: u32,
    /// LCU decomposition: polar or hermitian-parts.
    #[arg(long, default_value = "polar")]
    decomposition: String,
    file: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Qgrad(Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Qgrad(e) => match e.kind() {
                ErrorKind::Validation => 1,
                ErrorKind::Inapplicable => 2,
                ErrorKind::Numerical => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => f.write_str(m),
            CliError::Qgrad(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Qgrad(e)
    }
}

/// JSON number with 17 significant digits, or `null` when not finite.
fn num(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format!("{v:.16e}") } else { "null".into() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

fn nums(v: &[f64]) -> Vec<Box<RawValue>> {
    v.iter().map(|&x| num(x)).collect()
}

#[derive(Serialize)]
struct Output {
    schema_version: u32,
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gradient: Option<Vec<Box<RawValue>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_param_method: Option<Vec<&'static str>>,
    evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<StdErr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Vec<CheckParam>>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum StdErr {
    Scalar(Box<RawValue>),
    Vector(Vec<Box<RawValue>>),
}

impl Output {
    fn new(command: &'static str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            value: None,
            gradient: None,
            per_param_method: None,
            evaluations: 0,
            stderr: None,
            shots: None,
            seed: None,
            trace: None,
            params: None,
        }
    }
}

#[derive(Serialize)]
struct TraceRecord {
    step: usize,
    theta: Vec<Box<RawValue>>,
    value: Box<RawValue>,
    gradient: Vec<Box<RawValue>>,
    methods: Vec<&'static str>,
    evaluations: usize,
}

#[derive(Serialize)]
struct CheckParam {
    index: usize,
    method: Option<&'static str>,
    summary: String,
    occurrences: Vec<CheckOccurrence>,
}

#[derive(Serialize)]
struct CheckOccurrence {
    position: usize,
    gate: String,
    arg: String,
    coefficient: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<Box<RawValue>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<Vec<[Box<RawValue>; 2]>>,
}

fn check_param(p: ParamAnalysis) -> CheckParam {
    CheckParam {
        index: p.index,
        method: p.method.map(GradMethod::name),
        summary: p.summary,
        occurrences: p
            .occurrences
            .into_iter()
            .map(|o| {
                let mut out = CheckOccurrence {
                    position: o.position,
                    gate: o.gate,
                    arg: o.arg,
                    coefficient: num(o.coefficient),
                    eigenvalues: None,
                    r: None,
                    s: None,
                    rule: None,
                };
                match o.detail {
                    OccurrenceDetail::Qubit { eigenvalues, r, shift } => {
                        out.eigenvalues = Some(nums(&eigenvalues));
                        out.r = r.map(num);
                        out.s = shift.map(num);
                    }
                    OccurrenceDetail::Cv { rule } => {
                        out.rule = rule.map(|terms| terms.into_iter().map(|(g, s)| [num(g), num(s)]).collect());
                    }
                    OccurrenceDetail::NotDifferentiable => {}
                }
                out
            })
            .collect(),
    }
}

fn parse_params(text: Option<&str>, count: usize) -> Result<Vec<f64>, CliError> {
    let Some(text) = text else {
        return Ok(vec![0.0; count]);
    };
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Qgrad(Error::InvalidArgument(format!("bad parameter value `{s}`"))))
        })
        .collect()
}

fn options(c: &Common) -> Result<GradOptions, CliError> {
    let decomposition = match c.decomposition.to_ascii_lowercase().as_str() {
        "polar" => DecompositionMethod::Polar,
        "hermitian-parts" => DecompositionMethod::HermitianParts,
        other => {
            return Err(Error::InvalidArgument(format!("unknown decomposition `{other}`")).into());
        }
    };
    Ok(GradOptions {
        method: c.method.parse()?,
        delta: c.delta,
        cv: CvConfig {
            max_degree: c.max_degree,
            shift_s: c.shift_s,
        },
        decomposition,
        shots: c.shots,
        seed: c.seed,
    })
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let (name, common) = match &cli.command {
        Command::Eval(c) => ("eval", c),
        Command::Grad(c) => ("grad", c),
        Command::Sample(c) => ("sample", c),
        Command::Optimize(c) => ("optimize", c),
        Command::Check(c) => ("check", c),
    };
    let text = std::fs::read_to_string(&common.file)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", common.file.display())))?;
    let circuit: Circuit = qgrad::circuit::parse_circuit(&text)?;
    let theta = parse_params(common.params.as_deref(), circuit.param_count())?;
    circuit.check_params(&theta)?;
    let opts = options(common)?;
    let mut out = Output::new(name);

    match cli.command {
        Command::Eval(_) => {
            out.value = Some(num(hybrid::expectation(&circuit, &theta, &opts.cv)?));
            out.evaluations = 1;
        }
        Command::Grad(_) => {
            let g = hybrid::grad(&circuit, &theta, &opts)?;
            out.value = Some(num(hybrid::expectation(&circuit, &theta, &opts.cv)?));
            out.gradient = Some(nums(&g.values));
            out.per_param_method = Some(g.per_param.iter().map(|d| d.method.name()).collect());
            out.evaluations = 1 + g.evaluations();
            out.stderr = g.stderr.as_deref().map(|s| StdErr::Vector(nums(s)));
            if opts.shots.is_some() {
                out.shots = opts.shots;
                out.seed = Some(opts.seed);
            }
        }
        Command::Sample(_) => {
            let shots = opts
                .shots
                .ok_or_else(|| Error::InvalidArgument("sample needs --shots".into()))?;
            let est = hybrid::sample(&circuit, &theta, shots, opts.seed)?;
            out.value = Some(num(est.estimate));
            out.stderr = Some(StdErr::Scalar(num(est.stderr)));
            out.evaluations = 1;
            out.shots = Some(shots);
            out.seed = Some(opts.seed);
        }
        Command::Optimize(c) => {
            let trace = hybrid::optimize(&circuit, &theta, &opts, c.lr, c.steps)?;
            out.value = Some(num(trace.final_value()));
            out.evaluations = trace.evaluations();
            out.trace = Some(
                trace
                    .records
                    .iter()
                    .map(|r| TraceRecord {
                        step: r.step,
                        theta: nums(&r.theta),
                        value: num(r.value),
                        gradient: nums(&r.gradient),
                        methods: r.methods.iter().map(|m| m.name()).collect(),
                        evaluations: r.evaluations,
                    })
                    .collect(),
            );
        }
        Command::Check(_) => {
            let analysis = hybrid::check(&circuit, &theta, &opts.cv)?;
            out.params = Some(analysis.into_iter().map(check_param).collect());
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{}", serde_json::to_string(&out).expect("output serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qgrad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
