//! Shared test support: a truncated Fock-space simulator and random circuit
//! generators.
#![allow(dead_code)]

use std::fmt::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use qgrad::circuit::{parse_circuit, CircuitIR};
use qgrad::cv::poly::Quadrature;
use qgrad::linalg::{CMatrix, HermitianEigen};
use qgrad::scalar::cx;

pub type C64 = Complex64;

// ---------------------------------------------------------------------------
// Fock-space oracle

/// Pure state on `modes` oscillators, each truncated to `cutoff` levels.
/// Mode 0 is the most significant index.
#[derive(Clone, Debug)]
pub struct Fock {
    pub cutoff: usize,
    pub modes: usize,
    pub amps: Vec<C64>,
}

impl Fock {
    pub fn vacuum(modes: usize, cutoff: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); cutoff.pow(modes as u32)];
        amps[0] = C64::new(1.0, 0.0);
        Self { cutoff, modes, amps }
    }

    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.modes - 1 - mode) as u32)
    }

    fn level(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    pub fn lower(&self, mode: usize, v: &[C64]) -> Vec<C64> {
        let s = self.stride(mode);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (i, &a) in v.iter().enumerate() {
            let n = self.level(i, mode);
            if n > 0 {
                out[i - s] += a * (n as f64).sqrt();
            }
        }
        out
    }

    pub fn raise(&self, mode: usize, v: &[C64]) -> Vec<C64> {
        let s = self.stride(mode);
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (i, &a) in v.iter().enumerate() {
            let n = self.level(i, mode);
            if n + 1 < self.cutoff {
                out[i + s] += a * ((n + 1) as f64).sqrt();
            }
        }
        out
    }

    pub fn quad(&self, q: Quadrature, v: &[C64]) -> Vec<C64> {
        match q {
            Quadrature::X(m) => add(&self.lower(m, v), &self.raise(m, v), C64::new(1.0, 0.0)),
            Quadrature::P(m) => {
                let d = add(&self.lower(m, v), &self.raise(m, v), C64::new(-1.0, 0.0));
                scale(&d, C64::new(0.0, -1.0))
            }
        }
    }

    /// `ψ ← exp(K)ψ` for anti-Hermitian `K` with `‖K‖ ≤ bound`, by Taylor
    /// series over enough substeps that each has norm at most 1/2.
    pub fn evolve(&mut self, k: impl Fn(&Fock, &[C64]) -> Vec<C64>, bound: f64) {
        let steps = (2.0 * bound).ceil().max(1.0) as usize;
        let h = 1.0 / steps as f64;
        for _ in 0..steps {
            let mut term = self.amps.clone();
            let mut acc = self.amps.clone();
            for order in 1..200 {
                term = scale(&k(self, &term), C64::new(h / order as f64, 0.0));
                let size = norm(&term);
                acc = add(&acc, &term, C64::new(1.0, 0.0));
                if size < 1e-18 {
                    break;
                }
            }
            self.amps = acc;
        }
    }

    pub fn rotation(&mut self, mode: usize, phi: f64) {
        for i in 0..self.amps.len() {
            let n = self.level(i, mode) as f64;
            self.amps[i] *= C64::from_polar(1.0, phi * n);
        }
    }

    /// `exp(α a† − α* a)`, `α = r e^{iφ}`.
    pub fn displacement(&mut self, mode: usize, r: f64, phi: f64) {
        let alpha = C64::from_polar(r, phi);
        let bound = 2.0 * r.abs() * (self.cutoff as f64).sqrt();
        self.evolve(
            |f, v| add(&scale(&f.raise(mode, v), alpha), &scale(&f.lower(mode, v), alpha.conj()), C64::new(-1.0, 0.0)),
            bound,
        );
    }

    /// `exp(r(a² − a†²)/2)`.
    pub fn squeeze(&mut self, mode: usize, r: f64) {
        let bound = r.abs() * self.cutoff as f64;
        self.evolve(
            |f, v| {
                let aa = f.lower(mode, &f.lower(mode, v));
                let cc = f.raise(mode, &f.raise(mode, v));
                scale(&add(&aa, &cc, C64::new(-1.0, 0.0)), C64::new(0.5 * r, 0.0))
            },
            bound,
        );
    }

    /// `exp(θ(e^{iφ} a b† − e^{−iφ} a† b))`.
    pub fn beamsplitter(&mut self, a: usize, b: usize, theta: f64, phi: f64) {
        let e = C64::from_polar(1.0, phi);
        let bound = 2.0 * theta.abs() * self.cutoff as f64;
        self.evolve(
            |f, v| {
                let ab = f.raise(b, &f.lower(a, v));
                let ba = f.raise(a, &f.lower(b, v));
                scale(&add(&scale(&ab, e), &scale(&ba, e.conj()), C64::new(-1.0, 0.0)), C64::new(theta, 0.0))
            },
            bound,
        );
    }

    /// `exp(iγx³/6)`.
    pub fn cubic_phase(&mut self, mode: usize, gamma: f64) {
        let bound = gamma.abs() / 6.0 * (2.0 * (self.cutoff as f64).sqrt()).powi(3);
        self.evolve(
            |f, v| {
                let x = Quadrature::X(mode);
                let xxx = f.quad(x, &f.quad(x, &f.quad(x, v)));
                scale(&xxx, C64::new(0.0, gamma / 6.0))
            },
            bound,
        );
    }

    /// Population with some mode in its top quarter of levels.
    pub fn tail(&self) -> f64 {
        let edge = self.cutoff - self.cutoff / 4;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (0..self.modes).any(|m| self.level(*i, m) >= edge))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// `⟨ψ|F₁⋯F_d|ψ⟩` for a quadrature word.
    pub fn word_expectation(&self, word: &[Quadrature]) -> C64 {
        let mut v = self.amps.clone();
        for &q in word.iter().rev() {
            v = self.quad(q, &v);
        }
        self.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum()
    }
}

fn add(a: &[C64], b: &[C64], c: C64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

fn scale(a: &[C64], c: C64) -> Vec<C64> {
    a.iter().map(|x| x * c).collect()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Runs a CV circuit in the Fock basis, raising the cutoff until the tail
/// population is below `tail_tol`. Returns the state and the observable's
/// expectation.
pub fn fock_expectation(circuit: &CircuitIR<f64>, theta: &[f64], tail_tol: f64) -> (Fock, f64) {
    let args = circuit.resolve(theta);
    let modes = circuit.wire_count();
    let poly = circuit.observable().cv_polynomial().expect("cv observable");
    let mut cutoff = if modes == 1 { 40 } else { 24 };
    loop {
        let mut f = Fock::vacuum(modes, cutoff);
        for (g, a) in circuit.gates().iter().zip(&args) {
            match g.kind.name().as_str() {
                "R" => f.rotation(g.wires[0], a[0]),
                "D" => f.displacement(g.wires[0], a[0], a[1]),
                "S" => f.squeeze(g.wires[0], a[0]),
                "BS" => f.beamsplitter(g.wires[0], g.wires[1], a[0], a[1]),
                "CUBICPHASE" => f.cubic_phase(g.wires[0], a[0]),
                other => panic!("no Fock rule for {other}"),
            }
        }
        if f.tail() < tail_tol || cutoff >= 96 {
            let value: C64 = poly
                .terms()
                .map(|(m, c)| c * f.word_expectation(&m.factors()))
                .sum();
            assert!(value.im.abs() < 1e-8, "complex Fock expectation {value}");
            return (f, value.re);
        }
        cutoff += 12;
    }
}

// ---------------------------------------------------------------------------
// Random matrices

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix<f64> {
    let a = CMatrix::from_fn(dim, dim, |_, _| cx(gauss(rng), gauss(rng)));
    (&a + &a.adjoint()).scale_real(0.5)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix<f64> {
    HermitianEigen::new(&random_hermitian(rng, dim)).vectors
}

/// `V·diag(values)·V†` with Haar-ish random `V`.
pub fn hermitian_with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> CMatrix<f64> {
    let v = random_unitary(rng, values.len());
    let d = CMatrix::diagonal(&values.iter().map(|&x| cx(x, 0.0)).collect::<Vec<_>>());
    &(&v * &d) * &v.adjoint()
}

// ---------------------------------------------------------------------------
// Random circuits, emitted as text so the parser is exercised as well

fn arg(rng: &mut ChaCha8Rng, params: usize) -> String {
    let k = rng.random_range(0..params);
    let c: f64 = match rng.random_range(0..3) {
        0 => 1.0,
        1 => -1.0,
        _ => rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
    };
    let o: f64 = rng.random_range(-1.0..1.0);
    format!("{c}*th[{k}]{o:+}")
}

fn distinct_wires(rng: &mut ChaCha8Rng, wires: usize, n: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..wires).collect();
    for i in 0..n {
        let j = rng.random_range(i..wires);
        all.swap(i, j);
    }
    all.truncate(n);
    all
}

fn join(w: &[usize]) -> String {
    w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Qubit circuit on ≤4 wires with ≤8 parametrized gates whose generators
/// have two eigenvalues, interleaved with fixed entangling gates. Parameter
/// count is below the gate count so indices repeat.
pub fn random_qubit_circuit(rng: &mut ChaCha8Rng) -> (CircuitIR<f64>, Vec<f64>) {
    let wires = rng.random_range(1..=4);
    let gates = rng.random_range(1..=8);
    let params = rng.random_range(1..=gates.min(4));
    let mut src = format!("platform qubit\nwires {wires}\nparams {params}\n");
    for _ in 0..gates {
        if wires > 1 && rng.random_bool(0.3) {
            let w = distinct_wires(rng, wires, 2);
            let fixed = ["CNOT", "CZ", "H", "SWAP"][rng.random_range(0..4)];
            if fixed == "H" {
                writeln!(src, "gate H {}", w[0]).unwrap();
            } else {
                writeln!(src, "gate {fixed} {}", join(&w)).unwrap();
            }
        }
        let choice = rng.random_range(0..if wires > 1 { 7 } else { 5 });
        let a = arg(rng, params);
        let line = match choice {
            0 => format!("gate RX {} {a}", rng.random_range(0..wires)),
            1 => format!("gate RY {} {a}", rng.random_range(0..wires)),
            2 => format!("gate RZ {} {a}", rng.random_range(0..wires)),
            3 => format!("gate EXPW {} {a} {}", rng.random_range(0..wires), rng.random_range(-3.0..3.0)),
            4 => format!("gate EXPZ {} {a}", rng.random_range(0..wires)),
            5 => {
                let w = distinct_wires(rng, wires, 2);
                let word: String = (0..2).map(|_| ['X', 'Y', 'Z'][rng.random_range(0..3)]).collect();
                format!("gate PAULIROT({word}) {} {a}", join(&w))
            }
            _ => format!("gate EXP11 {} {a}", join(&distinct_wires(rng, wires, 2))),
        };
        writeln!(src, "{line}").unwrap();
    }
    let terms: Vec<String> = (0..rng.random_range(1..=3))
        .map(|_| {
            let n = rng.random_range(1..=wires.min(2));
            let word: String = distinct_wires(rng, wires, n)
                .into_iter()
                .map(|w| format!("{}{w}", ['X', 'Y', 'Z'][rng.random_range(0..3)]))
                .collect();
            format!("{} {word}", rng.random_range(-1.5..1.5))
        })
        .collect();
    writeln!(src, "observe {}", terms.join(" + ")).unwrap();
    let theta = (0..params).map(|_| rng.random_range(-3.2..3.2)).collect();
    (parse_circuit(&src).unwrap_or_else(|e| panic!("{e}\n{src}")), theta)
}

fn cv_gaussian_gate(rng: &mut ChaCha8Rng, modes: usize, params: usize, src: &mut String) {
    let a = arg(rng, params);
    let m = rng.random_range(0..modes);
    let small = |rng: &mut ChaCha8Rng| rng.random_range(-0.6..0.6);
    let angle = |rng: &mut ChaCha8Rng| rng.random_range(-3.2..3.2);
    let line = match rng.random_range(0..if modes > 1 { 7 } else { 4 }) {
        0 => format!("gate R {m} {a}"),
        1 => format!("gate D {m} {a} {}", angle(rng)),
        2 => format!("gate D {m} {} {a}", small(rng)),
        3 => format!("gate S {m} 0.3*th[{}]{:+}", rng.random_range(0..params), small(rng)),
        4 => format!("gate BS 0 1 {a} {}", angle(rng)),
        5 => format!("gate BS 1 0 {} {a}", angle(rng)),
        _ => format!("gate S2 {m} {} {a}", small(rng)),
    };
    writeln!(src, "{line}").unwrap();
}

fn first_degree_observable(rng: &mut ChaCha8Rng, modes: usize) -> String {
    let mut terms = vec![format!("{}", rng.random_range(-1.0..1.0))];
    for m in 0..modes {
        terms.push(format!("{} x{m}", rng.random_range(-1.0..1.0)));
        terms.push(format!("{} p{m}", rng.random_range(-1.0..1.0)));
    }
    terms.join(" + ")
}

fn second_degree_observable(rng: &mut ChaCha8Rng, modes: usize) -> String {
    let mut terms = vec![first_degree_observable(rng, modes)];
    for m in 0..modes {
        let c = rng.random_range(-1.0..1.0);
        terms.push(format!("{} x{m}^2", rng.random_range(-1.0..1.0)));
        terms.push(format!("{} p{m}^2", rng.random_range(-1.0..1.0)));
        terms.push(format!("{} x{m} p{m} + {} p{m} x{m}", c / 2.0, c / 2.0));
    }
    if modes > 1 {
        terms.push(format!("{} x0 x1", rng.random_range(-1.0..1.0)));
        terms.push(format!("{} p0 x1", rng.random_range(-1.0..1.0)));
    }
    terms.join(" + ")
}

/// All-Gaussian CV circuit on ≤2 modes with ≤6 gates.
pub fn random_gaussian_circuit(rng: &mut ChaCha8Rng, degree: u32) -> (CircuitIR<f64>, Vec<f64>) {
    let modes = rng.random_range(1..=2);
    let gates = rng.random_range(1..=6);
    let params = rng.random_range(1..=gates.min(3));
    let mut src = format!("platform cv\nwires {modes}\nparams {params}\n");
    let mut emitted = 0;
    while emitted < gates {
        let before = src.lines().count();
        cv_gaussian_gate(rng, modes, params, &mut src);
        // S2 expands to three gates
        emitted += if src.lines().last().is_some_and(|l| l.starts_with("gate S2")) { 3 } else { 1 };
        debug_assert!(src.lines().count() > before);
    }
    let obs = if degree <= 1 {
        first_degree_observable(rng, modes)
    } else {
        second_degree_observable(rng, modes)
    };
    writeln!(src, "observe {obs}").unwrap();
    let theta = (0..params).map(|_| rng.random_range(-1.0..1.0)).collect();
    (parse_circuit(&src).unwrap_or_else(|e| panic!("{e}\n{src}")), theta)
}

/// Small-magnitude CV circuit for the Fock oracle: total squeezing ≤ 0.5 and
/// total displacement ≤ 1 per circuit, at most one cubic phase with γ ≤ 0.2.
pub fn random_fock_circuit(rng: &mut ChaCha8Rng) -> CircuitIR<f64> {
    let modes = rng.random_range(1..=2);
    let gates = rng.random_range(1..=5);
    let mut src = format!("platform cv\nwires {modes}\nparams 0\n");
    let (mut squeeze, mut disp, mut cubic) = (0.5f64, 1.0f64, true);
    for _ in 0..gates {
        let m = rng.random_range(0..modes);
        let angle = rng.random_range(-3.2..3.2);
        match rng.random_range(0..if modes > 1 { 5 } else { 4 }) {
            0 => writeln!(src, "gate R {m} {angle}").unwrap(),
            1 if disp > 0.05 => {
                let r = rng.random_range(0.0..disp.min(0.5));
                disp -= r;
                writeln!(src, "gate D {m} {r} {angle}").unwrap();
            }
            2 if squeeze > 0.05 => {
                let r = rng.random_range(0.0..squeeze) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                squeeze -= r.abs();
                writeln!(src, "gate S {m} {r}").unwrap();
            }
            3 if cubic => {
                cubic = false;
                writeln!(src, "gate V {m} {}", rng.random_range(-0.2..0.2)).unwrap();
            }
            4 => writeln!(src, "gate BS 0 1 {angle} {}", rng.random_range(-3.2..3.2)).unwrap(),
            _ => writeln!(src, "gate R {m} {angle}").unwrap(),
        }
    }
    writeln!(src, "observe {}", second_degree_observable(rng, modes)).unwrap();
    parse_circuit(&src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}
