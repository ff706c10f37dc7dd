//! Heisenberg-picture gate actions on the quadrature basis
//! `(𝟙, x₁, p₁, …, xₙ, pₙ)`.
//!
//! Matrices act on rows: `Ω[Ĉᵢ] = Σⱼ Mᵢⱼ Ĉⱼ`.

use std::fmt;

use crate::circuit::{Gate, GateKind};
use crate::cv::poly::{QuadPolynomial, Quadrature};
use crate::error::{Error, Result};
use crate::scalar::{creal, lit, Real};

/// Tolerance for the symplectic check on the quadrature block.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Basis index of a quadrature: `xᵢ ↦ 2i+1`, `pᵢ ↦ 2i+2`.
pub fn basis_index(q: Quadrature) -> usize {
    match q {
        Quadrature::X(m) => 2 * m + 1,
        Quadrature::P(m) => 2 * m + 2,
    }
}

fn basis_quadrature(i: usize) -> Option<Quadrature> {
    match i {
        0 => None,
        i if i % 2 == 1 => Some(Quadrature::X((i - 1) / 2)),
        i => Some(Quadrature::P((i - 2) / 2)),
    }
}

/// Real `(2n+1)×(2n+1)` matrix of a Gaussian conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct HeisenbergMatrix<T> {
    modes: usize,
    data: Vec<T>,
    label: String,
    params: Vec<T>,
}

impl<T: Real> HeisenbergMatrix<T> {
    pub fn identity(modes: usize) -> Self {
        let dim = 2 * modes + 1;
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = T::one();
        }
        Self {
            modes,
            data,
            label: "I".into(),
            params: Vec::new(),
        }
    }

    /// Builds from row-major entries; the first row must be `(1, 0, …, 0)`.
    pub fn from_rows(modes: usize, data: Vec<T>, label: impl Into<String>, params: Vec<T>) -> Result<Self> {
        let dim = 2 * modes + 1;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self {
            modes,
            data,
            label: label.into(),
            params,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes + 1
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim() + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        let dim = self.dim();
        self.data[i * dim + j] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.modes, other.modes, "mode count mismatch");
        let dim = self.dim();
        let mut data = vec![T::zero(); dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    data[i * dim + j] += a * other.get(k, j);
                }
            }
        }
        Self {
            modes: self.modes,
            data,
            label: format!("{}·{}", self.label, other.label),
            params: Vec::new(),
        }
    }

    pub fn add_scaled(&self, other: &Self, c: T) -> Self {
        assert_eq!(self.modes, other.modes, "mode count mismatch");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + c * b).collect();
        Self {
            modes: self.modes,
            data,
            label: self.label.clone(),
            params: Vec::new(),
        }
    }

    pub fn zeros(modes: usize) -> Self {
        let dim = 2 * modes + 1;
        Self {
            modes,
            data: vec![T::zero(); dim * dim],
            label: "0".into(),
            params: Vec::new(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Places a gate matrix on `wires` of an `modes`-mode system.
    pub fn embed(&self, wires: &[usize], modes: usize) -> Self {
        assert_eq!(wires.len(), self.modes, "wire count mismatch");
        let map = |i: usize| -> usize {
            match basis_quadrature(i) {
                None => 0,
                Some(Quadrature::X(m)) => basis_index(Quadrature::X(wires[m])),
                Some(Quadrature::P(m)) => basis_index(Quadrature::P(wires[m])),
            }
        };
        let mut out = Self::identity(modes);
        for w in wires {
            for idx in [basis_index(Quadrature::X(*w)), basis_index(Quadrature::P(*w))] {
                out.set(idx, idx, T::zero());
            }
        }
        let local = self.dim();
        for i in 0..local {
            for j in 0..local {
                let v = self.get(i, j);
                if i == 0 && j == 0 {
                    continue;
                }
                out.set(map(i), map(j), v);
            }
        }
        out.label = self.label.clone();
        out.params = self.params.clone();
        out
    }

    /// `‖S J Sᵀ − J‖∞` for the quadrature block `S`.
    pub fn symplectic_residual(&self) -> T {
        let n = 2 * self.modes;
        let s = |i: usize, j: usize| self.get(i + 1, j + 1);
        let j_form = |i: usize, j: usize| -> T {
            if i / 2 != j / 2 {
                T::zero()
            } else if i.is_multiple_of(2) && j == i + 1 {
                T::one()
            } else if i % 2 == 1 && j + 1 == i {
                -T::one()
            } else {
                T::zero()
            }
        };
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    for l in 0..n {
                        acc += s(a, k) * j_form(k, l) * s(b, l);
                    }
                }
                worst = worst.max((acc - j_form(a, b)).abs());
            }
        }
        worst
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_residual() <= lit::<T>(SYMPLECTIC_TOL)
    }

    /// Image of a basis quadrature as a first-degree polynomial.
    pub fn image(&self, q: Quadrature) -> QuadPolynomial<T> {
        let i = basis_index(q);
        let mut out = QuadPolynomial::zero();
        for j in 0..self.dim() {
            let v = self.get(i, j);
            if v.is_zero() {
                continue;
            }
            let term = match basis_quadrature(j) {
                None => QuadPolynomial::one(),
                Some(q) => QuadPolynomial::quadrature(q),
            };
            out = out.add(&term.scale(creal(v)));
        }
        out
    }
}

impl<T: Real> fmt::Display for HeisenbergMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.label)?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim()).map(|j| format!("{:>10.6}", self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Local matrix of a Gaussian gate from its resolved arguments.
pub fn gaussian_matrix<T: Real>(kind: &GateKind<T>, params: &[T]) -> Result<HeisenbergMatrix<T>> {
    let (o, l) = (T::zero(), T::one());
    let two = lit::<T>(2.0);
    let expect = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "{} takes {n} argument(s), got {}",
                kind.name(),
                params.len()
            )))
        }
    };
    let (modes, data) = match kind {
        GateKind::Rotation => {
            expect(1)?;
            let (s, c) = params[0].sin_cos();
            (1, vec![l, o, o, o, c, -s, o, s, c])
        }
        GateKind::Displacement => {
            expect(2)?;
            let (r, (s, c)) = (params[0], params[1].sin_cos());
            (1, vec![l, o, o, two * r * c, l, o, two * r * s, o, l])
        }
        GateKind::Squeeze => {
            expect(1)?;
            let r = params[0];
            (1, vec![l, o, o, o, (-r).exp(), o, o, o, r.exp()])
        }
        GateKind::BeamSplitter => {
            expect(2)?;
            let (st, ct) = params[0].sin_cos();
            let (sp, cp) = params[1].sin_cos();
            let (a, b) = (cp * st, sp * st);
            #[rustfmt::skip]
            let data = vec![
                l, o,  o,  o,  o,
                o, ct, o,  -a, -b,
                o, o,  ct, b,  -a,
                o, a,  -b, ct, o,
                o, b,  a,  o,  ct,
            ];
            (2, data)
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "{} has no Heisenberg matrix",
                other.name()
            )))
        }
    };
    HeisenbergMatrix::from_rows(modes, data, kind.name(), params.to_vec())
}

/// Conjugation by one gate.
#[derive(Clone, Debug, PartialEq)]
pub enum GateAction<T> {
    /// Gaussian gate embedded in the full mode count.
    Linear(HeisenbergMatrix<T>),
    /// Quadratures not listed are left unchanged.
    Substitution(Vec<(Quadrature, QuadPolynomial<T>)>),
}

impl<T: Real> GateAction<T> {
    pub fn image(&self, q: Quadrature) -> QuadPolynomial<T> {
        match self {
            GateAction::Linear(m) if q.mode() < m.modes() => m.image(q),
            GateAction::Linear(_) => QuadPolynomial::quadrature(q),
            GateAction::Substitution(rules) => rules
                .iter()
                .find(|(k, _)| *k == q)
                .map(|(_, p)| p.clone())
                .unwrap_or_else(|| QuadPolynomial::quadrature(q)),
        }
    }
}

/// Cubic phase `V(γ)`: `x ↦ x`, `p ↦ p + γx²`.
pub fn cubic_phase_action<T: Real>(mode: usize, gamma: T) -> GateAction<T> {
    let x = QuadPolynomial::x(mode);
    let p = QuadPolynomial::p(mode).add(&x.mul(&x).scale(creal(gamma)));
    GateAction::Substitution(vec![(Quadrature::P(mode), p)])
}

/// Action of `gate` with resolved `args` on an `modes`-mode system.
pub fn gate_action<T: Real>(gate: &Gate<T>, args: &[T], modes: usize) -> Result<GateAction<T>> {
    match gate.kind {
        GateKind::CubicPhase => Ok(cubic_phase_action(gate.wires[0], args[0])),
        _ => Ok(GateAction::Linear(gaussian_matrix(&gate.kind, args)?.embed(&gate.wires, modes))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn close(a: &HeisenbergMatrix<f64>, rows: &[f64]) -> bool {
        a.as_slice().iter().zip(rows).all(|(x, y)| (x - y).abs() < 1e-15)
    }

    #[test]
    fn identity_cases() {
        let r = gaussian_matrix::<f64>(&GateKind::Rotation, &[0.0]).unwrap();
        assert!(close(&r, HeisenbergMatrix::<f64>::identity(1).as_slice()));
        let bs = gaussian_matrix::<f64>(&GateKind::BeamSplitter, &[0.0, 0.7]).unwrap();
        assert!(close(&bs, HeisenbergMatrix::<f64>::identity(2).as_slice()));
    }

    #[test]
    fn squeeze_and_displacement_rows() {
        let s = gaussian_matrix::<f64>(&GateKind::Squeeze, &[0.3]).unwrap();
        assert!(close(&s, &[1.0, 0.0, 0.0, 0.0, (-0.3f64).exp(), 0.0, 0.0, 0.0, 0.3f64.exp()]));
        let d = gaussian_matrix::<f64>(&GateKind::Displacement, &[0.4, 0.9]).unwrap();
        let img = d.image(Quadrature::X(0));
        assert!((img.coefficient(&crate::cv::poly::QuadMonomial::one()) - cx(0.8 * 0.9f64.cos(), 0.0)).norm() < 1e-15);
        let img = d.image(Quadrature::P(0));
        assert!((img.coefficient(&crate::cv::poly::QuadMonomial::one()) - cx(0.8 * 0.9f64.sin(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_image() {
        let r = gaussian_matrix::<f64>(&GateKind::Rotation, &[0.6]).unwrap();
        let expected = QuadPolynomial::x(0)
            .scale(cx(0.6f64.cos(), 0.0))
            .sub(&QuadPolynomial::p(0).scale(cx(0.6f64.sin(), 0.0)));
        assert!(r.image(Quadrature::X(0)).distance(&expected) < 1e-15);
    }

    #[test]
    fn all_gates_symplectic() {
        for (kind, p) in [
            (GateKind::Rotation, vec![1.1]),
            (GateKind::Displacement, vec![0.7, -0.4]),
            (GateKind::Squeeze, vec![0.8]),
            (GateKind::BeamSplitter, vec![0.5, 1.3]),
        ] {
            let m = gaussian_matrix::<f64>(&kind, &p).unwrap();
            assert!(m.symplectic_residual() < 1e-12, "{}", kind.name());
            assert!(m.embed(&[1, 0][..m.modes()], 3).is_symplectic());
        }
    }

    #[test]
    fn embedding_reorders_wires() {
        let bs = gaussian_matrix::<f64>(&GateKind::BeamSplitter, &[0.5, 0.0]).unwrap();
        let swapped = bs.embed(&[1, 0], 2);
        // x₁ now plays the role of x_a
        assert!((swapped.get(3, 3) - 0.5f64.cos()).abs() < 1e-15);
        assert!((swapped.get(3, 1) + 0.5f64.sin()).abs() < 1e-15);
        let s = gaussian_matrix::<f64>(&GateKind::Squeeze, &[0.2]).unwrap().embed(&[1], 2);
        assert_eq!(s.get(1, 1), 1.0);
        assert!((s.get(3, 3) - (-0.2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cubic_phase_rejected_as_matrix() {
        assert!(gaussian_matrix::<f64>(&GateKind::CubicPhase, &[0.1]).is_err());
    }
}
