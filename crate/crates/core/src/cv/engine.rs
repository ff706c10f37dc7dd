//! Heisenberg evolution of quadrature polynomials through CV circuits.

use crate::circuit::{CircuitIR, Gate, Platform};
use crate::cv::gates::{gate_action, gaussian_matrix, GateAction, HeisenbergMatrix};
use crate::cv::ladder::vacuum_expectation;
use crate::cv::poly::QuadPolynomial;
use crate::cv::CvConfig;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Cx, Real};

/// Tolerance on the imaginary part of a Hermitian expectation.
pub const CV_IMAGINARY_TOL: f64 = 1e-10;

/// Replaces every quadrature factor by its image under `action` and
/// multiplies the images in operator order.
pub fn conjugate<T: Real>(poly: &QuadPolynomial<T>, action: &GateAction<T>) -> QuadPolynomial<T> {
    let mut out = QuadPolynomial::zero();
    for (m, &c) in poly.terms() {
        let image = m
            .factors()
            .into_iter()
            .fold(QuadPolynomial::constant(c), |acc, q| acc.mul(&action.image(q)));
        out = out.add(&image);
    }
    out
}

/// Conjugates `poly` by `gates` (last gate first). `offset` is the circuit
/// position of `gates[0]`, used in error messages.
pub fn evolve_gates<T: Real>(
    poly: &QuadPolynomial<T>,
    gates: &[Gate<T>],
    args: &[Vec<T>],
    modes: usize,
    offset: usize,
    max_degree: u32,
) -> Result<QuadPolynomial<T>> {
    let mut current = poly.clone();
    for (i, gate) in gates.iter().enumerate().rev() {
        let action = gate_action(gate, &args[i], modes)?;
        current = conjugate(&current, &action);
        let degree = current.degree();
        if degree > max_degree {
            return Err(Error::DegreeBoundExceeded {
                position: offset + i,
                gate: gate.kind.name(),
                degree,
                max_degree,
            });
        }
    }
    Ok(current)
}

fn check_observable<T: Real>(obs: &QuadPolynomial<T>, modes: usize, max_degree: u32) -> Result<()> {
    if obs.mode_count() > modes {
        return Err(Error::WireOutOfRange {
            wire: obs.mode_count() - 1,
            wire_count: modes,
        });
    }
    if obs.degree() > max_degree {
        return Err(Error::InvalidArgument(format!(
            "observable degree {} exceeds the cap of {max_degree}",
            obs.degree()
        )));
    }
    Ok(())
}

/// `U†·obs·U` computed gate by gate.
pub fn heisenberg_evolve<T: Real>(
    obs: &QuadPolynomial<T>,
    circuit: &CircuitIR<T>,
    theta: &[T],
    config: &CvConfig,
) -> Result<QuadPolynomial<T>> {
    circuit.expect_platform(Platform::Cv)?;
    circuit.check_params(theta)?;
    check_observable(obs, circuit.wire_count(), config.max_degree)?;
    let args = circuit.resolve(theta);
    evolve_gates(obs, circuit.gates(), &args, circuit.wire_count(), 0, config.max_degree)
}

/// Product `M^{g_L}⋯M^{g_1}` of an all-Gaussian gate sequence, so that a
/// first-degree row vector `b` evolves to `b·M`.
pub fn circuit_matrix<T: Real>(gates: &[Gate<T>], args: &[Vec<T>], modes: usize) -> Result<HeisenbergMatrix<T>> {
    let mut total = HeisenbergMatrix::identity(modes);
    for (i, gate) in gates.iter().enumerate() {
        if !gate.kind.is_gaussian() {
            return Err(Error::InvalidCircuit(format!(
                "gate {i} ({}) is not Gaussian and has no Heisenberg matrix",
                gate.kind.name()
            )));
        }
        let m = gaussian_matrix(&gate.kind, &args[i])?.embed(&gate.wires, modes);
        total = m.mul(&total);
    }
    Ok(total)
}

/// `U†·obs·U` for an all-Gaussian circuit through the single product matrix.
pub fn heisenberg_evolve_matrix<T: Real>(
    obs: &QuadPolynomial<T>,
    circuit: &CircuitIR<T>,
    theta: &[T],
    config: &CvConfig,
) -> Result<QuadPolynomial<T>> {
    circuit.expect_platform(Platform::Cv)?;
    circuit.check_params(theta)?;
    check_observable(obs, circuit.wire_count(), config.max_degree)?;
    let args = circuit.resolve(theta);
    let total = circuit_matrix(circuit.gates(), &args, circuit.wire_count())?;
    Ok(conjugate(obs, &GateAction::Linear(total)))
}

/// Real part of a Hermitian vacuum expectation, rejecting imaginary residue.
pub fn real_vacuum_expectation<T: Real>(poly: &QuadPolynomial<T>) -> Result<T> {
    let v: Cx<T> = vacuum_expectation(poly);
    if v.im.abs() > lit::<T>(CV_IMAGINARY_TOL) * v.re.abs().max(T::one()) {
        return Err(Error::ImaginaryResidue { residue: to_f64(v.im) });
    }
    Ok(v.re)
}

/// `⟨0|U†·B·U|0⟩` with the circuit's own observable.
pub fn cv_expectation<T: Real>(circuit: &CircuitIR<T>, theta: &[T], config: &CvConfig) -> Result<T> {
    let obs = circuit.observable().cv_polynomial().ok_or(Error::PlatformMismatch {
        expected: Platform::Cv.name(),
        found: circuit.platform().name(),
    })?;
    real_vacuum_expectation(&heisenberg_evolve(obs, circuit, theta, config)?)
}

/// Same as [`cv_expectation`] with already resolved gate arguments.
pub(crate) fn resolved_cv_expectation<T: Real>(
    circuit: &CircuitIR<T>,
    obs: &QuadPolynomial<T>,
    args: &[Vec<T>],
    config: &CvConfig,
) -> Result<T> {
    let evolved = evolve_gates(obs, circuit.gates(), args, circuit.wire_count(), 0, config.max_degree)?;
    real_vacuum_expectation(&evolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::cv::poly::{QuadMonomial, Quadrature};
    use crate::scalar::cx;

    fn circuit(src: &str) -> CircuitIR<f64> {
        parse_circuit(src).unwrap()
    }

    #[test]
    fn squeezed_x_squared() {
        let c = circuit("platform cv\nwires 1\ngate S 0 th[0]\nobserve 1 x0^2");
        let obs = c.observable().cv_polynomial().unwrap().clone();
        let evolved = heisenberg_evolve(&obs, &c, &[0.3], &CvConfig::default()).unwrap();
        let expected = obs.scale(cx((-0.6f64).exp(), 0.0));
        assert!(evolved.distance(&expected) < 1e-15);
        let v = cv_expectation(&c, &[0.3], &CvConfig::default()).unwrap();
        assert!((v - 0.548_811_636_094_026_4).abs() < 1e-14);
    }

    #[test]
    fn displaced_mean_and_empty_circuit() {
        let c = circuit("platform cv\nwires 1\ngate D 0 th[0] 0\nobserve 1 x0");
        assert!((cv_expectation(&c, &[0.35], &CvConfig::default()).unwrap() - 0.7).abs() < 1e-15);
        let empty = circuit("platform cv\nwires 1\nparams 0\nobserve 1 x0");
        assert_eq!(cv_expectation(&empty, &[], &CvConfig::default()).unwrap(), 0.0);
        let obs = empty.observable().cv_polynomial().unwrap();
        assert_eq!(&heisenberg_evolve(obs, &empty, &[], &CvConfig::default()).unwrap(), obs);
    }

    #[test]
    fn cubic_phase_raises_degree() {
        let c = circuit("platform cv\nwires 1\ngate D 0 th[0] 0\ngate V 0 0.2\nobserve 1 p0");
        let obs = c.observable().cv_polynomial().unwrap();
        let evolved = heisenberg_evolve(obs, &c, &[0.5], &CvConfig::default()).unwrap();
        // D(r,0)† (p + γx²) D(r,0) = p + γ(x + 2r)²
        let x2 = QuadMonomial::from_powers(vec![crate::cv::poly::ModePowers { mode: 0, x: 2, p: 0 }]).unwrap();
        assert_eq!(evolved.degree(), 2);
        assert!((evolved.coefficient(&x2) - cx(0.2, 0.0)).norm() < 1e-15);
        assert!((evolved.coefficient(&QuadMonomial::single(Quadrature::X(0))) - cx(0.4, 0.0)).norm() < 1e-15);
        assert!((evolved.coefficient(&QuadMonomial::one()) - cx(0.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degree_cap_names_gate() {
        let c = circuit("platform cv\nwires 1\ngate V 0 0.1\ngate V 0 0.1\nobserve 1 p0^2");
        let cfg = CvConfig {
            max_degree: 3,
            ..CvConfig::default()
        };
        let err = cv_expectation(&c, &[], &cfg).unwrap_err();
        assert!(matches!(err, Error::DegreeBoundExceeded { position: 1, degree: 4, .. }), "{err}");
    }

    #[test]
    fn matrix_path_matches_gate_path() {
        let c = circuit(
            "platform cv\nwires 2\ngate S 0 0.3\ngate D 1 0.2 0.4\ngate BS 0 1 th[0] 0.7\ngate R 1 -0.5\nobserve 1 x0^2 + 0.5 x1 p0 + 0.5 p0 x1",
        );
        let obs = c.observable().cv_polynomial().unwrap();
        let a = heisenberg_evolve(obs, &c, &[0.9], &CvConfig::default()).unwrap();
        let b = heisenberg_evolve_matrix(obs, &c, &[0.9], &CvConfig::default()).unwrap();
        assert!(a.distance(&b) < 1e-13);
        assert!(a.is_hermitian(1e-12));
    }
}
