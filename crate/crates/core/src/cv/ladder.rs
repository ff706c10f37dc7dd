//! Vacuum expectation values through normal-ordered ladder operators.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::cv::poly::{QuadMonomial, QuadPolynomial};
use crate::scalar::{binomial, cx, factorial, Cx, Real};

/// Single-mode normal-ordered polynomial: `(m, n) ↦ coefficient of a†ᵐaⁿ`.
type Normal<T> = BTreeMap<(u32, u32), Cx<T>>;

fn normal_mul<T: Real>(lhs: &Normal<T>, rhs: &Normal<T>) -> Normal<T> {
    // (a†^m1 a^n1)(a†^m2 a^n2) = Σ_k C(n1,k) C(m2,k) k! a†^(m1+m2−k) a^(n1+n2−k)
    let mut out = Normal::new();
    for (&(m1, n1), &c1) in lhs {
        for (&(m2, n2), &c2) in rhs {
            for k in 0..=n1.min(m2) {
                let w = binomial::<T>(n1, k) * binomial::<T>(m2, k) * factorial::<T>(k);
                *out.entry((m1 + m2 - k, n1 + n2 - k)).or_insert_with(Cx::zero) += c1 * c2 * w;
            }
        }
    }
    out
}

fn x_normal<T: Real>() -> Normal<T> {
    Normal::from([((0, 1), Cx::one()), ((1, 0), Cx::one())])
}

fn p_normal<T: Real>() -> Normal<T> {
    Normal::from([((0, 1), cx(T::zero(), -T::one())), ((1, 0), cx(T::zero(), T::one()))])
}

/// `⟨0|xᵃpᵇ|0⟩` for a single mode.
pub fn mode_moment<T: Real>(a: u32, b: u32) -> Cx<T> {
    // odd total degree vanishes on the vacuum
    if (a + b) % 2 == 1 {
        return Cx::zero();
    }
    let (x, p) = (x_normal::<T>(), p_normal::<T>());
    let mut acc = Normal::from([((0, 0), Cx::one())]);
    for _ in 0..a {
        acc = normal_mul(&acc, &x);
    }
    for _ in 0..b {
        acc = normal_mul(&acc, &p);
    }
    acc.get(&(0, 0)).copied().unwrap_or_else(Cx::zero)
}

fn monomial_moment<T: Real>(m: &QuadMonomial, cache: &mut BTreeMap<(u32, u32), Cx<T>>) -> Cx<T> {
    let mut v = Cx::one();
    for mp in m.powers() {
        let key = (mp.x, mp.p);
        let moment = *cache.entry(key).or_insert_with(|| mode_moment(mp.x, mp.p));
        if moment.is_zero() {
            return Cx::zero();
        }
        v *= moment;
    }
    v
}

/// `⟨0|P|0⟩` for a canonical polynomial on the multimode vacuum.
pub fn vacuum_expectation<T: Real>(poly: &QuadPolynomial<T>) -> Cx<T> {
    let mut cache = BTreeMap::new();
    poly.terms()
        .map(|(m, &c)| c * monomial_moment(m, &mut cache))
        .fold(Cx::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cv::poly::{canonicalize, Quadrature};

    fn vac(word: &[Quadrature]) -> Cx<f64> {
        vacuum_expectation(&canonicalize::<f64>(word))
    }

    #[test]
    fn low_moments() {
        use Quadrature::{P, X};
        assert_eq!(vac(&[]), cx(1.0, 0.0));
        assert_eq!(vac(&[X(0)]), cx(0.0, 0.0));
        assert!((vac(&[X(0), X(0)]) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!((vac(&[P(0), P(0)]) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!((vac(&[X(0), P(0)]) - cx(0.0, 1.0)).norm() < 1e-15);
        assert!((vac(&[P(0), X(0)]) - cx(0.0, -1.0)).norm() < 1e-15);
        assert!((vac(&[X(0), X(0), X(0), X(0)]) - cx(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symmetrized_xp_vanishes() {
        use Quadrature::{P, X};
        let sym = canonicalize::<f64>(&[X(0), P(0)])
            .add(&canonicalize(&[P(0), X(0)]))
            .scale(cx(0.5, 0.0));
        assert!(vacuum_expectation(&sym).norm() < 1e-15);
    }

    #[test]
    fn gaussian_moments() {
        // ⟨x^2k⟩ = (2k−1)!! for unit variance
        for (k, dfact) in [(1u32, 1.0), (2, 3.0), (3, 15.0), (4, 105.0)] {
            assert!((mode_moment::<f64>(2 * k, 0).re - dfact).abs() < 1e-10);
            assert!((mode_moment::<f64>(0, 2 * k).re - dfact).abs() < 1e-10);
        }
    }

    #[test]
    fn modes_factorize() {
        use Quadrature::X;
        assert!((vac(&[X(0), X(0), X(1), X(1)]) - cx(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(vac(&[X(0), X(1)]), cx(0.0, 0.0));
    }
}
