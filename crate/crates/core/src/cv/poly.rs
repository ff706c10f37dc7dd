//! Polynomials in noncommuting quadrature operators.
//!
//! Monomials are stored in canonical order: modes ascending, and within a
//! mode every `x` to the left of every `p`. Reordering uses `[x, p] = 2i`
//! (ħ = 2), so `p x = x p − 2i`. Distinct modes commute.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::cv::HBAR;
use crate::scalar::{binomial, creal, cx, factorial, lit, Cx, Real};

/// Coefficients below this magnitude are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// A single quadrature operator on one mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quadrature {
    X(usize),
    P(usize),
}

impl Quadrature {
    pub fn mode(self) -> usize {
        match self {
            Quadrature::X(m) | Quadrature::P(m) => m,
        }
    }
}

impl fmt::Display for Quadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quadrature::X(m) => write!(f, "x{m}"),
            Quadrature::P(m) => write!(f, "p{m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModePowers {
    pub mode: usize,
    pub x: u32,
    pub p: u32,
}

/// Canonical word `∏ᵢ xᵢ^aᵢ pᵢ^bᵢ`; modes with zero exponents are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadMonomial(Vec<ModePowers>);

impl QuadMonomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn single(q: Quadrature) -> Self {
        match q {
            Quadrature::X(mode) => Self(vec![ModePowers { mode, x: 1, p: 0 }]),
            Quadrature::P(mode) => Self(vec![ModePowers { mode, x: 0, p: 1 }]),
        }
    }

    /// Builds a monomial from per-mode powers, normalizing order and dropping
    /// empty entries. Repeated modes are rejected.
    pub fn from_powers(mut powers: Vec<ModePowers>) -> Option<Self> {
        powers.retain(|m| m.x + m.p > 0);
        powers.sort_by_key(|m| m.mode);
        if powers.windows(2).any(|w| w[0].mode == w[1].mode) {
            return None;
        }
        Some(Self(powers))
    }

    pub fn powers(&self) -> &[ModePowers] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|m| m.x + m.p).sum()
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.0.last().map(|m| m.mode)
    }

    /// The canonical word as an ordered list of first-degree factors.
    pub fn factors(&self) -> Vec<Quadrature> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for m in &self.0 {
            out.extend(std::iter::repeat_n(Quadrature::X(m.mode), m.x as usize));
            out.extend(std::iter::repeat_n(Quadrature::P(m.mode), m.p as usize));
        }
        out
    }
}

impl fmt::Display for QuadMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for m in &self.0 {
            for (name, pow) in [("x", m.x), ("p", m.p)] {
                if pow == 0 {
                    continue;
                }
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{name}{}", m.mode)?;
                if pow > 1 {
                    write!(f, "^{pow}")?;
                }
            }
        }
        Ok(())
    }
}

/// Reorders `p^b x^a` on one mode: `Σₖ k! C(a,k) C(b,k) (−iħ)^k x^(a−k) p^(b−k)`.
fn reorder_px<T: Real>(b: u32, a: u32) -> Vec<(u32, u32, Cx<T>)> {
    let minus_i_hbar = cx(T::zero(), -lit::<T>(HBAR));
    let mut out = Vec::with_capacity(a.min(b) as usize + 1);
    let mut pow = Cx::<T>::one();
    for k in 0..=a.min(b) {
        let c = factorial::<T>(k) * binomial::<T>(a, k) * binomial::<T>(b, k);
        out.push((a - k, b - k, pow * creal(c)));
        pow *= minus_i_hbar;
    }
    out
}

/// Product of two canonical monomials, expanded in canonical form.
fn monomial_product<T: Real>(lhs: &QuadMonomial, rhs: &QuadMonomial) -> Vec<(QuadMonomial, Cx<T>)> {
    // Per-mode factor lists; modes commute so each mode reorders independently.
    let mut modes: BTreeMap<usize, ((u32, u32), (u32, u32))> = BTreeMap::new();
    for m in &lhs.0 {
        modes.entry(m.mode).or_default().0 = (m.x, m.p);
    }
    for m in &rhs.0 {
        modes.entry(m.mode).or_default().1 = (m.x, m.p);
    }
    let mut acc: Vec<(Vec<ModePowers>, Cx<T>)> = vec![(Vec::new(), Cx::one())];
    for (mode, ((a1, b1), (a2, b2))) in modes {
        let expansions = reorder_px::<T>(b1, a2);
        let mut next = Vec::with_capacity(acc.len() * expansions.len());
        for (powers, coef) in &acc {
            for &(xa, pb, c) in &expansions {
                let mut p = powers.clone();
                let (x, pp) = (a1 + xa, pb + b2);
                if x + pp > 0 {
                    p.push(ModePowers { mode, x, p: pp });
                }
                next.push((p, *coef * c));
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(p, c)| (QuadMonomial(p), c)).collect()
}

/// Polynomial over canonical quadrature monomials with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadPolynomial<T> {
    terms: BTreeMap<QuadMonomial, Cx<T>>,
}

impl<T: Real> Default for QuadPolynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> QuadPolynomial<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        let mut p = Self::zero();
        p.add_term(QuadMonomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Cx::one())
    }

    pub fn quadrature(q: Quadrature) -> Self {
        let mut p = Self::zero();
        p.add_term(QuadMonomial::single(q), Cx::one());
        p
    }

    pub fn x(mode: usize) -> Self {
        Self::quadrature(Quadrature::X(mode))
    }

    pub fn p(mode: usize) -> Self {
        Self::quadrature(Quadrature::P(mode))
    }

    pub fn monomial(m: QuadMonomial, c: Cx<T>) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// Adds `c·m`, pruning the entry if it cancels.
    pub fn add_term(&mut self, m: QuadMonomial, c: Cx<T>) {
        let entry = self.terms.entry(m).or_insert_with(Cx::zero);
        *entry += c;
        let prune = lit::<T>(PRUNE_THRESHOLD);
        self.terms.retain(|_, v| v.norm() >= prune);
    }

    fn from_map(mut terms: BTreeMap<QuadMonomial, Cx<T>>) -> Self {
        let prune = lit::<T>(PRUNE_THRESHOLD);
        terms.retain(|_, v| v.norm() >= prune);
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QuadMonomial, &Cx<T>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &QuadMonomial) -> Cx<T> {
        self.terms.get(m).copied().unwrap_or_else(Cx::zero)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum monomial degree; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(QuadMonomial::degree).max().unwrap_or(0)
    }

    /// One past the highest mode index referenced.
    pub fn mode_count(&self) -> usize {
        self.terms
            .keys()
            .filter_map(QuadMonomial::max_mode)
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::from_map(self.terms.iter().map(|(m, &c)| (m.clone(), c * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            let e = terms.entry(m.clone()).or_insert_with(Cx::zero);
            *e += c;
        }
        Self::from_map(terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Cx::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<QuadMonomial, Cx<T>> = BTreeMap::new();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                for (m, c) in monomial_product::<T>(m1, m2) {
                    let e = terms.entry(m).or_insert_with(Cx::zero);
                    *e += c1 * c2 * c;
                }
            }
        }
        Self::from_map(terms)
    }

    /// Formal adjoint, re-expressed in canonical order.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            // (∏ xᵃ pᵇ)† = ∏ pᵇ xᵃ
            let mut term = Self::constant(c.conj());
            for mp in m.powers() {
                let mut mode_poly = Self::zero();
                for (x, p, k) in reorder_px::<T>(mp.p, mp.x) {
                    let mono = QuadMonomial::from_powers(vec![ModePowers { mode: mp.mode, x, p }]).unwrap();
                    mode_poly.add_term(mono, k);
                }
                term = term.mul(&mode_poly);
            }
            out = out.add(&term);
        }
        out
    }

    /// Largest coefficient magnitude of `self − self†`.
    pub fn hermiticity_residual(&self) -> T {
        self.sub(&self.adjoint()).max_coefficient()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_residual() <= tol
    }

    pub fn max_coefficient(&self) -> T {
        self.terms.values().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// Largest coefficient difference against `other`.
    pub fn distance(&self, other: &Self) -> T {
        let mut d = T::zero();
        for (m, &c) in &self.terms {
            d = d.max((c - other.coefficient(m)).norm());
        }
        for (m, &c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.norm());
            }
        }
        d
    }
}

/// Rewrites a product of quadrature operators, read left to right, into
/// canonical form.
pub fn canonicalize<T: Real>(word: &[Quadrature]) -> QuadPolynomial<T> {
    word.iter()
        .fold(QuadPolynomial::one(), |acc, &q| acc.mul(&QuadPolynomial::quadrature(q)))
}

impl<T: Real> fmt::Display for QuadPolynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.im.is_zero() {
                write!(f, "{} {m}", c.re)?;
            } else {
                write!(f, "({}{:+}i) {m}", c.re, c.im)?;
            }
        }
        Ok(())
    }
}
