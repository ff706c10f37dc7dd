//! Scalar abstraction shared by every engine.
//!
//! All numerics are written against [`Real`] so the same code runs in `f64`
//! (the default, and the precision every tolerance in this crate is quoted
//! for) or `f32`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar used throughout the crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Absolute tolerance `t`, floored at a small multiple of the scalar's epsilon
/// so `f64` thresholds stay meaningful when running in `f32`.
#[inline]
pub fn tol<T: Real>(t: f64) -> T {
    let floor = T::epsilon() * lit::<T>(256.0);
    let t = lit::<T>(t);
    if t > floor {
        t
    } else {
        floor
    }
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

/// Binomial coefficient as a scalar.
pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::from_u32(n - i).unwrap() / T::from_u32(i + 1).unwrap();
    }
    acc.round()
}

pub fn factorial<T: Real>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_u32(i).unwrap())
}
