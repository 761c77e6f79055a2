//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Transition matrices of lazy walks have entries of the form `1/(2d)`, so
//! every structural quantity (rows, stationary masses, propagated
//! distributions, Dirichlet forms) is representable exactly over the
//! rationals. Spectral quantities are not, and are always computed in `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Field-like number type used for matrices, distributions and forms.
pub trait Scalar:
    Clone + Debug + PartialOrd + NumAssign + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// `num / den` in this scalar type.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("integer fits scalar")
    }

    /// Lossless for floats, nearest `f64` for rationals.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an `f64` literal such as a tolerance. Exact types receive the
    /// exact binary value of `x`.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to scalar")
    }

    /// Whether arithmetic in this type is exact. Tolerance checks collapse to
    /// equality for exact types.
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

impl Scalar for BigRational {
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_exact() -> bool {
        true
    }
}

/// `|a - b| <= tol`, or exact equality for exact scalars.
pub fn approx_eq<S: Scalar>(a: &S, b: &S, tol: f64) -> bool {
    if S::is_exact() {
        a == b
    } else {
        (a.clone() - b.clone()).abs().to_f64_lossy() <= tol
    }
}

/// Neumaier-compensated sum; the result does not depend on how the input
/// was produced as long as the order is fixed.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ratio_is_exact() {
        let third = BigRational::ratio(1, 3);
        let sum = third.clone() + third.clone() + third;
        assert_eq!(sum, BigRational::ratio(1, 1));
        assert!(approx_eq(&sum, &BigRational::ratio(3, 3), 0.0));
    }

    #[test]
    fn float_ratio_and_tolerance() {
        assert!(approx_eq(&f64::ratio(1, 3), &(1.0 / 3.0), 1e-15));
        assert!(!approx_eq(&0.1f64, &0.2, 1e-3));
        assert_eq!(f32::ratio(1, 4), 0.25);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1e16, 1.0, -1e16];
        assert_eq!(compensated_sum(terms), 1.0);
    }
}
