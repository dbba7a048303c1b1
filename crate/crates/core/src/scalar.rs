//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the circuit and filter math is generic over.
///
/// The tolerance hooks carry the numeric thresholds that depend on the
/// working precision; the `f64` values are the ones the test-suite pins.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative residual bound `‖Ax − b‖∞ ≤ tol·‖b‖∞` for the MNA solver.
    fn solve_residual_tol() -> Self;
    /// Pivot threshold relative to the largest initial matrix entry.
    fn pivot_tol() -> Self;
    /// Condition-estimate ceiling for rational fitting.
    fn fit_cond_limit() -> Self;
    /// Relative fit residual accepted by transfer-function extraction.
    fn fit_residual_tol() -> Self;
    /// Relative coefficient threshold below which polynomial terms are dust.
    fn trim_tol() -> Self;

    /// Converts an `f64` literal; every literal the crate uses is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal fits the scalar type")
    }
}

impl Scalar for f64 {
    fn solve_residual_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-13
    }
    fn fit_cond_limit() -> Self {
        1e12
    }
    fn fit_residual_tol() -> Self {
        1e-8
    }
    fn trim_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn solve_residual_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn fit_cond_limit() -> Self {
        1e6
    }
    fn fit_residual_tol() -> Self {
        1e-3
    }
    fn trim_tol() -> Self {
        1e-6
    }
}
