//! Behavioral simulation and closed-form analysis of a voltage-mode
//! multifunction biquad built from two balanced-output second-generation
//! current conveyors (CCII±), four resistors and two capacitors.
//!
//! Every result has two independent routes:
//!
//! * [`filter`] evaluates the closed-form transfer functions and design
//!   equations; [`mna`] simulates a netlist of the same circuit with complex
//!   modified nodal analysis and recovers its transfer function numerically.
//! * [`sensitivity`] gives the analytic ω₀/Q sensitivities and checks them
//!   with log-derivative central differences.
//! * [`response`] classifies and measures swept responses, closing the loop
//!   between simulation and the design equations.
//!
//! Units are SI throughout: ohms, farads, and angular frequency in rad/s.
//!
//! The math is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! name the `f64` instantiations used by the CLI and the test-suite.

// `!(x > y)` also rejects NaN; index loops mirror the matrix algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circuit;
pub mod filter;
pub mod linalg;
pub mod mna;
pub mod netlist;
pub mod response;
pub mod scalar;
pub mod sensitivity;

pub use circuit::{Element, ElementKind, NodeId, RationalTf, ValidationError};
pub use filter::{DesignParams, FilterDesign, FilterMode, Param};
pub use mna::{MnaError, MnaSystem};
pub use netlist::{parse_netlist, serialize_netlist, ParseError};
pub use response::{FrequencyResponse, MeasuredParams};
pub use scalar::Scalar;
pub use sensitivity::{SensitivityReport, SensitivityTarget};

/// Netlist over `f64` component values.
pub type Netlist = circuit::Netlist<f64>;
/// Transfer function with `f64` coefficients.
pub type Tf = RationalTf<f64>;
/// Filter design with `f64` component values.
pub type Design = FilterDesign<f64>;
/// Design parameters in `f64`.
pub type Params = DesignParams<f64>;
/// Swept response in `f64`.
pub type Sweep = FrequencyResponse<f64>;
/// Measurement result in `f64`.
pub type Measured = MeasuredParams<f64>;
/// Sensitivity report in `f64`.
pub type Sensitivities = SensitivityReport<f64>;

/// Single-precision netlist.
pub type NetlistF32 = circuit::Netlist<f32>;
/// Single-precision transfer function.
pub type TfF32 = RationalTf<f32>;
/// Single-precision filter design.
pub type DesignF32 = FilterDesign<f32>;
