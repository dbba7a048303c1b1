//! Closed-form model of the two-conveyor multifunction biquad.
//!
//! With `G = K1·K2·B1·B2` the output is
//!
//! ```text
//! Vout·D(s) = R3R6·V1 + R1R3·V4 + K1K2B2·(s²C2C5R1R3R4R6·V2 + sC5R1R4R6·V3)
//! D(s)      = G·(s²C2C5R1R3R4R6 + sC5R1R4R6) + R3(R1 + R6)
//! ```
//!
//! and the ideal case is `B = K = 1`. Component names keep the circuit's
//! numbering (there is no R2, R5, C1 …).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::{Netlist, RationalTf};
use crate::Scalar;

/// Every symbol a sensitivity can be taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    R1,
    R3,
    R4,
    R6,
    C2,
    C5,
    B1,
    B2,
    K1,
    K2,
}

impl Param {
    pub const ALL: [Param; 10] =
        [Param::R1, Param::R3, Param::R4, Param::R6, Param::C2, Param::C5, Param::B1, Param::B2, Param::K1, Param::K2];
    pub const PASSIVE: [Param; 6] = [Param::R1, Param::R3, Param::R4, Param::R6, Param::C2, Param::C5];

    pub fn name(self) -> &'static str {
        match self {
            Param::R1 => "R1",
            Param::R3 => "R3",
            Param::R4 => "R4",
            Param::R6 => "R6",
            Param::C2 => "C2",
            Param::C5 => "C5",
            Param::B1 => "B1",
            Param::B2 => "B2",
            Param::K1 => "K1",
            Param::K2 => "K2",
        }
    }

    pub fn is_gain(self) -> bool {
        matches!(self, Param::B1 | Param::B2 | Param::K1 | Param::K2)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown parameter {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("{0} must be positive")]
    NonPositive(Param),
    #[error("{0} must be finite")]
    NonFinite(Param),
    #[error("{0} must lie in (0, 2]")]
    GainOutOfRange(Param),
    #[error("tuning targets must be positive and finite")]
    InvalidTarget,
    #[error("infeasible tuning: required {0} is not a positive finite value")]
    InfeasibleTuning(Param),
}

/// Component values (Ω, F) and conveyor gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDesign<T> {
    r1: T,
    r3: T,
    r4: T,
    r6: T,
    c2: T,
    c5: T,
    b1: T,
    b2: T,
    k1: T,
    k2: T,
}

impl<T: Scalar> FilterDesign<T> {
    /// Ideal-conveyor design (`B1 = B2 = K1 = K2 = 1`).
    pub fn new(r1: T, r3: T, r4: T, r6: T, c2: T, c5: T) -> Result<Self, DesignError> {
        let one = T::one();
        let d = Self { r1, r3, r4, r6, c2, c5, b1: one, b2: one, k1: one, k2: one };
        d.check()?;
        Ok(d)
    }

    /// R1 = R4 = R6 = 10 kΩ, R3 = 14 kΩ, C2 = C5 = 10 nF: ω₀ = 14142.14 rad/s
    /// (2250.8 Hz) and Q = 1.9799. The design is often quoted as
    /// "14.14 kHz, Q = 2"; the frequency is in rad/s and Q = 2 exactly would
    /// need R3 = 14.142 kΩ.
    pub fn reference() -> Self {
        Self::new(T::lit(10e3), T::lit(14e3), T::lit(10e3), T::lit(10e3), T::lit(10e-9), T::lit(10e-9))
            .expect("reference values are valid")
    }

    pub fn with_gains(mut self, b1: T, b2: T, k1: T, k2: T) -> Result<Self, DesignError> {
        self.b1 = b1;
        self.b2 = b2;
        self.k1 = k1;
        self.k2 = k2;
        self.check()?;
        Ok(self)
    }

    /// Replaces one value, revalidating the design.
    pub fn with(mut self, p: Param, value: T) -> Result<Self, DesignError> {
        *self.slot(p) = value;
        self.check()?;
        Ok(self)
    }

    /// Replaces one value without the range checks; used for perturbation.
    pub(crate) fn with_unchecked(mut self, p: Param, value: T) -> Self {
        *self.slot(p) = value;
        self
    }

    pub fn get(&self, p: Param) -> T {
        match p {
            Param::R1 => self.r1,
            Param::R3 => self.r3,
            Param::R4 => self.r4,
            Param::R6 => self.r6,
            Param::C2 => self.c2,
            Param::C5 => self.c5,
            Param::B1 => self.b1,
            Param::B2 => self.b2,
            Param::K1 => self.k1,
            Param::K2 => self.k2,
        }
    }

    fn slot(&mut self, p: Param) -> &mut T {
        match p {
            Param::R1 => &mut self.r1,
            Param::R3 => &mut self.r3,
            Param::R4 => &mut self.r4,
            Param::R6 => &mut self.r6,
            Param::C2 => &mut self.c2,
            Param::C5 => &mut self.c5,
            Param::B1 => &mut self.b1,
            Param::B2 => &mut self.b2,
            Param::K1 => &mut self.k1,
            Param::K2 => &mut self.k2,
        }
    }

    fn check(&self) -> Result<(), DesignError> {
        for p in Param::ALL {
            let v = self.get(p);
            if !v.is_finite() {
                return Err(DesignError::NonFinite(p));
            }
            if v <= T::zero() {
                return Err(DesignError::NonPositive(p));
            }
            if p.is_gain() && v > T::lit(2.0) {
                return Err(DesignError::GainOutOfRange(p));
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        [self.b1, self.b2, self.k1, self.k2].iter().all(|g| *g == T::one())
    }

    /// `G = K1·K2·B1·B2`.
    pub fn loop_gain(&self) -> T {
        self.k1 * self.k2 * self.b1 * self.b2
    }

    /// Same passive values with ideal conveyors.
    pub fn ideal(&self) -> Self {
        let one = T::one();
        Self { b1: one, b2: one, k1: one, k2: one, ..*self }
    }
}

/// Input configuration selecting the response at the single output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterMode {
    LowPass,
    HighPass,
    BandPass,
    Notch,
}

impl FilterMode {
    pub const ALL: [FilterMode; 4] = [FilterMode::LowPass, FilterMode::HighPass, FilterMode::BandPass, FilterMode::Notch];

    /// Which of `(V1, V2, V3, V4)` carry the input signal.
    pub fn inputs(self) -> [bool; 4] {
        match self {
            FilterMode::LowPass => [true, false, false, true],
            FilterMode::HighPass => [false, true, false, false],
            FilterMode::BandPass => [false, false, true, false],
            FilterMode::Notch => [true, true, false, true],
        }
    }

    pub fn from_inputs(inputs: [bool; 4]) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.inputs() == inputs)
    }

    /// Short CLI name.
    pub fn short_name(self) -> &'static str {
        match self {
            FilterMode::LowPass => "lp",
            FilterMode::HighPass => "hp",
            FilterMode::BandPass => "bp",
            FilterMode::Notch => "notch",
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FilterMode::LowPass => "LowPass",
            FilterMode::HighPass => "HighPass",
            FilterMode::BandPass => "BandPass",
            FilterMode::Notch => "Notch",
        };
        f.write_str(s)
    }
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.short_name() == lower || m.to_string().to_ascii_lowercase() == lower)
            .ok_or_else(|| format!("unknown mode {s:?} (expected lp, hp, bp or notch)"))
    }
}

/// ω₀, ω₀/Q and Q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams<T> {
    /// rad/s
    pub omega0: T,
    /// ω₀/Q in rad/s
    pub bandwidth: T,
    pub q: T,
}

impl<T: Scalar> DesignParams<T> {
    pub fn omega0_hz(&self) -> T {
        self.omega0 / T::TAU()
    }

    pub fn bandwidth_hz(&self) -> T {
        self.bandwidth / T::TAU()
    }
}

fn biquad<T: Scalar>(d: &FilterDesign<T>, inputs: [bool; 4], gain_factors: bool) -> RationalTf<T> {
    let (g, g2) = if gain_factors { (d.loop_gain(), d.k1 * d.k2 * d.b2) } else { (T::one(), T::one()) };
    let s2 = d.c2 * d.c5 * d.r1 * d.r3 * d.r4 * d.r6;
    let s1 = d.c5 * d.r1 * d.r4 * d.r6;
    let s0 = d.r1 * d.r3 + d.r3 * d.r6;
    let den = vec![s0, g * s1, g * s2];

    let mut num = vec![T::zero(); 3];
    let [v1, v2, v3, v4] = inputs;
    if v1 {
        num[0] = num[0] + d.r3 * d.r6;
    }
    if v4 {
        num[0] = num[0] + d.r1 * d.r3;
    }
    if v3 {
        num[1] = g2 * s1;
    }
    if v2 {
        num[2] = g2 * s2;
    }
    RationalTf::new(num, den).expect("positive design gives a proper biquad")
}

/// Ideal-conveyor transfer function `Vout/Vin` for `mode`.
pub fn transfer_function<T: Scalar>(design: &FilterDesign<T>, mode: FilterMode) -> RationalTf<T> {
    biquad(design, mode.inputs(), false)
}

/// Transfer function including the conveyor gains `B1, B2, K1, K2`.
pub fn nonideal_transfer_function<T: Scalar>(design: &FilterDesign<T>, mode: FilterMode) -> RationalTf<T> {
    biquad(design, mode.inputs(), true)
}

/// Transfer function for an arbitrary subset of driven inputs.
pub fn input_transfer_function<T: Scalar>(design: &FilterDesign<T>, inputs: [bool; 4]) -> RationalTf<T> {
    biquad(design, inputs, true)
}

/// `ω₀ = √((R1+R6)/(G·R1R4R6C2C5))`, `ω₀/Q = 1/(R3C2)`, `Q = ω₀·R3C2`.
pub fn design_params<T: Scalar>(design: &FilterDesign<T>) -> DesignParams<T> {
    let d = design;
    let omega0 = ((d.r1 + d.r6) / (d.loop_gain() * d.r1 * d.r4 * d.r6 * d.c2 * d.c5)).sqrt();
    let bandwidth = T::one() / (d.r3 * d.c2);
    DesignParams { omega0, bandwidth, q: omega0 / bandwidth }
}

/// Retunes R3 (for the bandwidth) and then C5 (for ω₀); C2 and R6 are held.
///
/// R3 only enters the bandwidth and C5 only enters ω₀, so the two steps do
/// not disturb each other.
pub fn tune<T: Scalar>(
    design: &FilterDesign<T>,
    target_omega0: T,
    target_bandwidth: T,
) -> Result<FilterDesign<T>, DesignError> {
    let ok = |v: T| v.is_finite() && v > T::zero();
    if !ok(target_omega0) || !ok(target_bandwidth) {
        return Err(DesignError::InvalidTarget);
    }
    let d = design;
    let r3 = T::one() / (target_bandwidth * d.c2);
    if !ok(r3) {
        return Err(DesignError::InfeasibleTuning(Param::R3));
    }
    let c5 = (d.r1 + d.r6) / (d.loop_gain() * d.r1 * d.r4 * d.r6 * d.c2 * target_omega0 * target_omega0);
    if !ok(c5) {
        return Err(DesignError::InfeasibleTuning(Param::C5));
    }
    Ok(d.with_unchecked(Param::R3, r3).with_unchecked(Param::C5, c5))
}

/// Node carrying the filter output in [`build_reference_netlist`].
pub const OUTPUT_NODE: &str = "out";

/// Behavioral netlist of the biquad, driven per `mode`.
///
/// Wiring (inactive inputs are tied to ground):
///
/// * `out`: R1 to `v1`, R6 to `v4`; CCII1 `y`, CCII2 `z−`.
/// * `x1`: CCII1 `x`; R3 to `v3`, C2 to `v2`.
/// * `p`: CCII1 `z+`, CCII2 `y`; R4 to ground.
/// * `x2`: CCII2 `x`; C5 to ground.
///
/// The unused `z` outputs go to ground. Every active input gets a 1 V source
/// labelled `v1`…`v4`. C5 is always grounded; C2's lower plate is the V2
/// input, grounded whenever V2 is not driven.
///
/// KCL at `out` with `J = sC2(B1·Vout − V2) + (B1·Vout − V3)/R3` gives
/// `(V1 − Vout)/R1 + (V4 − Vout)/R6 = K1K2B2·R4·sC5·J`, which rearranges to
/// the transfer function in the module docs.
pub fn build_reference_netlist<T: Scalar>(design: &FilterDesign<T>, mode: FilterMode) -> Netlist<T> {
    let d = design;
    let inputs = mode.inputs();
    let input = |i: usize| if inputs[i] { format!("v{}", i + 1) } else { "0".to_string() };
    let mut b = Netlist::builder(format!("ccii multifunction biquad, {} mode", mode.short_name()));
    b.ccii("X1", OUTPUT_NODE, "x1", "p", "0", d.b1, d.k1)
        .ccii("X2", "p", "x2", "0", OUTPUT_NODE, d.b2, d.k2)
        .resistor("R1", &input(0), OUTPUT_NODE, d.r1)
        .resistor("R3", "x1", &input(2), d.r3)
        .resistor("R4", "p", "0", d.r4)
        .resistor("R6", &input(3), OUTPUT_NODE, d.r6)
        .capacitor("C2", "x1", &input(1), d.c2)
        .capacitor("C5", "x2", "0", d.c5);
    for (i, active) in inputs.iter().enumerate() {
        if *active {
            let label = format!("v{}", i + 1);
            b.vsource(&format!("V{}", i + 1), &label, "0", T::one(), &label);
        }
    }
    b.build(OUTPUT_NODE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_design_params() {
        let p = design_params(&FilterDesign::<f64>::reference());
        assert!(rel(p.omega0, 2e8f64.sqrt()) < 1e-15);
        assert!(rel(p.omega0, 14142.14) < 1e-6);
        assert!(rel(p.bandwidth, 1.0 / 14e-5) < 1e-15);
        assert!((p.q - 1.9799).abs() < 1e-4);
        assert!(rel(p.omega0_hz(), 2250.79) < 1e-5);
    }

    #[test]
    fn unit_symmetric_design() {
        let d = FilterDesign::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let p = design_params(&d);
        assert!(rel(p.omega0, 2f64.sqrt()) < 1e-15);
        assert_eq!(p.bandwidth, 1.0);
        assert!(rel(p.q, 2f64.sqrt()) < 1e-15);
    }

    #[test]
    fn loop_gain_scales_omega0_only() {
        let ideal = FilterDesign::<f64>::reference();
        let d = ideal.with_gains(1.0, 0.9, 1.0, 1.0).unwrap();
        let (p0, p) = (design_params(&ideal), design_params(&d));
        assert!(rel(p.omega0, 14907.12) < 1e-6);
        assert_eq!(p.bandwidth, p0.bandwidth);
    }

    #[test]
    fn reference_gains_at_key_frequencies() {
        let d = FilterDesign::<f64>::reference();
        let w0 = design_params(&d).omega0;
        assert_eq!(transfer_function(&d, FilterMode::LowPass).evaluate(0.0).unwrap(), Complex::new(1.0, 0.0));
        let notch = transfer_function(&d, FilterMode::Notch).evaluate(w0).unwrap();
        assert!(notch.norm() <= 1e-12);
        let bp = transfer_function(&d, FilterMode::BandPass).evaluate(w0).unwrap();
        assert!((bp.norm() - 1.0).abs() <= 1e-9);
        assert!(bp.arg().abs() <= 1e-9);
    }

    #[test]
    fn ideal_gains_reduce_nonideal_form() {
        let d = FilterDesign::<f64>::reference();
        for m in FilterMode::ALL {
            assert_eq!(nonideal_transfer_function(&d, m), transfer_function(&d, m));
        }
    }

    #[test]
    fn nonideal_lp_keeps_unity_dc_gain() {
        let d = FilterDesign::<f64>::reference().with_gains(0.95, 0.97, 1.02, 0.99).unwrap();
        let h = nonideal_transfer_function(&d, FilterMode::LowPass).evaluate(0.0).unwrap();
        assert!((h - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gain_of_098_raises_omega0() {
        let ideal = FilterDesign::<f64>::reference();
        let d = ideal.with_gains(0.98, 0.98, 0.98, 0.98).unwrap();
        let ratio = nonideal_transfer_function(&d, FilterMode::BandPass).omega0()
            / transfer_function(&ideal, FilterMode::BandPass).omega0();
        assert!(rel(ratio, 0.98f64.powi(4).powf(-0.5)) < 1e-12);
        assert!((ratio - 1.0412).abs() < 1e-4);
    }

    #[test]
    fn tune_for_q_of_two() {
        let d = FilterDesign::<f64>::reference();
        let w0 = design_params(&d).omega0;
        let t = tune(&d, w0, w0 / 2.0).unwrap();
        assert!((t.get(Param::R3) - 14142.1).abs() < 0.1);
        assert!(rel(design_params(&t).q, 2.0) < 1e-12);
    }

    #[test]
    fn tune_fixed_point_and_doubling() {
        let d = FilterDesign::<f64>::reference();
        let p = design_params(&d);
        let same = tune(&d, p.omega0, p.bandwidth).unwrap();
        for prm in Param::ALL {
            assert!(rel(same.get(prm), d.get(prm)) < 1e-12, "{prm}");
        }
        let doubled = tune(&d, 2.0 * p.omega0, p.bandwidth).unwrap();
        assert!(rel(doubled.get(Param::C5), d.get(Param::C5) / 4.0) < 1e-12);
    }

    #[test]
    fn tune_rejects_bad_targets() {
        let d = FilterDesign::<f64>::reference();
        assert_eq!(tune(&d, 0.0, 1.0), Err(DesignError::InvalidTarget));
        assert_eq!(tune(&d, 1.0, f64::NAN), Err(DesignError::InvalidTarget));
        assert_eq!(tune(&d, 1e-200, 1.0), Err(DesignError::InfeasibleTuning(Param::C5)));
    }

    #[test]
    fn design_validation() {
        assert_eq!(FilterDesign::new(-1.0, 1.0, 1.0, 1.0, 1.0, 1.0), Err(DesignError::NonPositive(Param::R1)));
        let d = FilterDesign::<f64>::reference();
        assert_eq!(d.with_gains(1.0, 2.5, 1.0, 1.0), Err(DesignError::GainOutOfRange(Param::B2)));
        assert_eq!(d.with(Param::C5, f64::INFINITY), Err(DesignError::NonFinite(Param::C5)));
    }

    #[test]
    fn modes_round_trip_through_inputs_and_names() {
        for m in FilterMode::ALL {
            assert_eq!(FilterMode::from_inputs(m.inputs()), Some(m));
            assert_eq!(m.short_name().parse::<FilterMode>(), Ok(m));
            assert_eq!(m.to_string().parse::<FilterMode>(), Ok(m));
        }
        assert!("xy".parse::<FilterMode>().unwrap_err().contains("unknown mode"));
    }

    #[test]
    fn single_precision_instantiation() {
        let p = design_params(&FilterDesign::<f32>::reference());
        assert!((p.omega0 - 14142.136).abs() < 0.01);
        assert!((p.q - 1.979899).abs() < 1e-5);
    }
}
