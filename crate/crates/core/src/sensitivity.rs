//! Classical sensitivities `S_x^y = d ln y / d ln x` of ω₀ and Q.
//!
//! The closed forms follow from `ω₀² ∝ (R1+R6)/(G·R1R4R6C2C5)` and
//! `Q = ω₀·R3C2`; [`numeric_sensitivities`] checks them by log-derivative
//! central differences on [`design_params`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::filter::{design_params, FilterDesign, Param};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SensitivityTarget {
    Omega0,
    Q,
}

impl fmt::Display for SensitivityTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SensitivityTarget::Omega0 => "omega0",
            SensitivityTarget::Q => "Q",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity<T> {
    pub analytic: T,
    /// Finite-difference estimate, when computed.
    pub numeric: Option<T>,
}

impl<T: Scalar> Sensitivity<T> {
    pub fn abs_diff(&self) -> Option<T> {
        self.numeric.map(|n| (n - self.analytic).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport<T> {
    pub target: SensitivityTarget,
    pub entries: BTreeMap<Param, Sensitivity<T>>,
}

impl<T: Scalar> SensitivityReport<T> {
    pub fn get(&self, p: Param) -> Option<&Sensitivity<T>> {
        self.entries.get(&p)
    }

    pub fn analytic(&self, p: Param) -> T {
        self.entries[&p].analytic
    }

    /// Largest `|analytic − numeric|` over the entries that have both.
    pub fn max_abs_diff(&self) -> T {
        self.entries.values().filter_map(Sensitivity::abs_diff).fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("relative step {0} outside [1e-9, 1e-3]")]
    StepOutOfRange(f64),
}

/// ω₀ and Q sensitivities from their closed forms.
pub fn analytic_sensitivities<T: Scalar>(
    design: &FilterDesign<T>,
) -> (SensitivityReport<T>, SensitivityReport<T>) {
    let half = T::lit(0.5);
    let (r1, r6) = (design.get(Param::R1), design.get(Param::R6));
    let s_r1 = -r6 / (T::lit(2.0) * (r1 + r6));
    let s_r6 = -r1 / (T::lit(2.0) * (r1 + r6));

    let omega0 = |p: Param| match p {
        Param::R1 => s_r1,
        Param::R6 => s_r6,
        Param::R3 => T::zero(),
        Param::C2 | Param::C5 | Param::R4 | Param::B1 | Param::B2 | Param::K1 | Param::K2 => -half,
    };
    let q = |p: Param| match p {
        Param::R3 => T::one(),
        Param::C2 => half,
        Param::R1 => s_r1,
        Param::R6 => s_r6,
        Param::R4 | Param::C5 | Param::B1 | Param::B2 | Param::K1 | Param::K2 => -half,
    };
    let report = |target, f: &dyn Fn(Param) -> T| SensitivityReport {
        target,
        entries: Param::ALL.into_iter().map(|p| (p, Sensitivity { analytic: f(p), numeric: None })).collect(),
    };
    (report(SensitivityTarget::Omega0, &omega0), report(SensitivityTarget::Q, &q))
}

/// Analytic values alongside central-difference estimates
/// `(ln y(x(1+h)) − ln y(x(1−h))) / (ln(1+h) − ln(1−h))`.
pub fn numeric_sensitivities<T: Scalar>(
    design: &FilterDesign<T>,
    rel_step: T,
) -> Result<(SensitivityReport<T>, SensitivityReport<T>), SensitivityError> {
    if !(rel_step >= T::lit(1e-9) && rel_step <= T::lit(1e-3)) {
        return Err(SensitivityError::StepOutOfRange(rel_step.to_f64().unwrap_or(f64::NAN)));
    }
    let (mut w_rep, mut q_rep) = analytic_sensitivities(design);
    let h = rel_step;
    let denom = h.ln_1p() - (-h).ln_1p();
    for p in Param::ALL {
        let x = design.get(p);
        let up = design_params(&design.with_unchecked(p, x * (T::one() + h)));
        let down = design_params(&design.with_unchecked(p, x * (T::one() - h)));
        let s_w = (up.omega0 / down.omega0).ln() / denom;
        let s_q = (up.q / down.q).ln() / denom;
        w_rep.entries.get_mut(&p).expect("all params present").numeric = Some(s_w);
        q_rep.entries.get_mut(&p).expect("all params present").numeric = Some(s_q);
    }
    Ok((w_rep, q_rep))
}
