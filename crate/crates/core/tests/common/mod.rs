#![allow(dead_code)]

use ccfilter_core::filter::{design_params, FilterDesign, Param};
use rand::Rng;

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// R log-uniform in [1k, 100k] Ω, C log-uniform in [100p, 100n] F.
pub fn random_design(rng: &mut impl Rng) -> FilterDesign<f64> {
    let mut r = || log_uniform(rng, 1e3, 1e5);
    let (r1, r3, r4, r6) = (r(), r(), r(), r());
    let mut c = || log_uniform(rng, 1e-10, 1e-7);
    let (c2, c5) = (c(), c());
    FilterDesign::new(r1, r3, r4, r6, c2, c5).unwrap()
}

/// Random design with Q forced into `[q_lo, q_hi]` through R3.
pub fn random_design_with_q(rng: &mut impl Rng, q_lo: f64, q_hi: f64) -> FilterDesign<f64> {
    let d = random_design(rng);
    let q = log_uniform(rng, q_lo, q_hi);
    let r3 = q / (design_params(&d).omega0 * d.get(Param::C2));
    d.with(Param::R3, r3).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
