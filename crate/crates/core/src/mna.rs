//! Complex modified nodal analysis over a [`Netlist`], used as the
//! independent numerical oracle for the closed-form filter equations.
//!
//! Unknowns are the non-ground node voltages followed by one branch current
//! per voltage source and one `Ix` per current conveyor, in element order.
//! Ground is eliminated rather than stored.

use num_complex::Complex;
use rayon::prelude::*;
use thiserror::Error;

use crate::circuit::{ElementKind, Netlist, RationalTf, GROUND};
use crate::linalg::{self, Dense, LinalgError};
use crate::response::{FrequencyResponse, ResponseError};
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MnaError {
    #[error("singular circuit at omega = {omega} rad/s (no pivot for {unknown})")]
    Singular { unknown: String, omega: f64 },
    #[error("solver residual {residual:e} exceeds bound at omega = {omega} rad/s")]
    Residual { residual: f64, omega: f64 },
    #[error("first voltage source has zero amplitude; gain is undefined")]
    NoExcitation,
    #[error("sweep frequencies must be positive, finite and strictly increasing")]
    InvalidGrid,
    #[error(transparent)]
    Response(#[from] ResponseError),
    #[error("degree overestimate or degenerate circuit (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("no rational function of degree <= {max_degree} fits the circuit response")]
    NoFit { max_degree: usize },
}

/// What a row/column of the MNA system stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unknown {
    /// Voltage of the named node.
    Node(String),
    /// Branch current of the named element (source current or conveyor `Ix`).
    Branch(String),
}

impl std::fmt::Display for Unknown {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Unknown::Node(n) => write!(f, "V({n})"),
            Unknown::Branch(e) => write!(f, "I({e})"),
        }
    }
}

/// Assembled system `A x = b` at one angular frequency.
#[derive(Debug, Clone)]
pub struct MnaSystem<T> {
    pub omega: T,
    pub matrix: Dense<Complex<T>>,
    pub rhs: Vec<Complex<T>>,
    pub unknowns: Vec<Unknown>,
}

impl<T: Scalar> MnaSystem<T> {
    pub fn dimension(&self) -> usize {
        self.unknowns.len()
    }

    /// `‖A x − b‖∞`.
    pub fn residual(&self, x: &[Complex<T>]) -> T {
        linalg::residual_inf(&self.matrix, x, &self.rhs)
    }
}

/// Stamps every element of `netlist` at angular frequency `omega`.
///
/// The netlist must already be valid (see [`crate::circuit::validate`]).
pub fn assemble<T: Scalar>(netlist: &Netlist<T>, omega: T) -> MnaSystem<T> {
    let n_nodes = netlist.node_count();
    let mut unknowns: Vec<Unknown> =
        (1..=n_nodes).map(|i| Unknown::Node(netlist.node_name(i).unwrap_or("?").to_string())).collect();
    for e in netlist.elements() {
        if matches!(e.kind, ElementKind::VSource { .. } | ElementKind::Ccii { .. }) {
            unknowns.push(Unknown::Branch(e.name.clone()));
        }
    }
    let dim = unknowns.len();
    let zero = Complex::new(T::zero(), T::zero());
    let mut a = Dense::from_elem(dim, dim, zero);
    let mut b = vec![zero; dim];
    // node index → row; ground has none
    let row = |node: usize| (node != GROUND).then(|| node - 1);
    let add = |a: &mut Dense<Complex<T>>, r: Option<usize>, c: Option<usize>, v: Complex<T>| {
        if let (Some(r), Some(c)) = (r, c) {
            *a.get_mut(r, c) = a.get(r, c) + v;
        }
    };
    let re = |v: T| Complex::new(v, T::zero());

    let mut aux = n_nodes;
    for e in netlist.elements() {
        match e.kind {
            ElementKind::Resistor { a: p, b: q, ohms } => {
                let g = re(T::one() / ohms);
                let (p, q) = (row(p), row(q));
                add(&mut a, p, p, g);
                add(&mut a, q, q, g);
                add(&mut a, p, q, -g);
                add(&mut a, q, p, -g);
            }
            ElementKind::Capacitor { a: p, b: q, farads } => {
                let y = Complex::new(T::zero(), omega * farads);
                let (p, q) = (row(p), row(q));
                add(&mut a, p, p, y);
                add(&mut a, q, q, y);
                add(&mut a, p, q, -y);
                add(&mut a, q, p, -y);
            }
            ElementKind::VSource { pos, neg, volts, .. } => {
                let k = Some(aux);
                let (p, q) = (row(pos), row(neg));
                add(&mut a, p, k, re(T::one()));
                add(&mut a, q, k, re(-T::one()));
                add(&mut a, k, p, re(T::one()));
                add(&mut a, k, q, re(-T::one()));
                b[aux] = re(volts);
                aux += 1;
            }
            ElementKind::Ccii { y, x, z_plus, z_minus, b: gain_b, k: gain_k } => {
                // Ix is drawn from node x into the device; z± draw ±K·Ix.
                let ix = Some(aux);
                add(&mut a, row(x), ix, re(T::one()));
                add(&mut a, row(z_plus), ix, re(gain_k));
                add(&mut a, row(z_minus), ix, re(-gain_k));
                // Vx − B·Vy = 0; y draws no current.
                add(&mut a, ix, row(x), re(T::one()));
                add(&mut a, ix, row(y), re(-gain_b));
                aux += 1;
            }
        }
    }
    MnaSystem { omega, matrix: a, rhs: b, unknowns }
}

/// Solves an assembled system by LU with partial pivoting and checks the
/// residual bound `‖Ax − b‖∞ ≤ tol·‖b‖∞`.
pub fn solve<T: Scalar>(system: &MnaSystem<T>) -> Result<Vec<Complex<T>>, MnaError> {
    let omega = system.omega.to_f64().unwrap_or(f64::NAN);
    let x = linalg::lu_solve(&system.matrix, &system.rhs).map_err(|e| match e {
        LinalgError::Singular { index } => MnaError::Singular { unknown: system.unknowns[index].to_string(), omega },
        LinalgError::Dimension => unreachable!("assemble builds square systems"),
    })?;
    let residual = system.residual(&x);
    if residual > T::solve_residual_tol() * linalg::norm_inf(&system.rhs) {
        return Err(MnaError::Residual { residual: residual.to_f64().unwrap_or(f64::NAN), omega });
    }
    Ok(x)
}

/// Output voltage divided by the amplitude of the first voltage source.
pub fn gain_at<T: Scalar>(netlist: &Netlist<T>, omega: T) -> Result<Complex<T>, MnaError> {
    let reference = netlist
        .elements()
        .iter()
        .find_map(|e| match e.kind {
            ElementKind::VSource { volts, .. } => Some(volts),
            _ => None,
        })
        .filter(|v| !v.is_zero())
        .ok_or(MnaError::NoExcitation)?;
    let x = solve(&assemble(netlist, omega))?;
    let out = netlist.output();
    let v = if out == GROUND { Complex::new(T::zero(), T::zero()) } else { x[out - 1] };
    Ok(v / reference)
}

fn gains<T: Scalar>(netlist: &Netlist<T>, omegas: &[T]) -> Result<Vec<Complex<T>>, MnaError> {
    // per-frequency work is independent; the collect keeps ω order and the
    // scan below reports the lowest failing frequency, as a sequential loop would
    let results: Vec<_> = omegas.par_iter().map(|&w| gain_at(netlist, w)).collect();
    results.into_iter().collect()
}

/// AC sweep of the output gain over a strictly increasing positive grid.
pub fn ac_sweep<T: Scalar>(netlist: &Netlist<T>, omegas: &[T]) -> Result<FrequencyResponse<T>, MnaError> {
    let ok = omegas.iter().all(|w| w.is_finite() && *w > T::zero())
        && omegas.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(MnaError::InvalidGrid);
    }
    let g = gains(netlist, omegas)?;
    Ok(FrequencyResponse::new(omegas.iter().copied().zip(g).collect())?)
}

/// Characteristic frequency `1/(R̄·C̄)` from the mean resistor and capacitor
/// values; `1` when the circuit has no capacitors.
pub fn characteristic_omega<T: Scalar>(netlist: &Netlist<T>) -> T {
    let mean = |vals: Vec<T>| {
        let n = vals.len();
        (n > 0).then(|| vals.into_iter().fold(T::zero(), |a, v| a + v) / T::from_usize(n).unwrap())
    };
    let rs = netlist
        .elements()
        .iter()
        .filter_map(|e| match e.kind {
            ElementKind::Resistor { ohms, .. } => Some(ohms),
            _ => None,
        })
        .collect();
    let cs = netlist
        .elements()
        .iter()
        .filter_map(|e| match e.kind {
            ElementKind::Capacitor { farads, .. } => Some(farads),
            _ => None,
        })
        .collect();
    match (mean(rs), mean(cs)) {
        (Some(r), Some(c)) => T::one() / (r * c),
        (None, Some(c)) => T::one() / c,
        _ => T::one(),
    }
}

fn log_points<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize(count - 1).unwrap();
    (0..count).map(|k| (a + (b - a) * T::from_usize(k).unwrap() / last).exp()).collect()
}

struct Fit<T> {
    num: Vec<T>,
    den: Vec<T>,
    cond: T,
}

/// Linearized rational least squares in the normalized variable `z = s/ω_est`:
/// `N(z_k) − H_k·(D(z_k) − z_k^d) = H_k·z_k^d`, with `D` monic of degree `d`.
fn fit_degree<T: Scalar>(zs: &[Complex<T>], hs: &[Complex<T>], weights: &[T], d: usize) -> Fit<T> {
    let m = zs.len();
    let n = 2 * d + 1;
    let mut a = Dense::from_elem(2 * m, n, T::zero());
    let mut rhs = vec![T::zero(); 2 * m];
    for (k, ((&z, &h), &w)) in zs.iter().zip(hs).zip(weights).enumerate() {
        let mut zp = Complex::new(T::one(), T::zero());
        for i in 0..=d {
            let num_term = zp * w;
            *a.get_mut(2 * k, i) = num_term.re;
            *a.get_mut(2 * k + 1, i) = num_term.im;
            if i < d {
                let den_term = -(h * zp) * w;
                *a.get_mut(2 * k, d + 1 + i) = den_term.re;
                *a.get_mut(2 * k + 1, d + 1 + i) = den_term.im;
            } else {
                let r = h * zp * w;
                rhs[2 * k] = r.re;
                rhs[2 * k + 1] = r.im;
            }
            zp = zp * z;
        }
    }
    let sol = linalg::lstsq(&a, &rhs).expect("tall system");
    let num = sol.x[..=d].to_vec();
    let mut den = sol.x[d + 1..].to_vec();
    den.push(T::one());
    Fit { num, den, cond: sol.cond }
}

fn eval_poly<T: Scalar>(p: &[T], z: Complex<T>) -> Complex<T> {
    p.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

/// Recovers the circuit's transfer function from MNA solutions.
///
/// Samples `2·(2·max_degree + 1)` log-spaced frequencies over
/// `[ω_est/100, 100·ω_est]`, fits each candidate degree `0..=max_degree`,
/// and refines with one reweighted least-squares pass over a 10× denser grid.
/// The lowest degree whose fit reproduces every dense sample is returned,
/// canonicalized.
pub fn extract_tf<T: Scalar>(netlist: &Netlist<T>, max_degree: usize) -> Result<RationalTf<T>, MnaError> {
    let w_est = characteristic_omega(netlist);
    let hundred = T::lit(100.0);
    let coarse_count = 2 * (2 * max_degree + 1);
    let coarse = log_points(w_est / hundred, w_est * hundred, coarse_count);
    let dense = log_points(w_est / hundred, w_est * hundred, 10 * coarse_count);
    let h_coarse = gains(netlist, &coarse)?;
    let h_dense = gains(netlist, &dense)?;
    let norm = |ws: &[T]| -> Vec<Complex<T>> { ws.iter().map(|&w| Complex::new(T::zero(), w / w_est)).collect() };
    let (z_coarse, z_dense) = (norm(&coarse), norm(&dense));
    let h_max = h_dense.iter().fold(T::zero(), |m, h| m.max(h.norm()));

    let mut worst_cond = T::zero();
    for d in 0..=max_degree {
        let first = fit_degree(&z_coarse, &h_coarse, &vec![T::one(); coarse_count], d);
        let weights: Vec<T> = z_dense.iter().map(|&z| T::one() / eval_poly(&first.den, z).norm()).collect();
        if weights.iter().any(|w| !w.is_finite()) {
            continue;
        }
        let fit = fit_degree(&z_dense, &h_dense, &weights, d);
        let misfit = z_dense
            .iter()
            .zip(&h_dense)
            .map(|(&z, &h)| (eval_poly(&fit.num, z) / eval_poly(&fit.den, z) - h).norm())
            .fold(T::zero(), T::max);
        let cond = fit.cond.max(first.cond);
        worst_cond = worst_cond.max(cond);
        if !(misfit <= T::fit_residual_tol() * h_max) {
            continue;
        }
        if cond > T::fit_cond_limit() {
            return Err(MnaError::IllConditioned { cond: cond.to_f64().unwrap_or(f64::INFINITY) });
        }
        // trim in the normalized domain, then restore physical units
        let normalized = RationalTf::new(fit.num, fit.den).map_err(|_| MnaError::NoFit { max_degree })?;
        let unscale = |p: &[T]| -> Vec<T> {
            let mut s = T::one();
            p.iter()
                .map(|&c| {
                    let v = c / s;
                    s = s * w_est;
                    v
                })
                .collect()
        };
        return RationalTf::new(unscale(normalized.num()), unscale(normalized.den()))
            .map_err(|_| MnaError::NoFit { max_degree });
    }
    if worst_cond > T::fit_cond_limit() {
        Err(MnaError::IllConditioned { cond: worst_cond.to_f64().unwrap_or(f64::INFINITY) })
    } else {
        Err(MnaError::NoFit { max_degree })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::validate;

    fn divider() -> Netlist<f64> {
        let mut b = Netlist::builder("divider");
        b.vsource("V1", "in", "0", 1.0, "in")
            .resistor("R1", "in", "mid", 10e3)
            .resistor("R2", "mid", "0", 10e3);
        b.build("mid")
    }

    fn rc(r: f64, c: f64) -> Netlist<f64> {
        let mut b = Netlist::builder("rc");
        b.vsource("V1", "in", "0", 1.0, "in").resistor("R1", "in", "out", r).capacitor("C1", "out", "0", c);
        b.build("out")
    }

    #[test]
    fn dimension_counts_nodes_sources_and_conveyors() {
        let mut b = Netlist::<f64>::builder("t");
        b.vsource("V1", "a", "0", 1.0, "a")
            .ccii("X1", "a", "x", "zp", "0", 1.0, 1.0)
            .resistor("R1", "x", "0", 1e3)
            .resistor("R2", "zp", "0", 1e3);
        let n = b.build("zp");
        let sys = assemble(&n, 1.0);
        assert_eq!(sys.dimension(), n.node_count() + 1 + 1);
        assert_eq!(sys.unknowns.last(), Some(&Unknown::Branch("X1".into())));
    }

    #[test]
    fn divider_is_half_at_every_frequency() {
        let n = divider();
        for w in [0.0, 1.0, 1e3, 1e9] {
            let g = gain_at(&n, w).unwrap();
            assert!((g - Complex::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ccii_follower_copies_y_to_x() {
        let mut b = Netlist::<f64>::builder("follower");
        b.vsource("V1", "y", "0", 1.0, "y")
            .ccii("X1", "y", "x", "zp", "zm", 1.0, 1.0)
            .resistor("RX", "x", "0", 1e3)
            .resistor("RP", "zp", "0", 1e3)
            .resistor("RM", "zm", "0", 1e3);
        let n = b.build("x");
        validate(&n).unwrap();
        for w in [0.0, 1e2, 1e6] {
            assert!((gain_at(&n, w).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn ccii_current_transfer_matches_hand_solution() {
        // V(z+) = K·(B·Vy/Rx)·RL, V(z−) = −K·(B·Vy/Rx)·RL
        let (bg, kg, rx, rl, vy) = (0.97, 1.03, 2e3, 5e3, 0.8);
        let build = |out: &str| {
            let mut b = Netlist::<f64>::builder("ccii");
            b.vsource("V1", "y", "0", vy, "y")
                .ccii("X1", "y", "x", "zp", "zm", bg, kg)
                .resistor("RX", "x", "0", rx)
                .resistor("RP", "zp", "0", rl)
                .resistor("RM", "zm", "0", rl);
            b.build(out)
        };
        let expected = kg * (bg * vy / rx) * rl;
        let sys = assemble(&build("zp"), 0.0);
        let x = solve(&sys).unwrap();
        let zp = x[2].re;
        let zm = x[3].re;
        assert!((zp - expected).abs() < 1e-12);
        assert!((zm + expected).abs() < 1e-12);
        assert!((x[1].re - bg * vy).abs() < 1e-15);
    }

    #[test]
    fn floating_capacitor_node_at_dc_is_singular() {
        let mut b = Netlist::<f64>::builder("t");
        b.vsource("V1", "in", "0", 1.0, "in").capacitor("C1", "in", "out", 1e-9).capacitor("C2", "out", "0", 1e-9);
        let err = gain_at(&b.build("out"), 0.0).unwrap_err();
        match err {
            MnaError::Singular { unknown, omega } => {
                assert_eq!(unknown, "V(out)");
                assert_eq!(omega, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rc_sweep_crosses_corner() {
        let (r, c) = (1e3, 1e-6);
        let corner = 1.0 / (r * c);
        let grid: Vec<f64> = (0..=40).map(|k| corner / 100.0 * 10f64.powf(k as f64 / 10.0)).collect();
        let resp = ac_sweep(&rc(r, c), &grid).unwrap();
        let idx = resp.samples().iter().position(|(_, h)| h.norm() < 0.5f64.sqrt()).unwrap();
        let step = 10f64.powf(0.1);
        let w = resp.samples()[idx].0;
        assert!(w >= corner / step && w <= corner * step * (1.0 + 1e-9));
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let n = rc(1e3, 1e-6);
        assert_eq!(ac_sweep(&n, &[1.0, 1.0]).unwrap_err(), MnaError::InvalidGrid);
        assert_eq!(ac_sweep(&n, &[-1.0, 1.0]).unwrap_err(), MnaError::InvalidGrid);
    }

    #[test]
    fn extract_rc_and_divider() {
        let (r, c) = (1e3, 1e-6);
        let tf = extract_tf(&rc(r, c), 1).unwrap();
        let expect = RationalTf::new(vec![1.0], vec![1.0, r * c]).unwrap();
        assert!(tf.max_coeff_rel_error(&expect) < 1e-9, "{tf}");

        let tf = extract_tf(&divider(), 2).unwrap();
        assert_eq!(tf.order(), 0);
        assert!((tf.num()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_reference_is_rejected() {
        let mut b = Netlist::<f64>::builder("t");
        b.vsource("V1", "in", "0", 0.0, "in").resistor("R1", "in", "0", 1.0);
        assert_eq!(gain_at(&b.build("in"), 1.0).unwrap_err(), MnaError::NoExcitation);
    }
}
