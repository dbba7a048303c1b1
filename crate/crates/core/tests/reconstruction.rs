use ccfilter_core::circuit::{validate, ElementKind, GROUND};
use ccfilter_core::filter::{
    build_reference_netlist, design_params, nonideal_transfer_function, transfer_function, FilterDesign,
    FilterMode,
};
use ccfilter_core::mna::{ac_sweep, extract_tf, gain_at};
use ccfilter_core::response::centered_grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_design(rng: &mut impl Rng) -> FilterDesign<f64> {
    let mut r = || log_uniform(rng, 1e3, 1e5);
    let (r1, r3, r4, r6) = (r(), r(), r(), r());
    let mut c = || log_uniform(rng, 1e-10, 1e-7);
    FilterDesign::new(r1, r3, r4, r6, c(), c()).unwrap()
}

#[test]
fn reference_netlist_shape() {
    let d = FilterDesign::<f64>::reference();
    for mode in FilterMode::ALL {
        let n = build_reference_netlist(&d, mode);
        assert_eq!(validate(&n), Ok(()));
        assert_eq!((n.ccii_count(), n.resistor_count(), n.capacitor_count()), (2, 4, 2));
        let inputs = n.inputs();
        for (i, active) in mode.inputs().iter().enumerate() {
            assert_eq!(inputs.contains_key(&format!("v{}", i + 1)), *active);
        }
        // each capacitor has a plate on ground or on a grounded input source
        let source_nodes: Vec<usize> = n
            .elements()
            .iter()
            .filter_map(|e| match e.kind {
                ElementKind::VSource { pos, neg: GROUND, .. } => Some(pos),
                _ => None,
            })
            .collect();
        for e in n.elements() {
            if let ElementKind::Capacitor { a, b, .. } = e.kind {
                let grounded = |x: usize| x == GROUND || source_nodes.contains(&x);
                assert!(grounded(a) || grounded(b), "{} floats in {mode}", e.name);
            }
        }
    }
    // C5 is grounded in every mode; C2 whenever V2 is idle
    for mode in [FilterMode::LowPass, FilterMode::BandPass] {
        let n = build_reference_netlist(&d, mode);
        for e in n.elements() {
            if let ElementKind::Capacitor { a, b, .. } = e.kind {
                assert!(a == GROUND || b == GROUND);
            }
        }
    }
}

#[test]
fn reference_bandpass_extracts_closed_form() {
    let d = FilterDesign::<f64>::reference();
    let n = build_reference_netlist(&d, FilterMode::BandPass);
    let tf = extract_tf(&n, n.capacitor_count()).unwrap();
    let expect = transfer_function(&d, FilterMode::BandPass);
    let err = tf.max_coeff_rel_error(&expect);
    assert!(err <= 1e-6, "err {err:e}\n{tf}\n{expect}");
}

#[test]
fn every_mode_matches_on_random_designs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..25 {
        let d = random_design(&mut rng);
        for mode in FilterMode::ALL {
            let n = build_reference_netlist(&d, mode);
            let tf = extract_tf(&n, 2).unwrap();
            let err = tf.max_coeff_rel_error(&transfer_function(&d, mode));
            assert!(err <= 1e-6, "{mode} {d:?}: {err:e}");
        }
    }
}

#[test]
fn nonideal_netlist_matches_nonideal_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let mut g = || rng.gen_range(0.8..1.2);
        let d = FilterDesign::<f64>::reference().with_gains(g(), g(), g(), g()).unwrap();
        for mode in FilterMode::ALL {
            let n = build_reference_netlist(&d, mode);
            let expect = nonideal_transfer_function(&d, mode);
            for w in centered_grid(design_params(&d).omega0, 4.0, 5) {
                let sim = gain_at(&n, w).unwrap();
                let cf = expect.evaluate(w).unwrap();
                assert!((sim - cf).norm() <= 1e-9 * cf.norm().max(1e-6), "{mode} at {w}");
            }
        }
    }
}

#[test]
fn sweep_agrees_with_extracted_tf() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random_design(&mut rng);
    let n = build_reference_netlist(&d, FilterMode::Notch);
    let tf = extract_tf(&n, 2).unwrap();
    let grid = centered_grid(design_params(&d).omega0, 3.0, 10);
    let resp = ac_sweep(&n, &grid).unwrap();
    for (w, h) in resp.samples() {
        let e = tf.evaluate(*w).unwrap();
        assert!((h - e).norm() <= 1e-8 * h.norm().max(1e-3), "{w}: {h} vs {e}");
    }
}

#[test]
fn reference_bandpass_has_unit_gain_at_omega0() {
    let d = FilterDesign::<f64>::reference();
    let w0 = design_params(&d).omega0;
    let g = gain_at(&build_reference_netlist(&d, FilterMode::BandPass), w0).unwrap();
    assert!((g.norm() - 1.0).abs() <= 1e-6);
    let notch = gain_at(&build_reference_netlist(&d, FilterMode::Notch), w0).unwrap();
    assert!(notch.norm() < 1e-6);
    let lp = gain_at(&build_reference_netlist(&d, FilterMode::LowPass), 1e-3).unwrap();
    assert!((lp.norm() - 1.0).abs() < 1e-9);
}
