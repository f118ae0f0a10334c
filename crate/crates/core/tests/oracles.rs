//! Quadrature, Taylor data and reversion checked against independent routes.

use chainstat::ensemble::{self, Ensemble, EnsembleParams};
use chainstat::laplace::{self, thermal_expansion_coefficient};
use chainstat::potentials::{finite_difference_taylor, Potential, TaylorData};
use chainstat::quadrature::QuadOptions;
use proptest::prelude::*;

fn lj() -> Potential {
    Potential::lennard_jones(1.0, 10.0 * 2f64.powf(1.0 / 6.0)).unwrap()
}

fn lj_energy(r: f64) -> f64 {
    let s6 = r.powi(-6);
    s6 * s6 - s6
}

/// Composite Simpson with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn lj_partition_and_mean_match_simpson() {
    let p = lj();
    let beta = 100.0;
    let hi = 10.0 * 2f64.powf(1.0 / 6.0);
    let n = 1_000_000;
    let z = simpson(|u| (-beta * lj_energy(u)).exp(), 0.5, hi, n);
    let zu = simpson(|u| u * (-beta * lj_energy(u)).exp(), 0.5, hi, n);

    let e = EnsembleParams::new(beta, 0.0).unwrap();
    let quad = ensemble::partition_integral(&p, e).unwrap().value;
    assert!(rel(quad, z) < 1e-8, "{quad} vs {z}");
    let m = ensemble::moment(&p, e, 1).unwrap();
    assert!(rel(m, zu / z) < 1e-8, "{m} vs {}", zu / z);
}

#[test]
fn lj_mean_at_low_temperature_is_near_first_order_prediction() {
    let m = ensemble::mean_spacing(&lj(), 0.01, 0.0).unwrap();
    let predicted =
        laplace::low_temperature_mean(&lj().taylor_coefficients().unwrap(), 0.01).unwrap();
    assert!((predicted - 1.12901).abs() < 1e-5);
    // the remainder is O(T^2); its coefficient is about 5 for this potential
    assert!(
        (m - predicted).abs() < 10.0 * 0.01 * 0.01,
        "{m} vs {predicted}"
    );
}

#[test]
fn lj_taylor_data_matches_finite_differences() {
    let t = lj().taylor_coefficients().unwrap();
    let a = 2f64.powf(1.0 / 6.0);
    assert!(rel(t.c2, 18.0 * 2f64.powf(-4.0 / 3.0)) < 1e-14);
    // V''(r) = 156 r^-14 - 42 r^-8
    assert!(rel(t.c2, (156.0 * a.powi(-14) - 42.0 * a.powi(-8)) / 2.0) < 1e-13);
    let fd = finite_difference_taylor(lj_energy, a, 1e-3);
    for (k, (x, y)) in [t.c2, t.c3, t.c4].iter().zip(fd).enumerate() {
        assert!(
            rel(y, *x) < 1e-6,
            "c{}: analytic {x}, finite difference {y}",
            k + 2
        );
    }
}

#[test]
fn lj_reversion_residual_is_fifth_order_on_the_true_potential() {
    let t = lj().taylor_coefficients().unwrap();
    let chi = laplace::invert_series(&t, 3).unwrap();
    let mut scaled = Vec::new();
    for z in [0.01f64, -0.01, 0.02, -0.02, 0.005, -0.005] {
        let r = lj_energy(t.a + chi.evaluate(z)) - t.v_min - z * z;
        scaled.push(r.abs() / z.abs().powi(5));
    }
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    // a fourth-order error would blow up by 4x per halving
    assert!(max / min < 3.0, "{scaled:?}");
}

#[test]
fn lj_first_order_coefficient() {
    let t = lj().taylor_coefficients().unwrap();
    let m1 = thermal_expansion_coefficient(t.c2, t.c3).unwrap();
    let chi = laplace::closed_form_chi(&t);
    assert!((m1 - 0.65475).abs() < 5e-5);
    assert!(rel(m1, 1.5 * chi[1]) < 1e-14);
    let via_chain = laplace::laplace_coefficients(t.a, &laplace::invert_series(&t, 3).unwrap())
        .unwrap()
        .m1;
    assert!(rel(via_chain, m1) < 1e-12);
}

#[test]
fn first_order_coefficient_scaling() {
    let base = thermal_expansion_coefficient(2.0, -0.7).unwrap();
    for lambda in [0.5, 3.0] {
        assert!(
            rel(
                thermal_expansion_coefficient(2.0, -0.7 * lambda).unwrap(),
                lambda * base
            ) < 1e-14
        );
        let scaled = thermal_expansion_coefficient(2.0 * lambda, -0.7).unwrap();
        assert!(rel(scaled, base / (lambda * lambda)) < 1e-14);
    }
}

#[test]
fn quadratic_denominator_matches_gaussian() {
    let p = Potential::quadratic(5.0, 1.0, 50.0).unwrap();
    let asym = laplace::asymptotic_gibbs_integrals(&p, 100.0).unwrap();
    let quad = ensemble::partition_integral(&p, EnsembleParams::new(100.0, 0.0).unwrap())
        .unwrap()
        .value;
    assert!(rel(asym.denominator, quad) < 1e-3);
    assert!(rel(asym.denominator, (std::f64::consts::PI / 100.0).sqrt()) < 1e-12);
}

#[test]
fn laplace_ratio_tends_to_minimum() {
    let p = lj();
    let far = laplace::asymptotic_gibbs_integrals(&p, 1e9).unwrap();
    assert!((far.ratio - p.a()).abs() < 1e-8);
}

#[test]
fn translation_shifts_mean_exactly() {
    let coeffs = vec![1.0, -0.1, 0.02];
    let base = ensemble::mean_spacing(
        &Potential::polynomial(1.0, coeffs.clone(), 10.0).unwrap(),
        0.02,
        0.0,
    )
    .unwrap();
    for s in [0.5, 2.0] {
        let shifted = Potential::polynomial(1.0 + s, coeffs.clone(), 10.0 + s).unwrap();
        let m = ensemble::mean_spacing(&shifted, 0.02, 0.0).unwrap();
        assert!(
            (m - base - s).abs() < 1e-9,
            "shift {s}: {m} vs {}",
            base + s
        );
    }
}

#[test]
fn linear_response_residual_is_quadratic_in_force() {
    let p = lj();
    let t = 0.01;
    let r = ensemble::elastic_modulus(&p, t).unwrap();
    let residual = |f: f64| (ensemble::elastic_expansion(&p, t, f).unwrap() - r * f).abs();
    let mut prev = residual(4e-3);
    for k in 1..4 {
        let f = 4e-3 / 2f64.powi(k);
        let cur = residual(f);
        let ratio = prev / cur;
        assert!((3.0..5.0).contains(&ratio), "F = {f}: ratio {ratio}");
        prev = cur;
    }
    for f in [1e-3, -1e-3] {
        let x = ensemble::elastic_expansion(&p, t, f).unwrap();
        assert!(rel(x, r * f) < 0.01);
    }
}

#[test]
fn chain_length_is_n_times_mean() {
    let p = lj();
    let m = ensemble::mean_spacing(&p, 0.01, 0.0).unwrap();
    assert_eq!(
        ensemble::chain_length(&p, 0.01, 0.0, 1_000_000).unwrap(),
        1e6 * m
    );
    assert_eq!(ensemble::chain_length(&p, 0.01, 0.0, 1).unwrap(), m);
}

#[test]
fn tighter_tolerance_agrees() {
    let p = lj();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let loose = Ensemble::with_options(&p, e, QuadOptions::default().with_rel_tol(1e-8))
        .unwrap()
        .mean()
        .unwrap();
    let tight = Ensemble::with_options(&p, e, QuadOptions::default().with_rel_tol(1e-13))
        .unwrap()
        .mean()
        .unwrap();
    assert!(rel(loose, tight) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reversion_matches_closed_form(c2 in 0.5f64..20.0, u in -1.0f64..1.0, v in -1.0f64..1.0, a in 0.5f64..3.0) {
        let t = TaylorData::new(a, 0.0, c2, u * c2, v * c2).unwrap();
        let chi = laplace::invert_series(&t, 3).unwrap();
        let closed = laplace::closed_form_chi(&t);
        for k in 0..3 {
            let tol = 1e-12 * closed[k].abs().max(1.0);
            prop_assert!((chi.coefficient(k + 1) - closed[k]).abs() < tol);
        }
        let e = laplace::laplace_coefficients(a, &chi).unwrap();
        prop_assert!((e.d0 / e.b0 - a).abs() < 1e-12);
    }

    #[test]
    fn normalization(c2 in 0.5f64..10.0, c3 in -0.3f64..0.3, beta in 5.0f64..500.0) {
        let p = Potential::polynomial(1.0, vec![c2, c3 * c2], 3.0).unwrap();
        let e = Ensemble::new(&p, EnsembleParams::new(beta, 0.0).unwrap()).unwrap();
        prop_assert!((e.moment(0).unwrap() - 1.0).abs() < 1e-12);
    }
}
