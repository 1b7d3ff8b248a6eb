use proptest::prelude::*;
use rescore::contour::*;
use rescore::{msqrt, C64};
use std::f64::consts::PI;

fn gauss3() -> AnalyticIntegrand {
    // radial average of exp(−q²/2) over S²
    AnalyticIntegrand::new(3, Regularity::Entire { a: 0.0 }, 10.0, |q| 4.0 * PI * (-0.5 * q * q).exp())
}

fn lorentz6() -> AnalyticIntegrand {
    AnalyticIntegrand::new(6, Regularity::Strip { b: 0.5 }, 8.0, |q| PI.powi(3) / (q * q + 1.0).powi(4))
}

#[test]
fn second_sheet_matches_rotated_contour_n3() {
    let r = RadialRule::new(512, 8.0);
    let f = gauss3();
    for &z in &[C64::new(1.0, -0.5), C64::new(2.0, -0.3), C64::new(0.5, -0.2)] {
        let cont = continue_cauchy(&f, 0.0, 1, z, &r).unwrap();
        let q0 = -msqrt(z);
        let phi = (q0.arg() - 0.3).max(-0.75);
        let rot = cauchy_rotated(&*f.eval, 3, 0.0, z, phi, &r);
        assert!((cont - rot).norm() < 1e-8 * rot.norm(), "{z}: {cont} vs {rot}");
    }
}

#[test]
fn second_sheet_matches_rotated_contour_n6() {
    let r = RadialRule::new(512, 8.0);
    let f = lorentz6();
    let z = C64::new(1.5, -0.4);
    // on the logarithmic surface the lower half-plane continuation from above is l = −1
    let cont = continue_cauchy(&f, -0.5, -1, z, &r).unwrap();
    let q0 = -msqrt(z + 0.5);
    let rot = cauchy_rotated(&*f.eval, 6, -0.5, z, q0.arg() - 0.3, &r);
    assert!((cont - rot).norm() < 1e-8 * rot.norm(), "{cont} vs {rot}");
}

#[test]
fn physical_matches_rotated_in_upper_half_plane() {
    let r = RadialRule::new(512, 8.0);
    let f = gauss3();
    let z = C64::new(1.3, 0.2);
    let a = continue_cauchy(&f, 0.0, 0, z, &r).unwrap();
    let b = cauchy_rotated(&*f.eval, 3, 0.0, z, -0.4, &r);
    assert!((a - b).norm() < 1e-9 * b.norm());
}

#[test]
fn linear_in_sheet_index_n6() {
    let r = RadialRule::default();
    let f = lorentz6();
    let z = C64::new(0.7, 0.4);
    let v: Vec<C64> = (-1..=2).map(|l| continue_cauchy(&f, 0.0, l, z, &r).unwrap()).collect();
    let corr = v[2] - v[1];
    assert!(((v[2] - v[0]) - 2.0 * corr).norm() < 1e-12 * corr.norm());
    assert!(((v[3] - v[2]) - corr).norm() < 1e-12 * corr.norm());
}

#[test]
fn node_doubling_converges() {
    let f = lorentz6();
    let z = C64::new(0.9, 0.3);
    let a = continue_cauchy(&f, 0.0, 0, z, &RadialRule::new(256, 8.0)).unwrap();
    let b = continue_cauchy(&f, 0.0, 0, z, &RadialRule::new(512, 8.0)).unwrap();
    assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
}

#[test]
fn cut_matching_two_body_resolvent() {
    let r = RadialRule::new(512, 8.0);
    let f = |q: C64| 1.0 / (q * q + 1.0);
    let e = 1.7;
    let mut gaps = vec![];
    for &d in &[1e-3, 1e-4] {
        let up = free_resolvent_2b_sheet(&f, &f, C64::new(e, -d), 1, &r).unwrap();
        let down = free_resolvent_2b_sheet(&f, &f, C64::new(e, d), 0, &r).unwrap();
        gaps.push((up - down).norm());
    }
    let ratio = gaps[0] / gaps[1];
    assert!(ratio > 8.0 && ratio < 12.0, "gaps {gaps:?}");
}

#[test]
fn free_two_body_real_below_cut() {
    let f = |q: C64| 1.0 / (q * q + 1.0);
    let v = free_resolvent_2b_sheet(&f, &f, C64::new(-0.8, 0.0), 0, &RadialRule::default()).unwrap();
    assert!(v.im.abs() < 1e-14);
    // closed form: 4π ∫ q² dq /((q²+1)²(q²+κ²)) = π²/(κ+1)²·... checked against 2π²/((1+κ)²)·1/1
    let k = 0.8f64.sqrt();
    let exact = 2.0 * PI * PI / (2.0 * (1.0 + k).powi(2));
    assert!((v.re - exact).abs() < 1e-11 * exact, "{} vs {exact}", v.re);
}

#[test]
fn path_independence_two_rotations() {
    let r = RadialRule::new(512, 8.0);
    let f = gauss3();
    let z = C64::new(1.0, -0.5);
    let a = cauchy_rotated(&*f.eval, 3, 0.0, z, -0.5, &r);
    let b = cauchy_rotated(&*f.eval, 3, 0.0, z, -0.6, &r);
    assert!((a - b).norm() < 1e-9 * a.norm());
}

#[test]
fn three_body_free_sheet_spacing() {
    let r = RadialRule::default();
    let f = |k: C64, p: C64| 1.0 / ((k * k + 1.0) * (p * p + 2.0));
    let z = C64::new(0.6, 0.3);
    let v: Vec<C64> = (0..3).map(|l| free_resolvent_3b_sheet(&f, &f, z, l, &r, 32).unwrap()).collect();
    assert!(((v[2] - v[1]) - (v[1] - v[0])).norm() < 1e-12 * (v[1] - v[0]).norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn gamma_path_clears_locus(re in -2.0f64..2.0, im in 0.05f64..2.0, c in 0.1f64..0.95, scale in 1.0f64..2.0) {
        let z = C64::new(re, im);
        let p = gamma_path(z, Orientation::Plus, scale, Some(c), 16).unwrap();
        prop_assert!(p.clearance(z, c) > 0.0);
        let q = gamma_path(z.conj(), Orientation::Minus, scale, Some(c), 16).unwrap();
        prop_assert!(q.clearance(z.conj(), c) > 0.0);
    }
}
