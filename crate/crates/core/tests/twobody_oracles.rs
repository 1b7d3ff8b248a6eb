use rescore::contour::RadialRule;
use rescore::roots::Rect;
use rescore::twobody::*;
use rescore::{msqrt, C64};
use std::f64::consts::PI;

// independent closed forms, written out here rather than taken from the library
fn j_closed(z: C64, b: f64) -> C64 {
    let kappa = -C64::i() * msqrt(z);
    PI * PI / (b * (b + kappa).powi(2))
}
fn j_second(z: C64, b: f64) -> C64 {
    let kappa = -C64::i() * msqrt(z);
    PI * PI / (b * (b - kappa).powi(2))
}
fn g(k: C64, b: f64) -> C64 {
    1.0 / (k * k + b * b)
}

// plain composite Simpson on q = u/(1−u), only for z away from the cut
fn j_simpson(z: C64, b: f64) -> C64 {
    let n = 200_000;
    let h = 1.0 / n as f64;
    let mut s = C64::new(0.0, 0.0);
    for i in 0..=n {
        let u = (i as f64 * h).min(1.0 - 1e-12);
        let q = u / (1.0 - u);
        let dq = 1.0 / (1.0 - u).powi(2);
        let f = 4.0 * PI * q * q * g(C64::new(q, 0.0), b).powi(2) / (q * q - z) * dq;
        let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += c * f;
    }
    s * h / 3.0
}

const LAM: f64 = 0.3;
const BETA: f64 = 1.0;

fn yam() -> PairPotential {
    PairPotential::Yamaguchi { strength: LAM, beta: BETA }
}

#[test]
fn loop_integral_closed_form_vs_quadrature() {
    for &z in &[C64::new(-0.5, 0.0), C64::new(1.0, 0.7), C64::new(-2.0, -1.0)] {
        let a = j_closed(z, BETA);
        let b = j_simpson(z, BETA);
        assert!((a - b).norm() < 1e-8 * a.norm(), "{z}: {a} {b}");
    }
}

#[test]
fn ls_matches_closed_form_twenty_points() {
    let opts = LsOptions::default();
    let pot = yam();
    for i in 0..20 {
        let ang = -2.8 + 5.6 * i as f64 / 19.0;
        let z = C64::from_polar(0.3 + 0.2 * i as f64, ang);
        let z = if z.im.abs() < 1e-3 { z + C64::new(0.0, 0.05) } else { z };
        let t = solve_ls(&pot, z, &opts).unwrap();
        let tau = -LAM / (1.0 - LAM * j_closed(z, BETA));
        for &(k, kp) in &[(0.3, 0.7), (1.1, 2.5), (0.05, 4.0)] {
            let (k, kp) = (C64::new(k, 0.0), C64::new(kp, 0.0));
            let exact = g(k, BETA) * tau * g(kp, BETA);
            let num = t.eval(k, kp);
            assert!((num - exact).norm() < 1e-8 * exact.norm(), "z={z} {num} {exact}");
        }
    }
}

#[test]
fn bound_state_matches_analytic_root() {
    // analytic: 1 − Λ J(−κ²) = 0 solved by bisection on κ
    let f = |k: f64| 1.0 - LAM * PI * PI / (BETA * (BETA + k).powi(2));
    let (mut lo, mut hi) = (1e-12, 10.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if f(m).signum() == f(lo).signum() {
            lo = m
        } else {
            hi = m
        }
    }
    let e_exact = -(0.5 * (lo + hi)).powi(2);
    let spec = bound_states(&yam(), &LsOptions::default(), 50.0).unwrap();
    assert_eq!(spec.levels.len(), 1);
    let l = &spec.levels[0];
    assert!((l.lambda - e_exact).abs() < 1e-10, "{} vs {e_exact}", l.lambda);
    // ψ = −φ/(k² − λ) and the homogeneous relation for φ
    for &k in &[0.2, 1.0, 3.0] {
        let k = C64::new(k, 0.0);
        assert!((l.psi(k) + l.phi(k) / (k * k - l.lambda)).norm() < 1e-12);
        let kap = (-l.lambda).sqrt();
        let norm = (BETA * kap * (BETA + kap).powi(3)).sqrt() / PI;
        assert!((l.phi(k) - norm * g(k, BETA)).norm() < 1e-8 * norm);
    }
}

#[test]
fn weak_potential_has_no_levels() {
    let p = PairPotential::Yamaguchi { strength: 0.05, beta: 1.0 };
    assert!(bound_states(&p, &LsOptions::default(), 50.0).unwrap().levels.is_empty());
    let p = PairPotential::Yamaguchi { strength: 0.0, beta: 1.0 };
    assert!(bound_states(&p, &LsOptions::default(), 50.0).unwrap().levels.is_empty());
}

#[test]
fn zero_potential_zero_t() {
    let p = PairPotential::Yukawa { coupling: 0.0, mu: 1.0 };
    let t = solve_ls(&p, C64::new(1.0, 0.5), &LsOptions::default()).unwrap();
    assert_eq!(t.eval(C64::new(0.5, 0.0), C64::new(1.5, 0.0)).norm(), 0.0);
}

#[test]
fn residue_at_bound_state() {
    let opts = LsOptions::default();
    let spec = bound_states(&yam(), &opts, 50.0).unwrap();
    let l = &spec.levels[0];
    let (k, kp) = (C64::new(0.4, 0.0), C64::new(1.3, 0.0));
    let d = 1e-5;
    let t1 = solve_ls(&yam(), C64::new(l.lambda + d, 0.0), &opts).unwrap().eval(k, kp);
    let t2 = solve_ls(&yam(), C64::new(l.lambda - d, 0.0), &opts).unwrap().eval(k, kp);
    let res = 0.5 * (t1 - t2) * d; // symmetric difference cancels the regular part
    let expect = l.phi(k) * l.phi(kp); // t ≈ φ φ̄ / (z − λ)
    assert!((res - expect).norm() < 1e-6 * expect.norm(), "{res} vs {expect}");
}

#[test]
fn unitarity_on_the_cut() {
    let opts = LsOptions::default();
    for &e in &[0.5, 1.0, 5.0] {
        let s = smatrix(&yam(), C64::new(e, 0.0), &opts).unwrap().value;
        assert!((s.norm() - 1.0).abs() < 1e-8, "E={e}: |s| = {}", s.norm());
        let y = PairPotential::Yukawa { coupling: -3.0, mu: 1.0 };
        let s = smatrix(&y, C64::new(e, 0.0), &LsOptions::for_potential(&y)).unwrap().value;
        assert!((s.norm() - 1.0).abs() < 1e-8, "Yukawa E={e}: |s| = {}", s.norm());
    }
    let s = smatrix(&yam(), C64::new(1e-10, 0.0), &opts).unwrap().value;
    assert!((s - 1.0).norm() < 1e-4);
}

#[test]
fn schwarz_reflection() {
    let opts = LsOptions::default();
    let z = C64::new(0.8, 0.6);
    let a = smatrix(&yam(), z, &opts).unwrap().value;
    let b = smatrix(&yam(), z.conj(), &opts).unwrap().value;
    assert!((a - b.conj()).norm() < 1e-12);
}

#[test]
fn second_sheet_matches_closed_form() {
    let opts = LsOptions::default();
    for &z in &[C64::new(1.0, -0.5), C64::new(-0.5, -1.0), C64::new(2.0, 0.8), C64::new(0.3, -0.05)] {
        let t2 = continue_t_sheet(&yam(), z, &opts).unwrap();
        let tau2 = -LAM / (1.0 - LAM * j_second(z, BETA));
        let (k, kp) = (C64::new(0.6, 0.0), C64::new(1.7, 0.0));
        let exact = g(k, BETA) * tau2 * g(kp, BETA);
        let v = t2.eval(k, kp);
        assert!((v - exact).norm() < 1e-8 * exact.norm(), "{z}: {v} {exact}");
    }
}

#[test]
fn cut_matching_first_order() {
    let opts = LsOptions::default();
    let (k, kp) = (C64::new(0.6, 0.0), C64::new(1.7, 0.0));
    let e = 1.3;
    let gaps: Vec<f64> = [1e-3, 1e-4]
        .iter()
        .map(|&d| {
            let a = continue_t_sheet(&yam(), C64::new(e, d), &opts).unwrap().eval(k, kp);
            let b = solve_ls(&yam(), C64::new(e, -d), &opts).unwrap().eval(k, kp);
            (a - b).norm()
        })
        .collect();
    let r = gaps[0] / gaps[1];
    assert!(r > 8.0 && r < 12.5, "{gaps:?}");
}

#[test]
fn second_sheet_regular_at_bound_state() {
    let opts = LsOptions::default();
    let l = bound_states(&yam(), &opts, 50.0).unwrap().levels[0].lambda;
    let (k, kp) = (C64::new(0.6, 0.0), C64::new(1.7, 0.0));
    let mut vals = vec![];
    for i in 0..8 {
        let z = C64::new(l, 0.0) + C64::from_polar(1e-4, PI * (i as f64 + 0.5) / 4.0);
        vals.push(continue_t_sheet(&yam(), z, &opts).unwrap().eval(k, kp).norm());
    }
    let mx = vals.iter().cloned().fold(0.0, f64::max);
    let mn = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(mx / mn < 1.01, "{vals:?}");
}

#[test]
fn reciprocal_identity() {
    let opts = LsOptions::default();
    for &z in &[C64::new(1.0, -0.5), C64::new(0.2, 0.1), C64::new(-1.0, -2.0)] {
        let s = smatrix(&yam(), z, &opts).unwrap().value;
        let s2 = continue_s_sheet(&yam(), z, &opts).unwrap().value;
        assert!((s * s2 - 1.0).norm() < 1e-10);
    }
}

#[test]
fn resolvent_reduces_to_free_for_zero_potential() {
    let opts = LsOptions::default();
    let p = PairPotential::Yamaguchi { strength: 0.0, beta: 1.0 };
    let f1 = |q: C64| 1.0 / (q * q + 2.0);
    let f2 = |q: C64| 1.0 / (q * q + 1.5).powi(2);
    let z = C64::new(0.9, -0.4);
    let a = continue_resolvent(&p, z, 1, &f1, &f2, &opts).unwrap();
    let b = rescore::contour::free_resolvent_2b_sheet(&f1, &f2, z, 1, &RadialRule::new(512, 8.0)).unwrap();
    assert!((a - b).norm() < 1e-10 * b.norm(), "{a} {b}");
}

#[test]
fn resolvent_cut_matching() {
    let opts = LsOptions::default();
    let f1 = |q: C64| 1.0 / (q * q + 2.0);
    let e = 0.8;
    let gaps: Vec<f64> = [1e-3, 1e-4]
        .iter()
        .map(|&d| {
            let a = continue_resolvent(&yam(), C64::new(e, d), 1, &f1, &f1, &opts).unwrap();
            let b = continue_resolvent(&yam(), C64::new(e, -d), 0, &f1, &f1, &opts).unwrap();
            (a - b).norm()
        })
        .collect();
    let r = gaps[0] / gaps[1];
    assert!(r > 8.0 && r < 12.5, "{gaps:?}");
}

fn repulsive() -> (PairPotential, C64) {
    // c = 2, β = 1: zero of s₀ at z = c² − β² − 2iβc
    let c = 2.0;
    let strength = -c * c * BETA / (PI * PI);
    (PairPotential::Yamaguchi { strength, beta: BETA }, C64::new(c * c - BETA * BETA, -2.0 * BETA * c))
}

#[test]
fn resonance_found_and_is_a_pole() {
    let (pot, zc) = repulsive();
    // bisection oracle: |1/s₀| → ∞ is hard to bisect; bisect Re/Im of (β − κ)² − Λπ²/β instead
    let opts = LsOptions::default();
    let reg = Rect::new(1.0, 5.0, -6.0, -2.0).unwrap();
    let out = find_resonances(&pot, reg, &opts).unwrap();
    assert_eq!(out.count, 1);
    assert_eq!(out.resonances.len(), 1);
    let z = out.resonances[0].z;
    assert!((z - zc).norm() < 1e-8, "{z} vs {zc}");
    let probe = ring_probe_t(&pot, z, C64::new(0.5, 0.0), C64::new(1.0, 0.0), &opts).unwrap();
    assert!((probe.pole - zc).norm() < 1e-6, "{probe:?}");
    assert!(probe.peak_ratio > 1e5, "{probe:?}");
    assert_eq!(probe.order, 1);
}

#[test]
fn no_resonances_for_zero_strength() {
    let p = PairPotential::Yamaguchi { strength: 0.0, beta: 1.0 };
    let reg = Rect::new(0.5, 5.0, -5.0, -0.5).unwrap();
    let out = find_resonances(&p, reg, &LsOptions::default()).unwrap();
    assert_eq!(out.count, 0);
    assert!(out.resonances.is_empty());
}

#[test]
fn yukawa_second_sheet_direct_vs_representation() {
    let pot = PairPotential::Yukawa { coupling: -4.0, mu: 1.0 };
    let opts = LsOptions::for_potential(&pot);
    let z = C64::new(0.6, -0.15);
    let rep = continue_t_sheet(&pot, z, &opts).unwrap();
    let direct = solve_ls_sheet(&pot, z, 1, &opts).unwrap();
    let (k, kp) = (C64::new(0.4, -0.1), C64::new(0.8, -0.2));
    let a = rep.eval(k, kp);
    let b = direct.eval(k, kp);
    assert!((a - b).norm() < 1e-7 * b.norm(), "{a} vs {b}");
}

#[test]
fn node_doubling_yamaguchi() {
    let z = C64::new(0.7, 0.3);
    let a = solve_ls(&yam(), z, &LsOptions { rule: RadialRule::new(256, 8.0), theta: 0.3 }).unwrap();
    let b = solve_ls(&yam(), z, &LsOptions { rule: RadialRule::new(512, 8.0), theta: 0.3 }).unwrap();
    let (k, kp) = (C64::new(0.5, 0.0), C64::new(1.0, 0.0));
    let (x, y) = (a.eval(k, kp), b.eval(k, kp));
    assert!((x - y).norm() < 1e-8 * y.norm(), "{x} {y}");
}

#[test]
fn node_doubling() {
    let pot = PairPotential::Yukawa { coupling: -2.0, mu: 1.0 };
    let z = C64::new(0.7, 0.3);
    let a = solve_ls(&pot, z, &LsOptions::for_potential(&pot)).unwrap();
    let b = solve_ls(&pot, z, &LsOptions { rule: RadialRule::with_panels(96, 32, 128.0), theta: 0.3 }).unwrap();
    let (k, kp) = (C64::new(0.5, 0.0), C64::new(1.0, 0.0));
    let (x, y) = (a.eval(k, kp), b.eval(k, kp));
    assert!((x - y).norm() < 1e-8 * y.norm(), "{x} {y}");
}
