use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rescore::contour::{adaptive_half_line, free_resolvent_3b_sheet, RadialRule};
use rescore::linalg::CMat;
use rescore::riemann::MultiIndex;
use rescore::threebody::*;
use rescore::twobody::{yamaguchi, PairPotential};
use rescore::C64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn opts() -> FaddeevOptions {
    FaddeevOptions::default()
}

fn bosons(lam: f64) -> ThreeBodySystem {
    ThreeBodySystem::identical_bosons(lam, 1.0).unwrap()
}

fn smooth(_: usize, q: C64) -> C64 {
    1.0 / (q * q + 1.0).powi(2)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

// --- kinematics -------------------------------------------------------------

fn kin(k: [f64; 3], p: [f64; 3]) -> f64 {
    k.iter().chain(p.iter()).map(|x| x * x).sum()
}

#[test]
fn kinetic_form_rotation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = [rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)];
        let jc = jacobi_coeffs(m).unwrap();
        let v = |r: &mut ChaCha8Rng| [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        let (p1, p2) = (v(&mut rng), v(&mut rng));
        let p3: Vec<f64> = (0..3).map(|i| -p1[i] - p2[i]).collect();
        let h: f64 = (0..3).map(|i| p1[i] * p1[i] / (2.0 * m[0]) + p2[i] * p2[i] / (2.0 * m[1]) + p3[i] * p3[i] / (2.0 * m[2])).sum();
        for a in 0..3 {
            let (ka, pa) = jc.from_momenta(a, p1, p2);
            worst = worst.max((kin(ka, pa) - h).abs() / h);
            for b in 0..3 {
                let (kb, pb) = jc.from_momenta(b, p1, p2);
                let (kr, pr) = jc.rotate(a, b, kb, pb);
                for i in 0..3 {
                    worst = worst.max((kr[i] - ka[i]).abs().max((pr[i] - pa[i]).abs()) / h.sqrt());
                }
            }
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn rotation_is_orthogonal(m1 in 0.1f64..10.0, m2 in 0.1f64..10.0, m3 in 0.1f64..10.0) {
        let jc = jacobi_coeffs([m1, m2, m3]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let (cc, ss) = (jc.c[a][b], jc.s[a][b]);
                prop_assert!((cc * cc + ss * ss - 1.0).abs() < 1e-13);
                if a != b {
                    prop_assert!(cc < 0.0);
                    let g = jc.angle(a, b);
                    prop_assert!(g > 0.0 && g < PI / 2.0);
                }
            }
        }
    }
}

// --- contour -----------------------------------------------------------------

#[test]
fn contour_independence() {
    let sys = bosons(0.2);
    let o = FaddeevOptions { nodes: 14, ..opts() };
    // below breakup, two rotation angles
    let z = c(-0.1, 0.05);
    let a = Faddeev::rotated(&sys, z, &o, 0.2).unwrap().on_shell().unwrap()[(0, 0)];
    let b = Faddeev::rotated(&sys, z, &o, 0.35).unwrap().on_shell().unwrap()[(0, 0)];
    assert!(rel(a, b) < 1e-8, "{a} {b}");
    // above breakup, scaled contour against the rotated ray
    let z = c(0.5, 0.3);
    let a = Faddeev::new(&sys, z, &o).unwrap().on_shell().unwrap()[(0, 0)];
    let b = Faddeev::rotated(&sys, z, &o, 0.3).unwrap().on_shell().unwrap()[(0, 0)];
    assert!(rel(a, b) < 1e-8, "{a} {b}");
}

#[test]
fn schwarz_reflection() {
    let sys = bosons(0.2);
    for z in [c(-0.3, 0.2), c(0.4, 0.5), c(-1.2, 0.1)] {
        let up = Faddeev::rotated(&sys, z, &opts(), 0.3).unwrap().log_det().exp();
        let dn = Faddeev::rotated(&sys, z.conj(), &opts(), -0.3).unwrap().log_det().exp();
        assert!(rel(dn, up.conj()) < 1e-10, "{z}: {up} {dn}");
    }
}

// --- scattering matrix -------------------------------------------------------

#[test]
fn unitarity_above_and_below_breakup() {
    let sys = bosons(0.2);
    let o = FaddeevOptions { nodes: 12, ..opts() };
    for e in [0.5, -0.1] {
        let amp = assemble_t(&sys, c(e, 0.0), &o).unwrap();
        let d = amp.unitarity_defect(6).unwrap();
        assert!(d < 1e-6, "E = {e}: {d}");
    }
}

fn diag(v: &[f64], skip: usize) -> CMat {
    CMat::from_fn(v.len() - skip, v.len() - skip, |i, j| if i == j { c(v[i + skip], 0.0) } else { c(0.0, 0.0) })
}

#[test]
fn duality_at_random_points() {
    let sys = bosons(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..5 {
        // the scaled tail must clear the on-shell point, which keeps arg z moderate
        let re = rng.gen_range(0.1..0.8);
        let z = c(re, rng.gen_range(0.02..0.5) * re);
        let l = MultiIndex::all_flags(&sys.thresholds, if k % 2 == 0 { 1 } else { 0 });
        let amp = assemble_t(&sys, z, &opts()).unwrap();
        let s = amp.truncated(&l, Variant::S).matrix;
        let sd = amp.truncated(&l, Variant::SDagger).matrix;
        let skip = if l.l0 == 0 { amp.n_breakup() } else { 0 };
        let (lv, lt) = amp.selectors(&l);
        let av = amp.big_a();
        let a = CMat::from_fn(av.len() - skip, av.len() - skip, |i, j| if i == j { av[i + skip] } else { c(0.0, 0.0) });
        let (lm, ltm) = (diag(&lv, skip), diag(&lt, skip));
        let left = &lm * &a * s.try_inverse().unwrap() * &ltm;
        let right = &ltm * sd.try_inverse().unwrap() * &a * &lm;
        let err = (&left - &right).norm() / left.norm();
        assert!(err < 1e-10, "{z}: {err}");
    }
}

#[test]
fn decoupled_limit_is_two_body() {
    let (lam, beta) = (0.2, 1.0);
    let yam = PairPotential::Yamaguchi { strength: lam, beta };
    let off = PairPotential::Yamaguchi { strength: 0.0, beta: 1.0 };
    let sys = ThreeBodySystem::new([1.0, 1.0, 1.0], [yam, off, off]).unwrap();
    let z = c(0.4, 0.15);
    let amp = assemble_t(&sys, z, &opts()).unwrap();
    let l = MultiIndex::all_flags(&sys.thresholds, 1);
    let s = amp.truncated(&l, Variant::S);
    let nb = s.n_breakup;
    for i in 0..nb {
        let w = amp.omega[i];
        let want = yamaguchi::s0(z * w.cos() * w.cos(), lam, beta);
        assert!(rel(s.matrix[(i, i)], want) < 1e-6, "ω = {w}");
        for j in 0..s.matrix.ncols() {
            if j != i {
                assert!(s.matrix[(i, j)].norm() < 1e-12);
            }
        }
    }
    // no rearrangement: the dimer channel passes through
    assert!((s.matrix[(nb, nb)] - 1.0).norm() < 1e-12);

    // ⟨a, 𝕏 a⟩ = 4π ∫ q² a² τ(z − q²)
    let m = continue_m(&sys, z, &MultiIndex::physical(&sys.thresholds), &smooth, &smooth, &opts()).unwrap();
    let f = |q: f64| {
        let qc = c(q, 0.0);
        4.0 * PI * q * q * smooth(0, qc).powi(2) * yamaguchi::tau(z - q * q, lam, beta)
    };
    let want = adaptive_half_line(&f, 1.0, 1e-13);
    assert!(rel(m, want) < 1e-6, "{m} {want}");
}

// --- bound states ------------------------------------------------------------

// Independent spectator equation on the real axis for three bosons:
// F(p) = 2 τ(E − p²) ∫ q² dq Z(p, q) F(q),
// Z = 2π/|s|³ ∫ dη g(k_a) g(k_b) / (E − p² − k_a²), k_a = (q − c p)/s, k_b = (c q − p)/s.
fn oracle_lambda_max(lam: f64, beta: f64, e: f64, n: usize) -> f64 {
    let (cc, ss) = (-0.5, 3f64.sqrt() / 2.0);
    let g = |k2: f64| 1.0 / (k2 + beta * beta);
    let tau = |zeta: f64| {
        let kappa = (-zeta).sqrt();
        let j = PI * PI / (beta * (beta + kappa).powi(2));
        -lam / (1.0 - lam * j)
    };
    let (xs, ws) = gauss(n);
    let (xe, we) = gauss(48);
    // q = β (1 + x)/(1 − x)
    let q: Vec<f64> = xs.iter().map(|x| beta * (1.0 + x) / (1.0 - x)).collect();
    let wq: Vec<f64> = xs.iter().zip(&ws).map(|(x, w)| w * 2.0 * beta / (1.0 - x).powi(2)).collect();
    let d: Vec<f64> = (0..n).map(|i| (-tau(e - q[i] * q[i]) * wq[i] * q[i] * q[i]).sqrt()).collect();
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (p, qq) = (q[i], q[j]);
            let mut z = 0.0;
            for (eta, w) in xe.iter().zip(&we) {
                let ka2 = (qq * qq - 2.0 * cc * p * qq * eta + cc * cc * p * p) / (ss * ss);
                let kb2 = (cc * cc * qq * qq - 2.0 * cc * p * qq * eta + p * p) / (ss * ss);
                z += w * g(ka2) * g(kb2) / (e - p * p - ka2);
            }
            z *= 2.0 * PI / ss.powi(3);
            // τ < 0 and Z < 0: the symmetrised kernel is positive
            a[(i, j)] = 2.0 * d[i] * (-z) * d[j];
        }
    }
    a.symmetric_eigenvalues().max()
}

fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Golub–Welsch
    let mut t = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        t[(k, k - 1)] = b;
        t[(k - 1, k)] = b;
    }
    let eig = t.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

fn oracle_bound_state(lam: f64, beta: f64, mut lo: f64, mut hi: f64) -> f64 {
    // λ_max grows toward the threshold
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if oracle_lambda_max(lam, beta, mid, 96) > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn trimer_matches_eigenvalue_oracle() {
    let sys = bosons(0.2);
    let o = FaddeevOptions { nodes: 14, ..opts() };
    let found = three_body_bound_states(&sys, -1.2, -0.5, 24, &o).unwrap();
    assert_eq!(found.len(), 1, "{found:?}");
    let want = oracle_bound_state(0.2, 1.0, -1.2, -0.5);
    assert!((found[0] - want).abs() < 1e-8, "{} vs {want}", found[0]);
}

#[test]
fn no_trimer_below_threshold_strength() {
    // no dimer below Λ = β³/π², and the three-body level appears only above Λ ≈ 0.083
    let sys = bosons(0.07);
    assert!(sys.thresholds.lambda_min().is_none());
    let found = three_body_bound_states(&sys, -0.5, -1e-3, 20, &opts()).unwrap();
    assert!(found.is_empty(), "{found:?}");
    assert!(oracle_lambda_max(0.07, 1.0, -1e-3, 64) < 1.0);
}

// --- continuation ------------------------------------------------------------

#[test]
fn m_cut_matching_first_order() {
    let sys = bosons(0.2);
    let phys = MultiIndex::physical(&sys.thresholds);
    // across the breakup cut and across the dimer cut below breakup
    for (e, l) in [(0.3, MultiIndex::all_flags(&sys.thresholds, 1)), (-0.1, MultiIndex::all_flags(&sys.thresholds, 0))] {
        let diff = |d: f64| {
            let up = continue_m(&sys, c(e, d), &l, &smooth, &smooth, &opts()).unwrap();
            let dn = continue_m(&sys, c(e, -d), &phys, &smooth, &smooth, &opts()).unwrap();
            (up - dn).norm() / dn.norm()
        };
        let (d1, d2) = (diff(1e-2), diff(1e-3));
        assert!(d2 < 1e-2, "E = {e}: {d1} {d2}");
        let ratio = d1 / d2;
        assert!(ratio > 7.0 && ratio < 13.0, "E = {e}: {d1} {d2}");
    }
}

#[test]
fn r_form_cut_matching_first_order() {
    let sys = bosons(0.2);
    let phys = MultiIndex::physical(&sys.thresholds);
    let l = MultiIndex::all_flags(&sys.thresholds, 1);
    let e = 0.3;
    for (f, g) in [(TestState { mu: 1.0 }, TestState { mu: 1.3 }), (TestState { mu: 0.8 }, TestState { mu: 0.8 })] {
        let diff = |d: f64| {
            let up = continue_r_form(&sys, c(e, d), &l, &f, &g, &opts()).unwrap();
            let dn = continue_r_form(&sys, c(e, -d), &phys, &f, &g, &opts()).unwrap();
            (up - dn).norm() / dn.norm()
        };
        let (d1, d2) = (diff(1e-2), diff(1e-3));
        assert!(d2 < 2e-3, "{d1} {d2}");
        let ratio = d1 / d2;
        assert!(ratio > 7.0 && ratio < 13.0, "{d1} {d2}");
    }
}

#[test]
fn free_r_form_matches_free_resolvent() {
    let sys = bosons(0.0);
    let (f, g) = (TestState { mu: 1.0 }, TestState { mu: 1.3 });
    let f1 = |k: C64, p: C64| f.eval(k * k + p * p);
    let f2 = |k: C64, p: C64| g.eval(k * k + p * p);
    let fine = RadialRule::with_panels(128, 32, 16.0);
    for (z, l0) in [(c(0.3, 0.1), 1), (c(0.3, 0.1), 0), (c(-0.5, 0.2), 0)] {
        let l = MultiIndex { l0, ..MultiIndex::physical(&sys.thresholds) };
        let r = continue_r_form(&sys, z, &l, &f, &g, &opts()).unwrap();
        let want = free_resolvent_3b_sheet(&f1, &f2, z, l0, &fine, 80).unwrap();
        assert!(rel(r, want) < 1e-10, "{z} l0 = {l0}: {r} {want}");
    }
}

#[test]
fn continued_s_on_own_sheet_is_inverse() {
    let sys = bosons(0.2);
    let l = MultiIndex::all_flags(&sys.thresholds, 0);
    let z = c(0.35, 0.2);
    let amp = assemble_t(&sys, z, &opts()).unwrap();
    let s = amp.truncated(&l, Variant::S).matrix;
    let cs = continue_s(&sys, z, &l, &l, Variant::S, &opts()).unwrap().matrix;
    let err = (&cs * &s - CMat::identity(s.nrows(), s.ncols())).norm();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn projected_test_state_closed_form() {
    let ts = TestState { mu: 1.2 };
    let beta = 0.9;
    for (p, z) in [(c(0.4, 0.0), c(0.3, 0.2)), (c(1.5, 0.0), c(-0.6, 0.1)), (c(0.7, -0.05), c(0.9, 0.4))] {
        let f = |k: f64| {
            let k2 = c(k * k, 0.0);
            4.0 * PI * k * k / (k2 + beta * beta) * ts.eval(k2 + p * p) / (k2 + p * p - z)
        };
        let want = adaptive_half_line(&f, 1.0, 1e-14);
        let got = ts.projected(beta, p, z);
        assert!(rel(got, want) < 1e-10, "{p} {z}: {got} {want}");
    }
}
