//! s-wave exchange kernel of the separable Faddeev (AGS) equations.
//!
//! With p = p_α, q = p_β and η = p̂·q̂,
//!   Z_αβ = |s|³ / [(A₁ − Bη)(A₂ − Bη)(A₃ − Bη)],
//!   A₁ = q² + c²p² + s²β_α², A₂ = c²q² + p² + s²β_β², A₃ = p² + q² − s²z, B = 2cpq,
//! the three factors being g_α(k_α), g_β(k_β) and the free resolvent. The η integral is the
//! second divided difference of f(a) = ∫dη/(a − bη) = Log((a+b)/(a−b))/b.

use crate::C64;
use std::f64::consts::PI;


/// f(a) = ∫_{-1}^{1} dη/(a − bη). With `presc` (a, b real) the −i0 boundary value.
pub(crate) fn f_single(a: C64, b: C64, presc: bool) -> C64 {
    if b.norm() == 0.0 {
        return 2.0 / a;
    }
    if b.norm() < 0.3 * a.norm() {
        let t = b / a;
        return 2.0 * t.atanh() / b;
    }
    if presc {
        let (a, b) = (a.re, b.re);
        let (u, v) = (a + b, a - b);
        let jump = (u < 0.0) as i32 as f64 - (v < 0.0) as i32 as f64;
        return C64::new((u.abs().ln() - v.abs().ln()) / b, -PI * jump / b);
    }
    ((a + b) / (a - b)).ln() / b
}

// log(1 + u) for small complex u
fn ln1p(u: C64) -> C64 {
    C64::new(0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p(), u.im.atan2(1.0 + u.re))
}

fn seg_dist(a: C64, b: C64) -> f64 {
    let bb = b.norm_sqr();
    if bb == 0.0 {
        return a.norm();
    }
    let t = ((a * b.conj()).re / bb).clamp(-1.0, 1.0);
    (a - b * t).norm()
}

/// Second divided difference f[a₀, a₁, a₂] = ∫dη ∏ 1/(a_i − bη).
/// Only a₂ may carry the real-axis prescription.
pub(crate) fn dd3(a: [C64; 3], b: C64, presc: bool) -> C64 {
    let fv = [f_single(a[0], b, false), f_single(a[1], b, false), f_single(a[2], b, presc)];
    let d = [seg_dist(a[0], b), seg_dist(a[1], b), seg_dist(a[2], b)];
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let mut bad = None;
    let mut worst = f64::INFINITY;
    for &(i, j, k) in &pairs {
        let sep = (a[i] - a[j]).norm();
        let r = d[i].min(d[j]);
        if sep <= 0.02 * r {
            let q = sep / r;
            if q < worst {
                worst = q;
                bad = Some((i, j, k));
            }
        }
    }
    let exact = || {
        fv[0] / ((a[0] - a[1]) * (a[0] - a[2]))
            + fv[1] / ((a[1] - a[0]) * (a[1] - a[2]))
            + fv[2] / ((a[2] - a[0]) * (a[2] - a[1]))
    };
    let Some((i, j, k)) = bad else { return exact() };
    let n = 64;
    let m = 0.5 * (a[i] + a[j]);
    let sep = (a[i] - a[j]).norm();
    let far = (a[k] - m).norm();
    if far > 3.0 * sep && !(presc && k != 2) && b.norm() > 0.0 {
        // close pair, both well off the segment: f[a_i, a_j] from log1p of the small shift
        let dl = a[j] - a[i];
        let fij = if dl.norm() == 0.0 {
            -2.0 / ((a[i] + b) * (a[i] - b))
        } else {
            (ln1p(dl / (a[i] + b)) - ln1p(dl / (a[i] - b))) / (b * dl)
        };
        let fjk = (fv[j] - fv[k]) / (a[j] - a[k]);
        return (fij - fjk) / (a[i] - a[k]);
    }
    if far > 3.0 * sep {
        // g(w) = f[w, a_k], then g[a_i, a_j] by a Cauchy integral around the pair
        let r_in = 0.5 * sep;
        let r_out = seg_dist(m, b).min(far);
        if r_out > 4.0 * r_in {
            let rad = 0.5 * r_out;
            let mut s = C64::new(0.0, 0.0);
            for t in 0..n {
                let e = C64::from_polar(1.0, 2.0 * PI * (t as f64 + 0.5) / n as f64);
                let w = m + rad * e;
                let g = (f_single(w, b, false) - fv[k]) / (w - a[k]);
                s += g / ((w - a[i]) * (w - a[j])) * rad * e;
            }
            return s / n as f64;
        }
        return exact();
    }
    let c = (a[0] + a[1] + a[2]) / 3.0;
    let r_in = a.iter().map(|&x| (x - c).norm()).fold(0.0, f64::max);
    let r_out = seg_dist(c, b);
    if r_out > 4.0 * r_in.max(1e-300) {
        let rad = 0.5 * r_out;
        let mut s = C64::new(0.0, 0.0);
        for t in 0..n {
            let e = C64::from_polar(1.0, 2.0 * PI * (t as f64 + 0.5) / n as f64);
            let w = c + rad * e;
            s += f_single(w, b, false) / ((w - a[0]) * (w - a[1]) * (w - a[2])) * rad * e;
        }
        return s / n as f64;
    }
    exact()
}

/// Exchange kernel data for an ordered channel pair (α, β).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Exchange {
    pub c: f64,
    pub s2: f64,
    // 2π|s|³ times the coupling multiplicity
    pub pref: f64,
    pub beta_a2: f64,
    pub beta_b2: f64,
}

impl Exchange {
    pub fn new(c: f64, s: f64, beta_a: f64, beta_b: f64, mult: f64) -> Self {
        Self { c, s2: s * s, pref: mult * 2.0 * PI * s.abs().powi(3), beta_a2: beta_a * beta_a, beta_b2: beta_b * beta_b }
    }

    /// K_αβ(p, q; z) with principal logarithms; real p, q at real z take z + i0.
    pub fn eval(&self, p: C64, q: C64, z: C64) -> C64 {
        let (c, s2) = (self.c, self.s2);
        let (p2, q2) = (p * p, q * q);
        let a1 = q2 + c * c * p2 + s2 * self.beta_a2;
        let a2 = c * c * q2 + p2 + s2 * self.beta_b2;
        let a3 = p2 + q2 - s2 * z;
        let b = 2.0 * c * p * q;
        let presc = p.im == 0.0 && q.im == 0.0 && z.im == 0.0;
        self.pref * dd3([a1, a2, a3], b, presc)
    }

    /// K_αβ(√z x, √z y; z) in scaled variables; real x, y carry the −i0 rule on the
    /// free-resolvent factor.
    pub fn eval_scaled(&self, x: C64, y: C64, z: C64) -> C64 {
        let (c, s2) = (self.c, self.s2);
        let (x2, y2) = (x * x, y * y);
        let a1 = y2 + c * c * x2 + s2 * self.beta_a2 / z;
        let a2 = c * c * y2 + x2 + s2 * self.beta_b2 / z;
        let a3 = x2 + y2 - s2;
        let b = 2.0 * c * x * y;
        let presc = x.im == 0.0 && y.im == 0.0;
        self.pref * dd3([a1, a2, a3], b, presc) / (z * z * z)
    }

    /// Brute-force η quadrature of the same kernel (test oracle; off the singular set only).
    #[cfg(test)]
    pub fn eval_brute(&self, p: C64, q: C64, z: C64, n: usize) -> C64 {
        let gl = crate::contour::GaussLegendre::new(n);
        let (c, s2) = (self.c, self.s2);
        let mut acc = C64::new(0.0, 0.0);
        for (&e, &w) in gl.nodes.iter().zip(&gl.weights) {
            let dot = p * q * e;
            let ka2 = (q * q + c * c * p * p - 2.0 * c * dot) / s2;
            let kb2 = (c * c * q * q + p * p - 2.0 * c * dot) / s2;
            let g1 = 1.0 / (ka2 + self.beta_a2);
            let g2 = 1.0 / (kb2 + self.beta_b2);
            let r0 = 1.0 / (ka2 + p * p - z);
            acc += w * g1 * g2 * r0;
        }
        self.pref * acc / (s2 * s2 * s2)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_dd(a: [C64; 3], b: C64, n: usize) -> C64 {
        let gl = crate::contour::GaussLegendre::new(n);
        gl.nodes
            .iter()
            .zip(&gl.weights)
            .map(|(&e, &w)| w / ((a[0] - b * e) * (a[1] - b * e) * (a[2] - b * e)))
            .sum()
    }

    #[test]
    fn divided_difference_vs_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let b = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let mut a = [C64::new(0.0, 0.0); 3];
            for x in a.iter_mut() {
                // keep off the segment so brute force converges
                loop {
                    *x = C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                    if seg_dist(*x, b) > 1.5 * b.norm() {
                        break;
                    }
                }
            }
            // near-coincident pairs and triples
            match rng.gen_range(0..5) {
                4 => a[1] = a[0],
                1 => a[1] = a[0] + C64::new(1e-9, 3e-10),
                2 => a[2] = a[1] * (1.0 + 1e-7),
                3 => {
                    a[1] = a[0] + 1e-8;
                    a[2] = a[0] - C64::new(0.0, 2e-8);
                }
                _ => {}
            }
            let got = dd3(a, b, false);
            let want = brute_dd(a, b, 64);
            assert!((got - want).norm() <= 1e-11 * want.norm().max(1e-3), "{a:?} {b}: {got} vs {want}");
        }
    }

    #[test]
    fn prescription_matches_shifted_limit() {
        // a₂ inside (−b, b): compare with a₂ − iε by a fine Gauss rule split at the pole
        let b = C64::new(1.3, 0.0);
        let a = [C64::new(3.0, 0.4), C64::new(2.5, -0.2), C64::new(0.37, 0.0)];
        let got = dd3(a, b, true);
        let eps = 1e-12;
        let h = |e: f64| 1.0 / ((a[0] - b * e) * (a[1] - b * e));
        let e0 = a[2].re / b.re;
        // subtract the pole: ∫ (h(η) − h(η₀))/(a₂ − bη − iε) + h(η₀) f
        let gl = crate::contour::GaussLegendre::new(80);
        let mut s = C64::new(0.0, 0.0);
        for (&e, &w) in gl.nodes.iter().zip(&gl.weights) {
            s += w * (h(e) - h(e0)) / (a[2] - b * e - C64::new(0.0, eps));
        }
        let want = s + h(e0) * f_single(a[2], b, true);
        assert!((got - want).norm() < 1e-9 * want.norm(), "{got} vs {want}");
        // and f itself against the analytic ε-shift
        let e2 = C64::new(0.0, 1e-7);
        let fe = ((a[2] - e2 + b) / (a[2] - e2 - b)).ln() / b;
        assert!((fe - f_single(a[2], b, true)).norm() < 1e-6);
    }

    #[test]
    fn kernel_vs_brute_force() {
        let ex = Exchange::new(-0.5, 0.75f64.sqrt(), 1.0, 1.4, 1.0);
        let z = C64::new(-0.7, 0.2);
        for &(p, q) in &[(0.3, 0.8), (1.1, 0.2), (2.0, 2.0)] {
            let p = C64::new(p, -0.1);
            let q = C64::new(q, -0.05);
            let a = ex.eval(p, q, z);
            let b = ex.eval_brute(p, q, z, 96);
            assert!((a - b).norm() < 1e-11 * b.norm(), "{a} {b}");
        }
        // scaled form is the same function
        let z = C64::new(0.6, 0.3);
        let w = z.sqrt();
        let (x, y) = (C64::new(1.7, -0.4), C64::new(2.1, -0.3));
        let a = ex.eval_scaled(x, y, z);
        let b = ex.eval(w * x, w * y, z);
        assert!((a - b).norm() < 1e-12 * b.norm());
        // symmetry K_αβ(p, q) = K_βα(q, p)
        let ex2 = Exchange::new(-0.5, 0.75f64.sqrt(), 1.4, 1.0, 1.0);
        let p = C64::new(0.4, -0.1);
        let q = C64::new(0.9, -0.2);
        assert!((ex.eval(p, q, z) - ex2.eval(q, p, z)).norm() < 1e-14);
    }
}
