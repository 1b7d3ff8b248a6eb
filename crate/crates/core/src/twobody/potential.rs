use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Pair potential, s-wave.
///
/// `Yamaguchi`: v(k, k′) = −strength · g(k) g(k′), g(k) = 1/(k² + β²); positive strength attracts.
/// `Yukawa`: v(k − k′) = coupling / (|k − k′|² + μ²), holomorphic in the strip |Im| < μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPotential {
    Yamaguchi { strength: f64, beta: f64 },
    Yukawa { coupling: f64, mu: f64 },
}

impl PairPotential {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PairPotential::Yamaguchi { strength, beta } => {
                if !(beta > 0.0) || !strength.is_finite() {
                    return Err(Error::Domain(format!("bad Yamaguchi parameters ({strength}, {beta})")));
                }
            }
            PairPotential::Yukawa { coupling, mu } => {
                if !(mu > 0.0) || !coupling.is_finite() {
                    return Err(Error::Domain(format!("bad Yukawa parameters ({coupling}, {mu})")));
                }
            }
        }
        Ok(())
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, PairPotential::Yamaguchi { .. })
    }

    /// Strip half-width of holomorphy in momentum, `None` if entire off isolated poles.
    pub fn strip(&self) -> Option<f64> {
        match *self {
            PairPotential::Yamaguchi { beta, .. } => Some(beta),
            PairPotential::Yukawa { mu, .. } => Some(0.5 * mu),
        }
    }

    /// Angle-averaged kernel v₀(k, k′) = ½ ∫ dη v.
    pub fn v0(&self, k: C64, kp: C64) -> C64 {
        match *self {
            PairPotential::Yamaguchi { strength, beta } => -strength * yam_g(k, beta) * yam_g(kp, beta),
            PairPotential::Yukawa { coupling, mu } => {
                let m2 = mu * mu;
                let kk = k * kp;
                if kk.norm() < 1e-8 * (k.norm_sqr() + kp.norm_sqr() + m2) {
                    return coupling / (k * k + kp * kp + m2);
                }
                let a = (k + kp) * (k + kp) + m2;
                let b = (k - kp) * (k - kp) + m2;
                // log of the ratio: the η-segment image never winds around 0
                coupling * (a / b).ln() / (4.0 * kk)
            }
        }
    }
}

pub(crate) fn yam_g(k: C64, beta: f64) -> C64 {
    1.0 / (k * k + beta * beta)
}

/// Closed forms for the Yamaguchi pair, κ = −i√z with the physical-sheet root.
pub mod yamaguchi {
    use super::*;
    use crate::msqrt;

    pub fn kappa(z: C64) -> C64 {
        -C64::i() * msqrt(z)
    }

    /// ∫ d³q g(q)² / (q² − z) on the physical sheet.
    pub fn loop_j(z: C64, beta: f64) -> C64 {
        let b = beta;
        PI * PI / (b * (b + kappa(z)).powi(2))
    }

    /// Same integral continued through the cut onto the second sheet.
    pub fn loop_j_second(z: C64, beta: f64) -> C64 {
        let b = beta;
        PI * PI / (b * (b - kappa(z)).powi(2))
    }

    pub fn tau(z: C64, strength: f64, beta: f64) -> C64 {
        -strength / (1.0 - strength * loop_j(z, beta))
    }

    pub fn tau_second(z: C64, strength: f64, beta: f64) -> C64 {
        -strength / (1.0 - strength * loop_j_second(z, beta))
    }

    /// Binding momentum if a bound state exists.
    pub fn bound_kappa(strength: f64, beta: f64) -> Option<f64> {
        if strength <= 0.0 {
            return None;
        }
        let k = (strength * PI * PI / beta).sqrt() - beta;
        (k > 0.0).then_some(k)
    }

    /// φ = n·g normalisation with ⟨ψ, ψ⟩ = 1, ψ = −φ/(k² − λ).
    pub fn form_norm(kappa_b: f64, beta: f64) -> f64 {
        (beta * kappa_b * (beta + kappa_b).powi(3)).sqrt() / PI
    }

    /// s₀ on the physical sheet.
    pub fn s0(z: C64, strength: f64, beta: f64) -> C64 {
        let w = msqrt(z);
        let x = 4.0 * PI * yam_g(w, beta).powi(2);
        1.0 + crate::contour::a0(z) * x * tau(z, strength, beta)
    }
}
