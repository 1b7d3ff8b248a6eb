//! Three-body sector for rank-one separable (Yamaguchi) pair potentials.
//!
//! The AGS amplitudes 𝒳_αβ(p, p′; z) solve
//!   𝒳 = −K − K τ 𝒳,   (K u)(p) = ∫ q² dq K(p, q) u(q),
//! with τ_α(z − q²) the pair propagator of `twobody::yamaguchi`. The full
//! channel-space operator is 𝕏 = τ + τ𝒳τ = (τ⁻¹ + K)⁻¹.

mod continuation;
mod grid;
mod kernel;
mod kinematics;
mod smatrix;
mod solver;

pub use continuation::{
    continue_m, continue_m_at, continue_r_form, continue_s, continue_s_at, find_resonances_3b, normalized_det, ring_probe_m,
    three_body_bound_states, ChannelFn, RingProbe3, Resonance3, ResonanceSearch3, TestState,
};
pub use kinematics::{jacobi_coeffs, JacobiCoeffs};
pub use smatrix::{assemble_t, truncated_smatrix, AmplitudeSet, TruncatedSMatrix, Variant};
pub use solver::{effective_solve, Faddeev, FaddeevOptions};

use crate::riemann::{Threshold, ThresholdSet};
use crate::twobody::{yamaguchi, PairPotential};
use crate::{Error, Result, C64};

/// A pair bound state: energy λ, binding momentum and the form-factor normalisation N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimer {
    pub lambda: f64,
    pub kappa: f64,
    pub norm: f64,
}

/// Yamaguchi parameters of one pair, indexed by its spectator α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairData {
    pub strength: f64,
    pub beta: f64,
    pub dimer: Option<Dimer>,
}

impl PairData {
    pub fn active(&self) -> bool {
        self.strength != 0.0
    }

    pub fn tau(&self, zeta: C64) -> C64 {
        yamaguchi::tau(zeta, self.strength, self.beta)
    }

    pub fn g(&self, k2: C64) -> C64 {
        1.0 / (k2 + self.beta * self.beta)
    }
}

/// Three particles with Yamaguchi pair interactions. `pairs[α]` acts in the pair
/// that excludes particle α.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeBodySystem {
    pub masses: [f64; 3],
    pub potentials: [PairPotential; 3],
    pub coeffs: JacobiCoeffs,
    pub thresholds: ThresholdSet,
    /// narrowest holomorphy strip of the form factors
    pub strip: f64,
    pub pairs: [PairData; 3],
    /// identical bosons: work in the symmetric sector with one channel
    pub bosons: bool,
}

impl ThreeBodySystem {
    pub fn new(masses: [f64; 3], potentials: [PairPotential; 3]) -> Result<Self> {
        Self::build(masses, potentials, false)
    }

    /// Three identical bosons of unit mass.
    pub fn identical_bosons(strength: f64, beta: f64) -> Result<Self> {
        let v = PairPotential::Yamaguchi { strength, beta };
        Self::build([1.0; 3], [v; 3], true)
    }

    fn build(masses: [f64; 3], potentials: [PairPotential; 3], bosons: bool) -> Result<Self> {
        let coeffs = jacobi_coeffs(masses)?;
        let mut pairs = [PairData { strength: 0.0, beta: 1.0, dimer: None }; 3];
        let mut entries = Vec::new();
        let mut strip = f64::INFINITY;
        for (a, v) in potentials.iter().enumerate() {
            v.validate()?;
            let PairPotential::Yamaguchi { strength, beta } = *v else {
                return Err(Error::Domain("three-body sector takes separable (Yamaguchi) pairs only".into()));
            };
            let dimer = yamaguchi::bound_kappa(strength, beta).map(|k| Dimer {
                lambda: -k * k,
                kappa: k,
                norm: yamaguchi::form_norm(k, beta),
            });
            if let Some(d) = dimer {
                entries.push(Threshold { alpha: a as u8 + 1, j: 1, lambda: d.lambda });
            }
            if strength != 0.0 {
                strip = strip.min(beta);
            }
            pairs[a] = PairData { strength, beta, dimer };
        }
        let thresholds = ThresholdSet::new(entries)?;
        Ok(Self { masses, potentials, coeffs, thresholds, strip, pairs, bosons })
    }
}
