//! Scaled Jacobi momenta and the kinematic rotation between pairings.
//!
//! For pair α = (β, γ) (cyclic) in the centre-of-mass frame
//!   k_α = (m_γ P_β − m_β P_γ) / (m_β + m_γ) / √(2μ_α),   p_α = −P_α / √(2ν_α),
//! so that Σ P_i²/2m_i = k_α² + p_α² for every α.

use crate::{Error, Result};

/// Rotation coefficients: k_α = c k_β + s p_β, p_α = −s k_β + c p_β.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoeffs {
    pub masses: [f64; 3],
    pub c: [[f64; 3]; 3],
    pub s: [[f64; 3]; 3],
    // (k_α, p_α) = maps[α] · (P_1, P_2), componentwise
    maps: [[[f64; 2]; 2]; 3],
}

fn pair_of(alpha: usize) -> (usize, usize) {
    ((alpha + 1) % 3, (alpha + 2) % 3)
}

pub fn jacobi_coeffs(masses: [f64; 3]) -> Result<JacobiCoeffs> {
    if masses.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::Domain(format!("masses must be positive, got {masses:?}")));
    }
    let total: f64 = masses.iter().sum();
    // each momentum as coefficients on (P_1, P_2), P_3 = −P_1 − P_2
    let mom = |i: usize| -> [f64; 2] {
        match i {
            0 => [1.0, 0.0],
            1 => [0.0, 1.0],
            _ => [-1.0, -1.0],
        }
    };
    let mut maps = [[[0.0; 2]; 2]; 3];
    for a in 0..3 {
        let (b, g) = pair_of(a);
        let (mb, mg) = (masses[b], masses[g]);
        let mu = mb * mg / (mb + mg);
        let nu = masses[a] * (mb + mg) / total;
        let (pb, pg, pa) = (mom(b), mom(g), mom(a));
        for i in 0..2 {
            maps[a][0][i] = (mg * pb[i] - mb * pg[i]) / (mb + mg) / (2.0 * mu).sqrt();
            maps[a][1][i] = -pa[i] / (2.0 * nu).sqrt();
        }
    }
    let mut c = [[0.0; 3]; 3];
    let mut s = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            // O = M_a M_b⁻¹
            let mb = maps[b];
            let det = mb[0][0] * mb[1][1] - mb[0][1] * mb[1][0];
            let inv = [[mb[1][1] / det, -mb[0][1] / det], [-mb[1][0] / det, mb[0][0] / det]];
            let ma = maps[a];
            let o00 = ma[0][0] * inv[0][0] + ma[0][1] * inv[1][0];
            let o01 = ma[0][0] * inv[0][1] + ma[0][1] * inv[1][1];
            c[a][b] = o00;
            s[a][b] = o01;
        }
    }
    Ok(JacobiCoeffs { masses, c, s, maps })
}

impl JacobiCoeffs {
    /// Jacobi pair (k_α, p_α) of pairing `alpha` from particle momenta P_1, P_2
    /// (P_3 = −P_1 − P_2).
    pub fn from_momenta(&self, alpha: usize, p1: [f64; 3], p2: [f64; 3]) -> ([f64; 3], [f64; 3]) {
        let m = self.maps[alpha];
        let mut k = [0.0; 3];
        let mut p = [0.0; 3];
        for i in 0..3 {
            k[i] = m[0][0] * p1[i] + m[0][1] * p2[i];
            p[i] = m[1][0] * p1[i] + m[1][1] * p2[i];
        }
        (k, p)
    }

    /// (k_α, p_α) from (k_β, p_β) by the c, s rotation.
    pub fn rotate(&self, alpha: usize, beta: usize, k: [f64; 3], p: [f64; 3]) -> ([f64; 3], [f64; 3]) {
        let (c, s) = (self.c[alpha][beta], self.s[alpha][beta]);
        let mut ka = [0.0; 3];
        let mut pa = [0.0; 3];
        for i in 0..3 {
            ka[i] = c * k[i] + s * p[i];
            pa[i] = -s * k[i] + c * p[i];
        }
        (ka, pa)
    }

    /// Angle γ ∈ (0, π/2) with c = −cos γ, |s| = sin γ.
    pub fn angle(&self, alpha: usize, beta: usize) -> f64 {
        self.s[alpha][beta].abs().atan2(-self.c[alpha][beta])
    }
}
