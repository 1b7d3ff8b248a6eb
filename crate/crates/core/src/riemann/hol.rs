//! Domains on which the continued three-body kernels are holomorphic.

use super::loci::{locus_eq23, locus_quadr, parabola_contains};
use super::{MultiIndex, ThresholdSet};
use crate::C64;

/// Data needed for domain membership: thresholds, kinematic coefficients and
/// the strip half-width of the potentials (`None` for entire-class potentials).
#[derive(Debug, Clone, PartialEq)]
pub struct HolGeometry {
    pub thresholds: ThresholdSet,
    /// c[α−1][β−1] for α ≠ β; diagonal ignored.
    pub c: [[f64; 3]; 3],
    pub b: Option<f64>,
}

impl HolGeometry {
    fn cc(&self, a: u8, b: u8) -> f64 {
        self.c[(a - 1) as usize][(b - 1) as usize]
    }
}

fn strip_parabola(z: C64, shift: f64, s2b2: f64) -> bool {
    z.re > shift - s2b2 + z.im * z.im / (4.0 * s2b2)
}

/// Membership of z in the holomorphy domain of sheet `l`. Boundaries are excluded.
pub fn pihol_membership(z: C64, l: &MultiIndex, geom: &HolGeometry) -> bool {
    let ts = &geom.thresholds;
    if l.validate(ts).is_err() || !z.re.is_finite() || !z.im.is_finite() {
        return false;
    }
    let cut_start = ts.lambda_min().unwrap_or(0.0);
    if z.im == 0.0 && z.re >= cut_start {
        return false;
    }
    match l.l0 {
        1 if z.im <= 0.0 => return false,
        -1 if z.im >= 0.0 => return false,
        _ => {}
    }
    let flagged: Vec<_> = ts.entries().iter().filter(|t| l.flag(t.alpha, t.j) == 1).collect();
    for t in &flagged {
        for a in 1..=3u8 {
            if a == t.alpha {
                continue;
            }
            let c = geom.cc(a, t.alpha);
            if !parabola_contains(z, t.lambda, c) {
                return false;
            }
            if let Some(b) = geom.b {
                if !strip_parabola(z, t.lambda, (1.0 - c * c) * b * b) {
                    return false;
                }
            }
        }
    }
    for t1 in &flagged {
        for t2 in &flagged {
            if t1.alpha >= t2.alpha {
                continue;
            }
            let (l1, l2) = if t1.lambda <= t2.lambda { (t1.lambda, t2.lambda) } else { (t2.lambda, t1.lambda) };
            match locus_quadr(l1, l2, geom.cc(t1.alpha, t2.alpha).abs()) {
                Ok(loc) if !loc.blocks(z) => {}
                _ => return false,
            }
        }
    }
    if l.l0 != 0 {
        for t in ts.entries() {
            for bta in 1..=3u8 {
                if bta == t.alpha {
                    continue;
                }
                let c = geom.cc(t.alpha, bta).abs();
                if let Ok(super::RootLocus::RayPlusDisk { center, radius, .. }) = locus_eq23(t.lambda, c) {
                    if (z - center).norm() <= radius {
                        return false;
                    }
                }
            }
        }
        if let Some(b) = geom.b {
            for a in 1..=3u8 {
                for bta in 1..=3u8 {
                    if a == bta {
                        continue;
                    }
                    let c = geom.cc(a, bta).abs();
                    let s2 = 1.0 - c * c;
                    let k = (1.0 + c).powi(2);
                    if !(z.re > -s2 * b * b / k + k * z.im * z.im / (4.0 * s2 * b * b)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
