//! Root loci of the kernel denominators and the parabolic domain free of them.

use crate::{msqrt, Error, Result, C64};

/// Strict test Re z > λ/c² + c²/(4 s² |λ|) (Im z)².
pub fn parabola_contains(z: C64, lambda: f64, c: f64) -> bool {
    let c2 = c * c;
    let s2 = 1.0 - c2;
    z.re > lambda / c2 + c2 / (4.0 * s2 * lambda.abs()) * z.im * z.im
}

/// z − λ + ρ + 2c √(z−λ) √ρ η − s² z
pub fn quadr0_residual(z: C64, lambda: f64, rho: f64, eta: f64, c: f64) -> C64 {
    let s2 = 1.0 - c * c;
    z - lambda + rho + 2.0 * c * msqrt(z - lambda) * rho.sqrt() * eta - s2 * z
}

/// z − λ1 + z − λ2 + 2c √(z−λ1) √(z−λ2) η − s² z
pub fn quadr_residual(z: C64, l1: f64, l2: f64, c: f64, eta: f64) -> C64 {
    let s2 = 1.0 - c * c;
    2.0 * z - l1 - l2 + 2.0 * c * msqrt(z - l1) * msqrt(z - l2) * eta - s2 * z
}

/// z − λ + zν + 2c √z √(z−λ) √ν η − s² z
pub fn eq23_residual(z: C64, lambda: f64, c: f64, nu: f64, eta: f64) -> C64 {
    let s2 = 1.0 - c * c;
    z - lambda + z * nu + 2.0 * c * msqrt(z) * msqrt(z - lambda) * nu.sqrt() * eta - s2 * z
}

/// ρ + zν′ + 2c √z √ν′ √ρ η − s² z, unknown ρ.
pub fn quadrprime_residual(rho: C64, z: C64, c: f64, nu: f64, eta: f64) -> C64 {
    let s2 = 1.0 - c * c;
    rho + z * nu + 2.0 * c * msqrt(z) * nu.sqrt() * msqrt(rho) * eta - s2 * z
}

fn check_pair(l1: f64, l2: f64, c: f64) -> Result<()> {
    if !(l1 <= l2 && l2 < 0.0) {
        return Err(Error::Domain(format!("need λ1 ≤ λ2 < 0, got {l1}, {l2}")));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("need 0 < c < 1, got {c}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QuadrCase {
    Interval,
    Touching,
    Ellipse,
}

fn quadr_case(l1: f64, l2: f64, c: f64) -> QuadrCase {
    let r = l2.abs() - c * c * l1.abs();
    if r.abs() <= 1e-12 * l1.abs() {
        QuadrCase::Touching
    } else if r > 0.0 {
        QuadrCase::Interval
    } else {
        QuadrCase::Ellipse
    }
}

/// The two closed-form values z₊, z₋.
fn koren(l1: f64, l2: f64, c: f64, eta: f64) -> (C64, C64) {
    let c2 = c * c;
    let s2 = 1.0 - c2;
    let e2 = eta * eta;
    let d = c2 * e2 * (l1 * l2 * s2 * s2 - (l2 - l1).powi(2) * c2 * (1.0 - e2));
    let sq = C64::new(d, 0.0).sqrt();
    let num = (1.0 + c2 - 2.0 * c2 * e2) * (l1 + l2);
    let den = (1.0 + c2).powi(2) - 4.0 * c2 * e2;
    ((num + 2.0 * sq) / den, (num - 2.0 * sq) / den)
}

/// |η*| where the two real roots merge in the ellipse case; the complex pair exists
/// for −|η*| < η < 0.
pub fn eta_star(l1: f64, l2: f64, c: f64) -> f64 {
    let rho = l2.abs() / l1.abs();
    let c2 = c * c;
    (c2 - rho).sqrt() * (1.0 - c2 * rho).sqrt() / (c * (1.0 - rho))
}

/// Roots z of the two-threshold equation for one value of η.
pub fn quadr_roots(l1: f64, l2: f64, c: f64, eta: f64) -> Result<Vec<C64>> {
    check_pair(l1, l2, c)?;
    if !(-1.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("η = {eta} outside [-1, 1]")));
    }
    let (zp, zm) = koren(l1, l2, c, eta);
    let out = match quadr_case(l1, l2, c) {
        QuadrCase::Interval => {
            if eta > 0.0 {
                vec![zp]
            } else {
                vec![zm]
            }
        }
        QuadrCase::Touching => {
            let mut v = vec![C64::new(l1, 0.0)];
            if eta <= 0.0 && (zm - l1).norm() > 1e-12 * l1.abs() {
                v.push(zm);
            }
            v
        }
        QuadrCase::Ellipse => {
            if eta > 0.0 {
                vec![]
            } else if eta == 0.0 {
                vec![zp]
            } else if eta <= -eta_star(l1, l2, c) {
                vec![C64::new(zp.re, 0.0), C64::new(zm.re, 0.0)]
            } else {
                vec![zp, zm]
            }
        }
    };
    Ok(out)
}

/// Set swept by the roots of a kernel denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootLocus {
    /// Real interval [lo, hi].
    Interval { lo: f64, hi: f64 },
    /// Real interval plus the closed curve of an ellipse centred on the real axis.
    IntervalEllipse { lo: f64, hi: f64, center: f64, a: f64, b: f64 },
    /// Ray (−∞, ray_end] plus the closed disk |z − center| ≤ radius.
    RayPlusDisk { ray_end: f64, center: f64, radius: f64 },
    /// Segment [0, end] plus the closed disk |ρ| ≤ radius.
    SegmentPlusDisk { end: C64, radius: f64 },
}

fn dist_interval(z: C64, lo: f64, hi: f64) -> f64 {
    let x = z.re.clamp(lo, hi);
    (z - x).norm()
}

fn dist_segment(z: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let n = d.norm_sqr();
    if n == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / n).clamp(0.0, 1.0);
    (z - (a + d * t)).norm()
}

/// Distance to the ellipse curve ((x−x0)/a)² + (y/b)² = 1.
fn dist_ellipse(z: C64, x0: f64, a: f64, b: f64) -> f64 {
    if (a - b).abs() <= 1e-14 * a.max(b) {
        return ((z - x0).norm() - a).abs();
    }
    let f = |t: f64| (z - C64::new(x0 + a * t.cos(), b * t.sin())).norm();
    let n = 720;
    let h = std::f64::consts::TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for k in 0..n {
        let t = k as f64 * h;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // golden-section refine
    let (mut lo, mut hi) = (best_t - h, best_t + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1) < f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    f(0.5 * (lo + hi)).min(best)
}

impl RootLocus {
    /// Euclidean distance from z to the locus.
    pub fn distance(&self, z: C64) -> f64 {
        match *self {
            RootLocus::Interval { lo, hi } => dist_interval(z, lo, hi),
            RootLocus::IntervalEllipse { lo, hi, center, a, b } => {
                dist_interval(z, lo, hi).min(dist_ellipse(z, center, a, b))
            }
            RootLocus::RayPlusDisk { ray_end, center, radius } => {
                let dr = if z.re <= ray_end { z.im.abs() } else { (z - ray_end).norm() };
                dr.min(((z - center).norm() - radius).max(0.0))
            }
            RootLocus::SegmentPlusDisk { end, radius } => {
                dist_segment(z, C64::new(0.0, 0.0), end).min((z.norm() - radius).max(0.0))
            }
        }
    }

    /// True when z is on the locus or in a region it encloses (ellipse interior,
    /// disks). Boundary points count as blocked.
    pub fn blocks(&self, z: C64) -> bool {
        let on = self.distance(z) == 0.0;
        match *self {
            RootLocus::IntervalEllipse { center, a, b, .. } => {
                on || ((z.re - center) / a).powi(2) + (z.im / b).powi(2) <= 1.0
            }
            _ => on,
        }
    }
}

/// Locus of the two-threshold equation as η sweeps [−1, 1].
pub fn locus_quadr(l1: f64, l2: f64, c: f64) -> Result<RootLocus> {
    check_pair(l1, l2, c)?;
    let (a1, a2) = (l1.abs(), l2.abs());
    let c2 = c * c;
    let s2 = 1.0 - c2;
    let lo = (-a1 - a2 - 2.0 * c * (a1 * a2).sqrt()) / s2;
    let hi = (-a1 - a2 + 2.0 * c * (a1 * a2).sqrt()) / s2;
    Ok(match quadr_case(l1, l2, c) {
        QuadrCase::Interval => RootLocus::Interval { lo, hi },
        QuadrCase::Touching => RootLocus::Interval { lo, hi: l1 },
        QuadrCase::Ellipse => {
            let rho = a2 / a1;
            let center = -a1 * (1.0 + (c2 - rho).powi(2) / (s2 * (1.0 + c2) * (1.0 + rho)));
            let a = a1 * (c2 - rho) * (1.0 - c2 * rho) / ((1.0 + c2) * s2 * (1.0 + rho));
            // the complex roots sweep a curve with equal half-axes
            RootLocus::IntervalEllipse { lo, hi, center, a, b: a }
        }
    })
}

/// Locus of the channel/breakup equation: ray plus disk.
pub fn locus_eq23(lambda: f64, c: f64) -> Result<RootLocus> {
    if !(lambda < 0.0) {
        return Err(Error::Domain(format!("need λ < 0, got {lambda}")));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::Domain(format!("need 0 ≤ c < 1, got {c}")));
    }
    let c4 = c.powi(4);
    Ok(RootLocus::RayPlusDisk {
        ray_end: lambda / (1.0 + c4),
        center: lambda / (1.0 - c4),
        radius: c * c * lambda.abs() / (1.0 - c4),
    })
}

/// Locus in the spectator variable ρ for an on-shell breakup argument: segment plus disk.
pub fn locus_quadrprime(z: C64, c: f64) -> Result<RootLocus> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("need 0 < c < 1, got {c}")));
    }
    Ok(RootLocus::SegmentPlusDisk { end: z, radius: c * c * z.norm() })
}
