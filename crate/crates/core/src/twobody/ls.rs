use super::potential::{yamaguchi, PairPotential};
use crate::contour::{RadialRule, MAX_ROTATION};
use crate::linalg::{CMat, CVec};
use crate::{msqrt, Error, Result, C64};
use nalgebra::{Dyn, LU};
use std::f64::consts::PI;

/// Numerical settings for the Nyström solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LsOptions {
    pub rule: RadialRule,
    /// default rotation magnitude of the momentum contour
    pub theta: f64,
}

impl LsOptions {
    /// Defaults per potential class: the Yukawa kernel decays slowly and needs a
    /// much longer, denser ray than the separable one.
    pub fn for_potential(pot: &PairPotential) -> Self {
        match pot {
            PairPotential::Yamaguchi { .. } => Self::default(),
            PairPotential::Yukawa { .. } => Self { rule: RadialRule::with_panels(48, 16, 64.0), theta: 0.3 },
        }
    }
}

impl Default for LsOptions {
    fn default() -> Self {
        Self { rule: RadialRule::new(256, 8.0), theta: 0.3 }
    }
}

/// Off-shell s-wave T-matrix t(k, k′; z) from a Nyström solve on a rotated ray.
#[derive(Debug, Clone)]
pub struct OffShellT {
    pub z: C64,
    pub sheet: u8,
    pub theta: f64,
    pub nodes: Vec<C64>,
    /// 4π w q² / (q² − z)
    pub dmeasure: Vec<C64>,
    pub values: CMat,
    pub potential: PairPotential,
    /// closed-form channel function for separable potentials
    pub closed_tau: Option<C64>,
    lu: LU<C64, Dyn, Dyn>,
}

/// Ray angle for the solve at z on `sheet`. Nodes are x e^{−iθ}.
pub fn contour_angle(z: C64, sheet: u8, theta0: f64) -> Result<f64> {
    let th = match sheet {
        0 => {
            if z.im > 0.0 {
                theta0
            } else if z.im < 0.0 {
                -theta0
            } else if z.re < 0.0 {
                0.0
            } else {
                return Err(Error::OnCut(format!("z = {} on [0, ∞)", z.re)));
            }
        }
        1 => {
            if z.im < 0.0 {
                let pole = -msqrt(z);
                theta0.max(-pole.arg() + 0.25)
            } else if z.im > 0.0 {
                -(theta0.max(msqrt(z).arg() + 0.25))
            } else {
                return Err(Error::OnCut("direct second-sheet solve needs Im z ≠ 0".into()));
            }
        }
        _ => return Err(Error::Domain(format!("sheet {sheet} not 0 or 1"))),
    };
    if th.abs() > MAX_ROTATION {
        return Err(Error::Path(format!("needed rotation {th} exceeds {MAX_ROTATION}")));
    }
    Ok(th)
}

/// ∫ 4π q² v₀(k, q) / (q² − z) dq along the ray q = x e^{−iθ}, on panels graded
/// toward the singularities of the integrand.
fn row_integral(pot: &PairPotential, k: C64, z: C64, theta: f64) -> C64 {
    let e = C64::from_polar(1.0, -theta);
    let ebar = e.conj();
    let mu = pot.strip().map(|b| 2.0 * b).unwrap_or(1.0);
    let iu = C64::new(0.0, mu);
    let w = msqrt(z);
    let sing = [(k + iu) * ebar, (k - iu) * ebar, (-k + iu) * ebar, (-k - iu) * ebar, w * ebar, -w * ebar];
    let (xs, ws) = crate::contour::graded_half_line(&sing);
    xs.iter()
        .zip(&ws)
        .map(|(&x, &wt)| {
            let q = e * x;
            wt * 4.0 * PI * e * q * q * pot.v0(k, q) / (q * q - z)
        })
        .sum()
}

impl OffShellT {
    /// t(k, k′) for arbitrary complex momenta (Nyström extension).
    pub fn eval(&self, k: C64, kp: C64) -> C64 {
        let n = self.nodes.len();
        let b = CVec::from_fn(n, |i, _| self.potential.v0(self.nodes[i], kp));
        let x = self.lu.solve(&b).expect("factorisation checked at construction");
        let mut s = self.potential.v0(k, kp);
        let mut sum_v = C64::new(0.0, 0.0);
        for j in 0..n {
            let w = self.dmeasure[j] * self.potential.v0(k, self.nodes[j]);
            s -= w * x[j];
            sum_v += w;
        }
        if self.potential.is_separable() {
            s
        } else {
            // same diagonal subtraction as in the solve
            s / (1.0 + row_integral(&self.potential, k, self.z, self.theta) - sum_v)
        }
    }

    /// Integral 4π ∫ q² dq t(k, q) f(q) / (q² − z) along the solve contour.
    pub fn apply_right(&self, k: C64, f: &dyn Fn(C64) -> C64) -> C64 {
        let n = self.nodes.len();
        // t(k, q_j) by symmetry from columns: t(q_j, k)
        let b = CVec::from_fn(n, |i, _| self.potential.v0(self.nodes[i], k));
        let x = self.lu.solve(&b).expect("factorisation checked at construction");
        (0..n).map(|j| self.dmeasure[j] * x[j] * f(self.nodes[j])).sum()
    }
}

/// Solve t = v − v r₀ t on `sheet` (0 physical, 1 by direct contour deformation).
pub fn solve_ls_sheet(pot: &PairPotential, z: C64, sheet: u8, opts: &LsOptions) -> Result<OffShellT> {
    pot.validate()?;
    let theta = contour_angle(z, sheet, opts.theta)?;
    let e = C64::from_polar(1.0, -theta);
    let nodes: Vec<C64> = opts.rule.nodes.iter().map(|&x| e * x).collect();
    let dmeasure: Vec<C64> = nodes
        .iter()
        .zip(&opts.rule.weights)
        .map(|(&q, &w)| 4.0 * PI * e * w * q * q / (q * q - z))
        .collect();
    let n = nodes.len();
    let v = CMat::from_fn(n, n, |i, j| pot.v0(nodes[i], nodes[j]));
    let mut a = CMat::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] += v[(i, j)] * dmeasure[j];
        }
    }
    if !pot.is_separable() {
        // subtract t(q_i) under the integral: the near-diagonal ridge of v₀ is
        // narrower than the node spacing at large q
        for i in 0..n {
            let s: C64 = (0..n).map(|j| v[(i, j)] * dmeasure[j]).sum();
            a[(i, i)] += row_integral(pot, nodes[i], z, theta) - s;
        }
    }
    let lu = a.lu();
    let values = lu.solve(&v).ok_or_else(|| Error::singular(z, "Lippmann–Schwinger kernel at a bound state"))?;
    let closed_tau = match *pot {
        PairPotential::Yamaguchi { strength, beta } => Some(if sheet == 0 {
            yamaguchi::tau(z, strength, beta)
        } else {
            yamaguchi::tau_second(z, strength, beta)
        }),
        _ => None,
    };
    Ok(OffShellT { z, sheet, theta, nodes, dmeasure, values, potential: *pot, closed_tau, lu })
}

/// Physical-sheet solve.
pub fn solve_ls(pot: &PairPotential, z: C64, opts: &LsOptions) -> Result<OffShellT> {
    solve_ls_sheet(pot, z, 0, opts)
}

/// det(I + v r₀) on the real axis below threshold (real for real z < 0).
pub fn fredholm_det(pot: &PairPotential, e: f64, opts: &LsOptions) -> f64 {
    let n = opts.rule.nodes.len();
    let q = &opts.rule.nodes;
    let z = e;
    let d: Vec<f64> = q.iter().zip(&opts.rule.weights).map(|(&q, &w)| 4.0 * PI * w * q * q / (q * q - z)).collect();
    let a = CMat::from_fn(n, n, |i, j| {
        let v = pot.v0(C64::new(q[i], 0.0), C64::new(q[j], 0.0)) * d[j];
        if i == j {
            v + 1.0
        } else {
            v
        }
    });
    crate::linalg::det(&a).re
}
