//! Pair subsystem: Lippmann–Schwinger T-matrix, bound states, s-wave S-matrix,
//! second-sheet representations built from physical-sheet data, resonance search.

mod ls;
mod potential;

pub use ls::{contour_angle, fredholm_det, solve_ls, solve_ls_sheet, LsOptions, OffShellT};
pub use potential::{yamaguchi, PairPotential};

use crate::contour::a0;
use crate::roots::{box_search, ring_pole, winding, Rect};
use crate::{msqrt, Error, Result, C64};
use std::f64::consts::PI;

/// One bound level with its form factor sampled on the solve grid.
#[derive(Debug, Clone)]
pub struct BoundLevel {
    pub lambda: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    potential: PairPotential,
    /// set when |λ| is below what the grid resolves
    pub near_threshold: bool,
}

impl BoundLevel {
    /// φ(k) = −∫ d³q v(k, q) φ(q) / (q² − λ)
    pub fn phi(&self, k: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for ((&q, &w), &p) in self.nodes.iter().zip(&self.weights).zip(&self.phi) {
            s -= 4.0 * PI * w * q * q * self.potential.v0(k, C64::new(q, 0.0)) * p / (q * q - self.lambda);
        }
        s
    }

    /// ψ(k) = −φ(k)/(k² − λ)
    pub fn psi(&self, k: C64) -> C64 {
        -self.phi(k) / (k * k - self.lambda)
    }

    pub fn grid_phi(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.phi)
    }
}

/// Discrete spectrum of a pair Hamiltonian.
#[derive(Debug, Clone, Default)]
pub struct PairSpectrum {
    pub levels: Vec<BoundLevel>,
}

/// Bound states from sign changes of det(I + v r₀(E)) on a log grid in (−e_max, 0),
/// refined by bisection.
pub fn bound_states(pot: &PairPotential, opts: &LsOptions, e_max: f64) -> Result<PairSpectrum> {
    pot.validate()?;
    let n_scan = 200;
    let e_min = 1e-8_f64;
    let grid: Vec<f64> =
        (0..=n_scan).map(|k| -e_max * (e_min / e_max).powf(k as f64 / n_scan as f64)).collect();
    let dets: Vec<f64> = grid.iter().map(|&e| fredholm_det(pot, e, opts)).collect();
    let mut levels = Vec::new();
    for k in 0..n_scan {
        if dets[k] == 0.0 || dets[k].signum() != dets[k + 1].signum() {
            let (mut lo, mut hi) = (grid[k], grid[k + 1]);
            let mut flo = dets[k];
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (hi - lo).abs() <= 4.0 * f64::EPSILON * mid.abs() {
                    break;
                }
                let fm = fredholm_det(pot, mid, opts);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let lambda = 0.5 * (lo + hi);
            levels.push(make_level(pot, lambda, opts));
        }
    }
    levels.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    Ok(PairSpectrum { levels })
}

fn make_level(pot: &PairPotential, lambda: f64, opts: &LsOptions) -> BoundLevel {
    let q = &opts.rule.nodes;
    let w = &opts.rule.weights;
    let n = q.len();
    let a = crate::linalg::CMat::from_fn(n, n, |i, j| {
        let v = pot.v0(C64::new(q[i], 0.0), C64::new(q[j], 0.0)) * (4.0 * PI * w[j] * q[j] * q[j] / (q[j] * q[j] - lambda));
        if i == j {
            v + 1.0
        } else {
            v
        }
    });
    let (_, v) = crate::linalg::null_direction(&a);
    // fix the phase so φ is real and positive at the first node
    let ph = v[0] / v[0].norm();
    let mut phi: Vec<f64> = v.iter().map(|x| (x / ph).re).collect();
    let norm: f64 = (0..n).map(|j| 4.0 * PI * w[j] * q[j] * q[j] * phi[j] * phi[j] / (q[j] * q[j] - lambda).powi(2)).sum();
    let s = 1.0 / norm.sqrt();
    phi.iter_mut().for_each(|p| *p *= s);
    let resolution = (q[0] * q[0]).max(1e-10);
    BoundLevel {
        lambda,
        nodes: q.clone(),
        weights: w.clone(),
        phi,
        potential: *pot,
        near_threshold: lambda.abs() < resolution,
    }
}

/// Partial-wave S-matrix value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialWaveS {
    pub ell: u32,
    pub value: C64,
    pub sheet: u8,
}

/// Fast Nyström route for rank-1 separable kernels: quadrature of the loop integral
/// on the same contour the full solve would use.
fn separable_tau(strength: f64, beta: f64, z: C64, theta: f64, opts: &LsOptions) -> C64 {
    let e = C64::from_polar(1.0, -theta);
    let mut j = C64::new(0.0, 0.0);
    for (&x, &w) in opts.rule.nodes.iter().zip(&opts.rule.weights) {
        let q = e * x;
        let g = 1.0 / (q * q + beta * beta);
        j += 4.0 * PI * e * w * q * q * g * g / (q * q - z);
    }
    -strength / (1.0 - strength * j)
}

/// On-shell t(√z, √z; z) on the physical sheet; `edge` treats real z > 0 as z + i0.
fn t_on_shell(pot: &PairPotential, z: C64, opts: &LsOptions) -> Result<C64> {
    let w = msqrt(z);
    let theta = if z.im == 0.0 && z.re > 0.0 { opts.theta } else { contour_angle(z, 0, opts.theta)? };
    match *pot {
        PairPotential::Yamaguchi { strength, beta } => {
            let g = 1.0 / (w * w + beta * beta);
            Ok(g * g * separable_tau(strength, beta, z, theta, opts))
        }
        _ => {
            let t = if z.im == 0.0 && z.re > 0.0 { solve_edge(pot, z.re, opts)? } else { solve_ls(pot, z, opts)? };
            Ok(t.eval(w, w))
        }
    }
}

fn solve_edge(pot: &PairPotential, e: f64, opts: &LsOptions) -> Result<OffShellT> {
    // a downward-rotated contour reproduces the upper-edge limit; the tiny
    // imaginary part only selects that orientation
    solve_ls_sheet(pot, C64::new(e, 1e-300), 0, opts)
}

/// s₀(z) = 1 + a₀(z) 4π t(√z, √z; z); real z > 0 means the upper edge of the cut.
pub fn smatrix(pot: &PairPotential, z: C64, opts: &LsOptions) -> Result<PartialWaveS> {
    let t = t_on_shell(pot, z, opts)?;
    Ok(PartialWaveS { ell: 0, value: 1.0 + a0(z) * 4.0 * PI * t, sheet: 0 })
}

/// Second-sheet T-matrix from physical-sheet data.
#[derive(Debug, Clone)]
pub struct SecondSheetT {
    pub physical: OffShellT,
    pub s0: C64,
    pub w: C64,
    t_kw: Vec<C64>,
}

impl SecondSheetT {
    /// t|Π₁(k, k′) = t(k, k′) − a₀ 4π t(k, √z) t(√z, k′) / s₀
    pub fn eval(&self, k: C64, kp: C64) -> C64 {
        let t = &self.physical;
        t.eval(k, kp) - a0(t.z) * 4.0 * PI * t.eval(k, self.w) * t.eval(self.w, kp) / self.s0
    }

    /// Values on the solve grid.
    pub fn grid_values(&self) -> crate::linalg::CMat {
        let t = &self.physical;
        let n = t.nodes.len();
        let c = a0(t.z) * 4.0 * PI / self.s0;
        crate::linalg::CMat::from_fn(n, n, |i, j| t.values[(i, j)] - c * self.t_kw[i] * self.t_kw[j])
    }
}

/// t continued onto Π₁.
pub fn continue_t_sheet(pot: &PairPotential, z: C64, opts: &LsOptions) -> Result<SecondSheetT> {
    let physical = solve_ls(pot, z, opts)?;
    let w = msqrt(z);
    let tw = physical.eval(w, w);
    let s0 = 1.0 + a0(z) * 4.0 * PI * tw;
    if s0.norm() < 1e-14 {
        return Err(Error::singular(z, "s₀ vanishes: resonance"));
    }
    let t_kw = physical.nodes.iter().map(|&q| physical.eval(q, w)).collect();
    Ok(SecondSheetT { physical, s0, w, t_kw })
}

/// s₀ continued onto Π₁; at ℓ = 0 the inversion is trivial and this is 1/s₀.
pub fn continue_s_sheet(pot: &PairPotential, z: C64, opts: &LsOptions) -> Result<PartialWaveS> {
    let s = smatrix(pot, z, opts)?.value;
    if s.norm() == 0.0 {
        return Err(Error::singular(z, "s₀ = 0"));
    }
    Ok(PartialWaveS { ell: 0, value: 1.0 / s, sheet: 1 })
}

/// Bilinear form (r(z) f₁, f₂) on sheet `sheet` ∈ {0, 1} for radial test functions.
pub fn continue_resolvent(
    pot: &PairPotential,
    z: C64,
    sheet: u8,
    f1: &dyn Fn(C64) -> C64,
    f2: &dyn Fn(C64) -> C64,
    opts: &LsOptions,
) -> Result<C64> {
    if sheet > 1 {
        return Err(Error::Domain("two-body sheets are 0 and 1".into()));
    }
    let t = solve_ls(pot, z, opts)?;
    let n = t.nodes.len();
    let dm = &t.dmeasure;
    let mut phys = C64::new(0.0, 0.0);
    for j in 0..n {
        phys += dm[j] * f1(t.nodes[j]) * f2(t.nodes[j]);
    }
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += t.values[(i, j)] * dm[j] * f1(t.nodes[j]);
        }
        phys -= dm[i] * f2(t.nodes[i]) * row;
    }
    if sheet == 0 {
        return Ok(phys);
    }
    let w = msqrt(z);
    let s0 = 1.0 + a0(z) * 4.0 * PI * t.eval(w, w);
    // j (I − v r) f = f(√z) − 4π ∫ q² t(√z, q) f(q)/(q² − z)
    let u1 = f1(w) - t.apply_right(w, f1);
    let u2 = f2(w) - t.apply_right(w, f2);
    Ok(phys + a0(z) * 4.0 * PI * u1 * u2 / s0)
}

/// A second-sheet resonance: zero of s₀ with its (scalar) null amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub z: C64,
    pub amplitude: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSearch {
    /// argument-principle count over the region
    pub count: i64,
    pub resonances: Vec<Resonance>,
    /// seeds where Newton failed or the residual stayed above tolerance
    pub failures: Vec<C64>,
}

/// Zeros of s₀ in `region` (argument principle, subdivision, Newton).
pub fn find_resonances(pot: &PairPotential, region: Rect, opts: &LsOptions) -> Result<ResonanceSearch> {
    if region.im_max >= 0.0 && region.im_min <= 0.0 && region.re_max >= 0.0 {
        return Err(Error::Domain("search region must not meet the cut [0, ∞)".into()));
    }
    let f = |z: C64| smatrix(pot, z, opts).map(|s| s.value);
    let out = box_search(&f, &f, region, 48, 1e-2 * region.diam(), 1e-14)?;
    let mut resonances = Vec::new();
    let mut failures = out.failures;
    for z in out.roots {
        let r = f(z)?.norm();
        if r < 1e-10 {
            resonances.push(Resonance { z, amplitude: C64::new(1.0, 0.0), residual: r });
        } else {
            failures.push(z);
        }
    }
    Ok(ResonanceSearch { count: out.count, resonances, failures })
}

/// Ring probe of t|Π₁ around z*: pole location, peak/background ratio and
/// winding-based order estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingProbe {
    pub pole: C64,
    pub peak_ratio: f64,
    pub order: i64,
}

pub fn ring_probe_t(pot: &PairPotential, zstar: C64, k: C64, kp: C64, opts: &LsOptions) -> Result<RingProbe> {
    let tval = |z: C64| -> Result<C64> { Ok(continue_t_sheet(pot, z, opts)?.eval(k, kp)) };
    let inv = |z: C64| -> Result<C64> { Ok(1.0 / tval(z)?) };
    let pole = ring_pole(&inv, zstar, 1e-3, 32, 8)?;
    let near = tval(pole + 1e-6)?.norm();
    let rb = 0.25 * zstar.im.abs().max(0.1);
    let mut bg = 0.0;
    for k in 0..8 {
        bg += tval(pole + C64::from_polar(rb, PI * k as f64 / 4.0))?.norm() / 8.0;
    }
    let ring: Vec<C64> = (0..32).map(|k| pole + C64::from_polar(1e-4, 2.0 * PI * k as f64 / 32.0)).collect();
    let order = -winding(&tval, &ring)?;
    Ok(RingProbe { pole, peak_ratio: near / bg, order })
}
