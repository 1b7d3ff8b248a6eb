//! Continuation of 𝕏, S and the resolvent onto unphysical sheets, resonance and bound-state
//! search.

use super::smatrix::{AmplitudeSet, TruncatedSMatrix, Variant};
use super::solver::{Faddeev, FaddeevOptions};
use super::ThreeBodySystem;
use crate::contour::{free_resolvent_3b_sheet, RadialRule};
use crate::linalg::{null_direction, CMat, CVec};
use crate::riemann::MultiIndex;
use crate::roots::{box_search, ring_pole, Rect};
use crate::{msqrt, Error, Result, C64};
use std::f64::consts::PI;

/// Channel-space test function a(spectator index, p).
pub type ChannelFn<'a> = &'a dyn Fn(usize, C64) -> C64;

/// Nodal data of a channel vector: values on the contour and at the on-shell points.
struct Probe {
    nodes: CVec,
    on_shell: Vec<C64>,
}

impl AmplitudeSet {
    fn probe(&self, f: ChannelFn) -> Probe {
        let fd = &self.faddeev;
        let on_shell = self
            .dimers
            .iter()
            .map(|&a| {
                let d = fd.chans[a].pd.dimer.unwrap();
                f(fd.chans[a].pair, msqrt(fd.z - d.lambda))
            })
            .collect();
        Probe { nodes: fd.nodal(f), on_shell }
    }

    /// (𝒥 𝕏 x): breakup densities τ(x + V) on the shell and channel values
    /// √4π N (x + V)(p₀), with V = 𝒳τx.
    fn reduce(&self, full: &CVec, x: &Probe) -> CVec {
        let fd = &self.faddeev;
        let (ns, n) = (self.n_shell, fd.n);
        let nb = self.n_breakup();
        let mut out = CVec::zeros(nb + self.dimers.len());
        for a in 0..fd.chans.len() {
            for i in 0..ns {
                out[a * ns + i] = fd.tau[a * n + i] * full[a * n + i];
            }
        }
        let sq = (4.0 * PI).sqrt();
        for (j, &a) in self.dimers.iter().enumerate() {
            let y0 = fd.y0(a).unwrap();
            // V(p₀) = −(Kτ)(p₀)·(x + V)
            let vext = fd.extend(a, y0, C64::new(0.0, 0.0), full);
            out[nb + j] = sq * self.norms[j] * (x.on_shell[j] + vext);
        }
        out
    }

    /// ⟨a, 𝕏ˡ b⟩ from nodal probes (without the symmetric-sector multiplicity).
    fn form_l(&self, l: &MultiIndex, a: &Probe, b: &Probe) -> Result<C64> {
        let fd = &self.faddeev;
        let (phys, full_b) = fd.pair_x(&a.nodes, &b.nodes)?;
        if l.is_physical() {
            return Ok(phys);
        }
        let va = fd.solve_vec(&(-(&fd.kmat * &a.nodes)))?;
        let full_a = &a.nodes + va;
        let ra = self.reduce(&full_a, a);
        let rb = self.reduce(&full_b, b);
        let (lv, lt) = self.selectors(l);
        let nb = self.n_breakup();
        let drop = l.l0 == 0;
        let (s, _) = self.assemble_s(&lv, &lt, drop, Variant::S);
        let skip = if drop { nb } else { 0 };
        let dim = s.nrows();
        let rhs = CVec::from_fn(dim, |r, _| lt[r + skip] * rb[r + skip]);
        let sol = s.lu().solve(&rhs).ok_or_else(|| Error::singular(fd.z, "S_l"))?;
        let big_a = self.big_a();
        let mut corr = C64::new(0.0, 0.0);
        if !drop {
            let gh = &self.gram * sol.rows(0, nb);
            for r in 0..nb {
                corr += self.weights[r % self.n_shell] * lv[r] * big_a[r] * ra[r] * gh[r];
            }
        }
        for r in nb..nb + self.dimers.len() {
            corr += lv[r] * big_a[r] * ra[r] * sol[r - skip];
        }
        Ok(phys - corr)
    }
}

fn require_upper(z: C64, l: &MultiIndex) -> Result<()> {
    if z.im < 0.0 && !l.is_physical() {
        return Err(Error::Domain("continued sheets are evaluated from the upper half-plane".into()));
    }
    if l.l0 != 0 && z.re <= 0.0 {
        return Err(Error::Domain("breakup continuation needs Re z > 0".into()));
    }
    Ok(())
}

/// ⟨a, 𝕏ˡ(z) b⟩ on sheet l for channel test functions; l = 0 gives the physical 𝕏(z).
/// Im z < 0 is reached on the physical sheet by reflection.
pub fn continue_m(
    sys: &ThreeBodySystem,
    z: C64,
    l: &MultiIndex,
    a: ChannelFn,
    b: ChannelFn,
    opts: &FaddeevOptions,
) -> Result<C64> {
    l.validate(&sys.thresholds)?;
    require_upper(z, l)?;
    if z.im < 0.0 {
        let ac = |p: usize, q: C64| a(p, q.conj()).conj();
        let bc = |p: usize, q: C64| b(p, q.conj()).conj();
        return Ok(continue_m(sys, z.conj(), l, &ac, &bc, opts)?.conj());
    }
    let amp = AmplitudeSet::new(sys, z, opts)?;
    continue_m_at(&amp, l, a, b)
}

/// Same, reusing assembled blocks.
pub fn continue_m_at(amp: &AmplitudeSet, l: &MultiIndex, a: ChannelFn, b: ChannelFn) -> Result<C64> {
    let pa = amp.probe(a);
    let pb = amp.probe(b);
    Ok(amp.faddeev.perm * amp.form_l(l, &pa, &pb)?)
}

/// S_{l′} continued to sheet l:
/// I + L̃′Y L′A e − L̃′Y L A S_l⁻¹ L̃ Y L′A e (s-wave: the inversions are the identity).
pub fn continue_s(
    sys: &ThreeBodySystem,
    z: C64,
    l_matrix: &MultiIndex,
    l: &MultiIndex,
    variant: Variant,
    opts: &FaddeevOptions,
) -> Result<TruncatedSMatrix> {
    l_matrix.validate(&sys.thresholds)?;
    l.validate(&sys.thresholds)?;
    require_upper(z, l)?;
    let amp = AmplitudeSet::new(sys, z, opts)?;
    continue_s_at(&amp, l_matrix, l, variant)
}

pub fn continue_s_at(amp: &AmplitudeSet, lp: &MultiIndex, l: &MultiIndex, variant: Variant) -> Result<TruncatedSMatrix> {
    let nb = amp.n_breakup();
    let drop = lp.l0 == 0 && l.l0 == 0;
    let skip = if drop { nb } else { 0 };
    let (lv1, lt1) = amp.selectors(lp);
    let (lv, lt) = amp.selectors(l);
    let a = amp.big_a();
    let total = amp.tg.nrows();
    let dim = total - skip;
    let e: Vec<f64> = (0..total).map(|r| if r < nb { 1.0 } else if lv[r] == 1.0 { -1.0 } else { 1.0 }).collect();
    let y = amp.tg.view((skip, skip), (dim, dim)).into_owned();
    let dg = |v: &[f64]| CMat::from_diagonal(&CVec::from_fn(dim, |r, _| C64::new(v[r + skip], 0.0)));
    let ad = CMat::from_diagonal(&CVec::from_fn(dim, |r, _| a[r + skip]));
    let ed = dg(&e);
    let (l1, lt1m, lm, ltm) = (dg(&lv1), dg(&lt1), dg(&lv), dg(&lt));
    let id = CMat::identity(dim, dim);
    let (sl, _) = amp.assemble_s(&lv, &lt, drop, variant);
    let sinv = sl.try_inverse().ok_or_else(|| Error::singular(amp.faddeev.z, "S_l"))?;
    let m = match variant {
        Variant::S => {
            &id + &lt1m * &y * &l1 * &ad * &ed - &lt1m * &y * &lm * &ad * &sinv * &ltm * &y * &l1 * &ad * &ed
        }
        Variant::SDagger => {
            &id + &ed * &ad * &l1 * &y * &lt1m - &ed * &ad * &lm * &y * &ltm * &sinv * &ad * &lm * &y * &lt1m
        }
    };
    Ok(TruncatedSMatrix { z: amp.faddeev.z, l: l.clone(), variant, matrix: m, n_breakup: nb - skip })
}

/// s-wave three-body test state f(P) = 1/(P² + μ²)², P² = k² + p².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestState {
    pub mu: f64,
}

impl TestState {
    pub fn eval(&self, p2: C64) -> C64 {
        let d = p2 + self.mu * self.mu;
        1.0 / (d * d)
    }

    /// (G_α† R₀(z) f)(p) = ∫ d³k g(k) f / (k² + p² − z) for g = 1/(k² + β²).
    pub fn projected(&self, beta: f64, p: C64, z: C64) -> C64 {
        let b = (p * p + self.mu * self.mu).sqrt();
        let kappa = -C64::i() * msqrt(z - p * p);
        PI * PI / b / ((beta + kappa) * (kappa + b) * (b + beta)) * (1.0 / (kappa + b) + 1.0 / (b + beta))
    }
}

/// Free-resolvent radial rule and ω-nodes used for (R₀ˡ f, g).
fn free_form(f: &TestState, g: &TestState, z: C64, l0: i32) -> Result<C64> {
    let f1 = |k: C64, p: C64| f.eval(k * k + p * p);
    let f2 = |k: C64, p: C64| g.eval(k * k + p * p);
    free_resolvent_3b_sheet(&f1, &f2, z, l0, &RadialRule::with_panels(64, 16, 16.0), 48)
}

/// (Rˡ(z) f, g) = (R₀ˡ f, g) − ⟨u_fˡ, 𝕏ˡ u_gˡ⟩, u_fˡ = G†R₀ f plus l₀ times its on-shell density.
pub fn continue_r_form(
    sys: &ThreeBodySystem,
    z: C64,
    l: &MultiIndex,
    f: &TestState,
    g: &TestState,
    opts: &FaddeevOptions,
) -> Result<C64> {
    l.validate(&sys.thresholds)?;
    require_upper(z, l)?;
    if z.im < 0.0 {
        return Ok(continue_r_form(sys, z.conj(), l, f, g, opts)?.conj());
    }
    let free = free_form(f, g, z, l.l0)?;
    if sys.pairs.iter().all(|p| !p.active()) {
        return Ok(free);
    }
    let amp = AmplitudeSet::new(sys, z, opts)?;
    let pf = r_probe(&amp, f, l.l0);
    let pg = r_probe(&amp, g, l.l0);
    Ok(free - amp.faddeev.perm * amp.form_l(l, &pf, &pg)?)
}

fn r_probe(amp: &AmplitudeSet, f: &TestState, l0: i32) -> Probe {
    let fd = &amp.faddeev;
    let z = fd.z;
    let mut nodes = fd.nodal(&|pair, p| f.projected(fd_beta(fd, pair), p, z));
    if l0 != 0 {
        let (ns, n) = (amp.n_shell, fd.n);
        let fs = f.eval(z);
        for (a, ch) in fd.chans.iter().enumerate() {
            for i in 0..ns {
                let w = amp.omega[i];
                let (s, c) = w.sin_cos();
                let sigma = amp.a0 * 16.0 * PI * PI * s * s * c * c * ch.pd.g(z * c * c) * fs;
                nodes[a * n + i] += l0 as f64 * sigma / (4.0 * PI * fd.mu[i]);
            }
        }
    }
    let on_shell = amp
        .dimers
        .iter()
        .map(|&a| {
            let pd = fd.chans[a].pd;
            f.projected(pd.beta, msqrt(z - pd.dimer.unwrap().lambda), z)
        })
        .collect();
    Probe { nodes, on_shell }
}

fn fd_beta(fd: &Faddeev, pair: usize) -> f64 {
    fd.chans.iter().find(|c| c.pair == pair).map_or(1.0, |c| c.pd.beta)
}

/// A zero of det S_l with its null vector.
#[derive(Debug, Clone)]
pub struct Resonance3 {
    pub z: C64,
    /// smallest singular value of S_l at z
    pub residual: f64,
    pub null_vector: CVec,
}

#[derive(Debug, Clone)]
pub struct ResonanceSearch3 {
    pub count: i64,
    pub resonances: Vec<Resonance3>,
    pub failures: Vec<C64>,
}

/// det S_l(z) with the breakup multiplier s₀(z cos²ω) divided out.
pub fn normalized_det(sys: &ThreeBodySystem, z: C64, l: &MultiIndex, opts: &FaddeevOptions) -> Result<C64> {
    Ok(AmplitudeSet::new(sys, z, opts)?.normalized_log_det(l).exp())
}

/// Zeros of det S_l in `region` (upper half-plane, Re z > 0 when l₀ ≠ 0).
pub fn find_resonances_3b(
    sys: &ThreeBodySystem,
    region: Rect,
    l: &MultiIndex,
    side_pts: usize,
    opts: &FaddeevOptions,
) -> Result<ResonanceSearch3> {
    l.validate(&sys.thresholds)?;
    if region.im_min < 0.0 || (l.l0 != 0 && region.re_min <= 0.0) {
        return Err(Error::Domain("region must lie in the upper half-plane (and Re z > 0 with l₀ ≠ 0)".into()));
    }
    let f = |z: C64| normalized_det(sys, z, l, opts);
    let out = box_search(&f, &f, region, side_pts, 0.02 * region.diam(), 1e-12)?;
    let mut resonances = Vec::new();
    for z in out.roots {
        let amp = AmplitudeSet::new(sys, z, opts)?;
        let s = amp.truncated(l, Variant::S);
        let (smin, v) = null_direction(&s.matrix);
        resonances.push(Resonance3 { z, residual: smin, null_vector: v });
    }
    Ok(ResonanceSearch3 { count: out.count, resonances, failures: out.failures })
}

/// Ring probe of ⟨a, 𝕏ˡ a⟩ around z*.
#[derive(Debug, Clone, Copy)]
pub struct RingProbe3 {
    /// min |F| on the ring of radius `radius`
    pub ring_min: f64,
    /// max |F| on a ring of radius 0.05 |Im z*| (at least 1e-3, at most |Im z*|/2)
    pub background: f64,
    pub pole: C64,
}

pub fn ring_probe_m(
    sys: &ThreeBodySystem,
    zstar: C64,
    l: &MultiIndex,
    a: ChannelFn,
    radius: f64,
    opts: &FaddeevOptions,
) -> Result<RingProbe3> {
    let eval = |z: C64| continue_m(sys, z, l, a, a, opts);
    let n = 8;
    let ring = |r: f64| -> Result<Vec<f64>> {
        (0..n).map(|k| Ok(eval(zstar + C64::from_polar(r, 2.0 * PI * k as f64 / n as f64))?.norm())).collect()
    };
    let ring_min = ring(radius)?.into_iter().fold(f64::INFINITY, f64::min);
    // rings stay in the upper half-plane
    let rb = (0.05 * zstar.im.abs()).max(1e-3).min(0.5 * zstar.im.abs());
    let background = ring(rb)?.into_iter().fold(0.0, f64::max);
    let inv = |z: C64| Ok(1.0 / eval(z)?);
    let pole = ring_pole(&inv, zstar, (0.25 * zstar.im.abs()).min(1e-4), 8, 3)?;
    let pole = ring_pole(&inv, pole, radius, 8, 2)?;
    Ok(RingProbe3 { ring_min, background, pole })
}

/// Real three-body bound-state energies in (e_min, e_max) (below the lowest threshold):
/// sign changes of det(I + Kτ) on a scan, refined by bisection and secant steps.
pub fn three_body_bound_states(
    sys: &ThreeBodySystem,
    e_min: f64,
    e_max: f64,
    scan: usize,
    opts: &FaddeevOptions,
) -> Result<Vec<f64>> {
    let top = sys.thresholds.lambda_min().unwrap_or(0.0).min(0.0);
    if !(e_max <= top && e_min < e_max) {
        return Err(Error::Domain(format!("bound-state window must lie below {top}")));
    }
    let d = |e: f64| -> Result<f64> {
        let f = Faddeev::rotated(sys, C64::new(e, 0.0), opts, opts.theta)?;
        Ok(f.log_det().im.cos().signum() * 1.0)
    };
    let val = |e: f64| -> Result<f64> {
        let f = Faddeev::rotated(sys, C64::new(e, 0.0), opts, opts.theta)?;
        let ld = f.log_det();
        Ok(ld.re.exp() * ld.im.cos())
    };
    let mut out = Vec::new();
    let grid: Vec<f64> = (0..=scan).map(|k| e_min + (e_max - e_min) * k as f64 / scan as f64).collect();
    let mut prev = (grid[0], d(grid[0])?);
    for &e in &grid[1..] {
        let s = d(e)?;
        if s != prev.1 {
            let (mut a, mut b) = (prev.0, e);
            let (mut fa, mut fb) = (val(a)?, val(b)?);
            for _ in 0..200 {
                // Illinois-modified regula falsi
                let c = b - fb * (b - a) / (fb - fa);
                let fc = val(c)?;
                if fc == 0.0 || (b - a).abs() < 1e-14 * c.abs().max(1.0) {
                    a = c;
                    b = c;
                    break;
                }
                if fc.signum() == fb.signum() {
                    fa *= 0.5;
                } else {
                    a = b;
                    fa = fb;
                }
                b = c;
                fb = fc;
                if (b - a).abs() < 1e-13 * b.abs().max(1.0) {
                    break;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = (e, s);
    }
    Ok(out)
}
