//! Nyström solution of the AGS equations on a contour grid.

use super::grid::{shell_breakpoints, Grid, ScaledSpec};
use super::kernel::Exchange;
use super::{PairData, ThreeBodySystem};
use crate::linalg::{CMat, CVec};
use crate::{msqrt, Error, Result, C64};
use nalgebra::linalg::LU;
use nalgebra::Dyn;
use std::f64::consts::PI;

/// Discretisation controls for the three-body solver.
#[derive(Debug, Clone, PartialEq)]
pub struct FaddeevOptions {
    /// Gauss–Legendre nodes per panel
    pub nodes: usize,
    /// geometric panels toward each breakpoint
    pub grading: usize,
    /// rotation angle of the ray contour (Re z ≤ 0 or below breakup)
    pub theta: f64,
    /// extra tilt of the scaled tail beyond the on-shell poles
    pub tail_theta: f64,
    /// generations of the shell breakpoint closure
    pub generations: usize,
}

impl Default for FaddeevOptions {
    fn default() -> Self {
        Self { nodes: 10, grading: 2, theta: 0.3, tail_theta: 0.25, generations: 3 }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Channel {
    /// spectator index of the pair
    pub pair: usize,
    pub pd: PairData,
}

/// AGS solution at one energy: the discretised operator I + Kτ, its LU factors and
/// everything needed to evaluate amplitudes off the grid.
pub struct Faddeev {
    pub z: C64,
    pub(crate) grid: Grid,
    pub(crate) chans: Vec<Channel>,
    pub(crate) ex: Vec<Vec<Option<Exchange>>>,
    /// nodes per channel
    pub(crate) n: usize,
    pub(crate) tau: Vec<C64>,
    /// σ³ y² dy/dv per node (one channel's worth)
    pub(crate) mu: Vec<C64>,
    pub(crate) kmat: CMat,
    lu: LU<C64, Dyn, Dyn>,
    /// 3 for the symmetric sector of identical bosons, else 1
    pub(crate) perm: f64,
}

fn channels(sys: &ThreeBodySystem) -> (Vec<Channel>, Vec<Vec<Option<Exchange>>>) {
    let chans: Vec<Channel> = if sys.bosons {
        vec![Channel { pair: 0, pd: sys.pairs[0] }]
    } else {
        (0..3).filter(|&a| sys.pairs[a].active()).map(|a| Channel { pair: a, pd: sys.pairs[a] }).collect()
    };
    let m = chans.len();
    let mut ex = vec![vec![None; m]; m];
    for (i, a) in chans.iter().enumerate() {
        for (j, b) in chans.iter().enumerate() {
            if sys.bosons {
                // symmetric sector: both exchange terms coincide
                let (c, s) = (sys.coeffs.c[0][1], sys.coeffs.s[0][1]);
                ex[i][j] = Some(Exchange::new(c, s, a.pd.beta, b.pd.beta, 2.0));
            } else if a.pair != b.pair {
                let (c, s) = (sys.coeffs.c[a.pair][b.pair], sys.coeffs.s[a.pair][b.pair]);
                ex[i][j] = Some(Exchange::new(c, s, a.pd.beta, b.pd.beta, 1.0));
            }
        }
    }
    (chans, ex)
}

impl Faddeev {
    /// Assemble and factor at z with Im z ≥ 0. Re z > 0 uses the scaled contour that keeps
    /// the energy shell on the real axis; otherwise the rotated ray.
    pub fn new(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions) -> Result<Self> {
        if z.im < 0.0 {
            return Err(Error::Domain("solve in the upper half-plane and reflect".into()));
        }
        if z.re > 0.0 {
            Self::scaled(sys, z, opts)
        } else {
            Self::rotated(sys, z, opts, opts.theta)
        }
    }

    /// Rotated ray q = t e^{−iθ}.
    pub fn rotated(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions, theta: f64) -> Result<Self> {
        let (chans, ex) = channels(sys);
        if chans.is_empty() {
            return Err(Error::Domain("no interacting pair".into()));
        }
        let beta_max = chans.iter().map(|c| c.pd.beta).fold(0.0, f64::max);
        let mut scale = chans.iter().map(|c| c.pd.beta).fold(f64::INFINITY, f64::min);
        if z.norm() > 0.0 {
            scale = scale.min(z.norm().sqrt());
        }
        for c in &chans {
            if let Some(d) = c.pd.dimer {
                scale = scale.min(d.kappa).min((z - d.lambda).norm().sqrt().max(1e-3));
            }
        }
        let r_far = 40.0 * beta_max.max(z.norm().sqrt());
        let grid = Grid::rotated(theta, scale, r_far, opts.nodes);
        // on-shell poles must stay off the ray
        for c in &chans {
            if let Some(d) = c.pd.dimer {
                let p0 = msqrt(z - d.lambda);
                if p0.norm() > 1e-12 && (p0.arg() + theta).abs() < 0.05 {
                    return Err(Error::Path(format!("on-shell point {p0} too close to the ray")));
                }
            }
        }
        Self::assemble(grid, z, chans, ex, sys.bosons)
    }

    fn scaled(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions) -> Result<Self> {
        let (chans, ex) = channels(sys);
        if chans.is_empty() {
            return Err(Error::Domain("no interacting pair".into()));
        }
        let sz = z.sqrt();
        let mut angles = Vec::new();
        let mut cmax: f64 = 0.0;
        for row in &ex {
            for e in row.iter().flatten() {
                angles.push(e.s2.sqrt().atan2(-e.c));
                cmax = cmax.max(e.c.abs());
            }
        }
        let poles: Vec<C64> =
            chans.iter().filter_map(|c| c.pd.dimer).map(|d| msqrt(z - d.lambda) / sz).collect();
        let y_a = match poles.iter().map(|p| p.re).reduce(f64::min) {
            None => 1.5,
            Some(m) => {
                let y = 1.0 + 0.5 * (m - 1.0);
                let top = poles.iter().map(|p| p.re).fold(0.0, f64::max);
                if y <= cmax * top {
                    return Err(Error::Path("dimer thresholds too far apart for the scaled contour".into()));
                }
                y
            }
        };
        let mut theta: f64 = 0.0;
        for p in &poles {
            theta = theta.max((-p.im).max(0.0).atan2(p.re - y_a));
        }
        let theta = theta + opts.tail_theta;
        if theta > 1.2 {
            return Err(Error::Path(format!("tail angle {theta} too steep at z = {z}")));
        }
        let spec = ScaledSpec {
            z,
            breakpoints: shell_breakpoints(&angles, opts.generations),
            nodes: opts.nodes,
            grading: opts.grading,
            y_a,
            poles,
            theta,
            beta: chans.iter().map(|c| c.pd.beta).fold(0.0, f64::max),
        };
        Self::assemble(Grid::scaled(&spec), z, chans, ex, sys.bosons)
    }

    fn assemble(grid: Grid, z: C64, chans: Vec<Channel>, ex: Vec<Vec<Option<Exchange>>>, bosons: bool) -> Result<Self> {
        let n = grid.len();
        let m = chans.len();
        let s2 = grid.sigma * grid.sigma;
        let s3 = s2 * grid.sigma;
        let mu: Vec<C64> = (0..n).map(|i| s3 * grid.y[i] * grid.y[i] * grid.dydv[i]).collect();
        let mut tau = Vec::with_capacity(m * n);
        for c in &chans {
            for i in 0..n {
                tau.push(c.pd.tau(z - s2 * grid.y[i] * grid.y[i]));
            }
        }
        let mut me = Self {
            z,
            grid,
            chans,
            ex,
            n,
            tau,
            mu,
            kmat: CMat::zeros(m * n, m * n),
            lu: CMat::identity(1, 1).lu(),
            perm: if bosons { 3.0 } else { 1.0 },
        };
        let mut kmat = CMat::zeros(m * n, m * n);
        for a in 0..m {
            for i in 0..n {
                let row = me.row(a, me.grid.y[i]);
                for (k, v) in row.iter().enumerate() {
                    kmat[(a * n + i, k)] = *v;
                }
            }
        }
        let amat = &kmat + CMat::identity(m * n, m * n);
        me.lu = amat.lu();
        me.kmat = kmat;
        Ok(me)
    }

    pub fn channel_count(&self) -> usize {
        self.chans.len()
    }

    /// Spectator indices of the channels (the symmetric boson channel reports pair 0).
    pub fn channel_pairs(&self) -> Vec<usize> {
        self.chans.iter().map(|c| c.pair).collect()
    }

    /// K_ab at contour coordinates x, y (physical momenta σx, σy).
    pub(crate) fn kernel(&self, e: &Exchange, x: C64, y: C64) -> C64 {
        if self.grid.scaled {
            e.eval_scaled(x, y, self.z)
        } else {
            e.eval(x, y, self.z)
        }
    }

    /// Singular points in y of K(x, ·) for the scaled contour.
    fn singular(&self, e: &Exchange, x: C64) -> Vec<C64> {
        let s = e.s2.sqrt();
        let c = e.c;
        let w = (1.0 - x * x).sqrt();
        let ib = C64::i() * s / self.z.sqrt();
        let (ba, bb) = (e.beta_a2.sqrt(), e.beta_b2.sqrt());
        let mut v = Vec::with_capacity(12);
        for sg in [1.0, -1.0] {
            v.push(sg * c * x + s * w);
            v.push(sg * c * x - s * w);
            v.push(sg * c * x + ib * ba);
            v.push(sg * c * x - ib * ba);
            v.push((sg * x + ib * bb) / c);
            v.push((sg * x - ib * bb) / c);
        }
        v
    }

    /// Row of the discretised Kτ at the point x of channel a: entry (b, j) is the
    /// integration weight times μ_j τ_b(y_j).
    pub(crate) fn row(&self, a: usize, x: C64) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); self.chans.len() * n];
        let mut w = vec![C64::new(0.0, 0.0); n];
        for (b, e) in self.ex[a].iter().enumerate() {
            let Some(e) = e else { continue };
            let sing = if self.grid.scaled { self.singular(e, x) } else { Vec::new() };
            self.grid.row(&|y| self.kernel(e, x, y), &sing, &mut w);
            for j in 0..n {
                out[b * n + j] = w[j] * self.mu[j] * self.tau[b * n + j];
            }
        }
        out
    }

    /// Column K_{·b}(y_i, y) over all channels a and nodes i.
    pub(crate) fn col(&self, b: usize, y: C64) -> CVec {
        let n = self.n;
        CVec::from_fn(self.chans.len() * n, |k, _| {
            let (a, i) = (k / n, k % n);
            self.ex[a][b].as_ref().map_or(C64::new(0.0, 0.0), |e| self.kernel(e, self.grid.y[i], y))
        })
    }

    pub(crate) fn solve_mat(&self, rhs: &CMat) -> Result<CMat> {
        self.lu.solve(rhs).ok_or_else(|| Error::singular(self.z, "Faddeev system"))
    }

    pub(crate) fn solve_vec(&self, rhs: &CVec) -> Result<CVec> {
        self.lu.solve(rhs).ok_or_else(|| Error::singular(self.z, "Faddeev system"))
    }

    /// Value at x (channel a) of a solution V of V = s − Kτ V, given the source there.
    pub(crate) fn extend(&self, a: usize, x: C64, source: C64, v: &CVec) -> C64 {
        let r = self.row(a, x);
        source - r.iter().zip(v.iter()).map(|(p, q)| p * q).sum::<C64>()
    }

    /// log det(I + Kτ).
    pub fn log_det(&self) -> C64 {
        let u = self.lu.u();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..u.nrows() {
            s += u[(i, i)].ln();
        }
        if self.lu.p().determinant::<f64>() < 0.0 {
            s += C64::new(0.0, PI);
        }
        s
    }

    /// Contour coordinate of the on-shell momentum √(z − λ) in channel a.
    pub(crate) fn y0(&self, a: usize) -> Option<C64> {
        self.chans[a].pd.dimer.map(|d| msqrt(self.z - d.lambda) / self.grid.sigma)
    }

    /// Channels that carry a dimer.
    pub(crate) fn dimer_channels(&self) -> Vec<usize> {
        (0..self.chans.len()).filter(|&a| self.chans[a].pd.dimer.is_some()).collect()
    }

    /// 𝒳_{·b}(·, p_b) on the grid for the on-shell momentum of channel b.
    pub(crate) fn half_shell_grid(&self, b: usize) -> Result<CVec> {
        let y0 = self.y0(b).ok_or_else(|| Error::Domain("channel has no dimer".into()))?;
        self.solve_vec(&(-self.col(b, y0)))
    }

    /// Half-on-shell amplitudes 𝒳_{ab}(q, √(z − λ_b)): contour momenta q and values per channel a.
    pub fn half_on_shell(&self, b: usize) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
        let u = self.half_shell_grid(b)?;
        let q: Vec<C64> = self.grid.y.iter().map(|&y| y * self.grid.sigma).collect();
        let vals = (0..self.chans.len()).map(|a| u.rows(a * self.n, self.n).iter().copied().collect()).collect();
        Ok((q, vals))
    }

    /// On-shell 𝒳_{ab}(p_a, p_b) over the dimer channels.
    pub fn on_shell(&self) -> Result<CMat> {
        let d = self.dimer_channels();
        let mut out = CMat::zeros(d.len(), d.len());
        for (jb, &b) in d.iter().enumerate() {
            let u = self.half_shell_grid(b)?;
            let yb = self.y0(b).unwrap();
            for (ja, &a) in d.iter().enumerate() {
                let ya = self.y0(a).unwrap();
                let k = self.ex[a][b].as_ref().map_or(C64::new(0.0, 0.0), |e| self.kernel(e, ya, yb));
                out[(ja, jb)] = self.extend(a, ya, -k, &u);
            }
        }
        Ok(out)
    }

    /// Nodal values σ y_i of the contour momenta.
    pub fn momenta(&self) -> Vec<C64> {
        self.grid.y.iter().map(|&y| y * self.grid.sigma).collect()
    }

    /// Bilinear ⟨a, 𝕏 b⟩ = ⟨a, τ b⟩ + ⟨a, τ𝒳τ b⟩ for channel test functions a(ch, q), b(ch, q);
    /// returns the value and the nodal data (a + V_a, b + V_b) reused by the continuation.
    pub(crate) fn pair_x(&self, av: &CVec, bv: &CVec) -> Result<(C64, CVec)> {
        let vb = self.solve_vec(&(-(&self.kmat * bv)))?;
        let full = bv + &vb;
        let n = self.n;
        let mut s = C64::new(0.0, 0.0);
        for k in 0..av.len() {
            let i = k % n;
            s += self.grid.wv[i] * self.mu[i] * av[k] * self.tau[k] * full[k];
        }
        Ok((4.0 * PI * s, full))
    }

    /// Nodal vector of channel test functions.
    pub(crate) fn nodal(&self, f: &dyn Fn(usize, C64) -> C64) -> CVec {
        let n = self.n;
        CVec::from_fn(self.chans.len() * n, |k, _| f(self.chans[k / n].pair, self.grid.y[k % n] * self.grid.sigma))
    }
}

/// The effective Faddeev equations at z: Nyström solution on the default contour.
pub fn effective_solve(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions) -> Result<Faddeev> {
    Faddeev::new(sys, z, opts)
}
