//! Reduced scattering matrices over (breakup shell nodes ⊕ dimer channels).
//!
//! Breakup states are represented by densities h_α(ω) on the shell p_α = √z sin ω;
//! the Gram operator G_Φ of the channel functions Φ_α h_α carries their overlaps.

use super::solver::{Faddeev, FaddeevOptions};
use super::ThreeBodySystem;
use crate::contour::GaussLegendre;
use crate::linalg::{CMat, CVec};
use crate::riemann::MultiIndex;
use crate::{msqrt, Error, Result, C64};
use std::f64::consts::{FRAC_PI_2, PI};

/// Blocks of 𝕋𝔾 on the reduced grid at one energy.
pub struct AmplitudeSet {
    pub faddeev: Faddeev,
    /// shell nodes per channel
    pub n_shell: usize,
    /// hyperangles and their quadrature weights
    pub omega: Vec<f64>,
    pub weights: Vec<f64>,
    /// channels with a dimer (indices into the Faddeev channels)
    pub dimers: Vec<usize>,
    /// Gram operator G_Φ on breakup densities
    pub gram: CMat,
    /// multiplicative part of 𝕋₀₀ on the shell
    pub delta: Vec<C64>,
    /// [[𝕋₀₀𝔾, 𝕋₀c], [𝕋c₀𝔾, 𝕋cc]]
    pub tg: CMat,
    pub a0: C64,
    pub a_ch: Vec<C64>,
    pub norms: Vec<f64>,
}

/// Which of the two truncated matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    S,
    SDagger,
}

#[derive(Debug, Clone)]
pub struct TruncatedSMatrix {
    pub z: C64,
    pub l: MultiIndex,
    pub variant: Variant,
    /// breakup rows come first (none when l₀ = 0)
    pub matrix: CMat,
    pub n_breakup: usize,
}

fn fold(w: f64) -> f64 {
    if w > FRAC_PI_2 {
        PI - w
    } else {
        w
    }
}

impl AmplitudeSet {
    pub fn new(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions) -> Result<Self> {
        let f = Faddeev::new(sys, z, opts)?;
        Self::from_solution(f)
    }

    pub fn from_solution(f: Faddeev) -> Result<Self> {
        let z = f.z;
        let ns = f.grid.n_shell;
        let m = f.chans.len();
        let n = f.n;
        let nb = m * ns;
        let omega: Vec<f64> = (0..ns).map(|i| f.grid.y[i].re.asin()).collect();
        let weights: Vec<f64> = f.grid.wv[..ns].to_vec();
        let dimers = f.dimer_channels();
        let a0 = -PI * C64::i() * z * z;

        // Gram operator
        let mut gram = CMat::zeros(nb, nb);
        let gk = |a: usize, w: f64| f.chans[a].pd.g(z * w.cos() * w.cos());
        for a in 0..m {
            for i in 0..ns {
                let (s, c) = omega[i].sin_cos();
                gram[(a * ns + i, a * ns + i)] += 16.0 * PI * PI * s * s * c * c * gk(a, omega[i]).powi(2);
            }
        }
        let gl = GaussLegendre::new(20);
        let mut lag = vec![0.0; f.grid.panels[0].len()];
        for a in 0..m {
            for b in 0..m {
                let Some(e) = f.ex[a][b] else { continue };
                let sabs = e.s2.sqrt();
                let mult = e.pref / (2.0 * PI * sabs.powi(3));
                let gamma = sabs.atan2(-e.c);
                for i in 0..ns {
                    let w = omega[i];
                    let (lo, hi) = ((w - gamma).abs(), fold(w + gamma));
                    let pre = mult * 8.0 * PI * PI * w.sin() * w.cos() * gk(a, w) / (sabs * e.c.abs());
                    for p in f.grid.panels.iter().filter(|p| p.start < ns) {
                        let (l, r) = (lo.max(p.a), hi.min(p.b));
                        if r <= l {
                            continue;
                        }
                        let (xs, ws) = gl.on(l, r);
                        for (x, wx) in xs.into_iter().zip(ws) {
                            let v = pre * x.sin() * x.cos() * gk(b, x) * wx;
                            p.lagrange(x, &mut lag);
                            for j in 0..p.len() {
                                gram[(a * ns + i, b * ns + p.start + j)] += v * lag[j];
                            }
                        }
                    }
                }
            }
        }

        let delta: Vec<C64> = (0..nb).map(|k| f.tau[(k / ns) * n + k % ns] / (4.0 * PI * f.mu[k % ns])).collect();
        // P = Kτ restricted to shell columns, divided by μ
        let mut p = CMat::zeros(m * n, nb);
        for b in 0..m {
            for j in 0..ns {
                let inv = 1.0 / f.mu[j];
                for r in 0..m * n {
                    p[(r, b * ns + j)] = f.kmat[(r, b * n + j)] * inv;
                }
            }
        }
        let pg = &p * &gram;
        let vfull = f.solve_mat(&(-&pg))?;

        let nd = dimers.len();
        let mut tg = CMat::zeros(nb + nd, nb + nd);
        for a in 0..m {
            for i in 0..ns {
                let r = a * ns + i;
                let t = f.tau[a * n + i];
                for c in 0..nb {
                    tg[(r, c)] = delta[r] * gram[(r, c)] + t / (4.0 * PI) * vfull[(a * n + i, c)];
                }
            }
        }
        let mut u_ch = Vec::with_capacity(nd);
        let mut norms = Vec::with_capacity(nd);
        let mut a_ch = Vec::with_capacity(nd);
        let mut y0s = Vec::with_capacity(nd);
        for &b in &dimers {
            let d = f.chans[b].pd.dimer.unwrap();
            norms.push(d.norm);
            a_ch.push(-PI * C64::i() * msqrt(z - d.lambda));
            y0s.push(f.y0(b).unwrap());
            u_ch.push(f.half_shell_grid(b)?);
        }
        let sq = (4.0 * PI).sqrt();
        for (jb, &_b) in dimers.iter().enumerate() {
            for a in 0..m {
                for i in 0..ns {
                    tg[(a * ns + i, nb + jb)] = norms[jb] * f.tau[a * n + i] * u_ch[jb][a * n + i] / sq;
                }
            }
        }
        for (ja, &a) in dimers.iter().enumerate() {
            let row = f.row(a, y0s[ja]);
            let rv = CVec::from_vec(row.clone()).transpose();
            let rsh = CMat::from_fn(1, nb, |_, c| {
                let (b, j) = (c / ns, c % ns);
                row[b * n + j] / f.mu[j]
            });
            let t = (-(&rsh * &gram) - &rv * &vfull) * C64::new(norms[ja] / sq, 0.0);
            for c in 0..nb {
                tg[(nb + ja, c)] = t[(0, c)];
            }
            for (jb, &b) in dimers.iter().enumerate() {
                let k = f.ex[a][b].as_ref().map_or(C64::new(0.0, 0.0), |e| f.kernel(e, y0s[ja], y0s[jb]));
                let ext = -k - (&rv * &u_ch[jb])[(0, 0)];
                tg[(nb + ja, nb + jb)] = norms[ja] * norms[jb] * ext;
            }
        }
        Ok(Self { faddeev: f, n_shell: ns, omega, weights, dimers, gram, delta, tg, a0, a_ch, norms })
    }

    pub fn n_breakup(&self) -> usize {
        self.faddeev.chans.len() * self.n_shell
    }

    /// Diagonal selectors (L, L̃) over breakup nodes ⊕ dimer channels (full, before truncation).
    pub fn selectors(&self, l: &MultiIndex) -> (Vec<f64>, Vec<f64>) {
        let nb = self.n_breakup();
        let l0 = l.l0 as f64;
        let mut lv = vec![l0; nb];
        let mut lt = vec![l0.abs(); nb];
        for &a in &self.dimers {
            let pair = self.faddeev.chans[a].pair;
            let fl = l.flag(pair as u8 + 1, 1) as f64;
            lv.push(fl);
            lt.push(fl);
        }
        (lv, lt)
    }

    /// Flux factors A: −πi z² on breakup nodes, −πi p₀ on dimer channels.
    pub fn big_a(&self) -> Vec<C64> {
        let mut v = vec![self.a0; self.n_breakup()];
        v.extend(&self.a_ch);
        v
    }

    /// S_l = I + L̃ 𝕋𝔾 L A, or S†_l = I + A L 𝕋𝔾 L̃. With l₀ = 0 only the channel block is kept.
    pub fn truncated(&self, l: &MultiIndex, variant: Variant) -> TruncatedSMatrix {
        let (lv, lt) = self.selectors(l);
        let (matrix, n_breakup) = self.assemble_s(&lv, &lt, l.l0 == 0, variant);
        TruncatedSMatrix { z: self.faddeev.z, l: l.clone(), variant, matrix, n_breakup }
    }

    pub(crate) fn assemble_s(&self, lv: &[f64], lt: &[f64], drop_breakup: bool, variant: Variant) -> (CMat, usize) {
        let a = self.big_a();
        let nb = self.n_breakup();
        let skip = if drop_breakup { nb } else { 0 };
        let dim = self.tg.nrows() - skip;
        let mut s = CMat::identity(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let (gr, gc) = (r + skip, c + skip);
                let t = self.tg[(gr, gc)];
                s[(r, c)] += match variant {
                    Variant::S => lt[gr] * t * lv[gc] * a[gc],
                    Variant::SDagger => a[gr] * lv[gr] * t * lt[gc],
                };
            }
        }
        (s, nb - skip)
    }

    /// Multiplicative part of S_l on the breakup nodes (the two-body factor s₀(z cos²ω)).
    pub fn breakup_multiplier(&self, l: &MultiIndex) -> Vec<C64> {
        let l0 = l.l0 as f64;
        (0..self.n_breakup()).map(|r| 1.0 + l0.abs() * l0 * self.a0 * self.delta[r] * self.gram[(r, r)]).collect()
    }

    /// det S_l with the non-compact breakup multiplier divided out.
    pub fn normalized_log_det(&self, l: &MultiIndex) -> C64 {
        let mut s = self.truncated(l, Variant::S);
        if s.n_breakup > 0 {
            let d = self.breakup_multiplier(l);
            for r in 0..s.n_breakup {
                let inv = 1.0 / d[r];
                for c in 0..s.matrix.ncols() {
                    s.matrix[(r, c)] *= inv;
                }
            }
        }
        crate::linalg::log_det(&s.matrix)
    }

    /// Isometry defect of the full S on the real axis: ‖L⁻¹(Sᴴ D S − D)L⁻ᴴ‖ over a span of
    /// smooth test vectors (Legendre polynomials in ω per channel plus the channel unit
    /// vectors), where D is the flux metric and LLᴴ its Cholesky factor on the span.
    pub fn unitarity_defect(&self, degree: usize) -> Result<f64> {
        let z = self.faddeev.z;
        if z.im != 0.0 {
            return Err(Error::Domain("unitarity is a real-axis statement".into()));
        }
        let e = z.re;
        let nb = self.n_breakup();
        let open_breakup = e > 0.0;
        let ones = vec![1.0; self.tg.nrows()];
        let (smat, nbs) = self.assemble_s(&ones, &ones, !open_breakup, Variant::S);
        let dim = smat.nrows();
        let mut metric = CMat::zeros(dim, dim);
        if nbs > 0 {
            for r in 0..nb {
                let w = self.weights[r % self.n_shell];
                for c in 0..nb {
                    metric[(r, c)] = e * e * w * self.gram[(r, c)];
                }
            }
        }
        for (j, a) in self.a_ch.iter().enumerate() {
            let p0 = (a / (-PI * C64::i())).re;
            metric[(dim - self.a_ch.len() + j, dim - self.a_ch.len() + j)] = C64::new(p0, 0.0);
        }
        let mut cols: Vec<CVec> = Vec::new();
        if open_breakup {
            let m = self.faddeev.chans.len();
            for a in 0..m {
                for k in 0..=degree {
                    let mut v = CVec::zeros(dim);
                    for i in 0..self.n_shell {
                        let x = 4.0 * self.omega[i] / PI - 1.0;
                        v[a * self.n_shell + i] = C64::new(legendre(k, x), 0.0);
                    }
                    cols.push(v);
                }
            }
        }
        for j in 0..self.a_ch.len() {
            let mut v = CVec::zeros(dim);
            v[dim - self.a_ch.len() + j] = C64::new(1.0, 0.0);
            cols.push(v);
        }
        let t = CMat::from_columns(&cols);
        let gt = t.adjoint() * &metric * &t;
        let gt = (&gt + gt.adjoint()) * C64::new(0.5, 0.0);
        let chol = gt.clone().cholesky().ok_or_else(|| Error::singular(z, "test-span Gram"))?;
        let st = &smat * &t;
        let d = st.adjoint() * &metric * &st - &gt;
        let li = chol.l().try_inverse().ok_or_else(|| Error::singular(z, "Cholesky factor"))?;
        let x = &li * d * li.adjoint();
        Ok(crate::linalg::norm2(&x))
    }
}

fn legendre(k: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Assemble the reduced amplitude blocks at z (z approaching the real axis from above).
pub fn assemble_t(sys: &ThreeBodySystem, z: C64, opts: &FaddeevOptions) -> Result<AmplitudeSet> {
    AmplitudeSet::new(sys, z, opts)
}

/// Truncated scattering matrix S_l or S†_l at z.
pub fn truncated_smatrix(
    sys: &ThreeBodySystem,
    z: C64,
    l: &MultiIndex,
    variant: Variant,
    opts: &FaddeevOptions,
) -> Result<TruncatedSMatrix> {
    l.validate(&sys.thresholds)?;
    Ok(assemble_t(sys, z, opts)?.truncated(l, variant))
}
