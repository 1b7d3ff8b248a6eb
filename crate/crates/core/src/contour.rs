//! Quadrature rules, integration paths and continuation of Cauchy-type integrals
//!
//!   Φ(z) = ∫_{R^N} dq f(q) / (λ + q² − z),   N = 3 or 6,
//!
//! across the cut [λ, ∞) onto neighbouring sheets.
//!
//! Integrands are passed in radially reduced form g(q) = ∮ f(q q̂) dq̂, as functions of
//! a complex momentum q. They must be even in q and holomorphic near the positive axis.

use crate::{msqrt, Error, Result, C64};
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "need at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * p - pm) / (x * x - 1.0);
                if n == 1 {
                    dp = 1.0;
                }
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n == 1 {
            weights[0] = 2.0;
            nodes[0] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        (self.nodes.iter().map(|x| m + h * x).collect(), self.weights.iter().map(|w| h * w).collect())
    }
}

fn gl_pair() -> &'static (GaussLegendre, GaussLegendre) {
    static GL: std::sync::OnceLock<(GaussLegendre, GaussLegendre)> = std::sync::OnceLock::new();
    GL.get_or_init(|| (GaussLegendre::new(8), GaussLegendre::new(16)))
}

fn gl_apply(g: &GaussLegendre, f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> C64 {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    g.nodes.iter().zip(&g.weights).map(|(&x, &w)| w * f(m + h * x)).sum::<C64>() * h
}

/// Adaptive 8/16-point Gauss–Legendre on [a, b] to absolute tolerance `tol`.
pub fn adaptive(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    fn rec(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
        let (g8, g16) = gl_pair();
        let fine = gl_apply(g16, f, a, b);
        let err = (fine - gl_apply(g8, f, a, b)).norm();
        if depth > 24 || err < tol || err < 1e-15 * fine.norm() {
            return fine;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1) + rec(f, m, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Adaptive integral over [0, ∞): [0, x0] directly, the rest through x = x0/u.
pub fn adaptive_half_line(f: &dyn Fn(f64) -> C64, x0: f64, tol: f64) -> C64 {
    let head = adaptive(f, 0.0, x0, 0.5 * tol);
    let tail = adaptive(&|u: f64| if u <= 0.0 { C64::new(0.0, 0.0) } else { f(x0 / u) * (x0 / (u * u)) }, 0.0, 1.0, 0.5 * tol);
    head + tail
}

/// Panel rule on [0, ∞) graded geometrically toward the real parts of the given
/// complex singular points (16 nodes per panel, tail through x = X/u).
pub fn graded_half_line(singular: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let (_, g16) = gl_pair();
    let far = singular.iter().map(|s| s.norm()).fold(0.0, f64::max);
    let x_end = 4.0 * far + 8.0;
    let mut cuts = vec![0.0, x_end];
    for s in singular {
        let d = s.im.abs().max(1e-7);
        let mut h = 0.5 * d;
        while h < 2.0 * x_end {
            for x in [s.re - h, s.re + h] {
                if x > 0.0 && x < x_end {
                    cuts.push(x);
                }
            }
            h *= 2.0;
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13 * x_end);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for w in cuts.windows(2) {
        let (x, wt) = g16.on(w[0], w[1]);
        nodes.extend(x);
        weights.extend(wt);
    }
    for k in 0..4 {
        let (u, wt) = g16.on(0.25 * k as f64, 0.25 * (k + 1) as f64);
        for (u, wt) in u.into_iter().zip(wt) {
            nodes.push(x_end / u);
            weights.push(wt * x_end / (u * u));
        }
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre rule on [0, ∞): panels on [0, r] (finer below r/4), tail q = r/u.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub split: f64,
}

impl RadialRule {
    /// `n` total nodes, rounded to whole 16-point panels; three quarters inside [0, r].
    pub fn new(n: usize, r: f64) -> Self {
        let panels = (n / 16).max(2);
        let inner = (3 * panels / 4).max(1);
        Self::with_panels(inner, (panels - inner).max(1), r)
    }

    /// Explicit panel counts: `inner` 16-point panels on [0, r], `tail` on the mapped rest.
    pub fn with_panels(inner: usize, tail: usize, r: f64) -> Self {
        let p = 16;
        let panels = inner + tail;
        let gl = GaussLegendre::new(p);
        let mut nodes = Vec::with_capacity(panels * p);
        let mut weights = Vec::with_capacity(panels * p);
        // half of the inner panels on [0, r/4], where poles near the ray usually sit
        let near = (inner / 2).max(1);
        let far = inner - near;
        let mut cuts: Vec<f64> = (0..=near).map(|k| 0.25 * r * k as f64 / near as f64).collect();
        cuts.extend((1..=far).map(|k| 0.25 * r + 0.75 * r * k as f64 / far as f64));
        if far == 0 {
            *cuts.last_mut().unwrap() = r;
        }
        for w in cuts.windows(2) {
            let (x, wt) = gl.on(w[0], w[1]);
            nodes.extend(x);
            weights.extend(wt);
        }
        let hu = 1.0 / tail as f64;
        for k in (0..tail).rev() {
            let (u, w) = gl.on(k as f64 * hu, (k + 1) as f64 * hu);
            for (u, w) in u.into_iter().zip(w).rev() {
                nodes.push(r / u);
                weights.push(w * r / (u * u));
            }
        }
        Self { nodes, weights, split: r }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl Default for RadialRule {
    fn default() -> Self {
        Self::new(256, 8.0)
    }
}

/// Complex integration path with quadrature, either a rotated ray q = x e^{−iθ}
/// or the composite Γ_z shape (arc plus real ray).
#[derive(Debug, Clone, PartialEq)]
pub struct RayContour {
    pub theta: f64,
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
}

/// Largest admissible |θ|.
pub const MAX_ROTATION: f64 = PI / 4.0;

impl RayContour {
    pub fn ray(theta: f64, rule: &RadialRule) -> Result<Self> {
        if theta.abs() > MAX_ROTATION {
            return Err(Error::Domain(format!("rotation {theta} beyond {MAX_ROTATION}")));
        }
        let e = C64::from_polar(1.0, -theta);
        Ok(Self {
            theta,
            nodes: rule.nodes.iter().map(|&x| e * x).collect(),
            weights: rule.weights.iter().map(|&w| e * w).collect(),
        })
    }

    /// Rotation bound for strip-class integrands (holomorphic for |Im q| < 2b).
    pub fn max_angle_for_strip(b: f64, kmax: f64) -> f64 {
        let s = (2.0 * b / kmax).min(1.0);
        MAX_ROTATION.min(s.asin())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> C64 {
        self.nodes.iter().zip(&self.weights).map(|(&q, &w)| w * f(q)).sum()
    }

    /// Smallest distance from the nodes to the locus {segment [0, z]} ∪ {|ρ| ≤ c²|z|}.
    pub fn clearance(&self, z: C64, c: f64) -> f64 {
        let seg = crate::riemann::RootLocus::SegmentPlusDisk { end: z, radius: c * c * z.norm() };
        self.nodes.iter().map(|&p| seg.distance(p)).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// clockwise, for Im z > 0
    Plus,
    /// counterclockwise, for Im z < 0
    Minus,
}

/// Path in the ρ-plane: from z radially out to R = radius_scale·|z|, along |ρ| = R
/// to the positive axis, then along [R, ∞). `n` nodes per piece.
pub fn gamma_path(z: C64, orientation: Orientation, radius_scale: f64, c: Option<f64>, n: usize) -> Result<RayContour> {
    if z.im == 0.0 {
        return Err(Error::Domain("gamma path needs Im z ≠ 0".into()));
    }
    match orientation {
        Orientation::Plus if z.im < 0.0 => return Err(Error::Path("'+' path needs Im z > 0".into())),
        Orientation::Minus if z.im > 0.0 => return Err(Error::Path("'−' path needs Im z < 0".into())),
        _ => {}
    }
    if !(radius_scale >= 1.0) {
        return Err(Error::Domain(format!("radius scale {radius_scale} < 1")));
    }
    let r0 = z.norm();
    let r = radius_scale * r0;
    let phi = z.arg();
    let gl = GaussLegendre::new(n);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let dir = C64::from_polar(1.0, phi);
    if radius_scale > 1.0 {
        let (x, w) = gl.on(r0, r);
        for (x, w) in x.into_iter().zip(w) {
            nodes.push(dir * x);
            weights.push(dir * w);
        }
    }
    let (t, w) = gl.on(phi, 0.0);
    for (t, w) in t.into_iter().zip(w) {
        let p = C64::from_polar(r, t);
        nodes.push(p);
        weights.push(I * p * w);
    }
    let tail = RadialRule::new(4 * n.max(16), r);
    for (&x, &w) in tail.nodes.iter().zip(&tail.weights) {
        if x >= r {
            nodes.push(C64::new(x, 0.0));
            weights.push(C64::new(w, 0.0));
        }
    }
    let path = RayContour { theta: 0.0, nodes, weights };
    if let Some(c) = c {
        if path.clearance(z, c) <= 0.0 {
            return Err(Error::Path("gamma path touches the forbidden locus".into()));
        }
    }
    Ok(path)
}

/// Regularity class of an integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularity {
    /// entire, of exponential type `a`
    Entire { a: f64 },
    /// holomorphic in the strip |Im q| < 2b
    Strip { b: f64 },
}

/// Radially reduced integrand g(q) = ∮_{S^{N−1}} f(q q̂) dq̂.
#[derive(Clone)]
pub struct AnalyticIntegrand {
    pub eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub dim: usize,
    pub class: Regularity,
    /// decay exponent θ of the angular average
    pub decay: f64,
}

impl AnalyticIntegrand {
    pub fn new(dim: usize, class: Regularity, decay: f64, eval: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), dim, class, decay }
    }
}

impl std::fmt::Debug for AnalyticIntegrand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticIntegrand")
            .field("dim", &self.dim)
            .field("class", &self.class)
            .field("decay", &self.decay)
            .finish()
    }
}

/// ∫_0^∞ q^{N−1} g(q) / (q² − w²) dq for Im w > 0, by subtracting the pole value.
pub fn cauchy_physical(g: &dyn Fn(C64) -> C64, dim: usize, w: C64, rule: &RadialRule) -> C64 {
    let n1 = (dim - 1) as i32;
    let h = |q: C64| q.powi(n1) * g(q);
    let hw = h(w);
    let w2 = w * w;
    let mut s = C64::new(0.0, 0.0);
    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let q = C64::new(x, 0.0);
        s += wt * (h(q) - hw) / (q * q - w2);
    }
    s + hw * I * PI / (2.0 * w)
}

/// Same integral along the ray q = x e^{iφ}; used as an independent continuation check.
pub fn cauchy_rotated(g: &dyn Fn(C64) -> C64, dim: usize, lambda: f64, z: C64, phi: f64, rule: &RadialRule) -> C64 {
    let e = C64::from_polar(1.0, phi);
    let n1 = (dim - 1) as i32;
    let mut s = C64::new(0.0, 0.0);
    for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
        let q = e * x;
        s += e * wt * q.powi(n1) * g(q) / (lambda + q * q - z);
    }
    s
}

fn check_decay(f: &AnalyticIntegrand) -> Result<()> {
    if f.dim != 3 && f.dim != 6 {
        return Err(Error::Domain(format!("dimension {} not supported", f.dim)));
    }
    if !(f.decay > (f.dim - 2) as f64) {
        return Err(Error::Domain(format!("decay exponent {} too small for N = {}", f.decay, f.dim)));
    }
    Ok(())
}

/// Φ on sheet `l` of the surface of √(z−λ) (N = 3, l ∈ {0, 1}) or ln(z−λ) (N = 6).
pub fn continue_cauchy(f: &AnalyticIntegrand, lambda: f64, l: i32, z: C64, rule: &RadialRule) -> Result<C64> {
    check_decay(f)?;
    if lambda > 0.0 {
        return Err(Error::Domain("λ must be ≤ 0".into()));
    }
    if f.dim == 3 && !(l == 0 || l == 1) {
        return Err(Error::Domain("N = 3 has two sheets only".into()));
    }
    if z.im == 0.0 && z.re >= lambda {
        return Err(Error::OnCut(format!("z = {} lies on [λ, ∞)", z.re)));
    }
    let w = msqrt(z - lambda);
    let g = |q: C64| (f.eval)(q);
    let phys = cauchy_physical(&g, f.dim, w, rule);
    if l == 0 {
        return Ok(phys);
    }
    Ok(phys - PI * I * l as f64 * w.powi(f.dim as i32 - 2) * g(w))
}

/// a₀(z) = −πi √z
pub fn a0(z: C64) -> C64 {
    -PI * I * msqrt(z)
}

/// A₀(z) = −πi z²
pub fn big_a0(z: C64) -> C64 {
    -PI * I * z * z
}

/// (r₀(z) f₁, f₂) continued to sheet l ∈ {0, 1}; f₁, f₂ radial in R³.
pub fn free_resolvent_2b_sheet(
    f1: &(dyn Fn(C64) -> C64 + Sync),
    f2: &(dyn Fn(C64) -> C64 + Sync),
    z: C64,
    l: i32,
    rule: &RadialRule,
) -> Result<C64> {
    if !(l == 0 || l == 1) {
        return Err(Error::Domain("two-body sheets are 0 and 1".into()));
    }
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::OnCut(format!("z = {} lies on [0, ∞)", z.re)));
    }
    let w = msqrt(z);
    let g = |q: C64| 4.0 * PI * f1(q) * f2(q);
    let phys = cauchy_physical(&g, 3, w, rule);
    // on-shell contraction ∮ f₁ f₂ dk̂ at |k| = √z
    Ok(phys + l as f64 * a0(z) * g(w))
}

/// Hyperspherical reduction of an s-wave six-dimensional pair of test states
/// f(k, p): g(R) = (4π)² ∫_0^{π/2} sin²ω cos²ω f₁ f₂ (R cos ω, R sin ω) dω.
pub fn hyperspherical_average(
    f1: &dyn Fn(C64, C64) -> C64,
    f2: &dyn Fn(C64, C64) -> C64,
    r: C64,
    gl: &GaussLegendre,
) -> C64 {
    let (om, wt) = gl.on(0.0, 0.5 * PI);
    let mut s = C64::new(0.0, 0.0);
    for (o, w) in om.into_iter().zip(wt) {
        let (sn, cs) = o.sin_cos();
        s += w * sn * sn * cs * cs * f1(r * cs, r * sn) * f2(r * cs, r * sn);
    }
    16.0 * PI * PI * s
}

/// (R₀(z) f₁, f₂) on sheet l of the logarithmic surface; s-wave test states of (k, p).
pub fn free_resolvent_3b_sheet(
    f1: &dyn Fn(C64, C64) -> C64,
    f2: &dyn Fn(C64, C64) -> C64,
    z: C64,
    l: i32,
    rule: &RadialRule,
    n_omega: usize,
) -> Result<C64> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::OnCut(format!("z = {} lies on [0, ∞)", z.re)));
    }
    let gl = GaussLegendre::new(n_omega);
    let w = msqrt(z);
    let g = |r: C64| hyperspherical_average(f1, f2, r, &gl);
    let phys = cauchy_physical(&g, 6, w, rule);
    // J₀†J₀ contraction: ∮_{S⁵} f₁ f₂ at |P| = √z
    Ok(phys + l as f64 * big_a0(z) * g(w))
}
