//! Integration contours for the Faddeev equations and product-integration rows.
//!
//! Scaled contour (Re z > 0): q = √z y with y = sin ω on [0, π/2] (the energy shell),
//! y = cosh t on [0, T] up to y_a, then a straight tail y_a + r e^{−iθ′}.
//! Rotated contour: q = t e^{−iθ}, σ = 1.

use crate::contour::GaussLegendre;
use crate::C64;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Map {
    Sin,
    Cosh,
    Line { origin: C64, dir: C64 },
    /// r = r0 + r0 u/(1 − u) along dir from origin
    Tail { origin: C64, dir: C64, r0: f64 },
}

impl Map {
    pub fn y(&self, v: f64) -> C64 {
        match *self {
            Map::Sin => C64::new(v.sin(), 0.0),
            Map::Cosh => C64::new(v.cosh(), 0.0),
            Map::Line { origin, dir } => origin + dir * v,
            Map::Tail { origin, dir, r0 } => origin + dir * (r0 + r0 * v / (1.0 - v)),
        }
    }

    pub fn dy(&self, v: f64) -> C64 {
        match *self {
            Map::Sin => C64::new(v.cos(), 0.0),
            Map::Cosh => C64::new(v.sinh(), 0.0),
            Map::Line { dir, .. } => dir,
            Map::Tail { dir, r0, .. } => dir * (r0 / ((1.0 - v) * (1.0 - v))),
        }
    }

    /// Panel parameter of a point y (complex; only meaningful near the panel).
    pub fn inv(&self, y: C64) -> C64 {
        match *self {
            Map::Sin => y.asin(),
            Map::Cosh => y.acosh(),
            Map::Line { origin, dir } => (y - origin) / dir,
            Map::Tail { origin, dir, r0 } => {
                let r = (y - origin) / dir;
                (r - r0) / r
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Panel {
    pub a: f64,
    pub b: f64,
    pub map: Map,
    /// Lagrange product integration against the kernel
    pub product: bool,
    pub start: usize,
    pub v: Vec<f64>,
    bary: Vec<f64>,
}

impl Panel {
    fn new(a: f64, b: f64, map: Map, product: bool, start: usize, gl: &GaussLegendre) -> Self {
        let (v, _) = gl.on(a, b);
        let n = v.len();
        let mut bary = vec![1.0; n];
        for j in 0..n {
            for k in 0..n {
                if k != j {
                    bary[j] /= v[j] - v[k];
                }
            }
        }
        Self { a, b, map, product, start, v, bary }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    /// Lagrange basis values ℓ_j(t) on the panel nodes.
    pub fn lagrange(&self, t: f64, out: &mut [f64]) {
        for (j, &vj) in self.v.iter().enumerate() {
            if t == vj {
                out.iter_mut().for_each(|o| *o = 0.0);
                out[j] = 1.0;
                return;
            }
        }
        let mut den = 0.0;
        for j in 0..self.v.len() {
            let c = self.bary[j] / (t - self.v[j]);
            out[j] = c;
            den += c;
        }
        out.iter_mut().for_each(|o| *o /= den);
    }
}

/// Split [a, b] until every piece is shorter (in y) than `ratio` times its distance to the poles.
fn refine(a: f64, b: f64, map: Map, poles: &[C64], ratio: f64) -> Vec<(f64, f64)> {
    let (ya, yb) = (map.y(a), map.y(b));
    let len = (yb - ya).norm();
    let dist = poles.iter().map(|&p| seg_dist(p, ya, yb)).fold(f64::INFINITY, f64::min);
    if len <= ratio * dist || len < 1e-6 {
        return vec![(a, b)];
    }
    let m = 0.5 * (a + b);
    let mut v = refine(a, m, map, poles, ratio);
    v.extend(refine(m, b, map, poles, ratio));
    v
}

fn seg_dist(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - a - d * t).norm()
}

#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub sigma: C64,
    pub scaled: bool,
    pub panels: Vec<Panel>,
    pub y: Vec<C64>,
    /// plain quadrature weight in the panel parameter
    pub wv: Vec<f64>,
    pub dydv: Vec<C64>,
    /// the first n_shell nodes sit on the shell segment, parameter ω
    pub n_shell: usize,
    gl_sub: GaussLegendre,
}

/// Geometric edges on [a, b] graded toward both ends: `levels` panels of ratio 3 each side.
fn graded_edges(a: f64, b: f64, levels: usize, left: bool, right: bool) -> Vec<f64> {
    let h = 0.5 * (b - a);
    let mut e = vec![a];
    if left {
        for k in (1..=levels).rev() {
            e.push(a + h * 3f64.powi(-(k as i32)));
        }
    }
    e.push(a + h);
    if right {
        for k in 1..=levels {
            e.push(b - h * 3f64.powi(-(k as i32)));
        }
    }
    e.push(b);
    e
}

/// Closure of {0, π/2} under ω ↦ |ω − γ|, ω ↦ fold(ω + γ), a few generations deep:
/// the points where the solution on the shell loses smoothness.
pub(crate) fn shell_breakpoints(angles: &[f64], generations: usize) -> Vec<f64> {
    let fold = |w: f64| if w > FRAC_PI_2 { std::f64::consts::PI - w } else { w };
    let mut pts = vec![0.0, FRAC_PI_2];
    let mut fresh = pts.clone();
    for _ in 0..generations {
        let mut next = Vec::new();
        for &w in &fresh {
            for &g in angles {
                for cand in [(w - g).abs(), fold(w + g)] {
                    if (0.0..=FRAC_PI_2).contains(&cand) && !pts.iter().chain(&next).any(|&p: &f64| (p - cand).abs() < 1e-3) {
                        next.push(cand);
                    }
                }
            }
        }
        pts.extend(&next);
        fresh = next;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

pub(crate) struct ScaledSpec {
    pub z: C64,
    pub breakpoints: Vec<f64>,
    pub nodes: usize,
    pub grading: usize,
    pub y_a: f64,
    /// on-shell points that the tail has to pass below
    pub poles: Vec<C64>,
    pub theta: f64,
    /// momentum scale of the form factors
    pub beta: f64,
}

impl Grid {
    fn finish(sigma: C64, scaled: bool, panels: Vec<Panel>, gl: &GaussLegendre, n_shell: usize) -> Self {
        let mut y = Vec::new();
        let mut wv = Vec::new();
        let mut dydv = Vec::new();
        for p in &panels {
            let (_, w) = gl.on(p.a, p.b);
            for (k, &v) in p.v.iter().enumerate() {
                y.push(p.map.y(v));
                dydv.push(p.map.dy(v));
                wv.push(w[k]);
            }
        }
        Self { sigma, scaled, panels, y, wv, dydv, n_shell, gl_sub: GaussLegendre::new(16) }
    }

    pub fn scaled(spec: &ScaledSpec) -> Self {
        let gl = GaussLegendre::new(spec.nodes);
        let mut panels: Vec<Panel> = Vec::new();
        let push = |a: f64, b: f64, map: Map, product: bool, panels: &mut Vec<Panel>| {
            let start = panels.last().map_or(0, |p| p.start + p.len());
            panels.push(Panel::new(a, b, map, product, start, &gl));
        };
        let bp = &spec.breakpoints;
        for w in bp.windows(2) {
            let e = graded_edges(w[0], w[1], spec.grading, true, true);
            for s in e.windows(2) {
                push(s[0], s[1], Map::Sin, true, &mut panels);
            }
        }
        let n_shell = panels.last().map_or(0, |p| p.start + p.len());
        let t_end = spec.y_a.acosh();
        let mut e = vec![0.0];
        for k in (1..=spec.grading).rev() {
            e.push(t_end * 3f64.powi(-(k as i32)));
        }
        e.push(t_end);
        let ratio = 0.6;
        for s in e.windows(2) {
            for (l, r) in refine(s[0], s[1], Map::Cosh, &spec.poles, ratio) {
                push(l, r, Map::Cosh, true, &mut panels);
            }
        }
        // tail: bisect near the on-shell poles, then doubling panels out to r_far
        let origin = C64::new(spec.y_a, 0.0);
        let dir = C64::from_polar(1.0, -spec.theta);
        let r_far = (4.0 * spec.beta / spec.z.norm().sqrt()).max(4.0 * spec.y_a);
        let line = Map::Line { origin, dir };
        let mut edges = vec![0.0];
        let mut r = 0.25;
        while r < r_far {
            edges.push(r);
            r *= 2.0;
        }
        edges.push(r_far);
        for s in edges.windows(2) {
            for (l, r) in refine(s[0], s[1], line, &spec.poles, ratio) {
                push(l, r, line, false, &mut panels);
            }
        }
        for (a, b) in [(0.0, 0.5), (0.5, 0.85), (0.85, 1.0)] {
            push(a, b, Map::Tail { origin, dir, r0: r_far }, false, &mut panels);
        }
        Self::finish(spec.z.sqrt(), true, panels, &gl, n_shell)
    }

    /// q = t e^{−iθ}: panels doubling outward from `scale`/8, then a mapped tail.
    pub fn rotated(theta: f64, scale: f64, r_far: f64, nodes: usize) -> Self {
        let gl = GaussLegendre::new(nodes);
        let dir = C64::from_polar(1.0, -theta);
        let origin = C64::new(0.0, 0.0);
        let mut panels = Vec::new();
        let mut start = 0;
        let mut edges = vec![0.0];
        let mut r = scale / 8.0;
        while r < r_far {
            edges.push(r);
            r *= 2.0;
        }
        edges.push(r_far);
        for s in edges.windows(2) {
            let p = Panel::new(s[0], s[1], Map::Line { origin, dir }, false, start, &gl);
            start += p.len();
            panels.push(p);
        }
        for (a, b) in [(0.0, 0.5), (0.5, 0.85), (0.85, 1.0)] {
            let p = Panel::new(a, b, Map::Tail { origin, dir, r0: r_far }, false, start, &gl);
            start += p.len();
            panels.push(p);
        }
        Self::finish(C64::new(1.0, 0.0), false, panels, &gl, 0)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    /// Weights W_j with ∫_C k(y) φ(y) dv ≈ Σ_j W_j φ(y_j): Lagrange product integration on
    /// the real panels, graded toward the points `sing` where k is singular; plain
    /// quadrature elsewhere.
    pub fn row(&self, k: &dyn Fn(C64) -> C64, sing: &[C64], out: &mut [C64]) {
        let mut lag = vec![0.0; 64];
        for p in &self.panels {
            let n = p.len();
            if !p.product {
                for j in 0..n {
                    let i = p.start + j;
                    out[i] = k(self.y[i]) * self.wv[i];
                }
                continue;
            }
            let vs: Vec<C64> = sing.iter().map(|&s| p.map.inv(s)).filter(|v| v.re.is_finite()).collect();
            let mut pts = Vec::new();
            self.sub_rule(p.a, p.b, &vs, &mut pts, 0, p.b - p.a);
            let acc = &mut out[p.start..p.start + n];
            acc.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            for (t, w) in pts {
                let kv = k(p.map.y(t)) * w;
                if !(kv.re.is_finite() && kv.im.is_finite()) {
                    // landed on an integrable log point to rounding; its cell is below 1e-12
                    continue;
                }
                p.lagrange(t, &mut lag[..n]);
                for j in 0..n {
                    acc[j] += kv * lag[j];
                }
            }
        }
    }

    fn sub_rule(&self, l: f64, r: f64, sing: &[C64], out: &mut Vec<(f64, f64)>, depth: usize, full: f64) {
        let len = r - l;
        let mut best: Option<(f64, f64)> = None;
        for s in sing {
            let dx = if s.re < l { l - s.re } else if s.re > r { s.re - r } else { 0.0 };
            let d = dx.hypot(s.im);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, s.re));
            }
        }
        let near = match best {
            Some((d, re)) if d < 0.5 * len && depth < 80 && len > 1e-12 * full => Some(re),
            _ => None,
        };
        let Some(re) = near else {
            let (x, w) = self.gl_sub.on(l, r);
            out.extend(x.into_iter().zip(w));
            return;
        };
        let rho = re.clamp(l, r);
        let cut = if rho - l < 0.1 * len {
            l + len / 3.0
        } else if r - rho < 0.1 * len {
            r - len / 3.0
        } else {
            rho
        };
        self.sub_rule(l, cut, sing, out, depth + 1, full);
        self.sub_rule(cut, r, sing, out, depth + 1, full);
    }
}
