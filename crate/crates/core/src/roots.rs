//! Zero search for holomorphic functions on rectangles: winding numbers on the
//! boundary, recursive subdivision, Newton polishing.

use crate::{Error, Result, C64};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_max > re_min && im_max > im_min) {
            return Err(Error::Domain("degenerate rectangle".into()));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn diam(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn quarters(&self) -> [Rect; 4] {
        let c = self.center();
        [
            Rect { re_min: self.re_min, re_max: c.re, im_min: self.im_min, im_max: c.im },
            Rect { re_min: c.re, re_max: self.re_max, im_min: self.im_min, im_max: c.im },
            Rect { re_min: self.re_min, re_max: c.re, im_min: c.im, im_max: self.im_max },
            Rect { re_min: c.re, re_max: self.re_max, im_min: c.im, im_max: self.im_max },
        ]
    }

    /// Counterclockwise boundary polyline with `n` points per side.
    pub fn boundary(&self, n: usize) -> Vec<C64> {
        let corners = [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ];
        let mut pts = Vec::with_capacity(4 * n);
        for k in 0..4 {
            let (a, b) = (corners[k], corners[(k + 1) % 4]);
            for i in 0..n {
                pts.push(a + (b - a) * (i as f64 / n as f64));
            }
        }
        pts
    }
}

/// Winding number of f around the closed polyline, with adaptive refinement of
/// steps whose phase jump exceeds π/4. Errors if f gets too close to zero on the path.
/// The polyline vertices are evaluated on the rayon pool.
pub fn winding(f: &(dyn Fn(C64) -> Result<C64> + Sync), path: &[C64]) -> Result<i64> {
    let vals: Vec<C64> = path.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let n = path.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (path[k], path[(k + 1) % n]);
        total += arg_increment(f, a, b, vals[k], vals[(k + 1) % n], 0)?;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn arg_increment(f: &dyn Fn(C64) -> Result<C64>, a: C64, b: C64, fa: C64, fb: C64, depth: u32) -> Result<f64> {
    if fa.norm() == 0.0 || fb.norm() == 0.0 {
        return Err(Error::singular(a, "zero on the winding path"));
    }
    let d = (fb / fa).arg();
    if d.abs() < PI / 4.0 {
        return Ok(d);
    }
    if depth > 24 {
        return Err(Error::singular(a, "winding refinement exhausted"));
    }
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    Ok(arg_increment(f, a, m, fa, fm, depth + 1)? + arg_increment(f, m, b, fm, fb, depth + 1)?)
}

/// Central-difference complex Newton on f, with relative step `h_rel`.
pub fn newton(f: &dyn Fn(C64) -> Result<C64>, z0: C64, tol: f64, max_iter: usize, h_rel: f64) -> Result<C64> {
    let mut z = z0;
    for _ in 0..max_iter {
        let fz = f(z)?;
        let h = h_rel * z.norm().max(1.0);
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() {
            break;
        }
        let step = fz / d;
        z -= step;
        if step.norm() < tol * z.norm().max(1.0) {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence { re: z0.re, im: z0.im })
}

/// Outcome of a box search.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSearch {
    /// winding count of the whole region
    pub count: i64,
    /// polished roots (deduplicated)
    pub roots: Vec<C64>,
    /// seeds that did not converge, kept for reporting
    pub failures: Vec<C64>,
}

/// Count zeros of f in `region` by the argument principle (assumes no poles inside),
/// subdivide boxes carrying nonzero winding until they are small, then polish
/// their centers with Newton on `g` (typically f itself or log f). Boxes with
/// winding one are polished as soon as Newton converges inside them.
pub fn box_search(
    f: &(dyn Fn(C64) -> Result<C64> + Sync),
    newton_fn: &(dyn Fn(C64) -> Result<C64> + Sync),
    region: Rect,
    side_pts: usize,
    min_diam: f64,
    tol: f64,
) -> Result<BoxSearch> {
    let count = winding(f, &region.boundary(side_pts))?;
    let mut stack = vec![(region, count)];
    let mut seeds = Vec::new();
    let mut roots: Vec<C64> = Vec::new();
    while let Some((r, w)) = stack.pop() {
        if w == 0 {
            continue;
        }
        if w == 1 {
            // a single zero: Newton from the centre usually lands inside the box already
            if let Ok(z) = newton(newton_fn, r.center(), tol, 30, 1e-6) {
                if r.contains(z) {
                    roots.push(z);
                    continue;
                }
            }
        }
        if r.diam() < min_diam || w < 0 {
            seeds.push((r, w));
            continue;
        }
        let mut sum = 0;
        let mut sub = Vec::new();
        for q in r.quarters() {
            match winding(f, &q.boundary(side_pts)) {
                Ok(k) => {
                    sum += k;
                    sub.push((q, k));
                }
                Err(_) => {
                    // zero on an inner edge: shrink no further, seed from the parent
                    sub.clear();
                    break;
                }
            }
        }
        if sub.is_empty() || sum != w {
            seeds.push((r, w));
        } else {
            stack.extend(sub);
        }
    }
    let mut failures = Vec::new();
    seeds.sort_by(|a, b| {
        (a.0.center().re, a.0.center().im).partial_cmp(&(b.0.center().re, b.0.center().im)).unwrap()
    });
    for (r, _) in seeds {
        match newton(newton_fn, r.center(), tol, 60, 1e-6) {
            Ok(z) if region.contains(z) => {
                if !roots.iter().any(|&q| (q - z).norm() < 1e-7 * z.norm().max(1.0)) {
                    roots.push(z);
                }
            }
            _ => failures.push(r.center()),
        }
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    Ok(BoxSearch { count, roots, failures })
}

/// Locate a simple pole of F from samples of 1/F on rings: Newton steps using the
/// ring mean and first Fourier mode. Returns the pole estimate.
pub fn ring_pole(inv: &dyn Fn(C64) -> Result<C64>, center: C64, radius: f64, n: usize, iters: usize) -> Result<C64> {
    let mut c = center;
    for _ in 0..iters {
        let mut m0 = C64::new(0.0, 0.0);
        let mut m1 = C64::new(0.0, 0.0);
        for k in 0..n {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            let u = inv(c + e * radius)?;
            m0 += u;
            m1 += u / e;
        }
        m0 /= n as f64;
        m1 /= n as f64 * radius;
        let step = m0 / m1;
        c -= step;
        if step.norm() < 1e-15 * c.norm().max(1.0) {
            break;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_polishes_polynomial_roots() {
        let r = [C64::new(0.3, -0.2), C64::new(-0.5, 0.4), C64::new(0.7, 0.7)];
        let f = move |z: C64| -> Result<C64> { Ok(r.iter().map(|&a| z - a).product()) };
        let reg = Rect::new(-1.0, 1.0, -1.0, 0.5).unwrap();
        let out = box_search(&f, &f, reg, 64, 0.1, 1e-14).unwrap();
        assert_eq!(out.count, 2);
        assert_eq!(out.roots.len(), 2);
        for z in &out.roots {
            assert!((z - r[0]).norm() < 1e-12 || (z - r[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_region() {
        let f = |z: C64| -> Result<C64> { Ok(z - C64::new(5.0, 5.0)) };
        let out = box_search(&f, &f, Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 32, 0.1, 1e-12).unwrap();
        assert_eq!(out.count, 0);
        assert!(out.roots.is_empty());
    }

    #[test]
    fn ring_pole_finds_simple_pole() {
        let p = C64::new(1.0, -0.5);
        let inv = move |z: C64| -> Result<C64> { Ok((z - p) * (z + 3.0)) };
        let est = ring_pole(&inv, p + C64::new(1e-3, 2e-3), 1e-2, 32, 6).unwrap();
        assert!((est - p).norm() < 1e-13);
    }
}
