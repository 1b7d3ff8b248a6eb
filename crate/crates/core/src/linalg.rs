//! Thin helpers over nalgebra for dense complex systems.

use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    let lu = a.clone().lu();
    lu.solve(b)
        .ok_or_else(|| Error::Singular { re: f64::NAN, im: f64::NAN, what: "lu solve".into() })
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    solve(a, &CMat::identity(a.nrows(), a.ncols()))
}

/// log det via LU with partial pivoting; the imaginary part is not reduced mod 2π.
pub fn log_det(a: &CMat) -> C64 {
    let lu = a.clone().lu();
    let u = lu.u();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        s += u[(i, i)].ln();
    }
    // permutation sign
    if lu.p().determinant::<f64>() < 0.0 {
        s += C64::new(0.0, std::f64::consts::PI);
    }
    s
}

pub fn det(a: &CMat) -> C64 {
    a.clone().lu().determinant()
}

/// Singular values, descending.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let sv = a.clone().svd(false, false).singular_values;
    let mut v: Vec<f64> = sv.iter().copied().collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    v
}

/// Smallest singular value and its right singular vector.
pub fn null_direction(a: &CMat) -> (f64, CVec) {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let (k, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let v: CVec = vt.row(k).transpose().map(|x| x.conj());
    (smin, v)
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}

/// Spectral norm (largest singular value).
pub fn norm2(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logdet_matches_det() {
        let a = CMat::from_fn(4, 4, |i, j| C64::new((i * 3 + j) as f64 * 0.1 + if i == j { 1.0 } else { 0.0 }, (i as f64 - j as f64) * 0.2));
        let d = det(&a);
        let l = log_det(&a).exp();
        assert!((d - l).norm() < 1e-12 * d.norm().max(1.0));
    }

    #[test]
    fn null_direction_of_rank_deficient() {
        let mut a = CMat::identity(3, 3);
        a[(2, 2)] = C64::new(0.0, 0.0);
        a[(0, 2)] = C64::new(1.0, 1.0);
        let (s, v) = null_direction(&a);
        assert!(s < 1e-14);
        assert!((&a * &v).norm() < 1e-13);
    }
}
