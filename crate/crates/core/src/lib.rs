//! Two- and three-body resonances from physical-sheet data.
//!
//! Modules:
//! - [`riemann`]: sheet labels, pasting rules, root-locus geometry.
//! - [`contour`]: quadrature, integration paths, continued free resolvents.
//! - [`twobody`]: pair T-matrix, S-matrix and second-sheet continuation.
//! - [`threebody`]: separable Faddeev (AGS) sector and truncated S-matrices.

pub mod contour;
pub mod error;
pub mod linalg;
pub mod riemann;
pub mod roots;
pub mod threebody;
pub mod twobody;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Square root on the physical sheet: arg(w) taken in [0, 2π), so Im √w ≥ 0.
///
/// On the positive real axis this is the ordinary positive root.
pub fn msqrt(w: C64) -> C64 {
    let r = w.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0 && w.im != 0.0) {
        -r
    } else {
        r
    }
}
