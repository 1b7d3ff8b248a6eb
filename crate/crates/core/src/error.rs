use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("point on a cut: {0}")]
    OnCut(String),
    #[error("singular system near z = {re} + {im}i ({what})")]
    Singular { re: f64, im: f64, what: String },
    #[error("sheet violation: {0}")]
    Sheet(String),
    #[error("path violation: {0}")]
    Path(String),
    #[error("newton did not converge from seed {re} + {im}i")]
    NoConvergence { re: f64, im: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn singular(z: num_complex::Complex64, what: &str) -> Self {
        Error::Singular { re: z.re, im: z.im, what: what.to_string() }
    }
}
