use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The mixture is a single translated Gaussian; use the closed form instead.
    #[error("degenerate mixture (p in {{0, 1}} or a = b): the measure is a translated standard Gaussian; use the Gaussian fast path")]
    Degenerate,

    #[error("volume {v} outside the profile domain [{lo}, {hi}]")]
    VolumeOutOfRange { v: f64, lo: f64, hi: f64 },

    #[error("no tie locus in bracket ({p_lo}, {p_hi}) at d = {d}")]
    NoTieLocus { d: f64, p_lo: f64, p_hi: f64 },

    #[error("Cheeger set is not unique at d_hi = {d_hi} for p = {p}; retry with a larger d_hi")]
    NotUniqueAtUpperBound { p: f64, d_hi: f64 },
}
