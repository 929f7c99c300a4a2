//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar input violated its domain (non-positive frequency, negative
    /// rate, ...).
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A tabulated field profile failed validation or parsing.
    #[error("invalid field profile: {0}")]
    InvalidProfile(String),

    /// The time-domain integrator produced a non-finite amplitude.
    #[error("integration diverged (non-finite amplitude at t = {time_s:.3e} s)")]
    Divergence { time_s: f64 },

    /// Bandwidth is undefined because the peak conversion efficiency is zero.
    #[error("bandwidth undefined: peak efficiency is zero")]
    UndefinedBandwidth,

    /// A resolution threshold outside (0, eta(0)).
    #[error("invalid threshold {threshold:.6e}: must lie in (0, {limit:.6e})")]
    InvalidThreshold { threshold: f64, limit: f64 },

    /// A noise spectrum was requested at zero pump strength.
    #[error("division guard: {0}")]
    DivisionGuard(&'static str),

    /// Config file or override parsing failure, with location when known.
    #[error("config error: {0}")]
    Config(String),

    #[error("unknown figure `{0}`")]
    UnknownFigure(String),

    #[error("unknown sweep target `{0}`")]
    UnknownTarget(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Process exit code for the CLI: 1 validation failure, 2 usage/config,
    /// 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            Error::Config(_)
            | Error::UnknownFigure(_)
            | Error::UnknownTarget(_)
            | Error::Usage(_)
            | Error::InvalidParameter { .. }
            | Error::InvalidProfile(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
