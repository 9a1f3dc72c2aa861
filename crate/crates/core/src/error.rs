use thiserror::Error;

/// Errors raised by synthesis and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("{name} = {value} is outside {allowed}")]
    Domain {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    /// Sampling or carrier configuration that cannot produce a synchronous waveform.
    #[error("configuration: {0}")]
    Config(String),

    /// A ratio against the fundamental was requested but the fundamental is zero.
    #[error("{0} is undefined for a zero fundamental")]
    UndefinedMeasure(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(name: &'static str, value: f64, allowed: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        allowed,
    }
}
