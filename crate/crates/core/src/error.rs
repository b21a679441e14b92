use thiserror::Error;

use crate::sdp::SdpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The linearisation `A0` is not Hurwitz at this reference speed.
    #[error("reference speed {v_ref} lies in the unstable zone [{lo}, {hi}]")]
    UnstableZone { v_ref: f64, lo: f64, hi: f64 },

    #[error("error-dynamics matrix is not Hurwitz (max real part {max_real})")]
    NotHurwitz { max_real: f64 },

    /// No certificate was found under the solver budget. This is not a proof
    /// that none exists.
    #[error("failed to certify: {0}")]
    NotCertified(String),

    #[error(transparent)]
    Sdp(#[from] SdpError),
}

impl Error {
    /// True for inputs that violate an operation's preconditions, as opposed
    /// to a well-posed problem the solver could not certify.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::UnstableZone { .. } | Error::NotHurwitz { .. }
        )
    }
}
