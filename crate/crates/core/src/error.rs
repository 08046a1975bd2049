use thiserror::Error;

use crate::series::HalfExp;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient at exponent {exponent} is unknown (series truncated at {trunc_order})")]
    OutOfRange { exponent: HalfExp, trunc_order: HalfExp },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported weight {0}; only 2, 4 and 6 are available")]
    UnsupportedWeight(u32),

    #[error("unknown form name `{0}`")]
    UnknownForm(String),

    #[error("tail majorant diverges: ratio {0} cannot be brought below 1")]
    Divergent(String),

    #[error("polynomial vanishes at interval endpoint {0}")]
    EndpointRoot(String),

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("requested {requested} digits but the truncation order supports about {available}")]
    PrecisionUnachievable { requested: u32, available: u32 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("branch certification failed: {0}")]
    Certification(String),
}
