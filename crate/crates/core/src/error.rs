use thiserror::Error;

/// Errors raised by bank construction, operator application, and tree
/// enumeration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed filter bank: {0}")]
    MalformedBank(String),

    #[error("channel {channel} out of range for a {n_channels}-channel bank")]
    ChannelOutOfRange { channel: usize, n_channels: usize },

    #[error("window {window} is not invariant under the restricted adjoints (need at least {required})")]
    WindowTooSmall { window: i64, required: i64 },

    #[error("enumerating {leaves} leaves exceeds the cap of {cap}")]
    DepthOverflow { leaves: u64, cap: u64 },

    #[error("vector norm {norm} is not within tolerance of 1")]
    NotUnitVector { norm: f64 },

    #[error("measures disagree in base or depth: ({base_a},{depth_a}) vs ({base_b},{depth_b})")]
    DepthMismatch {
        base_a: u32,
        depth_a: u32,
        base_b: u32,
        depth_b: u32,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
