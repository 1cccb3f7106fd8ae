use thiserror::Error;

/// `value > 0`, with NaN rejected.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            constraint: "> 0",
            value,
        })
    }
}

/// `value >= 0`, with NaN rejected.
pub(crate) fn require_nonnegative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            constraint: ">= 0",
            value,
        })
    }
}

/// Errors raised when model inputs violate their domain constraints.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A reflecting-angle set needs at least one configuration.
    #[error("configuration count must be at least 1")]
    EmptyConfigSet,

    /// A scalar parameter left its allowed domain.
    #[error("{name} must satisfy {constraint}, got {value}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// An integer count parameter left its allowed domain.
    #[error("{name} must satisfy {constraint}, got {value}")]
    InvalidCount {
        name: &'static str,
        constraint: &'static str,
        value: usize,
    },

    /// A list that must carry at least one entry was empty.
    #[error("{name} must not be empty")]
    EmptyList { name: &'static str },

    /// Energy and lifetime are undefined for a device in outage.
    #[error("transmit power must be finite and nonnegative, got {value} W")]
    NonFinitePower { value: f64 },

    /// A grid cell index outside the map.
    #[error("cell index ({radial}, {angular}) out of range for a {n_d}x{n_theta} grid")]
    CellIndexOutOfRange {
        radial: usize,
        angular: usize,
        n_d: usize,
        n_theta: usize,
    },
}
