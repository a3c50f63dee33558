use thiserror::Error;

/// Domain errors raised by the model's state-transition functions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfBounds {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("period {period} is outside the time grid ({periods} periods)")]
    Period { period: usize, periods: usize },
    #[error("control path has {got} periods, expected {expected}")]
    ControlLength { got: usize, expected: usize },
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}
