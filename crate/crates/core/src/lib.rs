//! A DICE-style climate-economy integrated assessment engine.
//!
//! The crate covers the coupled carbon-cycle, temperature and growth
//! dynamics ([`climate`], [`economy`]), a library of damage functions
//! ([`damage`]), the optimal-control problem over savings and abatement
//! ([`control`]), the continuous-time Ramsey model ([`ramsey`]) and a
//! cross-sectional temperature/income regression ([`regression`]).

pub mod climate;
pub mod config;
pub mod control;
pub mod damage;
pub mod economy;
pub mod error;
pub mod figures;
pub mod output;
pub mod plot;
pub mod ramsey;
pub mod regression;
pub mod units;

pub use config::{load_config, ModelConfig};
pub use error::ModelError;
