//! Unit conversions shared by the economy and climate blocks.
//!
//! | quantity            | unit                       |
//! |---------------------|----------------------------|
//! | output, capital     | trillions of 2005 USD (/yr) |
//! | population          | billions                   |
//! | per-capita values   | thousands of 2005 USD/yr   |
//! | emissions           | GtCO2/yr                   |
//! | carbon reservoirs   | GtC                        |
//! | prices              | USD per tCO2               |

/// USD/tCO2 times GtCO2 gives 1e9 USD, i.e. 1e-3 trillion USD.
pub const PRICE_TIMES_GTCO2_IN_TRILLIONS: f64 = 1e-3;

/// Trillion USD per GtCO2 expressed in USD per tCO2.
pub const TRILLIONS_PER_GTCO2_IN_USD_PER_T: f64 = 1e3;

/// Trillions of USD per billion people in USD per person.
pub const PER_CAPITA_USD: f64 = 1e3;
