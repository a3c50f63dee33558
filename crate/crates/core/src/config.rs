//! Scenario configuration and exogenous time paths.
//!
//! A scenario file is a TOML document overlaid on the checked-in defaults
//! (`data/dice2016r.toml`). Keys that do not exist in the defaults are
//! rejected, so a typo can never silently fall back to a default value.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::{Table, Value};

use crate::damage::{DamageSection, DamageSpec};
use crate::regression::FitVariant;

/// The DICE-2016R defaults, embedded at compile time.
pub const DEFAULTS_TOML: &str = include_str!("../data/dice2016r.toml");

/// Keys a scenario may set even though the defaults file does not.
const OPTIONAL_KEYS: &[&str] = &[
    "damage.b",
    "damage.kappa1",
    "damage.kappa2",
    "damage.power",
    "abatement.initial_rate",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed scenario file: {0}")]
    Parse(String),
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("key `{key}` expects {expected}, found {found}")]
    Schema {
        key: String,
        expected: String,
        found: String,
    },
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    /// The dotted key the error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key } | ConfigError::Schema { key, .. } | ConfigError::Invalid { key, .. } => {
                Some(key)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start_year: i32,
    pub step_years: u32,
    pub periods: usize,
}

impl TimeGrid {
    pub fn step(&self) -> f64 {
        f64::from(self.step_years)
    }

    pub fn year(&self, period: usize) -> i32 {
        self.start_year + (period as i32) * self.step_years as i32
    }

    /// Years elapsed since the start of the grid.
    pub fn elapsed(&self, period: usize) -> f64 {
        period as f64 * self.step()
    }

    pub fn years(&self) -> Vec<i32> {
        (0..self.periods).map(|t| self.year(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preferences {
    pub elasticity: f64,
    pub time_preference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Production {
    pub capital_share: f64,
    pub depreciation: f64,
    pub initial_capital: f64,
}

/// Population approaching its asymptote: `L(t+1) = L(t) (asymptote / L(t))^adjustment`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub initial: f64,
    pub asymptote: f64,
    pub adjustment: f64,
}

/// TFP with a per-period growth rate that declines exponentially:
/// `g(t) = growth e^(-decline * step * t)`, `A(t+1) = A(t) / (1 - g(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TfpSpec {
    pub initial: f64,
    pub growth: f64,
    pub decline: f64,
}

/// Carbon intensity with a decelerating rate of decline:
/// `sigma(t+1) = sigma(t) e^(g(t) step)`, `g(t+1) = g(t) (1 + decline)^step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensitySpec {
    pub initial: f64,
    pub growth: f64,
    pub decline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandEmissionsSpec {
    pub initial: f64,
    /// Continuous decay rate per year.
    pub decay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackstopSpec {
    pub initial: f64,
    /// Continuous decline rate per year.
    pub decline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbatementSpec {
    pub exponent: f64,
    /// Emissions-reduction rate imposed in the first period; the optimiser
    /// treats it as free when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_rate: Option<f64>,
}

/// Upper bound on the emissions-reduction rate: `before` until `switch_year`,
/// `after` from then on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuCapSchedule {
    pub before: f64,
    pub after: f64,
    pub switch_year: i32,
}

impl MuCapSchedule {
    pub fn at_year(&self, year: i32) -> f64 {
        if year < self.switch_year {
            self.before
        } else {
            self.after
        }
    }
}

/// Exponential carbon-price ceiling used by the baseline scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceCap {
    pub initial: f64,
    pub growth: f64,
}

impl PriceCap {
    pub fn at(&self, elapsed_years: f64) -> f64 {
        self.initial * (self.growth * elapsed_years).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonCycleSpec {
    pub gtco2_per_gtc: f64,
    pub initial_atmosphere: f64,
    pub initial_upper: f64,
    pub initial_lower: f64,
    pub equilibrium_atmosphere: f64,
    pub equilibrium_upper: f64,
    pub equilibrium_lower: f64,
    pub atmosphere_to_upper: f64,
    pub upper_to_lower: f64,
    pub preindustrial_atmosphere: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSpec {
    pub forcing_per_doubling: f64,
    pub sensitivity: f64,
    pub upper_response: f64,
    pub exchange: f64,
    pub lower_response: f64,
    pub initial_atmosphere_temp: f64,
    pub initial_ocean_temp: f64,
    pub exo_forcing_initial: f64,
    pub exo_forcing_final: f64,
    pub exo_forcing_ramp_periods: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerminalSavings {
    /// Number of final periods whose savings rate is frozen.
    pub periods: usize,
    /// Long-run growth used in the steady-state savings rate.
    pub growth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Floors {
    pub capital: f64,
    pub consumption: f64,
}

/// All structural parameters and time-grid settings of the coupled model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema_version: u32,
    pub grid: TimeGrid,
    pub preferences: Preferences,
    pub production: Production,
    pub population: PopulationSpec,
    pub tfp: TfpSpec,
    pub carbon_intensity: IntensitySpec,
    pub land_emissions: LandEmissionsSpec,
    pub backstop: BackstopSpec,
    pub abatement: AbatementSpec,
    pub mu_cap: MuCapSchedule,
    pub carbon_price_cap: PriceCap,
    pub carbon: CarbonCycleSpec,
    pub climate: TemperatureSpec,
    #[serde(with = "damage_section")]
    pub damage: DamageSpec,
    pub terminal: TerminalSavings,
    pub floors: Floors,
    /// Variant of the state income/temperature regression reported by default.
    pub regression: FitVariant,
}

mod damage_section {
    use super::*;

    pub fn serialize<S: serde::Serializer>(spec: &DamageSpec, s: S) -> Result<S::Ok, S::Error> {
        DamageSection::from(*spec).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<DamageSpec, D::Error> {
        let section = DamageSection::deserialize(d)?;
        DamageSpec::try_from(section).map_err(serde::de::Error::custom)
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::from_toml_str("").expect("embedded defaults are valid")
    }
}

impl ModelConfig {
    /// Parse a scenario document, overlay it on the defaults and validate.
    pub fn from_toml_str(scenario: &str) -> Result<Self, ConfigError> {
        let mut base: Table = DEFAULTS_TOML
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("defaults: {e}")))?;
        let over: Table = scenario
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
        overlay(&mut base, over, "")?;
        let config: ModelConfig = Value::Table(base)
            .try_into()
            .map_err(|e: toml::de::Error| map_deserialize_error(e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn alpha(&self) -> f64 {
        self.preferences.elasticity
    }
    pub fn rho(&self) -> f64 {
        self.preferences.time_preference
    }
    pub fn gamma(&self) -> f64 {
        self.production.capital_share
    }
    pub fn delta(&self) -> f64 {
        self.production.depreciation
    }
    pub fn theta2(&self) -> f64 {
        self.abatement.exponent
    }

    /// Copy of this configuration with a different damage coefficient `a`.
    pub fn with_damage_coefficient(&self, a: f64) -> Result<Self, ConfigError> {
        let mut c = self.clone();
        c.damage = c.damage.with_coefficient(a)?;
        c.validate()?;
        Ok(c)
    }

    /// Canonical TOML rendering (all keys, fixed order).
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical rendering, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.grid;
        if g.step_years < 1 {
            return Err(ConfigError::invalid("grid.step_years", "must be at least 1"));
        }
        if g.periods < 2 {
            return Err(ConfigError::invalid("grid.periods", "must be at least 2"));
        }
        positive("preferences.elasticity", self.preferences.elasticity)?;
        positive("preferences.time_preference", self.preferences.time_preference)?;
        open_unit("production.capital_share", self.production.capital_share)?;
        open_unit("production.depreciation", self.production.depreciation)?;
        positive("production.initial_capital", self.production.initial_capital)?;

        let p = &self.population;
        positive("population.initial", p.initial)?;
        positive("population.asymptote", p.asymptote)?;
        if p.asymptote <= p.initial {
            return Err(ConfigError::invalid(
                "population.asymptote",
                "must exceed the initial population",
            ));
        }
        if !(p.adjustment > 0.0 && p.adjustment <= 1.0) {
            return Err(ConfigError::invalid("population.adjustment", "must lie in (0, 1]"));
        }
        positive("tfp.initial", self.tfp.initial)?;
        open_unit("tfp.growth", self.tfp.growth)?;
        non_negative("tfp.decline", self.tfp.decline)?;

        let s = &self.carbon_intensity;
        positive("carbon_intensity.initial", s.initial)?;
        if !(s.growth.is_finite() && s.growth < 0.0) {
            return Err(ConfigError::invalid(
                "carbon_intensity.growth",
                "must be negative (intensity declines)",
            ));
        }
        if !(s.decline.is_finite() && s.decline > -1.0) {
            return Err(ConfigError::invalid("carbon_intensity.decline", "must exceed -1"));
        }
        positive("land_emissions.initial", self.land_emissions.initial)?;
        non_negative("land_emissions.decay", self.land_emissions.decay)?;
        positive("backstop.initial", self.backstop.initial)?;
        non_negative("backstop.decline", self.backstop.decline)?;
        if !(self.abatement.exponent.is_finite() && self.abatement.exponent > 1.0) {
            return Err(ConfigError::invalid(
                "abatement.exponent",
                "abatement cost convexity requires theta2 > 1",
            ));
        }

        let m = &self.mu_cap;
        for (key, v) in [("mu_cap.before", m.before), ("mu_cap.after", m.after)] {
            if !(v.is_finite() && v > 0.0 && v <= 1.2) {
                return Err(ConfigError::invalid(key, "must lie in (0, 1.2]"));
            }
        }
        if let Some(mu0) = self.abatement.initial_rate {
            if !(mu0.is_finite() && mu0 >= 0.0 && mu0 <= m.at_year(g.start_year)) {
                return Err(ConfigError::invalid(
                    "abatement.initial_rate",
                    "must lie between 0 and the first-period cap",
                ));
            }
        }
        if m.after < m.before {
            return Err(ConfigError::invalid(
                "mu_cap.after",
                "cap schedule must be non-decreasing",
            ));
        }
        non_negative("carbon_price_cap.initial", self.carbon_price_cap.initial)?;
        finite("carbon_price_cap.growth", self.carbon_price_cap.growth)?;

        let c = &self.carbon;
        for (key, v) in [
            ("carbon.gtco2_per_gtc", c.gtco2_per_gtc),
            ("carbon.initial_atmosphere", c.initial_atmosphere),
            ("carbon.initial_upper", c.initial_upper),
            ("carbon.initial_lower", c.initial_lower),
            ("carbon.equilibrium_atmosphere", c.equilibrium_atmosphere),
            ("carbon.equilibrium_upper", c.equilibrium_upper),
            ("carbon.equilibrium_lower", c.equilibrium_lower),
            ("carbon.preindustrial_atmosphere", c.preindustrial_atmosphere),
        ] {
            positive(key, v)?;
        }
        open_unit("carbon.atmosphere_to_upper", c.atmosphere_to_upper)?;
        open_unit("carbon.upper_to_lower", c.upper_to_lower)?;
        let b21 = c.atmosphere_to_upper * c.equilibrium_atmosphere / c.equilibrium_upper;
        if b21 + c.upper_to_lower >= 1.0 {
            return Err(ConfigError::invalid(
                "carbon.atmosphere_to_upper",
                "implied upper-reservoir retention is negative",
            ));
        }

        let k = &self.climate;
        positive("climate.forcing_per_doubling", k.forcing_per_doubling)?;
        positive("climate.sensitivity", k.sensitivity)?;
        for (key, v) in [
            ("climate.upper_response", k.upper_response),
            ("climate.exchange", k.exchange),
            ("climate.lower_response", k.lower_response),
        ] {
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                return Err(ConfigError::invalid(key, "must lie in (0, 1]"));
            }
        }
        finite("climate.initial_atmosphere_temp", k.initial_atmosphere_temp)?;
        finite("climate.initial_ocean_temp", k.initial_ocean_temp)?;
        finite("climate.exo_forcing_initial", k.exo_forcing_initial)?;
        finite("climate.exo_forcing_final", k.exo_forcing_final)?;

        self.damage.validate()?;

        if self.terminal.periods >= g.periods {
            return Err(ConfigError::invalid(
                "terminal.periods",
                "must be smaller than grid.periods",
            ));
        }
        non_negative("terminal.growth", self.terminal.growth)?;
        positive("floors.capital", self.floors.capital)?;
        positive("floors.consumption", self.floors.consumption)?;
        Ok(())
    }
}

/// Load a scenario file and overlay it on the defaults.
pub fn load_config(path: impl AsRef<Path>) -> Result<ModelConfig, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    ModelConfig::from_toml_str(&text)
}

fn overlay(base: &mut Table, over: Table, prefix: &str) -> Result<(), ConfigError> {
    for (k, v) in over {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match base.get_mut(&k) {
            None => {
                if OPTIONAL_KEYS.contains(&key.as_str()) {
                    let v = as_float(&key, v)?;
                    base.insert(k, v);
                } else {
                    return Err(ConfigError::UnknownKey { key });
                }
            }
            Some(Value::Table(inner)) => match v {
                Value::Table(t) => overlay(inner, t, &key)?,
                other => {
                    return Err(ConfigError::Schema {
                        key,
                        expected: "table".into(),
                        found: other.type_str().into(),
                    })
                }
            },
            Some(slot) => {
                let replaced = match (&*slot, v) {
                    (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
                    (cur, v) if cur.same_type(&v) => v,
                    (cur, v) => {
                        return Err(ConfigError::Schema {
                            key,
                            expected: cur.type_str().into(),
                            found: v.type_str().into(),
                        })
                    }
                };
                *slot = replaced;
            }
        }
    }
    Ok(())
}

fn as_float(key: &str, v: Value) -> Result<Value, ConfigError> {
    match v {
        Value::Float(_) => Ok(v),
        Value::Integer(i) => Ok(Value::Float(i as f64)),
        other => Err(ConfigError::Schema {
            key: key.to_string(),
            expected: "float".into(),
            found: other.type_str().into(),
        }),
    }
}

fn map_deserialize_error(e: toml::de::Error) -> ConfigError {
    // Damage-section errors are produced by DamageSpec::try_from and already
    // name their key.
    let msg = e.message().to_string();
    match msg.split_once("`damage.") {
        Some((_, rest)) => {
            let key = rest.split('`').next().unwrap_or_default();
            ConfigError::Invalid {
                key: format!("damage.{key}"),
                reason: msg.clone(),
            }
        }
        None => ConfigError::Parse(msg),
    }
}

fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "must be finite"))
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "must be positive and finite"))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "must be non-negative and finite"))
    }
}

fn open_unit(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ConfigError::invalid(key, "must lie in (0, 1)"))
    }
}

/// Per-period exogenous inputs, one entry per grid period.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousPaths {
    pub years: Vec<i32>,
    /// Population, billions.
    pub population: Vec<f64>,
    pub tfp: Vec<f64>,
    /// Carbon intensity, tCO2 per 1000 USD (GtCO2 per trillion USD).
    pub sigma: Vec<f64>,
    /// Land-use emissions, GtCO2/yr.
    pub land_emissions: Vec<f64>,
    /// Backstop price, USD/tCO2.
    pub backstop_price: Vec<f64>,
    pub mu_cap: Vec<f64>,
}

impl ExogenousPaths {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }
}

/// Generate the exogenous paths for every period of the grid.
pub fn exogenous_paths(config: &ModelConfig) -> Result<ExogenousPaths, ConfigError> {
    config.validate()?;
    let grid = config.grid;
    let n = grid.periods;
    let step = grid.step();

    let mut population = Vec::with_capacity(n);
    let p = config.population;
    let mut l = p.initial;
    for _ in 0..n {
        population.push(l);
        l *= (p.asymptote / l).powf(p.adjustment);
    }

    let mut tfp = Vec::with_capacity(n);
    let a = config.tfp;
    let mut level = a.initial;
    for t in 0..n {
        tfp.push(level);
        let g = a.growth * (-a.decline * step * t as f64).exp();
        level /= 1.0 - g;
    }

    let mut sigma = Vec::with_capacity(n);
    let s = config.carbon_intensity;
    let mut level = s.initial;
    let mut g = s.growth;
    for _ in 0..n {
        sigma.push(level);
        level *= (g * step).exp();
        g *= (1.0 + s.decline).powf(step);
    }

    let land_emissions = (0..n)
        .map(|t| config.land_emissions.initial * (-config.land_emissions.decay * grid.elapsed(t)).exp())
        .collect();
    let backstop_price = (0..n)
        .map(|t| config.backstop.initial * (-config.backstop.decline * grid.elapsed(t)).exp())
        .collect();
    let years = grid.years();
    let mu_cap = years.iter().map(|&y| config.mu_cap.at_year(y)).collect();

    let paths = ExogenousPaths {
        years,
        population,
        tfp,
        sigma,
        land_emissions,
        backstop_price,
        mu_cap,
    };
    for (name, v) in [
        ("population", &paths.population),
        ("tfp", &paths.tfp),
        ("carbon_intensity", &paths.sigma),
        ("land_emissions", &paths.land_emissions),
        ("backstop", &paths.backstop_price),
    ] {
        if let Some(bad) = v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(ConfigError::invalid(
                name,
                format!("path becomes non-positive or non-finite at period {bad}"),
            ));
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn empty_scenario_is_the_default() {
        let c = ModelConfig::from_toml_str("").unwrap();
        assert_eq!(c, ModelConfig::default());
        assert_eq!(c.damage.coefficient(), Some(0.00236));
        assert_eq!(c.grid.periods, 100);
        assert_eq!(c.grid.year(99), 2510);
    }

    #[test]
    fn overriding_the_damage_coefficient_changes_only_that() {
        let c = ModelConfig::from_toml_str("[damage]\na = 0.16236\n").unwrap();
        let d = ModelConfig::default();
        assert_eq!(c.damage.coefficient(), Some(0.16236));
        let mut c2 = c.clone();
        c2.damage = d.damage;
        assert_eq!(c2, d);
        assert_eq!(c, d.with_damage_coefficient(0.16236).unwrap());
    }

    #[test]
    fn theta2_below_one_is_rejected() {
        let err = ModelConfig::from_toml_str("[abatement]\nexponent = 0.5\n").unwrap_err();
        assert_eq!(err.key(), Some("abatement.exponent"));
        assert!(matches!(err, ConfigError::Invalid { .. }));
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = ModelConfig::from_toml_str("[production]\ncapital_shar = 0.3\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                key: "production.capital_shar".into()
            }
        );
        let err = ModelConfig::from_toml_str("bogus = 1\n").unwrap_err();
        assert_eq!(err.key(), Some("bogus"));
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let err = ModelConfig::from_toml_str("[grid]\nperiods = \"many\"\n").unwrap_err();
        assert!(matches!(err, ConfigError::Schema { ref key, .. } if key == "grid.periods"));
        // integers are accepted where floats are expected
        let c = ModelConfig::from_toml_str("[backstop]\ninitial = 600\n").unwrap();
        assert_eq!(c.backstop.initial, 600.0);
    }

    #[test]
    fn land_emissions_without_decay_are_constant() {
        let c = ModelConfig::from_toml_str("[land_emissions]\ninitial = 2.6\ndecay = 0.0\n").unwrap();
        let p = exogenous_paths(&c).unwrap();
        assert!(p.land_emissions.iter().all(|&e| e == 2.6));
    }

    #[test]
    fn backstop_price_decays_continuously() {
        let c = ModelConfig::from_toml_str("[backstop]\ninitial = 550.0\ndecline = 0.005\n").unwrap();
        let p = exogenous_paths(&c).unwrap();
        // 550 e^-0.025 evaluated by hand
        assert!(approx(p.backstop_price[1], 536.420, 1e-3), "{}", p.backstop_price[1]);
    }

    #[test]
    fn mu_cap_switches_in_2160() {
        let p = exogenous_paths(&ModelConfig::default()).unwrap();
        for (y, cap) in p.years.iter().zip(&p.mu_cap) {
            let expected = if *y < 2160 { 1.0 } else { 1.2 };
            assert_eq!(*cap, expected, "year {y}");
        }
        assert_eq!(p.years[29], 2160);
    }

    #[test]
    fn default_paths_have_the_documented_shape() {
        let p = exogenous_paths(&ModelConfig::default()).unwrap();
        assert_eq!(p.len(), 100);
        for t in 1..p.len() {
            assert!(p.population[t] > p.population[t - 1]);
            assert!(p.population[t] < 11.5);
            assert!(p.tfp[t] > p.tfp[t - 1]);
            assert!(p.sigma[t] < p.sigma[t - 1]);
            assert!(p.land_emissions[t] < p.land_emissions[t - 1]);
            assert!(p.backstop_price[t] < p.backstop_price[t - 1]);
        }
        for t in 2..p.len() {
            let g1 = p.population[t] / p.population[t - 1];
            let g0 = p.population[t - 1] / p.population[t - 2];
            assert!(g1 <= g0);
        }
    }

    #[test]
    fn paths_are_deterministic() {
        let c = ModelConfig::default();
        let a = exogenous_paths(&c).unwrap();
        let b = exogenous_paths(&c).unwrap();
        for (x, y) in a.tfp.iter().zip(&b.tfp) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(c.hash(), ModelConfig::default().hash());
        assert_ne!(c.hash(), c.with_damage_coefficient(0.1).unwrap().hash());
    }

    #[test]
    fn canonical_toml_round_trips() {
        let c = ModelConfig::default().with_damage_coefficient(0.18236).unwrap();
        let back = ModelConfig::from_toml_str(&c.to_canonical_toml()).unwrap();
        assert_eq!(back, c);
    }
}
