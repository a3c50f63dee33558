//! Climate damage functions.
//!
//! Every family maps a temperature anomaly to the fraction of gross output
//! lost, `D(dT)`, with `D(0) = 0`. The DICE vintages are listed in
//! [`nordhaus_genealogy`]; the published tables print `1 - D(dT)`.

mod estimates;

pub use estimates::{estimate_points, fit_quadratic_to_points, EstimateMethod, EstimatePoint, QuadraticDamageFit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ConfigError;

/// Upper end of the temperature range on which the families are validated.
pub const VALIDATED_MAX_TEMP: f64 = 20.0;

/// Largest damage fraction the engine will use; evaluations above are clamped
/// and flagged.
pub const MAX_DAMAGE_FRACTION: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DamageError {
    #[error("temperature anomaly must be a non-negative finite number, got {0}")]
    NegativeAnomaly(f64),
    #[error("need at least one estimate point with non-zero warming")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DamageFamily {
    /// `D = a dT^2` (DICE 2016R/2017/2018).
    Quadratic { a: f64 },
    /// `1 - D = 1 / (1 + a dT^2)` (DICE 2007/2013).
    RationalQuadratic { a: f64 },
    /// `1 - D = 1 / (1 + b dT + a dT^2)` (DICE 1999).
    RationalLinearQuadratic { a: f64, b: f64 },
    /// `1 - D = 1 / (1 + (a/9) dT^2)`, i.e. the 1992 form written in terms of
    /// `(dT/3)^2`.
    Rational1992 { a: f64 },
    /// `1 - D = 1 / (1 + (dT/kappa1)^2 + (dT/kappa2)^power)`.
    HighConvexity { kappa1: f64, kappa2: f64, power: f64 },
}

/// Which factor of production climate damages hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DamageChannel {
    #[default]
    Output,
    Capital,
    Tfp,
}

impl DamageChannel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DamageChannel::Output => "output",
            DamageChannel::Capital => "capital",
            DamageChannel::Tfp => "tfp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageSpec {
    pub family: DamageFamily,
    pub channel: DamageChannel,
}

/// Result of a checked damage evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageValue {
    /// `D(dT)` after clamping to `[0, MAX_DAMAGE_FRACTION]`.
    pub fraction: f64,
    /// The unclamped family value.
    pub raw: f64,
    /// Set when the raw value was clamped or `dT` is beyond the validated range.
    pub flagged: bool,
}

impl DamageSpec {
    pub fn quadratic(a: f64) -> Self {
        DamageSpec {
            family: DamageFamily::Quadratic { a },
            channel: DamageChannel::Output,
        }
    }

    pub fn with_channel(mut self, channel: DamageChannel) -> Self {
        self.channel = channel;
        self
    }

    /// The leading coefficient `a`, for the families that have one.
    pub fn coefficient(&self) -> Option<f64> {
        match self.family {
            DamageFamily::Quadratic { a }
            | DamageFamily::RationalQuadratic { a }
            | DamageFamily::RationalLinearQuadratic { a, .. }
            | DamageFamily::Rational1992 { a } => Some(a),
            DamageFamily::HighConvexity { .. } => None,
        }
    }

    /// Same family and channel with a different coefficient `a`.
    pub fn with_coefficient(&self, a: f64) -> Result<Self, ConfigError> {
        let family = match self.family {
            DamageFamily::Quadratic { .. } => DamageFamily::Quadratic { a },
            DamageFamily::RationalQuadratic { .. } => DamageFamily::RationalQuadratic { a },
            DamageFamily::RationalLinearQuadratic { b, .. } => DamageFamily::RationalLinearQuadratic { a, b },
            DamageFamily::Rational1992 { .. } => DamageFamily::Rational1992 { a },
            DamageFamily::HighConvexity { .. } => {
                return Err(ConfigError::invalid(
                    "damage.a",
                    "the high-convexity family has no coefficient a",
                ))
            }
        };
        let spec = DamageSpec {
            family,
            channel: self.channel,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let nonneg = |key: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, "must be non-negative and finite"))
            }
        };
        match self.family {
            DamageFamily::Quadratic { a }
            | DamageFamily::RationalQuadratic { a }
            | DamageFamily::Rational1992 { a } => nonneg("damage.a", a),
            DamageFamily::RationalLinearQuadratic { a, b } => {
                nonneg("damage.a", a)?;
                nonneg("damage.b", b)
            }
            DamageFamily::HighConvexity { kappa1, kappa2, power } => {
                for (key, v) in [("damage.kappa1", kappa1), ("damage.kappa2", kappa2)] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(ConfigError::invalid(key, "must be positive"));
                    }
                }
                if !(power.is_finite() && power >= 1.0) {
                    return Err(ConfigError::invalid("damage.power", "must be at least 1"));
                }
                Ok(())
            }
        }
    }

    /// Unclamped `D(dT)` and `dD/ddT` for `dT >= 0`.
    pub fn eval_with_derivative(&self, dt: f64) -> (f64, f64) {
        // q / (1 + q) with q' given
        fn rational(q: f64, dq: f64) -> (f64, f64) {
            let den = 1.0 + q;
            (q / den, dq / (den * den))
        }
        match self.family {
            DamageFamily::Quadratic { a } => (a * dt * dt, 2.0 * a * dt),
            DamageFamily::RationalQuadratic { a } => rational(a * dt * dt, 2.0 * a * dt),
            DamageFamily::RationalLinearQuadratic { a, b } => rational(b * dt + a * dt * dt, b + 2.0 * a * dt),
            DamageFamily::Rational1992 { a } => {
                let c = a / 9.0;
                rational(c * dt * dt, 2.0 * c * dt)
            }
            DamageFamily::HighConvexity { kappa1, kappa2, power } => {
                let x2 = dt / kappa2;
                let q = (dt / kappa1).powi(2) + x2.powf(power);
                let dq = 2.0 * dt / (kappa1 * kappa1) + power * x2.powf(power - 1.0) / kappa2;
                rational(q, dq)
            }
        }
    }

    /// Damage fraction and its temperature derivative as used inside the
    /// simulation: negative anomalies do no harm and values are clamped.
    pub(crate) fn clamped(&self, dt: f64) -> (f64, f64, bool) {
        if dt <= 0.0 {
            return (0.0, 0.0, false);
        }
        let (d, dd) = self.eval_with_derivative(dt);
        if d > MAX_DAMAGE_FRACTION {
            (MAX_DAMAGE_FRACTION, 0.0, true)
        } else {
            (d.max(0.0), dd, dt > VALIDATED_MAX_TEMP)
        }
    }
}

/// `D(dT)`: fraction of gross output lost at anomaly `dt`.
pub fn damage_fraction(spec: &DamageSpec, dt: f64) -> Result<DamageValue, DamageError> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(DamageError::NegativeAnomaly(dt));
    }
    let (raw, _) = spec.eval_with_derivative(dt);
    let fraction = raw.clamp(0.0, MAX_DAMAGE_FRACTION);
    Ok(DamageValue {
        fraction,
        raw,
        flagged: fraction != raw || dt > VALIDATED_MAX_TEMP,
    })
}

/// Inputs after damages have been applied through a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOutcome {
    pub tfp: f64,
    pub capital: f64,
    pub net_output: f64,
}

/// Apply the damage at `dt` through the spec's channel. `gross_output` is the
/// undamaged Cobb-Douglas output at (`tfp`, `capital`).
pub fn damage_channel_apply(
    spec: &DamageSpec,
    dt: f64,
    tfp: f64,
    capital: f64,
    gross_output: f64,
    capital_share: f64,
) -> Result<ChannelOutcome, DamageError> {
    let d = damage_fraction(spec, dt)?.fraction;
    Ok(match spec.channel {
        DamageChannel::Output => ChannelOutcome {
            tfp,
            capital,
            net_output: (1.0 - d) * gross_output,
        },
        DamageChannel::Capital => ChannelOutcome {
            tfp,
            capital: (1.0 - d) * capital,
            net_output: (1.0 - d).powf(capital_share) * gross_output,
        },
        DamageChannel::Tfp => ChannelOutcome {
            tfp: (1.0 - d) * tfp,
            capital,
            net_output: (1.0 - d) * gross_output,
        },
    })
}

/// The published DICE damage specifications, oldest first.
pub fn nordhaus_genealogy() -> Vec<(u16, DamageSpec)> {
    let out = |family| DamageSpec {
        family,
        channel: DamageChannel::Output,
    };
    vec![
        (1992, out(DamageFamily::Rational1992 { a: 0.0133 })),
        (
            1999,
            out(DamageFamily::RationalLinearQuadratic { a: 0.0035, b: 0.0045 }),
        ),
        (2008, out(DamageFamily::RationalQuadratic { a: 0.0028388 })),
        (2013, out(DamageFamily::RationalQuadratic { a: 0.00267 })),
        (2017, out(DamageFamily::Quadratic { a: 0.00236 })),
        (2018, out(DamageFamily::Quadratic { a: 0.00227 })),
    ]
}

/// Raw `[damage]` section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DamageSection {
    pub family: String,
    pub a: f64,
    pub channel: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl TryFrom<DamageSection> for DamageSpec {
    type Error = ConfigError;

    fn try_from(s: DamageSection) -> Result<Self, ConfigError> {
        let need = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| ConfigError::invalid(key, format!("required by family `{}`", s.family)))
        };
        let family = match s.family.as_str() {
            "quadratic" => DamageFamily::Quadratic { a: s.a },
            "rational-quadratic" => DamageFamily::RationalQuadratic { a: s.a },
            "rational-linear-quadratic" => DamageFamily::RationalLinearQuadratic {
                a: s.a,
                b: need("damage.b", s.b)?,
            },
            "rational-1992" => DamageFamily::Rational1992 { a: s.a },
            "high-convexity" => DamageFamily::HighConvexity {
                kappa1: need("damage.kappa1", s.kappa1)?,
                kappa2: need("damage.kappa2", s.kappa2)?,
                power: need("damage.power", s.power)?,
            },
            other => {
                return Err(ConfigError::invalid(
                    "damage.family",
                    format!("unknown family `{other}`"),
                ))
            }
        };
        let channel = match s.channel.as_str() {
            "output" => DamageChannel::Output,
            "capital" => DamageChannel::Capital,
            "tfp" => DamageChannel::Tfp,
            other => {
                return Err(ConfigError::invalid(
                    "damage.channel",
                    format!("unknown channel `{other}`"),
                ))
            }
        };
        let spec = DamageSpec { family, channel };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<DamageSpec> for DamageSection {
    fn from(spec: DamageSpec) -> Self {
        let mut s = DamageSection {
            family: String::new(),
            a: 0.0,
            channel: spec.channel.as_str().to_string(),
            b: None,
            kappa1: None,
            kappa2: None,
            power: None,
        };
        match spec.family {
            DamageFamily::Quadratic { a } => {
                s.family = "quadratic".into();
                s.a = a;
            }
            DamageFamily::RationalQuadratic { a } => {
                s.family = "rational-quadratic".into();
                s.a = a;
            }
            DamageFamily::RationalLinearQuadratic { a, b } => {
                s.family = "rational-linear-quadratic".into();
                s.a = a;
                s.b = Some(b);
            }
            DamageFamily::Rational1992 { a } => {
                s.family = "rational-1992".into();
                s.a = a;
            }
            DamageFamily::HighConvexity { kappa1, kappa2, power } => {
                s.family = "high-convexity".into();
                s.kappa1 = Some(kappa1);
                s.kappa2 = Some(kappa2);
                s.power = Some(power);
            }
        }
        s
    }
}
