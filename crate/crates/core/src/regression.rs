//! Cross-sectional regression of state income per capita on temperature,
//! fitted as a quadratic in the temperature deviation from the national mean.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

const STATES_CSV: &str = include_str!("../data/states.csv");
const STATES_SHA256: &str = "76d1174200fe0c2ae64589744ccf4e0e032362bfe1a55075b99a3bf4465ccd97";

/// Name of the national aggregate row.
pub const AGGREGATE: &str = "USA";
/// Tolerance on `gsp_percap = 1000 gsp_bn / pop_mn`, USD. Four printed rows
/// are off by up to 2.4 USD.
pub const PER_CAPITA_TOLERANCE: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressionError {
    #[error("embedded state table checksum mismatch: {0}")]
    Checksum(String),
    #[error("state table row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("need at least 3 records, got {0}")]
    TooFew(usize),
    #[error("singular design: the squared temperature deviations carry no variation")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StateRecord {
    pub state: String,
    /// Mean annual temperature, degrees C.
    pub temp_c: f64,
    /// Gross state product, billions USD.
    pub gsp_bn: f64,
    /// Population, millions.
    pub pop_mn: f64,
    /// USD per person.
    pub gsp_percap: f64,
    /// Deviation from the national mean temperature, degrees C.
    pub dtemp: f64,
    /// Deviation from national GSP per capita, USD.
    pub dgsp_percap: f64,
}

impl StateRecord {
    pub fn is_aggregate(&self) -> bool {
        self.state == AGGREGATE
    }
}

/// The embedded table: 48 states and the national row, in table order.
pub fn load_states() -> Result<Vec<StateRecord>, RegressionError> {
    let digest = hex::encode(Sha256::digest(STATES_CSV.as_bytes()));
    if digest != STATES_SHA256 {
        return Err(RegressionError::Checksum(digest));
    }
    let mut rdr = csv::Reader::from_reader(STATES_CSV.as_bytes());
    let records: Vec<StateRecord> = rdr
        .deserialize()
        .enumerate()
        .map(|(row, r)| {
            r.map_err(|e| RegressionError::Row {
                row,
                reason: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    let usa = records
        .iter()
        .find(|r| r.is_aggregate())
        .ok_or_else(|| RegressionError::Row {
            row: records.len(),
            reason: "national row missing".into(),
        })?
        .clone();
    for (row, r) in records.iter().enumerate() {
        let implied = r.gsp_bn * 1000.0 / r.pop_mn;
        if (implied - r.gsp_percap).abs() > PER_CAPITA_TOLERANCE {
            return Err(RegressionError::Row {
                row,
                reason: format!("{}: GSP per capita {} but {implied:.1} implied", r.state, r.gsp_percap),
            });
        }
        if (r.temp_c - usa.temp_c - r.dtemp).abs() > 0.051 {
            return Err(RegressionError::Row {
                row,
                reason: format!("{}: temperature deviation inconsistent", r.state),
            });
        }
        if (r.gsp_percap - usa.gsp_percap - r.dgsp_percap).abs() > 1.01 {
            return Err(RegressionError::Row {
                row,
                reason: format!("{}: income deviation inconsistent", r.state),
            });
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Unweighted,
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitVariant {
    pub weighting: Weighting,
    pub intercept: bool,
}

impl FitVariant {
    pub const ALL: [FitVariant; 4] = [
        FitVariant {
            weighting: Weighting::Unweighted,
            intercept: true,
        },
        FitVariant {
            weighting: Weighting::Unweighted,
            intercept: false,
        },
        FitVariant {
            weighting: Weighting::Population,
            intercept: true,
        },
        FitVariant {
            weighting: Weighting::Population,
            intercept: false,
        },
    ];
}

impl fmt::Display for FitVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = match self.weighting {
            Weighting::Unweighted => "unweighted",
            Weighting::Population => "population-weighted",
        };
        let i = if self.intercept {
            "with-intercept"
        } else {
            "through-origin"
        };
        write!(f, "{w}/{i}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFit {
    /// Income deviation as a fraction of the national mean per degree C squared.
    pub beta: f64,
    pub intercept: f64,
    /// Share of the (weighted) variance of the income deviations about their
    /// mean explained by the fit, floored at 0.
    pub r_squared: f64,
    /// Observed minus fitted income deviation per state, USD.
    pub residuals: Vec<f64>,
    pub variant: FitVariant,
    /// National GSP per capita used to normalise the deviations, USD.
    pub national_mean: f64,
}

impl QuadraticFit {
    /// Fitted income deviation as a fraction of the national mean.
    pub fn predict(&self, dtemp: f64) -> f64 {
        self.intercept + self.beta * dtemp * dtemp
    }
}

/// Least-squares fit of `dgsp_percap / national mean` on `dtemp^2`. The
/// aggregate row, if present, supplies the national mean and is excluded
/// from the fit; otherwise the population-weighted mean is used.
pub fn fit(records: &[StateRecord], variant: FitVariant) -> Result<QuadraticFit, RegressionError> {
    let states: Vec<&StateRecord> = records.iter().filter(|r| !r.is_aggregate()).collect();
    if states.len() < 3 {
        return Err(RegressionError::TooFew(states.len()));
    }
    let national_mean = match records.iter().find(|r| r.is_aggregate()) {
        Some(usa) => usa.gsp_percap,
        None => {
            let pop: f64 = states.iter().map(|r| r.pop_mn).sum();
            states.iter().map(|r| r.gsp_percap * r.pop_mn).sum::<f64>() / pop
        }
    };
    let x: Vec<f64> = states.iter().map(|r| r.dtemp * r.dtemp).collect();
    let y: Vec<f64> = states.iter().map(|r| r.dgsp_percap / national_mean).collect();
    let w: Vec<f64> = match variant.weighting {
        Weighting::Unweighted => vec![1.0; states.len()],
        Weighting::Population => states.iter().map(|r| r.pop_mn).collect(),
    };
    let sw: f64 = w.iter().sum();
    let wmean = |v: &[f64]| v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (x_bar, y_bar) = (wmean(&x), wmean(&y));

    let (beta, intercept) = if variant.intercept {
        let sxx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * (xi - x_bar).powi(2)).sum();
        let sxy: f64 = (0..x.len()).map(|i| w[i] * (x[i] - x_bar) * (y[i] - y_bar)).sum();
        if sxx <= f64::EPSILON * x_bar.abs().max(1.0) * sw {
            return Err(RegressionError::Singular);
        }
        let beta = sxy / sxx;
        (beta, y_bar - beta * x_bar)
    } else {
        let sxx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi * xi).sum();
        if sxx == 0.0 {
            return Err(RegressionError::Singular);
        }
        let sxy: f64 = (0..x.len()).map(|i| w[i] * x[i] * y[i]).sum();
        (sxy / sxx, 0.0)
    };

    let fitted: Vec<f64> = x.iter().map(|xi| intercept + beta * xi).collect();
    let ssr: f64 = (0..y.len()).map(|i| w[i] * (y[i] - fitted[i]).powi(2)).sum();
    let sst: f64 = (0..y.len()).map(|i| w[i] * (y[i] - y_bar).powi(2)).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let residuals = (0..y.len()).map(|i| (y[i] - fitted[i]) * national_mean).collect();
    Ok(QuadraticFit {
        beta,
        intercept,
        r_squared,
        residuals,
        variant,
        national_mean,
    })
}

/// Fit every variant and return the one closest to the published pair
/// (`beta`, `r_squared`), measured in relative terms.
pub fn detect_variant(records: &[StateRecord], beta: f64, r_squared: f64) -> Result<QuadraticFit, RegressionError> {
    let mut best: Option<(f64, QuadraticFit)> = None;
    for v in FitVariant::ALL {
        let f = fit(records, v)?;
        let d = ((f.beta - beta) / beta).powi(2) + ((f.r_squared - r_squared) / r_squared).powi(2);
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, f));
        }
    }
    Ok(best.expect("four variants").1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimVerdict {
    /// The fitted magnitude exceeds the DICE coefficient.
    Holds,
    Fails,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiceComparison {
    pub fit_magnitude: f64,
    pub dice_a: f64,
    pub verdict: ClaimVerdict,
}

/// Compare `|beta|` with a DICE quadratic damage coefficient.
pub fn compare_to_dice(fit: &QuadraticFit, dice_a: f64) -> DiceComparison {
    let m = fit.beta.abs();
    let verdict = if m == dice_a {
        ClaimVerdict::Tie
    } else if m > dice_a {
        ClaimVerdict::Holds
    } else {
        ClaimVerdict::Fails
    };
    DiceComparison {
        fit_magnitude: m,
        dice_a,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PINNED: FitVariant = FitVariant {
        weighting: Weighting::Unweighted,
        intercept: false,
    };

    fn state(name: &str, dtemp: f64, dgsp: f64, pop: f64) -> StateRecord {
        StateRecord {
            state: name.into(),
            temp_c: 11.5 + dtemp,
            gsp_bn: (33206.0 + dgsp) * pop / 1000.0,
            pop_mn: pop,
            gsp_percap: 33206.0 + dgsp,
            dtemp,
            dgsp_percap: dgsp,
        }
    }

    fn usa() -> StateRecord {
        state(AGGREGATE, 0.0, 0.0, 300.0)
    }

    #[test]
    fn table_rows() {
        let recs = load_states().unwrap();
        assert_eq!(recs.len(), 49);
        assert_eq!(recs.iter().filter(|r| r.is_aggregate()).count(), 1);
        let get = |n: &str| recs.iter().find(|r| r.state == n).unwrap();
        let md = get("Maryland");
        assert_eq!((md.gsp_percap, md.dgsp_percap, md.dtemp), (33274.0, 67.0, 0.8));
        let us = get(AGGREGATE);
        assert_eq!(
            (us.dtemp, us.dgsp_percap, us.temp_c, us.gsp_percap),
            (0.0, 0.0, 11.5, 33206.0)
        );
        assert_eq!(get("Florida").dtemp, 10.0);
        assert!(recs.iter().all(|r| r.state != "Alaska" && r.state != "Hawaii"));
    }

    #[test]
    fn published_coefficient_and_fit_quality() {
        let recs = load_states().unwrap();
        let f = fit(&recs, PINNED).unwrap();
        // closed-form least squares on the table, computed independently
        assert!((f.beta - -0.003_179_594_713_658_694).abs() < 1e-15);
        assert!((f.r_squared - 0.091_455_916_981_900_92).abs() < 1e-12);
        assert!((f.beta - -0.00318).abs() < 1e-5);
        assert_eq!(f.residuals.len(), 48);
    }

    #[test]
    fn detection_picks_the_pinned_variant() {
        let recs = load_states().unwrap();
        let f = detect_variant(&recs, -0.00318, 0.10).unwrap();
        assert_eq!(f.variant, PINNED);
    }

    #[test]
    fn all_variants_are_in_range() {
        let recs = load_states().unwrap();
        for v in FitVariant::ALL {
            let f = fit(&recs, v).unwrap();
            assert!((0.0..=1.0).contains(&f.r_squared), "{v}");
            assert!(f.beta < 0.0, "{v}");
            if v.intercept {
                let pop: Vec<f64> = recs.iter().filter(|r| !r.is_aggregate()).map(|r| r.pop_mn).collect();
                let total: f64 = match v.weighting {
                    Weighting::Unweighted => f.residuals.iter().sum(),
                    Weighting::Population => f.residuals.iter().zip(&pop).map(|(r, p)| r * p).sum(),
                };
                assert!(total.abs() < 1e-6, "{v}: {total}");
            }
        }
    }

    #[test]
    fn exact_quadratic_is_recovered() {
        let mut recs: Vec<StateRecord> = [-6.0, -3.0, -1.0, 0.5, 2.0, 4.0, 7.0]
            .iter()
            .enumerate()
            .map(|(i, &d)| state(&format!("S{i}"), d, -0.00318 * d * d * 33206.0, 1.0 + i as f64))
            .collect();
        recs.push(usa());
        for v in FitVariant::ALL {
            let f = fit(&recs, v).unwrap();
            assert!((f.beta - -0.00318).abs() < 1e-13, "{v}");
            assert!(f.residuals.iter().all(|r| r.abs() < 1e-10 * 33206.0));
            if v.intercept {
                assert!((f.r_squared - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_signal() {
        let mut recs: Vec<StateRecord> = [-2.0, 1.0, 3.0, 5.0]
            .iter()
            .enumerate()
            .map(|(i, &d)| state(&format!("S{i}"), d, 0.0, 1.0))
            .collect();
        recs.push(usa());
        let f = fit(&recs, PINNED).unwrap();
        assert_eq!((f.beta, f.r_squared), (0.0, 0.0));
        for r in recs.iter_mut().filter(|r| !r.is_aggregate()) {
            r.dgsp_percap = 500.0;
        }
        let f = fit(
            &recs,
            FitVariant {
                weighting: Weighting::Unweighted,
                intercept: true,
            },
        )
        .unwrap();
        assert!(f.beta.abs() < 1e-15);
        assert_eq!(f.r_squared, 0.0);
    }

    #[test]
    fn degenerate_designs() {
        let two = vec![state("A", 1.0, 1.0, 1.0), state("B", 2.0, 2.0, 1.0)];
        assert_eq!(fit(&two, PINNED), Err(RegressionError::TooFew(2)));
        let flat: Vec<StateRecord> = (0..4).map(|i| state(&format!("S{i}"), 0.0, 10.0, 1.0)).collect();
        assert_eq!(fit(&flat, PINNED), Err(RegressionError::Singular));
        let same: Vec<StateRecord> = (0..4).map(|i| state(&format!("S{i}"), 2.0, i as f64, 1.0)).collect();
        assert_eq!(
            fit(
                &same,
                FitVariant {
                    weighting: Weighting::Population,
                    intercept: true
                }
            ),
            Err(RegressionError::Singular)
        );
    }

    #[test]
    fn rescaling_and_permutation() {
        let recs = load_states().unwrap();
        let v = FitVariant {
            weighting: Weighting::Unweighted,
            intercept: true,
        };
        let base = fit(&recs, v).unwrap();
        let scaled: Vec<StateRecord> = recs
            .iter()
            .map(|r| StateRecord {
                dgsp_percap: 3.0 * r.dgsp_percap,
                ..r.clone()
            })
            .collect();
        let s = fit(&scaled, v).unwrap();
        assert!((s.r_squared - base.r_squared).abs() < 1e-12);
        assert!((s.beta - 3.0 * base.beta).abs() < 1e-15);

        let mut rev = recs.clone();
        rev.reverse();
        for v in FitVariant::ALL {
            let a = fit(&recs, v).unwrap();
            let b = fit(&rev, v).unwrap();
            assert!((a.beta - b.beta).abs() <= 1e-12 * a.beta.abs());
            assert!((a.r_squared - b.r_squared).abs() < 1e-13);
        }
    }

    #[test]
    fn comparison_with_dice() {
        let recs = load_states().unwrap();
        let f = fit(&recs, PINNED).unwrap();
        assert_eq!(compare_to_dice(&f, 0.00227).verdict, ClaimVerdict::Holds);
        let weak = QuadraticFit {
            beta: -0.001,
            ..f.clone()
        };
        assert_eq!(compare_to_dice(&weak, 0.00227).verdict, ClaimVerdict::Fails);
        let tie = QuadraticFit { beta: -0.00227, ..f };
        assert_eq!(compare_to_dice(&tie, 0.00227).verdict, ClaimVerdict::Tie);
    }
}
