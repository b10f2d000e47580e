use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Step coefficients `λ_k` (or `α_k`), indexed from `k = 1`: `λ₁` weights the
/// first update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    Constant {
        value: f64,
    },
    /// `1/(k+1)`.
    Harmonic,
    /// `k^{−θ}`.
    Power {
        theta: f64,
    },
    /// `k/(k+1)`.
    KmRatio,
    /// `min{2/((1−β)k), 1}`.
    Viscosity {
        beta: f64,
    },
    /// Explicit values `λ₁, λ₂, …`; the last entry repeats past the end.
    Table {
        values: Vec<f64>,
    },
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Constant { value }
    }

    /// Coefficient `λ_k`, `k ≥ 1`.
    pub fn value(&self, k: usize) -> f64 {
        assert!(k >= 1, "schedules are indexed from 1");
        let kf = k as f64;
        match self {
            Schedule::Constant { value } => *value,
            Schedule::Harmonic => 1.0 / (kf + 1.0),
            Schedule::Power { theta } => kf.powf(-theta),
            Schedule::KmRatio => kf / (kf + 1.0),
            Schedule::Viscosity { beta } => (2.0 / ((1.0 - beta) * kf)).min(1.0),
            Schedule::Table { values } => values[(k - 1).min(values.len() - 1)],
        }
    }

    pub fn values(&self, horizon: usize) -> Vec<f64> {
        (1..=horizon).map(|k| self.value(k)).collect()
    }

    /// Parameter sanity, independent of any horizon.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSchedule(msg));
        match self {
            Schedule::Constant { value } if !(0.0..=1.0).contains(value) => {
                bad(format!("constant value {value} outside [0, 1]"))
            }
            Schedule::Power { theta } if !(*theta > 0.0 && theta.is_finite()) => {
                bad(format!("power exponent {theta} must be positive"))
            }
            Schedule::Viscosity { beta } if !(0.0..1.0).contains(beta) => {
                bad(format!("viscosity beta {beta} outside [0, 1)"))
            }
            Schedule::Table { values } if values.is_empty() => bad("empty table".into()),
            Schedule::Table { values } if values.iter().any(|v| !(0.0..=1.0).contains(v)) => {
                bad("table values must lie in [0, 1]".into())
            }
            _ => Ok(()),
        }
    }

    /// Check that `λ₁ … λ_horizon` all lie in `(0, 1)` (`open`) or `[0, 1]`.
    pub fn check_range(&self, horizon: usize, open: bool) -> Result<()> {
        self.validate()?;
        for k in 1..=horizon {
            let v = self.value(k);
            let ok = if open {
                v > 0.0 && v < 1.0
            } else {
                (0.0..=1.0).contains(&v)
            };
            if !ok {
                let range = if open { "(0, 1)" } else { "[0, 1]" };
                return Err(Error::InvalidSchedule(format!(
                    "lambda_{k} = {v} outside {range}"
                )));
            }
        }
        Ok(())
    }
}

/// Finite-horizon indicators for the classical step-size conditions.
///
/// These are diagnostics computed on `λ₁ … λ_N`, not proofs of the limits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDiagnostics {
    pub horizon: usize,
    /// `λ_N`; C1 asks for `λ_n → 0`.
    pub last: f64,
    /// `Σ λ_k` (C2).
    pub sum: f64,
    /// `Σ λ_k(1 − λ_k)` (divergence condition of the KM iteration).
    pub sum_km: f64,
    /// `Σ |λ_{k+1} − λ_k|` (C4).
    pub total_variation: f64,
    /// `max |λ_{k+1} − λ_k| / λ_{k+1}` over the last tenth of the horizon (C5).
    pub c5_tail_max: f64,
    /// `last ≤ 0.1`.
    pub c1_plausible: bool,
}

pub fn schedule_diagnostics(s: &Schedule, horizon: usize) -> Result<ScheduleDiagnostics> {
    if horizon < 10 {
        return Err(Error::InvalidSchedule(format!(
            "diagnostics need a horizon of at least 10, got {horizon}"
        )));
    }
    s.validate()?;
    let v = s.values(horizon);
    let sum = v.iter().sum();
    let sum_km = v.iter().map(|l| l * (1.0 - l)).sum();
    let total_variation = v.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let tail_start = horizon - horizon / 10;
    let c5_tail_max = v
        .windows(2)
        .skip(tail_start.saturating_sub(1))
        .map(|w| {
            let d = (w[1] - w[0]).abs();
            if d == 0.0 {
                0.0
            } else {
                d / w[1]
            }
        })
        .fold(0.0, f64::max);
    let last = v[horizon - 1];
    Ok(ScheduleDiagnostics {
        horizon,
        last,
        sum,
        sum_km,
        total_variation,
        c5_tail_max,
        c1_plausible: last <= 0.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_are_one_indexed() {
        assert_eq!(Schedule::Harmonic.value(1), 0.5);
        assert_eq!(Schedule::KmRatio.value(3), 0.75);
        assert_eq!(Schedule::Power { theta: 0.5 }.value(4), 0.5);
        assert_eq!(Schedule::Viscosity { beta: 0.5 }.value(1), 1.0);
        assert_eq!(Schedule::Viscosity { beta: 0.5 }.value(8), 0.5);
        let t = Schedule::Table {
            values: vec![0.2, 0.4],
        };
        assert_eq!((t.value(1), t.value(2), t.value(9)), (0.2, 0.4, 0.4));
    }

    #[test]
    #[should_panic]
    fn index_zero_panics() {
        Schedule::Harmonic.value(0);
    }

    #[test]
    fn range_checks() {
        assert!(Schedule::constant(0.5).check_range(10, true).is_ok());
        assert!(Schedule::constant(1.0).check_range(10, true).is_err());
        assert!(Schedule::constant(1.0).check_range(10, false).is_ok());
        assert!(Schedule::Power { theta: 0.5 }.check_range(3, true).is_err());
        assert!(Schedule::Viscosity { beta: 1.0 }.validate().is_err());
        assert!(Schedule::Table { values: vec![] }.validate().is_err());
        assert!(Schedule::constant(-0.1).validate().is_err());
    }

    #[test]
    fn harmonic_diagnostics() {
        let n = 10_000;
        let d = schedule_diagnostics(&Schedule::Harmonic, n).unwrap();
        // oracle: Σ_{k=1}^{N} 1/(k+1) = H_{N+1} − 1, accumulated from the small end
        let oracle: f64 = (2..=n + 1).rev().map(|j| 1.0 / j as f64).sum();
        assert!((d.sum - oracle).abs() < 1e-12);
        let euler = 0.577_215_664_901_532_9;
        assert!((d.sum - ((n as f64).ln() + euler - 1.0)).abs() < 1e-3);
        // telescoping: 1/2 − 1/(N+1)
        assert!((d.total_variation - (0.5 - 1.0 / (n as f64 + 1.0))).abs() < 1e-12);
        assert!(d.total_variation < 1.0);
        assert!(d.c1_plausible);
    }

    #[test]
    fn constant_and_km_ratio_flag_c1() {
        let d = schedule_diagnostics(&Schedule::constant(0.5), 100).unwrap();
        assert_eq!(d.last, 0.5);
        assert!(!d.c1_plausible);
        assert_eq!(d.sum_km, 25.0);
        assert_eq!(d.total_variation, 0.0);
        let k = schedule_diagnostics(&Schedule::KmRatio, 100).unwrap();
        assert!(k.last > 0.99 && !k.c1_plausible);
        assert!(schedule_diagnostics(&Schedule::Harmonic, 9).is_err());
    }

    #[test]
    fn serde_shape() {
        let s: Schedule = serde_json::from_str(r#"{"kind":"constant","value":0.25}"#).unwrap();
        assert_eq!(s, Schedule::constant(0.25));
        let v = serde_json::to_string(&Schedule::Viscosity { beta: 0.5 }).unwrap();
        assert_eq!(v, r#"{"kind":"viscosity","beta":0.5}"#);
    }
}
