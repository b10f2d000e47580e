//! Witnesses showing the KM and Halpern rates cannot be improved in general:
//! the right shift on ℓ¹ and a family of planar rotations.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{BoundReport, BoundRow};
use crate::error::Result;
use crate::geometry::ModelSpace;
use crate::iteration::{halpern_run, km_run, AnchorConvention, IterationConfig, Schedule};
use crate::operators::{OperatorSpec, SeqSpace, SeqVector};

pub const RIGHT_SHIFT_HORIZON: usize = 500;
pub const RIGHT_SHIFT_TOL: f64 = 1e-12;
pub const ROTATION_MAX_N: usize = 200;
pub const ROTATION_TOL: f64 = 1e-9;

/// KM with `λ = 1/2` on the right shift from `e₁`. Each row stores the lower
/// bound `1/√(n+1)` as `observed` and the residual as `bound`, so a negative
/// margin means the residual fell below the lower bound.
pub fn right_shift_report(horizon: usize, tol: f64) -> Result<BoundReport> {
    let space = SeqSpace::for_horizon(horizon);
    let cfg = IterationConfig::new(SeqVector::basis(space.len, 0), horizon, Schedule::constant(0.5));
    let trace = km_run(&space, &OperatorSpec::RightShift, &cfg)?;
    let rows = trace
        .rows
        .iter()
        .map(|r| BoundRow::new(r.n, 1.0 / ((r.n + 1) as f64).sqrt(), r.residual))
        .collect();
    Ok(BoundReport::from_rows(rows, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationOutcome {
    /// Both conventions produce the same iterates and match.
    Coincident,
    Unique(AnchorConvention),
    Neither,
    /// The conventions differ and yet both match.
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationCase {
    pub n: usize,
    pub expected: f64,
    /// Residual at step `n` for each entry of [`AnchorConvention::BOTH`].
    pub residuals: [f64; 2],
    pub outcome: RotationOutcome,
}

/// Halpern on `planar_rotation(π/(n+1))` with `λ_k = k/(k+1)` and
/// `u = x₀ = (1, 0)`, under both anchor conventions.
pub fn rotation_case(n: usize, tol: f64) -> Result<RotationCase> {
    let space = ModelSpace::euclidean(2)?;
    let x0 = space.point(vec![1.0, 0.0])?;
    let op = OperatorSpec::PlanarRotation {
        angle: PI / (n as f64 + 1.0),
    };
    let expected = 2.0 / (n as f64 + 1.0);
    let mut residuals = [0.0; 2];
    let mut iterates = Vec::with_capacity(2);
    for (slot, conv) in AnchorConvention::BOTH.into_iter().enumerate() {
        let cfg = IterationConfig::new(x0.clone(), n, Schedule::KmRatio)
            .with_anchor(x0.clone())
            .with_convention(conv)
            .storing_iterates();
        let trace = halpern_run(&space, &op, &cfg)?;
        residuals[slot] = trace.last().residual;
        iterates.push(trace.rows.into_iter().map(|r| r.iterate).collect::<Vec<_>>());
    }
    let hits = residuals.map(|r| (r - expected).abs() <= tol);
    let outcome = match hits {
        [true, true] if iterates[0] == iterates[1] => RotationOutcome::Coincident,
        [true, true] => RotationOutcome::Both,
        [true, false] => RotationOutcome::Unique(AnchorConvention::BOTH[0]),
        [false, true] => RotationOutcome::Unique(AnchorConvention::BOTH[1]),
        [false, false] => RotationOutcome::Neither,
    };
    Ok(RotationCase {
        n,
        expected,
        residuals,
        outcome,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RotationReport {
    pub cases: Vec<RotationCase>,
    /// Convention that alone matched wherever the conventions differ.
    pub convention_selected: Option<AnchorConvention>,
    pub consistent: bool,
}

impl RotationReport {
    pub fn failures(&self) -> Vec<&RotationCase> {
        self.cases
            .iter()
            .filter(|c| match c.outcome {
                RotationOutcome::Coincident => false,
                RotationOutcome::Unique(conv) => Some(conv) != self.convention_selected,
                _ => true,
            })
            .collect()
    }
}

/// Runs [`rotation_case`] for `n = 0..=max_n` in parallel.
pub fn rotation_report(max_n: usize, tol: f64) -> Result<RotationReport> {
    let cases = (0..=max_n)
        .into_par_iter()
        .map(|n| rotation_case(n, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut selected: Vec<AnchorConvention> = cases
        .iter()
        .filter_map(|c| match c.outcome {
            RotationOutcome::Unique(conv) => Some(conv),
            _ => None,
        })
        .collect();
    selected.dedup();
    let clean = cases
        .iter()
        .all(|c| !matches!(c.outcome, RotationOutcome::Neither | RotationOutcome::Both));
    let convention_selected = (selected.len() == 1).then(|| selected[0]);
    Ok(RotationReport {
        consistent: clean && convention_selected.is_some(),
        cases,
        convention_selected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub right_shift: BoundReport,
    pub rotation: RotationReport,
}

impl SharpnessReport {
    pub fn pass(&self) -> bool {
        !self.right_shift.violated && self.rotation.consistent
    }
}

pub fn sharpness_suite() -> Result<SharpnessReport> {
    let (right_shift, rotation) = rayon::join(
        || right_shift_report(RIGHT_SHIFT_HORIZON, RIGHT_SHIFT_TOL),
        || rotation_report(ROTATION_MAX_N, ROTATION_TOL),
    );
    Ok(SharpnessReport {
        right_shift: right_shift?,
        rotation: rotation?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_shift_first_step() {
        let r = right_shift_report(3, RIGHT_SHIFT_TOL).unwrap();
        assert_eq!(r.rows[1].bound, 1.0);
        assert!((r.rows[1].observed - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(!r.violated);
    }

    #[test]
    fn rotation_small_cases() {
        let c = rotation_case(1, ROTATION_TOL).unwrap();
        assert_eq!(c.expected, 1.0);
        assert_eq!(c.outcome, RotationOutcome::Coincident);
        let c = rotation_case(3, ROTATION_TOL).unwrap();
        assert_eq!(c.expected, 0.5);
        assert_eq!(
            c.outcome,
            RotationOutcome::Unique(AnchorConvention::AnchorWeightOneMinusLambda)
        );
    }

    #[test]
    fn rotation_report_selects_one_convention() {
        let r = rotation_report(30, ROTATION_TOL).unwrap();
        assert!(r.consistent);
        assert_eq!(
            r.convention_selected,
            Some(AnchorConvention::AnchorWeightOneMinusLambda)
        );
        assert!(r.failures().is_empty());
    }
}
