//! Rate bounds for KM, Halpern and viscosity iterations, and checkers that
//! compare traces against them.

mod bounds;
mod recursion;
mod report;
mod sharpness;
mod viscosity;

pub use bounds::{km_bound, km_bound_report, literature_bound, LiteratureBound};
pub use recursion::{
    c_recursion_report, c_table, c_table_with_limit, p_n_report, p_n_sequence, pi_weights, pn_bound_report,
    CTable, PiWeights, PnSequence, DEFAULT_C_LIMIT,
};
pub use report::{BoundReport, BoundRow, ReportSummary, BOUND_TOL};
pub use sharpness::{
    right_shift_report, rotation_case, rotation_report, sharpness_suite, RotationCase, RotationOutcome,
    RotationReport, SharpnessReport, RIGHT_SHIFT_HORIZON, RIGHT_SHIFT_TOL, ROTATION_MAX_N, ROTATION_TOL,
};
pub use viscosity::{
    visc_bound_report, visc_boundedness_report, visc_constants, ViscosityConstants, ViscosityReport,
};
