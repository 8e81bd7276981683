//! Both sides of the KMS-type inequalities on the torus, constant
//! estimates, refinement studies, the necessity demonstration for the
//! correction term and the explicit Curl kernel cross-check.

mod config;
mod estimate;
mod necessity;
mod riesz;
mod sides;

pub use config::{ConfigEcho, InequalityConfig, InequalityId, NormKind, INEQUALITY_NAMES};
pub use estimate::{
    estimate_constant, p1_probe, refinement_study, ConstantEstimate, FieldDescriptor, FieldFamily,
    GeneratorSummary, P1ProbeReport, RefinementEntry, RefinementReport, TrialResult,
};
pub use necessity::{find_witness, necessity_demo, NecessityOutcome, NecessityReport, Witness};
pub use riesz::{
    curl_riesz_crosscheck, default_evaluation_points, default_quadrature_grid, riesz_closed_form,
    symbol_deviation, CrosscheckMode, KernelConstants, RieszCrosscheck,
};
pub use sides::{
    measure, ratio, ratio_serde, PreparedInequality, Sides, CLASSIFY_SEED, LHS_ZERO, RHS_NEGLIGIBLE, RHS_ZERO,
};
