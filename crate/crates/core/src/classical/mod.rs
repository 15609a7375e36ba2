//! Mean-field (DNLSE) dynamics, stability of the Bloch-oscillating
//! solution and the truncated-Husimi ensemble.

mod field;
mod husimi;
mod integrate;
mod stability;

pub use field::ClassicalField;
pub use husimi::{ensemble_evolve, sample_husimi_bec, EnsembleRecord, HusimiEnsemble, LambdaConvention};
pub use integrate::{default_classical_dt, integrate, lyapunov_max, IntegrateOptions, Splitting, TrajectoryResult};
pub use stability::{
    critical_field, monodromy, monodromy_with_tolerance, periodic_solution, CriticalField, MonodromyResult, Stability};
