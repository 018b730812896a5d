//! Error norms, reference solutions, experiment presets and report output.

mod experiment;
mod norms;
mod output;
mod presets;
mod reference;

pub use experiment::{
    dt_study, h_study, reference_for, run_experiment, run_method, run_methods, run_preset, test1_mesh_sizes,
    test1_time_steps, ExperimentReport, MethodOptions, MethodRun, StudyPoint, OSCILLATION_TOL,
};
pub use norms::{convergence_order, error_norms, error_norms_exact, sign_changes, value_range, ErrorReport};
pub use output::{report_rows, write_report_csv, write_report_json, write_solution_csv};
pub use presets::{BcKind, ExperimentPreset, IcKind, Method, PresetId, PublishedErrors, ReferenceKind};
pub use reference::{exact_history, exponential_solution, refined_reference, REFERENCE_REFINEMENT};
