use serde::Serialize;

use super::norms::{error_norms, sign_changes, value_range, ErrorReport};
use super::presets::{ExperimentPreset, Method, PresetId, ReferenceKind};
use super::reference::{exact_history, exponential_solution, refined_reference};
use crate::baselines::{run_galerkin, run_stabilized, StabChoice, StabKind};
use crate::mesh_fem::{NodalField, Problem};
use crate::vms_feasible::{run_feasible, FeasibleConfig, GPairing, KernelProvider};
use crate::vms_full::{run_full, FullVmsConfig, InitialSubgrid};
use crate::Result;

/// Method options that are not part of the physical problem.
#[derive(Clone, Copy)]
pub struct MethodOptions<'a> {
    pub modes: usize,
    pub initial_subgrid: InitialSubgrid,
    pub provider: &'a dyn KernelProvider,
    pub g_pairing: GPairing,
    pub franca_threshold: f64,
}

impl std::fmt::Debug for MethodOptions<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MethodOptions")
            .field("modes", &self.modes)
            .field("initial_subgrid", &self.initial_subgrid)
            .field("provider", &self.provider.name())
            .field("g_pairing", &self.g_pairing)
            .field("franca_threshold", &self.franca_threshold)
            .finish()
    }
}

impl<'a> MethodOptions<'a> {
    pub fn new(provider: &'a dyn KernelProvider) -> Self {
        MethodOptions {
            modes: 10,
            initial_subgrid: InitialSubgrid::Zero,
            provider,
            g_pairing: GPairing::Appendix,
            franca_threshold: 1.0,
        }
    }

    pub fn for_preset(preset: &ExperimentPreset, provider: &'a dyn KernelProvider) -> Self {
        MethodOptions {
            modes: preset.modes,
            initial_subgrid: preset.initial_subgrid,
            ..MethodOptions::new(provider)
        }
    }
}

/// Runs one method over all steps of `problem`; returns N + 1 nodal fields.
pub fn run_method(method: Method, problem: &Problem, opts: &MethodOptions<'_>) -> Result<Vec<NodalField>> {
    match method {
        Method::Galerkin => run_galerkin(problem),
        Method::SpectralFull => {
            let cfg = FullVmsConfig {
                problem: problem.clone(),
                modes: opts.modes,
                initial_subgrid: opts.initial_subgrid,
            };
            Ok(run_full(&cfg)?.nodal)
        }
        Method::SpectralFeasible => {
            let cfg = FeasibleConfig {
                problem: problem.clone(),
                g_pairing: opts.g_pairing,
            };
            run_feasible(&cfg, opts.provider)
        }
        Method::Stabilized(kind) => {
            let choice = match kind {
                StabKind::Franca => StabChoice::franca(opts.franca_threshold)?,
                k => StabChoice::new(k),
            };
            run_stabilized(problem, &choice)
        }
    }
}

/// Reference history of a preset problem (possibly with overridden h, Δt).
pub fn reference_for(preset: &ExperimentPreset, problem: &Problem) -> Result<Vec<NodalField>> {
    match preset.reference {
        ReferenceKind::Exact => Ok(exact_history(problem, exponential_solution(preset.a, preset.mu), &problem.time)),
        ReferenceKind::RefinedGalerkin { factor } => refined_reference(problem, factor),
    }
}

/// Per-method outcome of an experiment.
#[derive(Debug, Clone, Serialize)]
pub struct MethodRun {
    pub method: Method,
    pub errors: ErrorReport,
    pub min: f64,
    pub max: f64,
    /// Sign changes of the nodal differences at the final step.
    pub final_sign_changes: usize,
    #[serde(skip)]
    pub history: Vec<NodalField>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub preset: ExperimentPreset,
    pub provider: String,
    pub runs: Vec<MethodRun>,
    #[serde(skip)]
    pub reference: Vec<NodalField>,
}

impl ExperimentReport {
    pub fn run(&self, method: Method) -> Option<&MethodRun> {
        self.runs.iter().find(|r| r.method == method)
    }

    /// Smallest l∞(L²) error among the stabilised methods.
    pub fn best_stabilized(&self) -> Option<&MethodRun> {
        self.runs
            .iter()
            .filter(|r| matches!(r.method, Method::Stabilized(_)))
            .min_by(|a, b| a.errors.linf_l2.total_cmp(&b.errors.linf_l2))
    }
}

/// Tolerance below which nodal differences are not counted as oscillations.
pub const OSCILLATION_TOL: f64 = 1e-6;

/// Runs every method of the preset and measures it against the reference.
pub fn run_experiment(preset: &ExperimentPreset, opts: &MethodOptions<'_>) -> Result<ExperimentReport> {
    run_methods(preset, &preset.methods, opts)
}

pub fn run_methods(preset: &ExperimentPreset, methods: &[Method], opts: &MethodOptions<'_>) -> Result<ExperimentReport> {
    let problem = preset.problem()?;
    let reference = reference_for(preset, &problem)?;
    let mut runs = Vec::with_capacity(methods.len());
    for &method in methods {
        let history = run_method(method, &problem, opts)?;
        let errors = error_norms(&history, &reference, &problem.mesh, problem.dt())?;
        let (min, max) = history
            .iter()
            .skip(1)
            .map(|u| value_range(u))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d)));
        let final_sign_changes = sign_changes(history.last().expect("at least one field"), OSCILLATION_TOL);
        log::info!("{} {method}: l∞(L²) = {:.4e}, l²(H¹) = {:.4e}", preset.id, errors.linf_l2, errors.l2_h1);
        runs.push(MethodRun {
            method,
            errors,
            min,
            max,
            final_sign_changes,
            history,
        });
    }
    Ok(ExperimentReport {
        preset: preset.clone(),
        provider: opts.provider.name().to_string(),
        runs,
        reference,
    })
}

/// One point of a refinement study.
#[derive(Debug, Clone, Serialize)]
pub struct StudyPoint {
    pub h: f64,
    pub dt: f64,
    pub errors: ErrorReport,
}

/// Errors of `method` on the preset for each mesh size (fixed Δt and T).
pub fn h_study(preset: &ExperimentPreset, method: Method, hs: &[f64], opts: &MethodOptions<'_>) -> Result<Vec<StudyPoint>> {
    hs.iter()
        .map(|&h| {
            let pb = preset.problem_with(h, preset.dt, preset.steps)?;
            let reference = reference_for(preset, &pb)?;
            let history = run_method(method, &pb, opts)?;
            Ok(StudyPoint {
                h,
                dt: preset.dt,
                errors: error_norms(&history, &reference, &pb.mesh, pb.dt())?,
            })
        })
        .collect()
}

/// Errors for each Δt at fixed h, keeping the final time of the preset.
pub fn dt_study(preset: &ExperimentPreset, method: Method, h: f64, dts: &[f64], opts: &MethodOptions<'_>) -> Result<Vec<StudyPoint>> {
    let t_final = preset.dt * preset.steps as f64;
    dts.iter()
        .map(|&dt| {
            let steps = (t_final / dt).round() as usize;
            let pb = preset.problem_with(h, dt, steps)?;
            let reference = reference_for(preset, &pb)?;
            let history = run_method(method, &pb, opts)?;
            Ok(StudyPoint {
                h,
                dt,
                errors: error_norms(&history, &reference, &pb.mesh, pb.dt())?,
            })
        })
        .collect()
}

/// Default Test 1 study grids.
pub fn test1_mesh_sizes() -> Vec<f64> {
    [4.0, 8.0, 16.0, 32.0, 64.0, 128.0].iter().map(|d| 0.05 / d).collect()
}

pub fn test1_time_steps() -> Vec<f64> {
    [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|d| 0.01 / d).collect()
}

/// Convenience: the preset for `id` with its own options.
pub fn run_preset(id: PresetId, provider: &dyn KernelProvider) -> Result<ExperimentReport> {
    let preset = ExperimentPreset::get(id);
    run_experiment(&preset, &MethodOptions::for_preset(&preset, provider))
}
