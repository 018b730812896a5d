use crate::baselines::run_galerkin;
use crate::mesh_fem::{InitialCondition, NodalField, Problem, TimeGrid};
use crate::Result;

/// Refinement factor of the Galerkin reference.
pub const REFERENCE_REFINEMENT: usize = 64;

/// Backward-Euler semi-discrete reference: Galerkin on a mesh refined by
/// `factor` with the same Δt, sampled at the coarse nodes.
///
/// The fine run starts from the coarse nodal interpolant of u₀ (prolonged
/// linearly), so it resolves the same initial data the coarse methods see.
pub fn refined_reference(problem: &Problem, factor: usize) -> Result<Vec<NodalField>> {
    let fine_mesh = problem.mesh.refine(factor)?;
    let u0 = problem.initial.interpolate(&problem.mesh)?;
    let fine_u0 = NodalField::interpolate(&fine_mesh, |x| u0.eval(&problem.mesh, x));
    let fine = Problem {
        mesh: fine_mesh,
        initial: InitialCondition::Nodal(fine_u0),
        ..problem.clone()
    };
    Ok(run_galerkin(&fine)?
        .into_iter()
        .map(|u| NodalField::new(u.iter().step_by(factor).copied().collect()))
        .collect())
}

/// exp(x + (μ − a)t): the analytic solution with f = 0 and matching data.
pub fn exponential_solution(a: f64, mu: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, t| (x + (mu - a) * t).exp()
}

/// Analytic history at the nodes of `problem`.
pub fn exact_history(problem: &Problem, exact: impl Fn(f64, f64) -> f64, time: &TimeGrid) -> Vec<NodalField> {
    (0..=time.steps())
        .map(|n| NodalField::interpolate(&problem.mesh, |x| exact(x, time.t(n))))
        .collect()
}
