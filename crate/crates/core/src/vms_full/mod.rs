//! Full spectral VMS stepper: the sub-grid component is carried between
//! steps as per-element amplitudes of the first J element modes, and every
//! step solves the resolved-scale system obtained by condensing the
//! sub-grid equations mode by mode.
//!
//! The scheme assumes that the element modes do not change between steps
//! (constant velocity), so that (ũⁿ, p z_j) reduces to the stored amplitude
//! c_jⁿ. With a time-dependent velocity the current modes are used for both.

use log::debug;

use crate::mesh_fem::{
    apply_dirichlet, assemble_load, assemble_mass, assemble_stiffness, galerkin_system, solve_tridiag,
    Mesh1D, NodalField, Problem, Source, Tridiag,
};
use crate::quadrature::UnitGauss;
use crate::spectral_kernels::{peclet_strength, project_onto_modes, reconstruct_subgrid, ElementModes};
use crate::{Result, SvmsError};

/// Base Gauss points for mode projections; J more are added for J modes.
const PROJECTION_POINTS: usize = 32;

/// Per-element amplitudes of the centred element modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgridState {
    modes: usize,
    amplitudes: Vec<Vec<f64>>,
}

impl SubgridState {
    pub fn zeros(n_elements: usize, modes: usize) -> Self {
        SubgridState {
            modes,
            amplitudes: vec![vec![0.0; modes]; n_elements],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Vec<f64>>) -> Result<Self> {
        let modes = amplitudes.first().map_or(0, Vec::len);
        if modes == 0 || amplitudes.iter().any(|c| c.len() != modes) {
            return Err(SvmsError::invalid("sub-grid amplitudes need the same positive length on every element"));
        }
        if amplitudes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(SvmsError::invalid("sub-grid amplitudes must be finite"));
        }
        Ok(SubgridState { modes, amplitudes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_elements(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn element(&self, k: usize) -> &[f64] {
        &self.amplitudes[k]
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Initial sub-grid scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum InitialSubgrid {
    #[default]
    Zero,
    /// Weighted projection of u₀ − I_h u₀ onto the first J modes of each element.
    Projection,
}

#[derive(Debug, Clone)]
pub struct FullVmsConfig {
    pub problem: Problem,
    /// Spectral truncation J.
    pub modes: usize,
    pub initial_subgrid: InitialSubgrid,
}

impl FullVmsConfig {
    pub fn new(problem: Problem, modes: usize) -> Self {
        FullVmsConfig {
            problem,
            modes,
            initial_subgrid: InitialSubgrid::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(SvmsError::invalid("the spectral truncation needs at least one mode"));
        }
        self.problem.validate()
    }
}

/// Nodal interpolant of u₀ and the initial sub-grid amplitudes.
pub fn init_state(config: &FullVmsConfig) -> Result<(NodalField, SubgridState)> {
    config.validate()?;
    let pb = &config.problem;
    let mesh = &pb.mesh;
    let u0 = pb.initial.interpolate(mesh)?;
    let mut state = SubgridState::zeros(mesh.n_elements(), config.modes);
    if config.initial_subgrid == InitialSubgrid::Projection {
        let q = UnitGauss::new(PROJECTION_POINTS + config.modes);
        let a_k = pb.velocity_at(0.0);
        for k in 0..mesh.n_elements() {
            let (xa, h) = (mesh.nodes()[k], mesh.h(k));
            let params = peclet_strength(a_k[k], h, pb.mu, pb.dt())?;
            let (ul, ur) = (u0[k], u0[k + 1]);
            let residual = |s: f64| match pb.initial.eval(xa + h * s) {
                Some(v) => v - ((1.0 - s) * ul + s * ur),
                None => 0.0,
            };
            state.amplitudes[k] = project_onto_modes(residual, &params, config.modes, &q);
        }
    }
    Ok((u0, state))
}

/// Reusable stepper; element modes are recomputed only when the velocity changes.
#[derive(Debug)]
pub struct FullStepper<'a> {
    config: &'a FullVmsConfig,
    mass: Tridiag,
    quad: UnitGauss,
    cache: Option<(Vec<f64>, Vec<ElementModes>, Tridiag)>,
}

impl<'a> FullStepper<'a> {
    pub fn new(config: &'a FullVmsConfig) -> Result<Self> {
        config.validate()?;
        Ok(FullStepper {
            config,
            mass: assemble_mass(&config.problem.mesh),
            quad: UnitGauss::new(PROJECTION_POINTS + config.modes),
            cache: None,
        })
    }

    fn operators(&mut self, t: f64) -> Result<(&[ElementModes], &Tridiag)> {
        let pb = &self.config.problem;
        let a_k = pb.velocity_at(t);
        let stale = self.cache.as_ref().is_none_or(|(a, _, _)| *a != a_k);
        if stale {
            let mesh = &pb.mesh;
            let modes = (0..mesh.n_elements())
                .map(|k| peclet_strength(a_k[k], mesh.h(k), pb.mu, pb.dt()).map(|p| ElementModes::new(p, self.config.modes)))
                .collect::<Result<Vec<_>>>()?;
            let r = assemble_stiffness(mesh, &a_k, pb.mu)?;
            self.cache = Some((a_k, modes, r));
        }
        let (_, modes, r) = self.cache.as_ref().unwrap();
        Ok((modes, r))
    }

    /// Advances (uⁿ, ũⁿ) at step index `n` to step n + 1.
    pub fn step(&mut self, u_prev: &NodalField, s_prev: &SubgridState, n: usize) -> Result<(NodalField, SubgridState)> {
        let pb = &self.config.problem;
        let mesh = &pb.mesh;
        u_prev.check_len(mesh)?;
        if s_prev.n_elements() != mesh.n_elements() || s_prev.modes() != self.config.modes {
            return Err(SvmsError::invalid("sub-grid state does not match the mesh or the truncation"));
        }
        let dt = pb.dt();
        let t_next = pb.time.t(n + 1);
        let load = assemble_load(mesh, &pb.source, t_next);
        let source_modes = self.source_modes(t_next)?;
        let mass = self.mass.clone();
        let (modes, r) = self.operators(t_next)?;
        let mut sys = galerkin_system(&mass, r, dt, u_prev, &load)?;

        // right-hand sides of the condensed mode equations without the uⁿ⁺¹ part
        let mut mode_rhs: Vec<Vec<f64>> = Vec::with_capacity(mesh.n_elements());
        for (k, em) in modes.iter().enumerate() {
            let c_prev = s_prev.element(k);
            let mut elem = [[0.0; 2]; 2];
            let mut rhs = [0.0; 2];
            let mut wk = Vec::with_capacity(em.len());
            for (j, (b, c)) in em.beta.iter().zip(&em.couplings).enumerate() {
                let fj = source_modes.as_ref().map_or(0.0, |f| f[k][j]);
                let w = c.phi_pz[0] * u_prev[k] + c.phi_pz[1] * u_prev[k + 1] + c_prev[j] + dt * fj;
                for l in 0..2 {
                    let g = c.z_phi[l] + dt * c.b_z_phi[l];
                    for m in 0..2 {
                        elem[l][m] -= b * g * (c.phi_pz[m] + dt * c.b_phi_pz[m]);
                    }
                    rhs[l] += c_prev[j] * c.z_phi[l] - b * g * w;
                }
                wk.push(w);
            }
            for l in 0..2 {
                sys.rhs[k + l] += rhs[l];
                for m in 0..2 {
                    sys.matrix.add(k + l, k + m, elem[l][m]);
                }
            }
            mode_rhs.push(wk);
        }
        let sys = apply_dirichlet(sys, &pb.bc, t_next);
        let u = solve_tridiag(&sys)?;

        let amplitudes = modes
            .iter()
            .zip(mode_rhs)
            .enumerate()
            .map(|(k, (em, w))| {
                em.beta
                    .iter()
                    .zip(&em.couplings)
                    .zip(w)
                    .map(|((b, c), w)| {
                        let hu = (c.phi_pz[0] + dt * c.b_phi_pz[0]) * u[k] + (c.phi_pz[1] + dt * c.b_phi_pz[1]) * u[k + 1];
                        b * (w - hu)
                    })
                    .collect()
            })
            .collect();
        Ok((
            u,
            SubgridState {
                modes: self.config.modes,
                amplitudes,
            },
        ))
    }

    /// (f(·, t), p z_j) per element and mode; `None` for a zero source.
    fn source_modes(&mut self, t: f64) -> Result<Option<Vec<Vec<f64>>>> {
        let pb = &self.config.problem;
        let Source::Function(f) = &pb.source else {
            return Ok(None);
        };
        let mesh = &pb.mesh;
        let a_k = pb.velocity_at(t);
        let mut out = Vec::with_capacity(mesh.n_elements());
        for k in 0..mesh.n_elements() {
            let (xa, h) = (mesh.nodes()[k], mesh.h(k));
            let params = peclet_strength(a_k[k], h, pb.mu, pb.dt())?;
            out.push(project_onto_modes(|s| f(xa + h * s, t), &params, self.config.modes, &self.quad));
        }
        Ok(Some(out))
    }
}

/// One step of the full method. Prefer [`FullStepper`] in loops.
pub fn step_full(u_prev: &NodalField, s_prev: &SubgridState, n: usize, config: &FullVmsConfig) -> Result<(NodalField, SubgridState)> {
    FullStepper::new(config)?.step(u_prev, s_prev, n)
}

/// Nodal and sub-grid history of a run (index = step).
#[derive(Debug, Clone)]
pub struct FullHistory {
    pub nodal: Vec<NodalField>,
    pub subgrid: Vec<SubgridState>,
}

impl FullHistory {
    /// Nodal plus sub-grid field sampled at `per_element` interior points of
    /// every element (and the nodes) at step `n`.
    pub fn sample(&self, config: &FullVmsConfig, n: usize, per_element: usize) -> Result<Vec<(f64, f64)>> {
        let pb = &config.problem;
        let mesh: &Mesh1D = &pb.mesh;
        let a_k = pb.velocity_at(pb.time.t(n.max(1)));
        let (u, s) = (&self.nodal[n], &self.subgrid[n]);
        let xs: Vec<f64> = (0..=per_element + 1).map(|i| i as f64 / (per_element + 1) as f64).collect();
        let mut out = Vec::with_capacity(mesh.n_elements() * (per_element + 1) + 1);
        for k in 0..mesh.n_elements() {
            let (xa, h) = (mesh.nodes()[k], mesh.h(k));
            let params = peclet_strength(a_k[k], h, pb.mu, pb.dt())?;
            let fine = reconstruct_subgrid(s.element(k), &params, &xs);
            let take = if k + 1 == mesh.n_elements() { xs.len() } else { xs.len() - 1 };
            for i in 0..take {
                let t = xs[i];
                out.push((xa + h * t, (1.0 - t) * u[k] + t * u[k + 1] + fine[i]));
            }
        }
        Ok(out)
    }
}

/// Runs all N steps of the problem's time grid.
pub fn run_full(config: &FullVmsConfig) -> Result<FullHistory> {
    run_full_steps(config, config.problem.time.steps())
}

/// Runs the first `steps` steps (0 returns the initial state only).
pub fn run_full_steps(config: &FullVmsConfig, steps: usize) -> Result<FullHistory> {
    let (u0, s0) = init_state(config)?;
    let mut stepper = FullStepper::new(config)?;
    let mut nodal = Vec::with_capacity(steps + 1);
    let mut subgrid = Vec::with_capacity(steps + 1);
    nodal.push(u0);
    subgrid.push(s0);
    for n in 0..steps {
        let (u, s) = stepper.step(&nodal[n], &subgrid[n], n)?;
        debug!("full VMS step {}: max|u| = {:.3e}, max|c| = {:.3e}", n + 1, u.max_abs(), s.max_abs());
        nodal.push(u);
        subgrid.push(s);
    }
    Ok(FullHistory { nodal, subgrid })
}
