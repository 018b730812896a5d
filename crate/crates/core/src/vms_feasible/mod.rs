//! Feasible spectral VMS stepper.
//!
//! The sub-grid history is replaced by the approximated residual of the
//! previous step, which turns each step into the tridiagonal system
//!
//! 𝐀 = M + Δt R − (A₁ + Δt A₂ + Δt A₃ + Δt² A₄),
//! 𝐛 = M uⁿ + Δt F − (A₁ + Δt A₃) uⁿ − (A₁ⁿ + Δt A₂ⁿ) uⁿ + A₁ⁿ uⁿ⁻¹
//!     + Δt F₁ⁿ − Δt F₁ − Δt² F₂ − G₁ − Δt G₂,
//!
//! with G₁ = X₁ uⁿ⁻¹ + Δt Y₁ − X₁ uⁿ − Δt X₂ uⁿ and
//! G₂ = B₃ uⁿ⁻¹ + Δt F₄ − B₃ uⁿ − Δt B₄ uⁿ. (X₁, X₂, Y₁) is (B₁, B₂, F₃) for
//! [`GPairing::Appendix`] and (B₃, B₄, F₄) for [`GPairing::Main`].
//!
//! Collecting the uⁿ terms gives +(B₁ + Δt B₂ + Δt B₃ + Δt² B₄) uⁿ; the
//! first step (ũ⁰ = 0) drops every term that involves the previous step.
//! The element matrices are built from dimensionless kernels supplied by a
//! [`KernelProvider`] and scaled by h, |a| or a²/h; the force kernels assume
//! an element-wise constant source (its midpoint value).

mod provider;

pub use provider::{DirectProvider, KernelLookup, KernelProvider, ZeroProvider};

use std::fmt;
use std::str::FromStr;

use log::{debug, warn};

use crate::mesh_fem::{
    add_element_matrix, apply_dirichlet, assemble_load, assemble_mass, assemble_stiffness, solve_tridiag, Mesh1D,
    NodalField, Problem, Source, TriDiagSystem, Tridiag,
};
use crate::spectral_kernels::{peclet_strength, Family};
use crate::{Result, SvmsError};

/// Which bilinear pairing the G₁ vector uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GPairing {
    /// G₁ paired with (z̃, φ): built from B₁, B₂, F₃.
    #[default]
    Appendix,
    /// G₁ paired with b(z̃, φ): built from B₃, B₄, F₄.
    Main,
}

impl fmt::Display for GPairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GPairing::Appendix => "appendix",
            GPairing::Main => "main",
        })
    }
}

impl FromStr for GPairing {
    type Err = SvmsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "appendix" => Ok(GPairing::Appendix),
            "main" => Ok(GPairing::Main),
            other => Err(SvmsError::invalid(format!("unknown g-pairing `{other}` (main|appendix)"))),
        }
    }
}

const A_FAMILIES: [Family; 4] = [Family::A1, Family::A2, Family::A3, Family::A4];
const B_FAMILIES: [Family; 4] = [Family::B1, Family::B2, Family::B3, Family::B4];
const F_FAMILIES: [Family; 4] = [Family::Fd0, Family::Fe0, Family::Fbd0, Family::Fbe0];

/// Physical A₁..A₄, B₁..B₄ and per-element force coefficients of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleMatrices {
    pub a: [Tridiag; 4],
    pub b: [Tridiag; 4],
    /// `force[k][i][l]`: (Fᵢ₊₁)_l contribution of element k per unit source.
    pub force: Vec<[[f64; 2]; 4]>,
    /// Elements whose (P, S) fell outside the provider's range.
    pub out_of_range: usize,
}

impl FeasibleMatrices {
    /// F₁..F₄ for element-wise source values `f_k`.
    pub fn force_vectors(&self, f_k: &[f64]) -> [Vec<f64>; 4] {
        let n = self.a[0].len();
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        for (k, (coef, f)) in self.force.iter().zip(f_k).enumerate() {
            if *f == 0.0 {
                continue;
            }
            for (v, c) in out.iter_mut().zip(coef) {
                v[k] += f * c[0];
                v[k + 1] += f * c[1];
            }
        }
        out
    }

    /// 𝒜 = A₁ + Δt A₂ + Δt A₃ + Δt² A₄.
    pub fn script_a(&self, dt: f64) -> Tridiag {
        let mut s = self.a[0].clone();
        s.axpy(dt, &self.a[1]);
        s.axpy(dt, &self.a[2]);
        s.axpy(dt * dt, &self.a[3]);
        s
    }
}

fn scale(family: Family, h: f64, a: f64) -> f64 {
    match family {
        Family::A1 | Family::B1 | Family::Fd0 | Family::Fbd0 => h,
        Family::A4 | Family::B4 => a * a / h,
        _ => a.abs(),
    }
}

/// Assembles the A, B matrices and force coefficients from kernel values.
pub fn assemble_matrices(
    mesh: &Mesh1D,
    a_k: &[f64],
    mu: f64,
    dt: f64,
    provider: &dyn KernelProvider,
) -> Result<FeasibleMatrices> {
    if a_k.len() != mesh.n_elements() {
        return Err(SvmsError::Mismatch {
            expected: mesh.n_elements(),
            got: a_k.len(),
        });
    }
    let n = mesh.n_nodes();
    let mut a: [Tridiag; 4] = std::array::from_fn(|_| Tridiag::zeros(n));
    let mut b: [Tridiag; 4] = std::array::from_fn(|_| Tridiag::zeros(n));
    let mut force = Vec::with_capacity(mesh.n_elements());
    let mut out_of_range = 0;
    for (k, &ak) in a_k.iter().enumerate() {
        let h = mesh.h(k);
        let prm = peclet_strength(ak, h, mu, dt)?;
        let look = provider.kernels(prm.p, prm.s)?;
        out_of_range += usize::from(look.out_of_range);
        let kv = &look.values;
        for (fams, mats) in [(&A_FAMILIES, &mut a), (&B_FAMILIES, &mut b)] {
            for (fam, mat) in fams.iter().zip(mats.iter_mut()) {
                let c = scale(*fam, h, ak);
                let mut e = [[0.0; 2]; 2];
                for (l, row) in e.iter_mut().enumerate() {
                    for (m, v) in row.iter_mut().enumerate() {
                        *v = c * kv.get(*fam, prm.orient(m), prm.orient(l));
                    }
                }
                add_element_matrix(mat, k, &e);
            }
        }
        let mut fk = [[0.0; 2]; 4];
        for (fam, v) in F_FAMILIES.iter().zip(fk.iter_mut()) {
            let c = scale(*fam, h, ak);
            for (l, x) in v.iter_mut().enumerate() {
                *x = c * kv.get(*fam, 0, prm.orient(l));
            }
        }
        force.push(fk);
    }
    if out_of_range > 0 {
        warn!("{out_of_range} element(s) outside the kernel provider's (P, S) range");
    }
    Ok(FeasibleMatrices { a, b, force, out_of_range })
}

/// Assembled system of one step: the matrices and 𝐀 (before boundary conditions).
#[derive(Debug, Clone)]
pub struct FeasibleSystem {
    pub matrices: FeasibleMatrices,
    pub lhs: Tridiag,
}

impl FeasibleSystem {
    pub fn new(mass: &Tridiag, stiffness: &Tridiag, dt: f64, matrices: FeasibleMatrices) -> Self {
        let mut lhs = mass.clone();
        lhs.axpy(dt, stiffness);
        lhs.axpy(-1.0, &matrices.script_a(dt));
        FeasibleSystem { matrices, lhs }
    }
}

/// Two-level history of the feasible method.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleState {
    pub u: NodalField,
    /// uⁿ⁻¹; `None` before the first step (ũ⁰ = 0).
    pub u_prev: Option<NodalField>,
    pub step: usize,
}

/// State at n = 0: u⁻¹ := u⁰ and no previous-step terms.
pub fn first_step_policy(u0: NodalField) -> FeasibleState {
    FeasibleState {
        u_prev: None,
        u: u0,
        step: 0,
    }
}

#[derive(Debug, Clone)]
pub struct FeasibleConfig {
    pub problem: Problem,
    pub g_pairing: GPairing,
}

impl FeasibleConfig {
    pub fn new(problem: Problem) -> Self {
        FeasibleConfig {
            problem,
            g_pairing: GPairing::Appendix,
        }
    }
}

/// Data of one step that depend only on the velocity at one time level.
#[derive(Debug, Clone)]
struct Level {
    a_k: Vec<f64>,
    stiffness: Tridiag,
    matrices: FeasibleMatrices,
}

/// Feasible stepper; matrices are reassembled only when the velocity changes.
pub struct FeasibleStepper<'a> {
    config: &'a FeasibleConfig,
    provider: &'a dyn KernelProvider,
    mass: Tridiag,
    levels: Vec<(f64, Level)>,
    out_of_range: usize,
}

impl fmt::Debug for FeasibleStepper<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeasibleStepper")
            .field("provider", &self.provider.name())
            .field("g_pairing", &self.config.g_pairing)
            .finish_non_exhaustive()
    }
}

impl<'a> FeasibleStepper<'a> {
    pub fn new(config: &'a FeasibleConfig, provider: &'a dyn KernelProvider) -> Result<Self> {
        config.problem.validate()?;
        Ok(FeasibleStepper {
            config,
            provider,
            mass: assemble_mass(&config.problem.mesh),
            levels: Vec::new(),
            out_of_range: 0,
        })
    }

    /// Elements that were outside the provider's range, summed over assemblies.
    pub fn out_of_range(&self) -> usize {
        self.out_of_range
    }

    fn level(&mut self, t: f64) -> Result<Level> {
        let pb = &self.config.problem;
        let a_k = pb.velocity_at(t);
        if let Some((_, lv)) = self.levels.iter().find(|(_, lv)| lv.a_k == a_k) {
            return Ok(lv.clone());
        }
        let stiffness = assemble_stiffness(&pb.mesh, &a_k, pb.mu)?;
        let matrices = assemble_matrices(&pb.mesh, &a_k, pb.mu, pb.dt(), self.provider)?;
        self.out_of_range += matrices.out_of_range;
        let lv = Level { a_k, stiffness, matrices };
        // two time levels are live at any step
        if self.levels.len() == 2 {
            self.levels.remove(0);
        }
        self.levels.push((t, lv.clone()));
        Ok(lv)
    }

    fn element_source(&self, t: f64) -> Option<Vec<f64>> {
        let pb = &self.config.problem;
        match &pb.source {
            Source::Zero => None,
            Source::Function(f) => Some((0..pb.mesh.n_elements()).map(|k| f(pb.mesh.midpoint(k), t)).collect()),
        }
    }

    /// Assembled (and boundary-corrected) system for the step from `state`.
    pub fn system(&mut self, state: &FeasibleState) -> Result<TriDiagSystem> {
        let pb = &self.config.problem;
        state.u.check_len(&pb.mesh)?;
        let dt = pb.dt();
        let n = state.step;
        let (t_now, t_next) = (pb.time.t(n), pb.time.t(n + 1));
        let next = self.level(t_next)?;
        let sys = FeasibleSystem::new(&self.mass, &next.stiffness, dt, next.matrices);
        let mats = &sys.matrices;
        let u = &state.u;

        let load = assemble_load(&pb.mesh, &pb.source, t_next);
        let mut rhs = self.mass.matvec(u);
        for (r, f) in rhs.iter_mut().zip(&load) {
            *r += dt * f;
        }
        let sub = |rhs: &mut Vec<f64>, c: f64, m: &Tridiag, x: &[f64]| m.matvec_acc(-c, x, rhs);
        let axpy = |rhs: &mut Vec<f64>, c: f64, v: &[f64]| {
            for (r, x) in rhs.iter_mut().zip(v) {
                *r += c * x;
            }
        };

        sub(&mut rhs, 1.0, &mats.a[0], u);
        sub(&mut rhs, dt, &mats.a[2], u);
        let f_next = self.element_source(t_next);
        if let Some(fk) = &f_next {
            let fv = mats.force_vectors(fk);
            axpy(&mut rhs, -dt, &fv[0]);
            axpy(&mut rhs, -dt * dt, &fv[1]);
        }

        if let Some(u_old) = &state.u_prev {
            u_old.check_len(&pb.mesh)?;
            let prev = self.level(t_now)?;
            let pm = &prev.matrices;
            // (ũⁿ, φ_l): A₁ⁿ uⁿ⁻¹ + Δt F₁ⁿ − A₁ⁿ uⁿ − Δt A₂ⁿ uⁿ
            sub(&mut rhs, 1.0, &pm.a[0], u);
            sub(&mut rhs, dt, &pm.a[1], u);
            sub(&mut rhs, -1.0, &pm.a[0], u_old);
            let f_now = self.element_source(t_now);
            let fv_now = f_now.as_ref().map(|fk| mats.force_vectors(fk));
            if let Some(fk) = &f_now {
                axpy(&mut rhs, dt, &pm.force_vectors(fk)[0]);
            }
            // −G₁ − Δt G₂
            let (x1, x2, y1) = match self.config.g_pairing {
                GPairing::Appendix => (&mats.b[0], &mats.b[1], 2),
                GPairing::Main => (&mats.b[2], &mats.b[3], 3),
            };
            for (c, x, y, yi) in [(1.0, x1, x2, y1), (dt, &mats.b[2], &mats.b[3], 3)] {
                sub(&mut rhs, c, x, u_old);
                sub(&mut rhs, -c, x, u);
                sub(&mut rhs, -c * dt, y, u);
                if let Some(fv) = &fv_now {
                    axpy(&mut rhs, -c * dt, &fv[yi]);
                }
            }
        }
        let full = TriDiagSystem::new(sys.lhs, rhs)?;
        Ok(apply_dirichlet(full, &pb.bc, t_next))
    }

    /// One step: returns uⁿ⁺¹.
    pub fn step(&mut self, state: &FeasibleState) -> Result<NodalField> {
        solve_tridiag(&self.system(state)?)
    }

    /// Advances the two-level state in place.
    pub fn advance(&mut self, state: &mut FeasibleState) -> Result<()> {
        let u = self.step(state)?;
        let old = std::mem::replace(&mut state.u, u);
        state.u_prev = Some(old);
        state.step += 1;
        Ok(())
    }
}

/// One feasible step with a freshly assembled system.
pub fn step_feasible(state: &FeasibleState, config: &FeasibleConfig, provider: &dyn KernelProvider) -> Result<NodalField> {
    FeasibleStepper::new(config, provider)?.step(state)
}

/// Runs all steps; returns N + 1 nodal fields.
pub fn run_feasible(config: &FeasibleConfig, provider: &dyn KernelProvider) -> Result<Vec<NodalField>> {
    run_feasible_steps(config, provider, config.problem.time.steps())
}

pub fn run_feasible_steps(config: &FeasibleConfig, provider: &dyn KernelProvider, steps: usize) -> Result<Vec<NodalField>> {
    let pb = &config.problem;
    let mut stepper = FeasibleStepper::new(config, provider)?;
    let mut state = first_step_policy(pb.initial.interpolate(&pb.mesh)?);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.u.clone());
    for _ in 0..steps {
        stepper.advance(&mut state)?;
        debug!("feasible step {}: max|u| = {:.3e}", state.step, state.u.max_abs());
        out.push(state.u.clone());
    }
    Ok(out)
}
