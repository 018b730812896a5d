//! Galerkin and τ-stabilised Backward Euler steppers.
//!
//! The stabilised schemes solve
//! (M + Δt R + Δt Σ_K a_K² τ_K M_s^K) uⁿ⁺¹ = M uⁿ + Δt F
//! where M_s^K = (1/h_K)[[1, −1], [−1, 1]] is the element part of the
//! discrete Laplacian stencil; for constant a this is Δt a² τ M_s.

use std::fmt;
use std::str::FromStr;

use crate::mesh_fem::{
    add_element_matrix, apply_dirichlet, assemble_load, assemble_mass, assemble_stiffness, galerkin_system,
    solve_tridiag, Mesh1D, NodalField, Problem, Tridiag,
};
use crate::{Result, SvmsError};

/// Below this Péclet number τ_1D uses its limit h²/(12μ).
const SMALL_PECLET: f64 = 1e-4;
const HAUKE_DIFFUSIVE: f64 = 24.24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum StabKind {
    /// Optimal coefficient of the steady 1D problem.
    OneD,
    Codina,
    Hauke,
    Franca,
}

impl StabKind {
    pub const ALL: [StabKind; 4] = [StabKind::Codina, StabKind::OneD, StabKind::Hauke, StabKind::Franca];

    pub fn name(self) -> &'static str {
        match self {
            StabKind::OneD => "1D",
            StabKind::Codina => "Codina",
            StabKind::Hauke => "Hauke",
            StabKind::Franca => "Franca",
        }
    }
}

impl fmt::Display for StabKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StabKind {
    type Err = SvmsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1d" | "oned" | "one-d" => Ok(StabKind::OneD),
            "codina" => Ok(StabKind::Codina),
            "hauke" => Ok(StabKind::Hauke),
            "franca" => Ok(StabKind::Franca),
            other => Err(SvmsError::invalid(format!("unknown stabilisation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabChoice {
    pub kind: StabKind,
    /// P̃: Franca's diffusive/advective switch.
    pub franca_threshold: f64,
}

impl StabChoice {
    pub fn new(kind: StabKind) -> Self {
        StabChoice {
            kind,
            franca_threshold: 1.0,
        }
    }

    pub fn franca(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(SvmsError::invalid(format!("Franca threshold must be positive, got {threshold}")));
        }
        Ok(StabChoice {
            kind: StabKind::Franca,
            franca_threshold: threshold,
        })
    }
}

/// Stabilisation coefficient τ for one element.
pub fn tau(choice: &StabChoice, a: f64, mu: f64, h: f64, dt: f64) -> f64 {
    let a = a.abs();
    let pe = a * h / (2.0 * mu);
    match choice.kind {
        StabKind::OneD => {
            if pe < SMALL_PECLET {
                h * h / (12.0 * mu)
            } else {
                mu / (a * a) * (pe / pe.tanh() - 1.0)
            }
        }
        StabKind::Codina => {
            let d = 4.0 * mu / (h * h);
            let c = 2.0 * a / h;
            1.0 / (d * d + c * c).sqrt()
        }
        StabKind::Hauke => {
            let adv = if a > 0.0 { h / (3f64.sqrt() * a) } else { f64::INFINITY };
            adv.min(h * h / (HAUKE_DIFFUSIVE * mu)).min(dt)
        }
        StabKind::Franca => {
            if pe <= choice.franca_threshold {
                h * h / (2.0 * mu)
            } else {
                h * choice.franca_threshold / a
            }
        }
    }
}

/// M_s: the Laplacian stencil (1/h) tridiag(−1, 2, −1), assembled element-wise.
pub fn stab_matrix(mesh: &Mesh1D) -> Tridiag {
    weighted_stab_matrix(mesh, &vec![1.0; mesh.n_elements()])
}

fn weighted_stab_matrix(mesh: &Mesh1D, weights: &[f64]) -> Tridiag {
    let mut t = Tridiag::zeros(mesh.n_nodes());
    for (k, w) in weights.iter().enumerate() {
        let d = w / mesh.h(k);
        add_element_matrix(&mut t, k, &[[d, -d], [-d, d]]);
    }
    t
}

/// Σ_K a_K² τ_K M_s^K.
pub fn stabilization_term(mesh: &Mesh1D, a_k: &[f64], mu: f64, dt: f64, choice: &StabChoice) -> Tridiag {
    let w: Vec<f64> = a_k
        .iter()
        .enumerate()
        .map(|(k, a)| a * a * tau(choice, *a, mu, mesh.h(k), dt))
        .collect();
    weighted_stab_matrix(mesh, &w)
}

/// Galerkin CFL threshold P / (3(1 − P)) for 0 ≤ P < 1.
pub fn cfl_bound(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(SvmsError::Domain(format!("CFL bound needs 0 <= P < 1, got {p}")));
    }
    Ok(p / (3.0 * (1.0 - p)))
}

/// |a| Δt / h.
pub fn cfl(a: f64, dt: f64, h: f64) -> f64 {
    a.abs() * dt / h
}

/// Stepper for Galerkin (`choice = None`) or a stabilised method.
#[derive(Debug)]
pub struct BaselineStepper<'a> {
    problem: &'a Problem,
    choice: Option<StabChoice>,
    mass: Tridiag,
    cache: Option<(Vec<f64>, Tridiag)>,
}

impl<'a> BaselineStepper<'a> {
    pub fn new(problem: &'a Problem, choice: Option<StabChoice>) -> Result<Self> {
        problem.validate()?;
        Ok(BaselineStepper {
            problem,
            choice,
            mass: assemble_mass(&problem.mesh),
            cache: None,
        })
    }

    /// Δt-scaled operator R (+ stabilisation) at time `t`.
    pub fn operator(&mut self, t: f64) -> Result<&Tridiag> {
        let pb = self.problem;
        let a_k = pb.velocity_at(t);
        if self.cache.as_ref().is_none_or(|(a, _)| *a != a_k) {
            let mut r = assemble_stiffness(&pb.mesh, &a_k, pb.mu)?;
            if let Some(choice) = &self.choice {
                r.axpy(1.0, &stabilization_term(&pb.mesh, &a_k, pb.mu, pb.dt(), choice));
            }
            self.cache = Some((a_k, r));
        }
        Ok(&self.cache.as_ref().unwrap().1)
    }

    pub fn step(&mut self, u_prev: &NodalField, n: usize) -> Result<NodalField> {
        let pb = self.problem;
        u_prev.check_len(&pb.mesh)?;
        let t_next = pb.time.t(n + 1);
        let load = assemble_load(&pb.mesh, &pb.source, t_next);
        let mass = self.mass.clone();
        let r = self.operator(t_next)?;
        let sys = galerkin_system(&mass, r, pb.dt(), u_prev, &load)?;
        solve_tridiag(&apply_dirichlet(sys, &pb.bc, t_next))
    }

    pub fn run(&mut self, steps: usize) -> Result<Vec<NodalField>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.problem.initial.interpolate(&self.problem.mesh)?);
        for n in 0..steps {
            let u = self.step(&out[n], n)?;
            out.push(u);
        }
        Ok(out)
    }
}

/// (M + Δt R) uⁿ⁺¹ = M uⁿ + Δt F with boundary values at tⁿ⁺¹.
pub fn step_galerkin(u_prev: &NodalField, problem: &Problem, n: usize) -> Result<NodalField> {
    BaselineStepper::new(problem, None)?.step(u_prev, n)
}

pub fn step_stabilized(u_prev: &NodalField, choice: &StabChoice, problem: &Problem, n: usize) -> Result<NodalField> {
    BaselineStepper::new(problem, Some(*choice))?.step(u_prev, n)
}

/// Full Galerkin history (N + 1 fields).
pub fn run_galerkin(problem: &Problem) -> Result<Vec<NodalField>> {
    BaselineStepper::new(problem, None)?.run(problem.time.steps())
}

pub fn run_stabilized(problem: &Problem, choice: &StabChoice) -> Result<Vec<NodalField>> {
    BaselineStepper::new(problem, Some(*choice))?.run(problem.time.steps())
}
