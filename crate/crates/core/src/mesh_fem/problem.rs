use std::fmt;
use std::sync::Arc;

use super::{Mesh1D, NodalField, TriDiagSystem};
use crate::quadrature::UnitGauss;
use crate::{Result, SvmsError};

pub type BoundaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type SpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Half-width tolerance of the hat initial condition, so that nodes placed
/// exactly on its breakpoints count as inside despite rounding.
const HAT_TOL: f64 = 1e-12;

/// Time-dependent Dirichlet values at both ends of the domain.
#[derive(Clone)]
pub struct DirichletBC {
    pub left: BoundaryFn,
    pub right: BoundaryFn,
}

impl DirichletBC {
    pub fn new(
        left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        DirichletBC {
            left: Arc::new(left),
            right: Arc::new(right),
        }
    }

    pub fn homogeneous() -> Self {
        DirichletBC::new(|_| 0.0, |_| 0.0)
    }

    /// Traces of exp(x + (μ − a)t) at x = 0 and x = 1.
    pub fn exponential(a: f64, mu: f64) -> Self {
        DirichletBC::new(move |t| ((mu - a) * t).exp(), move |t| (1.0 + (mu - a) * t).exp())
    }

    pub fn values(&self, t: f64) -> (f64, f64) {
        ((self.left)(t), (self.right)(t))
    }
}

impl fmt::Debug for DirichletBC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DirichletBC").finish_non_exhaustive()
    }
}

/// Uniform partition of [0, T] into N steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(SvmsError::invalid("time grid needs at least one step"));
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(SvmsError::invalid(format!("final time must be positive, got {t_final}")));
        }
        Ok(TimeGrid { t_final, steps })
    }

    /// Grid with step `dt`, `steps` times.
    pub fn from_step(dt: f64, steps: usize) -> Result<Self> {
        TimeGrid::new(dt * steps as f64, steps)
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.steps {
            self.t_final
        } else {
            n as f64 * self.dt()
        }
    }
}

#[derive(Clone)]
pub enum VelocityField {
    Constant(f64),
    Function(SpaceTimeFn),
}

impl VelocityField {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            VelocityField::Constant(a) => *a,
            VelocityField::Function(f) => f(x, t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, VelocityField::Constant(_))
    }
}

impl fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocityField::Constant(a) => write!(f, "Constant({a})"),
            VelocityField::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// How a velocity field is reduced to one value per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionRule {
    #[default]
    Midpoint,
    /// Element mean by 4-point Gauss quadrature.
    ElementAverage,
}

/// Piecewise-constant projection a_K of the velocity at time `t`.
pub fn project_velocity(a: &VelocityField, mesh: &Mesh1D, t: f64, rule: ProjectionRule) -> Vec<f64> {
    if let VelocityField::Constant(v) = a {
        return vec![*v; mesh.n_elements()];
    }
    let q = UnitGauss::new(4);
    (0..mesh.n_elements())
        .map(|k| match rule {
            ProjectionRule::Midpoint => a.eval(mesh.midpoint(k), t),
            ProjectionRule::ElementAverage => {
                let (xa, xb) = mesh.element(k);
                q.integrate(|s| a.eval(xa + (xb - xa) * s, t))
            }
        })
        .collect()
}

#[derive(Clone, Default)]
pub enum Source {
    #[default]
    Zero,
    Function(SpaceTimeFn),
}

impl Source {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Function(f) => f(x, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("Zero"),
            Source::Function(_) => f.write_str("Function(..)"),
        }
    }
}

#[derive(Clone)]
pub enum InitialCondition {
    /// 1 on |x − 0.45| ≤ 0.25, 0 elsewhere.
    Hat,
    /// exp(x).
    Exponential,
    Function(SpaceFn),
    /// Nodal values given directly; sub-grid content is taken as zero.
    Nodal(NodalField),
}

impl InitialCondition {
    pub fn hat(x: f64) -> f64 {
        if (x - 0.45).abs() <= 0.25 + HAT_TOL {
            1.0
        } else {
            0.0
        }
    }

    /// Pointwise value; `None` for purely nodal data.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            InitialCondition::Hat => Some(Self::hat(x)),
            InitialCondition::Exponential => Some(x.exp()),
            InitialCondition::Function(f) => Some(f(x)),
            InitialCondition::Nodal(_) => None,
        }
    }

    /// Nodal interpolant on `mesh`.
    pub fn interpolate(&self, mesh: &Mesh1D) -> Result<NodalField> {
        match self {
            InitialCondition::Nodal(u) => {
                u.check_len(mesh)?;
                Ok(u.clone())
            }
            other => Ok(NodalField::interpolate(mesh, |x| other.eval(x).unwrap())),
        }
    }
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Hat => f.write_str("Hat"),
            InitialCondition::Exponential => f.write_str("Exponential"),
            InitialCondition::Function(_) => f.write_str("Function(..)"),
            InitialCondition::Nodal(u) => write!(f, "Nodal({} values)", u.len()),
        }
    }
}

/// A complete 1D transient advection-diffusion problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mesh: Mesh1D,
    pub mu: f64,
    pub velocity: VelocityField,
    pub projection: ProjectionRule,
    pub source: Source,
    pub bc: DirichletBC,
    pub time: TimeGrid,
    pub initial: InitialCondition,
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(SvmsError::invalid(format!("diffusion must be positive, got {}", self.mu)));
        }
        if let InitialCondition::Nodal(u) = &self.initial {
            u.check_len(&self.mesh)?;
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.time.dt()
    }

    pub fn velocity_at(&self, t: f64) -> Vec<f64> {
        project_velocity(&self.velocity, &self.mesh, t, self.projection)
    }

    /// True when velocity (and hence every assembled operator) is time independent.
    pub fn is_autonomous(&self) -> bool {
        self.velocity.is_constant()
    }
}

/// Imposes u(x_min) = left(t), u(x_max) = right(t) by row replacement and
/// eliminates the boundary columns from the neighbouring rows.
pub fn apply_dirichlet(sys: TriDiagSystem, bc: &DirichletBC, t: f64) -> TriDiagSystem {
    let (l, r) = bc.values(t);
    apply_dirichlet_values(sys, l, r)
}

pub fn apply_dirichlet_values(mut sys: TriDiagSystem, left: f64, right: f64) -> TriDiagSystem {
    let n = sys.len();
    let a = &mut sys.matrix;
    // column elimination into neighbouring rows
    sys.rhs[1] -= a.sub[0] * left;
    a.sub[0] = 0.0;
    sys.rhs[n - 2] -= a.sup[n - 2] * right;
    a.sup[n - 2] = 0.0;
    // row replacement
    a.diag[0] = 1.0;
    a.sup[0] = 0.0;
    sys.rhs[0] = left;
    a.diag[n - 1] = 1.0;
    a.sub[n - 2] = 0.0;
    sys.rhs[n - 1] = right;
    sys
}
