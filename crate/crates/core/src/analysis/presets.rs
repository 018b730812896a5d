use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::reference::REFERENCE_REFINEMENT;
use crate::baselines::{cfl_bound, StabKind};
use crate::mesh_fem::{DirichletBC, InitialCondition, Mesh1D, Problem, ProjectionRule, Source, TimeGrid, VelocityField};
use crate::vms_full::InitialSubgrid;
use crate::{Result, SvmsError};

/// Discretisation methods that can be run and compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Galerkin,
    SpectralFull,
    SpectralFeasible,
    Stabilized(StabKind),
}

impl Method {
    /// Command-line / CSV identifier.
    pub fn id(self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::SpectralFull => "spectral-full",
            Method::SpectralFeasible => "spectral-feasible",
            Method::Stabilized(StabKind::OneD) => "stab-1d",
            Method::Stabilized(StabKind::Codina) => "stab-codina",
            Method::Stabilized(StabKind::Hauke) => "stab-hauke",
            Method::Stabilized(StabKind::Franca) => "stab-franca",
        }
    }

    pub fn is_spectral(self) -> bool {
        matches!(self, Method::SpectralFull | Method::SpectralFeasible)
    }

    pub const ALL: [Method; 7] = [
        Method::Galerkin,
        Method::SpectralFull,
        Method::SpectralFeasible,
        Method::Stabilized(StabKind::OneD),
        Method::Stabilized(StabKind::Codina),
        Method::Stabilized(StabKind::Hauke),
        Method::Stabilized(StabKind::Franca),
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = SvmsError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.id() == s)
            .ok_or_else(|| SvmsError::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PresetId {
    Test1,
    Test2BigPeclet,
    Test2SmallDt,
    Test2Cfl,
    Test3A,
    Test3B,
    Test3C,
}

impl PresetId {
    pub const ALL: [PresetId; 7] = [
        PresetId::Test1,
        PresetId::Test2BigPeclet,
        PresetId::Test2SmallDt,
        PresetId::Test2Cfl,
        PresetId::Test3A,
        PresetId::Test3B,
        PresetId::Test3C,
    ];

    pub fn id(self) -> &'static str {
        match self {
            PresetId::Test1 => "test1",
            PresetId::Test2BigPeclet => "test2-big-peclet",
            PresetId::Test2SmallDt => "test2-small-dt",
            PresetId::Test2Cfl => "test2-cfl",
            PresetId::Test3A => "test3-a",
            PresetId::Test3B => "test3-b",
            PresetId::Test3C => "test3-c",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PresetId {
    type Err = SvmsError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "test2" {
            return Ok(PresetId::Test2BigPeclet);
        }
        PresetId::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| SvmsError::invalid(format!("unknown preset `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IcKind {
    Hat,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BcKind {
    Homogeneous,
    /// Traces of the exponential solution.
    Exponential,
}

/// How the error of a preset is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceKind {
    /// exp(x + (μ − a)t) at the nodes.
    Exact,
    /// Galerkin on the mesh refined `factor` times, same Δt.
    RefinedGalerkin { factor: usize },
}

/// Published errors (l∞(L²), l²(H¹)) of one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedErrors {
    pub method: Method,
    pub linf_l2: f64,
    pub l2_h1: f64,
}

/// Fully specified experiment on Ω = (0, 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentPreset {
    pub id: PresetId,
    pub a: f64,
    pub mu: f64,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub ic: IcKind,
    pub bc: BcKind,
    /// Spectral truncation J of the full method.
    pub modes: usize,
    pub initial_subgrid: InitialSubgrid,
    pub methods: Vec<Method>,
    pub reference: ReferenceKind,
    pub published: Vec<PublishedErrors>,
}

fn published(rows: [(Method, f64, f64); 6]) -> Vec<PublishedErrors> {
    rows.into_iter()
        .map(|(method, linf_l2, l2_h1)| PublishedErrors { method, linf_l2, l2_h1 })
        .collect()
}

use Method::{Galerkin, SpectralFeasible, SpectralFull, Stabilized};
use StabKind::{Codina, Franca, Hauke, OneD};

const TABLE_METHODS: [Method; 6] = [
    Galerkin,
    SpectralFeasible,
    Stabilized(Codina),
    Stabilized(OneD),
    Stabilized(Hauke),
    Stabilized(Franca),
];

impl ExperimentPreset {
    pub fn get(id: PresetId) -> Self {
        let test2 = |a: f64, h: f64, dt: f64, steps: usize| ExperimentPreset {
            id,
            a,
            mu: 1.0,
            h,
            dt,
            steps,
            ic: IcKind::Hat,
            bc: BcKind::Homogeneous,
            modes: 150,
            initial_subgrid: InitialSubgrid::Zero,
            methods: vec![Galerkin, SpectralFull, SpectralFeasible],
            reference: ReferenceKind::RefinedGalerkin {
                factor: REFERENCE_REFINEMENT,
            },
            published: Vec::new(),
        };
        let test3 = |a: f64, mu: f64, h: f64, dt: f64, table: [(Method, f64, f64); 6]| ExperimentPreset {
            methods: TABLE_METHODS.to_vec(),
            mu,
            published: published(table),
            ..test2(a, h, dt, 3)
        };
        match id {
            PresetId::Test1 => ExperimentPreset {
                id,
                a: 1.0,
                mu: 20.0,
                h: 0.05,
                dt: 0.01,
                steps: 10,
                ic: IcKind::Exponential,
                bc: BcKind::Exponential,
                modes: 10,
                initial_subgrid: InitialSubgrid::Projection,
                methods: vec![SpectralFull, SpectralFeasible, Galerkin],
                reference: ReferenceKind::Exact,
                published: Vec::new(),
            },
            PresetId::Test2BigPeclet => test2(1000.0, 0.02, 1e-3, 9),
            PresetId::Test2SmallDt => test2(1000.0, 0.02, 1e-5, 1),
            PresetId::Test2Cfl => {
                // Δt with CFL = ½ CFL_bound(P), P = |a| h / (2μ) = 0.1
                let (a, h) = (20.0, 0.01);
                let bound = cfl_bound(a * h / 2.0).expect("P = 0.1 is inside the bound's range");
                test2(a, h, 0.5 * bound * h / a, 5)
            }
            PresetId::Test3A => test3(
                300.0,
                1.0,
                0.02,
                1e-2,
                [
                    (Galerkin, 1.1784e-02, 4.7505e-02),
                    (SpectralFeasible, 8.7889e-06, 5.4716e-05),
                    (Stabilized(Codina), 3.2285e-03, 1.4329e-02),
                    (Stabilized(OneD), 1.3805e-03, 1.3446e-03),
                    (Stabilized(Hauke), 2.1713e-03, 1.1124e-02),
                    (Stabilized(Franca), 9.9020e-03, 5.0380e-02),
                ],
            ),
            PresetId::Test3B => test3(
                100.0,
                0.5,
                0.01,
                1e-3,
                [
                    (Galerkin, 9.6551e-03, 7.7424e-02),
                    (SpectralFeasible, 7.2887e-05, 5.2396e-04),
                    (Stabilized(Codina), 1.3580e-02, 6.4992e-02),
                    (Stabilized(OneD), 3.7524e-03, 5.3902e-03),
                    (Stabilized(Hauke), 4.2353e-03, 3.3330e-02),
                    (Stabilized(Franca), 4.4200e-02, 3.1419e-01),
                ],
            ),
            PresetId::Test3C => test3(
                700.0,
                1.0,
                0.01,
                1e-2,
                [
                    (Galerkin, 4.5006e-03, 3.3305e-02),
                    (SpectralFeasible, 1.6381e-06, 2.0138e-05),
                    (Stabilized(Codina), 8.752e-04, 8.4455e-03),
                    (Stabilized(OneD), 3.3968e-04, 4.5556e-04),
                    (Stabilized(Hauke), 5.6656e-04, 5.6930e-03),
                    (Stabilized(Franca), 3.0238e-03, 3.0336e-02),
                ],
            ),
        }
    }

    /// Cell Péclet number P = |a| h / (2μ).
    pub fn peclet(&self) -> f64 {
        self.a.abs() * self.h / (2.0 * self.mu)
    }

    /// S = Δt μ / h².
    pub fn strength(&self) -> f64 {
        self.dt * self.mu / (self.h * self.h)
    }

    pub fn time(&self) -> Result<TimeGrid> {
        TimeGrid::from_step(self.dt, self.steps)
    }

    /// The preset as a solver problem; `h` overrides the preset mesh size.
    pub fn problem_with(&self, h: f64, dt: f64, steps: usize) -> Result<Problem> {
        let n = (1.0 / h).round();
        if !(n >= 1.0) || ((1.0 / n) - h).abs() > 1e-9 * h {
            return Err(SvmsError::invalid(format!("h = {h} does not divide (0, 1)")));
        }
        let initial = match self.ic {
            IcKind::Hat => InitialCondition::Hat,
            IcKind::Exponential => InitialCondition::Exponential,
        };
        let bc = match self.bc {
            BcKind::Homogeneous => DirichletBC::homogeneous(),
            BcKind::Exponential => DirichletBC::exponential(self.a, self.mu),
        };
        Ok(Problem {
            mesh: Mesh1D::uniform(0.0, 1.0, n as usize)?,
            mu: self.mu,
            velocity: VelocityField::Constant(self.a),
            projection: ProjectionRule::Midpoint,
            source: Source::Zero,
            bc,
            time: TimeGrid::from_step(dt, steps)?,
            initial,
        })
    }

    pub fn problem(&self) -> Result<Problem> {
        self.problem_with(self.h, self.dt, self.steps)
    }
}
