mod common;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svms::mesh_fem::{DirichletBC, InitialCondition, Mesh1D, NodalField, Problem, ProjectionRule, Source, TimeGrid, VelocityField};
use svms::vms_full::{step_full, FullVmsConfig, SubgridState};

fn config(mesh: Mesh1D, velocity: VelocityField, mu: f64, dt: f64, modes: usize, source: Source, bc: DirichletBC) -> FullVmsConfig {
    FullVmsConfig::new(
        Problem {
            mesh,
            mu,
            velocity,
            projection: ProjectionRule::Midpoint,
            source,
            bc,
            time: TimeGrid::from_step(dt, 3).unwrap(),
            initial: InitialCondition::Hat,
        },
        modes,
    )
}

#[test]
fn one_step_matches_monolithic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases: Vec<(Mesh1D, VelocityField, f64, f64, usize)> = vec![
        (Mesh1D::uniform(0.0, 1.0, 4).unwrap(), VelocityField::Constant(30.0), 1.0, 1e-2, 3),
        (Mesh1D::new(vec![0.0, 0.1, 0.35, 0.5, 0.8, 1.0]).unwrap(), VelocityField::Constant(-12.0), 0.5, 5e-3, 5),
        (
            Mesh1D::uniform(0.0, 1.0, 8).unwrap(),
            VelocityField::Function(Arc::new(|x, _| if x < 0.5 { 80.0 } else { -20.0 })),
            1.0,
            1e-3,
            4,
        ),
        (Mesh1D::uniform(0.0, 2.0, 6).unwrap(), VelocityField::Constant(0.0), 2.0, 0.1, 5),
    ];
    for (mesh, vel, mu, dt, modes) in cases {
        let ne = mesh.n_elements();
        let u_prev: Vec<f64> = (0..mesh.n_nodes()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c_prev: Vec<Vec<f64>> = (0..ne)
            .map(|_| (0..modes).map(|_| rng.random_range(-0.05..0.05)).collect())
            .collect();
        let f = |x: f64| (3.0 * x).sin() + 0.5;
        let cfg = config(
            mesh.clone(),
            vel.clone(),
            mu,
            dt,
            modes,
            Source::Function(Arc::new(move |x, _| f(x))),
            DirichletBC::new(|t| 0.3 + t, |t| -0.2 * t),
        );
        let a_k = cfg.problem.velocity_at(dt);
        let (u, s) = step_full(
            &NodalField::new(u_prev.clone()),
            &SubgridState::from_amplitudes(c_prev.clone()).unwrap(),
            0,
            &cfg,
        )
        .unwrap();
        let (uo, co) = common::monolithic_step(&mesh, &a_k, mu, dt, modes, &u_prev, &c_prev, (0.3 + dt, -0.2 * dt), &f);
        for i in 0..mesh.n_nodes() {
            assert!((u[i] - uo[i]).abs() <= 1e-10, "node {i}: {} vs {}", u[i], uo[i]);
        }
        for k in 0..ne {
            for j in 0..modes {
                assert!((s.element(k)[j] - co[k][j]).abs() <= 1e-10, "amp ({k},{j})");
            }
        }
    }
}
