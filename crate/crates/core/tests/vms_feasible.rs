use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svms::baselines::run_galerkin;
use svms::mesh_fem::{DirichletBC, InitialCondition, Mesh1D, NodalField, Problem, ProjectionRule, Source, TimeGrid, VelocityField};
use svms::spectral_kernels::{peclet_strength, ElementModes, TruncationPolicy};
use svms::vms_feasible::{
    run_feasible, DirectProvider, FeasibleConfig, FeasibleState, FeasibleStepper, GPairing, ZeroProvider,
};
use svms::vms_full::{run_full_steps, FullStepper, FullVmsConfig, SubgridState};

fn problem(mesh: Mesh1D, velocity: VelocityField, mu: f64, dt: f64, steps: usize, source: Source) -> Problem {
    Problem {
        mesh,
        mu,
        velocity,
        projection: ProjectionRule::Midpoint,
        source,
        bc: DirichletBC::new(|t| 0.3 + t, |t| -0.2 * t),
        time: TimeGrid::from_step(dt, steps).unwrap(),
        initial: InitialCondition::Hat,
    }
}

fn cases() -> Vec<Problem> {
    let time_source = || Source::Function(Arc::new(|_, t| 1.0 + 20.0 * t));
    vec![
        problem(Mesh1D::uniform(0.0, 1.0, 10).unwrap(), VelocityField::Constant(40.0), 1.0, 1e-2, 4, Source::Zero),
        problem(
            Mesh1D::new(vec![0.0, 0.1, 0.35, 0.5, 0.8, 1.0]).unwrap(),
            VelocityField::Function(Arc::new(|x, _| if x < 0.4 { -25.0 } else { 20.0 })),
            0.5,
            5e-3,
            4,
            time_source(),
        ),
        problem(Mesh1D::uniform(0.0, 2.0, 7).unwrap(), VelocityField::Constant(0.0), 2.0, 0.1, 3, time_source()),
    ]
}

/// Sub-grid amplitudes of the approximated residual of the step uⁿ⁻¹ → uⁿ.
fn residual_amplitudes(pb: &Problem, modes: usize, u_prev: &[f64], u: &[f64], n: usize) -> SubgridState {
    let dt = pb.dt();
    let t = pb.time.t(n);
    let a_k = pb.velocity_at(t);
    let amps = (0..pb.mesh.n_elements())
        .map(|k| {
            let prm = peclet_strength(a_k[k], pb.mesh.h(k), pb.mu, dt).unwrap();
            let em = ElementModes::new(prm, modes);
            let f = match &pb.source {
                Source::Zero => 0.0,
                Source::Function(f) => f(pb.mesh.midpoint(k), t),
            };
            em.couplings
                .iter()
                .zip(&em.beta)
                .map(|(c, b)| {
                    let f_j = f * (c.phi_pz[0] + c.phi_pz[1]);
                    let mut r = dt * f_j;
                    for m in 0..2 {
                        r += c.phi_pz[m] * u_prev[k + m] - (c.phi_pz[m] + dt * c.b_phi_pz[m]) * u[k + m];
                    }
                    b * r
                })
                .collect()
        })
        .collect();
    SubgridState::from_amplitudes(amps).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn reduces_to_full_step_with_residual_subgrid() {
    let modes = 12;
    let provider = DirectProvider::new(TruncationPolicy::fixed(modes));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for pb in cases() {
        let n_nodes = pb.mesh.n_nodes();
        let full_cfg = FullVmsConfig::new(pb.clone(), modes);
        let cfg = FeasibleConfig::new(pb.clone());
        let mut full = FullStepper::new(&full_cfg).unwrap();
        let mut feas = FeasibleStepper::new(&cfg, &provider).unwrap();
        for n in 1..3 {
            let u_prev: Vec<f64> = (0..n_nodes).map(|_| rng.random_range(-1.0..1.0)).collect();
            let u: Vec<f64> = (0..n_nodes).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = residual_amplitudes(&pb, modes, &u_prev, &u, n);
            let state = FeasibleState {
                u: NodalField::new(u.clone()),
                u_prev: Some(NodalField::new(u_prev)),
                step: n,
            };
            let got = feas.step(&state).unwrap();
            let (want, _) = full.step(&NodalField::new(u), &s, n).unwrap();
            let d = max_diff(&got, &want);
            assert!(d <= 1e-10, "n={n}: {d:e}");
        }
    }
}

#[test]
fn first_two_steps_match_full_method_from_zero_subgrid() {
    let modes = 9;
    let provider = DirectProvider::new(TruncationPolicy::fixed(modes));
    for pb in cases() {
        let feas = run_feasible(&FeasibleConfig::new(pb.clone()), &provider).unwrap();
        let full = run_full_steps(&FullVmsConfig::new(pb, modes), 2).unwrap();
        for n in 1..=2 {
            let d = max_diff(&feas[n], &full.nodal[n]);
            assert!(d <= 1e-10, "n={n}: {d:e}");
        }
    }
}

#[test]
fn zero_kernels_reproduce_galerkin_bitwise() {
    for pb in cases() {
        for g_pairing in [GPairing::Appendix, GPairing::Main] {
            let cfg = FeasibleConfig { problem: pb.clone(), g_pairing };
            let feas = run_feasible(&cfg, &ZeroProvider).unwrap();
            let gal = run_galerkin(&pb).unwrap();
            assert_eq!(feas, gal);
        }
    }
}

#[test]
fn pairings_agree_on_first_step_only() {
    let provider = DirectProvider::default();
    let pb = cases().remove(0);
    let run = |g_pairing| run_feasible(&FeasibleConfig { problem: pb.clone(), g_pairing }, &provider).unwrap();
    let (a, m) = (run(GPairing::Appendix), run(GPairing::Main));
    assert_eq!(a[1], m[1]);
    assert!(max_diff(&a[2], &m[2]) > 0.0);
}
