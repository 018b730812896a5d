use super::{Mesh1D, NodalField, Source, TriDiagSystem, Tridiag};
use crate::quadrature::UnitGauss;
use crate::{Result, SvmsError};

/// Gauss points used for load vectors.
const LOAD_POINTS: usize = 8;

/// Scatters a 2×2 element matrix `e[l][m]` (test `l`, trial `m`) into `t`.
pub fn add_element_matrix(t: &mut Tridiag, k: usize, e: &[[f64; 2]; 2]) {
    for (l, row) in e.iter().enumerate() {
        for (m, v) in row.iter().enumerate() {
            t.add(k + l, k + m, *v);
        }
    }
}

/// (M)_{lm} = (φ_m, φ_l).
pub fn assemble_mass(mesh: &Mesh1D) -> Tridiag {
    let mut t = Tridiag::zeros(mesh.n_nodes());
    for k in 0..mesh.n_elements() {
        let h = mesh.h(k);
        add_element_matrix(&mut t, k, &[[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]);
    }
    t
}

/// (a_K ∂ₓφ_m, φ_l) with one velocity per element.
pub fn assemble_advection(mesh: &Mesh1D, a_k: &[f64]) -> Result<Tridiag> {
    check_elements(mesh, a_k)?;
    let mut t = Tridiag::zeros(mesh.n_nodes());
    for (k, &a) in a_k.iter().enumerate() {
        let q = 0.5 * a;
        add_element_matrix(&mut t, k, &[[-q, q], [-q, q]]);
    }
    Ok(t)
}

/// μ(∂ₓφ_m, ∂ₓφ_l).
pub fn assemble_diffusion(mesh: &Mesh1D, mu: f64) -> Tridiag {
    let mut t = Tridiag::zeros(mesh.n_nodes());
    for k in 0..mesh.n_elements() {
        let d = mu / mesh.h(k);
        add_element_matrix(&mut t, k, &[[d, -d], [-d, d]]);
    }
    t
}

/// Advection-diffusion stiffness (R)_{lm} = b(φ_m, φ_l).
pub fn assemble_stiffness(mesh: &Mesh1D, a_k: &[f64], mu: f64) -> Result<Tridiag> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(SvmsError::invalid(format!("diffusion must be positive, got {mu}")));
    }
    let mut r = assemble_advection(mesh, a_k)?;
    r.axpy(1.0, &assemble_diffusion(mesh, mu));
    Ok(r)
}

/// (F)_l = ⟨f(·, t), φ_l⟩.
pub fn assemble_load(mesh: &Mesh1D, source: &Source, t: f64) -> Vec<f64> {
    let mut load = vec![0.0; mesh.n_nodes()];
    if source.is_zero() {
        return load;
    }
    let q = UnitGauss::new(LOAD_POINTS);
    for k in 0..mesh.n_elements() {
        let (xa, h) = (mesh.nodes()[k], mesh.h(k));
        for (s, w) in q.iter() {
            let f = source.eval(xa + h * s, t);
            load[k] += h * w * f * (1.0 - s);
            load[k + 1] += h * w * f * s;
        }
    }
    load
}

/// Backward Euler Galerkin system (M + Δt R) u = M uⁿ + Δt F, before boundary conditions.
pub fn galerkin_system(
    mass: &Tridiag,
    stiffness: &Tridiag,
    dt: f64,
    u_prev: &NodalField,
    load: &[f64],
) -> Result<TriDiagSystem> {
    let mut lhs = mass.clone();
    lhs.axpy(dt, stiffness);
    let mut rhs = mass.matvec(u_prev);
    for (r, f) in rhs.iter_mut().zip(load) {
        *r += dt * f;
    }
    TriDiagSystem::new(lhs, rhs)
}

fn check_elements(mesh: &Mesh1D, values: &[f64]) -> Result<()> {
    if values.len() != mesh.n_elements() {
        return Err(SvmsError::Mismatch {
            expected: mesh.n_elements(),
            got: values.len(),
        });
    }
    Ok(())
}
