use serde::Serialize;

use crate::mesh_fem::{assemble_diffusion, assemble_mass, Mesh1D, NodalField, TimeGrid};
use crate::{Result, SvmsError};

/// Discrete space-time error norms of a nodal history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    /// max over n = 1..N of ‖eⁿ‖_{L²}.
    pub linf_l2: f64,
    /// (Δt Σₙ |eⁿ|²_{H¹})^{1/2} with the H¹ seminorm.
    pub l2_h1: f64,
    /// Same aggregation with the full H¹ norm.
    pub l2_h1_full: f64,
    /// ‖eⁿ‖_{L²} for n = 1..N.
    pub per_step_l2: Vec<f64>,
}

fn quad_form(m: &crate::mesh_fem::Tridiag, e: &[f64]) -> f64 {
    m.matvec(e).iter().zip(e).map(|(a, b)| a * b).sum::<f64>().max(0.0)
}

/// Norms of `history − reference` over steps 1..N, from the mass and
/// unit-diffusion quadratic forms of the P1 interpolant of the nodal error.
pub fn error_norms(history: &[NodalField], reference: &[NodalField], mesh: &Mesh1D, dt: f64) -> Result<ErrorReport> {
    if history.len() != reference.len() {
        return Err(SvmsError::Mismatch {
            expected: reference.len(),
            got: history.len(),
        });
    }
    if history.len() < 2 {
        return Err(SvmsError::invalid("error norms need at least one time step"));
    }
    if !(dt > 0.0) {
        return Err(SvmsError::invalid(format!("time step must be positive, got {dt}")));
    }
    let mass = assemble_mass(mesh);
    let stiff = assemble_diffusion(mesh, 1.0);
    let mut per_step_l2 = Vec::with_capacity(history.len() - 1);
    let (mut h1, mut h1_full) = (0.0, 0.0);
    for (u, r) in history.iter().zip(reference).skip(1) {
        u.check_len(mesh)?;
        r.check_len(mesh)?;
        let e: Vec<f64> = u.iter().zip(r.iter()).map(|(a, b)| a - b).collect();
        let l2sq = quad_form(&mass, &e);
        let h1sq = quad_form(&stiff, &e);
        per_step_l2.push(l2sq.sqrt());
        h1 += dt * h1sq;
        h1_full += dt * (h1sq + l2sq);
    }
    Ok(ErrorReport {
        linf_l2: per_step_l2.iter().fold(0.0, |m, v| m.max(*v)),
        l2_h1: h1.sqrt(),
        l2_h1_full: h1_full.sqrt(),
        per_step_l2,
    })
}

/// Norms against an analytic solution sampled at the nodes.
pub fn error_norms_exact(
    history: &[NodalField],
    exact: impl Fn(f64, f64) -> f64,
    mesh: &Mesh1D,
    time: &TimeGrid,
) -> Result<ErrorReport> {
    let reference: Vec<NodalField> = (0..history.len())
        .map(|n| NodalField::interpolate(mesh, |x| exact(x, time.t(n))))
        .collect();
    error_norms(history, &reference, mesh, time.dt())
}

/// Least-squares slope of log(error) against log(step).
pub fn convergence_order(errors: &[f64], steps: &[f64]) -> Result<f64> {
    if errors.len() != steps.len() {
        return Err(SvmsError::Mismatch {
            expected: steps.len(),
            got: errors.len(),
        });
    }
    if errors.len() < 3 {
        return Err(SvmsError::Degenerate("convergence order needs at least 3 points".into()));
    }
    if errors.iter().chain(steps).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(SvmsError::Degenerate("errors and steps must be positive and finite".into()));
    }
    let xs: Vec<f64> = steps.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * n {
        return Err(SvmsError::Degenerate("all steps are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Sign changes in the sequence of nodal differences uᵢ₊₁ − uᵢ, ignoring
/// differences with magnitude ≤ `tol`. A single-hump profile has one.
pub fn sign_changes(u: &[f64], tol: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for w in u.windows(2) {
        let d = w[1] - w[0];
        if d.abs() <= tol {
            continue;
        }
        if last != 0.0 && d.signum() != last {
            count += 1;
        }
        last = d.signum();
    }
    count
}

/// (min, max) of a nodal field.
pub fn value_range(u: &[f64]) -> (f64, f64) {
    u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh() -> Mesh1D {
        Mesh1D::uniform(0.0, 1.0, 16).unwrap()
    }

    #[test]
    fn zero_error_gives_zero() {
        let m = mesh();
        let h = vec![NodalField::zeros(17); 4];
        let r = error_norms(&h, &h, &m, 0.1).unwrap();
        assert_eq!((r.linf_l2, r.l2_h1), (0.0, 0.0));
    }

    #[test]
    fn constant_and_linear_errors() {
        let m = mesh();
        let zero = vec![NodalField::zeros(17); 2];
        let one = vec![NodalField::zeros(17), NodalField::new(vec![1.0; 17])];
        let r = error_norms(&one, &zero, &m, 0.1).unwrap();
        assert!((r.linf_l2 - 1.0).abs() < 1e-14);
        assert!(r.l2_h1 < 1e-7);
        let lin = vec![NodalField::zeros(17), NodalField::interpolate(&m, |x| x)];
        let dt = 0.25;
        let r = error_norms(&lin, &zero, &m, dt).unwrap();
        assert!((r.linf_l2 - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((r.l2_h1 - dt.sqrt()).abs() < 1e-14);
        assert!((r.l2_h1_full - (dt * (1.0 + 1.0 / 3.0)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_lengths_fail() {
        let m = mesh();
        let a = vec![NodalField::zeros(17); 3];
        let b = vec![NodalField::zeros(17); 2];
        assert!(matches!(error_norms(&a, &b, &m, 0.1), Err(SvmsError::Mismatch { .. })));
        let c = vec![NodalField::zeros(5); 3];
        assert!(error_norms(&a, &c, &m, 0.1).is_err());
    }

    #[test]
    fn synthetic_orders() {
        let steps = [0.1, 0.05, 0.025, 0.0125];
        let e1: Vec<f64> = steps.iter().map(|d| 3.0 * d).collect();
        let e2: Vec<f64> = steps.iter().map(|d| 0.5 * d * d).collect();
        assert!((convergence_order(&e1, &steps).unwrap() - 1.0).abs() < 1e-12);
        assert!((convergence_order(&e2, &steps).unwrap() - 2.0).abs() < 1e-12);
        assert!(convergence_order(&e1[..2], &steps[..2]).is_err());
        assert!(convergence_order(&[1.0, 2.0, 3.0], &[0.1, 0.1, 0.1]).is_err());
    }

    #[test]
    fn sign_change_counts() {
        assert_eq!(sign_changes(&[0.0, 0.5, 1.0, 1.0, 0.5, 0.0], 1e-6), 1);
        // differences − + + − + −
        assert_eq!(sign_changes(&[0.0, -0.1, 0.5, 1.0, 0.4, 0.5, 0.0], 1e-6), 4);
        assert_eq!(sign_changes(&[0.0, 1e-8, 0.0, 1.0], 1e-6), 0);
    }
}
