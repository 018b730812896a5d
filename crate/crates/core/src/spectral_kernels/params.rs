use std::f64::consts::PI;

use crate::{Result, SvmsError};

/// Dimensionless description of one element at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementNondimParams {
    /// Péclet number |a_K| h_K / (2μ).
    pub p: f64,
    /// Strength Δt μ / h_K².
    pub s: f64,
    pub sign_a: f64,
    pub h: f64,
    pub mu: f64,
    pub a: f64,
    pub dt: f64,
}

/// Builds the element parameters from physical data.
pub fn peclet_strength(a: f64, h: f64, mu: f64, dt: f64) -> Result<ElementNondimParams> {
    for (name, v) in [("h", h), ("mu", mu), ("dt", dt)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(SvmsError::invalid(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if !a.is_finite() {
        return Err(SvmsError::invalid(format!("velocity must be finite, got {a}")));
    }
    Ok(ElementNondimParams {
        p: a.abs() * h / (2.0 * mu),
        s: dt * mu / (h * h),
        sign_a: if a < 0.0 { -1.0 } else { 1.0 },
        h,
        mu,
        a,
        dt,
    })
}

impl ElementNondimParams {
    /// Representative physical data for given (P, S): h = μ = 1, a = 2P, Δt = S.
    pub fn from_ps(p: f64, s: f64) -> Result<Self> {
        if !(p >= 0.0) || !(s > 0.0) {
            return Err(SvmsError::invalid(format!("need P >= 0 and S > 0, got ({p}, {s})")));
        }
        peclet_strength(2.0 * p, 1.0, 1.0, s)
    }

    /// Local index in the oriented frame (identity for a ≥ 0, swap otherwise).
    pub fn orient(&self, local: usize) -> usize {
        if self.sign_a < 0.0 {
            1 - local
        } else {
            local
        }
    }

    /// P² + π² j², the eigenvalue scaled by h²/μ.
    pub fn lambda_hat(&self, j: usize) -> f64 {
        let k = PI * j as f64;
        self.p * self.p + k * k
    }
}

/// β_j = 1 / (1 + S (P² + π² j²)).
pub fn beta(j: usize, p: &ElementNondimParams) -> f64 {
    1.0 / (1.0 + p.s * p.lambda_hat(j))
}

/// λ_j = μ (jπ/h)² + a²/(4μ).
pub fn eigenvalue(j: usize, p: &ElementNondimParams) -> f64 {
    let k = PI * j as f64 / p.h;
    p.mu * k * k + p.a * p.a / (4.0 * p.mu)
}

/// One eigenpair of the element operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub j: usize,
    pub lambda: f64,
    pub p: f64,
    pub h: f64,
}

impl EigenPair {
    pub fn new(j: usize, params: &ElementNondimParams) -> Self {
        EigenPair {
            j,
            lambda: eigenvalue(j, params),
            p: params.p,
            h: params.h,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn test_setups() {
        let p = peclet_strength(1000.0, 0.02, 1.0, 1e-3).unwrap();
        assert!(rel(p.p, 10.0) < 1e-12 && rel(p.s, 2.5) < 1e-12);
        let p = peclet_strength(20.0, 0.01, 1.0, 9.259e-6).unwrap();
        assert!(rel(p.p, 0.1) < 1e-12 && rel(p.s, 0.09259) < 1e-12);
        assert_eq!(peclet_strength(0.0, 0.1, 2.0, 0.3).unwrap().p, 0.0);
        assert!(peclet_strength(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(peclet_strength(1.0, 0.1, -1.0, 1.0).is_err());
    }

    #[test]
    fn beta_values() {
        let p = ElementNondimParams::from_ps(0.0, 1.0).unwrap();
        assert!((beta(1, &p) - 1.0 / (1.0 + PI * PI)).abs() < 1e-15);
        assert!((beta(1, &p) - 0.092000).abs() < 1e-6);
        let p = ElementNondimParams::from_ps(10.0, 2.5).unwrap();
        assert!(rel(beta(1, &p), 3.6276e-3) < 1e-4);
        let p = ElementNondimParams::from_ps(3.0, 1e-14).unwrap();
        assert!((beta(7, &p) - 1.0).abs() < 1e-11);
        assert!((2..50).all(|j| beta(j, &p) < beta(j - 1, &p)));
    }

    #[test]
    fn eigenvalue_matches_beta() {
        let p = peclet_strength(1000.0, 0.02, 1.0, 1e-3).unwrap();
        assert!((eigenvalue(1, &p) - 274674.011).abs() < 1e-3);
        for q in [p, peclet_strength(-3.0, 0.1, 0.4, 0.02).unwrap()] {
            for j in 1..=100 {
                assert!((beta(j, &q) * (1.0 + q.dt * eigenvalue(j, &q)) - 1.0).abs() < 1e-12);
            }
        }
        let z = peclet_strength(0.0, 0.5, 2.0, 1.0).unwrap();
        assert!(rel(eigenvalue(3, &z), 2.0 * (3.0 * PI / 0.5_f64).powi(2)) < 1e-15);
    }
}
