//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use svms::mesh_fem::Mesh1D;
use svms::quadrature::UnitGauss;

/// Centred element mode j and its x-derivative, evaluated in physical units
/// at reference coordinate `t`, for an element of length h with velocity a.
pub struct ModeFn {
    pub h: f64,
    pub pe: f64,
    pub flip: bool,
}

impl ModeFn {
    pub fn new(a: f64, h: f64, mu: f64) -> Self {
        ModeFn {
            h,
            pe: a.abs() * h / (2.0 * mu),
            flip: a < 0.0,
        }
    }

    fn xi(&self, t: f64) -> (f64, f64) {
        if self.flip {
            (1.0 - t, -1.0 / self.h)
        } else {
            (t, 1.0 / self.h)
        }
    }

    pub fn z(&self, j: usize, t: f64) -> f64 {
        let (xi, _) = self.xi(t);
        (2.0 / self.h).sqrt() * (self.pe * (xi - 0.5)).exp() * (PI * j as f64 * xi).sin()
    }

    pub fn dz(&self, j: usize, t: f64) -> f64 {
        let (xi, d) = self.xi(t);
        let k = PI * j as f64;
        (2.0 / self.h).sqrt() * d * (self.pe * (xi - 0.5)).exp() * (self.pe * (k * xi).sin() + k * (k * xi).cos())
    }

    pub fn weight(&self, t: f64) -> f64 {
        let (xi, _) = self.xi(t);
        (-2.0 * self.pe * (xi - 0.5)).exp()
    }

    pub fn dweight(&self, t: f64) -> f64 {
        let (_, d) = self.xi(t);
        -2.0 * self.pe * d * self.weight(t)
    }

    /// p z_j and its derivative.
    pub fn pz(&self, j: usize, t: f64) -> (f64, f64) {
        let (w, z) = (self.weight(t), self.z(j, t));
        (w * z, self.dweight(t) * z + w * self.dz(j, t))
    }
}

/// One Backward Euler step of the Galerkin method on X_h plus J element modes
/// per element, assembled densely by quadrature and solved by LU.
///
/// Returns nodal values and per-element mode amplitudes.
#[allow(clippy::too_many_arguments)]
pub fn monolithic_step(
    mesh: &Mesh1D,
    a_k: &[f64],
    mu: f64,
    dt: f64,
    modes: usize,
    u_prev: &[f64],
    c_prev: &[Vec<f64>],
    bc: (f64, f64),
    f: &dyn Fn(f64) -> f64,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let q = UnitGauss::new(200);
    let nn = mesh.n_nodes();
    let ne = mesh.n_elements();
    let dim = nn + ne * modes;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    let bub = |k: usize, j: usize| nn + k * modes + (j - 1);
    let phi = |l: usize, t: f64| if l == 0 { 1.0 - t } else { t };

    for k in 0..ne {
        let (xa, h) = (mesh.nodes()[k], mesh.h(k));
        let md = ModeFn::new(a_k[k], h, mu);
        let adv = a_k[k];
        let dphi = |l: usize| if l == 0 { -1.0 / h } else { 1.0 / h };
        for (t, w) in q.iter() {
            let wx = w * h;
            let x = xa + h * t;
            let uh = (1.0 - t) * u_prev[k] + t * u_prev[k + 1];
            let ut: f64 = (1..=modes).map(|j| c_prev[k][j - 1] * md.z(j, t)).sum();
            let old = uh + ut;
            let fx = f(x);
            // test φ_l
            for l in 0..2 {
                let row = k + l;
                b[row] += wx * (old * phi(l, t) + dt * fx * phi(l, t));
                for m in 0..2 {
                    a[(row, k + m)] += wx * (phi(m, t) * phi(l, t) + dt * (adv * dphi(m) * phi(l, t) + mu * dphi(m) * dphi(l)));
                }
                for j in 1..=modes {
                    let (z, dz) = (md.z(j, t), md.dz(j, t));
                    a[(row, bub(k, j))] += wx * (z * phi(l, t) + dt * (adv * dz * phi(l, t) + mu * dz * dphi(l)));
                }
            }
            // test p z_i
            for i in 1..=modes {
                let row = bub(k, i);
                let (pz, dpz) = md.pz(i, t);
                b[row] += wx * (old * pz + dt * fx * pz);
                for m in 0..2 {
                    a[(row, k + m)] += wx * (phi(m, t) * pz + dt * (adv * dphi(m) * pz + mu * dphi(m) * dpz));
                }
                for j in 1..=modes {
                    let (z, dz) = (md.z(j, t), md.dz(j, t));
                    a[(row, bub(k, j))] += wx * (z * pz + dt * (adv * dz * pz + mu * dz * dpz));
                }
            }
        }
    }
    for (row, val) in [(0, bc.0), (nn - 1, bc.1)] {
        for c in 0..dim {
            a[(row, c)] = 0.0;
        }
        a[(row, row)] = 1.0;
        b[row] = val;
    }
    let x = a.lu().solve(&b).expect("monolithic system is singular");
    let nodal = x.rows(0, nn).iter().copied().collect();
    let amps = (0..ne)
        .map(|k| (1..=modes).map(|j| x[bub(k, j)]).collect())
        .collect();
    (nodal, amps)
}

/// Dense LU solve of the tridiagonal system (reference for the Thomas solver).
pub fn dense_solve(t: &svms::mesh_fem::Tridiag, rhs: &[f64]) -> Vec<f64> {
    let n = t.len();
    let a = DMatrix::from_fn(n, n, |i, j| t.get(i, j));
    a.lu().solve(&DVector::from_column_slice(rhs)).unwrap().iter().copied().collect()
}
