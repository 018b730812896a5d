use std::f64::consts::{PI, SQRT_2};

use super::params::{beta, ElementNondimParams};
use crate::quadrature::UnitGauss;

/// Derivative signs of the reference hat functions φ₀ = 1 − x̂, φ₁ = x̂.
pub(crate) const SIGNS: [f64; 2] = [-1.0, 1.0];

/// √h · z_j at reference coordinate `x`, i.e. √2 e^{P ξ} sin(jπ ξ) with ξ the
/// oriented coordinate (x̂ for a ≥ 0, 1 − x̂ otherwise).
pub fn mode_value(j: usize, p: &ElementNondimParams, x: f64) -> f64 {
    let xi = oriented(p, x);
    SQRT_2 * (p.p * xi).exp() * (PI * j as f64 * xi).sin()
}

/// Midpoint-centred mode √2 e^{P (ξ − ½)} sin(jπ ξ); orthonormal against
/// [`weight_centered`].
pub fn mode_value_centered(j: usize, p: &ElementNondimParams, x: f64) -> f64 {
    let xi = oriented(p, x);
    SQRT_2 * (p.p * (xi - 0.5)).exp() * (PI * j as f64 * xi).sin()
}

/// Centred weight e^{−2P (ξ − ½)}.
pub fn weight_centered(p: &ElementNondimParams, x: f64) -> f64 {
    (-2.0 * p.p * (oriented(p, x) - 0.5)).exp()
}

fn oriented(p: &ElementNondimParams, x: f64) -> f64 {
    if p.sign_a < 0.0 {
        1.0 - x
    } else {
        x
    }
}

/// Reference-element integrals of mode j, stored in centred form.
///
/// With k = jπ:
/// d0 = ∫ e^{−Px̂} sin(kx̂), e0 = ∫ e^{Px̂} sin(kx̂),
/// a_m = ∫ φ_m e^{−Px̂} sin(kx̂), c_m = ∫ φ_m e^{Px̂} sin(kx̂).
/// The stored values are d0·e^{P/2}, a_m·e^{P/2}, e0·e^{−P/2}, c_m·e^{−P/2};
/// the unscaled values are available through the accessors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeKernels {
    pub j: usize,
    pub p: f64,
    pub d0s: f64,
    pub e0s: f64,
    pub a_s: [f64; 2],
    pub c_s: [f64; 2],
}

impl ModeKernels {
    pub fn d0(&self) -> f64 {
        self.d0s * (-0.5 * self.p).exp()
    }

    pub fn e0(&self) -> f64 {
        self.e0s * (0.5 * self.p).exp()
    }

    pub fn a(&self, m: usize) -> f64 {
        self.a_s[m] * (-0.5 * self.p).exp()
    }

    pub fn c(&self, m: usize) -> f64 {
        self.c_s[m] * (0.5 * self.p).exp()
    }
}

/// Evaluates [`ModeKernels`] for successive j at fixed P; the exponentials are
/// computed once.
#[derive(Debug, Clone, Copy)]
pub struct ModeKernelsGen {
    p: f64,
    ep: f64,
    em: f64,
    sh2: f64,
    ch2: f64,
}

impl ModeKernelsGen {
    pub fn new(p: f64) -> Self {
        let half = 0.5 * p;
        ModeKernelsGen {
            p,
            ep: half.exp(),
            em: (-half).exp(),
            sh2: 2.0 * half.sinh(),
            ch2: 2.0 * half.cosh(),
        }
    }

    pub fn at(&self, j: usize) -> ModeKernels {
        let (p, ep, em) = (self.p, self.ep, self.em);
        let k = PI * j as f64;
        let d = p * p + k * k;
        let d2 = d * d;
        let even = j.is_multiple_of(2);
        let sigma = if even { 1.0 } else { -1.0 };
        // e^{P/2} − σ e^{−P/2} and e^{−P/2} − σ e^{P/2}
        let (n_minus, n_plus) = if even {
            (self.sh2, -self.sh2)
        } else {
            (self.ch2, self.ch2)
        };
        let d0s = k * n_minus / d;
        let e0s = k * n_plus / d;
        let a0 = (k * d * ep - 2.0 * p * k * n_minus) / d2;
        let a1 = (-k * sigma * em * d + 2.0 * p * k * n_minus) / d2;
        let c0 = (k * d * em + 2.0 * p * k * n_plus) / d2;
        let c1 = (-k * sigma * ep * d - 2.0 * p * k * n_plus) / d2;
        ModeKernels {
            j,
            p,
            d0s,
            e0s,
            a_s: [a0, a1],
            c_s: [c0, c1],
        }
    }
}

/// Closed-form reference integrals of mode `j` at Péclet number `p`.
pub fn base_integrals(j: usize, p: f64) -> ModeKernels {
    ModeKernelsGen::new(p).at(j)
}

/// Gauss-Legendre evaluation of the same integrals (cross-validation path).
pub fn base_integrals_quadrature(j: usize, p: f64, q: &UnitGauss) -> ModeKernels {
    let k = PI * j as f64;
    let mut m = ModeKernels {
        j,
        p,
        d0s: 0.0,
        e0s: 0.0,
        a_s: [0.0; 2],
        c_s: [0.0; 2],
    };
    for (x, w) in q.iter() {
        let s = (k * x).sin();
        let dm = w * (-p * (x - 0.5)).exp() * s;
        let dp = w * (p * (x - 0.5)).exp() * s;
        m.d0s += dm;
        m.e0s += dp;
        m.a_s[0] += (1.0 - x) * dm;
        m.a_s[1] += x * dm;
        m.c_s[0] += (1.0 - x) * dp;
        m.c_s[1] += x * dp;
    }
    m
}

/// Physical pairings of mode j with the two local hat functions, indexed by
/// physical local index (0 = left node, 1 = right node).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    /// (φ_m, p z_j)
    pub phi_pz: [f64; 2],
    /// (z_j, φ_l)
    pub z_phi: [f64; 2],
    /// b(φ_m, p z_j)
    pub b_phi_pz: [f64; 2],
    /// b(z_j, φ_l)
    pub b_z_phi: [f64; 2],
}

impl Couplings {
    fn from_kernels(mk: &ModeKernels, p: &ElementNondimParams, centered: bool) -> Self {
        let (d0, e0, a, c) = if centered {
            (mk.d0s, mk.e0s, mk.a_s, mk.c_s)
        } else {
            (mk.d0(), mk.e0(), [mk.a(0), mk.a(1)], [mk.c(0), mk.c(1)])
        };
        let r = (2.0 * p.h).sqrt();
        let g = p.a.abs() * (2.0 / p.h).sqrt();
        let mut out = Couplings {
            phi_pz: [0.0; 2],
            z_phi: [0.0; 2],
            b_phi_pz: [0.0; 2],
            b_z_phi: [0.0; 2],
        };
        for l in 0..2 {
            let o = p.orient(l);
            out.phi_pz[l] = r * a[o];
            out.z_phi[l] = r * c[o];
            out.b_phi_pz[l] = SIGNS[o] * g * d0;
            out.b_z_phi[l] = -SIGNS[o] * g * e0;
        }
        out
    }
}

/// Physical pairings of the (unscaled) mode `j` on the element `p`.
///
/// The bilinear couplings use b(φ_m, p z_j) = s_m |a| √(2/h) d0 and
/// b(z_j, φ_l) = −s_l |a| √(2/h) e0 in the oriented frame: boundary terms
/// drop because the modes vanish at the element ends.
pub fn bilinear_couplings(j: usize, p: &ElementNondimParams) -> Couplings {
    Couplings::from_kernels(&base_integrals(j, p.p), p, false)
}

/// The first J centred modes of one element: β_j and the four physical
/// pairings of each mode.
#[derive(Debug, Clone)]
pub struct ElementModes {
    pub params: ElementNondimParams,
    pub beta: Vec<f64>,
    pub couplings: Vec<Couplings>,
}

impl ElementModes {
    pub fn new(params: ElementNondimParams, modes: usize) -> Self {
        let gen = ModeKernelsGen::new(params.p);
        let beta = (1..=modes).map(|j| beta(j, &params)).collect();
        let couplings = (1..=modes)
            .map(|j| Couplings::from_kernels(&gen.at(j), &params, true))
            .collect();
        ElementModes {
            params,
            beta,
            couplings,
        }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }
}
