//! Element eigenpairs of the advection-diffusion operator with homogeneous
//! Dirichlet conditions, closed-form mode integrals, and the truncated
//! spectral series that define the sub-grid closure.
//!
//! On an element K = [x_a, x_b] with x̂ = (x − x_a)/h and a ≥ 0 the modes are
//! z_j = √(2/h) e^{P x̂} sin(jπ x̂), orthonormal in L²(K) with weight
//! p = e^{−2P x̂}. Internally the exponential is centred at the element
//! midpoint (z_j e^{−P/2}, weight p e^{P}), which leaves every p-weighted
//! product unchanged but keeps the stored integrals O(e^{P/2}) instead of
//! O(e^{P}). Negative velocities are handled by the mirror x̂ → 1 − x̂, which
//! swaps the two local indices.

mod modes;
mod params;
mod series;
mod subgrid;

pub use modes::{
    base_integrals, base_integrals_quadrature, bilinear_couplings, mode_value, mode_value_centered,
    weight_centered, Couplings, ElementModes, ModeKernels, ModeKernelsGen,
};
pub use params::{beta, eigenvalue, peclet_strength, EigenPair, ElementNondimParams};
pub use series::{
    required_modes, sum_all, sum_series, AllSums, Entry, Family, IntegralMethod, KernelSet, SeriesSum, StopRule,
    TruncationPolicy, N_KERNELS,
};
pub use subgrid::{project_onto_modes, reconstruct_subgrid};
