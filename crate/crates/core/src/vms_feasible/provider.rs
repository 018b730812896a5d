use crate::spectral_kernels::{sum_all, ElementNondimParams, KernelSet, TruncationPolicy};
use crate::Result;

/// Kernel values at one (P, S) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelLookup {
    pub values: KernelSet,
    /// True when the point lies outside the range the provider covers
    /// (table clamping/extrapolation, or a truncated direct series).
    pub out_of_range: bool,
}

/// Source of the 40 dimensionless kernels as functions of (P, S).
pub trait KernelProvider: Sync {
    fn kernels(&self, p: f64, s: f64) -> Result<KernelLookup>;

    fn name(&self) -> &'static str;
}

/// Direct truncated summation of the spectral series.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectProvider {
    pub policy: TruncationPolicy,
}

impl DirectProvider {
    pub fn new(policy: TruncationPolicy) -> Self {
        DirectProvider { policy }
    }
}

impl KernelProvider for DirectProvider {
    fn kernels(&self, p: f64, s: f64) -> Result<KernelLookup> {
        let params = ElementNondimParams::from_ps(p, s)?;
        let sums = sum_all(&params, &self.policy);
        if sums.overflow && self.policy.epsilon > 0.0 {
            log::warn!("kernel series truncated at {} modes for P={p}, S={s}", self.policy.j_max);
        }
        Ok(KernelLookup {
            values: sums.values,
            out_of_range: sums.overflow && self.policy.epsilon > 0.0,
        })
    }

    fn name(&self) -> &'static str {
        "direct"
    }
}

/// All kernels zero: the feasible step collapses to Galerkin.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroProvider;

impl KernelProvider for ZeroProvider {
    fn kernels(&self, _p: f64, _s: f64) -> Result<KernelLookup> {
        Ok(KernelLookup {
            values: KernelSet::zeros(),
            out_of_range: false,
        })
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}
