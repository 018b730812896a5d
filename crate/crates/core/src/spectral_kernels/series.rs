use std::fmt;

use log::warn;

use super::modes::{base_integrals_quadrature, ModeKernels, ModeKernelsGen, SIGNS};
use super::params::{beta, ElementNondimParams};
use crate::quadrature::UnitGauss;

/// Total number of scalar kernels: 8 matrix families × 4 + 4 vector families × 2.
pub const N_KERNELS: usize = 40;

/// Gauss points of the quadrature fallback for the mode integrals.
const FALLBACK_POINTS: usize = 64;

/// Dimensionless spectral-series kernel families.
///
/// With oriented local indices, s₀ = −1, s₁ = +1 and centred integrals, the
/// term of mode j is (β = β_j, entry (m, l) = trial m, test l)
///
/// | family | term | physical factor |
/// |---|---|---|
/// | A1 | 2β a_m c_l | h |
/// | A2 | 2β s_m d0 c_l | \|a\| |
/// | A3 | −2β s_l a_m e0 | \|a\| |
/// | A4 | −2β s_m s_l d0 e0 | a²/h |
/// | B1–B4 | as A1–A4 with β² | as A1–A4 |
/// | Fd0 | 2β d0 c_l | f h |
/// | Fe0 | −2β s_l d0 e0 | f \|a\| |
/// | Fbd0, Fbe0 | as Fd0, Fe0 with β² | as Fd0, Fe0 |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    B4,
    Fd0,
    Fe0,
    Fbd0,
    Fbe0,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::A1,
        Family::A2,
        Family::A3,
        Family::A4,
        Family::B1,
        Family::B2,
        Family::B3,
        Family::B4,
        Family::Fd0,
        Family::Fe0,
        Family::Fbd0,
        Family::Fbe0,
    ];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<Family> {
        Family::ALL.get(id).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::A1 => "A1",
            Family::A2 => "A2",
            Family::A3 => "A3",
            Family::A4 => "A4",
            Family::B1 => "B1",
            Family::B2 => "B2",
            Family::B3 => "B3",
            Family::B4 => "B4",
            Family::Fd0 => "Fd0",
            Family::Fe0 => "Fe0",
            Family::Fbd0 => "Fbd0",
            Family::Fbe0 => "Fbe0",
        }
    }

    pub fn is_matrix(self) -> bool {
        self.id() < 8
    }

    /// 4 for matrix families, 2 for vector families.
    pub fn n_entries(self) -> usize {
        if self.is_matrix() {
            4
        } else {
            2
        }
    }

    /// Power of β_j in the series weight (2 for the B families and Fbd0/Fbe0).
    pub fn beta_power(self) -> i32 {
        match self {
            Family::B1 | Family::B2 | Family::B3 | Family::B4 | Family::Fbd0 | Family::Fbe0 => 2,
            _ => 1,
        }
    }

    /// Offset of the family's first entry in a [`KernelSet`].
    pub fn offset(self) -> usize {
        let id = self.id();
        if id < 8 {
            4 * id
        } else {
            32 + 2 * (id - 8)
        }
    }

    /// Flat index of entry (m, l). `m` is ignored for vector families.
    pub fn index(self, m: usize, l: usize) -> usize {
        debug_assert!(m < 2 && l < 2);
        if self.is_matrix() {
            self.offset() + 2 * m + l
        } else {
            self.offset() + l
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single kernel: family plus local indices (trial m, test l).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Entry {
    pub family: Family,
    pub m: usize,
    pub l: usize,
}

impl Entry {
    pub fn index(&self) -> usize {
        self.family.index(self.m, self.l)
    }

    /// All 40 entries in storage order.
    pub fn all() -> Vec<Entry> {
        let mut v = Vec::with_capacity(N_KERNELS);
        for family in Family::ALL {
            if family.is_matrix() {
                for m in 0..2 {
                    for l in 0..2 {
                        v.push(Entry { family, m, l });
                    }
                }
            } else {
                for l in 0..2 {
                    v.push(Entry { family, m: 0, l });
                }
            }
        }
        v
    }
}

/// The 40 kernel values of one (P, S) point, indexed by [`Family::index`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSet(pub [f64; N_KERNELS]);

impl KernelSet {
    pub fn zeros() -> Self {
        KernelSet([0.0; N_KERNELS])
    }

    pub fn get(&self, family: Family, m: usize, l: usize) -> f64 {
        self.0[family.index(m, l)]
    }
}

/// How the per-mode reference integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegralMethod {
    #[default]
    ClosedForm,
    /// 64-point Gauss-Legendre quadrature (slow; for cross-validation).
    Quadrature,
}

/// When a series counts as converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// Stop at the first mode whose term and whose predecessor's term are
    /// both below ε; that mode is not added. Two small terms in a row keep
    /// kernels built on d0 (which vanishes for even j at P = 0) from
    /// stopping at j = 2.
    #[default]
    TwoBelow,
    /// Add modes up to and including the first term below ε.
    FirstBelow,
}

/// Series cut-off rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub epsilon: f64,
    pub j_max: usize,
    pub integrals: IntegralMethod,
    pub rule: StopRule,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            epsilon: 1e-10,
            j_max: 5000,
            integrals: IntegralMethod::ClosedForm,
            rule: StopRule::TwoBelow,
        }
    }
}

impl TruncationPolicy {
    pub fn new(epsilon: f64, j_max: usize) -> Self {
        TruncationPolicy {
            epsilon,
            j_max,
            ..Default::default()
        }
    }

    pub fn with_rule(self, rule: StopRule) -> Self {
        TruncationPolicy { rule, ..self }
    }

    /// Exactly `modes` terms: no early stop.
    pub fn fixed(modes: usize) -> Self {
        TruncationPolicy::new(0.0, modes)
    }
}

/// Result of one truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of terms added.
    pub modes: usize,
    /// True when `j_max` was reached before the stopping rule fired.
    pub overflow: bool,
}

/// All 40 kernels of one (P, S) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllSums {
    pub values: KernelSet,
    pub modes: [u32; N_KERNELS],
    pub overflow: bool,
}

/// Per-mode terms of all 40 kernels.
#[inline]
pub(crate) fn terms(mk: &ModeKernels, b: f64, out: &mut [f64; N_KERNELS]) {
    let b2 = b * b;
    let (d0, e0) = (mk.d0s, mk.e0s);
    for m in 0..2 {
        for l in 0..2 {
            let e = 2 * m + l;
            let t1 = 2.0 * mk.a_s[m] * mk.c_s[l];
            let t2 = 2.0 * SIGNS[m] * d0 * mk.c_s[l];
            let t3 = -2.0 * SIGNS[l] * mk.a_s[m] * e0;
            let t4 = -2.0 * SIGNS[m] * SIGNS[l] * d0 * e0;
            out[e] = b * t1;
            out[4 + e] = b * t2;
            out[8 + e] = b * t3;
            out[12 + e] = b * t4;
            out[16 + e] = b2 * t1;
            out[20 + e] = b2 * t2;
            out[24 + e] = b2 * t3;
            out[28 + e] = b2 * t4;
        }
    }
    for l in 0..2 {
        let f1 = 2.0 * d0 * mk.c_s[l];
        let f2 = -2.0 * SIGNS[l] * d0 * e0;
        out[32 + l] = b * f1;
        out[34 + l] = b * f2;
        out[36 + l] = b2 * f1;
        out[38 + l] = b2 * f2;
    }
}

enum Integrals {
    Closed(ModeKernelsGen),
    Quad(UnitGauss, f64),
}

impl Integrals {
    fn new(p: f64, method: IntegralMethod) -> Self {
        match method {
            IntegralMethod::ClosedForm => Integrals::Closed(ModeKernelsGen::new(p)),
            IntegralMethod::Quadrature => Integrals::Quad(UnitGauss::new(FALLBACK_POINTS), p),
        }
    }

    fn at(&self, j: usize) -> ModeKernels {
        match self {
            Integrals::Closed(g) => g.at(j),
            Integrals::Quad(q, p) => base_integrals_quadrature(j, *p, q),
        }
    }
}

/// Sums all 40 kernels at once, each with its own stopping index.
pub fn sum_all(p: &ElementNondimParams, policy: &TruncationPolicy) -> AllSums {
    let ints = Integrals::new(p.p, policy.integrals);
    let mut values = [0.0; N_KERNELS];
    let mut modes = [0u32; N_KERNELS];
    let mut prev_small = [false; N_KERNELS];
    let mut done = [false; N_KERNELS];
    let mut remaining = N_KERNELS;
    let mut t = [0.0; N_KERNELS];
    let eps = policy.epsilon;
    for j in 1..=policy.j_max {
        terms(&ints.at(j), beta(j, p), &mut t);
        for i in 0..N_KERNELS {
            if done[i] {
                continue;
            }
            let small = t[i].abs() < eps;
            if policy.rule == StopRule::TwoBelow && small && prev_small[i] {
                done[i] = true;
                remaining -= 1;
                continue;
            }
            values[i] += t[i];
            modes[i] = j as u32;
            prev_small[i] = small;
            if policy.rule == StopRule::FirstBelow && small {
                done[i] = true;
                remaining -= 1;
            }
        }
        if remaining == 0 {
            break;
        }
    }
    AllSums {
        values: KernelSet(values),
        modes,
        overflow: remaining > 0,
    }
}

/// One truncated kernel series. Warns when `j_max` is reached.
pub fn sum_series(family: Family, m: usize, l: usize, p: &ElementNondimParams, policy: &TruncationPolicy) -> SeriesSum {
    let idx = family.index(m, l);
    let ints = Integrals::new(p.p, policy.integrals);
    let mut t = [0.0; N_KERNELS];
    let mut value = 0.0;
    let mut modes = 0;
    let mut prev_small = false;
    for j in 1..=policy.j_max {
        terms(&ints.at(j), beta(j, p), &mut t);
        let small = t[idx].abs() < policy.epsilon;
        let converged = SeriesSum {
            value,
            modes,
            overflow: false,
        };
        if policy.rule == StopRule::TwoBelow && small && prev_small {
            return converged;
        }
        value += t[idx];
        modes = j;
        prev_small = small;
        if policy.rule == StopRule::FirstBelow && small {
            return SeriesSum { value, modes, overflow: false };
        }
    }
    if policy.epsilon > 0.0 {
        warn!(
            "{family}({m},{l}) series not converged after {} modes at P={}, S={}",
            policy.j_max, p.p, p.s
        );
    }
    SeriesSum {
        value,
        modes,
        overflow: true,
    }
}

/// Number of terms summed for the A1 diagonal kernel.
pub fn required_modes(p: &ElementNondimParams, policy: &TruncationPolicy) -> usize {
    sum_series(Family::A1, 0, 0, p, policy).modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_kernels::{base_integrals, peclet_strength};

    #[test]
    fn layout_is_bijective() {
        let all = Entry::all();
        assert_eq!(all.len(), N_KERNELS);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(e.index(), i);
        }
        assert_eq!(Family::Fbe0.index(1, 1), 39);
    }

    #[test]
    fn sum_all_matches_single_series() {
        let p = ElementNondimParams::from_ps(3.0, 0.7).unwrap();
        let pol = TruncationPolicy::default();
        let all = sum_all(&p, &pol);
        for e in Entry::all() {
            let s = sum_series(e.family, e.m, e.l, &p, &pol);
            assert_eq!(s.value, all.values.0[e.index()]);
            assert_eq!(s.modes as u32, all.modes[e.index()]);
        }
    }

    #[test]
    fn scale_invariance() {
        let pol = TruncationPolicy::default();
        let base = peclet_strength(300.0, 0.02, 1.0, 1e-2).unwrap();
        let c = 3.7;
        // h → c h, μ → μ, a → a / c, Δt → c² Δt keeps P and S
        let scaled = peclet_strength(300.0 / c, 0.02 * c, 1.0, 1e-2 * c * c).unwrap();
        let (x, y) = (sum_all(&base, &pol), sum_all(&scaled, &pol));
        for i in 0..N_KERNELS {
            let (a, b) = (x.values.0[i], y.values.0[i]);
            assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0), "{i}: {a} vs {b}");
        }
    }

    #[test]
    fn large_strength_against_long_summation() {
        let p = ElementNondimParams::from_ps(2.0, 1e4).unwrap();
        let pol = TruncationPolicy::default();
        for e in Entry::all() {
            let got = sum_series(e.family, e.m, e.l, &p, &pol);
            assert!(!got.overflow);
            // brute force: 10 000 terms, independent term formula
            let mut oracle = 0.0;
            let mut bound = 0.0;
            for j in 1..=10_000 {
                let mk = base_integrals(j, p.p);
                let b = beta(j, &p).powi(e.family.beta_power());
                let (am, cl) = (mk.a_s[e.m], mk.c_s[e.l]);
                let (sm, sl) = (SIGNS[e.m], SIGNS[e.l]);
                let raw = match e.family {
                    Family::A1 | Family::B1 => am * cl,
                    Family::A2 | Family::B2 => sm * mk.d0s * cl,
                    Family::A3 | Family::B3 => -sl * am * mk.e0s,
                    Family::A4 | Family::B4 => -sm * sl * mk.d0s * mk.e0s,
                    Family::Fd0 | Family::Fbd0 => mk.d0s * cl,
                    Family::Fe0 | Family::Fbe0 => -sl * mk.d0s * mk.e0s,
                };
                oracle += 2.0 * b * raw;
                let k = std::f64::consts::PI * j as f64;
                bound += 2.0 * raw.abs() / (p.s * k * k);
            }
            assert!(
                (got.value - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "{e:?}: {} vs {oracle}",
                got.value
            );
            assert!(got.value.abs() <= bound);
        }
    }

    #[test]
    fn stopping_rule() {
        let pol = TruncationPolicy::default();
        let p = ElementNondimParams::from_ps(5.0, 0.3).unwrap();
        for e in Entry::all() {
            let s = sum_series(e.family, e.m, e.l, &p, &pol);
            assert!(!s.overflow);
            let mut t = [0.0; N_KERNELS];
            terms(&base_integrals(s.modes + 1, p.p), beta(s.modes + 1, &p), &mut t);
            assert!(t[e.index()].abs() < pol.epsilon);
        }
        let fixed = sum_series(Family::A1, 0, 1, &p, &TruncationPolicy::fixed(7));
        assert_eq!(fixed.modes, 7);
        assert!(fixed.overflow);
    }

    #[test]
    fn required_modes_trends() {
        let pol = TruncationPolicy::default();
        let n = |pe: f64, s: f64| required_modes(&ElementNondimParams::from_ps(pe, s).unwrap(), &pol);
        assert!(n(0.1, 20.0) <= n(0.1, 1.0) && n(0.1, 1.0) <= n(0.1, 0.02));
        assert!(n(0.1, 20.0) * 10 < n(19.98, 0.02));
        assert!(n(19.98, 0.02) >= n(10.0, 0.02));
        assert!(n(10.0, 0.02) >= n(10.0, 1.0));
        let loose = TruncationPolicy::new(2e-10, 5000);
        for (pe, s) in [(0.3, 0.1), (4.0, 2.0), (12.0, 0.05)] {
            let p = ElementNondimParams::from_ps(pe, s).unwrap();
            assert!(required_modes(&p, &loose) <= required_modes(&p, &pol));
        }
    }

    #[test]
    fn zero_velocity_kills_advective_families() {
        let p = ElementNondimParams::from_ps(0.0, 0.5).unwrap();
        let all = sum_all(&p, &TruncationPolicy::default());
        // d0 = e0 and a_m = c_m at P = 0, so the two mixed families are opposite
        assert!(all.values.get(Family::A1, 0, 0) > 0.0);
        let a2 = all.values.get(Family::A2, 0, 0);
        let a3 = all.values.get(Family::A3, 0, 0);
        assert!((a2 + a3).abs() < 1e-14);
    }
}
