use super::modes::{mode_value_centered, weight_centered};
use super::params::ElementNondimParams;
use crate::quadrature::UnitGauss;

/// Evaluates ũ(x̂) = Σ_j c_j z_j(x̂) for centred modes at reference points `xs`.
pub fn reconstruct_subgrid(amplitudes: &[f64], p: &ElementNondimParams, xs: &[f64]) -> Vec<f64> {
    let r = 1.0 / p.h.sqrt();
    xs.iter()
        .map(|&x| {
            amplitudes
                .iter()
                .enumerate()
                .map(|(i, c)| c * mode_value_centered(i + 1, p, x))
                .sum::<f64>()
                * r
        })
        .collect()
}

/// Weighted projection c_j = (g, p z_j) of a function given on the reference
/// element onto the first `modes` centred modes.
pub fn project_onto_modes(
    g: impl Fn(f64) -> f64,
    p: &ElementNondimParams,
    modes: usize,
    q: &UnitGauss,
) -> Vec<f64> {
    let samples: Vec<(f64, f64)> = q.iter().map(|(x, w)| (x, w * g(x) * weight_centered(p, x))).collect();
    let r = p.h.sqrt();
    (1..=modes)
        .map(|j| r * samples.iter().map(|&(x, gw)| gw * mode_value_centered(j, p, x)).sum::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_kernels::{peclet_strength, weight_centered};
    use std::f64::consts::PI;

    #[test]
    fn zero_and_single_mode() {
        let p = peclet_strength(0.0, 0.04, 1.0, 1e-3).unwrap();
        let xs = [0.0, 0.25, 0.5, 1.0];
        assert!(reconstruct_subgrid(&[0.0; 5], &p, &xs).iter().all(|v| *v == 0.0));
        let u = reconstruct_subgrid(&[1.0, 0.0], &p, &xs);
        for (x, v) in xs.iter().zip(&u) {
            assert!((v - (2.0 / 0.04_f64).sqrt() * (PI * x).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_round_trip() {
        // smooth bubble vanishing at both ends
        let bubble = |x: f64| x * (1.0 - x) * (1.0 + 3.0 * x * x);
        let q = UnitGauss::new(400);
        for a in [0.0, 40.0, -150.0] {
            let p = peclet_strength(a, 0.05, 0.5, 1e-3).unwrap();
            let c = project_onto_modes(bubble, &p, 150, &q);
            let rec = reconstruct_subgrid(&c, &p, q.nodes());
            // weighted L² error and the Parseval tail ‖g‖²_p − Σ c_j²
            let h = p.h;
            let (mut err2, mut norm2) = (0.0, 0.0);
            for ((x, w), r) in q.iter().zip(&rec) {
                let wt = w * h * weight_centered(&p, x);
                err2 += wt * (bubble(x) - r).powi(2);
                norm2 += wt * bubble(x).powi(2);
            }
            let tail2 = norm2 - c.iter().map(|v| v * v).sum::<f64>();
            assert!(err2.sqrt() <= 1e-4 * norm2.sqrt(), "a={a}");
            assert!((err2 - tail2).abs() <= 1e-10 * norm2, "a={a}: {err2} vs {tail2}");
        }
    }
}
