//! Gauss-Legendre rules mapped to the reference interval [0, 1].

use gauss_quad::GaussLegendre;

/// Nodes and weights of an n-point Gauss-Legendre rule on [0, 1].
#[derive(Debug, Clone)]
pub struct UnitGauss {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl UnitGauss {
    /// Panics if `points < 2`.
    pub fn new(points: usize) -> Self {
        let rule = GaussLegendre::new(points).expect("Gauss-Legendre rule needs at least 2 points");
        let (nodes, weights) = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        UnitGauss { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integral of `f` over [0, 1].
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Integral of `f` over [a, b].
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = b - a;
        len * self.integrate(|t| f(a + len * t))
    }
}
