use std::ops::{Deref, DerefMut};

use crate::{Result, SvmsError};

/// Partition of (x_min, x_max) into `nodes.len() - 1` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    /// Nodes must be finite, strictly increasing and define at least two elements.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(SvmsError::invalid(format!(
                "a mesh needs at least 2 elements, got {} nodes",
                nodes.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(SvmsError::invalid("mesh nodes must be finite"));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[1] <= w[0]) {
            return Err(SvmsError::invalid(format!(
                "mesh nodes must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(Mesh1D { nodes })
    }

    /// Equispaced mesh with `n_elems` elements.
    pub fn uniform(x_min: f64, x_max: f64, n_elems: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(SvmsError::invalid(format!(
                "need finite x_min < x_max, got ({x_min}, {x_max})"
            )));
        }
        if n_elems < 2 {
            return Err(SvmsError::invalid(format!(
                "need at least 2 elements, got {n_elems}"
            )));
        }
        let len = x_max - x_min;
        let nodes = (0..=n_elems)
            .map(|i| {
                if i == n_elems {
                    x_max
                } else {
                    x_min + len * (i as f64) / (n_elems as f64)
                }
            })
            .collect();
        Mesh1D::new(nodes)
    }

    /// Uniform mesh on (x_min, x_max) whose step is as close as possible to `h`.
    pub fn with_step(x_min: f64, x_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(SvmsError::invalid(format!("element size must be positive, got {h}")));
        }
        let n = ((x_max - x_min) / h).round();
        if !(n >= 2.0) || !n.is_finite() {
            return Err(SvmsError::invalid(format!(
                "step {h} gives fewer than 2 elements on ({x_min}, {x_max})"
            )));
        }
        Mesh1D::uniform(x_min, x_max, n as usize)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn x_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn x_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Length of element `k`.
    pub fn h(&self, k: usize) -> f64 {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn element(&self, k: usize) -> (f64, f64) {
        (self.nodes[k], self.nodes[k + 1])
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        0.5 * (self.nodes[k] + self.nodes[k + 1])
    }

    pub fn element_lengths(&self) -> Vec<f64> {
        (0..self.n_elements()).map(|k| self.h(k)).collect()
    }

    pub fn max_h(&self) -> f64 {
        (0..self.n_elements()).map(|k| self.h(k)).fold(0.0, f64::max)
    }

    /// Splits every element into `factor` equal pieces. Node `i` of `self`
    /// becomes node `i * factor` of the result.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(SvmsError::invalid("refinement factor must be positive"));
        }
        let mut nodes = Vec::with_capacity(self.n_elements() * factor + 1);
        for k in 0..self.n_elements() {
            let (a, b) = self.element(k);
            for s in 0..factor {
                nodes.push(a + (b - a) * (s as f64) / (factor as f64));
            }
        }
        nodes.push(self.x_max());
        Mesh1D::new(nodes)
    }

    /// Index of the element containing `x` (clamped to the mesh).
    pub fn locate(&self, x: f64) -> usize {
        match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.n_elements() - 1),
            Err(i) => i.saturating_sub(1).min(self.n_elements() - 1),
        }
    }
}

/// Nodal coefficients of a P1 function on a [`Mesh1D`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodalField(Vec<f64>);

impl NodalField {
    pub fn new(values: Vec<f64>) -> Self {
        NodalField(values)
    }

    pub fn zeros(n: usize) -> Self {
        NodalField(vec![0.0; n])
    }

    /// Lagrange interpolant of `f` at the mesh nodes.
    pub fn interpolate(mesh: &Mesh1D, f: impl Fn(f64) -> f64) -> Self {
        NodalField(mesh.nodes().iter().map(|&x| f(x)).collect())
    }

    pub fn check_len(&self, mesh: &Mesh1D) -> Result<()> {
        if self.0.len() != mesh.n_nodes() {
            return Err(SvmsError::Mismatch {
                expected: mesh.n_nodes(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Value of the P1 interpolant at `x`.
    pub fn eval(&self, mesh: &Mesh1D, x: f64) -> f64 {
        let k = mesh.locate(x);
        let (a, b) = mesh.element(k);
        let t = (x - a) / (b - a);
        (1.0 - t) * self.0[k] + t * self.0[k + 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for NodalField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for NodalField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for NodalField {
    fn from(v: Vec<f64>) -> Self {
        NodalField(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_two_elements() {
        let m = Mesh1D::uniform(0.0, 1.0, 2).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn uniform_steps_from_test_setups() {
        let m = Mesh1D::uniform(0.0, 1.0, 50).unwrap();
        assert_eq!(m.n_nodes(), 51);
        assert!((m.h(7) - 0.02).abs() < 1e-15);
        let m = Mesh1D::uniform(0.0, 1.0, 100).unwrap();
        assert_eq!(m.n_nodes(), 101);
        assert!((m.max_h() - 0.01).abs() < 1e-15);
        let m = Mesh1D::with_step(0.0, 1.0, 0.02).unwrap();
        assert_eq!(m.n_elements(), 50);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(Mesh1D::uniform(1.0, 0.0, 4).is_err());
        assert!(Mesh1D::uniform(0.0, 1.0, 1).is_err());
        assert!(Mesh1D::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn refinement_nests_nodes() {
        let m = Mesh1D::new(vec![0.0, 0.3, 1.0]).unwrap();
        let f = m.refine(4).unwrap();
        assert_eq!(f.n_elements(), 8);
        assert_eq!(f.nodes()[4], 0.3);
        assert!((f.h(5) - 0.175).abs() < 1e-15);
    }

    #[test]
    fn locate_and_eval() {
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.3), 1);
        assert_eq!(m.locate(1.0), 3);
        let u = NodalField::interpolate(&m, |x| 2.0 * x + 1.0);
        assert!((u.eval(&m, 0.37) - 1.74).abs() < 1e-14);
    }
}
