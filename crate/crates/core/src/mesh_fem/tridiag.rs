use super::NodalField;
use crate::{Result, SvmsError};

/// Relative pivot threshold of the elimination.
const PIVOT_TOL: f64 = 1e-14;

/// Square tridiagonal matrix. `sub[i]` is entry (i+1, i), `sup[i]` is (i, i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiag {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "tridiagonal matrix needs at least one row");
        Tridiag {
            sub: vec![0.0; n - 1],
            diag: vec![0.0; n],
            sup: vec![0.0; n - 1],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Tridiag::zeros(n);
        t.diag.iter_mut().for_each(|d| *d = 1.0);
        t
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Entry (i, j); zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.sup[i]
        } else if i == j + 1 {
            self.sub[j]
        } else {
            0.0
        }
    }

    /// Adds `v` to entry (i, j). Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if i == j {
            self.diag[i] += v;
        } else if j == i + 1 {
            self.sup[i] += v;
        } else if i == j + 1 {
            self.sub[j] += v;
        } else {
            panic!("entry ({i}, {j}) is outside the tridiagonal band");
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &Tridiag) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.diag.iter_mut().zip(&other.diag) {
            *a += c * b;
        }
        for (a, b) in self.sub.iter_mut().zip(&other.sub) {
            *a += c * b;
        }
        for (a, b) in self.sup.iter_mut().zip(&other.sup) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: f64) -> Tridiag {
        Tridiag {
            sub: self.sub.iter().map(|v| c * v).collect(),
            diag: self.diag.iter().map(|v| c * v).collect(),
            sup: self.sup.iter().map(|v| c * v).collect(),
        }
    }

    pub fn transpose(&self) -> Tridiag {
        Tridiag {
            sub: self.sup.clone(),
            diag: self.diag.clone(),
            sup: self.sub.clone(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `y += c * A x`.
    pub fn matvec_acc(&self, c: f64, x: &[f64], y: &mut [f64]) {
        for (yi, v) in y.iter_mut().zip(self.matvec(x)) {
            *yi += c * v;
        }
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity (max row-sum) norm.
    pub fn inf_norm(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.sub[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.sup[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += self.sub[i - 1].abs();
            }
            if i + 1 < n {
                off += self.sup[i].abs();
            }
            self.diag[i].abs() > off
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Tridiagonal matrix together with its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagSystem {
    pub matrix: Tridiag,
    pub rhs: Vec<f64>,
}

impl TriDiagSystem {
    pub fn new(matrix: Tridiag, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != matrix.len() {
            return Err(SvmsError::Mismatch {
                expected: matrix.len(),
                got: rhs.len(),
            });
        }
        Ok(TriDiagSystem { matrix, rhs })
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// max |A x - b|.
    pub fn residual_max(&self, x: &[f64]) -> f64 {
        self.matrix
            .matvec(x)
            .iter()
            .zip(&self.rhs)
            .fold(0.0, |m, (ax, b)| m.max((ax - b).abs()))
    }
}

/// Thomas elimination without pivoting.
///
/// Fails with [`SvmsError::SingularSystem`] when a pivot falls below
/// `1e-14` times the largest matrix entry.
pub fn solve_tridiag(sys: &TriDiagSystem) -> Result<NodalField> {
    let a = &sys.matrix;
    let n = a.len();
    if sys.rhs.len() != n {
        return Err(SvmsError::Mismatch {
            expected: n,
            got: sys.rhs.len(),
        });
    }
    let scale = a.max_norm();
    let tol = PIVOT_TOL * scale;
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut pivot = a.diag[0];
    if !(pivot.abs() > tol) {
        return Err(SvmsError::SingularSystem { row: 0, pivot, scale });
    }
    if n > 1 {
        c[0] = a.sup[0] / pivot;
    }
    d[0] = sys.rhs[0] / pivot;
    for i in 1..n {
        pivot = a.diag[i] - a.sub[i - 1] * c[i - 1];
        if !(pivot.abs() > tol) {
            return Err(SvmsError::SingularSystem { row: i, pivot, scale });
        }
        if i + 1 < n {
            c[i] = a.sup[i] / pivot;
        }
        d[i] = (sys.rhs[i] - a.sub[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(NodalField::new(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dominant(n: usize, rng: &mut impl Rng) -> Tridiag {
        let mut t = Tridiag::zeros(n);
        for v in t.sub.iter_mut().chain(t.sup.iter_mut()) {
            *v = rng.random_range(-1.0..1.0);
        }
        for i in 0..n {
            let off = if i > 0 { t.sub[i - 1].abs() } else { 0.0 } + if i + 1 < n { t.sup[i].abs() } else { 0.0 };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            t.diag[i] = sign * (off + rng.random_range(0.1..2.0));
        }
        t
    }

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![1.0, -2.0, 3.5, 0.25];
        let sys = TriDiagSystem::new(Tridiag::identity(4), rhs.clone()).unwrap();
        assert_eq!(solve_tridiag(&sys).unwrap().into_inner(), rhs);
    }

    #[test]
    fn two_by_two_hand_solve() {
        let mut t = Tridiag::zeros(2);
        t.diag = vec![2.0, 2.0];
        t.sub = vec![-1.0];
        t.sup = vec![-1.0];
        let sys = TriDiagSystem::new(t, vec![1.0, 1.0]).unwrap();
        let x = solve_tridiag(&sys).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_lu_on_random_dominant_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100;
        for _ in 0..5 {
            let t = random_dominant(n, &mut rng);
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let dense = DMatrix::from_fn(n, n, |i, j| t.get(i, j));
            let oracle = dense.lu().solve(&DVector::from_vec(rhs.clone())).unwrap();
            let sys = TriDiagSystem::new(t, rhs).unwrap();
            let x = solve_tridiag(&sys).unwrap();
            for i in 0..n {
                assert!((x[i] - oracle[i]).abs() <= 1e-10, "row {i}");
            }
            let bound = 1e-12
                * (sys.matrix.max_norm() * x.max_abs() + sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            assert!(sys.residual_max(&x) <= bound);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let mut t = Tridiag::zeros(3);
        t.diag = vec![1.0, 1.0, 1.0];
        t.sub = vec![1.0, 0.0];
        t.sup = vec![1.0, 0.0];
        let sys = TriDiagSystem::new(t, vec![1.0; 3]).unwrap();
        match solve_tridiag(&sys) {
            Err(SvmsError::SingularSystem { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn band_accessors() {
        let mut t = Tridiag::zeros(3);
        t.add(0, 1, 2.0);
        t.add(2, 1, -3.0);
        assert_eq!(t.get(0, 1), 2.0);
        assert_eq!(t.get(2, 1), -3.0);
        assert_eq!(t.get(0, 2), 0.0);
        assert_eq!(t.transpose().get(1, 0), 2.0);
    }
}
