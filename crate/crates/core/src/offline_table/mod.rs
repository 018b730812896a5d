//! Offline kernel tables on a uniform (P, S) grid and their bilinear lookup.
//!
//! Nodes are P_i = Δ·i, S_j = Δ·j for i, j = 1..M. Each of the 40 kernel
//! entries is stored as an M×M array (P-major, then S). Lookups use the
//! area-weighted bilinear formula on the enclosing cell; outside the grid the
//! cell index is clamped to 1 or M−1, which extrapolates linearly, and the
//! result is flagged.

mod io;

pub use io::{load_table, save_table, FORMAT_VERSION, MAGIC};

use std::sync::atomic::{AtomicUsize, Ordering};

use log::info;
use rayon::prelude::*;

use crate::spectral_kernels::{sum_all, ElementNondimParams, Family, KernelSet, TruncationPolicy, N_KERNELS};
use crate::vms_feasible::{KernelLookup, KernelProvider};
use crate::{Result, SvmsError};

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("corrupt table file: {0}")]
    Corrupt(String),
    #[error("unsupported table format version {found} (this build reads {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("invalid table grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform grid P_i = Δ·i, S_j = Δ·j, i, j = 1..M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableGrid {
    pub delta: f64,
    pub m: usize,
}

impl Default for TableGrid {
    fn default() -> Self {
        TableGrid { delta: 0.02, m: 1000 }
    }
}

impl TableGrid {
    pub fn new(delta: f64, m: usize) -> std::result::Result<Self, TableError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(TableError::InvalidGrid(format!("step must be positive, got {delta}")));
        }
        if m < 2 || m > u32::MAX as usize {
            return Err(TableError::InvalidGrid(format!("need at least 2 points per axis, got {m}")));
        }
        Ok(TableGrid { delta, m })
    }

    /// Coordinate of 1-based node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.delta * i as f64
    }

    pub fn max_coord(&self) -> f64 {
        self.node(self.m)
    }

    pub fn n_cells(&self) -> usize {
        self.m * self.m
    }

    pub fn contains(&self, p: f64, s: f64) -> bool {
        let (lo, hi) = (self.delta, self.max_coord());
        (lo..=hi).contains(&p) && (lo..=hi).contains(&s)
    }

    /// Lower cell corner (1-based, clamped to 1..M−1) and local coordinate.
    fn cell(&self, x: f64) -> (usize, f64) {
        let i = ((x / self.delta).floor() as i64).clamp(1, self.m as i64 - 1) as usize;
        (i, (x - self.node(i)) / self.delta)
    }
}

/// How corner values are combined by [`KernelTable::lookup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Bilinear in the stored kernel values.
    #[default]
    Plain,
    /// Bilinear in K/β₁ᵏ (k the family's β power), rescaled by β₁ᵏ at the
    /// query point. Follows the 1/(1 + S λ₁) decay in S, which keeps
    /// extrapolation beyond the grid mild.
    Beta1Scaled,
}

/// Result of one table lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    pub value: f64,
    /// Set when the query was outside the grid and the cell index was clamped.
    pub clamped: bool,
}

/// Dimensionless kernels on a [`TableGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub grid: TableGrid,
    pub epsilon: f64,
    pub j_max: usize,
    /// `N_KERNELS` blocks of M×M values, P-major then S.
    data: Vec<f64>,
    /// Flat cell indices (i·M + j, 0-based) whose series hit `j_max`.
    /// Not persisted.
    overflow_cells: Vec<usize>,
}

fn bilinear(c: [f64; 4], t: f64, u: f64) -> f64 {
    // corners (i,j), (i+1,j), (i,j+1), (i+1,j+1); each weighted by the area of
    // the sub-rectangle opposite to it
    (1.0 - t) * (1.0 - u) * c[0] + t * (1.0 - u) * c[1] + (1.0 - t) * u * c[2] + t * u * c[3]
}

fn beta1(p: f64, s: f64) -> f64 {
    1.0 / (1.0 + s * (p * p + std::f64::consts::PI * std::f64::consts::PI))
}

impl KernelTable {
    /// Builds a table from raw data laid out as described on [`KernelTable`].
    pub fn from_parts(grid: TableGrid, epsilon: f64, j_max: usize, data: Vec<f64>) -> std::result::Result<Self, TableError> {
        let want = N_KERNELS * grid.n_cells();
        if data.len() != want {
            return Err(TableError::Corrupt(format!("expected {want} values, found {}", data.len())));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(TableError::Corrupt(format!("non-finite value at index {i}")));
        }
        Ok(KernelTable {
            grid,
            epsilon,
            j_max,
            data,
            overflow_cells: Vec::new(),
        })
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn overflow_cells(&self) -> &[usize] {
        &self.overflow_cells
    }

    fn block(&self, entry: usize) -> &[f64] {
        let n = self.grid.n_cells();
        &self.data[entry * n..(entry + 1) * n]
    }

    /// Stored value at 1-based node (i, j).
    pub fn node_value(&self, family: Family, m: usize, l: usize, i: usize, j: usize) -> f64 {
        self.block(family.index(m, l))[(i - 1) * self.grid.m + (j - 1)]
    }

    /// Plain bilinear interpolation of one kernel entry.
    pub fn interpolate(&self, family: Family, m: usize, l: usize, p: f64, s: f64) -> Interpolated {
        self.lookup_entry(family.index(m, l), family.beta_power(), p, s, Interpolation::Plain)
    }

    fn lookup_entry(&self, entry: usize, power: i32, p: f64, s: f64, mode: Interpolation) -> Interpolated {
        let g = &self.grid;
        let (i, t) = g.cell(p);
        let (j, u) = g.cell(s);
        let b = self.block(entry);
        let at = |i: usize, j: usize| b[(i - 1) * g.m + (j - 1)];
        let mut c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
        let value = match mode {
            Interpolation::Plain => bilinear(c, t, u),
            Interpolation::Beta1Scaled => {
                let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
                for (v, (ci, cj)) in c.iter_mut().zip(corners) {
                    *v /= beta1(g.node(ci), g.node(cj)).powi(power);
                }
                bilinear(c, t, u) * beta1(p, s).powi(power)
            }
        };
        Interpolated {
            value,
            clamped: !g.contains(p, s),
        }
    }

    /// All 40 kernels at (P, S).
    pub fn lookup(&self, p: f64, s: f64, mode: Interpolation) -> (KernelSet, bool) {
        let mut out = KernelSet::zeros();
        let mut clamped = false;
        for fam in Family::ALL {
            for e in 0..fam.n_entries() {
                let idx = fam.offset() + e;
                let r = self.lookup_entry(idx, fam.beta_power(), p, s, mode);
                out.0[idx] = r.value;
                clamped |= r.clamped;
            }
        }
        (out, clamped)
    }
}

/// Rows of P generated per parallel batch (bounds the scratch memory).
const ROWS_PER_BATCH: usize = 32;

/// Sums every kernel at every grid node. Deterministic and independent of
/// the number of worker threads.
pub fn generate_table(grid: TableGrid, policy: &TruncationPolicy) -> Result<KernelTable> {
    let m = grid.m;
    let n = grid.n_cells();
    let mut data = vec![0.0; N_KERNELS * n];
    let mut overflow_cells = Vec::new();
    for batch in (1..=m).step_by(ROWS_PER_BATCH) {
        let rows: Vec<usize> = (batch..(batch + ROWS_PER_BATCH).min(m + 1)).collect();
        let sums: Vec<Vec<(KernelSet, bool)>> = rows
            .par_iter()
            .map(|&i| {
                (1..=m)
                    .map(|j| {
                        let prm = ElementNondimParams::from_ps(grid.node(i), grid.node(j))?;
                        let s = sum_all(&prm, policy);
                        Ok((s.values, s.overflow))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for (&i, row) in rows.iter().zip(&sums) {
            for (j, (vals, of)) in row.iter().enumerate() {
                let cell = (i - 1) * m + j;
                for (e, v) in vals.0.iter().enumerate() {
                    data[e * n + cell] = *v;
                }
                if *of {
                    overflow_cells.push(cell);
                }
            }
        }
        info!("kernel table: {} of {m} P rows done", rows.last().copied().unwrap_or(m));
    }
    if !overflow_cells.is_empty() {
        log::warn!("{} table cells reached j_max = {}", overflow_cells.len(), policy.j_max);
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite()) {
        return Err(SvmsError::Domain(format!("non-finite kernel value at table index {i}")));
    }
    Ok(KernelTable {
        grid,
        epsilon: policy.epsilon,
        j_max: policy.j_max,
        data,
        overflow_cells,
    })
}

/// Kernel provider backed by a table; counts clamped lookups.
#[derive(Debug)]
pub struct TableProvider<'a> {
    table: &'a KernelTable,
    mode: Interpolation,
    clamped: AtomicUsize,
}

impl<'a> TableProvider<'a> {
    pub fn new(table: &'a KernelTable, mode: Interpolation) -> Self {
        TableProvider {
            table,
            mode,
            clamped: AtomicUsize::new(0),
        }
    }

    pub fn clamped_lookups(&self) -> usize {
        self.clamped.load(Ordering::Relaxed)
    }
}

impl KernelProvider for TableProvider<'_> {
    fn kernels(&self, p: f64, s: f64) -> Result<KernelLookup> {
        if !(p.is_finite() && s.is_finite()) {
            return Err(SvmsError::invalid(format!("non-finite table query ({p}, {s})")));
        }
        let (values, clamped) = self.table.lookup(p, s, self.mode);
        if clamped {
            self.clamped.fetch_add(1, Ordering::Relaxed);
        }
        Ok(KernelLookup {
            values,
            out_of_range: clamped,
        })
    }

    fn name(&self) -> &'static str {
        "table"
    }
}
