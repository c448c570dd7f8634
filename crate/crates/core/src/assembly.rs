//! Element-parallel assembly with a deterministic, element-ordered scatter.

use rayon::prelude::*;

use crate::error::Result;
use crate::sparse::{CsrMatrix, Triplets};

/// Dense element matrix with its global row and column indices.
#[derive(Clone, Debug, Default)]
pub struct LocalMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Row-major, `rows.len() x cols.len()`.
    pub data: Vec<f64>,
}

impl LocalMatrix {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        let n = rows.len() * cols.len();
        Self { rows, cols, data: vec![0.0; n] }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let nc = self.cols.len();
        self.data[i * nc + j] += v;
    }
}

#[derive(Clone, Debug, Default)]
pub struct LocalVector {
    pub rows: Vec<usize>,
    pub data: Vec<f64>,
}

/// Velocity dof of scalar node `node` and component `comp`.
#[inline]
pub fn vdof(node: usize, comp: usize) -> usize {
    3 * node + comp
}

/// Expands scalar node indices to interleaved vector dofs.
pub fn vector_dofs(nodes: &[usize]) -> Vec<usize> {
    nodes.iter().flat_map(|&n| (0..3).map(move |c| vdof(n, c))).collect()
}

pub fn assemble_matrix<F>(n_elem: usize, nrows: usize, ncols: usize, local: F) -> Result<CsrMatrix>
where
    F: Fn(usize) -> Result<LocalMatrix> + Sync,
{
    let locals: Vec<LocalMatrix> = (0..n_elem).into_par_iter().map(&local).collect::<Result<_>>()?;
    let mut trips = Triplets::new(nrows, ncols);
    for lm in &locals {
        let nc = lm.cols.len();
        for (a, &i) in lm.rows.iter().enumerate() {
            for (b, &j) in lm.cols.iter().enumerate() {
                let v = lm.data[a * nc + b];
                if v != 0.0 {
                    trips.push(i, j, v);
                }
            }
        }
    }
    Ok(trips.to_csr())
}

pub fn assemble_vector<F>(n_elem: usize, n: usize, local: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<LocalVector> + Sync,
{
    let locals: Vec<LocalVector> = (0..n_elem).into_par_iter().map(&local).collect::<Result<_>>()?;
    let mut out = vec![0.0; n];
    for lv in &locals {
        for (i, v) in lv.rows.iter().zip(&lv.data) {
            out[*i] += v;
        }
    }
    Ok(out)
}

/// Element-wise sums of scalars, added in element order.
pub fn assemble_scalar<F>(n_elem: usize, local: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let parts: Vec<f64> = (0..n_elem).into_par_iter().map(&local).collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Several element-wise sums at once.
pub fn assemble_scalars<F, const N: usize>(n_elem: usize, local: F) -> Result<[f64; N]>
where
    F: Fn(usize) -> Result<[f64; N]> + Sync,
{
    let parts: Vec<[f64; N]> = (0..n_elem).into_par_iter().map(&local).collect::<Result<_>>()?;
    let mut out = [0.0; N];
    for p in &parts {
        for k in 0..N {
            out[k] += p[k];
        }
    }
    Ok(out)
}
