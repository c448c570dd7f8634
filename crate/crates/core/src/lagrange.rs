//! Equispaced Lagrange bases on the reference triangle.
//!
//! Local node order: the three vertices `(0,0), (1,0), (0,1)`, then the edge
//! nodes of edges `v0->v1`, `v1->v2`, `v2->v0` walking from the first vertex,
//! then interior nodes row by row.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    pub order: usize,
    pub nodes: Vec<[f64; 2]>,
    exponents: Vec<(i32, i32)>,
    /// `coeffs[(m, j)]`: coefficient of monomial `m` in basis function `j`.
    coeffs: DMatrix<f64>,
}

pub fn n_local(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

pub fn reference_nodes(order: usize) -> Vec<[f64; 2]> {
    let k = order as f64;
    let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let mut nodes = verts.to_vec();
    for e in 0..3 {
        let a = verts[e];
        let b = verts[(e + 1) % 3];
        for i in 1..order {
            let s = i as f64 / k;
            nodes.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    for j in 1..order {
        for i in 1..order {
            if i + j < order {
                nodes.push([i as f64 / k, j as f64 / k]);
            }
        }
    }
    nodes
}

impl LagrangeBasis {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidSpace(format!("Lagrange order {order} not in 1..={MAX_ORDER}")));
        }
        let nodes = reference_nodes(order);
        let mut exponents = Vec::new();
        for total in 0..=order as i32 {
            for b in 0..=total {
                exponents.push((total - b, b));
            }
        }
        let n = nodes.len();
        let vander = DMatrix::from_fn(n, n, |i, m| {
            let (a, b) = exponents[m];
            nodes[i][0].powi(a) * nodes[i][1].powi(b)
        });
        let coeffs = vander
            .try_inverse()
            .ok_or_else(|| Error::InvalidSpace("singular Vandermonde matrix".into()))?;
        Ok(Self { order, nodes, exponents, coeffs })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn pow(x: f64, a: i32) -> f64 {
        if a <= 0 {
            1.0
        } else {
            x.powi(a)
        }
    }

    pub fn values(&self, p: [f64; 2]) -> Vec<f64> {
        let n = self.len();
        let mono: Vec<f64> = self
            .exponents
            .iter()
            .map(|&(a, b)| Self::pow(p[0], a) * Self::pow(p[1], b))
            .collect();
        (0..n).map(|j| (0..n).map(|m| self.coeffs[(m, j)] * mono[m]).sum()).collect()
    }

    pub fn gradients(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let n = self.len();
        let (x, y) = (p[0], p[1]);
        let dmono: Vec<[f64; 2]> = self
            .exponents
            .iter()
            .map(|&(a, b)| {
                let ax = a as f64 * Self::pow(x, a - 1) * Self::pow(y, b);
                let by = b as f64 * Self::pow(x, a) * Self::pow(y, b - 1);
                [if a > 0 { ax } else { 0.0 }, if b > 0 { by } else { 0.0 }]
            })
            .collect();
        (0..n)
            .map(|j| {
                let mut g = [0.0; 2];
                for m in 0..n {
                    g[0] += self.coeffs[(m, j)] * dmono[m][0];
                    g[1] += self.coeffs[(m, j)] * dmono[m][1];
                }
                g
            })
            .collect()
    }

    /// Second derivatives `[xx, xy, yy]`.
    pub fn hessians(&self, p: [f64; 2]) -> Vec<[f64; 3]> {
        let n = self.len();
        let (x, y) = (p[0], p[1]);
        let d2: Vec<[f64; 3]> = self
            .exponents
            .iter()
            .map(|&(a, b)| {
                let (af, bf) = (a as f64, b as f64);
                let xx = if a > 1 { af * (af - 1.0) * Self::pow(x, a - 2) * Self::pow(y, b) } else { 0.0 };
                let xy = if a > 0 && b > 0 { af * bf * Self::pow(x, a - 1) * Self::pow(y, b - 1) } else { 0.0 };
                let yy = if b > 1 { bf * (bf - 1.0) * Self::pow(x, a) * Self::pow(y, b - 2) } else { 0.0 };
                [xx, xy, yy]
            })
            .collect();
        (0..n)
            .map(|j| {
                let mut h = [0.0; 3];
                for m in 0..n {
                    for c in 0..3 {
                        h[c] += self.coeffs[(m, j)] * d2[m][c];
                    }
                }
                h
            })
            .collect()
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> Tabulation {
        Tabulation {
            values: points.iter().map(|p| self.values(*p)).collect(),
            grads: points.iter().map(|p| self.gradients(*p)).collect(),
            hessians: points.iter().map(|p| self.hessians(*p)).collect(),
        }
    }
}

/// Basis data at a fixed set of reference points, indexed `[point][function]`.
#[derive(Clone, Debug)]
pub struct Tabulation {
    pub values: Vec<Vec<f64>>,
    pub grads: Vec<Vec<[f64; 2]>>,
    pub hessians: Vec<Vec<[f64; 3]>>,
}
