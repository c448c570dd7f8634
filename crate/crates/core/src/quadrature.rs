//! Quadrature on the reference triangle `{(x, y) : x, y >= 0, x + y <= 1}`.

use crate::error::{Error, Result};

/// Highest exactness degree served.
pub const MAX_DEGREE: usize = 30;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` over the reference triangle.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p[0], p[1])).sum()
    }
}

fn from_barycentric(rows: &[([f64; 3], f64)], degree: usize) -> QuadratureRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (b, w) in rows {
        points.push([b[1], b[2]]);
        weights.push(0.5 * w);
    }
    QuadratureRule { points, weights, degree }
}

/// Orbit of `(a, a, 1 - 2a)` under permutation.
fn orbit3(a: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    let b = 1.0 - 2.0 * a;
    out.push(([a, a, b], w));
    out.push(([a, b, a], w));
    out.push(([b, a, a], w));
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = 0.5 * (1.0 - z);
        w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Collapsed Gauss product rule, exact to `2n - 2`.
fn conical(degree: usize) -> QuadratureRule {
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (s, ws) in x.iter().zip(&w) {
        for (v, wv) in x.iter().zip(&w) {
            points.push([*s, (1.0 - s) * v]);
            weights.push(ws * wv * (1.0 - s));
        }
    }
    QuadratureRule { points, weights, degree }
}

/// Rule exact for polynomials of total degree `degree`.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    let third = 1.0 / 3.0;
    let mut rows = Vec::new();
    match degree {
        0 | 1 => {
            rows.push(([third; 3], 1.0));
            Ok(from_barycentric(&rows, 1))
        }
        2 => {
            orbit3(1.0 / 6.0, third, &mut rows);
            Ok(from_barycentric(&rows, 2))
        }
        3 | 4 => {
            orbit3(0.445_948_490_915_965, 0.223_381_589_678_011, &mut rows);
            orbit3(0.091_576_213_509_771, 0.109_951_743_655_322, &mut rows);
            Ok(from_barycentric(&rows, 4))
        }
        5 => {
            rows.push(([third; 3], 0.225));
            orbit3(0.470_142_064_105_115, 0.132_394_152_788_506, &mut rows);
            orbit3(0.101_286_507_323_456, 0.125_939_180_544_827, &mut rows);
            Ok(from_barycentric(&rows, 5))
        }
        d if d <= MAX_DEGREE => Ok(conical(d)),
        d => Err(Error::QuadratureDegree(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    #[test]
    fn midpoint_rule() {
        let q = quadrature(1).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.weights[0] - 0.5).abs() < 1e-16);
    }

    #[test]
    fn monomials_are_integrated_exactly() {
        for degree in 1..=12 {
            let q = quadrature(degree).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                    let got = q.integrate(|x, y| x.powi(a as i32) * y.powi(b as i32));
                    // the tabulated rules carry 15 digits
                    let tol = if degree <= 5 { 1e-14 } else { 1e-15 };
                    assert!((got - exact).abs() < tol, "deg {degree} a {a} b {b}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn degree_beyond_table_is_rejected() {
        assert!(matches!(quadrature(MAX_DEGREE + 1), Err(Error::QuadratureDegree(_))));
    }
}
