//! Taylor–Hood spaces on the evolving mesh.
//!
//! Dofs are attached to the Lagrange nodes of the mesh topology, so a
//! coefficient vector denotes the time-lifted function on every snapshot.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_matrix, assemble_scalar, assemble_vector, LocalMatrix, LocalVector};
use crate::error::{Error, Result};
use crate::geometry::{Mat3, Vec3};
use crate::lagrange::{LagrangeBasis, Tabulation};
use crate::mesh::{DofLayout, EvolvingSurfaceMesh, GeoPoint, Topology};
use crate::quadrature::QuadratureRule;
use crate::sparse::{dot, CsrMatrix, LuSolver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Velocity,
    Pressure,
    Multiplier,
}

/// Scalar Lagrange space of one degree.
#[derive(Clone, Debug)]
pub struct ScalarSpace {
    pub order: usize,
    pub layout: Arc<DofLayout>,
    pub basis: Arc<LagrangeBasis>,
}

impl ScalarSpace {
    pub fn new(topo: &Topology, order: usize) -> Result<Self> {
        Ok(Self {
            order,
            layout: Arc::new(DofLayout::new(topo, order)),
            basis: Arc::new(LagrangeBasis::new(order)?),
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.layout.n_dofs
    }

    pub fn element(&self, e: usize) -> &[usize] {
        self.layout.element(e)
    }
}

#[derive(Clone, Debug)]
pub struct TaylorHoodSpace {
    pub k_u: usize,
    pub k_pr: usize,
    pub k_lambda: usize,
    pub k_g: usize,
    /// Scalar layout shared by the three velocity components.
    pub velocity: ScalarSpace,
    pub pressure: ScalarSpace,
    pub multiplier: ScalarSpace,
}

impl TaylorHoodSpace {
    pub fn new(topo: &Topology, k_u: usize, k_pr: usize, k_lambda: usize, k_g: usize) -> Result<Self> {
        if k_u < 2 {
            return Err(Error::InvalidSpace(format!("k_u = {k_u}, need k_u >= 2")));
        }
        if k_pr + 1 != k_u {
            return Err(Error::InvalidSpace(format!("k_pr = {k_pr}, need k_pr = k_u - 1 = {}", k_u - 1)));
        }
        if k_lambda != k_u && k_lambda + 1 != k_u {
            return Err(Error::InvalidSpace(format!("k_lambda = {k_lambda}, need k_u or k_u - 1")));
        }
        if !(1..=3).contains(&k_g) {
            return Err(Error::UnsupportedGeometryOrder(k_g));
        }
        Ok(Self {
            k_u,
            k_pr,
            k_lambda,
            k_g,
            velocity: ScalarSpace::new(topo, k_u)?,
            pressure: ScalarSpace::new(topo, k_pr)?,
            multiplier: ScalarSpace::new(topo, k_lambda)?,
        })
    }

    pub fn for_mesh(mesh: &EvolvingSurfaceMesh, k_u: usize, k_lambda: usize) -> Result<Self> {
        Self::new(&mesh.topology, k_u, k_u.saturating_sub(1), k_lambda, mesh.order)
    }

    pub fn n_u(&self) -> usize {
        3 * self.velocity.n_dofs()
    }

    pub fn n_p(&self) -> usize {
        self.pressure.n_dofs()
    }

    pub fn n_l(&self) -> usize {
        self.multiplier.n_dofs()
    }

    pub fn n_dofs(&self, field: Field) -> usize {
        match field {
            Field::Velocity => self.n_u(),
            Field::Pressure => self.n_p(),
            Field::Multiplier => self.n_l(),
        }
    }

    pub fn scalar(&self, field: Field) -> &ScalarSpace {
        match field {
            Field::Velocity => &self.velocity,
            Field::Pressure => &self.pressure,
            Field::Multiplier => &self.multiplier,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeFunction {
    pub field: Field,
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(space: &TaylorHoodSpace, field: Field, coeffs: Vec<f64>) -> Result<Self> {
        let n = space.n_dofs(field);
        if coeffs.len() != n {
            return Err(Error::Dimension(format!("{field:?} has {n} dofs, got {}", coeffs.len())));
        }
        Ok(Self { field, coeffs })
    }

    pub fn zeros(space: &TaylorHoodSpace, field: Field) -> Self {
        Self { field, coeffs: vec![0.0; space.n_dofs(field)] }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }
}

/// Rule plus geometry and basis tabulations at its points.
#[derive(Clone, Debug)]
pub struct QuadContext {
    pub rule: QuadratureRule,
    pub geo: Tabulation,
    pub u: Tabulation,
    pub p: Tabulation,
    pub l: Tabulation,
}

impl QuadContext {
    pub fn new(mesh: &EvolvingSurfaceMesh, space: &TaylorHoodSpace, rule: QuadratureRule) -> Self {
        Self {
            geo: mesh.tabulate(&rule.points),
            u: space.velocity.basis.tabulate(&rule.points),
            p: space.pressure.basis.tabulate(&rule.points),
            l: space.multiplier.basis.tabulate(&rule.points),
            rule,
        }
    }

    pub fn tab(&self, field: Field) -> &Tabulation {
        match field {
            Field::Velocity => &self.u,
            Field::Pressure => &self.p,
            Field::Multiplier => &self.l,
        }
    }

    pub fn n_points(&self) -> usize {
        self.rule.len()
    }

    pub fn geo(&self, mesh: &EvolvingSurfaceMesh, e: usize, q: usize) -> Result<GeoPoint> {
        mesh.sample(e, &self.geo, q)
    }

    /// Quadrature weight times surface measure.
    #[inline]
    pub fn dx(&self, g: &GeoPoint, q: usize) -> f64 {
        self.rule.weights[q] * g.measure
    }

    /// Tangential gradients of all basis functions of `field` at point `q`.
    pub fn grads(&self, field: Field, g: &GeoPoint, q: usize) -> Vec<Vec3> {
        self.tab(field).grads[q].iter().map(|d| g.surface_grad(*d)).collect()
    }
}

/// Value, tangential gradient (rows are components) and covariant gradient.
#[derive(Clone, Copy, Debug)]
pub struct VectorEval {
    pub value: Vec3,
    pub grad: Mat3,
    pub cov: Mat3,
}

impl VectorEval {
    pub fn strain(&self) -> Mat3 {
        0.5 * (self.cov + self.cov.transpose())
    }

    pub fn divergence(&self) -> f64 {
        self.grad.trace()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScalarEval {
    pub value: f64,
    pub grad: Vec3,
}

/// Evaluates a velocity from basis values and tangential gradients.
pub fn velocity_at(coeffs: &[f64], nodes: &[usize], phi: &[f64], grads: &[Vec3], proj: &Mat3) -> VectorEval {
    let mut value = Vec3::zeros();
    let mut grad = Mat3::zeros();
    for (i, &n) in nodes.iter().enumerate() {
        let c = Vec3::new(coeffs[3 * n], coeffs[3 * n + 1], coeffs[3 * n + 2]);
        value += c * phi[i];
        grad += c * grads[i].transpose();
    }
    VectorEval { value, grad, cov: proj * grad }
}

pub fn scalar_at(coeffs: &[f64], nodes: &[usize], phi: &[f64], grads: &[Vec3]) -> ScalarEval {
    let mut value = 0.0;
    let mut grad = Vec3::zeros();
    for (i, &n) in nodes.iter().enumerate() {
        value += coeffs[n] * phi[i];
        grad += grads[i] * coeffs[n];
    }
    ScalarEval { value, grad }
}

/// Pointwise evaluation of a velocity at a reference point.
pub fn eval_velocity(
    space: &TaylorHoodSpace,
    u: &FeFunction,
    mesh: &EvolvingSurfaceMesh,
    elem: usize,
    ref_pt: [f64; 2],
) -> Result<VectorEval> {
    let g = mesh.element_geometry(elem, ref_pt)?;
    let b = &space.velocity.basis;
    let phi = b.values(ref_pt);
    let grads: Vec<Vec3> = b.gradients(ref_pt).iter().map(|d| g.surface_grad(*d)).collect();
    Ok(velocity_at(&u.coeffs, space.velocity.element(elem), &phi, &grads, &g.proj))
}

pub fn eval_scalar(
    space: &TaylorHoodSpace,
    f: &FeFunction,
    mesh: &EvolvingSurfaceMesh,
    elem: usize,
    ref_pt: [f64; 2],
) -> Result<ScalarEval> {
    let s = space.scalar(f.field);
    let g = mesh.element_geometry(elem, ref_pt)?;
    let phi = s.basis.values(ref_pt);
    let grads: Vec<Vec3> = s.basis.gradients(ref_pt).iter().map(|d| g.surface_grad(*d)).collect();
    Ok(scalar_at(&f.coeffs, s.element(elem), &phi, &grads))
}

/// Physical positions on the discrete surface of the nodes of `space`.
pub fn node_positions(mesh: &EvolvingSurfaceMesh, space: &ScalarSpace) -> Result<Vec<Vec3>> {
    let tab = mesh.tabulate(&space.basis.nodes);
    let mut pos = vec![Vec3::zeros(); space.n_dofs()];
    let mut seen = vec![false; space.n_dofs()];
    for e in 0..mesh.n_elements() {
        for (i, &d) in space.element(e).iter().enumerate() {
            if !seen[d] {
                pos[d] = mesh.sample(e, &tab, i)?.x;
                seen[d] = true;
            }
        }
    }
    Ok(pos)
}

pub fn interpolate_scalar(
    mesh: &EvolvingSurfaceMesh,
    space: &ScalarSpace,
    f: impl Fn(&Vec3) -> f64,
) -> Result<Vec<f64>> {
    Ok(node_positions(mesh, space)?.iter().map(f).collect())
}

/// Interleaved coefficients `3 * node + component`.
pub fn interpolate_vector(
    mesh: &EvolvingSurfaceMesh,
    space: &ScalarSpace,
    f: impl Fn(&Vec3) -> Vec3,
) -> Result<Vec<f64>> {
    Ok(node_positions(mesh, space)?.iter().flat_map(|x| { let v = f(x); [v[0], v[1], v[2]] }).collect())
}

impl TaylorHoodSpace {
    pub fn interpolate(
        &self,
        field: Field,
        mesh: &EvolvingSurfaceMesh,
        f: impl Fn(&Vec3) -> f64,
    ) -> Result<FeFunction> {
        let s = self.scalar(field);
        let coeffs = match field {
            Field::Velocity => return Err(Error::InvalidSpace("use interpolate_velocity".into())),
            _ => interpolate_scalar(mesh, s, f)?,
        };
        Ok(FeFunction { field, coeffs })
    }

    pub fn interpolate_velocity(&self, mesh: &EvolvingSurfaceMesh, f: impl Fn(&Vec3) -> Vec3) -> Result<FeFunction> {
        Ok(FeFunction { field: Field::Velocity, coeffs: interpolate_vector(mesh, &self.velocity, f)? })
    }
}

/// `m_j = int chi_j` over the discrete surface, for the pressure space.
pub fn zero_mean_constraint(space: &TaylorHoodSpace, mesh: &EvolvingSurfaceMesh, ctx: &QuadContext) -> Result<Vec<f64>> {
    scalar_load(mesh, &space.pressure, ctx, Field::Pressure, |_, _| 1.0)
}

/// `int g chi_j` for a scalar space, with `g(geo, q)`.
pub fn scalar_load(
    mesh: &EvolvingSurfaceMesh,
    space: &ScalarSpace,
    ctx: &QuadContext,
    field: Field,
    g: impl Fn(&GeoPoint, usize) -> f64 + Sync,
) -> Result<Vec<f64>> {
    let tab = ctx.tab(field);
    assemble_vector(mesh.n_elements(), space.n_dofs(), |e| {
        let rows = space.element(e).to_vec();
        let mut data = vec![0.0; rows.len()];
        for q in 0..ctx.n_points() {
            let geo = ctx.geo(mesh, e, q)?;
            let w = ctx.dx(&geo, q) * g(&geo, q);
            for (i, d) in data.iter_mut().enumerate() {
                *d += w * tab.values[q][i];
            }
        }
        Ok(LocalVector { rows, data })
    })
}

/// Scalar mass and stiffness Gram matrices `(M, S)` of a field's space.
pub fn scalar_gram(mesh: &EvolvingSurfaceMesh, space: &ScalarSpace, ctx: &QuadContext, field: Field) -> Result<(CsrMatrix, CsrMatrix)> {
    let n = space.n_dofs();
    let tab = ctx.tab(field);
    let mass = assemble_matrix(mesh.n_elements(), n, n, |e| {
        let d = space.element(e).to_vec();
        let mut lm = LocalMatrix::new(d.clone(), d);
        for q in 0..ctx.n_points() {
            let geo = ctx.geo(mesh, e, q)?;
            let w = ctx.dx(&geo, q);
            let phi = &tab.values[q];
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    lm.add(i, j, w * phi[i] * phi[j]);
                }
            }
        }
        Ok(lm)
    })?;
    let stiff = assemble_matrix(mesh.n_elements(), n, n, |e| {
        let d = space.element(e).to_vec();
        let mut lm = LocalMatrix::new(d.clone(), d);
        for q in 0..ctx.n_points() {
            let geo = ctx.geo(mesh, e, q)?;
            let w = ctx.dx(&geo, q);
            let g = ctx.grads(field, &geo, q);
            for i in 0..g.len() {
                for j in 0..g.len() {
                    lm.add(i, j, w * g[i].dot(&g[j]));
                }
            }
        }
        Ok(lm)
    })?;
    Ok((mass, stiff))
}

/// Discrete `H^{-1}` norm on the multiplier space and its Riesz maximiser.
pub struct DualNorm {
    pub mass: CsrMatrix,
    pub h1: CsrMatrix,
    solver: LuSolver,
}

impl DualNorm {
    pub fn new(mesh: &EvolvingSurfaceMesh, space: &TaylorHoodSpace, ctx: &QuadContext) -> Result<Self> {
        let (mass, stiff) = scalar_gram(mesh, &space.multiplier, ctx, Field::Multiplier)?;
        let h1 = CsrMatrix::linear_combination(&[(1.0, &mass), (1.0, &stiff)]);
        let solver = LuSolver::factor(&h1)?;
        Ok(Self { mass, h1, solver })
    }

    /// `(norm, maximiser)` with `norm = sqrt(b^T K^{-1} b)`, `b = M l`.
    pub fn eval_with_maximiser(&self, coeffs: &[f64]) -> Result<(f64, Vec<f64>)> {
        let b = self.mass.matvec(coeffs);
        let x = self.solver.solve(&b)?;
        Ok((dot(&b, &x).max(0.0).sqrt(), x))
    }

    /// `sqrt(b^T K^{-1} b)` for a load vector `b_k = (l, xi_k)`.
    pub fn eval_load(&self, b: &[f64]) -> Result<f64> {
        let x = self.solver.solve(b)?;
        Ok(dot(b, &x).max(0.0).sqrt())
    }

    pub fn eval(&self, coeffs: &[f64]) -> Result<f64> {
        Ok(self.eval_with_maximiser(coeffs)?.0)
    }
}

pub fn h1_dual_norm(space: &TaylorHoodSpace, l: &FeFunction, mesh: &EvolvingSurfaceMesh, ctx: &QuadContext) -> Result<f64> {
    if l.field != Field::Multiplier {
        return Err(Error::InvalidSpace("dual norm is defined on the multiplier space".into()));
    }
    DualNorm::new(mesh, space, ctx)?.eval(&l.coeffs)
}

/// `int_Gh f` for a scalar space function.
pub fn integral(space: &TaylorHoodSpace, f: &FeFunction, mesh: &EvolvingSurfaceMesh, ctx: &QuadContext) -> Result<f64> {
    let s = space.scalar(f.field);
    let tab = ctx.tab(f.field);
    assemble_scalar(mesh.n_elements(), |e| {
        let nodes = s.element(e);
        let mut acc = 0.0;
        for q in 0..ctx.n_points() {
            let geo = ctx.geo(mesh, e, q)?;
            let v: f64 = nodes.iter().zip(&tab.values[q]).map(|(n, p)| f.coeffs[*n] * p).sum();
            acc += ctx.dx(&geo, q) * v;
        }
        Ok(acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AnalyticSurface, SurfaceKind};
    use crate::quadrature::quadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(level: usize, kg: usize, ku: usize, kl: usize) -> (EvolvingSurfaceMesh, TaylorHoodSpace, QuadContext) {
        let s = AnalyticSurface::new(SurfaceKind::MovingSphere);
        let mesh = EvolvingSurfaceMesh::build_initial(s, level, kg).unwrap();
        let space = TaylorHoodSpace::for_mesh(&mesh, ku, kl).unwrap();
        let ctx = QuadContext::new(&mesh, &space, quadrature(2 * ku + kg).unwrap());
        (mesh, space, ctx)
    }

    #[test]
    fn space_validation() {
        let t = Topology::icosphere(0);
        assert!(TaylorHoodSpace::new(&t, 1, 0, 1, 1).is_err());
        assert!(TaylorHoodSpace::new(&t, 2, 2, 2, 2).is_err());
        assert!(TaylorHoodSpace::new(&t, 2, 1, 3, 2).is_err());
        let s = TaylorHoodSpace::new(&t, 2, 1, 1, 2).unwrap();
        assert_eq!((s.n_u(), s.n_p(), s.n_l()), (3 * 42, 12, 12));
    }

    #[test]
    fn dof_counts_follow_euler_characteristic() {
        for level in 0..3 {
            let t = Topology::icosphere(level);
            let f = t.n_triangles();
            let s = TaylorHoodSpace::new(&t, 3, 2, 3, 2).unwrap();
            // V = F/2 + 2, E = 3F/2
            assert_eq!(s.velocity.n_dofs(), 9 * f / 2 + 2);
            assert_eq!(s.n_p(), 2 * f + 2);
            assert_eq!(s.n_l(), 9 * f / 2 + 2);
        }
    }

    #[test]
    fn partition_of_unity_and_constants() {
        let (mesh, space, ctx) = setup(1, 2, 2, 2);
        for q in 0..ctx.n_points() {
            assert!((ctx.u.values[q].iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
        let c = space.interpolate(Field::Pressure, &mesh, |_| 2.5).unwrap();
        assert!(c.coeffs.iter().all(|v| *v == 2.5));
        let ev = eval_scalar(&space, &c, &mesh, 3, [0.2, 0.3]).unwrap();
        assert!((ev.value - 2.5).abs() < 1e-13 && ev.grad.norm() < 1e-12);
        let u = space.interpolate_velocity(&mesh, |_| Vec3::new(1.0, -2.0, 0.5)).unwrap();
        let ev = eval_velocity(&space, &u, &mesh, 5, [0.1, 0.6]).unwrap();
        assert!(ev.grad.norm() < 1e-12 && ev.strain().norm() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_polynomials_at_nodes() {
        let (mesh, space, _) = setup(1, 2, 2, 2);
        let f = |x: &Vec3| 1.0 + x[0] * x[1] - 2.0 * x[2];
        let p = space.interpolate(Field::Multiplier, &mesh, f).unwrap();
        let nodes = node_positions(&mesh, &space.multiplier).unwrap();
        for e in [0, 7, 33] {
            for (i, rp) in space.multiplier.basis.nodes.iter().enumerate() {
                let ev = eval_scalar(&space, &p, &mesh, e, *rp).unwrap();
                let x = nodes[space.multiplier.element(e)[i]];
                assert!((ev.value - f(&x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn covariant_gradient_trace_and_symmetry() {
        let (mesh, space, _) = setup(1, 3, 2, 1);
        let u = space.interpolate_velocity(&mesh, |x| Vec3::new(x[1] * x[2], x[0].sin(), x[0] * x[1])).unwrap();
        for e in 0..mesh.n_elements() {
            let ev = eval_velocity(&space, &u, &mesh, e, [0.25, 0.35]).unwrap();
            assert!((ev.cov.trace() - ev.grad.trace()).abs() < 1e-12);
            let s = ev.strain();
            assert!((s - s.transpose()).norm() < 1e-14);
        }
    }

    #[test]
    fn velocity_of_moving_sphere_at_pole() {
        let (mesh, space, _) = setup(1, 2, 2, 2);
        let s = mesh.surface;
        let v = space
            .interpolate_velocity(&mesh, |x| {
                let p = s.closest_point(x, 0.0).unwrap();
                s.normal(&p, 0.0) * s.speed_ext(crate::geometry::arr(&p), 0.0)
            })
            .unwrap();
        let nodes = node_positions(&mesh, &space.velocity).unwrap();
        let i = nodes.iter().position(|x| (x - Vec3::x()).norm() < 1e-12).unwrap();
        assert!((Vec3::new(v.coeffs[3 * i], v.coeffs[3 * i + 1], v.coeffs[3 * i + 2]) - Vec3::new(0.2, 0.0, 0.0)).norm() < 1e-14);
        for (k, x) in nodes.iter().enumerate() {
            let n = x.normalize();
            let c = Vec3::new(v.coeffs[3 * k], v.coeffs[3 * k + 1], v.coeffs[3 * k + 2]);
            assert!((c - n * (0.2 * n[0])).norm() < 1e-12);
        }
        let pole = s.normal(&Vec3::x(), 0.0) * s.speed_ext([1.0, 0.0, 0.0], 0.0);
        assert!((pole - Vec3::new(0.2, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_mean_functional() {
        let (mesh, space, ctx) = setup(1, 2, 2, 2);
        let m = zero_mean_constraint(&space, &mesh, &ctx).unwrap();
        let area = mesh.area(&ctx.rule).unwrap();
        assert!((m.iter().sum::<f64>() - area).abs() < 1e-12);
        // reflection x2 -> -x2 maps the mesh to itself; a symmetric rule keeps odd integrals at zero
        let sym = QuadContext::new(&mesh, &space, quadrature(5).unwrap());
        let m5 = zero_mean_constraint(&space, &mesh, &sym).unwrap();
        let odd = space.interpolate(Field::Pressure, &mesh, |x| x[1] * (1.0 + x[0])).unwrap();
        assert!(dot(&m5, &odd.coeffs).abs() < 1e-12, "{}", dot(&m5, &odd.coeffs));
        let mut q = space.interpolate(Field::Pressure, &mesh, |x| x[2] + 0.3).unwrap();
        let mean = dot(&m, &q.coeffs) / area;
        q.coeffs.iter_mut().for_each(|v| *v -= mean);
        assert!(dot(&m, &q.coeffs).abs() < 1e-12 * area);
    }

    #[test]
    fn dual_norm_properties() {
        let (mesh, space, ctx) = setup(1, 2, 2, 1);
        let dn = DualNorm::new(&mesh, &space, &ctx).unwrap();
        let n = space.n_l();
        assert_eq!(dn.eval(&vec![0.0; n]).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (norm, riesz) = dn.eval_with_maximiser(&l).unwrap();
        let l2 = dn.mass.form(&l, &l).sqrt();
        assert!(norm <= l2 * (1.0 + 1e-12));
        let ratio = |xi: &[f64]| dn.mass.form(&l, xi) / dn.h1.form(xi, xi).sqrt();
        let mut best: f64 = 0.0;
        for _ in 0..200 {
            let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = ratio(&xi);
            assert!(r <= norm * (1.0 + 1e-12));
            best = best.max(r);
        }
        best = best.max(ratio(&riesz));
        assert!(best >= 0.95 * norm);
        assert!(h1_dual_norm(&space, &FeFunction::zeros(&space, Field::Pressure), &mesh, &ctx).is_err());
    }
}
