//! Element assembly of the discrete bilinear forms.
//!
//! Velocity rows and columns use the interleaved numbering `3 * node + comp`.
//! In every block the row index is the test function and the column index the
//! trial function.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_matrix, assemble_vector, vector_dofs, LocalMatrix, LocalVector};
use crate::error::Result;
use crate::fespace::{Field, QuadContext, TaylorHoodSpace};
use crate::geometry::{arr, vec3, Mat3, Vec3};
use crate::mesh::{EvolvingSurfaceMesh, GeoPoint};
use crate::sparse::CsrMatrix;

/// How the pressure part of the constraint is written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintForm {
    /// `int w . grad_h q`
    #[default]
    Strong,
    /// `-int q div_h w`
    Ibp,
}

/// Velocities of the geometric nodes; `W_h` is their Lagrange interpolant.
#[derive(Clone, Debug)]
pub struct MeshMotion {
    pub nodal: Vec<Vec3>,
}

impl MeshMotion {
    /// Exact node velocities of the benchmark motion at the mesh time.
    pub fn of(mesh: &EvolvingSurfaceMesh) -> Self {
        let t = mesh.t;
        let nodal = mesh.nodes.iter().map(|x| vec3(mesh.surface.mesh_velocity(arr(x), t))).collect();
        Self { nodal }
    }

    pub fn zero(mesh: &EvolvingSurfaceMesh) -> Self {
        Self { nodal: vec![Vec3::zeros(); mesh.n_nodes()] }
    }

    /// `(W_h, div_h W_h)` at point `q` of element `e`.
    pub fn at(&self, mesh: &EvolvingSurfaceMesh, quad: &QuadContext, e: usize, q: usize, geo: &GeoPoint) -> (Vec3, f64) {
        let mut w = Vec3::zeros();
        let mut div = 0.0;
        for (i, &n) in mesh.layout.element(e).iter().enumerate() {
            let wn = self.nodal[n];
            w += wn * quad.geo.values[q][i];
            div += wn.dot(&geo.surface_grad(quad.geo.grads[q][i]));
        }
        (w, div)
    }
}

/// Everything the element kernels need on one mesh snapshot.
pub struct FormContext<'a> {
    pub mesh: &'a EvolvingSurfaceMesh,
    pub space: &'a TaylorHoodSpace,
    pub quad: &'a QuadContext,
    pub motion: &'a MeshMotion,
}

/// Per-point velocity basis data.
struct VelPoint {
    geo: GeoPoint,
    dx: f64,
    grads: Vec<Vec3>,
}

impl<'a> FormContext<'a> {
    pub fn new(mesh: &'a EvolvingSurfaceMesh, space: &'a TaylorHoodSpace, quad: &'a QuadContext, motion: &'a MeshMotion) -> Self {
        Self { mesh, space, quad, motion }
    }

    fn n_elem(&self) -> usize {
        self.mesh.n_elements()
    }

    fn vel_point(&self, e: usize, q: usize) -> Result<VelPoint> {
        let geo = self.quad.geo(self.mesh, e, q)?;
        let dx = self.quad.dx(&geo, q);
        let grads = self.quad.grads(Field::Velocity, &geo, q);
        Ok(VelPoint { geo, dx, grads })
    }

    fn phi_u(&self, q: usize) -> &[f64] {
        &self.quad.u.values[q]
    }

    /// Interpolated scalar on the velocity layout at `(e, q)`.
    fn scalar_u(&self, nodal: &[f64], e: usize, q: usize) -> f64 {
        self.space.velocity.element(e).iter().zip(self.phi_u(q)).map(|(n, p)| nodal[*n] * p).sum()
    }

    fn vector_u(&self, coeffs: &[f64], e: usize, q: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        for (n, p) in self.space.velocity.element(e).iter().zip(self.phi_u(q)) {
            v += Vec3::new(coeffs[3 * n], coeffs[3 * n + 1], coeffs[3 * n + 2]) * *p;
        }
        v
    }

    /// Velocity-velocity block from a kernel on `(point, i, a, j, b)`.
    fn velocity_block<K>(&self, kernel: K) -> Result<CsrMatrix>
    where
        K: Fn(&VelPoint, usize, usize, &mut dyn FnMut(usize, usize, usize, usize, f64)) -> Result<()> + Sync,
    {
        let n = self.space.n_u();
        assemble_matrix(self.n_elem(), n, n, |e| {
            let d = vector_dofs(self.space.velocity.element(e));
            let mut lm = LocalMatrix::new(d.clone(), d);
            for q in 0..self.quad.n_points() {
                let p = self.vel_point(e, q)?;
                kernel(&p, e, q, &mut |i, a, j, b, v| lm.add(3 * i + a, 3 * j + b, v))?;
            }
            Ok(lm)
        })
    }

    /// `int w . v`
    pub fn mass(&self) -> Result<CsrMatrix> {
        self.weighted_mass(|_, _| 1.0, false)
    }

    /// `int w . P_h v`
    pub fn projected_mass(&self) -> Result<CsrMatrix> {
        self.weighted_mass(|_, _| 1.0, true)
    }

    /// `int div_h(W_h) w . v`
    pub fn g(&self) -> Result<CsrMatrix> {
        self.mesh_divergence_mass(false)
    }

    /// `int div_h(W_h) w . P_h v`
    pub fn g_projected(&self) -> Result<CsrMatrix> {
        self.mesh_divergence_mass(true)
    }

    fn mesh_divergence_mass(&self, projected: bool) -> Result<CsrMatrix> {
        let n = self.space.n_u();
        assemble_matrix(self.n_elem(), n, n, |e| {
            let d = vector_dofs(self.space.velocity.element(e));
            let mut lm = LocalMatrix::new(d.clone(), d);
            for q in 0..self.quad.n_points() {
                let geo = self.quad.geo(self.mesh, e, q)?;
                let (_, div) = self.motion.at(self.mesh, self.quad, e, q, &geo);
                add_mass(&mut lm, self.phi_u(q), self.quad.dx(&geo, q) * div, projected.then_some(&geo.proj));
            }
            Ok(lm)
        })
    }

    fn weighted_mass(&self, weight: impl Fn(usize, usize) -> f64 + Sync, projected: bool) -> Result<CsrMatrix> {
        let n = self.space.n_u();
        assemble_matrix(self.n_elem(), n, n, |e| {
            let d = vector_dofs(self.space.velocity.element(e));
            let mut lm = LocalMatrix::new(d.clone(), d);
            for q in 0..self.quad.n_points() {
                let geo = self.quad.geo(self.mesh, e, q)?;
                add_mass(&mut lm, self.phi_u(q), self.quad.dx(&geo, q) * weight(e, q), projected.then_some(&geo.proj));
            }
            Ok(lm)
        })
    }

    /// `int E_h(w) : E_h(v)` with `E_h(w) = sym(P_h grad_h w)`.
    pub fn strain(&self) -> Result<CsrMatrix> {
        self.velocity_block(|p, _e, _q, add| {
            let cov = strain_basis(&p.grads, &p.geo.proj, None, &[]);
            add_strain(&cov, p.dx, add);
            Ok(())
        })
    }

    /// `int E_h(P_h w) : E_h(P_h v)`.
    pub fn tangential_strain(&self) -> Result<CsrMatrix> {
        self.velocity_block(|p, _e, q, add| {
            let cov = strain_basis(&p.grads, &p.geo.proj, Some((&p.geo.normal, &p.geo.weingarten)), self.phi_u(q));
            add_strain(&cov, p.dx, add);
            Ok(())
        })
    }

    /// `int (w . n~)(v . n~)` with the improved normal.
    pub fn normal_penalty(&self) -> Result<CsrMatrix> {
        let mesh = self.mesh;
        self.velocity_block(|p, _e, q, add| {
            let nt = mesh.improved_normal(&p.geo.x)?;
            let phi = self.phi_u(q);
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    let s = p.dx * phi[i] * phi[j];
                    for a in 0..3 {
                        for b in 0..3 {
                            add(i, a, j, b, s * nt[a] * nt[b]);
                        }
                    }
                }
            }
            Ok(())
        })
    }

    /// Penalty-scheme operator `2 mu int E_h(P_h w):E_h(P_h v) + tau int (w.n~)(v.n~)`.
    pub fn penalty_form(&self, mu: f64, tau: f64) -> Result<CsrMatrix> {
        let s = self.tangential_strain()?;
        let p = self.normal_penalty()?;
        Ok(CsrMatrix::linear_combination(&[(2.0 * mu, &s), (tau, &p)]))
    }

    /// Pressure block `b_h(w, q)` (rows: pressure, cols: velocity).
    pub fn b_pressure(&self, form: ConstraintForm) -> Result<CsrMatrix> {
        let (np, nu) = (self.space.n_p(), self.space.n_u());
        assemble_matrix(self.n_elem(), np, nu, |e| {
            let rows = self.space.pressure.element(e).to_vec();
            let cols = vector_dofs(self.space.velocity.element(e));
            let mut lm = LocalMatrix::new(rows, cols);
            for q in 0..self.quad.n_points() {
                let p = self.vel_point(e, q)?;
                let phi = self.phi_u(q);
                match form {
                    ConstraintForm::Strong => {
                        let gp = self.quad.grads(Field::Pressure, &p.geo, q);
                        for (k, g) in gp.iter().enumerate() {
                            for (j, ph) in phi.iter().enumerate() {
                                for b in 0..3 {
                                    lm.add(k, 3 * j + b, p.dx * ph * g[b]);
                                }
                            }
                        }
                    }
                    ConstraintForm::Ibp => {
                        for (k, psi) in self.quad.p.values[q].iter().enumerate() {
                            for (j, g) in p.grads.iter().enumerate() {
                                for b in 0..3 {
                                    lm.add(k, 3 * j + b, -p.dx * psi * g[b]);
                                }
                            }
                        }
                    }
                }
            }
            Ok(lm)
        })
    }

    /// Multiplier block `int xi w . n_h` (rows: multiplier, cols: velocity).
    pub fn b_multiplier(&self) -> Result<CsrMatrix> {
        let (nl, nu) = (self.space.n_l(), self.space.n_u());
        assemble_matrix(self.n_elem(), nl, nu, |e| {
            let rows = self.space.multiplier.element(e).to_vec();
            let cols = vector_dofs(self.space.velocity.element(e));
            let mut lm = LocalMatrix::new(rows, cols);
            for q in 0..self.quad.n_points() {
                let geo = self.quad.geo(self.mesh, e, q)?;
                let dx = self.quad.dx(&geo, q);
                for (k, xi) in self.quad.l.values[q].iter().enumerate() {
                    for (j, ph) in self.phi_u(q).iter().enumerate() {
                        for b in 0..3 {
                            lm.add(k, 3 * j + b, dx * xi * ph * geo.normal[b]);
                        }
                    }
                }
            }
            Ok(lm)
        })
    }

    /// Skew-symmetrised directional convection with advecting field
    /// `z = z_lift - W_h` and the symmetric correction `-1/2 int sigma w.v`.
    pub fn convective_dir(&self, data: &ConvectionData) -> Result<CsrMatrix> {
        self.velocity_block(|p, e, q, add| {
            let z = data.advecting(self, e, q, &p.geo);
            let sigma = self.scalar_u(&data.sigma, e, q);
            let phi = self.phi_u(q);
            let zg: Vec<f64> = p.grads.iter().map(|g| g.dot(&z)).collect();
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    let v = p.dx * (0.5 * (phi[i] * zg[j] - phi[j] * zg[i]) - 0.5 * sigma * phi[i] * phi[j]);
                    for a in 0..3 {
                        add(i, a, j, a, v);
                    }
                }
            }
            Ok(())
        })
    }

    /// Skew-symmetrised covariant convection: covariant pair, minus the
    /// Weingarten pair, `-1/2 int sigma P_h w . P_h v`, and, when
    /// `data.normal_speed` is set, `int V_h w . H_h v`.
    pub fn convective_cov(&self, data: &ConvectionData) -> Result<CsrMatrix> {
        self.velocity_block(|p, e, q, add| {
            let z = data.advecting(self, e, q, &p.geo);
            let sigma = self.scalar_u(&data.sigma, e, q);
            let vn = data.normal_speed.as_ref().map_or(0.0, |v| self.scalar_u(v, e, q));
            let (pr, n, h) = (&p.geo.proj, &p.geo.normal, &p.geo.weingarten);
            let htz = h.transpose() * z;
            let phi = self.phi_u(q);
            let zg: Vec<f64> = p.grads.iter().map(|g| g.dot(&z)).collect();
            for i in 0..phi.len() {
                for j in 0..phi.len() {
                    let pp = phi[i] * phi[j];
                    let skew = 0.5 * (phi[i] * zg[j] - phi[j] * zg[i]);
                    for a in 0..3 {
                        for b in 0..3 {
                            let mut v = pr[(a, b)] * (skew - 0.5 * sigma * pp);
                            v -= 0.5 * pp * (n[b] * htz[a] - n[a] * htz[b]);
                            v += vn * pp * h[(b, a)];
                            add(i, a, j, b, p.dx * v);
                        }
                    }
                }
            }
            Ok(())
        })
    }

    /// `int V_h (H_h W_h) . v`
    pub fn weingarten_motion_load(&self, normal_speed: &[f64]) -> Result<Vec<f64>> {
        assemble_vector(self.n_elem(), self.space.n_u(), |e| {
            let rows = vector_dofs(self.space.velocity.element(e));
            let mut data = vec![0.0; rows.len()];
            for q in 0..self.quad.n_points() {
                let geo = self.quad.geo(self.mesh, e, q)?;
                let (w, _) = self.motion.at(self.mesh, self.quad, e, q, &geo);
                let hw = geo.weingarten * w * (self.quad.dx(&geo, q) * self.scalar_u(normal_speed, e, q));
                for (i, ph) in self.phi_u(q).iter().enumerate() {
                    for a in 0..3 {
                        data[3 * i + a] += ph * hw[a];
                    }
                }
            }
            Ok(LocalVector { rows, data })
        })
    }
}

/// Advecting velocity and scalar data for the convective forms.
#[derive(Clone, Debug)]
pub struct ConvectionData {
    /// Time-lifted previous velocity coefficients.
    pub lift: Vec<f64>,
    /// Nodal values of `div_G(u_T - W_T)` on the velocity layout.
    pub sigma: Vec<f64>,
    /// Nodal normal speed on the velocity layout, for the covariant term.
    pub normal_speed: Option<Vec<f64>>,
    /// Subtract the mesh velocity from the advecting field.
    pub relative: bool,
}

impl ConvectionData {
    pub fn zero(space: &TaylorHoodSpace) -> Self {
        Self {
            lift: vec![0.0; space.n_u()],
            sigma: vec![0.0; space.velocity.n_dofs()],
            normal_speed: None,
            relative: false,
        }
    }

    fn advecting(&self, ctx: &FormContext, e: usize, q: usize, geo: &GeoPoint) -> Vec3 {
        let z = ctx.vector_u(&self.lift, e, q);
        if self.relative {
            z - ctx.motion.at(ctx.mesh, ctx.quad, e, q, geo).0
        } else {
            z
        }
    }
}

fn add_mass(lm: &mut LocalMatrix, phi: &[f64], w: f64, proj: Option<&Mat3>) {
    for i in 0..phi.len() {
        for j in 0..phi.len() {
            let s = w * phi[i] * phi[j];
            match proj {
                None => {
                    for a in 0..3 {
                        lm.add(3 * i + a, 3 * j + a, s);
                    }
                }
                Some(p) => {
                    for a in 0..3 {
                        for b in 0..3 {
                            lm.add(3 * i + a, 3 * j + b, s * p[(a, b)]);
                        }
                    }
                }
            }
        }
    }
}

/// Strain tensors of the basis fields `phi_i e_a`, flattened as `3 i + a`.
/// With `tangential = Some((n_h, H_h))` the fields are `P_h phi_i e_a`, whose
/// covariant gradient is `P e_a (x) grad phi_i - phi_i n_a H_h`.
pub(crate) fn strain_basis(grads: &[Vec3], proj: &Mat3, tangential: Option<(&Vec3, &Mat3)>, phi: &[f64]) -> Vec<Mat3> {
    let mut out = Vec::with_capacity(3 * grads.len());
    for (i, g) in grads.iter().enumerate() {
        for a in 0..3 {
            let mut cov = proj.column(a) * g.transpose();
            if let Some((n, h)) = tangential {
                cov -= h * (phi[i] * n[a]);
            }
            out.push(0.5 * (cov + cov.transpose()));
        }
    }
    out
}

fn add_strain(eps: &[Mat3], dx: f64, add: &mut dyn FnMut(usize, usize, usize, usize, f64)) {
    for (r, er) in eps.iter().enumerate() {
        for (c, ec) in eps.iter().enumerate() {
            add(r / 3, r % 3, c / 3, c % 3, dx * er.component_mul(ec).sum());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::interpolate_vector;
    use crate::geometry::{AnalyticSurface, SurfaceKind};
    use crate::quadrature::quadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        mesh: EvolvingSurfaceMesh,
        space: TaylorHoodSpace,
        quad: QuadContext,
        motion: MeshMotion,
    }

    impl Fixture {
        fn new(kind: SurfaceKind, level: usize, kg: usize, ku: usize, kl: usize, t: f64) -> Self {
            let mesh = EvolvingSurfaceMesh::build_initial(AnalyticSurface::new(kind), level, kg).unwrap().at_time(t).unwrap();
            let space = TaylorHoodSpace::for_mesh(&mesh, ku, kl).unwrap();
            let quad = QuadContext::new(&mesh, &space, quadrature(2 * ku + kg).unwrap());
            let motion = MeshMotion::of(&mesh);
            Self { mesh, space, quad, motion }
        }

        fn ctx(&self) -> FormContext<'_> {
            FormContext::new(&self.mesh, &self.space, &self.quad, &self.motion)
        }
    }

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn constant_field(n: usize, c: Vec3) -> Vec<f64> {
        (0..n).flat_map(|_| [c[0], c[1], c[2]]).collect()
    }

    #[test]
    fn mass_is_spd_and_measures_area() {
        let f = Fixture::new(SurfaceKind::MovingSphere, 2, 2, 2, 2, 0.0);
        let m = f.ctx().mass().unwrap();
        assert!(m.asymmetry() < 1e-12);
        let e1 = constant_field(f.space.velocity.n_dofs(), Vec3::x());
        let area = m.form(&e1, &e1);
        assert!((area - f.mesh.area(&f.quad.rule).unwrap()).abs() < 1e-12);
        assert!((area - 4.0 * std::f64::consts::PI).abs() / (4.0 * std::f64::consts::PI) < 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = random(f.space.n_u(), &mut rng);
            assert!(m.form(&x, &x) > 0.0);
        }
    }

    #[test]
    fn g_vanishes_on_stationary_surface() {
        let f = Fixture::new(SurfaceKind::StationarySphere, 1, 2, 2, 2, 0.0);
        assert_eq!(f.ctx().g().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn g_matches_analytic_surface_divergence() {
        // oscillating sphere at t = 0: div_G(W) = V kappa = (pi/2) * 2
        let f = Fixture::new(SurfaceKind::OscillatingSphere, 2, 2, 2, 2, 0.0);
        let g = f.ctx().g().unwrap();
        assert!(g.asymmetry() < 1e-12);
        let e1 = constant_field(f.space.velocity.n_dofs(), Vec3::x());
        let area = f.mesh.area(&f.quad.rule).unwrap();
        let rel = (g.form(&e1, &e1) - area * std::f64::consts::PI).abs() / (area * std::f64::consts::PI);
        assert!(rel < 1e-2, "{rel}");
        // moving sphere: translation has zero surface divergence on average
        let f = Fixture::new(SurfaceKind::MovingSphere, 2, 2, 2, 2, 0.3);
        let g = f.ctx().g().unwrap();
        assert!(g.form(&e1, &e1).abs() < 1e-10);
    }

    #[test]
    fn strain_is_symmetric_psd_with_constant_kernel() {
        let f = Fixture::new(SurfaceKind::MovingSphere, 1, 2, 2, 2, 0.0);
        let a = f.ctx().strain().unwrap();
        assert!(a.asymmetry() < 1e-12);
        let c = constant_field(f.space.velocity.n_dofs(), Vec3::new(0.3, -1.0, 2.0));
        assert!(a.matvec(&c).iter().all(|v| v.abs() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let x = random(f.space.n_u(), &mut rng);
            assert!(a.form(&x, &x) >= -1e-12);
        }
    }

    #[test]
    fn constraint_blocks() {
        let f = Fixture::new(SurfaceKind::MovingSphere, 1, 2, 2, 2, 0.0);
        let ctx = f.ctx();
        let bp = ctx.b_pressure(ConstraintForm::Strong).unwrap();
        let ones = vec![1.0; f.space.n_p()];
        assert!(bp.tmatvec(&ones).iter().all(|v| v.abs() < 1e-14));
        // a tangential field has zero normal constraint up to n_h vs nodal normal mismatch
        // use an exactly n_h-orthogonal field: the improved normal is exact, so check
        // linearity instead on a field with known sign
        let bl = ctx.b_multiplier().unwrap();
        let radial = interpolate_vector(&f.mesh, &f.space.velocity, |x| x.normalize()).unwrap();
        let s: f64 = bl.matvec(&radial).iter().sum();
        let area = f.mesh.area(&f.quad.rule).unwrap();
        assert!((s - area).abs() / area < 2e-2);
        let bi = ctx.b_pressure(ConstraintForm::Ibp).unwrap();
        let c = constant_field(f.space.velocity.n_dofs(), Vec3::new(1.0, 2.0, 3.0));
        assert!(bi.matvec(&c).iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn tangential_field_has_zero_multiplier_constraint_on_flat_elements() {
        // on k_g = 1 meshes n_h is elementwise constant; the field P_h e_1 built from one
        // element's normal is tangential on that element
        let f = Fixture::new(SurfaceKind::StationarySphere, 0, 1, 2, 2, 0.0);
        let geo = f.mesh.element_geometry(0, [0.3, 0.3]).unwrap();
        let t = geo.proj * Vec3::new(0.2, 1.0, -0.5);
        let u = constant_field(f.space.velocity.n_dofs(), t);
        let bl = f.ctx().b_multiplier().unwrap();
        let r = bl.matvec(&u);
        for &k in f.space.multiplier.element(0) {
            let own: bool = (0..f.mesh.n_elements()).all(|e| e == 0 || !f.space.multiplier.element(e).contains(&k));
            if own {
                assert!(r[k].abs() < 1e-14);
            }
        }
        let mut acc = 0.0;
        for q in 0..f.quad.n_points() {
            let g = f.quad.geo(&f.mesh, 0, q).unwrap();
            acc += f.quad.dx(&g, q) * t.dot(&g.normal);
        }
        assert!(acc.abs() < 1e-15);
    }

    fn skew_part(c: &CsrMatrix) -> CsrMatrix {
        let t = c.transpose();
        CsrMatrix::linear_combination(&[(0.5, c), (-0.5, &t)])
    }

    #[test]
    fn convective_forms_skew_structure() {
        let f = Fixture::new(SurfaceKind::MovingSphere, 1, 2, 2, 1, 0.4);
        let ctx = f.ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let nv = f.space.velocity.n_dofs();
        let zero = ConvectionData::zero(&f.space);
        assert_eq!(ctx.convective_dir(&zero).unwrap().max_abs(), 0.0);
        assert_eq!(ctx.convective_cov(&zero).unwrap().max_abs(), 0.0);
        let data = ConvectionData { lift: random(f.space.n_u(), &mut rng), sigma: vec![0.0; nv], normal_speed: None, relative: true };
        for c in [ctx.convective_dir(&data).unwrap(), ctx.convective_cov(&data).unwrap()] {
            assert!(skew_part(&c).max_abs() > 1e-3);
            for _ in 0..100 {
                let u = random(f.space.n_u(), &mut rng);
                let n2: f64 = u.iter().map(|v| v * v).sum();
                assert!(c.form(&u, &u).abs() <= 1e-12 * n2);
            }
        }
        // the sigma and normal-speed parts are symmetric
        let data2 = ConvectionData { sigma: random(nv, &mut rng), normal_speed: Some(random(nv, &mut rng)), ..data.clone() };
        let diff = CsrMatrix::linear_combination(&[(1.0, &ctx.convective_cov(&data2).unwrap()), (-1.0, &ctx.convective_cov(&data).unwrap())]);
        assert!(diff.max_abs() > 1e-3);
        // H_h is only approximately symmetric on curved elements
        assert!(diff.asymmetry() < 0.2);
        let diff = CsrMatrix::linear_combination(&[(1.0, &ctx.convective_dir(&data2).unwrap()), (-1.0, &ctx.convective_dir(&data).unwrap())]);
        assert!(diff.asymmetry() < 1e-12);
    }

    #[test]
    fn projected_forms_are_symmetric_psd() {
        let f = Fixture::new(SurfaceKind::OscillatingSphere, 1, 2, 2, 1, 0.1);
        let ctx = f.ctx();
        let mp = ctx.projected_mass().unwrap();
        assert!(mp.asymmetry() < 1e-12);
        let a = ctx.penalty_form(0.5, 2.0).unwrap();
        assert!(a.asymmetry() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = random(f.space.n_u(), &mut rng);
            assert!(a.form(&x, &x) >= -1e-12 && mp.form(&x, &x) >= -1e-12);
        }
        // normal fields: the penalty energy is tau |u|^2 and the projected mass is small
        let s = f.mesh.surface;
        let un = interpolate_vector(&f.mesh, &f.space.velocity, |x| s.normal(&s.closest_point(x, f.mesh.t).unwrap(), f.mesh.t)).unwrap();
        let m = ctx.mass().unwrap();
        let pen = ctx.normal_penalty().unwrap();
        let rel = (pen.form(&un, &un) - m.form(&un, &un)).abs() / m.form(&un, &un);
        assert!(rel < 2e-3, "{rel}");
        // tau = 0 and tangential input reduce to the tangential strain
        let ts = ctx.tangential_strain().unwrap();
        let a0 = ctx.penalty_form(0.5, 0.0).unwrap();
        let x = random(f.space.n_u(), &mut rng);
        assert!((a0.form(&x, &x) - ts.form(&x, &x)).abs() < 1e-12 * ts.form(&x, &x).abs().max(1.0));
    }
}
