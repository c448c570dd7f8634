//! Analytic benchmark surfaces and exact solutions.
//!
//! Every surface here is a sphere `|x - c(t)| = r(t)`, so the closest point,
//! normal and Weingarten map have closed forms. The exact velocity is built
//! from a stream function, `u = n x grad psi + V n`, and all derivatives of it
//! are taken by forward-mode AD on the generic field definitions.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::ad::{self, cross, dot, scal, Dual, Scalar, AXES};
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

const ON_SURFACE_TOL: f64 = 1e-10;

#[inline]
pub fn arr(v: &Vec3) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

#[inline]
pub fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

#[inline]
fn mat3(m: [[f64; 3]; 3]) -> Mat3 {
    Mat3::from_fn(|i, j| m[i][j])
}

/// `J[i][j] = d f_i / d x_j`, evaluated with one dual pass per direction.
pub fn jacobian<T, F>(f: F, x: [T; 3]) -> [[T; 3]; 3]
where
    T: Scalar,
    F: Fn([Dual<T>; 3]) -> [Dual<T>; 3],
{
    let mut jac = [[T::cst(0.0); 3]; 3];
    for (j, dir) in AXES.iter().enumerate() {
        let y = f(ad::seed(x, *dir));
        for i in 0..3 {
            jac[i][j] = y[i].eps;
        }
    }
    jac
}

pub fn gradient<T, F>(f: F, x: [T; 3]) -> [T; 3]
where
    T: Scalar,
    F: Fn([Dual<T>; 3]) -> Dual<T>,
{
    let mut g = [T::cst(0.0); 3];
    for (j, dir) in AXES.iter().enumerate() {
        g[j] = f(ad::seed(x, *dir)).eps;
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    /// Unit sphere translating along x1 with speed 0.2.
    MovingSphere,
    /// Sphere at the origin with radius `1 + sin(2 pi t)/4`.
    OscillatingSphere,
    /// Fixed unit sphere.
    StationarySphere,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::MovingSphere => "moving_sphere",
            SurfaceKind::OscillatingSphere => "oscillating_sphere",
            SurfaceKind::StationarySphere => "stationary_sphere",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticSurface {
    pub kind: SurfaceKind,
}

impl AnalyticSurface {
    pub fn new(kind: SurfaceKind) -> Self {
        Self { kind }
    }

    pub fn final_time(&self) -> f64 {
        match self.kind {
            SurfaceKind::MovingSphere => 2.0,
            SurfaceKind::OscillatingSphere | SurfaceKind::StationarySphere => 1.0,
        }
    }

    pub fn center<T: Scalar>(&self, t: T) -> [T; 3] {
        let z = T::cst(0.0);
        match self.kind {
            SurfaceKind::MovingSphere => [t.scale(0.2), z, z],
            _ => [z, z, z],
        }
    }

    pub fn radius<T: Scalar>(&self, t: T) -> T {
        match self.kind {
            SurfaceKind::OscillatingSphere => {
                T::cst(1.0) + (t.scale(2.0 * std::f64::consts::PI)).sin().scale(0.25)
            }
            _ => T::cst(1.0),
        }
    }

    pub fn radius_dt<T: Scalar>(&self, t: T) -> T {
        self.radius(Dual::var(t)).eps
    }

    pub fn center_dt<T: Scalar>(&self, t: T) -> [T; 3] {
        let c = self.center(Dual::var(t));
        [c[0].eps, c[1].eps, c[2].eps]
    }

    /// Level set `D(x,t) = |x - c(t)|^2 - r(t)^2`.
    pub fn level_set<T: Scalar>(&self, x: [T; 3], t: T) -> T {
        let d = ad::sub3(x, self.center(t));
        let r = self.radius(t);
        dot(d, d) - r * r
    }

    pub fn level_set_grad(&self, x: &Vec3, t: f64) -> Vec3 {
        vec3(gradient(|y| self.level_set(y, Dual::constant(t)), arr(x)))
    }

    pub fn level_set_dt(&self, x: &Vec3, t: f64) -> f64 {
        self.level_set(ad::lift(arr(x)), Dual::var(t)).eps
    }

    fn offset(&self, x: &Vec3, t: f64) -> Result<(Vec3, f64)> {
        let d = x - vec3(self.center(t));
        let n = d.norm();
        if n < 1e-14 {
            return Err(Error::AtCenter(arr(x)));
        }
        Ok((d, n))
    }

    pub fn signed_distance(&self, x: &Vec3, t: f64) -> Result<f64> {
        let (_, n) = self.offset(x, t)?;
        Ok(n - self.radius(t))
    }

    pub fn closest_point(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        let (d, n) = self.offset(x, t)?;
        Ok(vec3(self.center(t)) + d * (self.radius(t) / n))
    }

    /// Normal of the closest point, as a field on the ambient space.
    pub fn normal_ext<T: Scalar>(&self, x: [T; 3], t: T) -> [T; 3] {
        let d = ad::sub3(x, self.center(t));
        let inv = T::cst(1.0) / dot(d, d).sqrt();
        scal(inv, d)
    }

    /// Normal speed of the closest point, constant along normals.
    pub fn speed_ext<T: Scalar>(&self, x: [T; 3], t: T) -> T {
        let n = self.normal_ext(x, t);
        self.radius_dt(t) + dot(self.center_dt(t), n)
    }

    /// Velocity of the parametrisation `c(t) + r(t)/r(0) (x0 - c(0))`.
    pub fn mesh_velocity<T: Scalar>(&self, x: [T; 3], t: T) -> [T; 3] {
        let c = self.center(t);
        let rate = self.radius_dt(t) / self.radius(t);
        ad::add3(self.center_dt(t), scal(rate, ad::sub3(x, c)))
    }

    /// Exact position at time `t` of the node that started at `x0`.
    pub fn node_position(&self, x0: &Vec3, t: f64) -> Vec3 {
        let c0 = vec3(self.center(0.0));
        vec3(self.center(t)) + (x0 - c0) * (self.radius(t) / self.radius(0.0))
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        let t_end = self.final_time();
        if !(-1e-12..=t_end + 1e-12).contains(&t) {
            return Err(Error::TimeOutOfRange { t, t_end });
        }
        Ok(())
    }

    pub fn check_on_surface(&self, x: &Vec3, t: f64) -> Result<()> {
        let residual = self.level_set(arr(x), t).abs();
        if residual > ON_SURFACE_TOL {
            return Err(Error::NotOnSurface { point: arr(x), t, residual });
        }
        Ok(())
    }

    /// `(n, V)` from the level set: `n = grad D/|grad D|`, `V = -D_t/|grad D|`.
    pub fn normal_and_speed(&self, x: &Vec3, t: f64) -> Result<(Vec3, f64)> {
        self.check_on_surface(x, t)?;
        let g = self.level_set_grad(x, t);
        let gn = g.norm();
        if gn < 1e-14 {
            return Err(Error::AtCenter(arr(x)));
        }
        Ok((g / gn, -self.level_set_dt(x, t) / gn))
    }

    pub fn normal(&self, x: &Vec3, t: f64) -> Vec3 {
        vec3(self.normal_ext(arr(x), t))
    }

    pub fn projector(&self, x: &Vec3, t: f64) -> Mat3 {
        let n = self.normal(x, t);
        Mat3::identity() - n * n.transpose()
    }

    /// Weingarten map at the closest point of `x`; no surface check.
    pub fn weingarten_at(&self, x: &Vec3, t: f64) -> Mat3 {
        self.projector(x, t) / self.radius(t)
    }

    /// `(H, kappa)` with `H = P / r` and `kappa = 2 / r`.
    pub fn curvature(&self, x: &Vec3, t: f64) -> Result<(Mat3, f64)> {
        self.check_on_surface(x, t)?;
        let h = self.weingarten_at(x, t);
        Ok((h, h.trace()))
    }

    pub fn mean_curvature(&self, t: f64) -> f64 {
        2.0 / self.radius(t)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    /// The benchmark stream function and pressure of the surface kind.
    #[default]
    Benchmark,
    /// `u = V n`, `p = 0`.
    Zero,
}

/// Which momentum residual the forcing is manufactured for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcingForm {
    /// Full velocity with a normal multiplier.
    Full,
    /// Tangential velocity only, tangential forcing.
    Tangential,
}

/// Which multiplier the scheme approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierForm {
    Directional,
    Covariant,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactFields {
    pub u_t: Vec3,
    pub u: Vec3,
    pub p: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ExactSolution {
    pub surface: AnalyticSurface,
    pub kind: SolutionKind,
    pub mu: f64,
    pub rho: f64,
}

impl ExactSolution {
    pub fn new(surface: AnalyticSurface, kind: SolutionKind, mu: f64) -> Self {
        Self { surface, kind, mu, rho: 1.0 }
    }

    pub fn stream<T: Scalar>(&self, x: [T; 3], t: T) -> T {
        if self.kind == SolutionKind::Zero {
            return T::cst(0.0);
        }
        match self.surface.kind {
            SurfaceKind::OscillatingSphere => {
                let tau = 2.0 * std::f64::consts::PI;
                let c = (x[0].scale(tau)).cos() * (x[1].scale(tau)).cos() * (x[2].scale(tau)).cos();
                (T::cst(1.0) - t.scale(2.0)).scale(1.0 / tau) * c
            }
            _ => (x[0] - t.scale(0.2) * x[2]) * x[1] - t.scale(2.0),
        }
    }

    pub fn pressure_ext<T: Scalar>(&self, x: [T; 3], t: T) -> T {
        if self.kind == SolutionKind::Zero {
            return T::cst(0.0);
        }
        match self.surface.kind {
            SurfaceKind::OscillatingSphere => {
                let pi = std::f64::consts::PI;
                (x[0].scale(pi)).sin() * (x[1].scale(2.0 * pi)).sin() * (x[2].scale(2.0 * pi)).sin()
            }
            _ => (x[0] - t.scale(0.2)) * x[1] + x[2],
        }
    }

    /// `n x grad psi` extended off the surface.
    pub fn tangential_velocity_ext<T: Scalar>(&self, x: [T; 3], t: T) -> [T; 3] {
        let g = gradient(|y| self.stream(y, Dual::constant(t)), x);
        cross(self.surface.normal_ext(x, t), g)
    }

    pub fn velocity_ext<T: Scalar>(&self, x: [T; 3], t: T) -> [T; 3] {
        let n = self.surface.normal_ext(x, t);
        let v = self.surface.speed_ext(x, t);
        ad::axpy(v, n, self.tangential_velocity_ext(x, t))
    }

    fn field_ext<T: Scalar>(&self, x: [T; 3], t: T, form: ForcingForm) -> [T; 3] {
        match form {
            ForcingForm::Full => self.velocity_ext(x, t),
            ForcingForm::Tangential => self.tangential_velocity_ext(x, t),
        }
    }

    /// `P(x) (u - W)` extended off the surface.
    fn relative_tangential_ext<T: Scalar>(&self, x: [T; 3], t: T) -> [T; 3] {
        let n = self.surface.normal_ext(x, t);
        let w = ad::tangential(n, self.surface.mesh_velocity(x, t));
        ad::sub3(self.tangential_velocity_ext(x, t), w)
    }

    /// Symmetric covariant strain `1/2 P (J + J^T) P` of the extension.
    fn strain_ext<T: Scalar>(&self, x: [T; 3], t: T, form: ForcingForm) -> [[T; 3]; 3] {
        let j = jacobian(|y| self.field_ext(y, Dual::constant(t), form), x);
        let n = self.surface.normal_ext(x, t);
        let mut p = [[T::cst(0.0); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let id = if a == b { 1.0 } else { 0.0 };
                p[a][b] = T::cst(id) - n[a] * n[b];
            }
        }
        let mut s = [[T::cst(0.0); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                s[a][b] = (j[a][b] + j[b][a]).scale(0.5);
            }
        }
        let mut e = [[T::cst(0.0); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = T::cst(0.0);
                for c in 0..3 {
                    for d in 0..3 {
                        acc = acc + p[a][c] * s[c][d] * p[d][b];
                    }
                }
                e[a][b] = acc;
            }
        }
        e
    }

    pub fn fields(&self, x: &Vec3, t: f64) -> Result<ExactFields> {
        self.surface.check_on_surface(x, t)?;
        Ok(self.fields_at(x, t))
    }

    /// Fields at a surface point, unchecked.
    pub fn fields_at(&self, x: &Vec3, t: f64) -> ExactFields {
        let xa = arr(x);
        ExactFields {
            u_t: vec3(self.tangential_velocity_ext(xa, t)),
            u: vec3(self.velocity_ext(xa, t)),
            p: self.pressure_ext(xa, t),
        }
    }

    pub fn velocity(&self, x: &Vec3, t: f64, form: ForcingForm) -> Vec3 {
        vec3(self.field_ext(arr(x), t, form))
    }

    pub fn pressure(&self, x: &Vec3, t: f64) -> f64 {
        self.pressure_ext(arr(x), t)
    }

    /// Ambient gradient `d u_i / d x_j` of the extension.
    pub fn ambient_gradient(&self, x: &Vec3, t: f64, form: ForcingForm) -> Mat3 {
        mat3(jacobian(|y| self.field_ext(y, Dual::constant(t), form), arr(x)))
    }

    /// Tangential gradient `grad u P` at a surface point.
    pub fn surface_gradient(&self, x: &Vec3, t: f64, form: ForcingForm) -> Mat3 {
        self.ambient_gradient(x, t, form) * self.surface.projector(x, t)
    }

    pub fn divergence(&self, x: &Vec3, t: f64, form: ForcingForm) -> f64 {
        self.surface_gradient(x, t, form).trace()
    }

    /// Normal time derivative `u_t + grad u (V n)`.
    pub fn material_derivative(&self, x: &Vec3, t: f64, form: ForcingForm) -> Vec3 {
        let xa = arr(x);
        let y = self.field_ext(ad::lift(xa), Dual::var(t), form);
        let dt = Vec3::new(y[0].eps, y[1].eps, y[2].eps);
        let n = self.surface.normal(x, t);
        let v = self.surface.speed_ext(xa, t);
        dt + self.ambient_gradient(x, t, form) * (n * v)
    }

    /// `div_G E(u)`, row-wise surface divergence of the strain.
    pub fn strain_divergence(&self, x: &Vec3, t: f64, form: ForcingForm) -> Vec3 {
        let xa = arr(x);
        let p = self.surface.projector(x, t);
        let mut dk = [[[0.0; 3]; 3]; 3];
        for (k, dir) in AXES.iter().enumerate() {
            let e = self.strain_ext(ad::seed(xa, *dir), Dual::constant(t), form);
            for i in 0..3 {
                for j in 0..3 {
                    dk[k][i][j] = e[i][j].eps;
                }
            }
        }
        let mut out = Vec3::zeros();
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    acc += dk[k][i][j] * p[(k, j)];
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn pressure_gradient(&self, x: &Vec3, t: f64) -> Vec3 {
        let g = gradient(|y| self.pressure_ext(y, Dual::constant(t)), arr(x));
        self.surface.projector(x, t) * vec3(g)
    }

    pub fn forcing(&self, x: &Vec3, t: f64, form: ForcingForm) -> Vec3 {
        let u_t = self.velocity(x, t, ForcingForm::Tangential);
        let grad = self.surface_gradient(x, t, form);
        let inertia = self.material_derivative(x, t, form) + grad * u_t;
        let f = self.rho * inertia - 2.0 * self.mu * self.strain_divergence(x, t, form)
            + self.pressure_gradient(x, t);
        match form {
            ForcingForm::Full => f,
            ForcingForm::Tangential => self.surface.projector(x, t) * f,
        }
    }

    /// Checked variant of [`Self::forcing`] for the full residual.
    pub fn manufactured_forcing(&self, x: &Vec3, t: f64) -> Result<Vec3> {
        self.surface.check_on_surface(x, t)?;
        Ok(self.forcing(x, t, ForcingForm::Full))
    }

    /// Exact multiplier consistent with the zero-forcing-normal convention.
    pub fn multiplier(&self, x: &Vec3, t: f64, form: MultiplierForm) -> f64 {
        match form {
            MultiplierForm::Directional => 0.0,
            MultiplierForm::Covariant => {
                let n = self.surface.normal(x, t);
                let grad = self.surface_gradient(x, t, ForcingForm::Full);
                let z = vec3(self.relative_tangential_ext(arr(x), t));
                self.rho * n.dot(&(grad * z))
            }
        }
    }

    /// `kappa (u.n) - div u`, the data of `int u . grad q`.
    pub fn pressure_constraint(&self, x: &Vec3, t: f64, form: ForcingForm) -> f64 {
        let u = self.velocity(x, t, form);
        let n = self.surface.normal(x, t);
        let kappa = self.surface.mean_curvature(t);
        kappa * u.dot(&n) - self.divergence(x, t, form)
    }

    /// `div_G (u_T - W_T)`.
    pub fn relative_divergence(&self, x: &Vec3, t: f64) -> f64 {
        let j = mat3(jacobian(|y| self.relative_tangential_ext(y, Dual::constant(t)), arr(x)));
        (j * self.surface.projector(x, t)).trace()
    }

    pub fn normal_speed(&self, x: &Vec3, t: f64) -> f64 {
        self.surface.speed_ext(arr(x), t)
    }

    pub fn mesh_velocity(&self, x: &Vec3, t: f64) -> Vec3 {
        vec3(self.surface.mesh_velocity(arr(x), t))
    }
}
