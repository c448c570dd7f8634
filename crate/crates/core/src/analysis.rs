//! Error measures against the exact solution, convergence orders and
//! standing consistency checks.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_scalars, assemble_vector, LocalVector};
use crate::error::{Error, Result};
use crate::fespace::{velocity_at, DualNorm, Field, QuadContext, TaylorHoodSpace, VectorEval};
use crate::forms::{FormContext, MeshMotion};
use crate::geometry::{AnalyticSurface, ExactSolution, ForcingForm, MultiplierForm, Vec3};
use crate::mesh::{EvolvingSurfaceMesh, GeoPoint};
use crate::quadrature::quadrature;
use crate::sparse::{norm_inf, CsrMatrix};

/// Which normal quantity the normal error measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalError {
    /// `u_h . n_h - V`
    Discrete,
    /// `u_h . n~_h`, for tangential schemes.
    Improved,
}

/// What the discrete solution is compared with.
#[derive(Clone, Copy, Debug)]
pub struct ErrorTargets {
    pub velocity: ForcingForm,
    pub normal: NormalError,
    pub multiplier: Option<MultiplierForm>,
    /// The multiplier pairs with `-int p div v`, which shifts it by `kappa p`.
    pub multiplier_shift: bool,
}

/// Discrete values at one quadrature point.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteSample {
    pub u: VectorEval,
    pub p: f64,
    pub l: Option<f64>,
}

/// Spatial norms of one time level.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepErrors {
    pub t: f64,
    pub u_ah: f64,
    pub u_h1: f64,
    pub u_l2: f64,
    pub pu_l2: f64,
    pub n_l2: f64,
    pub div_l2: f64,
    pub p_l2: f64,
    pub l_l2: Option<f64>,
    pub l_hm1: Option<f64>,
}

struct PointExact {
    y: Vec3,
    u: Vec3,
    grad: crate::geometry::Mat3,
    p: f64,
    v: f64,
    n: Vec3,
}

fn exact_at(exact: &ExactSolution, targets: &ErrorTargets, x: &Vec3, t: f64) -> Result<PointExact> {
    let s = &exact.surface;
    let y = s.closest_point(x, t)?;
    Ok(PointExact {
        u: exact.velocity(&y, t, targets.velocity),
        grad: exact.surface_gradient(&y, t, targets.velocity),
        p: exact.pressure(&y, t),
        v: exact.normal_speed(&y, t),
        n: s.normal(&y, t),
        y,
    })
}

fn exact_multiplier(exact: &ExactSolution, targets: &ErrorTargets, y: &Vec3, t: f64, p: f64) -> Option<f64> {
    targets.multiplier.map(|form| {
        let l = exact.multiplier(y, t, form);
        if targets.multiplier_shift {
            l + exact.surface.mean_curvature(t) * p
        } else {
            l
        }
    })
}

/// Error norms at time `t` with discrete values supplied per point.
pub fn step_errors_with<F>(
    exact: &ExactSolution,
    targets: &ErrorTargets,
    mesh: &EvolvingSurfaceMesh,
    space: &TaylorHoodSpace,
    quad: &QuadContext,
    dual: Option<&DualNorm>,
    discrete: F,
) -> Result<StepErrors>
where
    F: Fn(usize, usize, &GeoPoint) -> DiscreteSample + Sync,
{
    let t = mesh.t;
    let ne = mesh.n_elements();
    let [ip_h, ip, area] = assemble_scalars(ne, |e| {
        let mut acc = [0.0; 3];
        for q in 0..quad.n_points() {
            let geo = quad.geo(mesh, e, q)?;
            let dx = quad.dx(&geo, q);
            let y = exact.surface.closest_point(&geo.x, t)?;
            acc[0] += dx * discrete(e, q, &geo).p;
            acc[1] += dx * exact.pressure(&y, t);
            acc[2] += dx;
        }
        Ok(acc)
    })?;
    let shift = (ip_h - ip) / area;
    let sums: [f64; 8] = assemble_scalars(ne, |e| {
        let mut acc = [0.0; 8];
        for q in 0..quad.n_points() {
            let geo = quad.geo(mesh, e, q)?;
            let dx = quad.dx(&geo, q);
            let ex = exact_at(exact, targets, &geo.x, t)?;
            let d = discrete(e, q, &geo);
            let ph = &geo.proj;
            let grad_e = ex.grad * ph;
            let cov_e = ph * grad_e;
            let du = ex.u - d.u.value;
            let normal = match targets.normal {
                NormalError::Discrete => d.u.value.dot(&geo.normal) - ex.v,
                NormalError::Improved => d.u.value.dot(&ex.n),
            };
            acc[0] += dx * (cov_e - d.u.cov).norm_squared();
            acc[1] += dx * (grad_e - d.u.grad).norm_squared();
            acc[2] += dx * du.norm_squared();
            acc[3] += dx * (ph * du).norm_squared();
            acc[4] += dx * normal * normal;
            acc[5] += dx * (grad_e.trace() - d.u.divergence()).powi(2);
            acc[6] += dx * (d.p - shift - ex.p).powi(2);
            if let (Some(lh), Some(l)) = (d.l, exact_multiplier(exact, targets, &ex.y, t, ex.p)) {
                acc[7] += dx * (lh - l).powi(2);
            }
        }
        Ok(acc)
    })?;
    let with_l = targets.multiplier.is_some() && dual.is_some();
    let l_hm1 = if with_l {
        let b = assemble_vector(ne, space.n_l(), |e| {
            let rows = space.multiplier.element(e).to_vec();
            let mut data = vec![0.0; rows.len()];
            for q in 0..quad.n_points() {
                let geo = quad.geo(mesh, e, q)?;
                let dx = quad.dx(&geo, q);
                let y = exact.surface.closest_point(&geo.x, t)?;
                let p = exact.pressure(&y, t);
                let d = discrete(e, q, &geo);
                let diff = exact_multiplier(exact, targets, &y, t, p).unwrap_or(0.0) - d.l.unwrap_or(0.0);
                for (k, xi) in quad.l.values[q].iter().enumerate() {
                    data[k] += dx * diff * xi;
                }
            }
            Ok(LocalVector { rows, data })
        })?;
        Some(dual.expect("checked").eval_load(&b)?)
    } else {
        None
    };
    Ok(StepErrors {
        t,
        u_ah: sums[0].sqrt(),
        u_h1: sums[1].sqrt(),
        u_l2: sums[2].sqrt(),
        pu_l2: sums[3].sqrt(),
        n_l2: sums[4].sqrt(),
        div_l2: sums[5].sqrt(),
        p_l2: sums[6].sqrt(),
        l_l2: with_l.then(|| sums[7].sqrt()),
        l_hm1,
    })
}

/// Error norms of finite element coefficients.
#[allow(clippy::too_many_arguments)]
pub fn step_errors(
    exact: &ExactSolution,
    targets: &ErrorTargets,
    mesh: &EvolvingSurfaceMesh,
    space: &TaylorHoodSpace,
    quad: &QuadContext,
    dual: Option<&DualNorm>,
    u: &[f64],
    p: &[f64],
    l: Option<&[f64]>,
) -> Result<StepErrors> {
    step_errors_with(exact, targets, mesh, space, quad, dual, |e, q, geo| {
        let grads = quad.grads(Field::Velocity, geo, q);
        let uv = velocity_at(u, space.velocity.element(e), &quad.u.values[q], &grads, &geo.proj);
        let ph: f64 = space.pressure.element(e).iter().zip(&quad.p.values[q]).map(|(n, v)| p[*n] * v).sum();
        let lh = l.map(|l| space.multiplier.element(e).iter().zip(&quad.l.values[q]).map(|(n, v)| l[*n] * v).sum());
        DiscreteSample { u: uv, p: ph, l: lh }
    })
}

/// Space-time error norms of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub level: usize,
    pub h: f64,
    pub dt: f64,
    pub n_u: usize,
    pub n_p: usize,
    pub n_l: usize,
    pub e_u_ah: f64,
    pub e_u_h1: f64,
    pub e_u_linf_l2: f64,
    pub e_pu_linf_l2: f64,
    pub e_n_linf_l2: f64,
    pub e_div_linf_l2: f64,
    pub e_p_l2l2: f64,
    pub e_l_l2l2: Option<f64>,
    pub e_l_hm1: Option<f64>,
    pub walltime_s: f64,
    pub steps: usize,
}

/// Accumulates time norms: `L2` in time over `n >= 1` by `dt * sum`, `Linf`
/// over all levels including `n = 0`.
#[derive(Clone, Debug)]
pub struct ErrorAccumulator {
    dt: f64,
    sq: [f64; 5],
    max: [f64; 4],
    has_l: bool,
    steps: usize,
}

impl ErrorAccumulator {
    pub fn new(dt: f64) -> Self {
        Self { dt, sq: [0.0; 5], max: [0.0; 4], has_l: false, steps: 0 }
    }

    pub fn add(&mut self, n: usize, e: &StepErrors) {
        if n >= 1 {
            self.sq[0] += self.dt * e.u_ah * e.u_ah;
            self.sq[1] += self.dt * e.u_h1 * e.u_h1;
            self.sq[2] += self.dt * e.p_l2 * e.p_l2;
            self.sq[3] += self.dt * e.l_l2.unwrap_or(0.0).powi(2);
            self.sq[4] += self.dt * e.l_hm1.unwrap_or(0.0).powi(2);
            self.steps += 1;
            self.has_l |= e.l_l2.is_some();
        }
        for (m, v) in self.max.iter_mut().zip([e.u_l2, e.pu_l2, e.n_l2, e.div_l2]) {
            *m = m.max(v);
        }
    }

    pub fn finish(&self, report: &mut ErrorReport) {
        report.dt = self.dt;
        report.e_u_ah = self.sq[0].sqrt();
        report.e_u_h1 = self.sq[1].sqrt();
        report.e_p_l2l2 = self.sq[2].sqrt();
        report.e_u_linf_l2 = self.max[0];
        report.e_pu_linf_l2 = self.max[1];
        report.e_n_linf_l2 = self.max[2];
        report.e_div_linf_l2 = self.max[3];
        report.e_l_l2l2 = self.has_l.then(|| self.sq[3].sqrt());
        report.e_l_hm1 = self.has_l.then(|| self.sq[4].sqrt());
        report.steps = self.steps;
    }
}

/// `rate_i = log(e_i / e_{i+1}) / log(h_i / h_{i+1})`.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != hs.len() || errors.len() < 2 {
        return Err(Error::Dimension(format!("eoc needs equal lengths >= 2, got {} and {}", errors.len(), hs.len())));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Dimension("eoc needs strictly decreasing h".into()));
    }
    Ok(errors.windows(2).zip(hs.windows(2)).map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect())
}

impl ErrorReport {
    pub fn columns(with_l: bool) -> Vec<&'static str> {
        let mut c = vec!["e_u_ah", "e_u_h1", "e_u_linf_l2", "e_Pu_linf_l2", "e_n_linf_l2", "e_div_linf_l2", "e_p_l2l2"];
        if with_l {
            c.extend(["e_l_l2l2", "e_l_hm1"]);
        }
        c
    }

    pub fn values(&self, with_l: bool) -> Vec<f64> {
        let mut v = vec![
            self.e_u_ah,
            self.e_u_h1,
            self.e_u_linf_l2,
            self.e_pu_linf_l2,
            self.e_n_linf_l2,
            self.e_div_linf_l2,
            self.e_p_l2l2,
        ];
        if with_l {
            v.extend([self.e_l_l2l2.unwrap_or(f64::NAN), self.e_l_hm1.unwrap_or(f64::NAN)]);
        }
        v
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        Self::columns(true).iter().position(|c| *c == column).map(|i| self.values(true)[i])
    }
}

/// Per-column rates between consecutive rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EocTable {
    pub columns: Vec<String>,
    /// `(level_coarse, level_fine, rates)`.
    pub rows: Vec<(usize, usize, Vec<f64>)>,
}

impl EocTable {
    pub fn from_reports(reports: &[ErrorReport]) -> Result<Self> {
        let with_l = reports.iter().all(|r| r.e_l_l2l2.is_some());
        let columns: Vec<String> = ErrorReport::columns(with_l).iter().map(|s| s.to_string()).collect();
        let hs: Vec<f64> = reports.iter().map(|r| r.h).collect();
        let mut rows = Vec::new();
        if reports.len() >= 2 {
            let per_col: Vec<Vec<f64>> = (0..columns.len())
                .map(|c| eoc(&reports.iter().map(|r| r.values(with_l)[c]).collect::<Vec<_>>(), &hs))
                .collect::<Result<_>>()?;
            for i in 0..reports.len() - 1 {
                rows.push((reports[i].level, reports[i + 1].level, per_col.iter().map(|c| c[i]).collect()));
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn rate(&self, column: &str, row: usize) -> Option<f64> {
        let c = self.columns.iter().position(|x| x == column)?;
        self.rows.get(row).map(|r| r.2[c])
    }

    pub fn last(&self, column: &str) -> Option<f64> {
        self.rows.len().checked_sub(1).and_then(|r| self.rate(column, r))
    }
}

/// Max-norm residual of `B u - g` over all constraint rows.
pub fn divergence_residual(blocks: &[(&CsrMatrix, &[f64])], u: &[f64]) -> f64 {
    blocks
        .iter()
        .map(|(b, g)| {
            let r: Vec<f64> = b.matvec(u).iter().zip(g.iter()).map(|(a, c)| a - c).collect();
            norm_inf(&r)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransportCheck {
    /// Central difference of `w^T M(t) v`.
    pub derivative: f64,
    /// `w^T G(t) v`.
    pub g_form: f64,
    pub residual: f64,
}

/// Compares `d/dt m_h(w, v)` for fixed coefficients with `g_h(w, v)`.
pub fn verify_transport(
    mesh0: &EvolvingSurfaceMesh,
    space: &TaylorHoodSpace,
    quad: &QuadContext,
    t: f64,
    w: &[f64],
    v: &[f64],
    delta: f64,
) -> Result<TransportCheck> {
    verify_transport_with(mesh0, space, quad, t, w, v, delta, 1.0)
}

/// As [`verify_transport`] with `G` scaled by `g_sign`, for mutation tests.
#[allow(clippy::too_many_arguments)]
pub fn verify_transport_with(
    mesh0: &EvolvingSurfaceMesh,
    space: &TaylorHoodSpace,
    quad: &QuadContext,
    t: f64,
    w: &[f64],
    v: &[f64],
    delta: f64,
    g_sign: f64,
) -> Result<TransportCheck> {
    let mass_at = |s: f64| -> Result<f64> {
        let m = mesh0.at_time(s)?;
        let motion = MeshMotion::zero(&m);
        FormContext::new(&m, space, quad, &motion).mass().map(|a| a.form(w, v))
    };
    let t_end = mesh0.surface.final_time();
    let (a, b) = ((t - delta).max(0.0), (t + delta).min(t_end));
    let derivative = (mass_at(b)? - mass_at(a)?) / (b - a);
    let m = mesh0.at_time(t)?;
    let motion = MeshMotion::of(&m);
    let g_form = g_sign * FormContext::new(&m, space, quad, &motion).g()?.form(w, v);
    Ok(TransportCheck { derivative, g_form, residual: (derivative - g_form).abs() })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryRow {
    pub level: usize,
    pub h: f64,
    pub normal_error: f64,
    pub area_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub k_g: usize,
    pub rows: Vec<GeometryRow>,
    pub normal_orders: Vec<f64>,
    pub area_orders: Vec<f64>,
}

/// Normal and area errors of the initial mesh per level, with observed orders.
pub fn geometry_convergence_report(surface: AnalyticSurface, k_g: usize, levels: &[usize]) -> Result<GeometryReport> {
    let rule = quadrature(2 * k_g + 4)?;
    // Gauss-type points superconverge for even k_g; include vertices and edge points
    let samples = crate::lagrange::reference_nodes(4);
    let r = surface.radius(0.0);
    let exact_area = 4.0 * std::f64::consts::PI * r * r;
    let mut rows = Vec::new();
    for &level in levels {
        let mesh = EvolvingSurfaceMesh::build_initial(surface, level, k_g)?;
        rows.push(GeometryRow {
            level,
            h: mesh.h_max(),
            normal_error: mesh.normal_error(&rule)?.max(mesh.normal_error_at(&samples)?),
            area_error: (mesh.area(&rule)? - exact_area).abs(),
        });
    }
    let (normal_orders, area_orders) = if rows.len() >= 2 {
        let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
        (
            eoc(&rows.iter().map(|r| r.normal_error).collect::<Vec<_>>(), &hs)?,
            eoc(&rows.iter().map(|r| r.area_error).collect::<Vec<_>>(), &hs)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(GeometryReport { k_g, rows, normal_orders, area_orders })
}
