//! Saddle-point systems, the backward Euler steppers, the Leray
//! time-projection and the Ritz–Stokes projections.

use std::time::Instant;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    divergence_residual, step_errors, ErrorAccumulator, ErrorReport, ErrorTargets, NormalError, StepErrors,
};
use crate::assembly::{assemble_vector, vector_dofs, LocalVector};
use crate::config::{InitialCondition, RunConfig, Scheme, SolverSettings};
use crate::error::{Error, Result};
use crate::fespace::{node_positions, scalar_gram, zero_mean_constraint, DualNorm, Field, FeFunction, QuadContext, TaylorHoodSpace};
use crate::forms::{strain_basis, ConstraintForm, ConvectionData, FormContext, MeshMotion};
use crate::geometry::{AnalyticSurface, ExactSolution, ForcingForm, MultiplierForm, Vec3};
use crate::mesh::EvolvingSurfaceMesh;
use crate::quadrature::quadrature;
use crate::sparse::{norm_inf, CsrMatrix, LuSolver, Triplets};

/// `[[A, Bp^T, Bl^T, m^T], [Bp, 0, 0, 0], [Bl, 0, 0, 0], [m, 0, 0, 0]]`, with
/// the multiplier and mean blocks optional.
#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub n_u: usize,
    pub n_p: usize,
    pub n_l: usize,
    pub mean: bool,
}

impl SaddleSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: &CsrMatrix,
        bp: Option<&CsrMatrix>,
        bl: Option<&CsrMatrix>,
        mean: Option<&[f64]>,
        f: &[f64],
        gp: Option<&[f64]>,
        gl: Option<&[f64]>,
    ) -> Result<Self> {
        let n_u = a.nrows;
        if a.ncols != n_u || f.len() != n_u {
            return Err(Error::Dimension(format!("A is {}x{}, rhs {}", a.nrows, a.ncols, f.len())));
        }
        let n_p = bp.map_or(0, |b| b.nrows);
        let n_l = bl.map_or(0, |b| b.nrows);
        for b in bp.iter().chain(bl.iter()) {
            if b.ncols != n_u {
                return Err(Error::Dimension(format!("constraint block has {} columns, expected {n_u}", b.ncols)));
            }
        }
        if let Some(m) = mean {
            if m.len() != n_p {
                return Err(Error::Dimension(format!("mean row has {} entries, expected {n_p}", m.len())));
            }
        }
        let n = n_u + n_p + n_l + usize::from(mean.is_some());
        let mut t = Triplets::new(n, n);
        t.push_block(a, 0, 0, 1.0);
        if let Some(b) = bp {
            t.push_block(b, n_u, 0, 1.0);
            t.push_block(&b.transpose(), 0, n_u, 1.0);
        }
        if let Some(b) = bl {
            t.push_block(b, n_u + n_p, 0, 1.0);
            t.push_block(&b.transpose(), 0, n_u + n_p, 1.0);
        }
        if let Some(m) = mean {
            let r = n - 1;
            for (j, v) in m.iter().enumerate() {
                t.push(r, n_u + j, *v);
                t.push(n_u + j, r, *v);
            }
        }
        let mut rhs = f.to_vec();
        let pad = |g: Option<&[f64]>, k: usize, rhs: &mut Vec<f64>| -> Result<()> {
            match g {
                Some(g) if g.len() == k => rhs.extend_from_slice(g),
                Some(g) => return Err(Error::Dimension(format!("constraint rhs {} vs {k}", g.len()))),
                None => rhs.extend(std::iter::repeat_n(0.0, k)),
            }
            Ok(())
        };
        pad(gp, n_p, &mut rhs)?;
        pad(gl, n_l, &mut rhs)?;
        if mean.is_some() {
            rhs.push(0.0);
        }
        Ok(Self { matrix: t.to_csr(), rhs, n_u, n_p, n_l, mean: mean.is_some() })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub x: Vec<f64>,
    /// `|b - K x|_inf / |b|_inf`.
    pub residual: f64,
    n_u: usize,
    n_p: usize,
    n_l: usize,
}

impl SaddleSolution {
    pub fn u(&self) -> &[f64] {
        &self.x[..self.n_u]
    }

    pub fn p(&self) -> &[f64] {
        &self.x[self.n_u..self.n_u + self.n_p]
    }

    pub fn l(&self) -> &[f64] {
        &self.x[self.n_u + self.n_p..self.n_u + self.n_p + self.n_l]
    }
}

fn relative_residual(k: &CsrMatrix, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let r: Vec<f64> = k.matvec(x).iter().zip(b).map(|(kx, b)| b - kx).collect();
    let nb = norm_inf(b);
    let nr = norm_inf(&r);
    let rel = if nb > 0.0 { nr / nb } else { nr };
    (r, rel)
}

/// Sparse LU with iterative refinement.
pub fn solve_saddle(sys: &SaddleSystem, settings: &SolverSettings) -> Result<SaddleSolution> {
    let lu = LuSolver::factor(&sys.matrix)?;
    let mut x = lu.solve(&sys.rhs)?;
    let (mut r, mut rel) = relative_residual(&sys.matrix, &x, &sys.rhs);
    for _ in 0..settings.refinement_steps {
        if rel <= settings.residual_tol {
            break;
        }
        let dx = lu.solve(&r)?;
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
        (r, rel) = relative_residual(&sys.matrix, &x, &sys.rhs);
    }
    if !rel.is_finite() || rel > 1e-6 {
        return Err(Error::Solver(format!("relative residual {rel:.3e} after refinement (system of size {})", sys.dim())));
    }
    if rel > settings.residual_tol {
        warn!("relative residual {rel:.3e} above tolerance {:.1e}", settings.residual_tol);
    }
    Ok(SaddleSolution { x, residual: rel, n_u: sys.n_u, n_p: sys.n_p, n_l: sys.n_l })
}

/// Nodal data of one time level.
#[derive(Clone, Debug)]
pub struct StepData {
    /// Forcing on the velocity layout.
    pub forcing: Vec<f64>,
    /// Pressure constraint data on the pressure layout.
    pub g_p: Vec<f64>,
    /// Normal speed on the multiplier layout (empty without multiplier).
    pub g_l: Vec<f64>,
    /// `div_G(u_T - W_T)` on the velocity layout.
    pub sigma: Vec<f64>,
    /// Normal speed on the velocity layout.
    pub speed: Vec<f64>,
}

/// Mesh-dependent operators of one snapshot.
pub struct Operators {
    /// `M` (multiplier schemes) or the projected mass (penalty scheme).
    pub mass: CsrMatrix,
    /// `G` or its projected variant.
    pub g: CsrMatrix,
    /// `2 mu A_S` or the penalty-scheme operator.
    pub visc: CsrMatrix,
    pub bp: CsrMatrix,
    pub bl: Option<CsrMatrix>,
    pub mean: Vec<f64>,
    pub mass_p: CsrMatrix,
    pub mass_l: Option<CsrMatrix>,
}

pub struct Snapshot {
    pub mesh: EvolvingSurfaceMesh,
    pub motion: MeshMotion,
    pub ops: Operators,
}

#[derive(Clone, Debug)]
pub struct StepState {
    pub step: usize,
    pub t: f64,
    pub u: FeFunction,
    pub p: FeFunction,
    pub l: Option<FeFunction>,
    pub residual: f64,
    pub constraint_residual: f64,
}

impl StepState {
    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.p.is_finite() && self.l.as_ref().is_none_or(|l| l.is_finite())
    }
}

#[derive(Clone, Debug)]
pub struct LerayProjection {
    pub w_hat: Vec<f64>,
    pub p: Vec<f64>,
    pub l: Vec<f64>,
    pub residual: f64,
    pub constraint_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RitzVariant {
    /// Right-hand side `a(u, v^l)`.
    Modified,
    /// Adds `b^L(v^l, {p, lambda})`.
    Standard,
}

/// A configured discretisation of one benchmark run.
pub struct Problem {
    pub config: RunConfig,
    pub exact: ExactSolution,
    pub mesh0: EvolvingSurfaceMesh,
    pub space: TaylorHoodSpace,
    pub quad: QuadContext,
    pub h: f64,
    pub tau: f64,
}

impl Problem {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let surface = AnalyticSurface::new(config.benchmark);
        let mesh0 = EvolvingSurfaceMesh::build_initial(surface, config.level, config.k_g)?;
        let space = TaylorHoodSpace::new(&mesh0.topology, config.k_u, config.k_pr, config.k_lambda, config.k_g)?;
        let quad = QuadContext::new(&mesh0, &space, quadrature(config.quad_degree())?);
        let mut exact = ExactSolution::new(surface, config.solution, config.mu);
        exact.rho = config.rho;
        let h = mesh0.h_max();
        Ok(Self { config: config.clone(), exact, h, tau: config.tau.eval(h), mesh0, space, quad })
    }

    pub fn scheme(&self) -> Scheme {
        self.config.scheme
    }

    fn forcing_form(&self) -> ForcingForm {
        match self.scheme() {
            Scheme::Pm => ForcingForm::Tangential,
            _ => ForcingForm::Full,
        }
    }

    pub fn multiplier_form(&self) -> Option<MultiplierForm> {
        match self.scheme() {
            Scheme::LmmDir => Some(MultiplierForm::Directional),
            Scheme::LmmCov => Some(MultiplierForm::Covariant),
            Scheme::Pm => None,
        }
    }

    pub fn targets(&self) -> ErrorTargets {
        ErrorTargets {
            velocity: self.forcing_form(),
            normal: if self.scheme() == Scheme::Pm { NormalError::Improved } else { NormalError::Discrete },
            multiplier: self.multiplier_form().filter(|_| self.config.multiplier_errors),
            multiplier_shift: self.config.constraint_form == ConstraintForm::Ibp,
        }
    }

    fn form_context<'a>(&'a self, snap: &'a Snapshot) -> FormContext<'a> {
        FormContext::new(&snap.mesh, &self.space, &self.quad, &snap.motion)
    }

    pub fn snapshot(&self, t: f64) -> Result<Snapshot> {
        let mesh = self.mesh0.at_time(t)?;
        let motion = MeshMotion::of(&mesh);
        let ctx = FormContext::new(&mesh, &self.space, &self.quad, &motion);
        let pm = self.scheme() == Scheme::Pm;
        let (mass, g, visc) = if pm {
            (ctx.projected_mass()?, ctx.g_projected()?, ctx.penalty_form(self.config.mu, self.tau)?)
        } else {
            let a = ctx.strain()?;
            (ctx.mass()?, ctx.g()?, CsrMatrix::linear_combination(&[(2.0 * self.config.mu, &a)]))
        };
        let bp = ctx.b_pressure(self.config.constraint_form)?;
        let bl = if pm { None } else { Some(ctx.b_multiplier()?) };
        let mean = zero_mean_constraint(&self.space, &mesh, &self.quad)?;
        let (mass_p, _) = scalar_gram(&mesh, &self.space.pressure, &self.quad, Field::Pressure)?;
        let mass_l = if pm { None } else { Some(scalar_gram(&mesh, &self.space.multiplier, &self.quad, Field::Multiplier)?.0) };
        let ops = Operators { mass, g, visc, bp, bl, mean, mass_p, mass_l };
        Ok(Snapshot { mesh, motion, ops })
    }

    /// Exact data evaluated at the closest points of the finite element nodes.
    pub fn step_data(&self, mesh: &EvolvingSurfaceMesh) -> Result<StepData> {
        let t = mesh.t;
        let ex = &self.exact;
        let s = ex.surface;
        let form = self.forcing_form();
        let project = |pos: Vec<Vec3>| -> Result<Vec<Vec3>> { pos.par_iter().map(|x| s.closest_point(x, t)).collect() };
        let yu = project(node_positions(mesh, &self.space.velocity)?)?;
        let yp = project(node_positions(mesh, &self.space.pressure)?)?;
        let forcing: Vec<f64> = yu.par_iter().flat_map_iter(|y| { let f = ex.forcing(y, t, form); [f[0], f[1], f[2]] }).collect();
        let sigma: Vec<f64> = yu.par_iter().map(|y| ex.relative_divergence(y, t)).collect();
        let speed: Vec<f64> = yu.par_iter().map(|y| ex.normal_speed(y, t)).collect();
        let g_p: Vec<f64> = match self.config.constraint_form {
            ConstraintForm::Strong => yp.par_iter().map(|y| ex.pressure_constraint(y, t, form)).collect(),
            ConstraintForm::Ibp => yp.par_iter().map(|y| -ex.divergence(y, t, form)).collect(),
        };
        let g_l = if self.scheme().has_multiplier() {
            project(node_positions(mesh, &self.space.multiplier)?)?.par_iter().map(|y| ex.normal_speed(y, t)).collect()
        } else {
            Vec::new()
        };
        Ok(StepData { forcing, g_p, g_l, sigma, speed })
    }

    fn constraint_rhs(&self, snap: &Snapshot, data: &StepData) -> (Vec<f64>, Option<Vec<f64>>) {
        let gp = snap.ops.mass_p.matvec(&data.g_p);
        let gl = snap.ops.mass_l.as_ref().map(|m| m.matvec(&data.g_l));
        (gp, gl)
    }

    /// One backward Euler step from `prev` on `prev_snap` to `snap`.
    pub fn step(&self, prev: &StepState, prev_snap: &Snapshot, snap: &Snapshot, data: &StepData, n: usize) -> Result<StepState> {
        let dt = self.config.time_step();
        let rho = self.config.rho;
        let ctx = self.form_context(snap);
        let ops = &snap.ops;
        let conv_data = ConvectionData {
            lift: prev.u.coeffs.clone(),
            sigma: data.sigma.clone(),
            normal_speed: (self.scheme() == Scheme::LmmCov).then(|| data.speed.clone()),
            relative: true,
        };
        let conv = match self.scheme() {
            Scheme::LmmDir => ctx.convective_dir(&conv_data)?,
            Scheme::LmmCov | Scheme::Pm => ctx.convective_cov(&conv_data)?,
        };
        let a = CsrMatrix::linear_combination(&[(rho / dt, &ops.mass), (-rho, &ops.g), (1.0, &ops.visc), (rho, &conv)]);
        let mut f = ops.mass.matvec(&data.forcing);
        let carried = prev_snap.ops.mass.matvec(&prev.u.coeffs);
        f.iter_mut().zip(&carried).for_each(|(a, b)| *a += rho / dt * b);
        if self.scheme() == Scheme::LmmCov {
            let w = ctx.weingarten_motion_load(&data.speed)?;
            f.iter_mut().zip(&w).for_each(|(a, b)| *a += rho * b);
        }
        let (gp, gl) = self.constraint_rhs(snap, data);
        let sys = SaddleSystem::new(&a, Some(&ops.bp), ops.bl.as_ref(), Some(&ops.mean), &f, Some(&gp), gl.as_deref())?;
        let sol = solve_saddle(&sys, &self.config.solver)?;
        self.state_from(n, snap, &sol, &gp, gl.as_deref())
    }

    fn state_from(&self, n: usize, snap: &Snapshot, sol: &SaddleSolution, gp: &[f64], gl: Option<&[f64]>) -> Result<StepState> {
        let u = sol.u().to_vec();
        let mut blocks: Vec<(&CsrMatrix, &[f64])> = vec![(&snap.ops.bp, gp)];
        if let (Some(bl), Some(gl)) = (snap.ops.bl.as_ref(), gl) {
            blocks.push((bl, gl));
        }
        let state = StepState {
            step: n,
            t: snap.mesh.t,
            constraint_residual: divergence_residual(&blocks, &u),
            u: FeFunction { field: Field::Velocity, coeffs: u },
            p: FeFunction { field: Field::Pressure, coeffs: sol.p().to_vec() },
            l: snap.ops.bl.as_ref().map(|_| FeFunction { field: Field::Multiplier, coeffs: sol.l().to_vec() }),
            residual: sol.residual,
        };
        if !state.is_finite() {
            return Err(Error::NonFinite { step: n });
        }
        Ok(state)
    }

    /// Projects `w` from `prev` onto the discretely divergence-free space of `next`.
    pub fn leray_time_projection(&self, w: &[f64], prev: &Snapshot, next: &Snapshot) -> Result<LerayProjection> {
        let ctx = self.form_context(next);
        let m = ctx.mass()?;
        let m_prev = self.form_context(prev).mass()?;
        let f = m_prev.matvec(w);
        let bp = ctx.b_pressure(ConstraintForm::Strong)?;
        let bl = ctx.b_multiplier()?;
        let sys = SaddleSystem::new(&m, Some(&bp), Some(&bl), Some(&next.ops.mean), &f, None, None)?;
        let sol = solve_saddle(&sys, &self.config.solver)?;
        let w_hat = sol.u().to_vec();
        let zp = vec![0.0; bp.nrows];
        let zl = vec![0.0; bl.nrows];
        let constraint_residual = divergence_residual(&[(&bp, &zp), (&bl, &zl)], &w_hat);
        Ok(LerayProjection { p: sol.p().to_vec(), l: sol.l().to_vec(), w_hat, residual: sol.residual, constraint_residual })
    }

    /// Energy operator of the projection: `a_h` for multiplier schemes, the
    /// tangential strain, projected mass and normal penalty for the penalty scheme.
    fn ritz_operator(&self, ctx: &FormContext) -> Result<CsrMatrix> {
        if self.scheme() == Scheme::Pm {
            let s = ctx.tangential_strain()?;
            let m = ctx.projected_mass()?;
            let p = ctx.normal_penalty()?;
            Ok(CsrMatrix::linear_combination(&[(1.0, &s), (1.0, &m), (self.tau, &p)]))
        } else {
            Ok(CsrMatrix::linear_combination(&[(1.0, &ctx.strain()?), (1.0, &ctx.mass()?)]))
        }
    }

    /// `a(u, v^l)` (plus `b^L(v^l, {p, lambda})` for the standard variant),
    /// integrated on the discrete surface with exact fields at the closest
    /// points and the sphere's area ratio `(r/|x-c|)^2 |n . n_h|`.
    fn ritz_load(&self, snap: &Snapshot, variant: RitzVariant) -> Result<Vec<f64>> {
        let mesh = &snap.mesh;
        let t = mesh.t;
        let ex = &self.exact;
        let s = ex.surface;
        let form = self.forcing_form();
        let pm = self.scheme() == Scheme::Pm;
        let quad = &self.quad;
        let (c, r) = (crate::geometry::vec3(s.center(t)), s.radius(t));
        assemble_vector(mesh.n_elements(), self.space.n_u(), |e| {
            let rows = vector_dofs(self.space.velocity.element(e));
            let mut data = vec![0.0; rows.len()];
            for q in 0..quad.n_points() {
                let geo = quad.geo(mesh, e, q)?;
                let y = s.closest_point(&geo.x, t)?;
                let n = s.normal(&y, t);
                let ratio = (r / (geo.x - c).norm()).powi(2) * n.dot(&geo.normal).abs();
                let dx = quad.dx(&geo, q) * ratio;
                let u = ex.velocity(&y, t, form);
                let pn = s.projector(&y, t);
                let cov = pn * ex.surface_gradient(&y, t, form);
                let eu = 0.5 * (cov + cov.transpose());
                let grads = quad.grads(Field::Velocity, &geo, q);
                let phi = &quad.u.values[q];
                let tangential = pm.then_some((&geo.normal, &geo.weingarten));
                let eps = strain_basis(&grads, &geo.proj, tangential, phi);
                let (gp, lam) = match variant {
                    RitzVariant::Modified => (Vec3::zeros(), 0.0),
                    RitzVariant::Standard => {
                        // the multiplier datum is taken as zero; only the shift of the
                        // integrated-by-parts constraint remains
                        let p = ex.pressure(&y, t);
                        let lam = if self.config.constraint_form == ConstraintForm::Ibp && !pm { s.mean_curvature(t) * p } else { 0.0 };
                        (ex.pressure_gradient(&y, t), lam)
                    }
                };
                let load = u + gp + n * lam;
                let load = if pm { geo.proj * load } else { load };
                for i in 0..phi.len() {
                    for a in 0..3 {
                        data[3 * i + a] += dx * (eu.component_mul(&eps[3 * i + a]).sum() + phi[i] * load[a]);
                    }
                }
            }
            Ok(LocalVector { rows, data })
        })
    }

    fn ritz_system(&self, snap: &Snapshot, a: &CsrMatrix, f: &[f64], gp: &[f64], gl: Option<&[f64]>) -> Result<StepState> {
        let ops = &snap.ops;
        let sys = SaddleSystem::new(a, Some(&ops.bp), ops.bl.as_ref(), Some(&ops.mean), f, Some(gp), gl)?;
        let sol = solve_saddle(&sys, &self.config.solver)?;
        self.state_from(0, snap, &sol, gp, gl)
    }

    /// Ritz–Stokes projection of the exact velocity at the snapshot time, with
    /// the constraint data of the time stepper.
    pub fn ritz_stokes(&self, snap: &Snapshot, data: &StepData, variant: RitzVariant) -> Result<StepState> {
        let a = self.ritz_operator(&self.form_context(snap))?;
        let f = self.ritz_load(snap, variant)?;
        let (gp, gl) = self.constraint_rhs(snap, data);
        self.ritz_system(snap, &a, &f, &gp, gl.as_deref())
    }

    /// Galerkin variant with `a_h(u, v)` on the right: returns `u` itself.
    pub fn ritz_stokes_discrete(&self, snap: &Snapshot, u: &[f64]) -> Result<StepState> {
        let a = self.ritz_operator(&self.form_context(snap))?;
        let f = a.matvec(u);
        let gp = snap.ops.bp.matvec(u);
        let gl = snap.ops.bl.as_ref().map(|b| b.matvec(u));
        self.ritz_system(snap, &a, &f, &gp, gl.as_deref())
    }

    pub fn initial_state(&self, snap: &Snapshot, data: &StepData) -> Result<StepState> {
        match self.config.initial_condition {
            InitialCondition::RitzStokes => self.ritz_stokes(snap, data, RitzVariant::Modified),
            InitialCondition::RitzB => {
                info!("ritz_b initial condition: multiplier datum lambda(0) taken as 0");
                self.ritz_stokes(snap, data, RitzVariant::Standard)
            }
            InitialCondition::Interpolant => {
                let t = snap.mesh.t;
                let s = self.exact.surface;
                let form = self.forcing_form();
                let u = self.space.interpolate_velocity(&snap.mesh, |x| {
                    s.closest_point(x, t).map(|y| self.exact.velocity(&y, t, form)).unwrap_or_else(|_| Vec3::repeat(f64::NAN))
                })?;
                if !u.is_finite() {
                    return Err(Error::NonFinite { step: 0 });
                }
                Ok(StepState {
                    step: 0,
                    t,
                    u,
                    p: FeFunction::zeros(&self.space, Field::Pressure),
                    l: self.scheme().has_multiplier().then(|| FeFunction::zeros(&self.space, Field::Multiplier)),
                    residual: 0.0,
                    constraint_residual: f64::NAN,
                })
            }
        }
    }

    pub fn errors(&self, state: &StepState, snap: &Snapshot) -> Result<StepErrors> {
        let targets = self.targets();
        let dual = match targets.multiplier {
            Some(_) => Some(DualNorm::new(&snap.mesh, &self.space, &self.quad)?),
            None => None,
        };
        step_errors(
            &self.exact,
            &targets,
            &snap.mesh,
            &self.space,
            &self.quad,
            dual.as_ref(),
            &state.u.coeffs,
            &state.p.coeffs,
            state.l.as_ref().map(|l| l.coeffs.as_slice()),
        )
    }
}

/// Per-step diagnostics of a run.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub residual: f64,
    pub constraint_residual: f64,
    /// `u^T M u` with the scheme's mass matrix.
    pub kinetic: f64,
    /// `u^T A u` with the scheme's viscous operator.
    pub dissipation: f64,
    pub errors: StepErrors,
}

pub struct SimulationResult {
    pub report: ErrorReport,
    pub records: Vec<StepRecord>,
    pub final_state: StepState,
}

pub fn run_simulation(config: &RunConfig) -> Result<SimulationResult> {
    run_simulation_with(config, &mut |_, _, _| Ok(()))
}

/// Runs to the final time, calling `observer` after the initial projection and
/// after every step.
pub fn run_simulation_with(
    config: &RunConfig,
    observer: &mut dyn FnMut(&Problem, &StepState, &Snapshot) -> Result<()>,
) -> Result<SimulationResult> {
    let start = Instant::now();
    config.log_warnings();
    let problem = Problem::new(config)?;
    let dt = config.time_step();
    let n_steps = config.n_steps();
    let t_limit = problem.mesh0.surface.final_time();
    info!(
        "{} {} level {} (h = {:.4}, dt = {dt:.3e}, {n_steps} steps, N_u = {}, N_p = {}, N_l = {})",
        config.benchmark.name(),
        config.scheme.name(),
        config.level,
        problem.h,
        problem.space.n_u(),
        problem.space.n_p(),
        if config.scheme.has_multiplier() { problem.space.n_l() } else { 0 }
    );
    let mut acc = ErrorAccumulator::new(dt);
    let mut records = Vec::with_capacity(n_steps + 1);
    let mut snap = problem.snapshot(0.0)?;
    let data = problem.step_data(&snap.mesh)?;
    let mut state = problem.initial_state(&snap, &data).map_err(|e| Error::Step { step: 0, source: Box::new(e) })?;
    let record = |state: &StepState, snap: &Snapshot, acc: &mut ErrorAccumulator| -> Result<StepRecord> {
        let errors = problem.errors(state, snap)?;
        acc.add(state.step, &errors);
        Ok(StepRecord {
            step: state.step,
            t: state.t,
            residual: state.residual,
            constraint_residual: state.constraint_residual,
            kinetic: snap.ops.mass.form(&state.u.coeffs, &state.u.coeffs),
            dissipation: snap.ops.visc.form(&state.u.coeffs, &state.u.coeffs),
            errors,
        })
    };
    records.push(record(&state, &snap, &mut acc)?);
    observer(&problem, &state, &snap)?;
    for n in 1..=n_steps {
        let t = (n as f64 * dt).min(t_limit);
        let next = problem.snapshot(t)?;
        let max_res = next.mesh.max_node_residual();
        if max_res > 1e-10 {
            return Err(Error::Step { step: n, source: Box::new(Error::NotOnSurface { point: [f64::NAN; 3], t, residual: max_res }) });
        }
        let data = problem.step_data(&next.mesh)?;
        state = problem.step(&state, &snap, &next, &data, n).map_err(|e| Error::Step { step: n, source: Box::new(e) })?;
        snap = next;
        let rec = record(&state, &snap, &mut acc)?;
        debug!("step {n} t = {t:.4} residual {:.2e} e_u_l2 {:.3e}", rec.residual, rec.errors.u_l2);
        records.push(rec);
        observer(&problem, &state, &snap)?;
    }
    let mut report = ErrorReport {
        level: config.level,
        h: problem.h,
        n_u: problem.space.n_u(),
        n_p: problem.space.n_p(),
        n_l: if config.scheme.has_multiplier() { problem.space.n_l() } else { 0 },
        ..Default::default()
    };
    acc.finish(&mut report);
    report.walltime_s = start.elapsed().as_secs_f64();
    Ok(SimulationResult { report, records, final_state: state })
}

/// Runs `base` at each level; levels must be contiguous and increasing.
pub fn run_sweep(base: &RunConfig, levels: &[usize]) -> Result<Vec<ErrorReport>> {
    if levels.is_empty() || levels.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::Config(format!("levels {levels:?} must be non-empty, contiguous and increasing")));
    }
    levels
        .iter()
        .map(|&level| {
            let config = RunConfig { level, ..base.clone() };
            run_simulation(&config).map(|r| r.report)
        })
        .collect()
}
