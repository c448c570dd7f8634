//! CSV, JSON and VTU writers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{EocTable, ErrorReport};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::fespace::{eval_scalar, eval_velocity, FeFunction, TaylorHoodSpace};
use crate::mesh::EvolvingSurfaceMesh;
use crate::solver::StepRecord;

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

/// Column names of the sweep CSV.
pub fn sweep_header(with_l: bool) -> Vec<String> {
    let mut h: Vec<String> = ["level", "h", "dt", "N_u", "N_p", "N_l"].iter().map(|s| s.to_string()).collect();
    h.extend(ErrorReport::columns(with_l).iter().map(|s| s.to_string()));
    h.push("walltime_s".into());
    h
}

/// One row per refinement level.
pub fn write_sweep_csv(path: &Path, reports: &[ErrorReport]) -> Result<()> {
    ensure_parent(path)?;
    let with_l = reports.iter().all(|r| r.e_l_l2l2.is_some());
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(sweep_header(with_l)).map_err(csv_error)?;
    for r in reports {
        let mut row = vec![r.level.to_string(), fmt(r.h), fmt(r.dt), r.n_u.to_string(), r.n_p.to_string(), r.n_l.to_string()];
        row.extend(r.values(with_l).into_iter().map(fmt));
        row.push(format!("{:.3}", r.walltime_s));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Rates between consecutive levels, with the same error columns.
pub fn write_eoc_csv(path: &Path, table: &EocTable) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    let mut header = vec!["level_coarse".to_string(), "level_fine".to_string()];
    header.extend(table.columns.iter().cloned());
    w.write_record(&header).map_err(csv_error)?;
    for (a, b, rates) in &table.rows {
        let mut row = vec![a.to_string(), b.to_string()];
        row.extend(rates.iter().map(|r| format!("{r:.4}")));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step diagnostics of one run.
pub fn write_steps_csv(path: &Path, records: &[StepRecord]) -> Result<()> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record([
        "step", "t", "residual", "constraint_residual", "kinetic", "dissipation", "e_u_ah", "e_u_h1", "e_u_l2", "e_Pu_l2",
        "e_n_l2", "e_div_l2", "e_p_l2", "e_l_l2", "e_l_hm1",
    ])
    .map_err(csv_error)?;
    for r in records {
        let e = &r.errors;
        let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        w.write_record([
            r.step.to_string(),
            fmt(r.t),
            fmt(r.residual),
            fmt(r.constraint_residual),
            fmt(r.kinetic),
            fmt(r.dissipation),
            fmt(e.u_ah),
            fmt(e.u_h1),
            fmt(e.u_l2),
            fmt(e.pu_l2),
            fmt(e.n_l2),
            fmt(e.div_l2),
            fmt(e.p_l2),
            opt(e.l_l2),
            opt(e.l_hm1),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub tau: Option<f64>,
    pub warnings: Vec<String>,
    pub report: ErrorReport,
    pub max_residual: f64,
    pub max_constraint_residual: f64,
}

impl RunSummary {
    pub fn new(config: &RunConfig, tau: Option<f64>, report: &ErrorReport, records: &[StepRecord]) -> Self {
        let max = |f: fn(&StepRecord) -> f64| records.iter().map(f).filter(|v| v.is_finite()).fold(0.0, f64::max);
        Self {
            config: config.clone(),
            tau,
            warnings: config.warnings(),
            report: report.clone(),
            max_residual: max(|r| r.residual),
            max_constraint_residual: max(|r| r.constraint_residual),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        ensure_parent(path)?;
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Equispaced reference lattice of order `k` and its `k^2` sub-triangles.
fn lattice(k: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let mut pts = Vec::new();
    let mut id = vec![vec![usize::MAX; k + 1]; k + 1];
    for j in 0..=k {
        for i in 0..=k - j {
            id[i][j] = pts.len();
            pts.push([i as f64 / k as f64, j as f64 / k as f64]);
        }
    }
    let mut tris = Vec::new();
    for j in 0..k {
        for i in 0..k - j {
            tris.push([id[i][j], id[i + 1][j], id[i][j + 1]]);
            if i + j + 1 < k {
                tris.push([id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]]);
            }
        }
    }
    (pts, tris)
}

/// Writes an XML unstructured grid with each curved element split into
/// `k_g^2` flat triangles; fields are sampled at the geometric nodes.
pub fn write_vtu(
    path: &Path,
    mesh: &EvolvingSurfaceMesh,
    space: &TaylorHoodSpace,
    u: &FeFunction,
    p: &FeFunction,
    l: Option<&FeFunction>,
) -> Result<()> {
    ensure_parent(path)?;
    let (refs, sub) = lattice(space.k_g.max(1));
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut ps = Vec::new();
    let mut ls = Vec::new();
    let mut cells = Vec::new();
    for e in 0..mesh.n_elements() {
        let base = xs.len();
        for r in &refs {
            xs.push(mesh.element_geometry(e, *r)?.x);
            us.push(eval_velocity(space, u, mesh, e, *r)?.value);
            ps.push(eval_scalar(space, p, mesh, e, *r)?.value);
            if let Some(l) = l {
                ls.push(eval_scalar(space, l, mesh, e, *r)?.value);
            }
        }
        cells.extend(sub.iter().map(|t| [base + t[0], base + t[1], base + t[2]]));
    }
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\"?>");
    let _ = writeln!(s, "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">");
    let _ = writeln!(s, "<UnstructuredGrid>");
    let _ = writeln!(s, "<Piece NumberOfPoints=\"{}\" NumberOfCells=\"{}\">", xs.len(), cells.len());
    let _ = writeln!(s, "<Points>\n<DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">");
    for x in &xs {
        let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
    }
    let _ = writeln!(s, "</DataArray>\n</Points>");
    let _ = writeln!(s, "<Cells>\n<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">");
    for c in &cells {
        let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">");
    for i in 0..cells.len() {
        let _ = writeln!(s, "{}", 3 * (i + 1));
    }
    let _ = writeln!(s, "</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">");
    for _ in 0..cells.len() {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "</DataArray>\n</Cells>");
    let _ = writeln!(s, "<PointData Vectors=\"velocity\" Scalars=\"pressure\">");
    let _ = writeln!(s, "<DataArray type=\"Float64\" Name=\"velocity\" NumberOfComponents=\"3\" format=\"ascii\">");
    for v in &us {
        let _ = writeln!(s, "{:e} {:e} {:e}", v[0], v[1], v[2]);
    }
    let _ = writeln!(s, "</DataArray>");
    let mut scalar = |name: &str, vals: &[f64]| {
        let _ = writeln!(s, "<DataArray type=\"Float64\" Name=\"{name}\" format=\"ascii\">");
        for v in vals {
            let _ = writeln!(s, "{v:e}");
        }
        let _ = writeln!(s, "</DataArray>");
    };
    scalar("pressure", &ps);
    if l.is_some() {
        scalar("multiplier", &ls);
    }
    let _ = writeln!(s, "</PointData>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>");
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::EocTable;
    use crate::fespace::Field;
    use crate::geometry::{AnalyticSurface, SurfaceKind};

    fn report(level: usize, h: f64, e: f64) -> ErrorReport {
        ErrorReport {
            level,
            h,
            dt: 0.5 * 0.25f64.powi(level as i32),
            e_u_ah: e,
            e_u_h1: e,
            e_u_linf_l2: e,
            e_pu_linf_l2: e,
            e_n_linf_l2: e,
            e_div_linf_l2: e,
            e_p_l2l2: e,
            e_l_l2l2: Some(e),
            e_l_hm1: Some(e),
            ..Default::default()
        }
    }

    #[test]
    fn lattice_counts() {
        for k in 1..=3 {
            let (p, t) = lattice(k);
            assert_eq!(p.len(), (k + 1) * (k + 2) / 2);
            assert_eq!(t.len(), k * k);
        }
    }

    #[test]
    fn sweep_and_eoc_csv() {
        let dir = tempfile::tempdir().unwrap();
        let reports = [report(1, 0.5, 0.25), report(2, 0.25, 0.0625)];
        let path = dir.path().join("nested/sweep.csv");
        write_sweep_csv(&path, &reports).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "level,h,dt,N_u,N_p,N_l,e_u_ah,e_u_h1,e_u_linf_l2,e_Pu_linf_l2,e_n_linf_l2,e_div_linf_l2,e_p_l2l2,e_l_l2l2,e_l_hm1,walltime_s"
        );
        assert_eq!(text.lines().count(), 3);
        let eoc_path = dir.path().join("eoc.csv");
        write_eoc_csv(&eoc_path, &EocTable::from_reports(&reports).unwrap()).unwrap();
        let eoc = fs::read_to_string(&eoc_path).unwrap();
        assert!(eoc.lines().nth(1).unwrap().starts_with("1,2,2.0000,2.0000"));
        let single = EocTable::from_reports(&reports[..1]).unwrap();
        write_eoc_csv(&eoc_path, &single).unwrap();
        assert_eq!(fs::read_to_string(&eoc_path).unwrap().lines().count(), 1);
    }

    #[test]
    fn summary_echoes_config_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::preset("paper-osc-pm").unwrap();
        c.mu = 0.1 + 0.2;
        c.t_end = Some(1.0 / 3.0);
        let s = RunSummary::new(&c, Some(2.0), &report(0, 1.0, 0.1), &[]);
        let path = dir.path().join("summary.json");
        s.write(&path).unwrap();
        assert_eq!(RunSummary::read(&path).unwrap().config, c);
    }

    #[test]
    fn vtu_has_expected_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = EvolvingSurfaceMesh::build_initial(AnalyticSurface::new(SurfaceKind::MovingSphere), 0, 2).unwrap();
        let space = TaylorHoodSpace::new(&mesh.topology, 2, 1, 2, 2).unwrap();
        let u = FeFunction::zeros(&space, Field::Velocity);
        let p = FeFunction::zeros(&space, Field::Pressure);
        let path = dir.path().join("out.vtu");
        write_vtu(&path, &mesh, &space, &u, &p, None).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("NumberOfPoints=\"120\" NumberOfCells=\"80\""));
        assert!(!text.contains("multiplier"));
    }
}
