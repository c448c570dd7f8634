use esns::analysis::EocTable;
use esns::config::{RunConfig, Scheme};
use esns::geometry::{SolutionKind, SurfaceKind};
use esns::output::{write_eoc_csv, write_sweep_csv, RunSummary};
use esns::solver::{run_simulation, run_sweep};

#[test]
fn zero_solution_gives_zero_errors_for_every_scheme() {
    for scheme in [Scheme::LmmDir, Scheme::LmmCov, Scheme::Pm] {
        let mut c = RunConfig::preset("paper-case1").unwrap();
        c.benchmark = SurfaceKind::StationarySphere;
        c.solution = SolutionKind::Zero;
        c.scheme = scheme;
        c.level = 0;
        c.t_end = Some(1.0);
        let r = run_simulation(&c).unwrap();
        assert_eq!(r.records.len(), 3);
        assert_eq!(r.report.e_u_ah, 0.0);
        assert_eq!(r.report.e_p_l2l2, 0.0);
        assert!(r.final_state.u.coeffs.iter().all(|v| *v == 0.0));
    }
}

#[test]
fn coarse_sweep_writes_tables_and_errors_decrease() {
    let mut c = RunConfig::preset("paper-case1").unwrap();
    c.t_end = Some(0.5);
    let reports = run_sweep(&c, &[0, 1]).unwrap();
    assert!(reports[1].e_u_ah < reports[0].e_u_ah);
    assert!(reports[1].e_p_l2l2 < reports[0].e_p_l2l2);
    assert!((reports[1].dt - reports[0].dt / 4.0).abs() < 1e-15);
    let table = EocTable::from_reports(&reports).unwrap();
    assert!(table.last("e_u_ah").unwrap() > 1.0);

    let dir = tempfile::tempdir().unwrap();
    write_sweep_csv(&dir.path().join("sweep.csv"), &reports).unwrap();
    write_eoc_csv(&dir.path().join("eoc.csv"), &table).unwrap();
    let eoc = std::fs::read_to_string(dir.path().join("eoc.csv")).unwrap();
    assert!(eoc.starts_with("level_coarse,level_fine,e_u_ah"));
    assert_eq!(eoc.lines().count(), 2);

    let r = run_simulation(&RunConfig { level: 0, ..c.clone() }).unwrap();
    let s = RunSummary::new(&c, None, &r.report, &r.records);
    s.write(&dir.path().join("s/summary.json")).unwrap();
    assert_eq!(RunSummary::read(&dir.path().join("s/summary.json")).unwrap().report, r.report);
}

#[test]
fn non_contiguous_levels_are_rejected() {
    let c = RunConfig::preset("paper-case1").unwrap();
    assert!(run_sweep(&c, &[1, 3]).unwrap_err().is_config());
    assert!(run_sweep(&c, &[]).unwrap_err().is_config());
}
