//! Acceptance criteria. Each test prints one PASS/FAIL line per criterion.

use esns::analysis::{eoc, ErrorReport};
use esns::checks::{run_checks, CheckOptions};
use esns::config::RunConfig;
use esns::solver::run_sweep;

struct Verdicts {
    name: &'static str,
    lines: Vec<(bool, String)>,
}

impl Verdicts {
    fn new(name: &'static str) -> Self {
        Self { name, lines: Vec::new() }
    }

    fn check(&mut self, passed: bool, what: String) {
        println!("{} [{}] {what}", if passed { "PASS" } else { "FAIL" }, self.name);
        self.lines.push((passed, what));
    }

    fn at_least(&mut self, what: &str, value: f64, bound: f64) {
        self.check(value >= bound, format!("{what} = {value:.3} (>= {bound})"));
    }

    fn finish(self) {
        let failed: Vec<&String> = self.lines.iter().filter(|l| !l.0).map(|l| &l.1).collect();
        assert!(failed.is_empty(), "{}: failed {failed:?}", self.name);
    }
}

fn sweep(preset: &str, levels: &[usize], t_end: Option<f64>) -> Vec<ErrorReport> {
    let mut c = RunConfig::preset(preset).unwrap();
    c.t_end = t_end;
    let reports = run_sweep(&c, levels).unwrap();
    for r in &reports {
        println!(
            "  {preset} level {} h {:.4}: e_u_ah {:.3e} e_u_h1 {:.3e} e_Pu {:.3e} e_u {:.3e} e_n {:.3e} e_div {:.3e} e_p {:.3e} e_l {:?}",
            r.level, r.h, r.e_u_ah, r.e_u_h1, r.e_pu_linf_l2, r.e_u_linf_l2, r.e_n_linf_l2, r.e_div_linf_l2, r.e_p_l2l2, r.e_l_l2l2
        );
    }
    reports
}

/// Rate between the two finest levels.
fn rate(reports: &[ErrorReport], f: impl Fn(&ErrorReport) -> f64) -> f64 {
    let n = reports.len();
    let e: Vec<f64> = reports[n - 2..].iter().map(&f).collect();
    let h: Vec<f64> = reports[n - 2..].iter().map(|r| r.h).collect();
    eoc(&e, &h).unwrap()[0]
}

type Column = (&'static str, fn(&ErrorReport) -> f64);

// Moving-sphere runs stop at T = 0.5 to bound the runtime.
const T_MOVING: Option<f64> = Some(0.5);

#[test]
fn moving_sphere_case1() {
    let r = sweep("paper-case1", &[1, 2, 3], T_MOVING);
    let mut v = Verdicts::new("paper-case1");
    v.at_least("EOC e_u L2(a_h)", rate(&r, |r| r.e_u_ah), 1.7);
    v.at_least("EOC e_p L2(L2)", rate(&r, |r| r.e_p_l2l2), 1.7);
    v.at_least("EOC e_n Linf(L2)", rate(&r, |r| r.e_n_linf_l2), 2.5);
    v.at_least("EOC e_Pu Linf(L2)", rate(&r, |r| r.e_pu_linf_l2), 2.2);
    v.finish();
}

#[test]
fn moving_sphere_case2() {
    let r = sweep("paper-case2", &[1, 2, 3], T_MOVING);
    let mut v = Verdicts::new("paper-case2");
    v.at_least("EOC e_u L2(a_h)", rate(&r, |r| r.e_u_ah), 1.7);
    v.at_least("EOC e_p L2(L2)", rate(&r, |r| r.e_p_l2l2), 1.7);
    let h1 = rate(&r, |r| r.e_u_h1);
    v.check((0.7..=1.4).contains(&h1), format!("EOC e_u L2(H1) = {h1:.3} (in [0.7, 1.4])"));
    v.at_least("EOC e_n Linf(L2)", rate(&r, |r| r.e_n_linf_l2), 1.7);
    v.finish();
}

#[test]
fn moving_sphere_affine() {
    let r = sweep("paper-case1-affine", &[1, 2, 3], T_MOVING);
    let mut v = Verdicts::new("paper-case1-affine");
    let cols: [Column; 7] = [
        ("e_u L2(a_h)", |r| r.e_u_ah),
        ("e_u L2(H1)", |r| r.e_u_h1),
        ("e_u Linf(L2)", |r| r.e_u_linf_l2),
        ("e_Pu Linf(L2)", |r| r.e_pu_linf_l2),
        ("e_n Linf(L2)", |r| r.e_n_linf_l2),
        ("e_div Linf(L2)", |r| r.e_div_linf_l2),
        ("e_p L2(L2)", |r| r.e_p_l2l2),
    ];
    for (name, f) in cols {
        v.at_least(&format!("EOC {name}"), rate(&r, f), 1.6);
    }
    v.at_least("EOC e_l L2(L2)", rate(&r, |r| r.e_l_l2l2.unwrap_or(f64::NAN)), 1.6);
    v.at_least("EOC e_l L2(H-1)", rate(&r, |r| r.e_l_hm1.unwrap_or(f64::NAN)), 1.6);
    v.finish();
}

#[test]
fn oscillating_sphere_lmm_against_pm() {
    let lmm = sweep("paper-osc", &[1, 2], None);
    let pm = sweep("paper-osc-pm", &[1, 2], None);
    let mut v = Verdicts::new("paper-osc");
    let (a, b) = (rate(&lmm, |r| r.e_u_ah), rate(&pm, |r| r.e_u_ah));
    v.check((a - b).abs() <= 0.3, format!("EOC e_u L2(a_h): LMM {a:.3}, PM {b:.3} (within 0.3)"));
    v.at_least("EOC e_u L2(a_h) LMM", a, 1.6);
    v.at_least("EOC e_u L2(a_h) PM", b, 1.6);
    v.at_least("EOC e_n Linf(L2) LMM", rate(&lmm, |r| r.e_n_linf_l2), 1.6);
    v.at_least("EOC e_n~ Linf(L2) PM", rate(&pm, |r| r.e_n_linf_l2), 1.6);
    let (nl, np) = (lmm[1].e_n_linf_l2, pm[1].e_n_linf_l2);
    v.check(nl <= np, format!("finest normal error: LMM {nl:.3e} <= PM {np:.3e}"));
    v.finish();
}

#[test]
fn property_suite() {
    let start = std::time::Instant::now();
    let rows = run_checks(&CheckOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut v = Verdicts::new("property suite");
    for r in &rows {
        v.check(r.passed, format!("{} = {:.3e} ({})", r.name, r.value, r.criterion));
    }
    v.check(secs < 120.0, format!("runtime {secs:.1} s (< 120 s)"));
    v.finish();
}
