use aoi_secrecy::OutageConvention;
use aoi_secrecy_lab::{run, Experiment, Method, SweepSpec, Table};

fn col(t: &Table, name: &str) -> Vec<String> {
    let k = t.column(name).unwrap();
    t.rows.iter().map(|r| r[k].clone()).collect()
}

fn num(t: &Table, name: &str) -> Vec<f64> {
    col(t, name).iter().map(|s| s.parse().unwrap()).collect()
}

fn small_mc(spec: &mut SweepSpec) {
    spec.sim.horizon = 200_000;
    spec.sim.burn_in = 1_000;
    spec.sim.replications = 8;
}

#[test]
fn fig2_marks_the_closed_form_optimum() {
    let mut spec = SweepSpec::defaults(Experiment::Fig2);
    spec.convention = OutageConvention::PaperPrinted;
    spec.q = vec![0.25];
    spec.eta_th = vec![8];
    let out = run(&spec).unwrap();
    let stars: Vec<usize> = col(&out.table, "optimum").iter().enumerate().filter(|(_, s)| *s == "*").map(|(k, _)| k).collect();
    assert_eq!(stars.len(), 1);
    // 0.5 is already on the default grid, so no row is added.
    assert_eq!(out.table.rows.len(), 20);
    assert_eq!(out.table.rows[stars[0]][3], "0.500000000");
    assert!(col(&out.table, "convention").iter().all(|c| c == "paper"));
}

#[test]
fn fig2_inserts_off_grid_optimum() {
    let mut spec = SweepSpec::defaults(Experiment::Fig2);
    spec.q = vec![0.2];
    spec.eta_th = vec![5];
    let out = run(&spec).unwrap();
    assert_eq!(out.table.rows.len(), 21);
    let ptx = num(&out.table, "p_tx");
    assert!(ptx.windows(2).all(|w| w[0] < w[1]));
    let star = col(&out.table, "optimum").iter().position(|s| s == "*").unwrap();
    assert_eq!(out.table.rows[star][3], "0.833333333");
    let obj = num(&out.table, "closed_form");
    let best = obj.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(obj[star], best);
}

#[test]
fn fig2_methods_agree() {
    let mut spec = SweepSpec::defaults(Experiment::Fig2);
    spec.q = vec![0.3];
    spec.eta_th = vec![1, 4];
    spec.p_tx = vec![0.4, 0.9];
    spec.methods = vec![Method::ClosedForm, Method::Oracle, Method::MonteCarlo];
    small_mc(&mut spec);
    for convention in OutageConvention::ALL {
        spec.convention = convention;
        let out = run(&spec).unwrap();
        let closed = num(&out.table, "closed_form");
        let oracle = num(&out.table, "oracle");
        let mc = num(&out.table, "monte_carlo");
        let hw = num(&out.table, "mc_half_width");
        for k in 0..closed.len() {
            assert!((closed[k] - oracle[k]).abs() < 1e-8, "{convention} row {k}");
            assert!((closed[k] - mc[k]).abs() < 4.0 * hw[k], "{convention} row {k}");
        }
    }
}

#[test]
fn fig1_methods_agree() {
    let mut spec = SweepSpec::defaults(Experiment::Fig1);
    spec.q = vec![0.3];
    spec.p_tx = vec![0.5];
    spec.ratio = vec![1.0, 3.0];
    spec.methods = vec![Method::ClosedForm, Method::Oracle, Method::MonteCarlo];
    small_mc(&mut spec);
    let out = run(&spec).unwrap();
    let closed = num(&out.table, "closed_form");
    let oracle = num(&out.table, "oracle");
    let bound = num(&out.table, "oracle_bound");
    let mc = num(&out.table, "monte_carlo");
    let hw = num(&out.table, "mc_half_width");
    for k in 0..closed.len() {
        assert!((closed[k] - oracle[k]).abs() <= bound[k] + 1e-8);
        assert!(bound[k] < 1e-6);
        assert!((closed[k] - mc[k]).abs() < 4.0 * hw[k] / 1.96);
    }
}

#[test]
fn compare_paper_convention_is_off_by_the_gap_pmf() {
    let mut spec = SweepSpec::defaults(Experiment::Compare);
    spec.p = vec![0.8];
    spec.q = vec![0.2];
    spec.p_tx = vec![0.5];
    spec.eta_th = vec![1, 3, 5, 10];
    spec.methods = vec![Method::ClosedForm, Method::Oracle];
    spec.convention = OutageConvention::PaperPrinted;
    let out = run(&spec).unwrap();
    assert!(!out.passed);
    let diff = num(&out.table, "outage_abs_diff");
    let pmf = num(&out.table, "gap_pmf_at_eta");
    for (d, m) in diff.iter().zip(&pmf) {
        assert!((d - m).abs() < 1e-8);
    }
    assert_eq!(out.summary.matches("MISMATCH").count(), 4);
    assert_eq!(num(&out.table, "outage_reference")[2], 0.500114286);
    assert_eq!(num(&out.table, "outage_candidate")[2], 0.550102857);
}

#[test]
fn compare_emits_one_record_per_candidate() {
    let mut spec = SweepSpec::defaults(Experiment::Compare);
    spec.p = vec![0.5];
    spec.q = vec![0.5];
    spec.p_tx = vec![1.0];
    spec.eta_th = vec![2, 3];
    spec.methods = vec![Method::Oracle, Method::ClosedForm, Method::MonteCarlo];
    small_mc(&mut spec);
    let out = run(&spec).unwrap();
    assert!(out.passed, "{}", out.summary);
    assert_eq!(out.table.rows.len(), 4);
    assert_eq!(col(&out.table, "reference"), vec!["oracle"; 4]);
    assert_eq!(col(&out.table, "candidate"), vec!["closed_form", "monte_carlo", "closed_form", "monte_carlo"]);
    assert_eq!(col(&out.table, "mean_ci_covers"), vec!["", "true", "", "true"]);
}

#[test]
fn optimize_clamps_and_is_independent_of_p() {
    let mut spec = SweepSpec::defaults(Experiment::Optimize);
    spec.q = vec![0.1, 0.25];
    spec.eta_th = vec![5, 8];
    spec.p = vec![0.3, 0.9];
    let out = run(&spec).unwrap();
    assert!(out.passed);
    let closed = num(&out.table, "closed_form_ptx");
    assert_eq!(&closed[..4], &[1.0; 4]);
    assert!(col(&out.table, "p_independent").iter().all(|s| s == "true"));
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = SweepSpec::defaults(Experiment::Fig2);
    spec.eta_th.clear();
    assert!(run(&spec).unwrap_err().is_config());
    let mut spec = SweepSpec::defaults(Experiment::Compare);
    spec.q = vec![0.0];
    assert!(run(&spec).unwrap_err().is_config());
}
