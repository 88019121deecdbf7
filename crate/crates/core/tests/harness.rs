use ddobs::harness::{compare, run_scenario, sweep, write_steps, ScenarioConfig, Variant};

fn short_vdp() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::vdp(5.0);
    cfg.horizon = 40;
    cfg.repeats = 2;
    cfg
}

fn strip_timing(rows: &mut [ddobs::harness::StepRecord]) {
    for r in rows {
        r.step_ms = 0.0;
    }
}

#[test]
fn compare_normalizes_by_best_variant() {
    let cfg = short_vdp();
    let variants = [
        Variant::with_m_max(&cfg.observer, 1),
        Variant::with_m_max(&cfg.observer, 251),
    ];
    let rows = compare(&cfg, &variants).unwrap();
    assert_eq!(rows[1].v_hat, 1.0);
    assert_eq!(rows[1].w_hat, 1.0);
    assert!(rows[0].v_hat > 1.0 && rows[0].w_hat > 1.0);
    assert_eq!(rows[0].variant, "M_max=1");
}

#[test]
fn single_variant_is_its_own_reference() {
    let cfg = short_vdp();
    let rows = compare(&cfg, &[Variant::with_m_max(&cfg.observer, 20)]).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].v_hat, rows[0].w_hat), (1.0, 1.0));
}

#[test]
fn sweep_of_one_value_matches_single_run() {
    let mut cfg = short_vdp();
    cfg.observer.m_max = 17;
    let row = &sweep(&cfg, &[17]).unwrap()[0];
    let run = run_scenario(&cfg).unwrap();
    assert_eq!(row.m_max, 17);
    assert_eq!(row.repeats, 2);
    assert_eq!(row.v_tilde, run.v_tilde());
    assert_eq!(row.w_tilde, run.w_tilde());
    assert_eq!(row.sound, run.all_sound());
}

#[test]
fn runs_are_deterministic_up_to_timing() {
    let cfg = short_vdp();
    let mut a = run_scenario(&cfg).unwrap().records();
    let mut b = run_scenario(&cfg).unwrap().records();
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
}

#[test]
fn zero_horizon_writes_single_row_per_seed() {
    let mut cfg = short_vdp();
    cfg.horizon = 0;
    let out = run_scenario(&cfg).unwrap();
    let mut buf = Vec::new();
    write_steps(&mut buf, &out.records()).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 2 + 2);
    assert!(out.runs.iter().all(|r| r.report.v_tilde == r.report.hullvol_terms[0]));
}

#[test]
fn tank_scenario_is_sound() {
    let mut cfg = ScenarioConfig::tank(10);
    cfg.horizon = 30;
    cfg.observer.m_max = 40;
    cfg.set_rounding(ddobs::Rounding::Rigorous);
    let out = run_scenario(&cfg).unwrap();
    assert!(out.all_sound());
    assert!(out.runs[0].report.box_counts.iter().all(|&m| (1..=40).contains(&m)));
}

#[test]
fn draining_tanks_report_domain_violation() {
    let mut cfg = ScenarioConfig::tank(5);
    cfg.tank.inflow = -5.0;
    let err = run_scenario(&cfg).unwrap_err();
    assert!(matches!(err.root(), ddobs::Error::DomainViolation(_)), "{err}");
}
