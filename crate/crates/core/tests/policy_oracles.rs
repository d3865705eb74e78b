use tipping::equilibrium;
use tipping::model::{self, Param, State};
use tipping::policy::{
    self, OptimizerOptions, PolicyError, PolicyProblem, ThresholdOptions, TipPolicy,
};
use tipping::presets;
use tipping::roots::linspace;

/// Best profit over a dense wage grid, solving every point from scratch.
fn brute_force(problem: &PolicyProblem, own_tip_rate: f64, n: usize) -> f64 {
    let cfg = problem.base();
    let waiter = linspace(problem.waiter_floor(own_tip_rate), cfg.wage_cap, n);
    let cook = linspace(cfg.min_wage_untipped, cfg.wage_cap, n);
    let mut best = f64::NEG_INFINITY;
    for &bw in &waiter {
        for &bc in &cook {
            let c = problem.config_with(own_tip_rate, bw, bc);
            let fp = equilibrium::solve_fixed_point(&c, State::PARITY).unwrap();
            best = best.max(model::profit(&c, &fp.state));
        }
    }
    best
}

#[test]
fn optimizer_is_not_beaten_by_a_dense_grid() {
    let mut cfg = presets::threshold_example();
    cfg.rival.tip_rate = 0.0;
    cfg.rival.waiter_pay = cfg.min_wage_untipped;
    cfg.rival.cook_pay = cfg.min_wage_untipped;
    let floor_rival = PolicyProblem::new(cfg).unwrap();
    let tipping_rival = PolicyProblem::new(presets::threshold_example()).unwrap();
    for (problem, t1) in [(floor_rival, 0.0), (tipping_rival, 0.19), (tipping_rival, 0.0)] {
        let opt = policy::optimize_wages(&problem, t1, &OptimizerOptions::default()).unwrap();
        let dense = brute_force(&problem, t1, 129);
        assert!(opt.profit >= dense - 1e-6, "optimizer {} < grid {dense}", opt.profit);
    }
}

#[test]
fn grid_phase_does_not_move_the_optimum() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let shifted = OptimizerOptions {
        grid_phase: 0.5,
        ..OptimizerOptions::default()
    };
    for t in [0.05, 0.2, 0.35, 0.5] {
        let p = problem.with_conventional_rate(t);
        for t1 in [t, 0.0] {
            let a = policy::optimize_wages(&p, t1, &OptimizerOptions::default()).unwrap();
            let b = policy::optimize_wages(&p, t1, &shifted).unwrap();
            assert!((a.profit - b.profit).abs() < 1e-5, "T = {t}, T1 = {t1}");
        }
    }
}

#[test]
fn wage_floors_bind() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let result = policy::profit_curves(&problem, &linspace(0.01, 0.5, 9), &OptimizerOptions::default())
        .unwrap();
    assert!(result.allow.iter().all(|p| p.optimum.waiter_pay >= 2.13));
    assert!(result.forbid.iter().all(|p| p.optimum.waiter_pay >= 7.25));
    assert!(result.allow.iter().chain(&result.forbid).all(|p| p.optimum.cook_pay >= 7.25));
}

#[test]
fn rescaling_money_scales_profit_but_not_the_threshold() {
    let opts = ThresholdOptions::default();
    let base = PolicyProblem::new(presets::threshold_example()).unwrap();
    let scaled = PolicyProblem::new(presets::threshold_example().price_scaled(3.0)).unwrap();
    let tc = policy::critical_tip_rate(&base, &opts).unwrap();
    let tc_scaled = policy::critical_tip_rate(&scaled, &opts).unwrap();
    assert!((tc - tc_scaled).abs() < 1e-4, "{tc} vs {tc_scaled}");
    for t1 in [0.0, 0.25] {
        let a = policy::optimize_wages(&base.with_conventional_rate(0.25), t1, &opts.optimizer).unwrap();
        let b = policy::optimize_wages(&scaled.with_conventional_rate(0.25), t1, &opts.optimizer).unwrap();
        assert!((b.profit - 3.0 * a.profit).abs() < 1e-5 * b.profit.abs());
    }
}

#[test]
fn allowing_wins_at_the_low_end_and_forbidding_at_the_high_end() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let opts = OptimizerOptions::default();
    assert!(policy::forbid_advantage(&problem, 0.01, &opts).unwrap() <= 0.0);
    assert!(policy::forbid_advantage(&problem, 0.5, &opts).unwrap() >= 0.0);
}

#[test]
fn cheap_rival_with_little_food_emphasis_has_no_threshold() {
    let mut cfg = presets::threshold_example();
    cfg.rival.waiter_pay = cfg.min_wage_tipped;
    cfg.rival.cook_pay = cfg.min_wage_untipped;
    cfg.food_to_service = 0.5;
    let problem = PolicyProblem::new(cfg).unwrap();
    let grid = linspace(0.01, 0.5, 13);
    let curves = policy::profit_curves(&problem, &grid, &OptimizerOptions::default()).unwrap();
    assert!(curves.advantage().iter().all(|&a| a < 0.0));
    match policy::critical_tip_rate(&problem, &ThresholdOptions::default()) {
        Err(PolicyError::NoThreshold { dominant, .. }) => assert_eq!(dominant, TipPolicy::Allow),
        other => panic!("expected no threshold, got {other:?}"),
    }
}

#[test]
fn threshold_lies_in_the_crossing_cell() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let grid = linspace(0.01, 0.5, 25);
    let result = policy::threshold_analysis(&problem, &grid, 1e-4, &OptimizerOptions::default())
        .unwrap();
    let tc = result.tc.unwrap();
    let adv = result.advantage();
    for (t, a) in grid.iter().zip(&adv) {
        if *t < tc - 1e-4 {
            assert!(*a < 0.0, "T = {t}");
        } else if *t > tc + 1e-4 {
            assert!(*a > 0.0, "T = {t}");
        }
    }
}

#[test]
fn threshold_csv_has_a_row_per_policy_and_a_summary() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let result =
        policy::threshold_analysis(&problem, &[0.1, 0.4], 1e-4, &OptimizerOptions::default()).unwrap();
    let mut buf = Vec::new();
    result.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0.1,allow,"));
    assert!(lines[2].starts_with("0.1,forbid,"));
    assert!(lines[5].starts_with("# Tc=0.2"));
}

#[test]
fn sweeping_menu_price_moves_both_restaurants() {
    let problem = PolicyProblem::new(presets::typical_restaurant()).unwrap();
    let moved = problem.with_param(Param::MenuPrice, 14.0).unwrap();
    assert_eq!(moved.base().ours.menu_price, 14.0);
    assert_eq!(moved.base().rival.menu_price, 14.0);
    assert!(matches!(
        problem.with_param(Param::MenuPrice1, 14.0),
        Err(PolicyError::MenuPriceMismatch { .. })
    ));
}

/// Converged threshold of the reference ecosystem; frozen for regression.
const REFERENCE_TC: f64 = 0.248819;

#[test]
fn reference_threshold_is_stable() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let tc = policy::critical_tip_rate(&problem, &ThresholdOptions::default()).unwrap();
    assert!((tc - REFERENCE_TC).abs() < 2e-4, "{tc}");
}

#[test]
fn waiter_pay_diagnostics_follow_the_conventional_rate() {
    let problem = PolicyProblem::new(presets::threshold_example()).unwrap();
    let grid = linspace(0.05, 0.5, 10);
    let result = policy::profit_curves(&problem, &grid, &OptimizerOptions::default()).unwrap();
    // Allowing tips: pay the tipped minimum; wages become a shrinking share.
    assert!(result.allow.iter().all(|p| p.optimum.waiter_pay == 2.13));
    assert!(result
        .allow
        .windows(2)
        .all(|w| w[1].base_pay_fraction < w[0].base_pay_fraction));
    // Forbidding tips: base pay rises to compensate for lost tips.
    assert!(result
        .forbid
        .windows(2)
        .all(|w| w[1].optimum.waiter_pay > w[0].optimum.waiter_pay));
    assert!(result.forbid.iter().all(|p| p.base_pay_fraction == 1.0));
}
