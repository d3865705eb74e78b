//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p tipping --test acceptance`.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tipping::dynamics::{self, SettleOptions};
use tipping::equilibrium::{self, Stability};
use tipping::model::{EcosystemConfig, Param, State};
use tipping::policy::{self, OptimizerOptions, PolicyProblem, ThresholdOptions, SWEEP_PARAMS};
use tipping::presets::{self, DynamicsPanel};
use tipping::roots::linspace;
use tipping::sensitivity::{
    self, lhs_sample, prcc, spearman, ParameterRanges, SensitivityReport, Significance,
};

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const STABILITY_SEED: u64 = 2017;
const SAMPLES: usize = 100;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    if elapsed <= limit {
        Ok(elapsed)
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn symmetry_fixed_point() -> Outcome {
    let start = Instant::now();
    let cfg = EcosystemConfig::baseline();
    let mut worst: f64 = 0.0;
    for initial in [
        State::new(0.1, 0.9, 0.3),
        State::new(0.9, 0.2, 0.8),
        State::new(0.5, 0.5, 0.5),
        State::new(0.0, 1.0, 1.0),
    ] {
        let settled = dynamics::settle(&cfg, initial, &SettleOptions::default())
            .map_err(|e| e.to_string())?;
        worst = worst.max(settled.state.max_abs_diff(State::PARITY));
    }
    let elapsed = within(Duration::from_secs(1), start)?;
    check(worst <= 1e-8, format!("max deviation {worst:.1e} in {elapsed:.2?}"))
}

fn cook_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut cfg = EcosystemConfig::baseline();
        cfg.ours.cook_pay = rng.random_range(7.25..=25.0);
        cfg.rival.cook_pay = rng.random_range(7.25..=25.0);
        let settled = dynamics::settle(&cfg, State::new(0.3, 0.6, 0.1), &SettleOptions::default())
            .map_err(|e| e.to_string())?;
        let closed = cfg.ours.cook_pay / (cfg.ours.cook_pay + cfg.rival.cook_pay);
        worst = worst.max((settled.state.cooks - closed).abs());
    }
    check(worst <= 1e-8, format!("max |C - bC1/(bC1+bC2)| = {worst:.1e} over 50 pairs"))
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn phase_portrait() -> Outcome {
    let cfg = presets::fig_s5();
    let report = equilibrium::find_equilibrium(&cfg, State::PARITY).map_err(|e| e.to_string())?;
    let fp = report.fixed_point;
    let rounded = (round2(fp.diners), round2(fp.waiters), round2(fp.cooks));
    let nc = equilibrium::nullclines(&cfg, fp.cooks, 201).map_err(|e| e.to_string())?;
    let gap = equilibrium::distance_to_polyline(&nc.diner, (fp.diners, fp.waiters))
        .max(equilibrium::distance_to_polyline(&nc.waiter, (fp.diners, fp.waiters)));
    check(
        rounded == (0.51, 0.49, 0.50) && gap < 1e-3,
        format!(
            "fixed point ({:.4}, {:.4}, {:.4}) under {} gratuity, nullcline gap {gap:.1e}",
            fp.diners, fp.waiters, fp.cooks, cfg.gratuity
        ),
    )
}

fn dynamics_panels() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for panel in DynamicsPanel::ALL {
        let traj = dynamics::integrate(
            &presets::dynamics_panel(panel),
            State::PARITY,
            50.0,
            dynamics::DEFAULT_MAX_STEP,
        )
        .map_err(|e| e.to_string())?;
        let end = traj.last();
        let min_w = traj.states.iter().map(|s| s.waiters).fold(f64::INFINITY, f64::min);
        // A dip is a trough clearly below both the start and the settled value.
        let dips = min_w < 0.5 - 1e-3 && min_w < end.waiters - 1e-3;
        let pass = match panel {
            DynamicsPanel::LowerTipRate => end.diners > 0.5 && end.waiters < 0.5,
            DynamicsPanel::LowerMenuPrice => dips && end.diners > 0.5,
            DynamicsPanel::LowerCookPay => {
                end.cooks < 0.5 && end.diners < 0.5 && end.waiters < 0.5
            }
            DynamicsPanel::CooksOverWaiters => {
                end.cooks > 0.5 && end.diners > 0.5 && dips
            }
        };
        ok &= pass;
        details.push(format!(
            "{}: ({:.3}, {:.3}, {:.3}) min W {:.3}",
            panel.label(),
            end.diners,
            end.waiters,
            end.cooks,
            min_w
        ));
    }
    let elapsed = within(Duration::from_secs(5), start)?;
    check(ok, format!("{} in {elapsed:.2?}", details.join("; ")))
}

fn stability_survey(seed: u64) -> Result<(Vec<u8>, usize, f64), String> {
    let (samples, reports) = sensitivity::stability_survey(
        &EcosystemConfig::baseline(),
        &ParameterRanges::equilibrium_default(),
        SAMPLES,
        seed,
    );
    let mut csv = Vec::new();
    let mut sinks = 0;
    let mut max_re = f64::NEG_INFINITY;
    for (row, report) in samples.iter().zip(&reports) {
        let report = report.as_ref().map_err(|e| format!("sample {row:?}: {e}"))?;
        if report.classification == Stability::StableSink {
            sinks += 1;
        }
        max_re = report.eigenvalues.iter().map(|z| z.re).fold(max_re, f64::max);
        csv.extend_from_slice(report.csv_row().as_bytes());
        csv.push(b'\n');
    }
    Ok((csv, sinks, max_re))
}

fn stability_sweep() -> Outcome {
    let start = Instant::now();
    let (_, sinks, max_re) = stability_survey(STABILITY_SEED)?;
    let elapsed = within(Duration::from_secs(30), start)?;
    check(
        sinks == SAMPLES,
        format!("{sinks}/{SAMPLES} stable sinks, largest real part {max_re:.3} in {elapsed:.2?}"),
    )
}

fn threshold_existence() -> Outcome {
    let start = Instant::now();
    let problem = PolicyProblem::new(presets::threshold_example()).map_err(|e| e.to_string())?;
    let grid = linspace(0.01, 0.5, 25);
    let result = policy::threshold_analysis(&problem, &grid, 1e-4, &OptimizerOptions::default())
        .map_err(|e| e.to_string())?;
    let tc = result.tc.ok_or("no crossing")?;
    let interior = tc > 0.01 && tc < 0.5;
    let ordered = grid.iter().zip(result.advantage()).all(|(&t, adv)| {
        if t < tc {
            adv <= 0.0
        } else {
            adv >= 0.0
        }
    });
    let pairs = || result.allow.iter().zip(&result.forbid);
    let cook_drops = pairs().all(|(a, f)| f.optimum.cook_pay < a.optimum.cook_pay);
    let pay_drops = pairs().all(|(a, f)| f.waiter_total_pay < a.waiter_total_pay);
    // Forbid-to-allow value ratio crossing 1 within 0.05 of the threshold.
    let rel: Vec<f64> = pairs().map(|(a, f)| f.value_ratio / a.value_ratio - 1.0).collect();
    let parity = grid
        .windows(2)
        .zip(rel.windows(2))
        .filter(|(_, r)| (r[0] > 0.0) != (r[1] > 0.0))
        .map(|(t, r)| t[0] + (t[1] - t[0]) * r[0] / (r[0] - r[1]))
        .min_by(|a, b| (a - tc).abs().total_cmp(&(b - tc).abs()));
    let parity_near = parity.is_some_and(|p| (p - tc).abs() <= 0.05);
    let elapsed = within(Duration::from_secs(120), start)?;
    check(
        interior && ordered && cook_drops && pay_drops && parity_near,
        format!(
            "Tc = {tc:.5}, single crossing {ordered}, cook pay drops {cook_drops}, \
waiter pay drops {pay_drops}, value parity at {parity:.4?} in {elapsed:.2?}"
        ),
    )
}

fn supplement_variants() -> Outcome {
    let mut details = Vec::new();
    for (name, cfg) in [
        ("staff-pay", presets::staff_pay_example()),
        ("staff-count-times-pay", presets::payroll_example()),
    ] {
        let problem = PolicyProblem::new(cfg).map_err(|e| e.to_string())?;
        let tc = policy::critical_tip_rate(&problem, &ThresholdOptions::default())
            .map_err(|e| format!("{name}: {e}"))?;
        details.push(format!("{name} Tc = {tc:.4}"));
    }
    Ok(details.join(", "))
}

fn sweep_grid(param: Param) -> Vec<f64> {
    match param {
        Param::MenuPrice => linspace(6.0, 20.0, 8),
        Param::FoodToService | Param::DinersPerWaiter => linspace(8.0, 20.0, 7),
        Param::CooksPerWaiter => linspace(0.5, 2.0, 7),
        _ => unreachable!("not a sweep parameter"),
    }
}

fn local_monotonicity() -> Outcome {
    let problem = PolicyProblem::new(presets::typical_restaurant()).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut details = Vec::new();
    for param in SWEEP_PARAMS {
        let increasing = matches!(param, Param::MenuPrice | Param::DinersPerWaiter);
        let points = policy::local_sweep(&problem, param, &sweep_grid(param), &ThresholdOptions::default())
            .map_err(|e| e.to_string())?;
        let tcs: Option<Vec<f64>> = points.iter().map(|p| p.tc).collect();
        let pass = tcs.as_ref().is_some_and(|tcs| {
            tcs.windows(2).all(|w| {
                if increasing {
                    w[1] > w[0] - 1e-4
                } else {
                    w[1] < w[0] + 1e-4
                }
            })
        });
        ok &= pass;
        let shown = tcs.map_or("missing Tc".into(), |t| {
            format!("{:.3}..{:.3}", t[0], t[t.len() - 1])
        });
        details.push(format!("{param} {} {shown}", if increasing { "up" } else { "down" }));
    }
    check(ok, details.join(", "))
}

fn all_starred(report: &SensitivityReport, output: &str, params: &[Param]) -> bool {
    params.iter().all(|&p| {
        report
            .correlation(output, p)
            .is_some_and(|c| c.significance() == Significance::P001)
    })
}

fn threshold_report(seed: u64) -> Result<SensitivityReport, String> {
    sensitivity::threshold_sensitivity(
        &ParameterRanges::threshold_default(),
        SAMPLES,
        seed,
        &ThresholdOptions::default(),
    )
    .map_err(|e| e.to_string())
}

fn global_threshold_significance() -> Outcome {
    let expected = [
        (Param::MenuPrice, 1.0),
        (Param::FoodToService, -1.0),
        (Param::DinersPerWaiter, 1.0),
        (Param::CooksPerWaiter, -1.0),
    ];
    let mut agreeing = 0;
    let mut details = Vec::new();
    for seed in SEEDS {
        let report = threshold_report(seed)?;
        let agrees = expected.iter().all(|&(p, sign)| {
            report.correlation("Tc", p).is_some_and(|c| {
                c.significance() == Significance::P001 && c.coefficient * sign > 0.0
            })
        });
        agreeing += agrees as usize;
        let cells: Vec<String> = expected
            .iter()
            .map(|&(p, _)| match report.correlation("Tc", p) {
                Some(c) => format!("{p} {:+.2}{}", c.coefficient, c.significance()),
                None => format!("{p} undefined"),
            })
            .collect();
        details.push(format!("seed {seed}: {}", cells.join(" ")));
    }
    check(
        agreeing >= 4,
        format!("{agreeing}/5 seeds agree with (+m, -r, +rDW, -rCW) all ***; {}", details.join("; ")),
    )
}

fn equilibrium_report(seed: u64) -> Result<SensitivityReport, String> {
    sensitivity::equilibrium_sensitivity(&ParameterRanges::equilibrium_default(), SAMPLES, seed)
        .map_err(|e| e.to_string())
}

fn equilibrium_significance() -> Outcome {
    let tips_and_cooks = [Param::TipRate1, Param::TipRate2, Param::CookPay1, Param::CookPay2];
    let waiters = [Param::WaiterPay1, Param::WaiterPay2];
    let mut agreeing = 0;
    for seed in SEEDS {
        let report = equilibrium_report(seed)?;
        let agrees = all_starred(&report, "D*", &tips_and_cooks)
            && all_starred(&report, "W*", &tips_and_cooks)
            && all_starred(&report, "W*", &waiters);
        agreeing += agrees as usize;
    }
    check(agreeing >= 4, format!("{agreeing}/5 seeds fully significant"))
}

fn prcc_unit_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows: Vec<Vec<f64>> = (0..100)
        .map(|_| (0..4).map(|_| rng.random::<f64>()).collect())
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| r[0].powi(3) + 2.0).collect();
    let r = prcc(&rows, &y);
    let first = r[0].map(|c| c.coefficient);
    let monotone = first.is_some_and(|c| (c - 1.0).abs() <= 1e-12)
        && r[1..].iter().all(|c| c.is_some_and(|c| c.p_value > 0.05));

    let ranges = ParameterRanges::threshold_default();
    let mut flagged = 0;
    for seed in 0..100 {
        let rows = lhs_sample(&ranges, SAMPLES, seed);
        let mut noise = ChaCha8Rng::seed_from_u64(1000 + seed);
        let y: Vec<f64> = (0..SAMPLES).map(|_| 1.0 + noise.random::<f64>()).collect();
        if prcc(&rows, &y).iter().flatten().any(|c| c.p_value < 0.001) {
            flagged += 1;
        }
    }
    let independent = flagged <= 5;

    let x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6];
    let z = [2.0, 7.0, 1.0, 8.0, 2.8, 1.8];
    let single: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
    let spearman_equal = prcc(&single, &z)[0].map(|c| c.coefficient.to_bits())
        == spearman(&x, &z).map(f64::to_bits);
    check(
        monotone && independent && spearman_equal,
        format!(
            "monotone PRCC {first:?}, noise flagged in {flagged}/100 seeds, \
k=1 equals Spearman bit-exactly {spearman_equal}"
        ),
    )
}

fn determinism() -> Outcome {
    let (a, _, _) = stability_survey(STABILITY_SEED)?;
    let (b, _, _) = stability_survey(STABILITY_SEED)?;
    let csv = |r: &SensitivityReport| -> Vec<u8> {
        let mut buf = Vec::new();
        r.write_prcc_csv(&mut buf).expect("in-memory write");
        r.write_samples_csv(&mut buf).expect("in-memory write");
        buf
    };
    let eq = csv(&equilibrium_report(SEEDS[0])?) == csv(&equilibrium_report(SEEDS[0])?);
    let tc = csv(&threshold_report(SEEDS[0])?) == csv(&threshold_report(SEEDS[0])?);
    check(
        a == b && eq && tc,
        format!("stability {}, equilibrium PRCC {eq}, threshold PRCC {tc}", a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("symmetry fixed point", symmetry_fixed_point),
        ("cook closed form", cook_closed_form),
        ("phase portrait equilibrium", phase_portrait),
        ("dynamics panels", dynamics_panels),
        ("stability sweep", stability_sweep),
        ("threshold existence", threshold_existence),
        ("quality variants keep a threshold", supplement_variants),
        ("local threshold monotonicity", local_monotonicity),
        ("global threshold significance", global_threshold_significance),
        ("equilibrium significance", equilibrium_significance),
        ("PRCC unit oracle", prcc_unit_oracle),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
