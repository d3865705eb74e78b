//! Wage and tipping policy for our restaurant.
//!
//! The rival is fixed: it allows the conventional tip rate and keeps its
//! wages. Both restaurants charge the same menu price. For a given tip
//! policy we choose waiter and cook base pay inside the legal box to
//! maximize equilibrium profit; comparing the two optimized branches across
//! conventional tip rates yields the critical rate above which forbidding
//! tips pays more.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::equilibrium::{self, EquilibriumError};
use crate::model::{self, ConfigError, EcosystemConfig, Param, State};
use crate::roots::bisect;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("menu prices differ ({ours} vs {rival}); competing restaurants share one price")]
    MenuPriceMismatch { ours: f64, rival: f64 },
    #[error("own tip rate {0} outside [0, 1)")]
    TipRateOutOfRange(f64),
    #[error("equilibrium failed at bW1 = {waiter_pay}, bC1 = {cook_pay}: {source}")]
    Probe {
        waiter_pay: f64,
        cook_pay: f64,
        source: EquilibriumError,
    },
    #[error("at tip grid index {index} (T = {tip_rate}): {source}")]
    GridPoint {
        index: usize,
        tip_rate: f64,
        source: Box<PolicyError>,
    },
    #[error("invalid tip grid: {0}")]
    InvalidGrid(String),
    #[error("no threshold in range [{lo}, {hi}]: {dominant} is more profitable throughout")]
    NoThreshold { lo: f64, hi: f64, dominant: TipPolicy },
    #[error("profit curves cross {} times, near {crossings:?}", .crossings.len())]
    MultipleCrossings { crossings: Vec<f64> },
    #[error("forbidding tips wins below {at} and allowing wins above it")]
    ReversedCrossing { at: f64 },
    #[error("{param} cannot be swept")]
    UnsupportedSweep { param: Param },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TipPolicy {
    Allow,
    Forbid,
}

impl fmt::Display for TipPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TipPolicy::Allow => "allow",
            TipPolicy::Forbid => "forbid",
        })
    }
}

/// Our restaurant's decision problem against a fixed rival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyProblem {
    base: EcosystemConfig,
}

impl PolicyProblem {
    /// Requires a valid configuration with equal menu prices.
    pub fn new(base: EcosystemConfig) -> Result<Self, PolicyError> {
        base.validate()?;
        if base.ours.menu_price != base.rival.menu_price {
            return Err(PolicyError::MenuPriceMismatch {
                ours: base.ours.menu_price,
                rival: base.rival.menu_price,
            });
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &EcosystemConfig {
        &self.base
    }

    pub fn conventional_rate(&self) -> f64 {
        self.base.rival.tip_rate
    }

    /// The same problem with the rival charging conventional rate `rate`.
    pub fn with_conventional_rate(&self, rate: f64) -> Self {
        let mut base = self.base;
        base.rival.tip_rate = rate;
        Self { base }
    }

    /// The same problem with one parameter changed; `m` moves both prices.
    pub fn with_param(&self, param: Param, value: f64) -> Result<Self, PolicyError> {
        let mut base = self.base;
        base.set(param, value);
        Self::new(base)
    }

    pub fn own_tip_rate(&self, policy: TipPolicy) -> f64 {
        match policy {
            TipPolicy::Allow => self.conventional_rate(),
            TipPolicy::Forbid => 0.0,
        }
    }

    /// Legal floor for waiter base pay under our tip rate.
    pub fn waiter_floor(&self, own_tip_rate: f64) -> f64 {
        if own_tip_rate > 0.0 {
            self.base.min_wage_tipped
        } else {
            self.base.min_wage_untipped
        }
    }

    pub fn config_with(&self, own_tip_rate: f64, waiter_pay: f64, cook_pay: f64) -> EcosystemConfig {
        let mut cfg = self.base;
        cfg.ours.tip_rate = own_tip_rate;
        cfg.ours.waiter_pay = waiter_pay;
        cfg.ours.cook_pay = cook_pay;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Coarse grid points per wage axis.
    pub grid: usize,
    /// Offset of the coarse grid in cells, in `[0, 1)`.
    pub grid_phase: f64,
    /// Golden-section tolerance on either wage, $/hr.
    pub wage_tol: f64,
    pub max_sweeps: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            grid: 33,
            grid_phase: 0.0,
            wage_tol: 1e-3,
            max_sweeps: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WageOptimum {
    pub waiter_pay: f64,
    pub cook_pay: f64,
    pub profit: f64,
    pub state: State,
}

impl WageOptimum {
    fn wage_bill(&self) -> f64 {
        self.waiter_pay + self.cook_pay
    }

    fn beats(&self, other: &WageOptimum) -> bool {
        self.profit > other.profit
            || (self.profit == other.profit && self.wage_bill() < other.wage_bill())
    }
}

/// Profit evaluator that warm-starts each equilibrium solve from the
/// previous probe.
struct Evaluator<'a> {
    problem: &'a PolicyProblem,
    own_tip_rate: f64,
    seed: State,
}

impl Evaluator<'_> {
    fn eval(&mut self, waiter_pay: f64, cook_pay: f64) -> Result<WageOptimum, PolicyError> {
        let cfg = self.problem.config_with(self.own_tip_rate, waiter_pay, cook_pay);
        let fp = equilibrium::solve_fixed_point(&cfg, self.seed)
            .or_else(|_| equilibrium::solve_fixed_point(&cfg, State::PARITY))
            .map_err(|source| PolicyError::Probe {
                waiter_pay,
                cook_pay,
                source,
            })?;
        self.seed = fp.state;
        Ok(WageOptimum {
            waiter_pay,
            cook_pay,
            profit: model::profit(&cfg, &fp.state),
            state: fp.state,
        })
    }
}

fn axis(lo: f64, hi: f64, n: usize, phase: f64) -> Vec<f64> {
    if hi - lo <= 0.0 || n < 2 {
        return vec![lo];
    }
    let cell = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| lo + (i as f64 + phase) * cell)
        .filter(|&x| x <= hi)
        .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes along one wage axis within `[lo, hi]`, also checking the
/// bracket ends so boundary optima are returned exactly.
fn golden_max(
    mut f: impl FnMut(f64) -> Result<WageOptimum, PolicyError>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<WageOptimum, PolicyError> {
    let mut best = f(lo)?;
    if hi <= lo {
        return Ok(best);
    }
    let end = f(hi)?;
    if end.beats(&best) {
        best = end;
    }
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1.profit >= f2.profit {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    for cand in [f1, f2] {
        if cand.beats(&best) {
            best = cand;
        }
    }
    Ok(best)
}

/// Best equilibrium profit over the legal wage box at our tip rate.
///
/// A coarse grid locates the basin; coordinate-wise golden-section search
/// then refines each wage within one grid cell of the incumbent.
pub fn optimize_wages(
    problem: &PolicyProblem,
    own_tip_rate: f64,
    opts: &OptimizerOptions,
) -> Result<WageOptimum, PolicyError> {
    if !(0.0..1.0).contains(&own_tip_rate) {
        return Err(PolicyError::TipRateOutOfRange(own_tip_rate));
    }
    let cfg = problem.base();
    let (w_lo, w_hi) = (problem.waiter_floor(own_tip_rate), cfg.wage_cap);
    let (c_lo, c_hi) = (cfg.min_wage_untipped, cfg.wage_cap);
    let mut eval = Evaluator {
        problem,
        own_tip_rate,
        seed: State::PARITY,
    };

    let waiter_axis = axis(w_lo, w_hi, opts.grid, opts.grid_phase);
    let cook_axis = axis(c_lo, c_hi, opts.grid, opts.grid_phase);
    let mut best: Option<WageOptimum> = None;
    for &bw in &waiter_axis {
        for &bc in &cook_axis {
            let cand = eval.eval(bw, bc)?;
            if best.is_none_or(|b| cand.beats(&b)) {
                best = Some(cand);
            }
        }
        // Each row starts from the incumbent so warm starts stay nearby.
        eval.seed = best.map_or(State::PARITY, |b| b.state);
    }
    let mut best = best.expect("wage axes are never empty");

    let w_cell = if waiter_axis.len() > 1 { waiter_axis[1] - waiter_axis[0] } else { 0.0 };
    let c_cell = if cook_axis.len() > 1 { cook_axis[1] - cook_axis[0] } else { 0.0 };
    for _ in 0..opts.max_sweeps {
        let before = best;
        eval.seed = best.state;
        let cook_pay = best.cook_pay;
        let cand = golden_max(
            |bw| eval.eval(bw, cook_pay),
            (best.waiter_pay - w_cell).max(w_lo),
            (best.waiter_pay + w_cell).min(w_hi),
            opts.wage_tol,
        )?;
        if cand.beats(&best) {
            best = cand;
        }
        eval.seed = best.state;
        let waiter_pay = best.waiter_pay;
        let cand = golden_max(
            |bc| eval.eval(waiter_pay, bc),
            (best.cook_pay - c_cell).max(c_lo),
            (best.cook_pay + c_cell).min(c_hi),
            opts.wage_tol,
        )?;
        if cand.beats(&best) {
            best = cand;
        }
        let moved = (best.waiter_pay - before.waiter_pay)
            .abs()
            .max((best.cook_pay - before.cook_pay).abs());
        if moved < opts.wage_tol {
            break;
        }
    }
    Ok(best)
}

/// One optimized branch at one conventional tip rate, with the
/// quality/price diagnostics diners see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyPoint {
    pub conventional_rate: f64,
    pub policy: TipPolicy,
    pub optimum: WageOptimum,
    /// `bW1 + g1`.
    pub waiter_total_pay: f64,
    /// `q1 / q2`.
    pub quality_ratio: f64,
    /// `m1 (1 + T1) / (m2 (1 + T2))`.
    pub price_ratio: f64,
    /// `v1 / v2`.
    pub value_ratio: f64,
    /// `bW1 / (bW1 + g1)`.
    pub base_pay_fraction: f64,
}

impl PolicyPoint {
    fn new(problem: &PolicyProblem, policy: TipPolicy, optimum: WageOptimum) -> Self {
        let t1 = problem.own_tip_rate(policy);
        let cfg = problem.config_with(t1, optimum.waiter_pay, optimum.cook_pay);
        let q = model::quantities(&cfg, &optimum.state);
        let total = optimum.waiter_pay + q.gratuity[0];
        Self {
            conventional_rate: problem.conventional_rate(),
            policy,
            optimum,
            waiter_total_pay: total,
            quality_ratio: q.quality[0] / q.quality[1],
            price_ratio: cfg.ours.menu_price * (1.0 + cfg.ours.tip_rate)
                / (cfg.rival.menu_price * (1.0 + cfg.rival.tip_rate)),
            value_ratio: q.value[0] / q.value[1],
            base_pay_fraction: optimum.waiter_pay / total,
        }
    }
}

pub fn evaluate_policy(
    problem: &PolicyProblem,
    policy: TipPolicy,
    opts: &OptimizerOptions,
) -> Result<PolicyPoint, PolicyError> {
    let optimum = optimize_wages(problem, problem.own_tip_rate(policy), opts)?;
    Ok(PolicyPoint::new(problem, policy, optimum))
}

/// Optimized profit of forbidding minus allowing tips.
pub fn forbid_advantage(
    problem: &PolicyProblem,
    conventional_rate: f64,
    opts: &OptimizerOptions,
) -> Result<f64, PolicyError> {
    let p = problem.with_conventional_rate(conventional_rate);
    let forbid = optimize_wages(&p, 0.0, opts)?;
    let allow = optimize_wages(&p, conventional_rate, opts)?;
    Ok(forbid.profit - allow.profit)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub tc: Option<f64>,
    pub tip_grid: Vec<f64>,
    pub allow: Vec<PolicyPoint>,
    pub forbid: Vec<PolicyPoint>,
}

impl ThresholdResult {
    pub fn profit_allow(&self) -> Vec<f64> {
        self.allow.iter().map(|p| p.optimum.profit).collect()
    }

    pub fn profit_forbid(&self) -> Vec<f64> {
        self.forbid.iter().map(|p| p.optimum.profit).collect()
    }

    /// `forbid - allow` at each grid point.
    pub fn advantage(&self) -> Vec<f64> {
        self.allow
            .iter()
            .zip(&self.forbid)
            .map(|(a, f)| f.optimum.profit - a.optimum.profit)
            .collect()
    }

    pub const CSV_HEADER: &'static str = "tip_rate,policy,profit,waiter_base_pay,cook_pay,\
waiter_total_pay,quality_ratio,price_ratio,value_ratio,base_pay_fraction,D,W,C";

    /// One row per (tip rate, policy), then a `# Tc` summary line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for (a, f) in self.allow.iter().zip(&self.forbid) {
            for p in [a, f] {
                let o = &p.optimum;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    p.conventional_rate,
                    p.policy,
                    o.profit,
                    o.waiter_pay,
                    o.cook_pay,
                    p.waiter_total_pay,
                    p.quality_ratio,
                    p.price_ratio,
                    p.value_ratio,
                    p.base_pay_fraction,
                    o.state.diners,
                    o.state.waiters,
                    o.state.cooks
                )?;
            }
        }
        match self.tc {
            Some(tc) => writeln!(out, "# Tc={tc}"),
            None => writeln!(out, "# Tc=none"),
        }
    }
}

fn check_grid(grid: &[f64]) -> Result<(), PolicyError> {
    if grid.is_empty() {
        return Err(PolicyError::InvalidGrid("empty".into()));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(PolicyError::InvalidGrid("not strictly ascending".into()));
    }
    if grid.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(PolicyError::InvalidGrid("tip rates must lie in [0, 1)".into()));
    }
    Ok(())
}

/// Both optimized branches at every conventional rate in `tip_grid`.
///
/// Grid points are evaluated in parallel; results keep grid order.
pub fn profit_curves(
    problem: &PolicyProblem,
    tip_grid: &[f64],
    opts: &OptimizerOptions,
) -> Result<ThresholdResult, PolicyError> {
    check_grid(tip_grid)?;
    let points = tip_grid
        .par_iter()
        .enumerate()
        .map(|(index, &rate)| {
            let p = problem.with_conventional_rate(rate);
            let wrap = |source: PolicyError| PolicyError::GridPoint {
                index,
                tip_rate: rate,
                source: Box::new(source),
            };
            let allow = evaluate_policy(&p, TipPolicy::Allow, opts).map_err(wrap)?;
            let forbid = evaluate_policy(&p, TipPolicy::Forbid, opts).map_err(wrap)?;
            Ok((allow, forbid))
        })
        .collect::<Result<Vec<_>, PolicyError>>()?;
    let (allow, forbid) = points.into_iter().unzip();
    Ok(ThresholdResult {
        tc: None,
        tip_grid: tip_grid.to_vec(),
        allow,
        forbid,
    })
}

/// Grid cells whose advantage changes sign, as `(left index, upward)`
/// where `upward` means forbidding starts winning.
fn sign_changes(advantage: &[f64]) -> Vec<(usize, bool)> {
    advantage
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let (a, b) = (w[0] > 0.0, w[1] > 0.0);
            (a != b).then_some((i, b))
        })
        .collect()
}

fn resolve_crossing(
    problem: &PolicyProblem,
    grid: &[f64],
    advantage: &[f64],
    tol: f64,
    opts: &OptimizerOptions,
) -> Result<f64, PolicyError> {
    let changes = sign_changes(advantage);
    match changes.as_slice() {
        [] => Err(PolicyError::NoThreshold {
            lo: grid[0],
            hi: grid[grid.len() - 1],
            dominant: if advantage[0] > 0.0 {
                TipPolicy::Forbid
            } else {
                TipPolicy::Allow
            },
        }),
        [(i, true)] => bisect(
            |t| forbid_advantage(problem, t, opts),
            grid[*i],
            grid[*i + 1],
            advantage[*i],
            tol,
        ),
        [(i, false)] => Err(PolicyError::ReversedCrossing {
            at: 0.5 * (grid[*i] + grid[*i + 1]),
        }),
        many => Err(PolicyError::MultipleCrossings {
            crossings: many
                .iter()
                .map(|(i, _)| 0.5 * (grid[*i] + grid[*i + 1]))
                .collect(),
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    /// Conventional-rate bracket searched for the crossing.
    pub bracket: (f64, f64),
    /// Points in the preliminary scan that must show a single crossing.
    pub scan_points: usize,
    /// Bisection tolerance on the tip rate.
    pub tol: f64,
    pub optimizer: OptimizerOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            bracket: (0.01, 0.5),
            scan_points: 9,
            tol: 1e-4,
            optimizer: OptimizerOptions::default(),
        }
    }
}

/// Profit curves over `tip_grid` plus the critical rate, bisected inside
/// the single grid cell where forbidding overtakes allowing.
pub fn threshold_analysis(
    problem: &PolicyProblem,
    tip_grid: &[f64],
    tol: f64,
    opts: &OptimizerOptions,
) -> Result<ThresholdResult, PolicyError> {
    let mut result = profit_curves(problem, tip_grid, opts)?;
    result.tc = match resolve_crossing(problem, tip_grid, &result.advantage(), tol, opts) {
        Ok(tc) => Some(tc),
        Err(PolicyError::NoThreshold { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(result)
}

/// Conventional tip rate at which forbidding tips becomes more profitable.
pub fn critical_tip_rate(
    problem: &PolicyProblem,
    opts: &ThresholdOptions,
) -> Result<f64, PolicyError> {
    let (lo, hi) = opts.bracket;
    if !(0.0 <= lo && lo < hi && hi < 1.0) {
        return Err(PolicyError::InvalidGrid(format!("bracket [{lo}, {hi}]")));
    }
    let grid = crate::roots::linspace(lo, hi, opts.scan_points.max(2));
    let advantage = grid
        .iter()
        .map(|&t| forbid_advantage(problem, t, &opts.optimizer))
        .collect::<Result<Vec<_>, _>>()?;
    resolve_crossing(problem, &grid, &advantage, opts.tol, &opts.optimizer)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub tc: Option<f64>,
}

/// Parameters the local threshold sweep accepts.
pub const SWEEP_PARAMS: [Param; 4] = [
    Param::MenuPrice,
    Param::FoodToService,
    Param::DinersPerWaiter,
    Param::CooksPerWaiter,
];

/// Critical tip rate at each value of one system parameter.
pub fn local_sweep(
    problem: &PolicyProblem,
    param: Param,
    grid: &[f64],
    opts: &ThresholdOptions,
) -> Result<Vec<SweepPoint>, PolicyError> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(PolicyError::UnsupportedSweep { param });
    }
    grid.par_iter()
        .map(|&value| {
            let p = problem.with_param(param, value)?;
            let tc = match critical_tip_rate(&p, opts) {
                Ok(tc) => Some(tc),
                Err(PolicyError::NoThreshold { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepPoint { value, tc })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(param: Param, points: &[SweepPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "{param},Tc")?;
    for p in points {
        match p.tc {
            Some(tc) => writeln!(out, "{},{}", p.value, tc)?,
            None => writeln!(out, "{},none", p.value)?,
        }
    }
    Ok(())
}
