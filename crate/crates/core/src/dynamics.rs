//! Fixed-step RK4 integration of the normalized system and settling to
//! steady state.

use std::io::{self, Write};

use thiserror::Error;

use crate::model::{self, max_norm, EcosystemConfig, ModelError, State};

pub const DEFAULT_MAX_STEP: f64 = 0.01;
/// Largest boundary overshoot a single step may produce before the step is
/// considered too coarse.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("initial state ({d}, {w}, {c}) is outside the unit cube", d = .0.diners, w = .0.waiters, c = .0.cooks)]
    InitialOutOfRange(State),
    #[error("invalid integration setting: {0}")]
    InvalidSetting(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("state left the unit cube by {overshoot:e} at t = {time}; step is too large")]
    ExcessiveClamp { time: f64, overshoot: f64 },
    #[error("no steady state within t = {t_max} (residual {residual:e})")]
    NotConverged { t_max: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub config: EcosystemConfig,
    /// Largest clamp applied to any stored state.
    pub max_clamp: f64,
}

impl Trajectory {
    pub fn last(&self) -> State {
        *self.states.last().expect("trajectory holds the initial state")
    }

    /// Writes `t,D,W,C,v1,v2,g1,g2,P` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,D,W,C,v1,v2,g1,g2,P")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let q = model::quantities(&self.config, s);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                t,
                s.diners,
                s.waiters,
                s.cooks,
                q.value[0],
                q.value[1],
                q.gratuity[0],
                q.gratuity[1],
                q.profit
            )?;
        }
        Ok(())
    }
}

fn axpy(x: [f64; 3], a: f64, k: [f64; 3]) -> State {
    State::new(x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2])
}

/// One classic RK4 step given the slope at the start of the step.
fn rk4_step(
    cfg: &EcosystemConfig,
    x: [f64; 3],
    k1: [f64; 3],
    h: f64,
) -> Result<[f64; 3], ModelError> {
    let k2 = model::rhs(cfg, &axpy(x, 0.5 * h, k1))?;
    let k3 = model::rhs(cfg, &axpy(x, 0.5 * h, k2))?;
    let k4 = model::rhs(cfg, &axpy(x, h, k3))?;
    let mut next = [0.0; 3];
    for i in 0..3 {
        next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(next)
}

/// Clamps into `[0, 1]^3` and returns the clamp magnitude.
fn clamp(x: &mut [f64; 3]) -> f64 {
    let mut overshoot: f64 = 0.0;
    for v in x.iter_mut() {
        let c = v.clamp(0.0, 1.0);
        overshoot = overshoot.max((c - *v).abs());
        *v = c;
    }
    overshoot
}

fn check_initial(initial: &State) -> Result<(), DynamicsError> {
    if initial.in_unit_cube() {
        Ok(())
    } else {
        Err(DynamicsError::InitialOutOfRange(*initial))
    }
}

/// Integrates from `t = 0` to `t_end` with equal steps no larger than
/// `max_step`.
pub fn integrate(
    cfg: &EcosystemConfig,
    initial: State,
    t_end: f64,
    max_step: f64,
) -> Result<Trajectory, DynamicsError> {
    check_initial(&initial)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(DynamicsError::InvalidSetting(format!(
            "end time must be positive, got {t_end}"
        )));
    }
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(DynamicsError::InvalidSetting(format!(
            "step must be positive, got {max_step}"
        )));
    }

    let steps = (t_end / max_step).ceil() as usize;
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(initial);

    let mut x = initial.to_array();
    let mut max_clamp: f64 = 0.0;
    for i in 1..=steps {
        let k1 = model::rhs(cfg, &State::from_array(x))?;
        x = rk4_step(cfg, x, k1, h)?;
        let t = i as f64 * h;
        let overshoot = clamp(&mut x);
        if overshoot > CLAMP_TOLERANCE {
            return Err(DynamicsError::ExcessiveClamp { time: t, overshoot });
        }
        max_clamp = max_clamp.max(overshoot);
        times.push(t);
        states.push(State::from_array(x));
    }

    Ok(Trajectory {
        times,
        states,
        config: *cfg,
        max_clamp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettleOptions {
    /// Convergence threshold on the max-norm of the rates.
    pub tol: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for SettleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            t_max: 1e5,
            step: DEFAULT_MAX_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settled {
    pub state: State,
    /// Dimensionless time at which the residual first fell below tolerance.
    pub time: f64,
    pub residual: f64,
}

/// Integrates until the rates vanish to within `opts.tol`.
pub fn settle(
    cfg: &EcosystemConfig,
    initial: State,
    opts: &SettleOptions,
) -> Result<Settled, DynamicsError> {
    check_initial(&initial)?;
    if !(opts.step > 0.0 && opts.tol > 0.0 && opts.t_max > 0.0) {
        return Err(DynamicsError::InvalidSetting(format!("{opts:?}")));
    }

    let mut x = initial.to_array();
    let mut t = 0.0;
    let mut steps: u64 = 0;
    loop {
        let k1 = model::rhs(cfg, &State::from_array(x))?;
        let residual = max_norm(&k1);
        if residual < opts.tol {
            return Ok(Settled {
                state: State::from_array(x),
                time: t,
                residual,
            });
        }
        if t >= opts.t_max {
            return Err(DynamicsError::NotConverged {
                t_max: opts.t_max,
                residual,
            });
        }
        x = rk4_step(cfg, x, k1, opts.step)?;
        steps += 1;
        t = steps as f64 * opts.step;
        let overshoot = clamp(&mut x);
        if overshoot > CLAMP_TOLERANCE {
            return Err(DynamicsError::ExcessiveClamp { time: t, overshoot });
        }
    }
}
