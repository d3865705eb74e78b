//! Fixed points, their Jacobians and stability, and nullclines.
//!
//! The cook share decouples from the rest of the system and has the closed
//! form `bC1 / (bC1 + bC2)`. With the cook share pinned there, the diner
//! and waiter shares are found by damped Newton iteration; long-time
//! integration is the fallback when Newton stalls.

mod eigen;
mod nullcline;

pub use eigen::{
    classify_stability, cubic_roots, eigenvalues2, eigenvalues3, quadratic_roots, Matrix3,
    Stability, IMAG_TOLERANCE, MARGINAL_TOLERANCE,
};
pub use nullcline::{distance_to_polyline, nullclines, Nullclines};

use std::fmt;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{self, SettleOptions};
use crate::model::{self, max_norm, EcosystemConfig, ModelError, State};

/// Largest admissible max-norm of the rates at a reported fixed point.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const NEWTON_MAX_ITERATIONS: usize = 60;
/// Finite-difference step for the reported Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Relative agreement required between steps `h` and `h/2`.
pub const JACOBIAN_AGREEMENT: f64 = 1e-6;

const NEWTON_TARGET: f64 = 1e-14;
const NEWTON_FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("cook pay is zero at both restaurants; the cook split is undefined")]
    UndefinedCookSplit,
    #[error("seed ({d}, {w}, {c}) is outside the unit cube", d = .0.diners, w = .0.waiters, c = .0.cooks)]
    SeedOutOfRange(State),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("newton and settling both failed: {newton}; {settle}")]
    NoConvergence { newton: String, settle: String },
    #[error("fixed point ({d}, {w}, {c}) lies outside the unit cube", d = .0.diners, w = .0.waiters, c = .0.cooks)]
    Escaped(State),
    #[error("finite-difference jacobian unstable in entries {entries:?}")]
    JacobianMismatch { entries: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveMethod {
    Newton,
    Settle,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMethod::Newton => "newton",
            SolveMethod::Settle => "settle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub state: State,
    pub residual: f64,
    pub method: SolveMethod,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub fixed_point: State,
    pub residual: f64,
    pub jacobian: Matrix3,
    pub eigenvalues: [Complex64; 3],
    pub classification: Stability,
    pub method: SolveMethod,
}

impl EquilibriumReport {
    pub const CSV_HEADER: &'static str = "D,W,C,residual,method,classification,\
eig1_re,eig1_im,eig2_re,eig2_im,eig3_re,eig3_im,\
j11,j12,j13,j21,j22,j23,j31,j32,j33";

    pub fn csv_row(&self) -> String {
        let mut fields = vec![
            self.fixed_point.diners.to_string(),
            self.fixed_point.waiters.to_string(),
            self.fixed_point.cooks.to_string(),
            self.residual.to_string(),
            self.method.to_string(),
            self.classification.to_string(),
        ];
        for z in &self.eigenvalues {
            fields.push(z.re.to_string());
            fields.push(z.im.to_string());
        }
        for row in &self.jacobian {
            fields.extend(row.iter().map(f64::to_string));
        }
        fields.join(",")
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        writeln!(out, "{}", self.csv_row())
    }
}

/// Steady-state cook share `bC1 / (bC1 + bC2)`.
pub fn cook_equilibrium(cfg: &EcosystemConfig) -> Result<f64, EquilibriumError> {
    let (ours, rival) = (cfg.ours.cook_pay, cfg.rival.cook_pay);
    if ours + rival == 0.0 {
        return Err(EquilibriumError::UndefinedCookSplit);
    }
    Ok(ours / (ours + rival))
}

fn reduced(cfg: &EcosystemConfig, x: [f64; 2], cooks: f64) -> Result<[f64; 2], ModelError> {
    let r = model::rhs(cfg, &State::new(x[0], x[1], cooks))?;
    Ok([r[0], r[1]])
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Damped Newton on the diner/waiter rates with the cook share pinned.
fn newton(cfg: &EcosystemConfig, seed: [f64; 2], cooks: f64) -> Result<[f64; 2], String> {
    let mut x = [seed[0].clamp(0.0, 1.0), seed[1].clamp(0.0, 1.0)];
    let mut f = reduced(cfg, x, cooks).map_err(|e| e.to_string())?;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let norm = norm2(f);
        if norm <= NEWTON_TARGET {
            return Ok(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut plus = x;
            let mut minus = x;
            plus[k] += NEWTON_FD_STEP;
            minus[k] -= NEWTON_FD_STEP;
            let fp = reduced(cfg, plus, cooks).map_err(|e| e.to_string())?;
            let fm = reduced(cfg, minus, cooks).map_err(|e| e.to_string())?;
            for i in 0..2 {
                jac[i][k] = (fp[i] - fm[i]) / (2.0 * NEWTON_FD_STEP);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(format!("singular jacobian at ({}, {})", x[0], x[1]));
        }
        let step = [
            -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
            -(jac[0][0] * f[1] - jac[1][0] * f[0]) / det,
        ];

        let mut damping = 1.0;
        loop {
            let trial = [
                (x[0] + damping * step[0]).clamp(0.0, 1.0),
                (x[1] + damping * step[1]).clamp(0.0, 1.0),
            ];
            let ft = reduced(cfg, trial, cooks).map_err(|e| e.to_string())?;
            if norm2(ft) < norm {
                let moved = (trial[0] - x[0]).abs().max((trial[1] - x[1]).abs());
                x = trial;
                f = ft;
                if moved == 0.0 {
                    return Ok(x);
                }
                break;
            }
            damping *= 0.5;
            if damping < 1e-12 {
                // No further decrease is possible; accept if already tight.
                if norm <= RESIDUAL_TOLERANCE * 1e-2 {
                    return Ok(x);
                }
                return Err(format!("newton stalled at residual {norm:e}"));
            }
        }
    }
    if norm2(f) <= RESIDUAL_TOLERANCE * 1e-2 {
        Ok(x)
    } else {
        Err(format!(
            "newton did not converge in {NEWTON_MAX_ITERATIONS} iterations (residual {:e})",
            norm2(f)
        ))
    }
}

fn accept(cfg: &EcosystemConfig, x: [f64; 2], cooks: f64) -> Result<(State, f64), String> {
    let state = State::new(x[0], x[1], cooks);
    let residual = max_norm(&model::rhs(cfg, &state).map_err(|e| e.to_string())?);
    if residual < RESIDUAL_TOLERANCE {
        Ok((state, residual))
    } else {
        Err(format!("residual {residual:e} above tolerance"))
    }
}

/// Locates the meaningful fixed point without building a full report.
pub fn solve_fixed_point(
    cfg: &EcosystemConfig,
    seed: State,
) -> Result<FixedPoint, EquilibriumError> {
    if !seed.in_unit_cube() {
        return Err(EquilibriumError::SeedOutOfRange(seed));
    }
    let cooks = cook_equilibrium(cfg)?;

    let newton_err = match newton(cfg, [seed.diners, seed.waiters], cooks)
        .and_then(|x| accept(cfg, x, cooks))
    {
        Ok((state, residual)) => {
            return finish(state, residual, SolveMethod::Newton);
        }
        Err(e) => e,
    };

    let settled = dynamics::settle(cfg, seed, &SettleOptions::default()).map_err(|e| {
        EquilibriumError::NoConvergence {
            newton: newton_err.clone(),
            settle: e.to_string(),
        }
    })?;
    let s = settled.state;
    let polished = newton(cfg, [s.diners, s.waiters], cooks)
        .unwrap_or([s.diners, s.waiters]);
    match accept(cfg, polished, cooks) {
        Ok((state, residual)) => finish(state, residual, SolveMethod::Settle),
        Err(e) => Err(EquilibriumError::NoConvergence {
            newton: newton_err,
            settle: e,
        }),
    }
}

fn finish(state: State, residual: f64, method: SolveMethod) -> Result<FixedPoint, EquilibriumError> {
    if state.in_unit_cube() {
        Ok(FixedPoint {
            state,
            residual,
            method,
        })
    } else {
        Err(EquilibriumError::Escaped(state))
    }
}

fn central_jacobian(cfg: &EcosystemConfig, state: &State, h: f64) -> Result<Matrix3, ModelError> {
    let x = state.to_array();
    let mut jac = [[0.0; 3]; 3];
    for k in 0..3 {
        let mut plus = x;
        let mut minus = x;
        plus[k] += h;
        minus[k] -= h;
        let fp = model::rhs(cfg, &State::from_array(plus))?;
        let fm = model::rhs(cfg, &State::from_array(minus))?;
        for i in 0..3 {
            jac[i][k] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Central-difference Jacobian of the rates, cross-checked against half
/// the step.
pub fn jacobian(cfg: &EcosystemConfig, state: &State) -> Result<Matrix3, EquilibriumError> {
    let coarse = central_jacobian(cfg, state, JACOBIAN_STEP)?;
    let fine = central_jacobian(cfg, state, 0.5 * JACOBIAN_STEP)?;
    let mut suspect = Vec::new();
    for i in 0..3 {
        for k in 0..3 {
            let scale = coarse[i][k].abs().max(1.0);
            if (coarse[i][k] - fine[i][k]).abs() > JACOBIAN_AGREEMENT * scale {
                suspect.push((i, k));
            }
        }
    }
    if suspect.is_empty() {
        Ok(coarse)
    } else {
        Err(EquilibriumError::JacobianMismatch { entries: suspect })
    }
}

/// Finds the fixed point from `seed` and characterizes its stability.
pub fn find_equilibrium(
    cfg: &EcosystemConfig,
    seed: State,
) -> Result<EquilibriumReport, EquilibriumError> {
    let fp = solve_fixed_point(cfg, seed)?;
    let jac = jacobian(cfg, &fp.state)?;
    let eigenvalues = eigenvalues3(&jac);
    Ok(EquilibriumReport {
        fixed_point: fp.state,
        residual: fp.residual,
        jacobian: jac,
        eigenvalues,
        classification: classify_stability(&eigenvalues),
        method: fp.method,
    })
}
