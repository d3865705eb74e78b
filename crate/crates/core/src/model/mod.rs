//! Normalized diner/waiter/cook dynamics and the instantaneous quantities
//! that drive them.
//!
//! The state is the fraction of each population currently at our
//! restaurant. Every transition term has the form
//! `(1 - x) * share_in - x * share_out` where the shares are the relative
//! utilities of the two restaurants (value for diners, take-home pay for
//! waiters, base pay for cooks).

mod config;

pub use config::{
    ConfigError, EcosystemConfig, GratuityConvention, Param, QualityFormulation, Restaurant,
    RestaurantParams, Violation, DEFAULT_WAGE_CAP, MIN_WAGE_TIPPED, MIN_WAGE_UNTIPPED,
};

use thiserror::Error;

/// Lower clamp on the waiter share used as a gratuity denominator.
pub const WAITER_SHARE_FLOOR: f64 = 1e-9;

/// Fractions of diners, waiters and cooks at our restaurant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub diners: f64,
    pub waiters: f64,
    pub cooks: f64,
}

impl State {
    pub const PARITY: State = State {
        diners: 0.5,
        waiters: 0.5,
        cooks: 0.5,
    };

    pub fn new(diners: f64, waiters: f64, cooks: f64) -> Self {
        Self {
            diners,
            waiters,
            cooks,
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.diners, self.waiters, self.cooks]
    }

    /// The same populations seen from the rival's side.
    pub fn mirrored(self) -> Self {
        Self::new(1.0 - self.diners, 1.0 - self.waiters, 1.0 - self.cooks)
    }

    pub fn in_unit_cube(self) -> bool {
        self.to_array().iter().all(|x| (0.0..=1.0).contains(x))
    }

    pub fn max_abs_diff(self, other: State) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Everything diners, waiters and the owner observe at a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantaneousQuantities {
    /// Perceived value (quality per effective meal price), 1/$.
    pub value: [f64; 2],
    /// Hourly gratuity per waiter, $/hr.
    pub gratuity: [f64; 2],
    /// Quality in the units of the active formulation.
    pub quality: [f64; 2],
    /// Our hourly profit per waiter in the system, $/hr.
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("non-finite {term} at state ({d}, {w}, {c})", d = .state.diners, w = .state.waiters, c = .state.cooks)]
    NonFinite { term: &'static str, state: State },
}

fn index(which: Restaurant) -> usize {
    match which {
        Restaurant::Ours => 0,
        Restaurant::Rival => 1,
    }
}

/// `a / (a + b)`, or one half when both utilities vanish.
#[inline]
pub(crate) fn share(a: f64, b: f64) -> f64 {
    let total = a + b;
    if total == 0.0 {
        0.5
    } else {
        a / total
    }
}

#[inline]
fn gratuities(cfg: &EcosystemConfig, s: &State) -> [f64; 2] {
    let ours = cfg.ours.menu_price * cfg.diners_per_waiter * s.diners * cfg.ours.tip_rate
        / s.waiters.max(WAITER_SHARE_FLOOR);
    let rival_waiters = match cfg.gratuity {
        GratuityConvention::SymmetricDenominator => 1.0 - s.waiters,
        GratuityConvention::AsPrinted => s.waiters,
    };
    let rival = cfg.rival.menu_price
        * cfg.diners_per_waiter
        * (1.0 - s.diners)
        * cfg.rival.tip_rate
        / rival_waiters.max(WAITER_SHARE_FLOOR);
    [ours, rival]
}

#[inline]
fn qualities(cfg: &EcosystemConfig, s: &State, g: &[f64; 2]) -> [f64; 2] {
    let r = cfg.food_to_service;
    let rcw = cfg.cooks_per_waiter;
    let (ours, rival) = (&cfg.ours, &cfg.rival);
    match cfg.quality {
        QualityFormulation::StaffCount => [
            s.waiters + r * rcw * s.cooks,
            (1.0 - s.waiters) + r * rcw * (1.0 - s.cooks),
        ],
        QualityFormulation::StaffPay => [
            (ours.waiter_pay + g[0]) + r * ours.cook_pay,
            (rival.waiter_pay + g[1]) + r * rival.cook_pay,
        ],
        QualityFormulation::StaffCountTimesPay => [
            s.waiters * (ours.waiter_pay + g[0]) + r * rcw * s.cooks * ours.cook_pay,
            (1.0 - s.waiters) * (rival.waiter_pay + g[1])
                + r * rcw * (1.0 - s.cooks) * rival.cook_pay,
        ],
    }
}

#[inline]
fn values(cfg: &EcosystemConfig, q: &[f64; 2]) -> [f64; 2] {
    [
        q[0] / (cfg.ours.menu_price * (1.0 + cfg.ours.tip_rate)),
        q[1] / (cfg.rival.menu_price * (1.0 + cfg.rival.tip_rate)),
    ]
}

pub fn gratuity(cfg: &EcosystemConfig, state: &State, which: Restaurant) -> f64 {
    gratuities(cfg, state)[index(which)]
}

pub fn quality(cfg: &EcosystemConfig, state: &State, which: Restaurant) -> f64 {
    let g = gratuities(cfg, state);
    qualities(cfg, state, &g)[index(which)]
}

/// Quality over the effective meal price `m * (1 + T)`.
pub fn value(cfg: &EcosystemConfig, state: &State, which: Restaurant) -> f64 {
    let g = gratuities(cfg, state);
    values(cfg, &qualities(cfg, state, &g))[index(which)]
}

/// Our hourly profit per waiter in the system: revenue minus waiter and
/// cook payroll.
pub fn profit(cfg: &EcosystemConfig, state: &State) -> f64 {
    cfg.ours.menu_price * cfg.diners_per_waiter * state.diners
        - cfg.ours.waiter_pay * state.waiters
        - cfg.ours.cook_pay * cfg.cooks_per_waiter * state.cooks
}

pub fn quantities(cfg: &EcosystemConfig, state: &State) -> InstantaneousQuantities {
    let gratuity = gratuities(cfg, state);
    let quality = qualities(cfg, state, &gratuity);
    InstantaneousQuantities {
        value: values(cfg, &quality),
        gratuity,
        quality,
        profit: profit(cfg, state),
    }
}

/// Time derivative of `(D, W, C)`.
pub fn rhs(cfg: &EcosystemConfig, state: &State) -> Result<[f64; 3], ModelError> {
    let fail = |term| ModelError::NonFinite {
        term,
        state: *state,
    };
    let g = gratuities(cfg, state);
    if !g[0].is_finite() || !g[1].is_finite() {
        return Err(fail("gratuity"));
    }
    let v = values(cfg, &qualities(cfg, state, &g));
    if !v[0].is_finite() || !v[1].is_finite() {
        return Err(fail("value"));
    }

    let diner_in = share(v[0], v[1]);
    let diner_out = share(v[1], v[0]);
    let pay = [
        cfg.ours.waiter_pay + g[0],
        cfg.rival.waiter_pay + g[1],
    ];
    let waiter_in = share(pay[0], pay[1]);
    let waiter_out = share(pay[1], pay[0]);
    let cook_in = share(cfg.ours.cook_pay, cfg.rival.cook_pay);
    let cook_out = share(cfg.rival.cook_pay, cfg.ours.cook_pay);

    let d = (1.0 - state.diners) * diner_in - state.diners * diner_out;
    let w = (1.0 - state.waiters) * waiter_in - state.waiters * waiter_out;
    let c = (1.0 - state.cooks) * cook_in - state.cooks * cook_out;

    if !d.is_finite() {
        return Err(fail("diner rate"));
    }
    if !w.is_finite() {
        return Err(fail("waiter rate"));
    }
    if !c.is_finite() {
        return Err(fail("cook rate"));
    }
    Ok([d, w, c])
}

pub(crate) fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}
