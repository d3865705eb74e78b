//! Ecosystem parameters for the two competing restaurants.
//!
//! Restaurant 1 ("ours") and restaurant 2 ("rival") each carry a menu price,
//! a tip rate and base pay for waiters and cooks. The remaining parameters
//! describe the system as a whole: the food-to-service importance ratio and
//! the cook/diner head-count ratios relative to waiters. Legal wage floors
//! and the wage cap only matter to the policy optimizer.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Federal minimum cash wage for tipped workers, $/hr.
pub const MIN_WAGE_TIPPED: f64 = 2.13;
/// Federal minimum wage for untipped workers, $/hr.
pub const MIN_WAGE_UNTIPPED: f64 = 7.25;
/// Upper bound on either base wage during policy optimization, $/hr.
pub const DEFAULT_WAGE_CAP: f64 = 50.0;

/// How diners score a restaurant's quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QualityFormulation {
    /// Weighted head count: `W + r * rCW * C`.
    StaffCount,
    /// Weighted pay: `(bW + g) + r * bC`.
    StaffPay,
    /// Weighted payroll: `W * (bW + g) + r * rCW * C * bC`.
    StaffCountTimesPay,
}

/// Denominator used for the rival's per-waiter gratuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GratuityConvention {
    /// Rival tips split by our waiter share `W`, as typeset in the
    /// normalized model.
    AsPrinted,
    /// Rival tips split by the rival's own waiter share `1 - W`.
    SymmetricDenominator,
}

impl QualityFormulation {
    pub fn name(self) -> &'static str {
        match self {
            Self::StaffCount => "staff-count",
            Self::StaffPay => "staff-pay",
            Self::StaffCountTimesPay => "staff-count-times-pay",
        }
    }
}

impl GratuityConvention {
    pub fn name(self) -> &'static str {
        match self {
            Self::AsPrinted => "as-printed",
            Self::SymmetricDenominator => "symmetric",
        }
    }
}

impl fmt::Display for QualityFormulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for GratuityConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QualityFormulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "staff-count" | "StaffCount" => Ok(Self::StaffCount),
            "staff-pay" | "StaffPay" => Ok(Self::StaffPay),
            "staff-count-times-pay" | "StaffCountTimesPay" => Ok(Self::StaffCountTimesPay),
            other => Err(format!("unknown quality formulation '{other}'")),
        }
    }
}

impl FromStr for GratuityConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-printed" | "AsPrinted" => Ok(Self::AsPrinted),
            "symmetric" | "SymmetricDenominator" => Ok(Self::SymmetricDenominator),
            other => Err(format!("unknown gratuity convention '{other}'")),
        }
    }
}

/// Which of the two restaurants a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Restaurant {
    Ours,
    Rival,
}

/// Per-restaurant policy parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestaurantParams {
    /// Average menu cost per hour, $/hr.
    pub menu_price: f64,
    /// Tip rate as a fraction of the menu price.
    pub tip_rate: f64,
    /// Waiter base pay, $/hr.
    pub waiter_pay: f64,
    /// Cook base pay, $/hr.
    pub cook_pay: f64,
}

impl RestaurantParams {
    /// Midscale/upscale baseline restaurant.
    pub const BASELINE: RestaurantParams = RestaurantParams {
        menu_price: 10.0,
        tip_rate: 0.19,
        waiter_pay: 5.00,
        cook_pay: 10.40,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcosystemConfig {
    pub ours: RestaurantParams,
    pub rival: RestaurantParams,
    /// Importance of food relative to service for diners (`r`).
    pub food_to_service: f64,
    /// Total cooks per waiter in the system (`rCW`).
    pub cooks_per_waiter: f64,
    /// Total diners per waiter in the system (`rDW`).
    pub diners_per_waiter: f64,
    pub min_wage_tipped: f64,
    pub min_wage_untipped: f64,
    pub wage_cap: f64,
    pub quality: QualityFormulation,
    pub gratuity: GratuityConvention,
}

impl Default for EcosystemConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

impl EcosystemConfig {
    /// Two identical baseline restaurants.
    pub fn baseline() -> Self {
        Self {
            ours: RestaurantParams::BASELINE,
            rival: RestaurantParams::BASELINE,
            food_to_service: 12.0,
            cooks_per_waiter: 1.0,
            diners_per_waiter: 12.0,
            min_wage_tipped: MIN_WAGE_TIPPED,
            min_wage_untipped: MIN_WAGE_UNTIPPED,
            wage_cap: DEFAULT_WAGE_CAP,
            quality: QualityFormulation::StaffCount,
            gratuity: GratuityConvention::SymmetricDenominator,
        }
    }

    pub fn restaurant(&self, which: Restaurant) -> &RestaurantParams {
        match which {
            Restaurant::Ours => &self.ours,
            Restaurant::Rival => &self.rival,
        }
    }

    /// Sets both menu prices.
    pub fn with_menu_price(mut self, price: f64) -> Self {
        self.ours.menu_price = price;
        self.rival.menu_price = price;
        self
    }

    /// Exchanges the two restaurants' parameter sets.
    pub fn swapped(&self) -> Self {
        Self {
            ours: self.rival,
            rival: self.ours,
            ..*self
        }
    }

    /// Multiplies every price, wage, floor and cap by `factor`.
    pub fn price_scaled(&self, factor: f64) -> Self {
        let scale = |p: RestaurantParams| RestaurantParams {
            menu_price: p.menu_price * factor,
            tip_rate: p.tip_rate,
            waiter_pay: p.waiter_pay * factor,
            cook_pay: p.cook_pay * factor,
        };
        Self {
            ours: scale(self.ours),
            rival: scale(self.rival),
            min_wage_tipped: self.min_wage_tipped * factor,
            min_wage_untipped: self.min_wage_untipped * factor,
            wage_cap: self.wage_cap * factor,
            ..*self
        }
    }

    /// Checks every hard invariant and reports all violations at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations = Vec::new();
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                violations.push(Violation { field, message });
            }
        };

        for (suffix, p) in [("1", &self.ours), ("2", &self.rival)] {
            let m = p.menu_price;
            check(
                m.is_finite() && m > 0.0,
                field_name("m", suffix),
                format!("menu price must be positive, got {m}"),
            );
            let t = p.tip_rate;
            check(
                t.is_finite() && (0.0..1.0).contains(&t),
                field_name("T", suffix),
                format!("tip rate out of range [0, 1), got {t}"),
            );
            let bw = p.waiter_pay;
            check(
                bw.is_finite() && bw >= 0.0,
                field_name("bW", suffix),
                format!("waiter base pay must be non-negative, got {bw}"),
            );
            let bc = p.cook_pay;
            check(
                bc.is_finite() && bc >= 0.0,
                field_name("bC", suffix),
                format!("cook base pay must be non-negative, got {bc}"),
            );
        }
        for (field, v) in [
            ("r", self.food_to_service),
            ("rCW", self.cooks_per_waiter),
            ("rDW", self.diners_per_waiter),
        ] {
            check(
                v.is_finite() && v > 0.0,
                field,
                format!("ratio must be positive, got {v}"),
            );
        }
        let (lo, mid, hi) = (self.min_wage_tipped, self.min_wage_untipped, self.wage_cap);
        check(
            lo.is_finite() && lo >= 0.0,
            "minWageTipped",
            format!("wage floor must be non-negative, got {lo}"),
        );
        check(
            mid.is_finite() && lo <= mid,
            "minWageUntipped",
            format!("untipped floor {mid} is below tipped floor {lo}"),
        );
        check(
            hi.is_finite() && mid <= hi,
            "wageCap",
            format!("wage cap {hi} is below untipped floor {mid}"),
        );

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }

    pub fn validated(self) -> Result<Self, ConfigError> {
        self.validate().map(|()| self)
    }

    pub fn get(&self, param: Param) -> f64 {
        match param {
            Param::MenuPrice | Param::MenuPrice1 => self.ours.menu_price,
            Param::MenuPrice2 => self.rival.menu_price,
            Param::TipRate1 => self.ours.tip_rate,
            Param::TipRate2 => self.rival.tip_rate,
            Param::WaiterPay1 => self.ours.waiter_pay,
            Param::WaiterPay2 => self.rival.waiter_pay,
            Param::CookPay1 => self.ours.cook_pay,
            Param::CookPay2 => self.rival.cook_pay,
            Param::FoodToService => self.food_to_service,
            Param::CooksPerWaiter => self.cooks_per_waiter,
            Param::DinersPerWaiter => self.diners_per_waiter,
            Param::MinWageTipped => self.min_wage_tipped,
            Param::MinWageUntipped => self.min_wage_untipped,
            Param::WageCap => self.wage_cap,
        }
    }

    pub fn set(&mut self, param: Param, value: f64) {
        match param {
            Param::MenuPrice => {
                self.ours.menu_price = value;
                self.rival.menu_price = value;
            }
            Param::MenuPrice1 => self.ours.menu_price = value,
            Param::MenuPrice2 => self.rival.menu_price = value,
            Param::TipRate1 => self.ours.tip_rate = value,
            Param::TipRate2 => self.rival.tip_rate = value,
            Param::WaiterPay1 => self.ours.waiter_pay = value,
            Param::WaiterPay2 => self.rival.waiter_pay = value,
            Param::CookPay1 => self.ours.cook_pay = value,
            Param::CookPay2 => self.rival.cook_pay = value,
            Param::FoodToService => self.food_to_service = value,
            Param::CooksPerWaiter => self.cooks_per_waiter = value,
            Param::DinersPerWaiter => self.diners_per_waiter = value,
            Param::MinWageTipped => self.min_wage_tipped = value,
            Param::MinWageUntipped => self.min_wage_untipped = value,
            Param::WageCap => self.wage_cap = value,
        }
    }
}

fn field_name(stem: &str, suffix: &str) -> &'static str {
    match (stem, suffix) {
        ("m", "1") => "m1",
        ("m", _) => "m2",
        ("T", "1") => "T1",
        ("T", _) => "T2",
        ("bW", "1") => "bW1",
        ("bW", _) => "bW2",
        ("bC", "1") => "bC1",
        _ => "bC2",
    }
}

/// A numeric configuration field addressable by its short name.
///
/// `MenuPrice` (`m`) is the shared menu price and writes both restaurants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    MenuPrice,
    MenuPrice1,
    MenuPrice2,
    TipRate1,
    TipRate2,
    WaiterPay1,
    WaiterPay2,
    CookPay1,
    CookPay2,
    FoodToService,
    CooksPerWaiter,
    DinersPerWaiter,
    MinWageTipped,
    MinWageUntipped,
    WageCap,
}

impl Param {
    pub const ALL: [Param; 15] = [
        Param::MenuPrice,
        Param::MenuPrice1,
        Param::MenuPrice2,
        Param::TipRate1,
        Param::TipRate2,
        Param::WaiterPay1,
        Param::WaiterPay2,
        Param::CookPay1,
        Param::CookPay2,
        Param::FoodToService,
        Param::CooksPerWaiter,
        Param::DinersPerWaiter,
        Param::MinWageTipped,
        Param::MinWageUntipped,
        Param::WageCap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::MenuPrice => "m",
            Param::MenuPrice1 => "m1",
            Param::MenuPrice2 => "m2",
            Param::TipRate1 => "T1",
            Param::TipRate2 => "T2",
            Param::WaiterPay1 => "bW1",
            Param::WaiterPay2 => "bW2",
            Param::CookPay1 => "bC1",
            Param::CookPay2 => "bC2",
            Param::FoodToService => "r",
            Param::CooksPerWaiter => "rCW",
            Param::DinersPerWaiter => "rDW",
            Param::MinWageTipped => "minWageTipped",
            Param::MinWageUntipped => "minWageUntipped",
            Param::WageCap => "wageCap",
        }
    }

    /// Plausible range for midscale and upscale restaurants, where one exists.
    pub fn table_range(self) -> Option<(f64, f64)> {
        match self {
            Param::MenuPrice | Param::MenuPrice1 | Param::MenuPrice2 => Some((5.0, 20.0)),
            Param::TipRate1 | Param::TipRate2 => Some((0.01, 0.5)),
            Param::WaiterPay1 | Param::WaiterPay2 => Some((MIN_WAGE_TIPPED, 25.0)),
            Param::CookPay1 | Param::CookPay2 => Some((MIN_WAGE_UNTIPPED, 25.0)),
            Param::FoodToService => Some((4.0, 20.0)),
            Param::CooksPerWaiter => Some((0.5, 2.0)),
            Param::DinersPerWaiter => Some((1.0, 20.0)),
            Param::MinWageTipped | Param::MinWageUntipped | Param::WageCap => None,
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Param::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown parameter '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ConfigError {
    pub violations: Vec<Violation>,
}

impl ConfigError {
    pub fn fields(&self) -> Vec<&'static str> {
        self.violations.iter().map(|v| v.field).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_is_valid() {
        assert!(EcosystemConfig::baseline().validate().is_ok());
    }

    #[test]
    fn zero_menu_price_is_rejected() {
        let mut cfg = EcosystemConfig::baseline();
        cfg.ours.menu_price = 0.0;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.fields(), vec!["m1"]);
        assert!(err.to_string().contains("menu price must be positive"));
    }

    #[test]
    fn tip_rate_above_one_is_rejected() {
        let mut cfg = EcosystemConfig::baseline();
        cfg.ours.tip_rate = 1.2;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.fields(), vec!["T1"]);
        assert!(err.to_string().contains("tip rate out of range"));
    }

    #[test]
    fn every_violation_is_reported() {
        let mut cfg = EcosystemConfig::baseline();
        cfg.rival.menu_price = -1.0;
        cfg.rival.cook_pay = f64::NAN;
        cfg.cooks_per_waiter = 0.0;
        cfg.wage_cap = 1.0;
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.fields(), vec!["m2", "bC2", "rCW", "wageCap"]);
    }

    #[test]
    fn floors_must_be_ordered() {
        let mut cfg = EcosystemConfig::baseline();
        cfg.min_wage_tipped = 8.0;
        assert_eq!(cfg.validate().unwrap_err().fields(), vec!["minWageUntipped"]);
    }

    #[test]
    fn param_names_round_trip() {
        for p in Param::ALL {
            assert_eq!(p.name().parse::<Param>().unwrap(), p);
        }
        assert!("tipRate3".parse::<Param>().is_err());
    }

    #[test]
    fn shared_menu_price_writes_both() {
        let mut cfg = EcosystemConfig::baseline();
        cfg.set(Param::MenuPrice, 14.0);
        assert_eq!(cfg.ours.menu_price, 14.0);
        assert_eq!(cfg.rival.menu_price, 14.0);
    }
}
