//! Named ecosystems used by the figure reproductions and acceptance suite.

use crate::model::{EcosystemConfig, QualityFormulation, RestaurantParams};

/// Panels of the transient-dynamics figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DynamicsPanel {
    /// Our tip rate below the rival's.
    LowerTipRate,
    /// Our menu price below the rival's.
    LowerMenuPrice,
    /// Our cook pay below the rival's.
    LowerCookPay,
    /// Higher cook pay at ours, higher waiter pay at the rival.
    CooksOverWaiters,
}

impl DynamicsPanel {
    pub const ALL: [DynamicsPanel; 4] = [
        DynamicsPanel::LowerTipRate,
        DynamicsPanel::LowerMenuPrice,
        DynamicsPanel::LowerCookPay,
        DynamicsPanel::CooksOverWaiters,
    ];

    pub fn label(self) -> char {
        match self {
            DynamicsPanel::LowerTipRate => 'a',
            DynamicsPanel::LowerMenuPrice => 'b',
            DynamicsPanel::LowerCookPay => 'c',
            DynamicsPanel::CooksOverWaiters => 'd',
        }
    }
}

/// Two nearly identical restaurants: m = 10, T = 0.2, bW = 5, bC = 10,
/// r = 12, remaining ratios at baseline.
pub fn near_identical() -> EcosystemConfig {
    let params = RestaurantParams {
        menu_price: 10.0,
        tip_rate: 0.2,
        waiter_pay: 5.0,
        cook_pay: 10.0,
    };
    EcosystemConfig {
        ours: params,
        rival: params,
        food_to_service: 12.0,
        ..EcosystemConfig::baseline()
    }
}

pub fn dynamics_panel(panel: DynamicsPanel) -> EcosystemConfig {
    let mut cfg = near_identical();
    match panel {
        DynamicsPanel::LowerTipRate => cfg.rival.tip_rate = 0.25,
        DynamicsPanel::LowerMenuPrice => cfg.rival.menu_price = 15.0,
        DynamicsPanel::LowerCookPay => cfg.rival.cook_pay = 12.0,
        DynamicsPanel::CooksOverWaiters => {
            cfg.rival.waiter_pay = 10.0;
            cfg.ours.cook_pay = 15.0;
        }
    }
    cfg
}

/// Phase-portrait ecosystem: automatic gratuity of 15% against a
/// conventional 20%.
pub fn fig_s5() -> EcosystemConfig {
    let mut cfg = near_identical();
    cfg.ours.tip_rate = 0.15;
    cfg.diners_per_waiter = 1.0;
    cfg.cooks_per_waiter = 1.0;
    cfg
}

/// Threshold example: rival pays waiters $10 and cooks $25.
///
/// Our wages are decision variables; the values set here only seed them.
pub fn threshold_example() -> EcosystemConfig {
    let mut cfg = EcosystemConfig::baseline().with_menu_price(10.0);
    cfg.food_to_service = 4.0;
    cfg.diners_per_waiter = 10.0;
    cfg.cooks_per_waiter = 1.0;
    cfg.rival.waiter_pay = 10.0;
    cfg.rival.cook_pay = 25.0;
    cfg
}

/// Threshold example with quality measured by weighted staff pay.
pub fn staff_pay_example() -> EcosystemConfig {
    EcosystemConfig {
        food_to_service: 2.0,
        quality: QualityFormulation::StaffPay,
        ..threshold_example()
    }
}

/// Threshold example with quality measured by weighted payroll.
pub fn payroll_example() -> EcosystemConfig {
    EcosystemConfig {
        food_to_service: 4.0,
        quality: QualityFormulation::StaffCountTimesPay,
        ..threshold_example()
    }
}

/// "Typical American restaurant" used for local threshold sweeps.
pub fn typical_restaurant() -> EcosystemConfig {
    let mut cfg = EcosystemConfig::baseline().with_menu_price(10.0);
    cfg.food_to_service = 12.0;
    cfg.diners_per_waiter = 12.0;
    cfg.cooks_per_waiter = 0.5;
    cfg.rival.waiter_pay = 5.0;
    cfg.rival.cook_pay = 10.0;
    cfg
}
