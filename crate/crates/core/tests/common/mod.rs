#![allow(dead_code)]

use proptest::prelude::*;
use tipping::model::{EcosystemConfig, RestaurantParams};

pub fn restaurant() -> impl Strategy<Value = RestaurantParams> {
    (0.0..0.5f64, 2.13..25.0f64, 7.25..25.0f64).prop_map(|(tip_rate, waiter_pay, cook_pay)| {
        RestaurantParams {
            menu_price: 10.0,
            tip_rate,
            waiter_pay,
            cook_pay,
        }
    })
}

/// Configurations spanning the documented parameter ranges, with a shared
/// menu price.
pub fn config() -> impl Strategy<Value = EcosystemConfig> {
    (
        5.0..20.0f64,
        restaurant(),
        restaurant(),
        4.0..20.0f64,
        0.5..2.0f64,
        1.0..20.0f64,
    )
        .prop_map(|(m, ours, rival, r, rcw, rdw)| {
            EcosystemConfig {
                ours,
                rival,
                food_to_service: r,
                cooks_per_waiter: rcw,
                diners_per_waiter: rdw,
                ..EcosystemConfig::baseline()
            }
            .with_menu_price(m)
        })
}

/// Same as [`config`] but with independent menu prices.
pub fn config_any_prices() -> impl Strategy<Value = EcosystemConfig> {
    (config(), 5.0..20.0f64, 5.0..20.0f64).prop_map(|(mut cfg, m1, m2)| {
        cfg.ours.menu_price = m1;
        cfg.rival.menu_price = m2;
        cfg
    })
}

pub fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

pub fn interior() -> impl Strategy<Value = f64> {
    0.01..0.99f64
}
