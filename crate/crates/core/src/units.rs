//! Unit conversions used across the crate.
//!
//! Internal quantities are kept in base units (vehicles, vehicle-km, km,
//! g/km, euro). Reported quantities use Mt and Gt of CO2 and billions of
//! euro. Every conversion between the two goes through this module.

/// Grams per megatonne.
pub const GRAMS_PER_MT: f64 = 1e12;
/// Grams per gigatonne.
pub const GRAMS_PER_GT: f64 = 1e15;
/// Megatonnes per gigatonne.
pub const MT_PER_GT: f64 = 1e3;
/// Euro per billion euro (G€).
pub const EUR_PER_GEUR: f64 = 1e9;
/// Vehicle-km per million vehicle-km.
pub const VKM_PER_MVKM: f64 = 1e6;

#[inline]
pub fn grams_to_mt(g: f64) -> f64 {
    g / GRAMS_PER_MT
}

#[inline]
pub fn grams_to_gt(g: f64) -> f64 {
    g / GRAMS_PER_GT
}

#[inline]
pub fn mt_to_gt(mt: f64) -> f64 {
    mt / MT_PER_GT
}

#[inline]
pub fn eur_to_geur(eur: f64) -> f64 {
    eur / EUR_PER_GEUR
}

#[inline]
pub fn mvkm_to_vkm(mvkm: f64) -> f64 {
    mvkm * VKM_PER_MVKM
}

#[inline]
pub fn vkm_to_mvkm(vkm: f64) -> f64 {
    vkm / VKM_PER_MVKM
}

/// Lifetime-year emissions of one vehicle, in Gt, for the given mileage
/// (km/y) and emission factor (g/km).
#[inline]
pub fn vehicle_year_gt(mileage_km: f64, factor_g_per_km: f64) -> f64 {
    grams_to_gt(mileage_km * factor_g_per_km)
}
