//! Parameter identification from historical snapshots.

use std::collections::BTreeMap;
use std::fmt;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::{bass_adoption, BassParams, FleetState, VehicleType};
use crate::series::YearSeries;
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ownership {
    Private,
    Professional,
}

impl Ownership {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "private" | "1" => Some(Ownership::Private),
            "professional" | "2" => Some(Ownership::Professional),
            _ => None,
        }
    }
}

impl fmt::Display for Ownership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ownership::Private => "private",
            Ownership::Professional => "professional",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoricalStockRecord {
    pub year: i32,
    pub vehicle: VehicleType,
    pub ownership: Ownership,
    pub age: usize,
    pub count: f64,
}

/// Annual thermal-fleet CO2, in Mt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoricalEmissionsRecord {
    pub year: i32,
    pub emissions_mt: f64,
}

/// EV share of new-car sales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvSalesRecord {
    pub year: i32,
    pub share: f64,
}

fn stock_by_age(records: &[HistoricalStockRecord], year: i32) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for r in records.iter().filter(|r| r.year == year) {
        *out.entry(r.age).or_insert(0.0) += r.count;
    }
    out
}

/// Age-specific survival `η_a = Σ_vo s_voa(y1) / Σ_vo s_vo,a-1(y0)`,
/// pooled over types and ownership, for `a = 1..=A` where `A` is the oldest
/// age in `y1`. The oldest class also keeps its own survivors, so its
/// denominator adds `s_A(y0)`. Rates are capped at 1; ages with an empty
/// denominator are skipped with a warning. Returns `(age, η)` pairs.
pub fn survival_from_stocks(
    records: &[HistoricalStockRecord],
    y0: i32,
    y1: i32,
) -> Result<Vec<(usize, f64)>> {
    if y1 != y0 + 1 {
        return Err(Error::InvalidInput(format!(
            "survival needs consecutive years, got {y0} and {y1}"
        )));
    }
    if let Some(r) = records.iter().find(|r| !(r.count >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "negative stock count {} in {} at age {}",
            r.count, r.year, r.age
        )));
    }
    let before = stock_by_age(records, y0);
    let after = stock_by_age(records, y1);
    if before.is_empty() || after.is_empty() {
        return Err(Error::InvalidInput(format!(
            "stock records for both {y0} and {y1} are required"
        )));
    }
    let oldest = *after.keys().next_back().unwrap();
    let mut rates = Vec::with_capacity(oldest);
    for a in 1..=oldest {
        let mut denom = before.get(&(a - 1)).copied().unwrap_or(0.0);
        if a == oldest {
            denom += before.get(&a).copied().unwrap_or(0.0);
        }
        if denom <= 0.0 {
            warn!(
                "no vehicles of age {} in {y0}; survival at age {a} skipped",
                a - 1
            );
            continue;
        }
        let num = after.get(&a).copied().unwrap_or(0.0);
        rates.push((a, (num / denom).min(1.0)));
    }
    Ok(rates)
}

/// Average CO2 of new thermal cars by model year, 1995..=2020, g/km.
const HISTORICAL_EMISSION_FACTOR: [f64; 26] = [
    176.0, 175.0, 175.0, 171.0, 166.0, 162.0, 156.0, 155.0, 155.0, 153.0, 152.0, 149.0, 149.0,
    140.0, 133.0, 130.0, 128.0, 124.0, 119.0, 116.0, 113.0, 112.0, 113.0, 114.0, 115.0, 108.3,
];
const HISTORICAL_FIRST: i32 = 1995;
const PROJECTION_FIRST: i32 = 2020;
const PROJECTION_LAST: i32 = 2050;

/// Tabulated historical factor for `1995..=2020`, held at the 1995 level
/// before that.
pub fn historical_emission_factor(model_year: i32) -> Result<f64> {
    let last = HISTORICAL_FIRST + HISTORICAL_EMISSION_FACTOR.len() as i32 - 1;
    if model_year > last {
        return Err(Error::YearOutOfRange {
            series: "historical emission factor".into(),
            year: model_year,
            first: HISTORICAL_FIRST,
            last,
        });
    }
    let i = (model_year - HISTORICAL_FIRST).max(0) as usize;
    Ok(HISTORICAL_EMISSION_FACTOR[i])
}

/// Quadratic projection `0.01 (τ-2020)² - 1.27 (τ-2020) + 108.2`.
pub fn projected_emission_factor(model_year: i32) -> f64 {
    let x = (model_year - PROJECTION_FIRST) as f64;
    0.01 * x * x - 1.27 * x + 108.2
}

/// Emission factor of new thermal cars `ε₁₀(τ)` in g/km: the historical
/// table up to 2019 and the quadratic projection for 2020..=2050.
pub fn emission_factor_new(model_year: i32) -> Result<f64> {
    if model_year > PROJECTION_LAST {
        return Err(Error::Domain(format!(
            "emission factor projection ends in {PROJECTION_LAST}, requested {model_year}"
        )));
    }
    if model_year >= PROJECTION_FIRST {
        Ok(projected_emission_factor(model_year))
    } else {
        historical_emission_factor(model_year)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MileageEstimate {
    pub by_year: YearSeries,
    pub average: f64,
}

/// Inverts `e₁(τ) = M(τ) Σ_oa s_1oa(τ) ε₁₀(τ - a)` for the annual mileage
/// over the years present in both inputs.
pub fn mileage_from_emissions(
    stocks: &[HistoricalStockRecord],
    emissions: &[HistoricalEmissionsRecord],
    emission_factor: impl Fn(i32) -> Result<f64>,
) -> Result<MileageEstimate> {
    let mut pairs = Vec::new();
    let mut emissions = emissions.to_vec();
    emissions.sort_by_key(|e| e.year);
    for e in &emissions {
        let mut weighted = 0.0;
        let mut found = false;
        for r in stocks
            .iter()
            .filter(|r| r.year == e.year && r.vehicle == VehicleType::Thermal)
        {
            found = true;
            weighted += r.count * emission_factor(e.year - r.age as i32)?;
        }
        if !found {
            continue;
        }
        if weighted <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "thermal stock in {} has no emitting vehicles",
                e.year
            )));
        }
        pairs.push((e.year, units::GRAMS_PER_MT * e.emissions_mt / weighted));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidInput(
            "stock and emission histories have no year in common".into(),
        ));
    }
    let average = pairs.iter().map(|p| p.1).sum::<f64>() / pairs.len() as f64;
    Ok(MileageEstimate {
        by_year: YearSeries::from_pairs("mileage", &pairs)?,
        average,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BassFit {
    pub params: BassParams,
    /// Sum of squared errors between simulated and observed adoption.
    pub sse: f64,
}

const BASS_P_MAX: f64 = 0.1;
const BASS_Q_MAX: f64 = 1.0;

/// Unweighted squared error of the Euler-integrated Bass rate against the
/// observed EV shares, integrating from the first observed year.
pub fn bass_sse(params: &BassParams, observations: &[EvSalesRecord]) -> f64 {
    let first = observations.iter().map(|o| o.year).min().unwrap_or(0);
    let last = observations.iter().map(|o| o.year).max().unwrap_or(0);
    let sim = bass_adoption(params, first, last);
    observations
        .iter()
        .map(|o| {
            let d = sim.get(o.year).unwrap_or(f64::NAN) - o.share;
            d * d
        })
        .sum()
}

/// Least-squares fit of `(p, q)` over `[0, 0.1] × [0, 1]`: a coarse grid
/// followed by repeated zooming around the best point.
pub fn fit_bass(observations: &[EvSalesRecord]) -> Result<BassFit> {
    if observations.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "Bass fit needs at least 3 observations, got {}",
            observations.len()
        )));
    }
    if let Some(o) = observations
        .iter()
        .find(|o| !(0.0..=1.0).contains(&o.share))
    {
        return Err(Error::InvalidInput(format!(
            "EV share {} in {} is outside [0, 1]",
            o.share, o.year
        )));
    }
    let mut years: Vec<i32> = observations.iter().map(|o| o.year).collect();
    years.sort_unstable();
    if years.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(
            "duplicate years in EV sales observations".into(),
        ));
    }

    let sse = |p: f64, q: f64| {
        bass_sse(
            &BassParams {
                innovation: p,
                imitation: q,
            },
            observations,
        )
    };
    let steps = 100;
    let (mut hp, mut hq) = (BASS_P_MAX / steps as f64, BASS_Q_MAX / steps as f64);
    let scan = |start: (f64, f64, f64), centre: (f64, f64), hp: f64, hq: f64, half: i32| {
        let mut best = start;
        for i in -half..=half {
            for j in -half..=half {
                let p = (centre.0 + i as f64 * hp).clamp(0.0, BASS_P_MAX);
                let q = (centre.1 + j as f64 * hq).clamp(0.0, BASS_Q_MAX);
                let s = sse(p, q);
                if s < best.2 {
                    best = (p, q, s);
                }
            }
        }
        best
    };
    let origin = (0.0, 0.0, sse(0.0, 0.0));
    let mut best = scan(
        origin,
        (0.5 * BASS_P_MAX, 0.5 * BASS_Q_MAX),
        hp,
        hq,
        steps / 2,
    );
    for _ in 0..60 {
        best = scan(best, (best.0, best.1), hp, hq, 4);
        hp *= 0.5;
        hq *= 0.5;
    }
    let (best_p, best_q, best) = best;
    if !best.is_finite() {
        return Err(Error::Domain(
            "Bass fit failed to produce a finite residual".into(),
        ));
    }
    Ok(BassFit {
        params: BassParams {
            innovation: best_p,
            imitation: best_q,
        },
        sse: best,
    })
}

/// Initial fleet from the privately owned stock in `year`.
pub fn initial_fleet(records: &[HistoricalStockRecord], year: i32) -> Result<FleetState> {
    let private: Vec<_> = records
        .iter()
        .filter(|r| r.year == year && r.ownership == Ownership::Private)
        .collect();
    let Some(oldest) = private.iter().map(|r| r.age).max() else {
        return Err(Error::InvalidInput(format!(
            "no private stock records for {year}"
        )));
    };
    let mut thermal = vec![0.0; oldest + 1];
    let mut electric = vec![0.0; oldest + 1];
    for r in private {
        match r.vehicle {
            VehicleType::Thermal => thermal[r.age] += r.count,
            VehicleType::Electric => electric[r.age] += r.count,
        }
    }
    FleetState::new(year, thermal, electric)
}
