mod common;

use fleet_backcast::calibration::{
    bass_sse, emission_factor_new, fit_bass, historical_emission_factor, initial_fleet,
    mileage_from_emissions, projected_emission_factor, survival_from_stocks, EvSalesRecord,
    HistoricalEmissionsRecord, HistoricalStockRecord, Ownership,
};
use fleet_backcast::fleet::bass_adoption;
use fleet_backcast::io::{
    read_age_series, read_emissions_history, read_ev_sales, read_initial_fleet, read_stock_history,
};
use fleet_backcast::{BassParams, VehicleType};
use proptest::prelude::*;

fn fixture_history() -> Vec<HistoricalStockRecord> {
    let cfg = common::france_config();
    read_stock_history(&cfg.resolve(cfg.data.stock_history.as_ref().unwrap())).unwrap()
}

#[test]
fn fixture_survival_reproduces_shipped_rates() {
    let cfg = common::france_config();
    let shipped = read_age_series(&cfg.resolve(&cfg.data.survival)).unwrap();
    let rates = survival_from_stocks(&fixture_history(), 2021, 2022).unwrap();
    assert_eq!(rates.len(), shipped.len());
    for (a, eta) in &rates {
        assert!(*eta > 0.0 && *eta <= 1.0);
        // Counts are whole vehicles, so rates carry rounding noise.
        assert!(
            (eta - shipped[a - 1]).abs() < 1e-4,
            "age {a}: {eta} vs {}",
            shipped[a - 1]
        );
    }
    assert!((rates[29].1 - 0.744).abs() < 1e-3);
}

#[test]
fn fixture_initial_fleet_is_private_stock() {
    let cfg = common::france_config();
    let shipped = read_initial_fleet(&cfg.resolve(&cfg.data.initial_fleet), 2022).unwrap();
    let built = initial_fleet(&fixture_history(), 2022).unwrap();
    assert_eq!(built.age_classes(), shipped.age_classes());
    for v in VehicleType::ALL {
        for (a, b) in built.stocks.get(v).iter().zip(shipped.stocks.get(v)) {
            assert!((a - b).abs() <= 0.5, "{a} vs {b}");
        }
    }
}

#[test]
fn fixture_mileage_shows_covid_dip() {
    let cfg = common::france_config();
    let emissions =
        read_emissions_history(&cfg.resolve(cfg.data.emissions_history.as_ref().unwrap())).unwrap();
    let m = mileage_from_emissions(&fixture_history(), &emissions, emission_factor_new).unwrap();
    assert_eq!(m.by_year.first_year(), 2011);
    assert_eq!(m.by_year.last_year(), 2022);
    assert!((m.by_year.get(2020).unwrap() / 1e3 - 11.309).abs() < 1e-3);
    assert!(m.by_year.get(2020).unwrap() < m.by_year.get(2019).unwrap());
}

#[test]
fn emission_factor_examples() {
    assert_eq!(emission_factor_new(2020).unwrap(), 108.2);
    assert_eq!(emission_factor_new(1993).unwrap(), 176.0);
    assert!((emission_factor_new(2030).unwrap() - 96.5).abs() < 1e-12);
    assert!(emission_factor_new(2051).is_err());
    let gap = (historical_emission_factor(2020).unwrap() - projected_emission_factor(2020)).abs();
    assert!(gap < 0.5);
}

#[test]
fn bass_fit_recovers_generating_parameters() {
    let truth = BassParams {
        innovation: 0.02,
        imitation: 0.4,
    };
    let series = bass_adoption(&truth, 2018, 2030);
    let obs: Vec<_> = series
        .iter()
        .map(|(year, share)| EvSalesRecord { year, share })
        .collect();
    let fit = fit_bass(&obs).unwrap();
    assert!((fit.params.innovation - 0.02).abs() < 1e-3);
    assert!((fit.params.imitation - 0.4).abs() < 1e-3);
}

#[test]
fn bass_fit_on_zero_sales_has_no_innovation() {
    let obs: Vec<_> = (2018..2023)
        .map(|year| EvSalesRecord { year, share: 0.0 })
        .collect();
    assert!(fit_bass(&obs).unwrap().params.innovation < 1e-6);
}

#[test]
fn bass_fit_on_observed_shares_beats_perturbations() {
    let cfg = common::france_config();
    let obs = read_ev_sales(&cfg.resolve(cfg.data.ev_sales_share.as_ref().unwrap())).unwrap();
    assert_eq!(obs.len(), 5);
    let fit = fit_bass(&obs).unwrap();
    for (dp, dq) in [
        (1.2, 1.0),
        (0.8, 1.0),
        (1.0, 1.2),
        (1.0, 0.8),
        (1.2, 1.2),
        (0.8, 0.8),
    ] {
        let other = BassParams {
            innovation: fit.params.innovation * dp,
            imitation: fit.params.imitation * dq,
        };
        assert!(fit.sse < bass_sse(&other, &obs));
    }
    let table = BassParams {
        innovation: 0.02,
        imitation: 0.4,
    };
    assert!(fit.sse <= bass_sse(&table, &obs));
}

#[test]
fn mileage_inversion_is_exact_on_synthetic_data() {
    let mut stocks = Vec::new();
    let mut emissions = Vec::new();
    for year in 2011..=2015 {
        let mut grams = 0.0;
        for age in 0..10 {
            let count = 1e5 * (1.0 + age as f64);
            let eps = emission_factor_new(year - age as i32).unwrap();
            grams += count * eps * 10_000.0;
            stocks.push(HistoricalStockRecord {
                year,
                vehicle: VehicleType::Thermal,
                ownership: Ownership::Private,
                age,
                count,
            });
        }
        emissions.push(HistoricalEmissionsRecord {
            year,
            emissions_mt: grams / 1e12,
        });
    }
    let m = mileage_from_emissions(&stocks, &emissions, emission_factor_new).unwrap();
    for (_, v) in m.by_year.iter() {
        assert!((v - 10_000.0).abs() < 1e-8);
    }
    assert!((m.average - 10_000.0).abs() < 1e-8);
}

proptest! {
    #[test]
    fn survival_round_trips_synthetic_population(
        eta in prop::collection::vec(0.5..1.0f64, 2..30),
        stock in prop::collection::vec(1e3..1e6f64, 31),
        electric_share in 0.0..0.5f64,
    ) {
        let a_max = eta.len();
        let before = &stock[..=a_max];
        let mut after = vec![0.0; a_max + 1];
        after[0] = 1e6;
        for a in 1..=a_max {
            after[a] = eta[a - 1] * before[a - 1];
        }
        after[a_max] += eta[a_max - 1] * before[a_max];
        let mut records = Vec::new();
        for (year, counts) in [(2020, before), (2021, &after[..])] {
            for (age, &c) in counts.iter().enumerate() {
                for (vehicle, share) in [
                    (VehicleType::Thermal, 1.0 - electric_share),
                    (VehicleType::Electric, electric_share),
                ] {
                    records.push(HistoricalStockRecord {
                        year,
                        vehicle,
                        ownership: Ownership::Private,
                        age,
                        count: c * share,
                    });
                }
            }
        }
        let rates = survival_from_stocks(&records, 2020, 2021).unwrap();
        prop_assert_eq!(rates.len(), a_max);
        for (a, r) in rates {
            prop_assert!((r - eta[a - 1]).abs() < 1e-12);
        }
    }
}
