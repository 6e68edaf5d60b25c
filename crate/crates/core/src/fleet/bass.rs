use super::types::BassParams;
use crate::series::YearSeries;

/// Adoption coefficient `c^A(τ) = dχ/dτ = (p + qχ)(1 - χ)` over
/// `first..=last`, integrated with one-year forward Euler steps from
/// `χ(first) = 0`. `χ` is kept in `[0, 1]`.
pub fn bass_adoption(params: &BassParams, first: i32, last: i32) -> YearSeries {
    let (rates, _) = bass_path(params, first, last);
    rates
}

/// Returns the adoption coefficient series and the cumulative adoption `χ`
/// at the start of each year.
pub fn bass_path(params: &BassParams, first: i32, last: i32) -> (YearSeries, YearSeries) {
    let mut chi = 0.0_f64;
    let mut rates = Vec::new();
    let mut levels = Vec::new();
    for _ in first..=last {
        let rate = (params.innovation + params.imitation * chi) * (1.0 - chi);
        levels.push(chi);
        rates.push(rate);
        chi = (chi + rate).clamp(0.0, 1.0);
    }
    (
        YearSeries::new("adoption", first, rates),
        YearSeries::new("cumulative_adoption", first, levels),
    )
}
