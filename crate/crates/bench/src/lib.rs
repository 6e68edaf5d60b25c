//! Shared setup for the criterion benches.

use std::path::PathBuf;

use fleet_backcast::{load_inputs, Inputs, OcpProblem, RunConfig};

pub fn france_config_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/france/config.toml")
}

/// The bundled France inputs.
pub fn france() -> Inputs {
    let cfg = RunConfig::read(&france_config_path()).expect("France configuration loads");
    load_inputs(&cfg).expect("France fixtures load")
}

pub fn problem(inputs: &Inputs, target_gt: f64) -> OcpProblem {
    OcpProblem::new(
        inputs.initial.clone(),
        inputs.exo.clone(),
        inputs.params.clone(),
        inputs.last_year,
        target_gt,
    )
    .expect("France problem is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_problem_builds() {
        let f = france();
        let p = problem(&f, 0.9);
        assert_eq!(p.horizon(), 28);
    }
}
