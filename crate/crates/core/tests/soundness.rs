//! Every counterexample re-verifies from its recorded inputs alone.

use merosub::disk::{winding_number, Status};
use merosub::forms::{k_series, p_series, shrink_toward_one};
use merosub::presets::find_preset;
use merosub::verifier::{
    fuzz_theorem, preset_dominants, run_trial, Classification, Dominants, FuzzConfig, MUTATION_FACTOR,
};
use merosub::Meromorphic;

#[test]
fn mutated_counterexamples_replay() {
    for id in ["cor-3.2", "cor-3.7", "cor-3.10", "lem-2.6"] {
        let preset = find_preset(id).unwrap();
        let config = FuzzConfig { trials: 40, seed: 9, mutate: true, ..FuzzConfig::default() };
        let summary = fuzz_theorem(&preset, &config).unwrap();
        assert!(!summary.counterexamples.is_empty(), "{id}");
        let (q, lower) = preset_dominants(&preset, &config.grid).unwrap();
        let boundary = shrink_toward_one(&q.series, MUTATION_FACTOR).sample_circle(0.95, 4096).unwrap();
        for ce in &summary.counterexamples {
            let f = Meromorphic::new(ce.function.clone().unwrap()).unwrap();
            let dominants = Dominants { q: &q, lower: lower.as_ref() };
            let replay = run_trial(preset.theorem, &f, dominants, &ce.params, &config.grid, ce.mode, true).unwrap();
            assert_eq!(replay.classification, Classification::Counterexample, "{id} trial {}", ce.trial);
            assert!(replay.hypotheses.all_hold());
            assert_eq!(replay.premise.as_ref().unwrap().status, Status::Holds);

            // The witness value is a value of the principal expression that
            // lies outside the mutated dominant's image.
            let w = ce.conclusion.as_ref().unwrap().witness.unwrap();
            let principal = if preset.theorem.uses_k() {
                k_series(&f, &ce.params, ce.mode).unwrap()
            } else {
                p_series(&f, &ce.params).unwrap()
            };
            assert!((principal.evaluate(w.z).unwrap() - w.value).norm() < 1e-9);
            assert_eq!(winding_number(&boundary, w.value).unwrap(), 0);
        }
    }
}

#[test]
fn unmutated_suites_report_no_counterexamples() {
    for id in ["cor-3.3", "cor-3.9", "lem-2.6"] {
        let preset = find_preset(id).unwrap();
        let summary = fuzz_theorem(&preset, &FuzzConfig { trials: 40, seed: 9, ..FuzzConfig::default() }).unwrap();
        assert_eq!(summary.counts.counterexample, 0, "{id}");
        assert_eq!(summary.counts.total(), 40);
    }
}
