//! Replays the whole diagnose-fix case study: all six bundled presets with a
//! shared seed, printing per-iteration breakdown counts, blame attribution,
//! and the comparison row against the previous iteration.
//!
//! Usage:
//!   cargo run --release --example iteration_loop -- [n] [seed]

use convo_breakdown::analysis::{
    attribution_counts, classify_success, compare_iterations, format_iteration_stats, Attribution,
    KindRegistry,
};
use convo_breakdown::detectors::{run_detectors, Detector, DetectorConfig};
use convo_breakdown::model::default_model;
use convo_breakdown::sim::{default_catalog, generate_corpus, load_preset, PRESET_NAMES};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse().expect("n")).unwrap_or(100);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(2024);

    let model = default_model();
    let catalog = default_catalog();
    let registry = KindRegistry::default();
    let mut prev = Vec::new();

    for name in PRESET_NAMES {
        let profile = load_preset(name).expect("bundled preset");
        let corpus = generate_corpus(n, &profile, &model, &catalog, seed).expect("generation");
        let findings = run_detectors(&corpus, &model, &DetectorConfig::default());

        let count = |det: Detector| {
            findings.iter().filter(|f| f.detector == det && f.flagged()).count()
        };
        let counts = attribution_counts(&findings, &registry);
        let us_b3 = counts
            .get(&Detector::FlowDiscontinuation)
            .and_then(|m| m.get(&Attribution::Us))
            .copied()
            .unwrap_or(0);
        let successes = corpus.iter().filter(|d| classify_success(d)).count();

        println!("== {name} ==");
        println!(
            "B1={} B2={} B3={} (B3 blamed on simulator: {us_b3})  successes {successes}/{n}",
            count(Detector::SystemFailure),
            count(Detector::DialogueOfDeaf),
            count(Detector::FlowDiscontinuation),
        );
        let stats = compare_iterations(&prev, &corpus).expect("non-empty corpus");
        print!("{}", format_iteration_stats(&stats));
        println!();
        prev = corpus;
    }
}
