//! Runs the three breakdown detectors over a freshly generated corpus and
//! prints every flagged finding with its intent path.
//!
//! B1 (system failure) scans the error log for crashes, B2 (dialogue of the
//! deaf) looks for near-identical repeated agent turns, and B3 (flow
//! discontinuation) checks the intent sequence against the interaction model.
//!
//! Usage:
//!   cargo run --example detect_breakdowns -- [preset] [n] [seed]

use convo_breakdown::detectors::{run_detectors, DetectorConfig};
use convo_breakdown::model::default_model;
use convo_breakdown::sim::{default_catalog, generate_corpus, load_preset};

fn main() {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "iteration-1".to_string());
    let n: usize = args.next().map(|s| s.parse().expect("n")).unwrap_or(30);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(42);

    let profile = load_preset(&preset).expect("bundled preset");
    let model = default_model();
    let catalog = default_catalog();
    let corpus = generate_corpus(n, &profile, &model, &catalog, seed).expect("generation");

    let findings = run_detectors(&corpus, &model, &DetectorConfig::default());
    let mut counts = [0usize; 3];
    for f in findings.iter().filter(|f| f.flagged()) {
        let idx = match f.detector.code() {
            "B1" => 0,
            "B2" => 1,
            _ => 2,
        };
        counts[idx] += 1;
        let path: Vec<String> = f.path.iter().map(|l| l.abbreviated()).collect();
        println!("{} {:<14} {:<30} ({})", f.detector.code(), f.dialogue_id, f.detail, path.join(" > "));
    }
    println!();
    println!(
        "{} dialogues: B1={} B2={} B3={}",
        corpus.len(),
        counts[0],
        counts[1],
        counts[2]
    );
}
