//! Full analysis pipeline: generate, detect, aggregate flagged intent paths
//! into pattern counts, attribute blame, and render the appendix-style
//! table-text report.
//!
//! Usage:
//!   cargo run --example aggregate_report -- [preset] [format]
//!   cargo run --example aggregate_report -- iteration-1 csv

use convo_breakdown::analysis::{
    aggregate_patterns, attribution_counts, render_report, KindRegistry, ReportFormat,
};
use convo_breakdown::detectors::{run_detectors, DetectorConfig};
use convo_breakdown::model::default_model;
use convo_breakdown::sim::{default_catalog, generate_corpus, load_preset};

fn main() {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "iteration-1".to_string());
    let format: ReportFormat = args
        .next()
        .unwrap_or_else(|| "table-text".to_string())
        .parse()
        .expect("table-text, csv, or structured");

    let profile = load_preset(&preset).expect("bundled preset");
    let model = default_model();
    let catalog = default_catalog();
    let corpus = generate_corpus(100, &profile, &model, &catalog, 42).expect("generation");
    let findings = run_detectors(&corpus, &model, &DetectorConfig::default());

    let summaries = aggregate_patterns(&findings);
    let attributions = attribution_counts(&findings, &KindRegistry::default());
    print!("{}", render_report(&summaries, &attributions, None, format));
}
