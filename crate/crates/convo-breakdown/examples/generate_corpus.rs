//! Generates a seeded corpus from a bundled iteration preset and prints one
//! transcript in full, plus corpus-level statistics.
//!
//! Usage:
//!   cargo run --example generate_corpus -- [preset] [n] [seed]
//!   cargo run --example generate_corpus -- iteration-2 50 7

use convo_breakdown::analysis::path_statistics;
use convo_breakdown::model::default_model;
use convo_breakdown::sim::{default_catalog, generate_corpus, load_preset};

fn main() {
    let mut args = std::env::args().skip(1);
    let preset = args.next().unwrap_or_else(|| "iteration-1".to_string());
    let n: usize = args.next().map(|s| s.parse().expect("n")).unwrap_or(20);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(42);

    let profile = load_preset(&preset).expect("bundled preset");
    let model = default_model();
    let catalog = default_catalog();
    let corpus = generate_corpus(n, &profile, &model, &catalog, seed).expect("generation");

    let sample = &corpus[0];
    println!("=== {} (profile digest {}) ===", sample.id, profile.digest());
    for u in &sample.utterances {
        println!("[{:>2}] {:>5} {:<40} {}", u.index, u.participant.prefix(), u.act.intent.canonical(), u.text);
    }
    for rec in &sample.error_log {
        println!("  !! {} at turn {:?}: {}", rec.kind, rec.at_turn, rec.message);
    }

    let (unique, mean, std) = path_statistics(&corpus).expect("non-empty corpus");
    println!();
    println!("{} dialogues, {} unique conversational paths", corpus.len(), unique);
    println!("average length {mean:.2} \u{b1} {std:.2} turns");
}
