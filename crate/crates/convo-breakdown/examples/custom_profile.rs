//! Builds a generation profile in code instead of loading a preset: a single
//! injected defect, split composite turns, and a low-patience persona. Shows
//! how one defect flag translates directly into one breakdown class.
//!
//! Usage:
//!   cargo run --example custom_profile

use convo_breakdown::detectors::{run_detectors, Detector, DetectorConfig};
use convo_breakdown::model::default_model;
use convo_breakdown::sim::{
    default_catalog, generate_corpus, AgendaMode, DefectProfile, GenerationProfile, Persona,
    SimulatorConfig,
};

fn profile(cant_help_loop: bool) -> GenerationProfile {
    GenerationProfile {
        name: if cant_help_loop { "looping".into() } else { "patched".into() },
        defects: DefectProfile {
            cant_help_loop,
            crash_on_conclude: false,
            crash_on_remove_preference: false,
            limited_accept_patterns: false,
            max_turns: 60,
        },
        simulator: SimulatorConfig {
            agenda_mode: AgendaMode::PullOrSample,
            persona: Persona { patience: 6, acceptance_bias: 0.7 },
            preference_count: 2,
        },
        // Two agent turns (count results, then elicit) instead of one
        // composite-intent utterance.
        split_composites: true,
    }
}

fn main() {
    let model = default_model();
    let catalog = default_catalog();
    for looping in [true, false] {
        let p = profile(looping);
        p.validate().expect("profile");
        let corpus = generate_corpus(100, &p, &model, &catalog, 11).expect("generation");
        let findings = run_detectors(&corpus, &model, &DetectorConfig::default());
        let b2 = findings
            .iter()
            .filter(|f| f.detector == Detector::DialogueOfDeaf && f.flagged())
            .count();
        println!(
            "profile `{}` (cant_help_loop={looping}): B2 dialogues {b2}/100, digest {}",
            p.name,
            p.digest()
        );
    }
}
