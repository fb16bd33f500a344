//! Detection and characterization of conversational breakdowns in
//! recommender-dialogue transcripts.
//!
//! The crate covers the full diagnose-fix loop for a conversational
//! recommender under test:
//!
//! * [`dialogue`] — the transcript data model (dialogue acts, intent
//!   labels, error logs) and its canonical file format;
//! * [`model`] — the interaction model, a directed intent-transition graph
//!   answering path-validity queries;
//! * [`detectors`] — three breakdown detectors: system failure (B1),
//!   dialogue of the deaf (B2), and flow discontinuation (B3);
//! * [`analysis`] — pattern-count summaries, breakdown attribution,
//!   success classification, and iteration comparison;
//! * [`sim`] — a deterministic toy recommender with injectable defects and
//!   an agenda-based user simulator, plus six bundled defect presets;
//! * [`corpus`] / [`manifest`] — artifact I/O and run provenance.
//!
//! See the `examples/` directory for end-to-end usage of each capability,
//! and the `convo-breakdown` binary for the command-line front end.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod detectors;
pub mod dialogue;
pub mod manifest;
pub mod model;
pub mod sim;

pub use analysis::{
    aggregate_patterns, attribute_breakdown, classify_success, compare_iterations,
    path_statistics, render_report, Attribution, IterationStats, PatternSummary, ReportFormat,
};
pub use detectors::{
    detect_dialogue_of_deaf, detect_flow_discontinuation, detect_system_failure, run_detectors,
    text_similarity, BreakdownFinding, Detector, DetectorConfig,
};
pub use dialogue::{
    parse_dialogue, serialize_dialogue, Dialogue, DialogueAct, ErrorRecord, IntentLabel,
    Participant, SlotValue, Utterance,
};
pub use model::{default_model, load_model, InteractionModel, PathVerdict};
pub use sim::{
    default_catalog, generate_conversation, generate_corpus, load_preset, Catalog, DefectProfile,
    GenerationProfile, SimulatorConfig,
};
