//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Oracles here are deliberately re-implemented from the definitions (not
//! the library code) so that agreement is evidence, not tautology.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use convo_breakdown::analysis::{
    aggregate_patterns, attribution_counts, format_iteration_stats, render_report,
    AttributionCounts, IterationStats, KindRegistry, ReportFormat,
};
use convo_breakdown::corpus::{serialize_corpus, serialize_findings};
use convo_breakdown::detectors::{
    detect_dialogue_of_deaf, detect_flow_discontinuation, detect_system_failure, run_detectors,
    text_similarity, BreakdownFinding, Detector, DetectorConfig,
};
use convo_breakdown::dialogue::{
    parse_dialogue, serialize_dialogue, Dialogue, DialogueAct, ErrorRecord, IntentLabel,
    Participant, SlotValue, Utterance,
};
use convo_breakdown::model::{default_model, load_model, InteractionModel, DEFAULT_MODEL_JSON};
use convo_breakdown::sim::{default_catalog, generate_corpus, load_preset, PRESET_NAMES};

const CASE_STUDY_SEED: u64 = 2024;

fn pass(name: &str) {
    println!("PASS {name}");
}

fn label(s: &str) -> IntentLabel {
    IntentLabel::parse(s).unwrap()
}

fn turn(index: usize, intent: &str, text: &str) -> Utterance {
    let l = label(intent);
    Utterance {
        index,
        participant: l.participant(),
        text: text.to_string(),
        act: DialogueAct::new(l),
    }
}

fn dialogue(id: &str, turns: &[(&str, &str)]) -> Dialogue {
    let mut d = Dialogue::new(id);
    for (i, (intent, text)) in turns.iter().enumerate() {
        d.utterances.push(turn(i, intent, text));
    }
    d
}

// ---------------------------------------------------------------------------
// Criterion: detector algorithms agree with brute-force oracles.

const RANDOM_INTENTS: [&str; 6] = [
    "A_WELCOME",
    "A_ELICIT",
    "A_CANT_HELP",
    "U_REVEAL",
    "U_ACCEPT",
    "A_COUNT_RESULTS+A_ELICIT",
];

const RANDOM_TEXTS: [&str; 4] = [
    "What genre are you in the mood for?",
    "Sorry, I can't help you with that.",
    "I'm looking for action movies",
    "what genre are you in the mood for",
];

fn random_dialogue(rng: &mut ChaCha8Rng, id: usize) -> Dialogue {
    let len = rng.gen_range(0..=14);
    let mut d = Dialogue::new(format!("rand-{id}"));
    for i in 0..len {
        let intent = RANDOM_INTENTS[rng.gen_range(0..RANDOM_INTENTS.len())];
        let text = RANDOM_TEXTS[rng.gen_range(0..RANDOM_TEXTS.len())];
        d.utterances.push(turn(i, intent, text));
    }
    if rng.gen_bool(0.2) {
        let kind = if rng.gen_bool(0.5) { "RecursionError" } else { "ConcludeError" };
        d.error_log.push(ErrorRecord {
            kind: kind.to_string(),
            at_turn: Some(len),
            message: "injected".to_string(),
        });
    }
    d
}

/// Window scan spelled out with explicit index arithmetic.
fn oracle_dialogue_of_deaf(d: &Dialogue, cfg: &DetectorConfig) -> BreakdownFinding {
    let mut finding = BreakdownFinding {
        detector: Detector::DialogueOfDeaf,
        dialogue_id: d.id.clone(),
        path: Vec::new(),
        detail: String::new(),
    };
    if d.error_log.iter().any(|r| r.kind == cfg.recursion_error_kind) {
        finding.path = d.intent_sequence();
        finding.detail = cfg.recursion_error_kind.clone();
        return finding;
    }
    let agents: Vec<&Utterance> =
        d.utterances.iter().filter(|u| u.participant == Participant::Agent).collect();
    for start in 0..agents.len() {
        if start + cfg.dod_window > agents.len() {
            break;
        }
        let anchor = agents[start];
        let mut all_match = true;
        for offset in 1..cfg.dod_window {
            let succ = agents[start + offset];
            if succ.act.intent != anchor.act.intent
                || text_similarity(&anchor.text, &succ.text) < cfg.text_similarity_threshold
            {
                all_match = false;
                break;
            }
        }
        if all_match {
            finding.path = d.utterances[..=anchor.index]
                .iter()
                .map(|u| u.act.intent.clone())
                .collect();
            finding.detail = format!("repeated intent {}", anchor.act.intent);
            return finding;
        }
    }
    finding
}

/// Independent reading of the bundled model config, plus a from-scratch
/// implementation of the transition rule over plain strings.
struct OracleModel {
    nodes: HashSet<String>,
    edges: HashSet<(String, String)>,
    starts: HashSet<String>,
}

impl OracleModel {
    fn from_default_config() -> Self {
        let value: serde_json::Value = serde_json::from_str(DEFAULT_MODEL_JSON).unwrap();
        let set = |key: &str| -> HashSet<String> {
            value[key]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap().to_string())
                .collect()
        };
        let edges = value["edges"]
            .as_array()
            .unwrap()
            .iter()
            .map(|pair| {
                let pair = pair.as_array().unwrap();
                (
                    pair[0].as_str().unwrap().to_string(),
                    pair[1].as_str().unwrap().to_string(),
                )
            })
            .collect();
        OracleModel { nodes: set("nodes"), edges, starts: set("start_nodes") }
    }

    fn expandable(&self, l: &str) -> bool {
        l.split('+').all(|c| self.nodes.contains(c))
    }

    fn chain_ok(&self, l: &str) -> bool {
        let parts: Vec<&str> = l.split('+').collect();
        parts
            .windows(2)
            .all(|w| self.edges.contains(&(w[0].to_string(), w[1].to_string())))
    }

    fn allowed(&self, from: &str, to: &str) -> bool {
        if self.edges.contains(&(from.to_string(), to.to_string())) {
            return true;
        }
        self.expandable(from)
            && self.expandable(to)
            && self.chain_ok(from)
            && self.chain_ok(to)
            && self.edges.contains(&(
                from.split('+').last().unwrap().to_string(),
                to.split('+').next().unwrap().to_string(),
            ))
    }

    fn valid_start(&self, l: &str) -> bool {
        self.starts.contains(l)
            || (self.expandable(l)
                && self.chain_ok(l)
                && self.starts.contains(l.split('+').next().unwrap()))
    }

    /// All-prefix check: the verdict index is found by testing every prefix
    /// independently.
    fn shortest_invalid_prefix(&self, path: &[String]) -> Option<usize> {
        if path.is_empty() {
            return None;
        }
        if !self.valid_start(&path[0]) {
            return Some(0);
        }
        for k in 1..path.len() {
            if !self.allowed(&path[k - 1], &path[k]) {
                return Some(k);
            }
        }
        None
    }
}

#[test]
fn criterion_algorithm_oracles() {
    let model = default_model();
    let oracle = OracleModel::from_default_config();
    let cfg = DetectorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..1000 {
        let d = random_dialogue(&mut rng, i);

        let b2 = detect_dialogue_of_deaf(&d, &cfg);
        assert_eq!(b2, oracle_dialogue_of_deaf(&d, &cfg), "B2 disagreement on {}", d.id);

        let b3 = detect_flow_discontinuation(&d, &model);
        let seq: Vec<String> = d.intent_sequence().iter().map(|l| l.canonical()).collect();
        match oracle.shortest_invalid_prefix(&seq) {
            None => assert!(!b3.flagged(), "B3 false positive on {}", d.id),
            Some(k) => {
                assert!(b3.flagged(), "B3 false negative on {}", d.id);
                assert_eq!(b3.detail, format!("invalid at index {k}"), "{}", d.id);
                assert_eq!(b3.path.len(), k + 1, "{}", d.id);
            }
        }
    }
    pass("algorithm oracles: B2 and B3 match brute force on 1000 random dialogues");
}

#[test]
fn criterion_graph_validity() {
    let model = default_model();
    let oracle = OracleModel::from_default_config();
    let mut alphabet: Vec<String> = model.nodes().map(|l| l.canonical()).collect();
    alphabet.push("A_JUNK".to_string());
    alphabet.push("U_JUNK".to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..1000 {
        let len = rng.gen_range(0..=12);
        let path: Vec<String> =
            (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect();
        let labels: Vec<IntentLabel> = path.iter().map(|s| label(s)).collect();
        let verdict = model.is_valid_path(&labels);
        assert_eq!(
            verdict.violation_index,
            oracle.shortest_invalid_prefix(&path),
            "disagreement on {path:?}"
        );
        assert_eq!(verdict.valid, verdict.violation_index.is_none());
        // Prefix monotonicity.
        match verdict.violation_index {
            None => {
                for k in 0..=labels.len() {
                    assert!(model.is_valid_path(&labels[..k]).valid);
                }
            }
            Some(v) => {
                assert!(model.is_valid_path(&labels[..v]).valid);
                assert!(!model.is_valid_path(&labels[..=v]).valid);
            }
        }
    }
    pass("graph validity: is_valid_path matches edge-by-edge brute force on 1000 paths");
}

#[test]
fn criterion_recursion_error_semantics() {
    let cfg = DetectorConfig::default();
    let base = [("A_WELCOME", "Hi"), ("U_REVEAL", "action movies")];
    let record = |kind: &str| ErrorRecord {
        kind: kind.to_string(),
        at_turn: Some(2),
        message: "fixture".to_string(),
    };

    // 1: only a RecursionError — B2 with the full path, not B1.
    let mut d1 = dialogue("f1", &base);
    d1.error_log.push(record("RecursionError"));
    assert!(!detect_system_failure(&d1, &cfg).flagged());
    let b2 = detect_dialogue_of_deaf(&d1, &cfg);
    assert!(b2.flagged());
    assert_eq!(b2.path.len(), 2);

    // 2: a ConcludeError — B1, not B2.
    let mut d2 = dialogue("f2", &base);
    d2.error_log.push(record("ConcludeError"));
    assert!(detect_system_failure(&d2, &cfg).flagged());
    assert!(!detect_dialogue_of_deaf(&d2, &cfg).flagged());

    // 3: both kinds — both detectors flag.
    let mut d3 = dialogue("f3", &base);
    d3.error_log.push(record("RecursionError"));
    d3.error_log.push(record("RemovePreferenceError"));
    assert!(detect_system_failure(&d3, &cfg).flagged());
    assert_eq!(detect_system_failure(&d3, &cfg).detail, "RemovePreferenceError");
    assert!(detect_dialogue_of_deaf(&d3, &cfg).flagged());

    // 4: empty error log — neither flags.
    let d4 = dialogue("f4", &base);
    assert!(!detect_system_failure(&d4, &cfg).flagged());
    assert!(!detect_dialogue_of_deaf(&d4, &cfg).flagged());

    pass("recursion-error semantics: 4 fixtures behave exactly as specified");
}

#[test]
fn criterion_repetition_reconstructions() {
    let cfg = DetectorConfig::default();

    // Three identical elicitations with user replies between: a six-turn
    // dialogue alternating user and agent.
    let q = "What type of food do you prefer and what is your price range?";
    let fig3 = dialogue(
        "fig3",
        &[
            ("U_REVEAL", "I need a restaurant"),
            ("A_ELICIT", q),
            ("U_REVEAL", "indian food, cheap"),
            ("A_ELICIT", q),
            ("U_REVEAL", "CHEAP INDIAN FOOD"),
            ("A_ELICIT", q),
        ],
    );
    assert_eq!(fig3.intent_sequence().len(), 6);
    let f = detect_dialogue_of_deaf(&fig3, &cfg);
    assert!(f.flagged());
    // The flagged path ends at the first of the three repeats (turn 1).
    assert_eq!(f.path.len(), 2);
    assert_eq!(f.path.last().unwrap().canonical(), "A_ELICIT");

    // Twelve CANT_HELP turns in a row (user asking for one more
    // recommendation each time).
    let mut turns: Vec<(&str, &str)> =
        vec![("A_RECOMMEND", "How about Heat (1995)?"), ("U_ACCEPT", "I like this")];
    for _ in 0..12 {
        turns.push(("U_CONTINUE_RECOMMENDATION", "Can I have another recommendation?"));
        turns.push(("A_CANT_HELP", "Sorry, I can't help you with that."));
    }
    let fig5 = dialogue("fig5", &turns);
    let f = detect_dialogue_of_deaf(&fig5, &cfg);
    assert!(f.flagged());
    // Anchor is the first CANT_HELP, at turn index 3.
    assert_eq!(f.path.len(), 4);
    assert_eq!(f.path.last().unwrap().canonical(), "A_CANT_HELP");

    pass("repetition reconstructions: repeated-elicit and CANT_HELP-x12 fixtures flagged by B2");
}

// ---------------------------------------------------------------------------
// Criterion: seeded case-study direction.

struct IterationOutcome {
    b1: usize,
    b2: usize,
    b3: usize,
    us_b3: usize,
}

fn run_iteration(name: &str, model: &InteractionModel) -> (Vec<Dialogue>, Vec<BreakdownFinding>) {
    let profile = load_preset(name).unwrap();
    let catalog = default_catalog();
    let corpus = generate_corpus(100, &profile, model, &catalog, CASE_STUDY_SEED).unwrap();
    let findings = run_detectors(&corpus, model, &DetectorConfig::default());
    (corpus, findings)
}

fn outcome(findings: &[BreakdownFinding]) -> IterationOutcome {
    let mut out = IterationOutcome { b1: 0, b2: 0, b3: 0, us_b3: 0 };
    for f in findings {
        if !f.flagged() {
            continue;
        }
        match f.detector {
            Detector::SystemFailure => out.b1 += 1,
            Detector::DialogueOfDeaf => out.b2 += 1,
            Detector::FlowDiscontinuation => out.b3 += 1,
        }
    }
    let counts = attribution_counts(findings, &KindRegistry::default());
    out.us_b3 = counts
        .get(&Detector::FlowDiscontinuation)
        .and_then(|m| m.get(&convo_breakdown::Attribution::Us))
        .copied()
        .unwrap_or(0);
    out
}

#[test]
fn criterion_case_study_direction() {
    let started = std::time::Instant::now();
    let model = default_model();
    let outcomes: Vec<IterationOutcome> = PRESET_NAMES
        .iter()
        .map(|name| outcome(&run_iteration(name, &model).1))
        .collect();

    assert_eq!(outcomes[0].b1, 0, "iteration-1 must be free of system failures");
    assert!(outcomes[0].b2 > 0, "iteration-1 must show dialogue-of-the-deaf breakdowns");
    assert!(outcomes[0].b3 > 0, "iteration-1 must show flow discontinuations");
    assert!(
        outcomes[1].b2 < outcomes[0].b2,
        "iteration-2 B2 ({}) must drop below iteration-1 B2 ({})",
        outcomes[1].b2,
        outcomes[0].b2
    );
    assert!(
        outcomes[4].b3 < outcomes[3].b3,
        "iteration-5 B3 ({}) must drop below iteration-4 B3 ({})",
        outcomes[4].b3,
        outcomes[3].b3
    );
    assert_eq!(outcomes[5].us_b3, 0, "iteration-6 must eliminate simulator-caused B3");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "case study took {elapsed:?}, budget is 60s");
    pass("case-study direction: seeded 6x100 corpora reproduce the qualitative claims");
}

#[test]
fn criterion_aggregation_conservation() {
    let model = default_model();
    for name in PRESET_NAMES {
        let (corpus, findings) = run_iteration(name, &model);
        let summaries = aggregate_patterns(&findings);
        for det in
            [Detector::SystemFailure, Detector::DialogueOfDeaf, Detector::FlowDiscontinuation]
        {
            let flagged = findings
                .iter()
                .filter(|f| f.detector == det && f.flagged() && !f.path.is_empty())
                .count();
            assert_eq!(summaries[&det].total, flagged, "{name}/{det:?}");
        }
        // Sanity: every corpus has the expected cardinality of findings.
        assert_eq!(findings.len(), corpus.len() * 3);
    }
    pass("aggregation conservation: per-detector totals equal flagged dialogue counts");
}

// ---------------------------------------------------------------------------
// Criterion: report golden files.

fn golden_findings() -> Vec<BreakdownFinding> {
    let mk = |det: Detector, id: &str, path: &[&str], detail: &str| BreakdownFinding {
        detector: det,
        dialogue_id: id.to_string(),
        path: path.iter().map(|s| label(s)).collect(),
        detail: detail.to_string(),
    };
    vec![
        mk(
            Detector::SystemFailure,
            "g1",
            &["A_WELCOME", "U_REVEAL", "A_RECOMMEND", "U_DENY"],
            "ConcludeError",
        ),
        mk(
            Detector::SystemFailure,
            "g2",
            &["A_WELCOME", "U_REVEAL", "A_RECOMMEND", "U_DENY"],
            "ConcludeError",
        ),
        mk(Detector::DialogueOfDeaf, "g3", &["A_WELCOME", "U_REVEAL", "A_CANT_HELP"], "repeated intent A_CANT_HELP"),
        mk(
            Detector::FlowDiscontinuation,
            "g4",
            &["A_WELCOME", "U_REVEAL", "A_COUNT_RESULTS+A_ELICIT", "U_ACCEPT"],
            "invalid at index 3",
        ),
        mk(Detector::FlowDiscontinuation, "g5", &["U_REVEAL"], "invalid at index 0"),
        mk(Detector::SystemFailure, "clean", &[], ""),
    ]
}

fn check_golden(name: &str, actual: &str) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var("UPDATE_GOLDEN").is_ok() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden file {}: {e}", path.display()));
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn golden_attributions(findings: &[BreakdownFinding]) -> AttributionCounts {
    attribution_counts(findings, &KindRegistry::default())
}

#[test]
fn criterion_report_goldens() {
    let findings = golden_findings();
    let summaries = aggregate_patterns(&findings);
    let attributions = golden_attributions(&findings);
    let stats = IterationStats {
        unique_paths: 96,
        length_mean: 19.84,
        length_std: 14.45,
        existing_success: 0,
        existing_fail: 0,
        new_success: 14,
        new_fail: 86,
    };

    let table = render_report(&summaries, &attributions, Some(&stats), ReportFormat::TableText);
    assert!(table.contains("('A_WELCOME', 'U_REVEAL', 'A_COUNT_RESULTS+ELICIT', 'U_ACCEPT') | 1"));
    assert!(table.contains("Total | 2"));
    assert!(table.contains("19.84 \u{b1} 14.45"), "Table-1 mean-std layout");
    check_golden("report.txt", &table);

    let csv = render_report(&summaries, &attributions, None, ReportFormat::Csv);
    check_golden("report.csv", &csv);
    let structured = render_report(&summaries, &attributions, Some(&stats), ReportFormat::Structured);
    check_golden("report.json", &structured);

    // Format string for the iteration table is exactly two decimals.
    let s = format_iteration_stats(&stats);
    assert!(s.contains("Avg. conv. length: 19.84 \u{b1} 14.45"));

    pass("report goldens: table-text, csv, and structured outputs match byte-for-byte");
}

#[test]
fn criterion_transcript_and_model_goldens() {
    // A fixture transcript exercising every schema feature: composite
    // intents, annotations, metadata, and an error record.
    let mut d = Dialogue::new("golden-transcript");
    d.metadata = convo_breakdown::dialogue::DialogueMetadata {
        iteration: "iteration-2".to_string(),
        seed: 7,
        config_digest: "0011223344556677".to_string(),
    };
    d.utterances.push(turn(0, "A_WELCOME", "Hello! I can recommend movies."));
    let mut reveal = turn(1, "U_REVEAL", "I'm looking for action movies");
    reveal.act.annotations.push(SlotValue::new("genre", "action"));
    d.utterances.push(reveal);
    let mut count = turn(2, "A_COUNT_RESULTS+A_ELICIT", "I found 7 movies. Any preferred decade?");
    count.act.annotations.push(SlotValue::new("count", "7"));
    d.utterances.push(count);
    d.error_log.push(ErrorRecord {
        kind: "ConcludeError".to_string(),
        at_turn: Some(3),
        message: "unhandled state while concluding".to_string(),
    });
    let text = serialize_dialogue(&d);
    check_golden("transcript.json", &text);
    assert_eq!(parse_dialogue(&text).unwrap(), d);

    let model = default_model();
    check_golden("model.json", &model.serialize());
    assert_eq!(load_model(&model.serialize()).unwrap(), model);

    pass("schema goldens: transcript and model-config fixtures locked byte-for-byte");
}

#[test]
fn criterion_determinism() {
    let model = default_model();
    let catalog = default_catalog();
    let profile = load_preset("iteration-3").unwrap();
    let run = || {
        let corpus = generate_corpus(40, &profile, &model, &catalog, 99).unwrap();
        let corpus_bytes = serialize_corpus(&corpus);
        let findings = run_detectors(&corpus, &model, &DetectorConfig::default());
        let findings_bytes = serialize_findings(&findings);
        let summaries = aggregate_patterns(&findings);
        let report = render_report(
            &summaries,
            &attribution_counts(&findings, &KindRegistry::default()),
            None,
            ReportFormat::TableText,
        );
        (corpus_bytes, findings_bytes, report)
    };
    assert_eq!(run(), run());
    pass("determinism: two generate-detect-report pipelines are byte-identical");
}

#[test]
fn criterion_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    // 500 random transcripts.
    for i in 0..500 {
        let mut d = random_dialogue(&mut rng, i);
        if d.utterances.is_empty() && d.error_log.is_empty() {
            d.error_log.push(ErrorRecord {
                kind: "ConcludeError".to_string(),
                at_turn: Some(0),
                message: "empty dialogue needs an error".to_string(),
            });
        }
        d.metadata.seed = rng.gen();
        let text = serialize_dialogue(&d);
        assert_eq!(parse_dialogue(&text).unwrap(), d, "transcript round-trip {i}");
        assert_eq!(serialize_dialogue(&parse_dialogue(&text).unwrap()), text);
    }
    // 500 random models over a small label universe.
    let universe = ["A_WELCOME", "A_ELICIT", "A_RECOMMEND", "U_REVEAL", "U_ACCEPT", "U_REJECT"];
    for i in 0..500 {
        let nodes: Vec<&str> =
            universe.iter().filter(|_| rng.gen_bool(0.7)).copied().collect();
        let nodes = if nodes.is_empty() { vec!["A_WELCOME"] } else { nodes };
        let mut edges = Vec::new();
        for from in &nodes {
            for to in &nodes {
                if rng.gen_bool(0.3) {
                    edges.push((from.to_string(), to.to_string()));
                }
            }
        }
        let starts = vec![nodes[rng.gen_range(0..nodes.len())]];
        let config = serde_json::json!({
            "name": format!("random-{i}"),
            "version": "1",
            "start_nodes": starts,
            "nodes": nodes,
            "edges": edges,
        });
        let model = load_model(&config.to_string()).unwrap();
        let again = load_model(&model.serialize()).unwrap();
        assert_eq!(model, again, "model round-trip {i}");
    }
    pass("round-trips: 500 transcripts and 500 model configs survive parse/serialize");
}

// ---------------------------------------------------------------------------
// Extra directional evidence: per-iteration summary shape stays consistent.

#[test]
fn iteration_narrative_kinds() {
    let model = default_model();
    let kinds_of = |findings: &[BreakdownFinding]| -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for f in findings {
            if f.detector == Detector::SystemFailure && f.flagged() {
                *m.entry(f.detail.clone()).or_insert(0) += 1;
            }
        }
        m
    };
    let (_, f2) = run_iteration("iteration-2", &model);
    let k2 = kinds_of(&f2);
    assert!(k2.contains_key("ConcludeError"), "iteration-2 surfaces the conclude crash");
    assert!(
        k2.contains_key("RemovePreferenceError"),
        "iteration-2 surfaces the remove-preference crash"
    );
    let (_, f3) = run_iteration("iteration-3", &model);
    let k3 = kinds_of(&f3);
    assert!(!k3.contains_key("ConcludeError"), "iteration-3 fixes the conclude crash");
    let (_, f4) = run_iteration("iteration-4", &model);
    assert!(kinds_of(&f4).is_empty(), "iteration-4 fixes all crashes");
}
