//! The three breakdown detectors: system failure (B1), dialogue of the deaf
//! (B2), and flow discontinuation (B3). All detectors are pure functions of
//! the dialogue plus configuration and return one finding each — with an
//! empty path when no breakdown is present.

use serde::{Deserialize, Serialize};

use crate::dialogue::{Dialogue, IntentLabel};
use crate::model::InteractionModel;

/// Detector identity, serialized as B1/B2/B3 in exported findings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Detector {
    #[serde(rename = "B1")]
    SystemFailure,
    #[serde(rename = "B2")]
    DialogueOfDeaf,
    #[serde(rename = "B3")]
    FlowDiscontinuation,
}

impl Detector {
    pub fn code(&self) -> &'static str {
        match self {
            Detector::SystemFailure => "B1",
            Detector::DialogueOfDeaf => "B2",
            Detector::FlowDiscontinuation => "B3",
        }
    }
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Tunable detector parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Number of consecutive same-intent agent utterances that count as a
    /// dialogue-of-the-deaf window.
    pub dod_window: usize,
    /// Minimum text similarity between the window anchor and each successor.
    pub text_similarity_threshold: f64,
    /// Error kind reserved for turn-budget exhaustion; flags B2, never B1.
    pub recursion_error_kind: String,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            dod_window: 3,
            text_similarity_threshold: 0.9,
            recursion_error_kind: "RecursionError".to_string(),
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.dod_window < 2 {
            return Err(format!("dod_window must be >= 2, got {}", self.dod_window));
        }
        if !(0.0..=1.0).contains(&self.text_similarity_threshold) {
            return Err(format!(
                "text_similarity_threshold must be in [0,1], got {}",
                self.text_similarity_threshold
            ));
        }
        Ok(())
    }
}

/// One detector's verdict on one dialogue. An empty `detail` means no
/// breakdown (the path is then empty too, except that the converse does not
/// hold: a crash before the first turn yields an empty path with detail).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownFinding {
    pub detector: Detector,
    pub dialogue_id: String,
    pub path: Vec<IntentLabel>,
    pub detail: String,
}

impl BreakdownFinding {
    fn clean(detector: Detector, dialogue_id: &str) -> Self {
        BreakdownFinding {
            detector,
            dialogue_id: dialogue_id.to_string(),
            path: Vec::new(),
            detail: String::new(),
        }
    }

    /// True when the detector found a breakdown.
    pub fn flagged(&self) -> bool {
        !self.detail.is_empty()
    }
}

/// B1: any recorded error whose kind differs from the recursion kind.
pub fn detect_system_failure(d: &Dialogue, cfg: &DetectorConfig) -> BreakdownFinding {
    for rec in &d.error_log {
        if rec.kind != cfg.recursion_error_kind {
            return BreakdownFinding {
                detector: Detector::SystemFailure,
                dialogue_id: d.id.clone(),
                path: d.intent_sequence(),
                detail: rec.kind.clone(),
            };
        }
    }
    BreakdownFinding::clean(Detector::SystemFailure, &d.id)
}

/// Normalized similarity: 1 − (Levenshtein distance / max length) over
/// lowercased, whitespace-collapsed text. Identical strings score 1.0.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    let a = normalize(a);
    let b = normalize(b);
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / max_len as f64
}

fn normalize(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// B2: a recursion-kind error record, or a run of `dod_window` agent
/// utterances sharing one intent whose texts are all near-identical to the
/// first of the run. The flagged path covers the dialogue up to and
/// including that anchor utterance.
pub fn detect_dialogue_of_deaf(d: &Dialogue, cfg: &DetectorConfig) -> BreakdownFinding {
    for rec in &d.error_log {
        if rec.kind == cfg.recursion_error_kind {
            return BreakdownFinding {
                detector: Detector::DialogueOfDeaf,
                dialogue_id: d.id.clone(),
                path: d.intent_sequence(),
                detail: rec.kind.clone(),
            };
        }
    }
    let agents = d.agent_utterances();
    if agents.len() >= cfg.dod_window {
        for window in agents.windows(cfg.dod_window) {
            let anchor = window[0];
            let matched = window[1..].iter().all(|u| {
                u.act.intent == anchor.act.intent
                    && text_similarity(&anchor.text, &u.text) >= cfg.text_similarity_threshold
            });
            if matched {
                let path = d.utterances[..=anchor.index]
                    .iter()
                    .map(|u| u.act.intent.clone())
                    .collect();
                return BreakdownFinding {
                    detector: Detector::DialogueOfDeaf,
                    dialogue_id: d.id.clone(),
                    path,
                    detail: format!("repeated intent {}", anchor.act.intent),
                };
            }
        }
    }
    BreakdownFinding::clean(Detector::DialogueOfDeaf, &d.id)
}

/// B3: grows the intent path one utterance at a time and flags the shortest
/// prefix the interaction model rejects.
pub fn detect_flow_discontinuation(d: &Dialogue, m: &InteractionModel) -> BreakdownFinding {
    let mut path: Vec<IntentLabel> = Vec::with_capacity(d.utterances.len());
    for u in &d.utterances {
        path.push(u.act.intent.clone());
        let verdict = m.is_valid_path(&path);
        if !verdict.valid {
            let index = verdict.violation_index.unwrap();
            return BreakdownFinding {
                detector: Detector::FlowDiscontinuation,
                dialogue_id: d.id.clone(),
                path,
                detail: format!("invalid at index {index}"),
            };
        }
    }
    BreakdownFinding::clean(Detector::FlowDiscontinuation, &d.id)
}

/// Runs all three detectors over a corpus. Exactly three findings per
/// dialogue, in dialogue order, detector order B1, B2, B3.
pub fn run_detectors(
    corpus: &[Dialogue],
    m: &InteractionModel,
    cfg: &DetectorConfig,
) -> Vec<BreakdownFinding> {
    let mut out = Vec::with_capacity(corpus.len() * 3);
    for d in corpus {
        out.push(detect_system_failure(d, cfg));
        out.push(detect_dialogue_of_deaf(d, cfg));
        out.push(detect_flow_discontinuation(d, m));
    }
    out
}
