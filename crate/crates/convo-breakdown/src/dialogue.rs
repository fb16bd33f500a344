//! Canonical data model for annotated dialogues and their transcript format.
//!
//! A dialogue is an ordered list of utterances, each carrying a participant,
//! free text, and a dialogue act (an intent label plus slot-value
//! annotations). Error records produced during generation live inside the
//! transcript so that detection is a pure function of one artifact.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Side of the conversation an utterance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Participant {
    Agent,
    User,
}

impl Participant {
    /// Prefix carried by intent constituents on this side (`A_` or `U_`).
    pub fn prefix(&self) -> &'static str {
        match self {
            Participant::Agent => "A_",
            Participant::User => "U_",
        }
    }
}

impl fmt::Display for Participant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Participant::Agent => write!(f, "agent"),
            Participant::User => write!(f, "user"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("intent label is empty")]
    Empty,
    #[error("invalid intent constituent `{0}`: must match [A-Z][A-Z0-9_]*")]
    BadConstituent(String),
    #[error("constituent `{0}` lacks a participant prefix (A_ or U_)")]
    MissingPrefix(String),
    #[error("mixed participant prefixes in `{0}`")]
    MixedParticipants(String),
}

/// An intent label: one or more atomic intent names uttered within a single
/// turn. Composite labels render with `+` between constituents, e.g.
/// `A_COUNT_RESULTS+A_ELICIT`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntentLabel {
    constituents: Vec<String>,
}

fn valid_constituent(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

impl IntentLabel {
    /// Parses a rendered label. The first constituent must carry a full
    /// participant prefix; later constituents may use the abbreviated form
    /// seen in published tables (`A_COUNT_RESULTS+ELICIT`), in which case
    /// they inherit the prefix of the first constituent.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        if text.is_empty() {
            return Err(LabelError::Empty);
        }
        let raw: Vec<&str> = text.split('+').collect();
        let first = raw[0];
        if !valid_constituent(first) {
            return Err(LabelError::BadConstituent(first.to_string()));
        }
        let prefix = if first.starts_with("A_") {
            "A_"
        } else if first.starts_with("U_") {
            "U_"
        } else {
            return Err(LabelError::MissingPrefix(first.to_string()));
        };
        let mut constituents = vec![first.to_string()];
        for part in &raw[1..] {
            if !valid_constituent(part) {
                return Err(LabelError::BadConstituent(part.to_string()));
            }
            let full = if part.starts_with("A_") || part.starts_with("U_") {
                part.to_string()
            } else {
                format!("{prefix}{part}")
            };
            if !full.starts_with(prefix) {
                return Err(LabelError::MixedParticipants(text.to_string()));
            }
            constituents.push(full);
        }
        Ok(IntentLabel { constituents })
    }

    /// Builds an atomic (single-constituent) label.
    pub fn atomic(name: &str) -> Result<Self, LabelError> {
        let label = Self::parse(name)?;
        if label.is_composite() {
            return Err(LabelError::BadConstituent(name.to_string()));
        }
        Ok(label)
    }

    pub fn constituents(&self) -> &[String] {
        &self.constituents
    }

    pub fn is_composite(&self) -> bool {
        self.constituents.len() > 1
    }

    /// True if any constituent equals `atomic` (full-prefix form).
    pub fn contains(&self, atomic: &str) -> bool {
        self.constituents.iter().any(|c| c == atomic)
    }

    pub fn participant(&self) -> Participant {
        if self.constituents[0].starts_with("A_") {
            Participant::Agent
        } else {
            Participant::User
        }
    }

    pub fn first_constituent(&self) -> &str {
        &self.constituents[0]
    }

    pub fn last_constituent(&self) -> &str {
        self.constituents.last().unwrap()
    }

    /// Canonical rendering: fully-prefixed constituents joined with `+`.
    pub fn canonical(&self) -> String {
        self.constituents.join("+")
    }

    /// Table rendering: the participant prefix is dropped on the second and
    /// later constituents (`A_COUNT_RESULTS+ELICIT`), matching the published
    /// summary tables.
    pub fn abbreviated(&self) -> String {
        let prefix = self.participant().prefix();
        let mut out = self.constituents[0].clone();
        for c in &self.constituents[1..] {
            out.push('+');
            out.push_str(c.strip_prefix(prefix).unwrap_or(c));
        }
        out
    }
}

impl fmt::Display for IntentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical())
    }
}

impl std::str::FromStr for IntentLabel {
    type Err = LabelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for IntentLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for IntentLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        IntentLabel::parse(&s).map_err(D::Error::custom)
    }
}

/// A slot-value annotation attached to a dialogue act.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotValue {
    pub slot: String,
    pub value: String,
}

impl SlotValue {
    pub fn new(slot: impl Into<String>, value: impl Into<String>) -> Self {
        SlotValue { slot: slot.into(), value: value.into() }
    }
}

/// Structured meaning of an utterance: an intent with slot-value annotations.
/// Duplicate slot names are allowed (multi-valued slots).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueAct {
    pub intent: IntentLabel,
    #[serde(default)]
    pub annotations: Vec<SlotValue>,
}

impl DialogueAct {
    pub fn new(intent: IntentLabel) -> Self {
        DialogueAct { intent, annotations: Vec::new() }
    }

    pub fn with_annotations(intent: IntentLabel, annotations: Vec<SlotValue>) -> Self {
        DialogueAct { intent, annotations }
    }
}

/// One turn of a dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub index: usize,
    pub participant: Participant,
    pub text: String,
    pub act: DialogueAct,
}

/// A recorded runtime error, kept in-band with the transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_turn: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogueMetadata {
    pub iteration: String,
    pub seed: u64,
    pub config_digest: String,
}

impl Default for DialogueMetadata {
    fn default() -> Self {
        DialogueMetadata { iteration: String::new(), seed: 0, config_digest: String::new() }
    }
}

/// An annotated conversation between the agent and the user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    #[serde(default)]
    pub metadata: DialogueMetadata,
    pub utterances: Vec<Utterance>,
    #[serde(default)]
    pub error_log: Vec<ErrorRecord>,
}

#[derive(Debug, Error)]
pub enum DialogueError {
    #[error("transcript parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("turn {turn}: {message}")]
    Validation { turn: usize, message: String },
    #[error("dialogue `{0}` has no utterances and an empty error log")]
    EmptyWithoutErrors(String),
    #[error("error record {index}: {message}")]
    BadErrorRecord { index: usize, message: String },
}

impl Dialogue {
    pub fn new(id: impl Into<String>) -> Self {
        Dialogue {
            id: id.into(),
            metadata: DialogueMetadata::default(),
            utterances: Vec::new(),
            error_log: Vec::new(),
        }
    }

    /// The ordered sequence of intent labels, one per utterance.
    pub fn intent_sequence(&self) -> Vec<IntentLabel> {
        self.utterances.iter().map(|u| u.act.intent.clone()).collect()
    }

    /// Agent-side utterances in original order.
    pub fn agent_utterances(&self) -> Vec<&Utterance> {
        self.utterances
            .iter()
            .filter(|u| u.participant == Participant::Agent)
            .collect()
    }

    /// Checks every structural invariant, naming the offending turn.
    pub fn validate(&self) -> Result<(), DialogueError> {
        if self.utterances.is_empty() && self.error_log.is_empty() {
            return Err(DialogueError::EmptyWithoutErrors(self.id.clone()));
        }
        for (pos, u) in self.utterances.iter().enumerate() {
            if u.index != pos {
                let message = if u.index > pos {
                    format!("gap at index {pos}")
                } else {
                    format!("expected index {pos}, found {}", u.index)
                };
                return Err(DialogueError::Validation { turn: pos, message });
            }
            if u.act.intent.participant() != u.participant {
                return Err(DialogueError::Validation {
                    turn: pos,
                    message: format!(
                        "intent `{}` does not match participant `{}`",
                        u.act.intent, u.participant
                    ),
                });
            }
            for sv in &u.act.annotations {
                if sv.slot.is_empty() {
                    return Err(DialogueError::Validation {
                        turn: pos,
                        message: "empty slot name in annotation".to_string(),
                    });
                }
            }
        }
        for (i, rec) in self.error_log.iter().enumerate() {
            if rec.kind.is_empty() || rec.kind.contains(char::is_whitespace) {
                return Err(DialogueError::BadErrorRecord {
                    index: i,
                    message: format!("kind `{}` must be a single token", rec.kind),
                });
            }
            if let Some(at) = rec.at_turn {
                // `at_turn` may equal the would-be next index: a crash while
                // producing a turn.
                if at > self.utterances.len() {
                    return Err(DialogueError::BadErrorRecord {
                        index: i,
                        message: format!(
                            "at_turn {at} out of range for {} utterances",
                            self.utterances.len()
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

const KNOWN_TOP_LEVEL_KEYS: &[&str] = &["id", "metadata", "utterances", "error_log"];

/// Parses a transcript document, validating all invariants.
pub fn parse_dialogue(text: &str) -> Result<Dialogue, DialogueError> {
    parse_dialogue_with_warnings(text).map(|(d, _)| d)
}

/// Like [`parse_dialogue`], also reporting unknown top-level keys that were
/// ignored.
pub fn parse_dialogue_with_warnings(
    text: &str,
) -> Result<(Dialogue, Vec<String>), DialogueError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    if let Some(map) = value.as_object() {
        for key in map.keys() {
            if !KNOWN_TOP_LEVEL_KEYS.contains(&key.as_str()) {
                warnings.push(format!("ignoring unknown top-level key `{key}`"));
            }
        }
    }
    let dialogue: Dialogue = serde_json::from_value(value)?;
    dialogue.validate()?;
    Ok((dialogue, warnings))
}

/// Serializes a dialogue to its canonical transcript form. Output is
/// byte-stable: equal dialogues serialize to identical bytes.
pub fn serialize_dialogue(d: &Dialogue) -> String {
    let mut out = serde_json::to_string_pretty(d).expect("dialogue serialization cannot fail");
    out.push('\n');
    out
}
