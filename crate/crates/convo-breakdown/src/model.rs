//! Directed intent-transition graph and path-validity queries.
//!
//! The model is data, loaded from a config document; a conservative default
//! for the movie-recommendation flow ships with the crate. Composite labels
//! are handled by an expansion rule unless listed as explicitly atomic
//! composites in the config.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::IntentLabel;

/// Outcome of checking a full intent path against a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathVerdict {
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation_index: Option<usize>,
}

impl PathVerdict {
    pub fn valid() -> Self {
        PathVerdict { valid: true, violation_index: None }
    }

    pub fn invalid_at(index: usize) -> Self {
        PathVerdict { valid: false, violation_index: Some(index) }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("bad intent label in model config: {0}")]
    Label(#[from] crate::dialogue::LabelError),
    #[error("edge references undeclared node `{0}`")]
    DanglingEdge(String),
    #[error("start node `{0}` is not declared in nodes")]
    DanglingStart(String),
    #[error("composite node `{0}` is not declared in nodes")]
    DanglingComposite(String),
    #[error("start_nodes must be non-empty")]
    EmptyStartSet,
}

/// On-disk shape of a model config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelConfig {
    name: String,
    version: String,
    start_nodes: Vec<String>,
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    composite_nodes: Vec<String>,
}

/// Directed graph over intent labels defining allowed transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionModel {
    pub name: String,
    pub version: String,
    nodes: BTreeSet<IntentLabel>,
    edges: BTreeSet<(IntentLabel, IntentLabel)>,
    start_nodes: BTreeSet<IntentLabel>,
    /// Composites treated as semantically atomic: the expansion rule is
    /// bypassed for them and only explicit edges apply.
    composite_nodes: BTreeSet<IntentLabel>,
}

impl InteractionModel {
    pub fn nodes(&self) -> impl Iterator<Item = &IntentLabel> {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(IntentLabel, IntentLabel)> {
        self.edges.iter()
    }

    pub fn start_nodes(&self) -> impl Iterator<Item = &IntentLabel> {
        self.start_nodes.iter()
    }

    pub fn contains_node(&self, label: &IntentLabel) -> bool {
        self.nodes.contains(label)
    }

    fn atomic_edge(&self, from: &str, to: &str) -> bool {
        // Cheap lookup without allocating labels would need a parallel index;
        // model sizes are tiny so parse-on-query is fine for internal use.
        match (IntentLabel::atomic(from), IntentLabel::atomic(to)) {
            (Ok(f), Ok(t)) => self.edges.contains(&(f, t)),
            _ => false,
        }
    }

    fn atomic_known(&self, name: &str) -> bool {
        IntentLabel::atomic(name).map(|l| self.nodes.contains(&l)).unwrap_or(false)
    }

    /// True if the internal chain of a composite label is atomically
    /// connected (trivially true for atomic labels).
    fn internally_connected(&self, label: &IntentLabel) -> bool {
        label
            .constituents()
            .windows(2)
            .all(|w| self.atomic_edge(&w[0], &w[1]))
    }

    /// Whether the expansion rule applies to this label on this model:
    /// not an explicitly-atomic composite, and all constituents are known
    /// atomic nodes.
    fn expandable(&self, label: &IntentLabel) -> bool {
        !self.composite_nodes.contains(label)
            && label.constituents().iter().all(|c| self.atomic_known(c))
    }

    /// May `label` open a dialogue?
    pub fn is_valid_start(&self, label: &IntentLabel) -> bool {
        if self.start_nodes.contains(label) {
            return true;
        }
        self.expandable(label)
            && IntentLabel::atomic(label.first_constituent())
                .map(|l| self.start_nodes.contains(&l))
                .unwrap_or(false)
            && self.internally_connected(label)
    }

    /// May `to` directly follow `from`? Explicit edges always win; otherwise
    /// the composite-expansion rule applies: all constituents known, both
    /// labels internally connected, and an atomic edge from the last
    /// constituent of `from` to the first constituent of `to`.
    pub fn is_transition_allowed(&self, from: &IntentLabel, to: &IntentLabel) -> bool {
        if self.edges.contains(&(from.clone(), to.clone())) {
            return true;
        }
        self.expandable(from)
            && self.expandable(to)
            && self.internally_connected(from)
            && self.internally_connected(to)
            && self.atomic_edge(from.last_constituent(), to.first_constituent())
    }

    /// Checks a whole path incrementally; the verdict names the first
    /// offending label. Empty paths are valid.
    pub fn is_valid_path(&self, path: &[IntentLabel]) -> PathVerdict {
        let Some(first) = path.first() else {
            return PathVerdict::valid();
        };
        if !self.is_valid_start(first) {
            return PathVerdict::invalid_at(0);
        }
        for (i, pair) in path.windows(2).enumerate() {
            if !self.is_transition_allowed(&pair[0], &pair[1]) {
                return PathVerdict::invalid_at(i + 1);
            }
        }
        PathVerdict::valid()
    }

    /// User-side labels that may directly follow `from`. Used by the
    /// simulator when sampling the next user action.
    pub fn user_successors(&self, from: &IntentLabel) -> Vec<IntentLabel> {
        let mut out: Vec<IntentLabel> = self
            .nodes
            .iter()
            .filter(|n| n.participant() == crate::dialogue::Participant::User)
            .filter(|n| self.is_transition_allowed(from, n))
            .cloned()
            .collect();
        out.sort();
        out
    }

    /// Serializes the model back to its config document form.
    pub fn serialize(&self) -> String {
        let config = ModelConfig {
            name: self.name.clone(),
            version: self.version.clone(),
            start_nodes: self.start_nodes.iter().map(|l| l.canonical()).collect(),
            nodes: self.nodes.iter().map(|l| l.canonical()).collect(),
            edges: self
                .edges
                .iter()
                .map(|(f, t)| (f.canonical(), t.canonical()))
                .collect(),
            composite_nodes: self.composite_nodes.iter().map(|l| l.canonical()).collect(),
        };
        let mut out = serde_json::to_string_pretty(&config).expect("model serialization");
        out.push('\n');
        out
    }
}

/// Parses a model config document and checks referential integrity.
pub fn load_model(text: &str) -> Result<InteractionModel, ModelError> {
    let config: ModelConfig = serde_json::from_str(text)?;
    let mut nodes = BTreeSet::new();
    for n in &config.nodes {
        nodes.insert(IntentLabel::parse(n)?);
    }
    let mut edges = BTreeSet::new();
    for (from, to) in &config.edges {
        let f = IntentLabel::parse(from)?;
        let t = IntentLabel::parse(to)?;
        if !nodes.contains(&f) {
            return Err(ModelError::DanglingEdge(f.canonical()));
        }
        if !nodes.contains(&t) {
            return Err(ModelError::DanglingEdge(t.canonical()));
        }
        edges.insert((f, t));
    }
    if config.start_nodes.is_empty() {
        return Err(ModelError::EmptyStartSet);
    }
    let mut start_nodes = BTreeSet::new();
    for s in &config.start_nodes {
        let l = IntentLabel::parse(s)?;
        if !nodes.contains(&l) {
            return Err(ModelError::DanglingStart(l.canonical()));
        }
        start_nodes.insert(l);
    }
    let mut composite_nodes = BTreeSet::new();
    for c in &config.composite_nodes {
        let l = IntentLabel::parse(c)?;
        if !nodes.contains(&l) {
            return Err(ModelError::DanglingComposite(l.canonical()));
        }
        composite_nodes.insert(l);
    }
    Ok(InteractionModel {
        name: config.name,
        version: config.version,
        nodes,
        edges,
        start_nodes,
        composite_nodes,
    })
}

/// Source of the bundled default model config.
pub const DEFAULT_MODEL_JSON: &str = include_str!("../assets/default_model.json");

/// The bundled movie-recommendation flow model. See
/// `docs/model-config.md` for the reconstruction notes.
pub fn default_model() -> InteractionModel {
    load_model(DEFAULT_MODEL_JSON).expect("bundled default model must be valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(s: &str) -> IntentLabel {
        IntentLabel::parse(s).unwrap()
    }

    fn tiny_model() -> InteractionModel {
        load_model(
            r#"{
                "name": "tiny",
                "version": "1",
                "start_nodes": ["A_WELCOME"],
                "nodes": ["A_WELCOME", "U_REVEAL"],
                "edges": [["A_WELCOME", "U_REVEAL"]]
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn loads_two_node_model() {
        let m = tiny_model();
        assert_eq!(m.nodes().count(), 2);
        assert!(m.is_transition_allowed(&label("A_WELCOME"), &label("U_REVEAL")));
    }

    #[test]
    fn dangling_edge_is_an_error() {
        let err = load_model(
            r#"{
                "name": "bad", "version": "1",
                "start_nodes": ["A_WELCOME"],
                "nodes": ["A_WELCOME"],
                "edges": [["A_WELCOME", "U_ACCEPT"]]
            }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("U_ACCEPT"), "{err}");
    }

    #[test]
    fn empty_start_set_is_an_error() {
        let err = load_model(
            r#"{
                "name": "bad", "version": "1",
                "start_nodes": [],
                "nodes": ["A_WELCOME"],
                "edges": []
            }"#,
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::EmptyStartSet));
    }

    #[test]
    fn default_model_core_transitions() {
        let m = default_model();
        assert!(m.is_transition_allowed(&label("A_WELCOME"), &label("U_REVEAL")));
        assert!(m.is_transition_allowed(&label("A_RECOMMEND"), &label("U_ACCEPT")));
        assert!(!m.is_transition_allowed(&label("A_ELICIT"), &label("U_ACCEPT")));
    }

    #[test]
    fn default_model_has_seventeen_atomic_labels() {
        let m = default_model();
        let atomics = m.nodes().filter(|n| !n.is_composite()).count();
        assert_eq!(atomics, 17);
        let composites = m.nodes().filter(|n| n.is_composite()).count();
        assert_eq!(composites, 3);
    }

    #[test]
    fn unknown_labels_are_never_valid() {
        let m = default_model();
        assert!(!m.is_transition_allowed(&label("A_BOGUS"), &label("U_REVEAL")));
        assert!(!m.is_transition_allowed(&label("A_WELCOME"), &label("U_BOGUS")));
        assert!(!m.is_valid_path(&[label("U_BOGUS")]).valid);
    }

    #[test]
    fn composite_expansion_brute_force() {
        let m = default_model();
        // Explicit expansion of the composite rule for
        // A_COUNT_RESULTS+A_ELICIT -> U_REVEAL:
        // internal chain + boundary edge must exist atomically.
        assert!(m.atomic_edge("A_COUNT_RESULTS", "A_ELICIT"));
        assert!(m.atomic_edge("A_ELICIT", "U_REVEAL"));
        assert!(m.is_transition_allowed(&label("A_COUNT_RESULTS+A_ELICIT"), &label("U_REVEAL")));
        // Boundary edge A_ELICIT -> U_ACCEPT absent, so the composite form
        // is rejected too.
        assert!(!m.is_transition_allowed(&label("A_COUNT_RESULTS+A_ELICIT"), &label("U_ACCEPT")));
        // Incoming side: U_REVEAL -> A_COUNT_RESULTS exists.
        assert!(m.is_transition_allowed(&label("U_REVEAL"), &label("A_COUNT_RESULTS+A_ELICIT")));
    }

    #[test]
    fn composite_start_uses_first_constituent() {
        let m = tiny_model();
        assert!(m.is_valid_start(&label("A_WELCOME")));
        assert!(!m.is_valid_start(&label("U_REVEAL")));
        // A_WELCOME+U_... style composites can't exist (mixed prefixes), but
        // an unknown-constituent composite must be rejected.
        assert!(!m.is_valid_start(&label("A_WELCOME+A_BOGUS")));
    }

    #[test]
    fn explicit_composite_node_overrides_expansion() {
        let m = load_model(
            r#"{
                "name": "override", "version": "1",
                "start_nodes": ["A_WELCOME"],
                "nodes": ["A_WELCOME", "A_COUNT_RESULTS", "A_ELICIT", "U_REVEAL",
                          "A_COUNT_RESULTS+A_ELICIT"],
                "edges": [["A_WELCOME", "U_REVEAL"],
                          ["A_COUNT_RESULTS", "A_ELICIT"],
                          ["A_ELICIT", "U_REVEAL"]],
                "composite_nodes": ["A_COUNT_RESULTS+A_ELICIT"]
            }"#,
        )
        .unwrap();
        // With the composite listed as atomic, only explicit edges count —
        // and none were declared for it.
        assert!(!m.is_transition_allowed(&label("A_COUNT_RESULTS+A_ELICIT"), &label("U_REVEAL")));
    }

    #[test]
    fn path_verdict_indices() {
        let m = default_model();
        assert!(m.is_valid_path(&[]).valid);
        assert!(m.is_valid_path(&[label("A_WELCOME"), label("U_REVEAL")]).valid);
        assert_eq!(m.is_valid_path(&[label("U_REVEAL")]), PathVerdict::invalid_at(0));
        let p = [
            label("A_WELCOME"),
            label("U_REVEAL"),
            label("A_NO_RESULTS"),
            label("U_REVEAL"),
        ];
        assert_eq!(m.is_valid_path(&p), PathVerdict::invalid_at(3));
    }

    #[test]
    fn config_round_trip() {
        let m = default_model();
        let again = load_model(&m.serialize()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn user_successors_of_recommend() {
        let m = default_model();
        let succ = m.user_successors(&label("A_RECOMMEND"));
        let names: Vec<String> = succ.iter().map(|l| l.canonical()).collect();
        assert!(names.contains(&"U_ACCEPT".to_string()));
        assert!(names.contains(&"U_REJECT".to_string()));
        assert!(!names.contains(&"U_REVEAL".to_string()));
    }
}
