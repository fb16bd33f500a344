//! Aggregation and reporting: pattern-count summaries, breakdown
//! attribution, success classification, corpus path statistics, and
//! iteration-over-iteration comparison.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detectors::{BreakdownFinding, Detector};
use crate::dialogue::{Dialogue, IntentLabel, Participant};
use crate::model::InteractionModel;

/// Path→count rows for one detector, appendix-table style.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSummary {
    pub detector: Detector,
    pub rows: Vec<PatternRow>,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRow {
    pub path: Vec<IntentLabel>,
    pub count: usize,
}

/// Which participant a breakdown is blamed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribution {
    #[serde(rename = "CRS")]
    Crs,
    #[serde(rename = "US")]
    Us,
    Unattributed,
}

impl std::fmt::Display for Attribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Attribution::Crs => write!(f, "CRS"),
            Attribution::Us => write!(f, "US"),
            Attribution::Unattributed => write!(f, "Unattributed"),
        }
    }
}

/// Maps error kinds to the side responsible for them. B1 attribution reads
/// this registry; unknown kinds fall back to Unattributed.
#[derive(Debug, Clone)]
pub struct KindRegistry {
    kinds: HashMap<String, Attribution>,
}

impl Default for KindRegistry {
    fn default() -> Self {
        let mut kinds = HashMap::new();
        // Agent-side crashes produced by the bundled toy recommender.
        kinds.insert("ConcludeError".to_string(), Attribution::Crs);
        kinds.insert("RemovePreferenceError".to_string(), Attribution::Crs);
        KindRegistry { kinds }
    }
}

impl KindRegistry {
    pub fn register(&mut self, kind: impl Into<String>, side: Attribution) {
        self.kinds.insert(kind.into(), side);
    }

    pub fn attribution_for(&self, kind: &str) -> Attribution {
        self.kinds.get(kind).copied().unwrap_or(Attribution::Unattributed)
    }
}

/// Corpus-level comparison row in the style of the iteration table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub unique_paths: usize,
    pub length_mean: f64,
    pub length_std: f64,
    pub existing_success: usize,
    pub existing_fail: usize,
    pub new_success: usize,
    pub new_fail: usize,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("finding belongs to dialogue `{finding}` but `{dialogue}` was supplied")]
    DialogueMismatch { finding: String, dialogue: String },
    #[error("corpus must be non-empty")]
    EmptyCorpus,
}

/// Groups flagged findings into per-detector pattern summaries. Empty-path
/// findings are excluded; identical paths merge; rows sort by descending
/// count, then lexicographically on the canonical path rendering.
pub fn aggregate_patterns(findings: &[BreakdownFinding]) -> BTreeMap<Detector, PatternSummary> {
    let mut buckets: BTreeMap<Detector, HashMap<Vec<IntentLabel>, usize>> = BTreeMap::new();
    for det in [Detector::SystemFailure, Detector::DialogueOfDeaf, Detector::FlowDiscontinuation] {
        buckets.insert(det, HashMap::new());
    }
    for f in findings {
        if f.path.is_empty() {
            continue;
        }
        *buckets.entry(f.detector).or_default().entry(f.path.clone()).or_insert(0) += 1;
    }
    buckets
        .into_iter()
        .map(|(detector, counts)| {
            let mut rows: Vec<PatternRow> = counts
                .into_iter()
                .map(|(path, count)| PatternRow { path, count })
                .collect();
            rows.sort_by(|a, b| {
                b.count
                    .cmp(&a.count)
                    .then_with(|| render_path_canonical(&a.path).cmp(&render_path_canonical(&b.path)))
            });
            let total = rows.iter().map(|r| r.count).sum();
            (detector, PatternSummary { detector, rows, total })
        })
        .collect()
}

/// Assigns a flagged finding to the responsible participant. B2 is never
/// attributable; B1 consults the kind registry; B3 blames the utterer of the
/// forbidden transition's target (the last label of the flagged path).
pub fn attribute_breakdown(
    f: &BreakdownFinding,
    d: &Dialogue,
    _m: &InteractionModel,
    registry: &KindRegistry,
) -> Result<Attribution, AnalysisError> {
    if f.dialogue_id != d.id {
        return Err(AnalysisError::DialogueMismatch {
            finding: f.dialogue_id.clone(),
            dialogue: d.id.clone(),
        });
    }
    Ok(match f.detector {
        Detector::DialogueOfDeaf => Attribution::Unattributed,
        Detector::SystemFailure => registry.attribution_for(&f.detail),
        Detector::FlowDiscontinuation => match f.path.last() {
            Some(label) => match label.participant() {
                Participant::Agent => Attribution::Crs,
                Participant::User => Attribution::Us,
            },
            None => Attribution::Unattributed,
        },
    })
}

/// Per-detector attribution tallies over flagged findings only. The rules
/// match [`attribute_breakdown`] and need nothing beyond the findings.
pub fn attribution_counts(
    findings: &[BreakdownFinding],
    registry: &KindRegistry,
) -> AttributionCounts {
    let mut counts = AttributionCounts::new();
    for f in findings {
        if !f.flagged() {
            continue;
        }
        let attribution = match f.detector {
            Detector::DialogueOfDeaf => Attribution::Unattributed,
            Detector::SystemFailure => registry.attribution_for(&f.detail),
            Detector::FlowDiscontinuation => match f.path.last() {
                Some(label) => match label.participant() {
                    Participant::Agent => Attribution::Crs,
                    Participant::User => Attribution::Us,
                },
                None => Attribution::Unattributed,
            },
        };
        *counts
            .entry(f.detector)
            .or_default()
            .entry(attribution)
            .or_insert(0) += 1;
    }
    counts
}

/// True iff some agent recommendation is accepted by the immediately
/// following user utterance.
pub fn classify_success(d: &Dialogue) -> bool {
    d.utterances.windows(2).any(|w| {
        w[0].participant == Participant::Agent
            && w[0].act.intent.contains("A_RECOMMEND")
            && w[1].participant == Participant::User
            && w[1].act.intent.contains("U_ACCEPT")
    })
}

/// Distinct full intent sequences plus length mean and population standard
/// deviation over utterance counts.
pub fn path_statistics(corpus: &[Dialogue]) -> Result<(usize, f64, f64), AnalysisError> {
    if corpus.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let unique: HashSet<Vec<IntentLabel>> =
        corpus.iter().map(|d| d.intent_sequence()).collect();
    let lengths: Vec<f64> = corpus.iter().map(|d| d.utterances.len() as f64).collect();
    let n = lengths.len() as f64;
    let mean = lengths.iter().sum::<f64>() / n;
    let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
    Ok((unique.len(), mean, var.sqrt()))
}

/// Splits the current corpus into existing/new paths (vs. the previous
/// iteration's sequences) crossed with success/failure, plus path stats.
/// An empty `prev` models the first iteration: everything is new.
pub fn compare_iterations(
    prev: &[Dialogue],
    cur: &[Dialogue],
) -> Result<IterationStats, AnalysisError> {
    let (unique_paths, length_mean, length_std) = path_statistics(cur)?;
    let prev_paths: HashSet<Vec<IntentLabel>> =
        prev.iter().map(|d| d.intent_sequence()).collect();
    let mut stats = IterationStats {
        unique_paths,
        length_mean,
        length_std,
        existing_success: 0,
        existing_fail: 0,
        new_success: 0,
        new_fail: 0,
    };
    for d in cur {
        let existing = prev_paths.contains(&d.intent_sequence());
        let success = classify_success(d);
        match (existing, success) {
            (true, true) => stats.existing_success += 1,
            (true, false) => stats.existing_fail += 1,
            (false, true) => stats.new_success += 1,
            (false, false) => stats.new_fail += 1,
        }
    }
    Ok(stats)
}

/// Output formats for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Appendix-style text tables with abbreviated composite prefixes.
    TableText,
    /// `detector,path,count` rows with canonical fully-prefixed paths.
    Csv,
    /// Lossless JSON document with summaries, attribution counts, stats.
    Structured,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table-text" => Ok(ReportFormat::TableText),
            "csv" => Ok(ReportFormat::Csv),
            "structured" => Ok(ReportFormat::Structured),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

fn render_path_canonical(path: &[IntentLabel]) -> String {
    let parts: Vec<String> = path.iter().map(|l| l.canonical()).collect();
    parts.join(", ")
}

/// Renders a path as the appendix tuple: `('A_WELCOME', 'U_REVEAL')`, with
/// abbreviated composite prefixes.
fn render_path_tuple(path: &[IntentLabel]) -> String {
    let parts: Vec<String> = path.iter().map(|l| format!("'{}'", l.abbreviated())).collect();
    format!("({})", parts.join(", "))
}

fn detector_title(det: Detector) -> &'static str {
    match det {
        Detector::SystemFailure => "System failure (B1)",
        Detector::DialogueOfDeaf => "Dialogue of the deaf (B2)",
        Detector::FlowDiscontinuation => "Flow discontinuation (B3)",
    }
}

/// Per-detector attribution counts for the structured report.
pub type AttributionCounts = BTreeMap<Detector, BTreeMap<Attribution, usize>>;

#[derive(Debug, Serialize)]
struct StructuredReport<'a> {
    summaries: Vec<&'a PatternSummary>,
    attribution_counts: &'a AttributionCounts,
    stats: Option<&'a IterationStats>,
}

/// Renders summaries (plus optional attributions and stats) in the chosen
/// format. Byte-stable for equal inputs.
pub fn render_report(
    summaries: &BTreeMap<Detector, PatternSummary>,
    attributions: &AttributionCounts,
    stats: Option<&IterationStats>,
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::TableText => {
            let mut out = String::new();
            for (det, summary) in summaries {
                out.push_str(detector_title(*det));
                out.push('\n');
                out.push_str("Sequence of intents | Count\n");
                for row in &summary.rows {
                    out.push_str(&format!("{} | {}\n", render_path_tuple(&row.path), row.count));
                }
                out.push_str(&format!("Total | {}\n\n", summary.total));
            }
            if let Some(s) = stats {
                out.push_str(&format_iteration_stats(s));
            }
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from("detector,path,count\n");
            for (det, summary) in summaries {
                for row in &summary.rows {
                    out.push_str(&format!(
                        "{},\"{}\",{}\n",
                        det.code(),
                        render_path_canonical(&row.path),
                        row.count
                    ));
                }
            }
            out
        }
        ReportFormat::Structured => {
            let report = StructuredReport {
                summaries: summaries.values().collect(),
                attribution_counts: attributions,
                stats,
            };
            let mut out = serde_json::to_string_pretty(&report).expect("report serialization");
            out.push('\n');
            out
        }
    }
}

/// Iteration row in the published layout: mean ± std with two decimals.
pub fn format_iteration_stats(s: &IterationStats) -> String {
    format!(
        "# Unique conv. path: {}\nAvg. conv. length: {:.2} \u{b1} {:.2}\nExisting: success {} / not {}\nNew: success {} / not {}\n",
        s.unique_paths,
        s.length_mean,
        s.length_std,
        s.existing_success,
        s.existing_fail,
        s.new_success,
        s.new_fail
    )
}
