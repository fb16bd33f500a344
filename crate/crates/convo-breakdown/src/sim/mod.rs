//! Deterministic, seedable conversation generator: a defect-injectable toy
//! recommender agent paired with an agenda-based user simulator.

pub mod agent;
pub mod catalog;
pub mod user;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dialogue::{
    Dialogue, DialogueAct, DialogueMetadata, ErrorRecord, IntentLabel, Participant, Utterance,
};
use crate::model::InteractionModel;

pub use agent::{new_agent, nlu_match_intent, AgentReply, AgentState};
pub use catalog::{default_catalog, load_catalog, Catalog};
pub use user::{new_simulator, UserReply, UserState};

/// Injectable agent defects. Each flag mirrors one diagnose-fix iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectProfile {
    /// Repeat `A_CANT_HELP` indefinitely instead of proactively restarting.
    pub cant_help_loop: bool,
    /// Crash with `ConcludeError` when concluding the conversation.
    pub crash_on_conclude: bool,
    /// Crash with `RemovePreferenceError` on preference removal.
    pub crash_on_remove_preference: bool,
    /// Recognize acceptance only via the one predefined message.
    pub limited_accept_patterns: bool,
    /// Turn budget; exhausting it records a `RecursionError`.
    #[serde(default = "default_max_turns")]
    pub max_turns: usize,
}

fn default_max_turns() -> usize {
    60
}

impl DefectProfile {
    pub fn hardened() -> Self {
        DefectProfile {
            cant_help_loop: false,
            crash_on_conclude: false,
            crash_on_remove_preference: false,
            limited_accept_patterns: false,
            max_turns: default_max_turns(),
        }
    }

    /// True when every injected defect is disabled.
    pub fn is_hardened(&self) -> bool {
        !self.cant_help_loop
            && !self.crash_on_conclude
            && !self.crash_on_remove_preference
            && !self.limited_accept_patterns
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.max_turns < 4 {
            return Err(SimError::Config(format!(
                "max_turns must be >= 4, got {}",
                self.max_turns
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgendaMode {
    /// Pull the planned action when the agent replies as expected, else
    /// sample; pulls can go stale.
    PullOrSample,
    /// Always sample among model-allowed successors.
    AlwaysSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Persona {
    /// Consecutive unhelpful agent turns tolerated before walking away.
    pub patience: usize,
    /// Probability of accepting when acceptance is a sampling option.
    pub acceptance_bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatorConfig {
    pub agenda_mode: AgendaMode,
    pub persona: Persona,
    pub preference_count: usize,
}

impl SimulatorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.persona.patience < 1 {
            return Err(SimError::Config("patience must be >= 1".to_string()));
        }
        if !(0.0..=1.0).contains(&self.persona.acceptance_bias) {
            return Err(SimError::Config(format!(
                "acceptance_bias must be in [0,1], got {}",
                self.persona.acceptance_bias
            )));
        }
        if self.preference_count < 1 {
            return Err(SimError::Config("preference_count must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// A complete generation configuration: one case-study iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationProfile {
    pub name: String,
    pub defects: DefectProfile,
    pub simulator: SimulatorConfig,
    /// Emit count-results and elicit as two consecutive agent utterances
    /// instead of one composite-intent turn.
    #[serde(default)]
    pub split_composites: bool,
}

impl GenerationProfile {
    pub fn validate(&self) -> Result<(), SimError> {
        self.defects.validate()?;
        self.simulator.validate()
    }

    /// Stable digest of the canonical profile document.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("profile serialization");
        let hash = Sha256::digest(canonical.as_bytes());
        hex::encode(&hash[..8])
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("profile parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

/// Names of the bundled iteration presets, in case-study order.
pub const PRESET_NAMES: [&str; 6] = [
    "iteration-1",
    "iteration-2",
    "iteration-3",
    "iteration-4",
    "iteration-5",
    "iteration-6",
];

const PRESET_SOURCES: [&str; 6] = [
    include_str!("../../assets/presets/iteration-1.json"),
    include_str!("../../assets/presets/iteration-2.json"),
    include_str!("../../assets/presets/iteration-3.json"),
    include_str!("../../assets/presets/iteration-4.json"),
    include_str!("../../assets/presets/iteration-5.json"),
    include_str!("../../assets/presets/iteration-6.json"),
];

pub fn parse_profile(text: &str) -> Result<GenerationProfile, SimError> {
    let profile: GenerationProfile = serde_json::from_str(text)?;
    profile.validate()?;
    Ok(profile)
}

/// Loads a bundled preset by name.
pub fn load_preset(name: &str) -> Result<GenerationProfile, SimError> {
    let idx = PRESET_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| SimError::UnknownPreset(name.to_string()))?;
    parse_profile(PRESET_SOURCES[idx])
}

fn push_utterance(
    d: &mut Dialogue,
    participant: Participant,
    intent: IntentLabel,
    text: String,
    annotations: Vec<crate::dialogue::SlotValue>,
) {
    let index = d.utterances.len();
    d.utterances.push(Utterance {
        index,
        participant,
        text,
        act: DialogueAct::with_annotations(intent, annotations),
    });
}

fn record_recursion_error(d: &mut Dialogue) {
    let at = d.utterances.len();
    d.error_log.push(ErrorRecord {
        kind: "RecursionError".to_string(),
        at_turn: Some(at),
        message: "maximum turn budget exhausted".to_string(),
    });
}

/// Generates one conversation under the given profile. Fully deterministic
/// in (profile, model, catalog, seed).
pub fn generate_conversation(
    profile: &GenerationProfile,
    model: &InteractionModel,
    catalog: &Catalog,
    seed: u64,
    id: &str,
) -> Result<Dialogue, SimError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent = new_agent(catalog.clone(), profile.defects.clone(), profile.split_composites)?;
    let cfg = &profile.simulator;
    let mut user = new_simulator(cfg, catalog, &mut rng);

    let iteration = if profile.defects.is_hardened() {
        format!("{}+hardened", profile.name)
    } else {
        profile.name.clone()
    };
    let mut d = Dialogue::new(id);
    d.metadata = DialogueMetadata { iteration, seed, config_digest: profile.digest() };

    let welcome = agent.welcome();
    let mut agent_view = DialogueAct::new(welcome.intent.clone());
    push_utterance(&mut d, Participant::Agent, welcome.intent, welcome.text, welcome.annotations);

    loop {
        let turn_count = d.utterances.len();
        let Some(reply) =
            user.respond(&agent_view, turn_count, cfg, model, catalog, &mut rng)
        else {
            break;
        };
        let user_text = reply.text.clone();
        push_utterance(&mut d, Participant::User, reply.intent, reply.text, reply.annotations);
        if d.utterances.len() >= profile.defects.max_turns {
            record_recursion_error(&mut d);
            break;
        }

        match agent.respond(&user_text) {
            AgentReply::Crash(crash) => {
                let at = d.utterances.len();
                d.error_log.push(ErrorRecord {
                    kind: crash.kind,
                    at_turn: Some(at),
                    message: crash.message,
                });
                break;
            }
            AgentReply::Conclude => break,
            AgentReply::Say(parts) => {
                let combined = parts
                    .iter()
                    .map(|p| p.intent.canonical())
                    .collect::<Vec<_>>()
                    .join("+");
                agent_view = DialogueAct::new(
                    IntentLabel::parse(&combined).expect("agent intents are well-formed"),
                );
                for part in parts {
                    push_utterance(&mut d, Participant::Agent, part.intent, part.text, part.annotations);
                }
                if d.utterances.len() >= profile.defects.max_turns {
                    record_recursion_error(&mut d);
                    break;
                }
            }
        }
    }
    Ok(d)
}

/// Generates `n` independent conversations with per-dialogue seeds
/// `seed + i`.
pub fn generate_corpus(
    n: usize,
    profile: &GenerationProfile,
    model: &InteractionModel,
    catalog: &Catalog,
    seed: u64,
) -> Result<Vec<Dialogue>, SimError> {
    if n < 1 {
        return Err(SimError::Config("corpus size must be >= 1".to_string()));
    }
    profile.validate()?;
    (0..n)
        .map(|i| {
            let dialogue_seed = seed + i as u64;
            let id = format!("{}-s{}-{:03}", profile.name, seed, i);
            generate_conversation(profile, model, catalog, dialogue_seed, &id)
        })
        .collect()
}
