//! Toy rule-based movie recommender with injectable defects.
//!
//! Four stages mirror a component CRS architecture: pattern NLU, a
//! rule-based dialogue manager, catalog filtering as the recommendation
//! engine, and template NLG. Defects are injected via [`DefectProfile`]
//! flags; failures surface as in-band error records, never panics.

use crate::dialogue::{DialogueAct, IntentLabel, SlotValue};

use super::catalog::{Catalog, CatalogError};
use super::DefectProfile;

/// Number of candidates above which the agent keeps eliciting instead of
/// recommending straight away.
const ELICIT_THRESHOLD: usize = 5;

/// Slots the agent tries to fill, in elicitation order.
const ELICIT_SLOTS: &[&str] = &["genre", "year"];

pub const CANT_HELP_TEXT: &str = "Sorry, I can't help you with that.";

fn label(s: &str) -> IntentLabel {
    IntentLabel::parse(s).expect("static label")
}

/// One utterance the agent wants to emit (two in split-composite mode).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentUtterancePart {
    pub intent: IntentLabel,
    pub text: String,
    pub annotations: Vec<SlotValue>,
}

/// A pending crash, recorded into the dialogue's error log by the driver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentCrash {
    pub kind: String,
    pub message: String,
}

/// Outcome of one agent decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AgentReply {
    Say(Vec<AgentUtterancePart>),
    Crash(AgentCrash),
    Conclude,
}

/// Dialogue state of the toy recommender.
#[derive(Debug, Clone)]
pub struct AgentState {
    catalog: Catalog,
    defects: DefectProfile,
    split_composites: bool,
    /// Conjunctive slot constraints accumulated from reveals, in arrival
    /// order (duplicated slots conflict on purpose).
    constraints: Vec<(String, String)>,
    rejected: Vec<String>,
    last_recommendation: Option<String>,
    cant_help_streak: usize,
    recommend_counter: usize,
    no_results_counter: usize,
}

/// Builds a fresh agent. Fails on an invalid catalog.
pub fn new_agent(
    catalog: Catalog,
    defects: DefectProfile,
    split_composites: bool,
) -> Result<AgentState, CatalogError> {
    catalog.validate()?;
    Ok(AgentState {
        catalog,
        defects,
        split_composites,
        constraints: Vec::new(),
        rejected: Vec::new(),
        last_recommendation: None,
        cant_help_streak: 0,
        recommend_counter: 0,
        no_results_counter: 0,
    })
}

/// Pattern-based NLU. The catalog supplies the genre/rating vocabulary for
/// slot extraction. Unmatched text yields the `U_NONE` marker intent, which
/// routes the dialogue manager into its misunderstanding branch.
pub fn nlu_match_intent(text: &str, defects: &DefectProfile, catalog: &Catalog) -> DialogueAct {
    let norm = text.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    let contains = |p: &str| norm.contains(p);

    if contains("no thanks") || contains("goodbye") || contains("i'm done") {
        return DialogueAct::new(label("U_DENY"));
    }
    if contains("start over") || contains("restart") {
        return DialogueAct::new(label("U_RESTART"));
    }
    if contains("forget") {
        return DialogueAct::new(label("U_REMOVE_PREFERENCE"));
    }
    if contains("tell me more") || contains("what is it about") {
        return DialogueAct::new(label("U_INQUIRE"));
    }
    let accepted = if defects.limited_accept_patterns {
        norm == "i like this recommendation"
    } else {
        norm == "i like this recommendation"
            || ["like it", "love it", "i like this", "sounds good"]
                .iter()
                .any(|p| contains(p))
    };
    if accepted {
        return DialogueAct::new(label("U_ACCEPT"));
    }
    if contains("don't like") || contains("not a fan") || contains("something different") {
        return DialogueAct::new(label("U_REJECT"));
    }

    let mut annotations = Vec::new();
    for genre in catalog.genres() {
        if contains(&genre.to_lowercase()) {
            annotations.push(SlotValue::new("genre", genre));
            break;
        }
    }
    for token in norm.split(|c: char| !c.is_ascii_alphanumeric()) {
        if token.len() == 5
            && token.ends_with('s')
            && token[..4].chars().all(|c| c.is_ascii_digit())
        {
            annotations.push(SlotValue::new("year", token));
            break;
        }
    }
    if let Some(pos) = norm.find("rated ") {
        let rest = &norm[pos + "rated ".len()..];
        let token = rest.split_whitespace().next().unwrap_or("");
        if let Some(r) = catalog
            .ratings()
            .iter()
            .find(|r| r.to_lowercase() == token.trim_end_matches('.'))
        {
            annotations.push(SlotValue::new("rating", r.clone()));
        }
    }
    if !annotations.is_empty() {
        return DialogueAct::with_annotations(label("U_REVEAL"), annotations);
    }
    DialogueAct::new(label("U_NONE"))
}

impl AgentState {
    pub fn defects(&self) -> &DefectProfile {
        &self.defects
    }

    /// The fixed opening turn.
    pub fn welcome(&self) -> AgentUtterancePart {
        AgentUtterancePart {
            intent: label("A_WELCOME"),
            text: "Hello! I can recommend movies. Tell me what you are looking for.".to_string(),
            annotations: Vec::new(),
        }
    }

    fn candidates(&self) -> Vec<&super::catalog::CatalogItem> {
        self.catalog
            .matching(&self.constraints)
            .into_iter()
            .filter(|i| !self.rejected.contains(&i.title))
            .collect()
    }

    fn unfilled_slot(&self) -> Option<&'static str> {
        ELICIT_SLOTS
            .iter()
            .find(|slot| !self.constraints.iter().any(|(s, _)| s == *slot))
            .copied()
    }

    fn elicit_question(slot: &str) -> &'static str {
        match slot {
            "genre" => "What genre are you in the mood for?",
            _ => "Any preferred decade?",
        }
    }

    fn say_one(intent: &str, text: impl Into<String>, annotations: Vec<SlotValue>) -> AgentReply {
        AgentReply::Say(vec![AgentUtterancePart {
            intent: label(intent),
            text: text.into(),
            annotations,
        }])
    }

    fn restart_reply(&self, text_prefix: &str) -> AgentReply {
        let question = Self::elicit_question(self.unfilled_slot().unwrap_or("genre"));
        if self.split_composites {
            AgentReply::Say(vec![
                AgentUtterancePart {
                    intent: label("A_RESTART"),
                    text: text_prefix.to_string(),
                    annotations: Vec::new(),
                },
                AgentUtterancePart {
                    intent: label("A_ELICIT"),
                    text: question.to_string(),
                    annotations: Vec::new(),
                },
            ])
        } else {
            Self::say_one(
                "A_RESTART+A_ELICIT",
                format!("{text_prefix} {question}"),
                Vec::new(),
            )
        }
    }

    fn no_results_reply(&mut self) -> AgentReply {
        let templates = [
            "I couldn't find anything matching all of that.",
            "No movies in the catalog match those preferences.",
            "Nothing fits all your preferences, unfortunately.",
        ];
        let text = templates[self.no_results_counter % templates.len()];
        self.no_results_counter += 1;
        Self::say_one("A_NO_RESULTS", text, Vec::new())
    }

    fn recommend_reply(&mut self) -> AgentReply {
        let mut pool = self.candidates();
        if pool.is_empty() {
            // Everything matching was rejected: cycle through titles again
            // rather than claiming there are no results.
            self.rejected.clear();
            pool = self.candidates();
        }
        if pool.is_empty() {
            return self.no_results_reply();
        }
        let item = pool[0];
        let templates = [
            format!("How about {} ({})?", item.title, item.attr("year").unwrap_or("?")),
            format!("You might enjoy {}.", item.title),
            format!("My suggestion would be {}.", item.title),
        ];
        let text = templates[self.recommend_counter % templates.len()].clone();
        let title = item.title.clone();
        self.recommend_counter += 1;
        self.last_recommendation = Some(title.clone());
        Self::say_one("A_RECOMMEND", text, vec![SlotValue::new("title", title)])
    }

    fn results_reply(&mut self) -> AgentReply {
        let count = self.candidates().len();
        if count == 0 {
            return self.no_results_reply();
        }
        match self.unfilled_slot() {
            Some(slot) if count > ELICIT_THRESHOLD => {
                let question = Self::elicit_question(slot);
                let count_text = format!("I found {count} movies matching so far.");
                let annotations = vec![SlotValue::new("count", count.to_string())];
                if self.split_composites {
                    AgentReply::Say(vec![
                        AgentUtterancePart {
                            intent: label("A_COUNT_RESULTS"),
                            text: count_text,
                            annotations,
                        },
                        AgentUtterancePart {
                            intent: label("A_ELICIT"),
                            text: question.to_string(),
                            annotations: Vec::new(),
                        },
                    ])
                } else {
                    Self::say_one(
                        "A_COUNT_RESULTS+A_ELICIT",
                        format!("{count_text} {question}"),
                        annotations,
                    )
                }
            }
            _ => self.recommend_reply(),
        }
    }

    fn cant_help_reply(&mut self) -> AgentReply {
        self.cant_help_streak += 1;
        if !self.defects.cant_help_loop && self.cant_help_streak >= 3 {
            // Fix for the repetition defect: rather than a third identical
            // apology, proactively restart the flow. Accumulated constraints
            // are kept — which is itself a latent defect surfacing as
            // no-results downstream.
            self.cant_help_streak = 0;
            self.rejected.clear();
            self.last_recommendation = None;
            return self.restart_reply("Let me restart the conversation.");
        }
        Self::say_one("A_CANT_HELP", CANT_HELP_TEXT, Vec::new())
    }

    /// One dialogue-manager step: run NLU over the user's text and produce
    /// the next agent action.
    pub fn respond(&mut self, user_text: &str) -> AgentReply {
        let act = nlu_match_intent(user_text, &self.defects, &self.catalog);
        let intent = act.intent.canonical();
        match intent.as_str() {
            "U_DENY" => {
                if self.defects.crash_on_conclude {
                    AgentReply::Crash(AgentCrash {
                        kind: "ConcludeError".to_string(),
                        message: "unhandled state while concluding the conversation".to_string(),
                    })
                } else {
                    AgentReply::Conclude
                }
            }
            "U_RESTART" => {
                self.constraints.clear();
                self.rejected.clear();
                self.last_recommendation = None;
                self.cant_help_streak = 0;
                self.restart_reply("Okay, let's start from scratch.")
            }
            "U_REMOVE_PREFERENCE" => {
                if self.defects.crash_on_remove_preference {
                    AgentReply::Crash(AgentCrash {
                        kind: "RemovePreferenceError".to_string(),
                        message: "failed to remove a preference from the user model".to_string(),
                    })
                } else {
                    self.cant_help_streak = 0;
                    self.constraints.pop();
                    self.results_reply()
                }
            }
            "U_ACCEPT" => {
                self.cant_help_streak = 0;
                Self::say_one(
                    "A_CONTINUE_RECOMMENDATION",
                    "Great! Would you like another recommendation?",
                    Vec::new(),
                )
            }
            "U_INQUIRE" => match &self.last_recommendation {
                Some(title) => {
                    self.cant_help_streak = 0;
                    let item = self
                        .catalog
                        .items
                        .iter()
                        .find(|i| &i.title == title)
                        .expect("recommended title is in catalog");
                    Self::say_one(
                        "A_INFORM",
                        format!(
                            "{} is a {} movie from {}, rated {}.",
                            item.title,
                            item.attr("genre").unwrap_or("?"),
                            item.attr("year").unwrap_or("?"),
                            item.attr("rating").unwrap_or("?"),
                        ),
                        vec![SlotValue::new("title", item.title.clone())],
                    )
                }
                None => self.cant_help_reply(),
            },
            "U_REJECT" => {
                self.cant_help_streak = 0;
                if let Some(title) = self.last_recommendation.take() {
                    self.rejected.push(title);
                }
                self.recommend_reply()
            }
            "U_REVEAL" => {
                self.cant_help_streak = 0;
                for sv in &act.annotations {
                    self.constraints.push((sv.slot.clone(), sv.value.clone()));
                }
                self.results_reply()
            }
            _ => self.cant_help_reply(),
        }
    }
}
