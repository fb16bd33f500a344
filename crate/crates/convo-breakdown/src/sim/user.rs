//! Agenda-based user simulator.
//!
//! The simulator plans an agenda of reveals ending in an acceptance, then
//! either pulls the next planned action when the agent replies in an
//! expected manner or samples a replacement among the interaction model's
//! allowed successors. Pulling without checking whether the planned action
//! still fits the latest agent act is the stale-agenda flaw the
//! always-sample mode removes.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dialogue::{DialogueAct, IntentLabel, SlotValue};
use crate::model::InteractionModel;

use super::catalog::Catalog;
use super::{AgendaMode, SimulatorConfig};

/// The user walks away quietly once a conversation drags past this many
/// utterances, regardless of progress.
const SOFT_LEAVE_CAP: usize = 36;

/// Probability that the planned year reveal is phrased too vaguely for the
/// agent's pattern NLU.
const VAGUE_REVEAL_P: f64 = 0.35;

/// Probability of planning an inquiry before accepting.
const INQUIRE_P: f64 = 0.3;

fn label(s: &str) -> IntentLabel {
    IntentLabel::parse(s).expect("static label")
}

/// One utterance from the simulator's side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserReply {
    pub intent: IntentLabel,
    pub text: String,
    pub annotations: Vec<SlotValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum AgendaItem {
    Reveal(SlotValue),
    Inquire,
    Accept,
}

impl AgendaItem {
    fn intent(&self) -> IntentLabel {
        match self {
            AgendaItem::Reveal(_) => label("U_REVEAL"),
            AgendaItem::Inquire => label("U_INQUIRE"),
            AgendaItem::Accept => label("U_ACCEPT"),
        }
    }
}

/// Markovian user state: agenda, preference model, and conversation context.
#[derive(Debug, Clone)]
pub struct UserState {
    prefs: Vec<SlotValue>,
    pref_cursor: usize,
    vague_year: bool,
    agenda: Vec<AgendaItem>,
    accepted: bool,
    last_intent: Option<IntentLabel>,
    last_reply: Option<UserReply>,
    unhelpful_streak: usize,
    proactive_restarts: usize,
}

/// Samples preferences from a seeded target item so that the initial
/// reveals are always satisfiable, and plans the agenda.
pub fn new_simulator(
    cfg: &SimulatorConfig,
    catalog: &Catalog,
    rng: &mut ChaCha8Rng,
) -> UserState {
    let mut state = UserState {
        prefs: Vec::new(),
        pref_cursor: 0,
        vague_year: false,
        agenda: Vec::new(),
        accepted: false,
        last_intent: None,
        last_reply: None,
        unhelpful_streak: 0,
        proactive_restarts: 0,
    };
    state.replan(cfg, catalog, rng);
    state
}

impl UserState {
    pub fn preferences(&self) -> &[SlotValue] {
        &self.prefs
    }

    /// Planned future intents, front first.
    pub fn agenda_intents(&self) -> Vec<IntentLabel> {
        self.agenda.iter().map(|a| a.intent()).collect()
    }

    /// Re-plans preferences and agenda from a freshly sampled target item.
    fn replan(&mut self, cfg: &SimulatorConfig, catalog: &Catalog, rng: &mut ChaCha8Rng) {
        let target = &catalog.items[rng.gen_range(0..catalog.items.len())];
        let mut prefs = Vec::new();
        if let Some(g) = target.attr("genre") {
            prefs.push(SlotValue::new("genre", g));
        }
        if let Some(d) = target.decade() {
            prefs.push(SlotValue::new("year", d));
        }
        if let Some(r) = target.attr("rating") {
            prefs.push(SlotValue::new("rating", r));
        }
        prefs.truncate(cfg.preference_count.min(3));
        self.vague_year = rng.gen_bool(VAGUE_REVEAL_P);
        let mut agenda: Vec<AgendaItem> =
            prefs.iter().map(|p| AgendaItem::Reveal(p.clone())).collect();
        if rng.gen_bool(INQUIRE_P) {
            agenda.push(AgendaItem::Inquire);
        }
        agenda.push(AgendaItem::Accept);
        self.prefs = prefs;
        self.pref_cursor = 0;
        self.agenda = agenda;
    }

    fn goal_met(&self, mode: AgendaMode) -> bool {
        match mode {
            AgendaMode::PullOrSample => self.accepted && self.agenda.is_empty(),
            AgendaMode::AlwaysSample => self.accepted,
        }
    }

    fn finish(&mut self, reply: UserReply) -> Option<UserReply> {
        self.last_intent = Some(reply.intent.clone());
        self.last_reply = Some(reply.clone());
        Some(reply)
    }

    fn reveal_reply(&mut self, pref: &SlotValue, rng: &mut ChaCha8Rng) -> UserReply {
        self.pref_cursor += 1;
        if pref.slot == "year" && self.vague_year {
            return UserReply {
                intent: label("U_REVEAL"),
                text: "Just something from back in the day, you know".to_string(),
                annotations: Vec::new(),
            };
        }
        let text = match pref.slot.as_str() {
            "genre" => {
                let t = [
                    format!("I'm looking for {} movies", pref.value),
                    format!("Show me some {} movies", pref.value),
                    format!("I enjoy {} films", pref.value),
                ];
                t[rng.gen_range(0..t.len())].clone()
            }
            "year" => {
                let t = [
                    format!("Preferably something from the {}", pref.value),
                    format!("Ideally something from the {}", pref.value),
                ];
                t[rng.gen_range(0..t.len())].clone()
            }
            _ => format!("Ideally rated {} please", pref.value),
        };
        UserReply {
            intent: label("U_REVEAL"),
            text,
            annotations: vec![pref.clone()],
        }
    }

    fn next_pref_reveal(&mut self, rng: &mut ChaCha8Rng) -> UserReply {
        let pref = self.prefs[self.pref_cursor % self.prefs.len()].clone();
        self.reveal_reply(&pref, rng)
    }

    fn accept_reply(&mut self, rng: &mut ChaCha8Rng) -> UserReply {
        self.accepted = true;
        if let Some(AgendaItem::Accept) = self.agenda.first() {
            self.agenda.remove(0);
        }
        let t = [
            "Sounds good I like it",
            "Sounds good",
            "Ok I like this recommendation",
            "Like it",
            "Love it",
            "I like this",
        ];
        UserReply {
            intent: label("U_ACCEPT"),
            text: t[rng.gen_range(0..t.len())].to_string(),
            annotations: Vec::new(),
        }
    }

    fn simple(intent: &str, text: &str) -> UserReply {
        UserReply { intent: label(intent), text: text.to_string(), annotations: Vec::new() }
    }

    fn deny_reply() -> UserReply {
        Self::simple("U_DENY", "No thanks, goodbye")
    }

    fn sample_reply(
        &mut self,
        agent_intent: &IntentLabel,
        cfg: &SimulatorConfig,
        model: &InteractionModel,
        rng: &mut ChaCha8Rng,
    ) -> UserReply {
        // Atomic successors only; U_DENY is reserved as a deliberate or
        // terminal move, never a random one.
        let pool: Vec<IntentLabel> = model
            .user_successors(agent_intent)
            .into_iter()
            .filter(|l| !l.is_composite() && l.canonical() != "U_DENY")
            .collect();
        if pool.is_empty() {
            return Self::deny_reply();
        }
        let accept_pos = pool.iter().position(|l| l.canonical() == "U_ACCEPT");
        let choice = match accept_pos {
            Some(pos) if pool.len() == 1 || rng.gen_bool(cfg.persona.acceptance_bias) => {
                pool[pos].clone()
            }
            Some(pos) => {
                let others: Vec<&IntentLabel> =
                    pool.iter().enumerate().filter(|(i, _)| *i != pos).map(|(_, l)| l).collect();
                others[rng.gen_range(0..others.len())].clone()
            }
            None => pool[rng.gen_range(0..pool.len())].clone(),
        };
        match choice.canonical().as_str() {
            "U_REVEAL" => self.next_pref_reveal(rng),
            "U_ACCEPT" => self.accept_reply(rng),
            "U_INQUIRE" => Self::simple("U_INQUIRE", "Tell me more about it"),
            "U_REJECT" => {
                let t = [
                    "I don't like that one, something different please",
                    "Not a fan of this one",
                ];
                Self::simple("U_REJECT", t[rng.gen_range(0..t.len())])
            }
            "U_RESTART" => Self::simple("U_RESTART", "Let's start over"),
            "U_CONTINUE_RECOMMENDATION" => {
                Self::simple("U_CONTINUE_RECOMMENDATION", "I'd watch another one along these lines")
            }
            other => Self::simple(other, "Hmm"),
        }
    }

    /// Whether the agent's act is an expected reply to the user's previous
    /// action, which is the pull condition in pull-or-sample mode.
    fn is_expected(&self, agent_intent: &IntentLabel) -> bool {
        let expected: &[&str] = match self.last_intent.as_ref().map(|l| l.canonical()) {
            None => &["A_WELCOME"],
            Some(last) => match last.as_str() {
                "U_REVEAL" => &["A_ELICIT", "A_COUNT_RESULTS", "A_RECOMMEND", "A_NO_RESULTS"],
                "U_INQUIRE" => &["A_INFORM"],
                "U_ACCEPT" => &["A_CONTINUE_RECOMMENDATION"],
                "U_REJECT" => &["A_RECOMMEND"],
                "U_RESTART" => &["A_RESTART"],
                _ => &[],
            },
        };
        expected.iter().any(|e| agent_intent.contains(e))
    }

    fn has_pending_reveal(&self) -> bool {
        self.agenda.iter().any(|a| matches!(a, AgendaItem::Reveal(_)))
    }

    /// Produces the user's next utterance, or `None` when the user walks
    /// away (out of patience, goal reached, or conversation too long).
    pub fn respond(
        &mut self,
        agent_act: &DialogueAct,
        turn_count: usize,
        cfg: &SimulatorConfig,
        model: &InteractionModel,
        catalog: &Catalog,
        rng: &mut ChaCha8Rng,
    ) -> Option<UserReply> {
        let contains = |c: &str| agent_act.intent.contains(c);

        if contains("A_CANT_HELP") || contains("A_NO_RESULTS") {
            self.unhelpful_streak += 1;
        } else {
            self.unhelpful_streak = 0;
        }
        if turn_count >= SOFT_LEAVE_CAP {
            return None;
        }
        if self.unhelpful_streak >= cfg.persona.patience {
            return None;
        }

        if contains("A_RESTART") {
            let requested = self
                .last_intent
                .as_ref()
                .map(|l| l.contains("U_RESTART"))
                .unwrap_or(false);
            if !requested {
                self.proactive_restarts += 1;
                if self.proactive_restarts >= 2 {
                    // Twice restarted against the user's will: give up. The
                    // always-sampling user has no legal farewell here, so it
                    // hangs up silently instead of uttering a stray deny.
                    return match cfg.agenda_mode {
                        AgendaMode::PullOrSample => self.finish(Self::deny_reply()),
                        AgendaMode::AlwaysSample => None,
                    };
                }
            }
            self.replan(cfg, catalog, rng);
        }

        if self.goal_met(cfg.agenda_mode) {
            return if contains("A_CONTINUE_RECOMMENDATION") {
                self.finish(Self::deny_reply())
            } else {
                None
            };
        }

        // The misunderstood user tries again verbatim when repeating is a
        // legal move — the seed of the dialogue-of-the-deaf loop.
        if contains("A_CANT_HELP") {
            if let Some(last) = self.last_reply.clone() {
                if model.is_transition_allowed(&agent_act.intent, &last.intent) {
                    return Some(last);
                }
            }
        }

        // Deliberate reactions to a dead end once nothing is left to reveal.
        if contains("A_NO_RESULTS")
            && cfg.agenda_mode == AgendaMode::PullOrSample
            && !self.has_pending_reveal()
        {
            let roll: f64 = rng.gen();
            if roll < 0.4 {
                return self.finish(Self::simple(
                    "U_REMOVE_PREFERENCE",
                    "Forget the last thing I said",
                ));
            }
            if roll < 0.7 {
                return self.finish(Self::simple("U_RESTART", "Let's start over"));
            }
            // Otherwise fall through: the stale agenda head gets pulled.
        }

        let reply = if cfg.agenda_mode == AgendaMode::PullOrSample
            && !self.agenda.is_empty()
            && self.is_expected(&agent_act.intent)
        {
            let item = self.agenda.remove(0);
            match item {
                AgendaItem::Reveal(pref) => self.reveal_reply(&pref, rng),
                AgendaItem::Inquire => Self::simple("U_INQUIRE", "Tell me more about it"),
                AgendaItem::Accept => {
                    self.accepted = true;
                    self.accept_reply(rng)
                }
            }
        } else {
            self.sample_reply(&agent_act.intent, cfg, model, rng)
        };
        self.finish(reply)
    }
}
