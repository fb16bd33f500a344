//! Explores the bundled interaction model: node/edge inventory, composite
//! label expansion, path verdicts, and the user-side successor sets the
//! simulator samples from.
//!
//! Usage:
//!   cargo run --example validate_model

use convo_breakdown::dialogue::IntentLabel;
use convo_breakdown::model::default_model;

fn label(s: &str) -> IntentLabel {
    IntentLabel::parse(s).unwrap()
}

fn main() {
    let model = default_model();
    println!(
        "model `{}` v{}: {} nodes, {} edges, {} start nodes",
        model.name,
        model.version,
        model.nodes().count(),
        model.edges().count(),
        model.start_nodes().count(),
    );

    // Composite expansion: no explicit A_ELICIT edge into this composite
    // exists, yet the transition holds because U_REVEAL may follow A_ELICIT
    // and the composite chains A_COUNT_RESULTS into A_ELICIT internally.
    let composite = label("A_COUNT_RESULTS+A_ELICIT");
    println!(
        "U_REVEAL -> {}: {}",
        composite.abbreviated(),
        model.is_transition_allowed(&label("U_REVEAL"), &composite)
    );

    for path in [
        "A_WELCOME,U_REVEAL,A_RECOMMEND,U_ACCEPT,A_CONTINUE_RECOMMENDATION",
        "A_WELCOME,U_REVEAL,A_COUNT_RESULTS+A_ELICIT,U_REVEAL",
        "U_REVEAL,A_ELICIT",
        "A_WELCOME,U_ACCEPT",
    ] {
        let labels: Vec<IntentLabel> = path.split(',').map(label).collect();
        let verdict = model.is_valid_path(&labels);
        let text = match verdict.violation_index {
            None => "valid".to_string(),
            Some(k) => format!("invalid at index {k}"),
        };
        println!("{path:<70} {text}");
    }

    for agent_turn in ["A_RECOMMEND", "A_CANT_HELP", "A_NO_RESULTS"] {
        let successors: Vec<String> = model
            .user_successors(&label(agent_turn))
            .iter()
            .map(|l| l.canonical())
            .collect();
        println!("user replies after {agent_turn}: {}", successors.join(", "));
    }
}
