//! JSON encoding of set automata.
//!
//! ```json
//! { "version": 1,
//!   "signature": [{"name": "f", "arity": 2}],
//!   "patterns": ["f(f(_,_),_)"],
//!   "initial": 0,
//!   "states": [{"id": 0, "label": [], "goals": [...],
//!               "delta": {"f": {"outputs": [{"pattern": 0, "pos": []}],
//!                               "targets": [{"state": 1, "shift": [1]}]}}}] }
//! ```
//!
//! Positions are integer arrays, the root is `[]`. `goals` is optional on
//! input; automata read without it evaluate normally but cannot be checked
//! with [`SetAutomaton::check_invariants`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::automaton::{SetAutomaton, State, StateId, Target, Transition};
use crate::error::SerialError;
use crate::goal::{Announcement, Goal, GoalSet, Obligation, SubpatternTable};
use crate::position::Position;
use crate::term::{parse_term_in, ParseOptions, PatternId, PatternSet, Signature};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDoc {
    version: u64,
    signature: Vec<SymbolDoc>,
    patterns: Vec<String>,
    initial: u32,
    states: Vec<StateDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolDoc {
    name: String,
    arity: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    id: u32,
    label: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goals: Option<Vec<GoalDoc>>,
    delta: BTreeMap<String, TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoalDoc {
    obligation: Vec<PairDoc>,
    announce: AnnouncementDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    pattern: String,
    pos: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnouncementDoc {
    pattern: u32,
    pos: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    outputs: Vec<AnnouncementDoc>,
    targets: Vec<TargetDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDoc {
    state: u32,
    shift: Vec<u32>,
}

fn ints(p: &Position) -> Vec<u32> {
    p.indices().to_vec()
}

fn announcement_doc(a: &Announcement) -> AnnouncementDoc {
    AnnouncementDoc {
        pattern: a.pattern.0,
        pos: ints(&a.position),
    }
}

pub fn serialize(a: &SetAutomaton) -> String {
    let sig = a.signature();
    let table = a.table();
    let states = a
        .state_ids()
        .map(|id| {
            let state = a.state(id);
            let goals = state
                .goals
                .goals()
                .iter()
                .map(|g| GoalDoc {
                    obligation: g
                        .obligation
                        .pairs()
                        .iter()
                        .map(|(p, s)| PairDoc {
                            pattern: table.render(*s),
                            pos: ints(p),
                        })
                        .collect(),
                    announce: announcement_doc(&g.announcement),
                })
                .collect::<Vec<_>>();
            let delta = sig
                .ids()
                .map(|f| {
                    let t = a.transition(id, f);
                    let doc = TransitionDoc {
                        outputs: t.outputs.iter().map(announcement_doc).collect(),
                        targets: t
                            .targets
                            .iter()
                            .map(|t| TargetDoc {
                                state: t.state.0,
                                shift: ints(&t.shift),
                            })
                            .collect(),
                    };
                    (sig.name(f).to_owned(), doc)
                })
                .collect();
            StateDoc {
                id: id.0,
                label: ints(&state.label),
                goals: (!goals.is_empty()).then_some(goals),
                delta,
            }
        })
        .collect();
    let doc = AutomatonDoc {
        version: FORMAT_VERSION,
        signature: sig
            .symbols()
            .iter()
            .map(|s| SymbolDoc {
                name: s.name.clone(),
                arity: s.arity,
            })
            .collect(),
        patterns: a.patterns().ids().map(|id| a.patterns().canonical(id)).collect(),
        initial: a.initial().0,
        states,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("automaton documents always encode");
    out.push('\n');
    out
}

fn position(ints: &[u32], path: &str) -> Result<Position, SerialError> {
    Position::new(ints.to_vec())
        .ok_or_else(|| SerialError::schema(path, "position indices must be positive"))
}

fn state_ref(id: u32, count: usize, path: &str) -> Result<StateId, SerialError> {
    if (id as usize) < count {
        Ok(StateId(id))
    } else {
        Err(SerialError::schema(path, format!("unknown state id {id}")))
    }
}

fn announcement(doc: &AnnouncementDoc, patterns: usize, path: &str) -> Result<Announcement, SerialError> {
    if doc.pattern as usize >= patterns {
        return Err(SerialError::schema(
            format!("{path}.pattern"),
            format!("unknown pattern id {}", doc.pattern),
        ));
    }
    Ok(Announcement::new(
        PatternId(doc.pattern),
        position(&doc.pos, &format!("{path}.pos"))?,
    ))
}

pub fn deserialize(text: &str) -> Result<SetAutomaton, SerialError> {
    let raw: serde_json::Value = serde_json::from_str(text)?;
    let version = raw.get("version").and_then(serde_json::Value::as_u64);
    match version {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(SerialError::Version {
                found,
                expected: FORMAT_VERSION,
            })
        }
        None => return Err(SerialError::schema("$.version", "missing or not an integer")),
    }
    let doc: AutomatonDoc = serde_json::from_value(raw)?;

    let mut sig = Signature::new();
    for (k, s) in doc.signature.iter().enumerate() {
        let before = sig.len();
        sig.declare(&s.name, s.arity)
            .map_err(|m| SerialError::schema(format!("$.signature[{k}]"), m))?;
        if sig.len() == before {
            return Err(SerialError::schema(
                format!("$.signature[{k}]"),
                format!("duplicate symbol `{}`", s.name),
            ));
        }
    }
    let mut terms = Vec::with_capacity(doc.patterns.len());
    for (k, p) in doc.patterns.iter().enumerate() {
        let t = parse_term_in(p, &sig, ParseOptions::PATTERN)
            .map_err(|e| SerialError::schema(format!("$.patterns[{k}]"), e.to_string()))?;
        terms.push(t);
    }
    let patterns = PatternSet::new(sig.clone(), terms)
        .map_err(|e| SerialError::schema("$.patterns", e.to_string()))?;
    let table = SubpatternTable::new(&patterns);
    let count = doc.states.len();
    if count == 0 {
        return Err(SerialError::schema("$.states", "no states"));
    }
    let initial = state_ref(doc.initial, count, "$.initial")?;

    let mut states = Vec::with_capacity(count);
    let mut delta = Vec::with_capacity(count * sig.len());
    for (k, s) in doc.states.iter().enumerate() {
        let path = format!("$.states[{k}]");
        if s.id as usize != k {
            return Err(SerialError::schema(
                format!("{path}.id"),
                format!("expected id {k}, found {}", s.id),
            ));
        }
        let label = position(&s.label, &format!("{path}.label"))?;
        let mut goals = Vec::new();
        for (j, g) in s.goals.iter().flatten().enumerate() {
            let gpath = format!("{path}.goals[{j}]");
            let mut pairs = Vec::with_capacity(g.obligation.len());
            for (i, pair) in g.obligation.iter().enumerate() {
                let ppath = format!("{gpath}.obligation[{i}]");
                let t = parse_term_in(&pair.pattern, &sig, ParseOptions::PATTERN)
                    .map_err(|e| SerialError::schema(format!("{ppath}.pattern"), e.to_string()))?;
                let sub = table.lookup(&t).ok_or_else(|| {
                    SerialError::schema(format!("{ppath}.pattern"), "not a subpattern of the pattern set")
                })?;
                pairs.push((position(&pair.pos, &format!("{ppath}.pos"))?, sub));
            }
            if pairs.is_empty() {
                return Err(SerialError::schema(format!("{gpath}.obligation"), "empty obligation"));
            }
            let ann = announcement(&g.announce, patterns.len(), &format!("{gpath}.announce"))?;
            goals.push(Goal::new(Obligation::new(pairs), ann));
        }
        states.push(State {
            goals: GoalSet::new(goals),
            label,
        });
        if let Some(name) = s.delta.keys().find(|n| sig.lookup(n).is_none()) {
            return Err(SerialError::schema(
                format!("{path}.delta"),
                format!("unknown symbol `{name}`"),
            ));
        }
        for f in sig.ids() {
            let name = sig.name(f);
            let tpath = format!("{path}.delta.{name}");
            let t = s
                .delta
                .get(name)
                .ok_or_else(|| SerialError::schema(&tpath, "missing transition"))?;
            let outputs = t
                .outputs
                .iter()
                .enumerate()
                .map(|(i, o)| announcement(o, patterns.len(), &format!("{tpath}.outputs[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let targets = t
                .targets
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let p = format!("{tpath}.targets[{i}]");
                    Ok(Target {
                        state: state_ref(t.state, count, &format!("{p}.state"))?,
                        shift: position(&t.shift, &format!("{p}.shift"))?,
                    })
                })
                .collect::<Result<Vec<_>, SerialError>>()?;
            delta.push(Transition { outputs, targets });
        }
    }
    Ok(SetAutomaton::from_parts(patterns, table, states, delta, initial))
}
