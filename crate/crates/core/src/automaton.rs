//! Construction of the set automaton from a pattern set.
//!
//! Each state is a canonical goal set together with a label, the position
//! (relative to the evaluation pointer) whose symbol the state inspects. A
//! transition on symbol `f` yields the announcements completed by observing
//! `f` at the label and a set of `(state, shift)` successors, one per
//! dependency class of the `f`-derivative. An empty successor set is the
//! final state.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{BuildError, InvariantError};
use crate::goal::{
    dependency_partition, goal_outcome, lift_class, Announcement, Goal, GoalSet, Outcome,
    SubpatternTable,
};
use crate::position::Position;
use crate::term::{PatternSet, Signature, SymbolId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Which root-goal obligation position a new state inspects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LabelStrategy {
    /// Lexicographically least candidate.
    Leftmost,
    /// Lexicographically greatest candidate.
    #[default]
    Rightmost,
}

impl std::str::FromStr for LabelStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "leftmost" => Ok(LabelStrategy::Leftmost),
            "rightmost" => Ok(LabelStrategy::Rightmost),
            other => Err(format!("unknown label strategy {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    pub strategy: LabelStrategy,
    /// Abort with [`BuildError::StateLimit`] once this many states exist.
    pub max_states: Option<usize>,
}

impl BuildOptions {
    pub fn with_strategy(strategy: LabelStrategy) -> BuildOptions {
        BuildOptions {
            strategy,
            max_states: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub goals: GoalSet,
    pub label: Position,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Target {
    pub state: StateId,
    pub shift: Position,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transition {
    pub outputs: Vec<Announcement>,
    pub targets: Vec<Target>,
}

impl Transition {
    pub fn is_final(&self) -> bool {
        self.targets.is_empty()
    }
}

/// A finite set automaton. Immutable once built and `Sync`, so any number of
/// evaluators may share it.
#[derive(Clone, Debug)]
pub struct SetAutomaton {
    patterns: PatternSet,
    table: SubpatternTable,
    states: Vec<State>,
    /// Row-major: `delta[state * |signature| + symbol]`.
    delta: Vec<Transition>,
    initial: StateId,
}

impl SetAutomaton {
    pub(crate) fn from_parts(
        patterns: PatternSet,
        table: SubpatternTable,
        states: Vec<State>,
        delta: Vec<Transition>,
        initial: StateId,
    ) -> SetAutomaton {
        debug_assert_eq!(delta.len(), states.len() * patterns.signature().len());
        SetAutomaton {
            patterns,
            table,
            states,
            delta,
            initial,
        }
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    pub fn signature(&self) -> &Signature {
        self.patterns.signature()
    }

    pub fn table(&self) -> &SubpatternTable {
        &self.table
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &State {
        &self.states[id.index()]
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    /// Number of states, not counting the implicit final state.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn label(&self, id: StateId) -> &Position {
        &self.states[id.index()].label
    }

    pub fn transition(&self, state: StateId, symbol: SymbolId) -> &Transition {
        &self.delta[state.index() * self.signature().len() + symbol.index()]
    }

    /// Total number of `(state, shift)` successor arrows.
    pub fn target_count(&self) -> usize {
        self.delta.iter().map(|t| t.targets.len()).sum()
    }

    /// Checks the structural invariants every reachable state must satisfy:
    /// a root goal exists and contains the label, obligation positions are
    /// pairwise incomparable and below their announcement, fresh goals exist
    /// for every obligation position, and all positions lie in the bound of
    /// [`reachable_position_bound`]. Also checks that the transition table is
    /// total and references valid states.
    pub fn check_invariants(&self) -> Result<(), InvariantError> {
        let bound = reachable_position_bound(&self.patterns);
        let nsym = self.signature().len();
        if self.delta.len() != self.states.len() * nsym {
            return Err(InvariantError::State {
                state: 0,
                message: "transition table is not total".into(),
            });
        }
        for (k, state) in self.states.iter().enumerate() {
            let fail = |message: String| InvariantError::State { state: k, message };
            let goals = &state.goals;
            if goals.is_empty() {
                return Err(fail("goal set unavailable or empty".into()));
            }
            if !goals
                .root_goals()
                .any(|g| g.obligation.contains_position(&state.label))
            {
                return Err(fail(format!(
                    "label {} is not an obligation position of a root goal",
                    state.label
                )));
            }
            for g in goals.goals() {
                if g.obligation.is_empty() {
                    return Err(fail("empty obligation".into()));
                }
                if let Some(p) = g
                    .obligation
                    .positions()
                    .find(|p| !p.is_below(&g.announcement.position))
                {
                    return Err(fail(format!(
                        "obligation position {p} is not below announcement position {}",
                        g.announcement.position
                    )));
                }
            }
            let positions = goals.obligation_positions();
            for (i, p) in positions.iter().enumerate() {
                if let Some(q) = positions[i + 1..].iter().find(|q| p.comparable(q)) {
                    return Err(fail(format!("obligation positions {p} and {q} are comparable")));
                }
                for pattern in self.patterns.ids() {
                    if !goals.contains(&Goal::fresh(&self.table, pattern, p.clone())) {
                        return Err(fail(format!(
                            "missing fresh goal for pattern {} at {p}",
                            pattern.0
                        )));
                    }
                }
                if !bound.contains(p) {
                    return Err(fail(format!("position {p} outside the reachable bound")));
                }
            }
            for f in self.signature().ids() {
                for t in &self.delta[k * nsym + f.index()].targets {
                    if t.state.index() >= self.states.len() {
                        return Err(fail(format!("unknown target state {}", t.state)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `s0`: one fresh root goal per pattern, labelled with the root.
pub fn initial_state(table: &SubpatternTable) -> State {
    let goals = table
        .patterns()
        .map(|p| Goal::fresh(table, p, Position::root()))
        .collect();
    State {
        goals: GoalSet::new(goals),
        label: Position::root(),
    }
}

/// The `f`-derivative of `state`: unchanged goals, non-empty reductions of
/// goals expecting `f` at the label, and fresh goals for every argument
/// position of `f` below the label. Completed and contradicted goals are
/// dropped.
pub fn derivative(table: &SubpatternTable, state: &State, f: SymbolId) -> GoalSet {
    let mut goals = Vec::with_capacity(state.goals.len() + table.pattern_count());
    for g in state.goals.goals() {
        match goal_outcome(table, g, f, &state.label) {
            Outcome::Unchanged => goals.push(g.clone()),
            Outcome::Reduced(r) => goals.push(r),
            Outcome::Discarded | Outcome::Completed => {}
        }
    }
    for i in 1..=table.arity(f) as u32 {
        let at = state.label.child(i);
        for p in table.patterns() {
            goals.push(Goal::fresh(table, p, at.clone()));
        }
    }
    GoalSet::new(goals)
}

/// Announcements whose obligation is fulfilled by observing `f` at the label.
pub fn outputs(table: &SubpatternTable, state: &State, f: SymbolId) -> Vec<Announcement> {
    let mut out: Vec<Announcement> = state
        .goals
        .goals()
        .iter()
        .filter(|g| goal_outcome(table, g, f, &state.label) == Outcome::Completed)
        .map(|g| g.announcement.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Picks the label of a new state among the obligation positions of its root
/// goals.
pub fn choose_label(goals: &GoalSet, strategy: LabelStrategy) -> Result<Position, InvariantError> {
    let candidates = goals
        .root_goals()
        .flat_map(|g| g.obligation.positions());
    let chosen = match strategy {
        LabelStrategy::Leftmost => candidates.min(),
        LabelStrategy::Rightmost => candidates.max(),
    };
    chosen.cloned().ok_or(InvariantError::NoRootGoalInClass)
}

/// Outputs and unnumbered successors `(goal set, shift)` of one transition.
pub type Step = (Vec<Announcement>, Vec<(GoalSet, Position)>);

/// The transition out of `state` on `f`, with successor goal sets still
/// unnumbered.
pub fn step(
    table: &SubpatternTable,
    state: &State,
    f: SymbolId,
) -> Result<Step, InvariantError> {
    let out = outputs(table, state, f);
    let deriv = derivative(table, state, f);
    let mut successors = Vec::new();
    for class in dependency_partition(deriv.goals()) {
        let (lifted, shift) = lift_class(&class)?;
        successors.push((GoalSet::new(lifted), shift));
    }
    Ok((out, successors))
}

/// Worklist construction from the initial state. States are numbered in
/// discovery order; the worklist is FIFO and symbols are visited in
/// signature order, so the result is deterministic.
pub fn build(patterns: &PatternSet, options: BuildOptions) -> Result<SetAutomaton, BuildError> {
    let table = SubpatternTable::new(patterns);
    let nsym = patterns.signature().len();
    let s0 = initial_state(&table);
    let mut index: HashMap<GoalSet, StateId> = HashMap::new();
    index.insert(s0.goals.clone(), StateId(0));
    let mut states = vec![s0];
    let mut delta = Vec::new();
    let mut pending = VecDeque::from([StateId(0)]);

    while let Some(id) = pending.pop_front() {
        debug_assert_eq!(delta.len(), id.index() * nsym);
        for f in patterns.signature().ids() {
            let (outputs, successors) = step(&table, &states[id.index()], f)?;
            let mut targets = Vec::with_capacity(successors.len());
            for (goals, shift) in successors {
                let target = match index.get(&goals) {
                    Some(&t) => t,
                    None => {
                        if let Some(limit) = options.max_states {
                            if states.len() >= limit {
                                return Err(BuildError::StateLimit(limit));
                            }
                        }
                        let t = StateId(states.len() as u32);
                        let label = choose_label(&goals, options.strategy)?;
                        index.insert(goals.clone(), t);
                        states.push(State { goals, label });
                        pending.push_back(t);
                        t
                    }
                };
                targets.push(Target { state: target, shift });
            }
            targets.sort();
            delta.push(Transition { outputs, targets });
        }
    }

    Ok(SetAutomaton::from_parts(
        patterns.clone(),
        table,
        states,
        delta,
        StateId(0),
    ))
}

/// The set `R` of positions `p` with `r.p = q.i` for some `q ∈ D(𝓛)`, some
/// `r`, and `1 ≤ i ≤ N` (the maximal arity). Every obligation position of a
/// reachable state lies in `R`. When `N = 0` the set is taken to be `{ε}`.
pub fn reachable_position_bound(patterns: &PatternSet) -> BTreeSet<Position> {
    let max_arity = patterns.signature().max_arity() as u32;
    let mut bound = BTreeSet::new();
    if max_arity == 0 {
        bound.insert(Position::root());
        return bound;
    }
    for q in patterns.domain() {
        for i in 1..=max_arity {
            bound.extend(q.child(i).suffixes());
        }
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::PatternId;

    fn fig2() -> PatternSet {
        let sig = Signature::from_symbols([("f", 2), ("g", 1), ("a", 0)]).unwrap();
        PatternSet::from_strs(sig, &["f(f(_,g(_)),g(_))"]).unwrap()
    }

    fn p(s: &str) -> Position {
        s.parse().unwrap()
    }

    #[test]
    fn initial_state_has_fresh_root_goals() {
        let sig = Signature::from_symbols([("f", 2), ("a", 0)]).unwrap();
        let ps = PatternSet::from_strs(sig, &["f(f(_,_),_)", "f(_,f(_,_))"]).unwrap();
        let t = SubpatternTable::new(&ps);
        let s0 = initial_state(&t);
        assert_eq!(s0.label, Position::root());
        assert_eq!(s0.goals.len(), 2);
        assert!(s0.goals.goals().iter().all(|g| g.is_root() && g.is_fresh(&t)));
    }

    #[test]
    fn constant_derivative_is_empty() {
        let sig = Signature::from_symbols([("f", 2), ("a", 0)]).unwrap();
        let ps = PatternSet::from_strs(sig, &["f(f(_,_),_)"]).unwrap();
        let t = SubpatternTable::new(&ps);
        let a = ps.signature().lookup("a").unwrap();
        assert!(derivative(&t, &initial_state(&t), a).is_empty());
    }

    #[test]
    fn running_example_states() {
        let ps = fig2();
        let a = build(&ps, BuildOptions::with_strategy(LabelStrategy::Rightmost)).unwrap();
        assert_eq!(a.state_count(), 4);
        let labels: Vec<String> = a.states().iter().map(|s| s.label.to_string()).collect();
        assert_eq!(labels, ["ε", "2", "1", "1.2"]);
        a.check_invariants().unwrap();

        let sig = ps.signature();
        let (f, g) = (sig.lookup("f").unwrap(), sig.lookup("g").unwrap());
        let s3 = StateId(3);
        assert_eq!(
            a.transition(s3, g).outputs,
            vec![Announcement::new(PatternId(0), Position::root())]
        );
        // Recomputed from the definitions: (s0, 1.1) and (s1, 1.2).
        assert_eq!(
            a.transition(s3, f).targets,
            vec![
                Target { state: StateId(0), shift: p("1.1") },
                Target { state: StateId(1), shift: p("1.2") },
            ]
        );
        let mut shifts: Vec<_> = a
            .transition(StateId(1), g)
            .targets
            .iter()
            .map(|t| t.shift.clone())
            .collect();
        shifts.sort();
        assert_eq!(shifts, vec![p("ε"), p("2.1")]);
    }

    #[test]
    fn single_constant_pattern() {
        let sig = Signature::from_symbols([("a", 0)]).unwrap();
        let ps = PatternSet::from_strs(sig, &["a"]).unwrap();
        let a = build(&ps, BuildOptions::default()).unwrap();
        assert_eq!(a.state_count(), 1);
        let t = a.transition(StateId(0), SymbolId(0));
        assert!(t.is_final());
        assert_eq!(t.outputs, vec![Announcement::new(PatternId(0), Position::root())]);
        assert_eq!(reachable_position_bound(&ps), BTreeSet::from([Position::root()]));
        a.check_invariants().unwrap();
    }

    #[test]
    fn label_choice() {
        let ps = fig2();
        let t = SubpatternTable::new(&ps);
        let s0 = initial_state(&t);
        assert_eq!(choose_label(&s0.goals, LabelStrategy::Leftmost).unwrap(), p("ε"));
        assert_eq!(choose_label(&s0.goals, LabelStrategy::Rightmost).unwrap(), p("ε"));
        let f = ps.signature().lookup("f").unwrap();
        let d = derivative(&t, &s0, f);
        assert_eq!(choose_label(&d, LabelStrategy::Leftmost).unwrap(), p("1"));
        assert_eq!(choose_label(&d, LabelStrategy::Rightmost).unwrap(), p("2"));
        let no_root = GoalSet::new(vec![Goal::fresh(&t, PatternId(0), p("1"))]);
        assert!(choose_label(&no_root, LabelStrategy::Leftmost).is_err());
    }

    #[test]
    fn bound_contains_suffixes() {
        let sig = Signature::from_symbols([("f", 2), ("a", 0)]).unwrap();
        let ps = PatternSet::from_strs(sig, &["f(a,_)"]).unwrap();
        let r = reachable_position_bound(&ps);
        // D = {ε, 1, 2}; q.i ranges over {1, 2, 1.1, 1.2, 2.1, 2.2}.
        let expected: BTreeSet<Position> = ["ε", "1", "2", "1.1", "1.2", "2.1", "2.2"]
            .iter()
            .map(|s| p(s))
            .collect();
        assert_eq!(r, expected);
    }

    #[test]
    fn state_limit() {
        let ps = fig2();
        let opts = BuildOptions {
            strategy: LabelStrategy::Rightmost,
            max_states: Some(2),
        };
        assert_eq!(build(&ps, opts).unwrap_err(), BuildError::StateLimit(2));
    }
}
