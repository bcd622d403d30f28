//! Match obligations, announcements and goals.
//!
//! A goal `ℓ1@p1, …, ℓn@pn → ℓ@p` says: to announce pattern `ℓ` at `p`, the
//! subpatterns `ℓi` still have to be observed at `pi`. Subpatterns are
//! interned in a [`SubpatternTable`] so that goals are small, hashable and
//! have a canonical order.

use std::collections::HashMap;
use std::fmt;

use crate::error::InvariantError;
use crate::position::{gcp, Position};
use crate::term::{PatternId, PatternSet, Signature, SymbolId, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubpatternId(pub u32);

impl SubpatternId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
struct Entry {
    term: Term,
    head: SymbolId,
    /// `None` for wildcard arguments.
    children: Vec<Option<SubpatternId>>,
}

/// The interned set `sub(𝓛)` of non-wildcard subterms of a pattern set.
#[derive(Clone, Debug)]
pub struct SubpatternTable {
    signature: Signature,
    entries: Vec<Entry>,
    index: HashMap<Term, SubpatternId>,
    roots: Vec<SubpatternId>,
}

impl SubpatternTable {
    pub fn new(patterns: &PatternSet) -> SubpatternTable {
        let mut table = SubpatternTable {
            signature: patterns.signature().clone(),
            entries: Vec::new(),
            index: HashMap::new(),
            roots: Vec::with_capacity(patterns.len()),
        };
        for p in patterns.patterns() {
            let id = table
                .intern(p)
                .expect("pattern sets never contain the bare wildcard");
            table.roots.push(id);
        }
        table
    }

    fn intern(&mut self, t: &Term) -> Option<SubpatternId> {
        let Term::App(head, args) = t else {
            return None;
        };
        if let Some(&id) = self.index.get(t) {
            return Some(id);
        }
        let children = args.iter().map(|a| self.intern(a)).collect();
        let id = SubpatternId(self.entries.len() as u32);
        self.entries.push(Entry {
            term: t.clone(),
            head: *head,
            children,
        });
        self.index.insert(t.clone(), id);
        Some(id)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pattern_count(&self) -> usize {
        self.roots.len()
    }

    pub fn patterns(&self) -> impl Iterator<Item = PatternId> {
        (0..self.roots.len() as u32).map(PatternId)
    }

    pub fn term(&self, id: SubpatternId) -> &Term {
        &self.entries[id.index()].term
    }

    pub fn head(&self, id: SubpatternId) -> SymbolId {
        self.entries[id.index()].head
    }

    /// `ℓ[i]` for 1-based `i`, `None` when it is a wildcard or out of range.
    pub fn child(&self, id: SubpatternId, i: usize) -> Option<SubpatternId> {
        self.entries[id.index()]
            .children
            .get(i.checked_sub(1)?)
            .copied()
            .flatten()
    }

    /// True for `f(_, …, _)`, including constants.
    pub fn is_flat(&self, id: SubpatternId) -> bool {
        self.entries[id.index()].children.iter().all(Option::is_none)
    }

    pub fn of_pattern(&self, p: PatternId) -> SubpatternId {
        self.roots[p.index()]
    }

    pub fn lookup(&self, t: &Term) -> Option<SubpatternId> {
        self.index.get(t).copied()
    }

    pub fn arity(&self, f: SymbolId) -> usize {
        self.signature.arity(f)
    }

    pub fn render(&self, id: SubpatternId) -> String {
        self.term(id).display(&self.signature).to_string()
    }
}

/// A non-empty set of `subpattern@position` pairs, or the empty (fulfilled)
/// result of [`Obligation::reduce`]. Pairs are kept sorted by position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obligation {
    pairs: Vec<(Position, SubpatternId)>,
}

impl Obligation {
    pub fn new(mut pairs: Vec<(Position, SubpatternId)>) -> Obligation {
        pairs.sort();
        pairs.dedup();
        Obligation { pairs }
    }

    pub fn single(sub: SubpatternId, at: Position) -> Obligation {
        Obligation {
            pairs: vec![(at, sub)],
        }
    }

    pub fn pairs(&self) -> &[(Position, SubpatternId)] {
        &self.pairs
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.pairs.iter().map(|(p, _)| p)
    }

    pub fn contains_position(&self, p: &Position) -> bool {
        self.pairs.iter().any(|(q, _)| q == p)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// The obligation left after observing `f` at `at`: pairs elsewhere are
    /// kept, a pair `ℓ@at` is replaced by its non-wildcard arguments
    /// `ℓ[i]@at.i` for `1 ≤ i ≤ ar(f)`.
    ///
    /// Arguments are only well defined when `hd(ℓ) = f`; callers check the
    /// head first (see [`goal_outcome`]).
    pub fn reduce(&self, table: &SubpatternTable, f: SymbolId, at: &Position) -> Obligation {
        let arity = table.arity(f);
        let mut pairs = Vec::with_capacity(self.pairs.len() + arity);
        for (q, sub) in &self.pairs {
            if q != at {
                pairs.push((q.clone(), *sub));
                continue;
            }
            for i in 1..=arity {
                if let Some(c) = table.child(*sub, i) {
                    pairs.push((at.child(i as u32), c));
                }
            }
        }
        Obligation::new(pairs)
    }

    fn shifted(&self, prefix: &Position) -> Obligation {
        Obligation {
            pairs: self
                .pairs
                .iter()
                .map(|(p, s)| (prefix.concat(p), *s))
                .collect(),
        }
    }
}

/// `ℓ@p`: pattern `ℓ` is to be reported at `p` once its obligation holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Announcement {
    pub position: Position,
    pub pattern: PatternId,
}

impl Announcement {
    pub fn new(pattern: PatternId, position: Position) -> Announcement {
        Announcement { position, pattern }
    }
}

/// An obligation paired with the announcement it justifies.
///
/// Field order fixes the canonical ordering: announcement position, then
/// pattern id, then obligation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Goal {
    pub announcement: Announcement,
    pub obligation: Obligation,
}

impl Goal {
    pub fn new(obligation: Obligation, announcement: Announcement) -> Goal {
        Goal {
            announcement,
            obligation,
        }
    }

    /// `ℓ@p → ℓ@p`
    pub fn fresh(table: &SubpatternTable, pattern: PatternId, at: Position) -> Goal {
        Goal {
            obligation: Obligation::single(table.of_pattern(pattern), at.clone()),
            announcement: Announcement::new(pattern, at),
        }
    }

    pub fn is_root(&self) -> bool {
        self.announcement.position.is_root()
    }

    pub fn is_fresh(&self, table: &SubpatternTable) -> bool {
        matches!(
            self.obligation.pairs(),
            [(p, s)] if *p == self.announcement.position
                && *s == table.of_pattern(self.announcement.pattern)
        )
    }

    /// Prefixes every position in the goal with `prefix`.
    pub fn shifted(&self, prefix: &Position) -> Goal {
        Goal {
            announcement: Announcement::new(
                self.announcement.pattern,
                prefix.concat(&self.announcement.position),
            ),
            obligation: self.obligation.shifted(prefix),
        }
    }

    fn stripped(&self, prefix: &Position) -> Result<Goal, InvariantError> {
        let strip = |p: &Position| {
            p.strip_prefix(prefix).ok_or_else(|| InvariantError::NotBelowPrefix {
                position: p.clone(),
                prefix: prefix.clone(),
            })
        };
        let pairs = self
            .obligation
            .pairs
            .iter()
            .map(|(p, s)| Ok((strip(p)?, *s)))
            .collect::<Result<Vec<_>, InvariantError>>()?;
        Ok(Goal {
            announcement: Announcement::new(
                self.announcement.pattern,
                strip(&self.announcement.position)?,
            ),
            obligation: Obligation::new(pairs),
        })
    }

    pub fn display<'a>(&'a self, table: &'a SubpatternTable) -> GoalDisplay<'a> {
        GoalDisplay { goal: self, table }
    }
}

pub struct GoalDisplay<'a> {
    goal: &'a Goal,
    table: &'a SubpatternTable,
}

impl fmt::Display for GoalDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (p, s)) in self.goal.obligation.pairs().iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}@{}", self.table.render(*s), p)?;
        }
        let a = &self.goal.announcement;
        write!(
            f,
            " → {}@{}",
            self.table.render(self.table.of_pattern(a.pattern)),
            a.position
        )
    }
}

/// What happens to a goal when symbol `f` is observed at some position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The position is not mentioned by the obligation.
    Unchanged,
    /// The observation is one of several still required.
    Reduced(Goal),
    /// The observation contradicts an expected head symbol.
    Discarded,
    /// The observation was the last one needed; the announcement holds.
    Completed,
}

pub fn goal_outcome(table: &SubpatternTable, goal: &Goal, f: SymbolId, at: &Position) -> Outcome {
    let mut mentioned = false;
    for (q, sub) in goal.obligation.pairs() {
        if q == at {
            if table.head(*sub) != f {
                return Outcome::Discarded;
            }
            mentioned = true;
        }
    }
    if !mentioned {
        return Outcome::Unchanged;
    }
    let reduced = goal.obligation.reduce(table, f, at);
    if reduced.is_empty() {
        debug_assert!(
            matches!(goal.obligation.pairs(), [(q, s)] if q == at && table.is_flat(*s)),
            "empty reduction must come from a single flat obligation at the label"
        );
        Outcome::Completed
    } else {
        Outcome::Reduced(Goal::new(reduced, goal.announcement.clone()))
    }
}

/// A canonical (sorted, duplicate-free) set of goals; plain equality is set
/// equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GoalSet(Vec<Goal>);

impl GoalSet {
    pub fn new(mut goals: Vec<Goal>) -> GoalSet {
        goals.sort();
        goals.dedup();
        GoalSet(goals)
    }

    pub fn goals(&self) -> &[Goal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn root_goals(&self) -> impl Iterator<Item = &Goal> {
        self.0.iter().filter(|g| g.is_root())
    }

    /// `pos_MO(s)`, sorted and deduplicated.
    pub fn obligation_positions(&self) -> Vec<Position> {
        let mut v: Vec<Position> = self
            .0
            .iter()
            .flat_map(|g| g.obligation.positions().cloned())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains(&self, goal: &Goal) -> bool {
        self.0.binary_search(goal).is_ok()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Splits goals into classes of the transitive closure of "obligations share
/// a position". Classes appear in order of their first goal; goals keep their
/// input order within a class.
pub fn dependency_partition(goals: &[Goal]) -> Vec<Vec<Goal>> {
    let mut slot: HashMap<&Position, usize> = HashMap::new();
    for g in goals {
        for p in g.obligation.positions() {
            let next = slot.len();
            slot.entry(p).or_insert(next);
        }
    }
    let mut uf = UnionFind::new(slot.len());
    for g in goals {
        let mut ps = g.obligation.positions();
        if let Some(first) = ps.next() {
            let a = slot[first];
            for p in ps {
                uf.union(a, slot[p]);
            }
        }
    }
    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Vec<Goal>> = Vec::new();
    for g in goals {
        let root = match g.obligation.positions().next() {
            Some(p) => uf.find(slot[p]),
            // Unreachable for well-formed goals; keep such a goal on its own.
            None => usize::MAX - classes.len(),
        };
        let k = *class_of_root.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[k].push(g.clone());
    }
    classes
}

/// Strips the greatest common prefix of the class's announcement positions
/// from every position in the class. Returns the rewritten goals and the
/// stripped prefix.
pub fn lift_class(class: &[Goal]) -> Result<(Vec<Goal>, Position), InvariantError> {
    let shift = gcp(class.iter().map(|g| &g.announcement.position))
        .ok_or(InvariantError::EmptyClass)?;
    let lifted = class
        .iter()
        .map(|g| g.stripped(&shift))
        .collect::<Result<Vec<_>, _>>()?;
    if !lifted.iter().any(Goal::is_root) {
        return Err(InvariantError::NoRootGoalInClass);
    }
    Ok((lifted, shift))
}
