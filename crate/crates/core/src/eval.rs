//! Running a set automaton over a closed subject term.
//!
//! Evaluation starts with the work item `(s0, ε)`. Processing `(s, p)` reads
//! the head symbol `f` of the subject at `p.L(s)`, reports every output
//! `ℓ@q` of `δ(s, f)` as `ℓ@p.q` and schedules `(s', p.shift)` for each
//! successor. Items never depend on one another, so the order of the work set
//! only affects the order in which matches are found.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use crossbeam_deque::{Injector, Steal, Stealer, Worker};

use crate::automaton::{SetAutomaton, StateId};
use crate::error::EvalError;
use crate::position::Position;
use crate::term::{PatternId, Term};

/// Work-set discipline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// LIFO stack.
    #[default]
    DepthFirst,
    /// FIFO queue.
    BreadthFirst,
    /// Work-stealing pool with the given number of threads (at least 1).
    Parallel(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub strategy: Strategy,
    /// Record every inspected position in [`MatchReport::inspected`].
    pub instrument: bool,
    /// Carry a reference to `t[p]` with each work item, so inspections walk
    /// only `L(s)` instead of the full path from the subject root.
    pub cache_subterms: bool,
}

impl EvalOptions {
    pub fn new(strategy: Strategy) -> EvalOptions {
        EvalOptions {
            strategy,
            ..EvalOptions::default()
        }
    }

    pub fn instrumented(self) -> EvalOptions {
        EvalOptions {
            instrument: true,
            ..self
        }
    }

    pub fn cached(self) -> EvalOptions {
        EvalOptions {
            cache_subterms: true,
            ..self
        }
    }
}

/// An evaluation-tree node: a state anchored at a subject position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkItem {
    pub state: StateId,
    pub pointer: Position,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub pattern: PatternId,
    pub position: Position,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchReport {
    /// All matches with absolute positions, sorted.
    pub matches: Vec<Match>,
    /// Inspected positions, sorted. Empty unless instrumentation was on.
    pub inspected: Vec<Position>,
    /// Number of work items processed.
    pub node_count: usize,
}

impl MatchReport {
    /// Number of inspections recorded by an instrumented run.
    pub fn count_inspections(&self) -> usize {
        self.inspected.len()
    }

    /// True if no position was inspected twice.
    pub fn inspections_unique(&self) -> bool {
        self.inspected.windows(2).all(|w| w[0] != w[1])
    }
}

pub fn count_inspections(report: &MatchReport) -> usize {
    report.count_inspections()
}

/// Rejects subjects with wildcards or symbols foreign to the automaton.
pub fn check_subject(automaton: &SetAutomaton, subject: &Term) -> Result<(), EvalError> {
    let sig = automaton.signature();
    let mut stack = vec![subject];
    while let Some(t) = stack.pop() {
        match t {
            Term::Wildcard => return Err(EvalError::OpenSubject),
            Term::App(f, args) => {
                if !sig.contains(*f) || sig.arity(*f) != args.len() {
                    return Err(EvalError::UnknownSymbol(format!("#{}", f.0)));
                }
                stack.extend(args);
            }
        }
    }
    Ok(())
}

struct Item<'t> {
    state: StateId,
    pointer: Position,
    anchor: Option<&'t Term>,
}

#[derive(Default)]
struct Collected {
    matches: Vec<Match>,
    inspected: Vec<Position>,
    nodes: usize,
}

impl Collected {
    fn merge(&mut self, other: Collected) {
        self.matches.extend(other.matches);
        self.inspected.extend(other.inspected);
        self.nodes += other.nodes;
    }

    fn into_report(mut self) -> MatchReport {
        self.matches.sort();
        debug_assert!(
            self.matches.windows(2).all(|w| w[0] != w[1]),
            "a match was produced twice"
        );
        self.inspected.sort();
        MatchReport {
            matches: self.matches,
            inspected: self.inspected,
            node_count: self.nodes,
        }
    }
}

struct Engine<'a, 't> {
    automaton: &'a SetAutomaton,
    subject: &'t Term,
    options: EvalOptions,
}

impl<'t> Engine<'_, 't> {
    fn root(&self) -> Item<'t> {
        Item {
            state: self.automaton.initial(),
            pointer: Position::root(),
            anchor: self.options.cache_subterms.then_some(self.subject),
        }
    }

    /// Processes one item, handing successors to `schedule`.
    fn process(
        &self,
        item: &Item<'t>,
        out: &mut Collected,
        mut schedule: impl FnMut(Item<'t>),
    ) -> Result<(), EvalError> {
        let label = self.automaton.label(item.state);
        let outside = || EvalError::OutsideDomain {
            pointer: item.pointer.clone(),
            label: label.clone(),
        };
        let node = match item.anchor {
            Some(anchor) => anchor.subterm_at(label),
            None => self.subject.subterm_at(&item.pointer.concat(label)),
        }
        .map_err(|_| outside())?;
        let f = node.head().ok_or(EvalError::OpenSubject)?;
        out.nodes += 1;
        if self.options.instrument {
            out.inspected.push(item.pointer.concat(label));
        }
        let transition = self.automaton.transition(item.state, f);
        for a in &transition.outputs {
            out.matches.push(Match {
                pattern: a.pattern,
                position: item.pointer.concat(&a.position),
            });
        }
        for target in &transition.targets {
            let anchor = match item.anchor {
                Some(anchor) => Some(anchor.subterm_at(&target.shift).map_err(|_| outside())?),
                None => None,
            };
            schedule(Item {
                state: target.state,
                pointer: item.pointer.concat(&target.shift),
                anchor,
            });
        }
        Ok(())
    }

    fn run_sequential(&self, lifo: bool) -> Result<Collected, EvalError> {
        let mut out = Collected::default();
        let mut work = VecDeque::from([self.root()]);
        while let Some(item) = if lifo { work.pop_back() } else { work.pop_front() } {
            self.process(&item, &mut out, |next| work.push_back(next))?;
        }
        Ok(out)
    }
}

fn find_task<'t>(
    local: &Worker<Item<'t>>,
    global: &Injector<Item<'t>>,
    stealers: &[Stealer<Item<'t>>],
) -> Option<Item<'t>> {
    local.pop().or_else(|| {
        std::iter::repeat_with(|| {
            global
                .steal_batch_and_pop(local)
                .or_else(|| stealers.iter().map(Stealer::steal).collect())
        })
        .find(|s| !s.is_retry())
        .and_then(Steal::success)
    })
}

fn run_parallel<'t>(engine: &Engine<'_, 't>, threads: usize) -> Result<Collected, EvalError> {
    let threads = threads.max(1);
    let global = Injector::new();
    global.push(engine.root());
    let pending = AtomicUsize::new(1);
    let failed = AtomicBool::new(false);
    let error: Mutex<Option<EvalError>> = Mutex::new(None);
    let workers: Vec<Worker<Item<'t>>> = (0..threads).map(|_| Worker::new_lifo()).collect();
    let stealers: Vec<Stealer<Item<'t>>> = workers.iter().map(Worker::stealer).collect();

    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = workers
            .into_iter()
            .map(|local| {
                let (global, stealers, pending, failed, error) =
                    (&global, &stealers, &pending, &failed, &error);
                scope.spawn(move || {
                    let mut out = Collected::default();
                    while !failed.load(Ordering::Relaxed) {
                        let Some(item) = find_task(&local, global, stealers) else {
                            if pending.load(Ordering::Acquire) == 0 {
                                break;
                            }
                            std::thread::yield_now();
                            continue;
                        };
                        let res = engine.process(&item, &mut out, |next| {
                            pending.fetch_add(1, Ordering::AcqRel);
                            local.push(next);
                        });
                        if let Err(e) = res {
                            error.lock().unwrap().get_or_insert(e);
                            failed.store(true, Ordering::Relaxed);
                        }
                        pending.fetch_sub(1, Ordering::AcqRel);
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().map_err(|_| EvalError::WorkerPanic))
            .collect::<Result<Vec<_>, _>>()
    })?;

    if let Some(e) = error.into_inner().unwrap() {
        return Err(e);
    }
    let mut all = Collected::default();
    for r in results {
        all.merge(r);
    }
    Ok(all)
}

/// Finds every match of the automaton's patterns in `subject`.
pub fn evaluate(
    automaton: &SetAutomaton,
    subject: &Term,
    options: &EvalOptions,
) -> Result<MatchReport, EvalError> {
    check_subject(automaton, subject)?;
    let engine = Engine {
        automaton,
        subject,
        options: *options,
    };
    let collected = match options.strategy {
        Strategy::DepthFirst => engine.run_sequential(true)?,
        Strategy::BreadthFirst => engine.run_sequential(false)?,
        Strategy::Parallel(threads) => run_parallel(&engine, threads)?,
    };
    Ok(collected.into_report())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalNode {
    pub item: WorkItem,
    /// `φ(s, p) = p.L(s)`, the position this node inspects.
    pub inspects: Position,
    pub children: Vec<usize>,
}

/// The evaluation tree of a subject: root `(s0, ε)`, one edge per successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTree {
    pub nodes: Vec<EvalNode>,
}

impl EvalTree {
    pub fn root(&self) -> &EvalNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Image of `φ` over all nodes, in node order.
    pub fn phi_image(&self) -> Vec<Position> {
        self.nodes.iter().map(|n| n.inspects.clone()).collect()
    }

    /// Positions inspected within the subtree rooted at `node`.
    pub fn subtree_positions(&self, node: usize) -> Vec<Position> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(k) = stack.pop() {
            out.push(self.nodes[k].inspects.clone());
            stack.extend(&self.nodes[k].children);
        }
        out
    }
}

pub fn evaluation_tree(automaton: &SetAutomaton, subject: &Term) -> Result<EvalTree, EvalError> {
    check_subject(automaton, subject)?;
    let mut nodes = vec![EvalNode {
        item: WorkItem {
            state: automaton.initial(),
            pointer: Position::root(),
        },
        inspects: Position::root(),
        children: Vec::new(),
    }];
    let mut stack = vec![0usize];
    while let Some(k) = stack.pop() {
        let WorkItem { state, pointer } = nodes[k].item.clone();
        let label = automaton.label(state);
        let inspects = pointer.concat(label);
        let node = subject
            .subterm_at(&inspects)
            .map_err(|_| EvalError::OutsideDomain {
                pointer: pointer.clone(),
                label: label.clone(),
            })?;
        let f = node.head().ok_or(EvalError::OpenSubject)?;
        nodes[k].inspects = inspects;
        for target in &automaton.transition(state, f).targets {
            let child = nodes.len();
            nodes.push(EvalNode {
                item: WorkItem {
                    state: target.state,
                    pointer: pointer.concat(&target.shift),
                },
                inspects: Position::root(),
                children: Vec::new(),
            });
            nodes[k].children.push(child);
            stack.push(child);
        }
    }
    Ok(EvalTree { nodes })
}
