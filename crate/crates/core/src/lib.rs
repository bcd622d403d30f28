//! Set automata for the subterm matching problem.
//!
//! A pattern set is compiled once into a [`SetAutomaton`]. Evaluating the
//! automaton on a closed subject term yields every `(pattern, position)`
//! match while reading each subject symbol exactly once. Successor work
//! items are independent, so the subject can be traversed depth-first,
//! breadth-first or by a pool of worker threads with identical results.
//!
//! ```
//! use setmatch::{build, evaluate, BuildOptions, EvalOptions, PatternSet};
//! use setmatch::term::{parse_term_in, ParseOptions};
//!
//! let patterns = PatternSet::parse("f(f(_,_),_)\nf(_,f(_,_))\na\n", None).unwrap();
//! let automaton = build(&patterns, BuildOptions::default()).unwrap();
//! let subject = parse_term_in("f(f(a,f(a,a)),a)", patterns.signature(), ParseOptions::SUBJECT).unwrap();
//! let report = evaluate(&automaton, &subject, &EvalOptions::default()).unwrap();
//! assert_eq!(report.matches.len(), 2 + 4);
//! ```

pub mod automaton;
pub mod cli;
pub mod dot;
pub mod error;
pub mod eval;
pub mod goal;
pub mod oracle;
pub mod position;
pub mod serial;
pub mod term;

pub use automaton::{build, BuildOptions, LabelStrategy, SetAutomaton, StateId};
pub use error::{BuildError, EvalError, InvariantError, ParseError, PatternSetError, SerialError};
pub use eval::{evaluate, EvalOptions, MatchReport, Strategy};
pub use position::Position;
pub use term::{PatternId, PatternSet, Signature, SymbolId, Term};
