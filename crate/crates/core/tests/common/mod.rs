#![allow(dead_code)]

use setmatch::term::{parse_term_in, ParseOptions};
use setmatch::{build, BuildOptions, LabelStrategy, PatternSet, Position, SetAutomaton, Signature, Term};

pub fn pos(s: &str) -> Position {
    s.parse().expect("valid position literal")
}

pub fn patterns(sig: &str, patterns: &[&str]) -> PatternSet {
    PatternSet::from_strs(Signature::parse(sig).unwrap(), patterns).unwrap()
}

pub fn subject(ps: &PatternSet, text: &str) -> Term {
    parse_term_in(text, ps.signature(), ParseOptions::SUBJECT).unwrap()
}

/// ℓ1 = f(f(_,_),_), ℓ2 = f(_,f(_,_)) over f/2, a/0.
pub fn associativity() -> PatternSet {
    patterns("f/2\na/0\n", &["f(f(_,_),_)", "f(_,f(_,_))"])
}

/// ℓ = f(f(_,g(_)),g(_)) over f/2, g/1, a/0.
pub fn running_example() -> PatternSet {
    patterns("f/2\ng/1\na/0\n", &["f(f(_,g(_)),g(_))"])
}

pub const ASSOCIATIVITY_SUBJECT: &str = "f(f(a,f(a,a)),a)";
pub const RUNNING_SUBJECT: &str = "f(g(a),f(f(a,g(a)),g(a)))";

pub fn compile(ps: &PatternSet, strategy: LabelStrategy) -> SetAutomaton {
    build(ps, BuildOptions::with_strategy(strategy)).unwrap()
}

/// Independent recursive count of term positions.
pub fn count_positions(t: &Term) -> usize {
    1 + t.args().iter().map(count_positions).sum::<usize>()
}

/// Complete binary tree of `f` with `a` leaves, `height` levels of `f`.
pub fn balanced(ps: &PatternSet, height: u32) -> Term {
    let sig = ps.signature();
    let f = sig.lookup("f").unwrap();
    let a = sig.lookup("a").unwrap();
    let mut t = Term::constant(a);
    for _ in 0..height {
        t = Term::App(f, vec![t.clone(), t]);
    }
    t
}
