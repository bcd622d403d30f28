//! Signatures, terms, pattern sets and the primitive match predicate.

use std::collections::HashMap;
use std::fmt;

use crate::error::{ParseError, PatternSetError, TermError};
use crate::position::Position;

/// Index of a symbol within its [`Signature`], in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// A finite set of function symbols, each with a fixed arity.
///
/// Symbols keep their declaration order; that order drives transition
/// enumeration in the builder and therefore state numbering.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Builds a signature from `(name, arity)` pairs.
    pub fn from_symbols<'a, I>(symbols: I) -> Result<Signature, ParseError>
    where
        I: IntoIterator<Item = (&'a str, usize)>,
    {
        let mut sig = Signature::new();
        for (k, (name, arity)) in symbols.into_iter().enumerate() {
            sig.declare(name, arity).map_err(|message| ParseError::Signature {
                line: k + 1,
                message,
            })?;
        }
        Ok(sig)
    }

    /// Adds a symbol, or returns the existing id if it is already declared
    /// with the same arity.
    pub fn declare(&mut self, name: &str, arity: usize) -> Result<SymbolId, String> {
        if !is_identifier(name) {
            return Err(format!("invalid symbol name {name:?}"));
        }
        if let Some(&id) = self.by_name.get(name) {
            let existing = self.symbols[id.index()].arity;
            if existing != arity {
                return Err(format!(
                    "symbol `{name}` declared with arity {existing} and {arity}"
                ));
            }
            return Ok(id);
        }
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name: name.to_owned(),
            arity,
        });
        self.by_name.insert(name.to_owned(), id);
        Ok(id)
    }

    /// Parses the signature file format: one `name/arity` per line, `#`
    /// starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Signature, ParseError> {
        let mut sig = Signature::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ParseError::Signature {
                line: k + 1,
                message,
            };
            let (name, arity) = line
                .rsplit_once('/')
                .ok_or_else(|| err(format!("expected `name/arity`, found {line:?}")))?;
            let arity: usize = arity
                .trim()
                .parse()
                .map_err(|_| err(format!("invalid arity {:?}", arity.trim())))?;
            sig.declare(name.trim(), arity).map_err(err)?;
        }
        Ok(sig)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.index()].name
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.symbols[id.index()].arity
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        id.index() < self.symbols.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Largest arity of any symbol, 0 for an empty or constant-only signature.
    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Renders the signature in the file format accepted by [`Signature::parse`].
    pub fn to_file_text(&self) -> String {
        let mut out = String::new();
        for s in &self.symbols {
            out.push_str(&format!("{}/{}\n", s.name, s.arity));
        }
        out
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_continue)
}

/// A finite ordered tree over a signature plus the wildcard `_`.
///
/// The same type serves as pattern (wildcards allowed, not the bare
/// wildcard) and as subject (closed, no wildcards).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Wildcard,
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn constant(sym: SymbolId) -> Term {
        Term::App(sym, Vec::new())
    }

    pub fn head(&self) -> Option<SymbolId> {
        match self {
            Term::Wildcard => None,
            Term::App(f, _) => Some(*f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Wildcard => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Term::Wildcard)
    }

    /// True iff the term contains no wildcard.
    pub fn is_closed(&self) -> bool {
        match self {
            Term::Wildcard => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Number of nodes, wildcards included. Equals `|domain(self)|`.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            stack.extend(t.args());
        }
        n
    }

    /// Height counting symbol levels; the wildcard has depth 0, constants 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Wildcard => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// `self[p]`.
    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in p.indices() {
            t = t
                .args()
                .get(i as usize - 1)
                .ok_or_else(|| TermError::OutsideDomain(p.clone()))?;
        }
        Ok(t)
    }

    /// The domain `D(self)` in pre-order (parents before children, children
    /// left to right).
    pub fn domain(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.size());
        let mut stack = vec![(self, Position::root())];
        while let Some((t, p)) = stack.pop() {
            for (i, _) in t.args().iter().enumerate().rev() {
                stack.push((&t.args()[i], p.child(i as u32 + 1)));
            }
            out.push(p);
        }
        out
    }

    /// Checks child counts against `sig` and, for subjects, closedness.
    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        match self {
            Term::Wildcard => true,
            Term::App(f, args) => {
                sig.contains(*f)
                    && sig.arity(*f) == args.len()
                    && args.iter().all(|a| a.is_well_formed(sig))
            }
        }
    }

    /// Canonical text rendering against `sig`.
    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }
}

/// Canonical printer: `name`, `name(c1,...,cn)`, `_`. No whitespace.
pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Wildcard => f.write_str("_"),
            Term::App(sym, args) => {
                f.write_str(self.sig.name(*sym))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a.display(self.sig))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// How [`parse_term`] treats its input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    pub allow_wildcard: bool,
    /// Declare unknown symbols instead of rejecting them. The arity is taken
    /// from the first occurrence.
    pub extend_signature: bool,
}

impl ParseOptions {
    pub const PATTERN: ParseOptions = ParseOptions {
        allow_wildcard: true,
        extend_signature: false,
    };
    pub const SUBJECT: ParseOptions = ParseOptions {
        allow_wildcard: false,
        extend_signature: false,
    };
}

/// Parses `term := IDENT | IDENT '(' term (',' term)* ')' | '_'`.
pub fn parse_term(input: &str, sig: &mut Signature, opts: ParseOptions) -> Result<Term, ParseError> {
    let mut parser = Parser {
        src: input,
        pos: 0,
        sig,
        opts,
    };
    parser.skip_ws();
    let term = parser.term()?;
    parser.skip_ws();
    if parser.pos != input.len() {
        return Err(parser.syntax("trailing input"));
    }
    Ok(term)
}

/// Parses against a fixed signature.
pub fn parse_term_in(input: &str, sig: &Signature, opts: ParseOptions) -> Result<Term, ParseError> {
    let mut scratch = sig.clone();
    let opts = ParseOptions {
        extend_signature: false,
        ..opts
    };
    parse_term(input, &mut scratch, opts)
}

struct Parser<'a, 's> {
    src: &'a str,
    pos: usize,
    sig: &'s mut Signature,
    opts: ParseOptions,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_owned(),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.pos;
        match self.peek() {
            None => Err(self.syntax("expected a term, found end of input")),
            Some('_') => {
                self.pos += 1;
                if matches!(self.peek(), Some(c) if is_ident_continue(c)) {
                    return Err(ParseError::Syntax {
                        offset: start,
                        message: "identifiers may not start with `_`".into(),
                    });
                }
                if !self.opts.allow_wildcard {
                    return Err(ParseError::WildcardForbidden { offset: start });
                }
                Ok(Term::Wildcard)
            }
            Some(c) if is_ident_start(c) => {
                while matches!(self.peek(), Some(c) if is_ident_continue(c)) {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                self.skip_ws();
                let mut args = Vec::new();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    loop {
                        self.skip_ws();
                        args.push(self.term()?);
                        self.skip_ws();
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.syntax("expected `,` or `)`")),
                        }
                    }
                }
                let id = match self.sig.lookup(name) {
                    Some(id) => id,
                    None if self.opts.extend_signature => self
                        .sig
                        .declare(name, args.len())
                        .map_err(|message| ParseError::Syntax {
                            offset: start,
                            message,
                        })?,
                    None => {
                        return Err(ParseError::UnknownSymbol {
                            name: name.to_owned(),
                            offset: start,
                        })
                    }
                };
                let expected = self.sig.arity(id);
                if expected != args.len() {
                    return Err(ParseError::ArityMismatch {
                        name: name.to_owned(),
                        expected,
                        found: args.len(),
                        offset: start,
                    });
                }
                Ok(Term::App(id, args))
            }
            Some(c) => Err(self.syntax(&format!("unexpected character {c:?}"))),
        }
    }
}

/// `t[p]`, the subterm of `t` at `p`.
pub fn subterm_at<'t>(t: &'t Term, p: &Position) -> Result<&'t Term, TermError> {
    t.subterm_at(p)
}

pub fn domain(t: &Term) -> Vec<Position> {
    t.domain()
}

/// True iff `pattern` matches `subject` at position `at`: for every
/// non-wildcard position `q` of the pattern, `at.q` lies in the subject and
/// carries the same head symbol. Each check walks down from the subject root.
pub fn matches(pattern: &Term, subject: &Term, at: &Position) -> bool {
    pattern.domain().into_iter().all(|q| {
        let expected = match pattern.subterm_at(&q) {
            Ok(Term::App(f, _)) => *f,
            _ => return true,
        };
        match subject.subterm_at(&at.concat(&q)) {
            Ok(t) => t.head() == Some(expected),
            Err(_) => false,
        }
    })
}

/// Index of a pattern within its [`PatternSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u32);

impl PatternId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A non-empty sequence of distinct patterns over a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSet {
    signature: Signature,
    patterns: Vec<Term>,
}

impl PatternSet {
    pub fn new(signature: Signature, patterns: Vec<Term>) -> Result<PatternSet, PatternSetError> {
        if patterns.is_empty() {
            return Err(PatternSetError::Empty);
        }
        let mut seen: HashMap<&Term, usize> = HashMap::new();
        for (index, p) in patterns.iter().enumerate() {
            if p.is_wildcard() {
                return Err(PatternSetError::BareWildcard { index });
            }
            if !p.is_well_formed(&signature) {
                return Err(PatternSetError::ForeignSymbol { index });
            }
            if let Some(&first) = seen.get(p) {
                return Err(PatternSetError::Duplicate { index, first });
            }
            seen.insert(p, index);
        }
        Ok(PatternSet {
            signature,
            patterns,
        })
    }

    /// Parses one pattern per non-blank line. Lines starting with `#` are
    /// comments. With `signature = None` the signature is inferred from the
    /// patterns; otherwise unknown symbols are errors.
    pub fn parse(text: &str, signature: Option<Signature>) -> Result<PatternSet, PatternSetError> {
        let extend = signature.is_none();
        let mut sig = signature.unwrap_or_default();
        let mut patterns = Vec::new();
        for (line, raw) in text.lines().enumerate() {
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let opts = ParseOptions {
                allow_wildcard: true,
                extend_signature: extend,
            };
            let t = parse_term(trimmed, &mut sig, opts)
                .map_err(|source| PatternSetError::Line {
                    line: line + 1,
                    source,
                })?;
            if t.is_wildcard() {
                return Err(PatternSetError::BareWildcard {
                    index: patterns.len(),
                });
            }
            patterns.push(t);
        }
        PatternSet::new(sig, patterns)
    }

    /// Parses pattern strings against an explicit signature.
    pub fn from_strs(signature: Signature, patterns: &[&str]) -> Result<PatternSet, PatternSetError> {
        let mut terms = Vec::with_capacity(patterns.len());
        for (index, s) in patterns.iter().enumerate() {
            let t = parse_term_in(s, &signature, ParseOptions::PATTERN)
                .map_err(|source| PatternSetError::Parse { index, source })?;
            terms.push(t);
        }
        PatternSet::new(signature, terms)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn patterns(&self) -> &[Term] {
        &self.patterns
    }

    pub fn pattern(&self, id: PatternId) -> &Term {
        &self.patterns[id.index()]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = PatternId> {
        (0..self.patterns.len() as u32).map(PatternId)
    }

    pub fn canonical(&self, id: PatternId) -> String {
        self.pattern(id).display(&self.signature).to_string()
    }

    /// Largest pattern depth.
    pub fn max_depth(&self) -> usize {
        self.patterns.iter().map(Term::depth).max().unwrap_or(0)
    }

    /// `D(𝓛)`: union of pattern domains, sorted and deduplicated.
    pub fn domain(&self) -> Vec<Position> {
        let mut all: Vec<Position> = self.patterns.iter().flat_map(Term::domain).collect();
        all.sort();
        all.dedup();
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_symbols([("f", 2), ("g", 1), ("a", 0)]).unwrap()
    }

    fn pat(s: &str) -> Term {
        parse_term_in(s, &sig(), ParseOptions::PATTERN).unwrap()
    }

    fn subj(s: &str) -> Term {
        parse_term_in(s, &sig(), ParseOptions::SUBJECT).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        let s = sig();
        let t = pat(" f( f(_, g(_)) , g( _ ) )");
        assert_eq!(t.display(&s).to_string(), "f(f(_,g(_)),g(_))");
        assert_eq!(subj("a"), Term::constant(SymbolId(2)));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let s = sig();
        let e = parse_term_in("f(a", &s, ParseOptions::SUBJECT).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { offset: 3, .. }), "{e:?}");
        let e = parse_term_in("f(a,h)", &s, ParseOptions::SUBJECT).unwrap_err();
        assert_eq!(
            e,
            ParseError::UnknownSymbol {
                name: "h".into(),
                offset: 4
            }
        );
        let e = parse_term_in("g(a,a)", &s, ParseOptions::SUBJECT).unwrap_err();
        assert!(matches!(e, ParseError::ArityMismatch { expected: 1, found: 2, offset: 0, .. }));
        let e = parse_term_in("g(_)", &s, ParseOptions::SUBJECT).unwrap_err();
        assert_eq!(e, ParseError::WildcardForbidden { offset: 2 });
        assert!(parse_term_in("a b", &s, ParseOptions::SUBJECT).is_err());
        assert!(parse_term_in("", &s, ParseOptions::SUBJECT).is_err());
    }

    #[test]
    fn parse_extends_signature() {
        let mut s = Signature::new();
        let opts = ParseOptions {
            allow_wildcard: true,
            extend_signature: true,
        };
        let t = parse_term("h(b, h(_, b))", &mut s, opts).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.arity(s.lookup("h").unwrap()), 2);
        assert_eq!(t.display(&s).to_string(), "h(b,h(_,b))");
        assert!(parse_term("h(b)", &mut s, opts).is_err());
    }

    #[test]
    fn subterms_and_domain() {
        let t = subj("f(f(a,f(a,a)),a)");
        let p = Position::from_slice(&[1, 2]);
        assert_eq!(t.subterm_at(&p).unwrap(), &subj("f(a,a)"));
        assert_eq!(t.subterm_at(&Position::root()).unwrap(), &t);
        assert!(subj("a").subterm_at(&Position::from_slice(&[1])).is_err());
        assert_eq!(subj("f(a,a)").domain().len(), 3);
        assert_eq!(subj("f(g(a),f(f(a,g(a)),g(a)))").domain().len(), 10);
        assert_eq!(subj("a").domain(), vec![Position::root()]);
        assert_eq!(pat("f(_,a)").size(), 3);
    }

    #[test]
    fn match_predicate() {
        let t = subj("f(f(a,f(a,a)),a)");
        assert!(matches(&pat("f(f(_,_),_)"), &t, &Position::root()));
        assert!(matches(&pat("f(_,f(_,_))"), &t, &Position::from_slice(&[1])));
        assert!(!matches(&pat("f(_,f(_,_))"), &t, &Position::root()));
        assert!(!matches(&pat("g(_)"), &subj("a"), &Position::root()));
        assert!(matches(&pat("a"), &subj("a"), &Position::root()));
    }

    #[test]
    fn signature_file() {
        let s = Signature::parse("# sig\nf/2\n g / 1 # unary\n\na/0\n").unwrap();
        assert_eq!(s, sig());
        assert_eq!(s.max_arity(), 2);
        assert!(Signature::parse("f/2\nf/1\n").is_err());
        assert!(matches!(
            Signature::parse("f\n"),
            Err(ParseError::Signature { line: 1, .. })
        ));
        assert_eq!(Signature::parse(&s.to_file_text()).unwrap(), s);
    }

    #[test]
    fn pattern_set_validation() {
        assert_eq!(PatternSet::parse("", None), Err(PatternSetError::Empty));
        assert!(matches!(
            PatternSet::parse("f(_,_)\n_\n", None),
            Err(PatternSetError::BareWildcard { index: 1 })
        ));
        assert!(matches!(
            PatternSet::parse("f(_,_)\nf( _ , _ )\n", None),
            Err(PatternSetError::Duplicate { index: 1, first: 0 })
        ));
        let ps = PatternSet::parse("f(f(_,_),_)\n# c\nf(_,f(_,_))\n", None).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.signature().len(), 1);
        assert_eq!(ps.canonical(PatternId(1)), "f(_,f(_,_))");
        assert!(matches!(
            PatternSet::parse("h(_)", Some(sig())),
            Err(PatternSetError::Line { line: 1, .. })
        ));
    }
}
