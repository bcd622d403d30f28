//! Brute-force ground truth and random instance generation.
//!
//! The matcher here tries every pattern at every subject position and checks
//! every pattern symbol by walking down from the subject root. It shares no
//! code with the automaton beyond the term primitives.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::position::Position;
use crate::term::{matches, PatternId, PatternSet, Signature, SymbolId, Term};

/// `{(ℓ, p) | p ∈ D(t), ℓ matches t at p}`, sorted by pattern then position.
pub fn brute_force_matches(patterns: &PatternSet, subject: &Term) -> Vec<(PatternId, Position)> {
    let domain = subject.domain();
    let mut out = Vec::new();
    for id in patterns.ids() {
        let pattern = patterns.pattern(id);
        for p in &domain {
            if matches(pattern, subject, p) {
                out.push((id, p.clone()));
            }
        }
    }
    out.sort();
    out
}

/// Number of subject symbols the brute-force matcher reads: one per
/// non-wildcard pattern node per attempt, stopping at the first mismatch.
pub fn brute_force_inspections(patterns: &PatternSet, subject: &Term) -> usize {
    fn go(pattern: &Term, subject: &Term, count: &mut usize) -> bool {
        match pattern {
            Term::Wildcard => true,
            Term::App(f, args) => {
                *count += 1;
                subject.head() == Some(*f)
                    && args
                        .iter()
                        .zip(subject.args())
                        .all(|(pa, sa)| go(pa, sa, count))
            }
        }
    }
    let mut count = 0;
    for p in subject.domain() {
        let node = subject.subterm_at(&p).expect("domain positions are valid");
        for pattern in patterns.patterns() {
            go(pattern, node, &mut count);
        }
    }
    count
}

/// Number of symbols of each arity: `arities[k]` symbols of arity `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureProfile {
    pub arities: Vec<usize>,
}

const CONSTANT_NAMES: &[&str] = &["a", "b", "c", "d", "e"];
const FUNCTION_NAMES: &[&str] = &["f", "g", "h", "k", "m", "n", "r", "s"];

impl SignatureProfile {
    pub fn new(arities: Vec<usize>) -> SignatureProfile {
        SignatureProfile { arities }
    }

    /// `a, b / g / f`.
    pub fn small() -> SignatureProfile {
        SignatureProfile::new(vec![2, 1, 1])
    }

    /// Two constants, two unary, two binary and one ternary symbol.
    pub fn mixed() -> SignatureProfile {
        SignatureProfile::new(vec![2, 2, 2, 1])
    }

    /// Non-constant symbols are listed before constants, each group by
    /// increasing arity.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        let mut functions = 0;
        for (arity, &count) in self.arities.iter().enumerate().skip(1) {
            for _ in 0..count {
                let name = FUNCTION_NAMES
                    .get(functions)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("f{functions}"));
                sig.declare(&name, arity).expect("generated names are unique");
                functions += 1;
            }
        }
        for k in 0..self.arities.first().copied().unwrap_or(0) {
            let name = CONSTANT_NAMES
                .get(k)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("c{k}"));
            sig.declare(&name, 0).expect("generated names are unique");
        }
        sig
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceConfig {
    pub profile: SignatureProfile,
    pub pattern_count: usize,
    /// Maximal pattern depth in symbol levels; 1 gives flat `f(_, …, _)`.
    pub pattern_depth: usize,
    /// Upper bound on subject size.
    pub subject_size: usize,
    /// Probability that a non-root pattern argument is a wildcard.
    pub wildcard_density: f64,
    /// Probability of planting a pattern instance at a subject node.
    pub plant_rate: f64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            profile: SignatureProfile::small(),
            pattern_count: 3,
            pattern_depth: 3,
            subject_size: 50,
            wildcard_density: 0.4,
            plant_rate: 0.15,
        }
    }
}

struct Generator<'a> {
    rng: ChaCha8Rng,
    sig: &'a Signature,
    config: &'a InstanceConfig,
    constants: Vec<SymbolId>,
    functions: Vec<SymbolId>,
}

impl Generator<'_> {
    fn pattern(&mut self, depth: usize) -> Term {
        let f = *self.sig_ids().choose(&mut self.rng).expect("signature is non-empty");
        let arity = self.sig.arity(f);
        let args = (0..arity)
            .map(|_| {
                if depth <= 1 || self.rng.random_bool(self.config.wildcard_density) {
                    Term::Wildcard
                } else {
                    let d = self.rng.random_range(1..depth);
                    self.pattern(d)
                }
            })
            .collect();
        Term::App(f, args)
    }

    fn sig_ids(&self) -> Vec<SymbolId> {
        self.sig.ids().collect()
    }

    fn subject(&mut self, budget: usize, planted: &[Term]) -> Term {
        if budget > 1 && !planted.is_empty() && self.rng.random_bool(self.config.plant_rate) {
            let p = planted.choose(&mut self.rng).unwrap().clone();
            let holes = count_wildcards(&p);
            let fixed = p.size() - holes;
            if fixed + holes <= budget {
                let spare = budget - fixed;
                let shares = self.split(spare, holes);
                let mut shares = shares.into_iter();
                return self.fill(&p, &mut shares, planted);
            }
        }
        let fits: Vec<SymbolId> = self
            .functions
            .iter()
            .copied()
            .filter(|&f| self.sig.arity(f) < budget)
            .collect();
        if fits.is_empty() || self.rng.random_bool(0.1) {
            let c = *self.constants.choose(&mut self.rng).expect("profile has constants");
            return Term::constant(c);
        }
        let f = *fits.choose(&mut self.rng).unwrap();
        let shares = self.split(budget - 1, self.sig.arity(f));
        let args = shares.into_iter().map(|b| self.subject(b, planted)).collect();
        Term::App(f, args)
    }

    fn fill(&mut self, p: &Term, shares: &mut impl Iterator<Item = usize>, planted: &[Term]) -> Term {
        match p {
            Term::Wildcard => {
                let b = shares.next().unwrap_or(1);
                self.subject(b, planted)
            }
            Term::App(f, args) => {
                Term::App(*f, args.iter().map(|a| self.fill(a, shares, planted)).collect())
            }
        }
    }

    /// Splits `total` into `parts` shares of at least 1 each (`total ≥ parts`).
    fn split(&mut self, total: usize, parts: usize) -> Vec<usize> {
        if parts == 0 {
            return Vec::new();
        }
        let mut shares = vec![1; parts];
        for _ in 0..total.saturating_sub(parts) {
            let k = self.rng.random_range(0..parts);
            shares[k] += 1;
        }
        shares
    }
}

fn count_wildcards(t: &Term) -> usize {
    match t {
        Term::Wildcard => 1,
        Term::App(_, args) => args.iter().map(count_wildcards).sum(),
    }
}

/// A reproducible random pattern set and closed subject over the profile's
/// signature. Duplicate patterns are discarded, so the set may be smaller
/// than requested (never empty).
pub fn random_instance(seed: u64, config: &InstanceConfig) -> (PatternSet, Term) {
    let sig = config.profile.signature();
    assert!(
        config.profile.arities.first().copied().unwrap_or(0) > 0,
        "signature profile needs at least one constant"
    );
    let constants = sig.ids().filter(|&f| sig.arity(f) == 0).collect();
    let functions = sig.ids().filter(|&f| sig.arity(f) > 0).collect();
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(seed),
        sig: &sig,
        config,
        constants,
        functions,
    };
    let mut patterns: Vec<Term> = Vec::new();
    let wanted = config.pattern_count.max(1);
    let mut attempts = 0;
    while patterns.len() < wanted && attempts < wanted * 20 {
        attempts += 1;
        let depth = g.rng.random_range(1..=config.pattern_depth.max(1));
        let p = g.pattern(depth);
        if !patterns.contains(&p) {
            patterns.push(p);
        }
    }
    let subject = g.subject(config.subject_size.max(1), &patterns);
    let set = PatternSet::new(sig.clone(), patterns).expect("generated patterns are valid");
    (set, subject)
}
