//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use setmatch::automaton::{derivative, State};
use setmatch::eval::{evaluation_tree, Match};
use setmatch::goal::{dependency_partition, Announcement, Goal, GoalSet, Obligation, SubpatternTable};
use setmatch::oracle::{brute_force_matches, random_instance, InstanceConfig, SignatureProfile};
use setmatch::position::{gcp, prefix_leq};
use setmatch::term::{parse_term_in, ParseOptions};
use setmatch::{evaluate, EvalOptions, LabelStrategy, PatternId, SetAutomaton, Strategy};

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("{what} took {elapsed:?}, limit {limit:?}")
    })
}

fn matches_of(report: &setmatch::MatchReport) -> Vec<(PatternId, setmatch::Position)> {
    report
        .matches
        .iter()
        .map(|Match { pattern, position }| (*pattern, position.clone()))
        .collect()
}

/// On every transition, each dependency class of each derivative
/// has a goal announced exactly at the class's gcp.
fn classes_have_gcp_goal(a: &SetAutomaton) -> Result<(), String> {
    for id in a.state_ids() {
        let state = a.state(id);
        for f in a.signature().ids() {
            let d = derivative(a.table(), state, f);
            for class in dependency_partition(d.goals()) {
                let g = gcp(class.iter().map(|g| &g.announcement.position)).unwrap();
                ensure(class.iter().any(|goal| goal.announcement.position == g), || {
                    format!("{id} on {}: no goal announced at {g}", a.signature().name(f))
                })?;
            }
        }
    }
    Ok(())
}

fn full_invariants(a: &SetAutomaton) -> Result<(), String> {
    a.check_invariants().map_err(|e| e.to_string())?;
    classes_have_gcp_goal(a)
}

fn c1_associativity() -> Verdict {
    let start = Instant::now();
    let ps = associativity();
    let a = compile(&ps, LabelStrategy::Rightmost);
    let t = subject(&ps, ASSOCIATIVITY_SUBJECT);
    let report = evaluate(&a, &t, &EvalOptions::default().instrumented()).map_err(|e| e.to_string())?;
    let expected = vec![(PatternId(0), pos("ε")), (PatternId(1), pos("1"))];
    ensure(matches_of(&report) == expected, || format!("matches {:?}", report.matches))?;
    let positions = count_positions(&t);
    ensure(positions == 7, || format!("|D(t)| = {positions}"))?;
    let mut domain = t.domain();
    domain.sort();
    ensure(report.inspected == domain && report.inspections_unique(), || {
        format!("inspected {:?}", report.inspected)
    })?;
    within(start.elapsed(), Duration::from_secs(1), "end-to-end run")?;
    Ok(format!("{{ℓ1@ε, ℓ2@1}}, 7 inspections, {:?}", start.elapsed()))
}

fn c2_running_example() -> Verdict {
    let ps = running_example();
    let a = compile(&ps, LabelStrategy::Rightmost);
    let table: &SubpatternTable = a.table();
    let sub = |s: &str| {
        table
            .lookup(&parse_term_in(s, ps.signature(), ParseOptions::PATTERN).unwrap())
            .unwrap()
    };
    let l = PatternId(0);
    let root = |pairs: &[(&str, &str)], at: &str| {
        Goal::new(
            Obligation::new(pairs.iter().map(|(s, p)| (pos(p), sub(s))).collect()),
            Announcement::new(l, pos(at)),
        )
    };
    let fresh = |p: &str| Goal::fresh(table, l, pos(p));
    let expected: BTreeSet<(GoalSet, setmatch::Position)> = [
        (vec![fresh("ε")], "ε"),
        (
            vec![root(&[("f(_,g(_))", "1"), ("g(_)", "2")], "ε"), fresh("1"), fresh("2")],
            "2",
        ),
        (vec![fresh("1"), root(&[("f(_,g(_))", "1")], "ε")], "1"),
        (
            vec![
                root(&[("g(_)", "1.2")], "ε"),
                root(&[("f(_,g(_))", "1.1"), ("g(_)", "1.2")], "1"),
                fresh("1.1"),
                fresh("1.2"),
            ],
            "1.2",
        ),
    ]
    .into_iter()
    .map(|(goals, label)| (GoalSet::new(goals), pos(label)))
    .collect();
    let actual: BTreeSet<(GoalSet, setmatch::Position)> = a
        .states()
        .iter()
        .map(|State { goals, label }| (goals.clone(), label.clone()))
        .collect();
    ensure(a.state_count() == 4, || format!("{} states", a.state_count()))?;
    ensure(actual == expected, || "state sets differ up to renaming".into())?;

    let g = ps.signature().lookup("g").unwrap();
    let s3 = a
        .state_ids()
        .find(|&s| *a.label(s) == pos("1.2"))
        .ok_or("no state labelled 1.2")?;
    let out = &a.transition(s3, g).outputs;
    ensure(*out == vec![Announcement::new(l, pos("ε"))], || format!("out(s3,g) = {out:?}"))?;
    let s1_goals = &expected.iter().find(|(_, lab)| *lab == pos("2")).unwrap().0;
    let s1 = a
        .state_ids()
        .find(|&s| a.state(s).goals == *s1_goals)
        .ok_or("no state matching s1")?;
    let shifts: BTreeSet<_> = a.transition(s1, g).targets.iter().map(|t| t.shift.clone()).collect();
    ensure(shifts == BTreeSet::from([pos("ε"), pos("2.1")]), || format!("shifts {shifts:?}"))?;
    Ok("4 states equal to s0..s3 up to renaming; out(s3,g)={ℓ@ε}; δ(s1,g) shifts {ε, 2.1}".into())
}

fn c3_bijection() -> Verdict {
    let ps = running_example();
    let a = compile(&ps, LabelStrategy::Rightmost);
    let t = subject(&ps, RUNNING_SUBJECT);
    let tree = evaluation_tree(&a, &t).map_err(|e| e.to_string())?;
    let positions = count_positions(&t);
    // The literal count: ε,1,1.1,2,2.1,2.1.1,2.1.2,2.1.2.1,2.2,2.2.1.
    ensure(positions == 10, || format!("|D(t)| = {positions}"))?;
    ensure(tree.len() == positions, || format!("{} tree nodes", tree.len()))?;
    let image: BTreeSet<_> = tree.phi_image().into_iter().collect();
    let domain: BTreeSet<_> = t.domain().into_iter().collect();
    ensure(image.len() == tree.len(), || "φ is not injective".into())?;
    ensure(image == domain, || "φ is not onto D(t)".into())?;
    let oracle = brute_force_matches(&ps, &t);
    ensure(oracle == vec![(PatternId(0), pos("2"))], || format!("oracle {oracle:?}"))?;
    let report = evaluate(&a, &t, &EvalOptions::default()).map_err(|e| e.to_string())?;
    ensure(matches_of(&report) == oracle, || format!("automaton {:?}", report.matches))?;
    Ok(format!("{} nodes = |D(t)|, φ bijective, matches {{ℓ@2}}", tree.len()))
}

fn c4_size_laws() -> Verdict {
    let start = Instant::now();
    // Calibration: t_2 under rightmost labels is the running example, whose
    // figure shows four states besides the final one.
    let calib = compile(&setmatch::cli::tn_family(2), LabelStrategy::Rightmost).state_count();
    ensure(calib == 4, || format!("t_2 rightmost has {calib} states, expected 4 (final state excluded)"))?;
    let mut table = Vec::new();
    for n in 1..=8usize {
        let ps = setmatch::cli::tn_family(n);
        let right = compile(&ps, LabelStrategy::Rightmost);
        let left = compile(&ps, LabelStrategy::Leftmost);
        ensure(right.state_count() == 2 * n, || {
            format!("n={n}: rightmost {} != {}", right.state_count(), 2 * n)
        })?;
        ensure(left.state_count() == n * n + n, || {
            format!("n={n}: leftmost {} != {}", left.state_count(), n * n + n)
        })?;
        full_invariants(&right)?;
        full_invariants(&left)?;
        table.push(format!("{n}:{}/{}", right.state_count(), left.state_count()));
    }
    within(start.elapsed(), Duration::from_secs(10), "size-law builds")?;
    Ok(format!("rightmost 2n, leftmost n²+n for n=1..8 [{}]", table.join(" ")))
}

#[derive(Default)]
struct CorpusStats {
    instances: usize,
    matches: usize,
    oracle_mismatches: Vec<String>,
    inspection_failures: Vec<String>,
    strategy_mismatches: Vec<String>,
    invariant_failures: Vec<String>,
    states: usize,
    elapsed: Duration,
}

const CORPUS_SIZE: u64 = 10_000;

fn corpus_config(seed: u64) -> InstanceConfig {
    InstanceConfig {
        profile: if seed.is_multiple_of(2) {
            SignatureProfile::small()
        } else {
            SignatureProfile::mixed()
        },
        pattern_count: 1 + (seed % 8) as usize,
        pattern_depth: 1 + ((seed / 8) % 4) as usize,
        subject_size: 200,
        ..InstanceConfig::default()
    }
}

fn corpus() -> &'static CorpusStats {
    static STATS: OnceLock<CorpusStats> = OnceLock::new();
    STATS.get_or_init(|| {
        let start = Instant::now();
        let mut stats = CorpusStats::default();
        for seed in 0..CORPUS_SIZE {
            let (ps, t) = random_instance(seed, &corpus_config(seed));
            assert!(ps.len() <= 8 && ps.max_depth() <= 4 && t.size() <= 200);
            let strategy = if seed % 3 == 0 {
                LabelStrategy::Leftmost
            } else {
                LabelStrategy::Rightmost
            };
            let a = compile(&ps, strategy);
            stats.instances += 1;
            stats.states += a.state_count();
            if let Err(e) = full_invariants(&a) {
                stats.invariant_failures.push(format!("seed {seed}: {e}"));
            }
            let oracle = brute_force_matches(&ps, &t);
            stats.matches += oracle.len();
            let mut domain = t.domain();
            domain.sort();
            let mut reference = None;
            for strategy in [
                Strategy::DepthFirst,
                Strategy::BreadthFirst,
                Strategy::Parallel(2),
                Strategy::Parallel(4),
                Strategy::Parallel(8),
            ] {
                let report = evaluate(&a, &t, &EvalOptions::new(strategy).instrumented())
                    .expect("evaluation succeeds on valid subjects");
                let found = matches_of(&report);
                if found != oracle {
                    stats
                        .oracle_mismatches
                        .push(format!("seed {seed} {strategy:?}"));
                }
                if report.inspected != domain
                    || !report.inspections_unique()
                    || report.node_count != domain.len()
                {
                    stats
                        .inspection_failures
                        .push(format!("seed {seed} {strategy:?}"));
                }
                match &reference {
                    None => reference = Some(found),
                    Some(r) if *r != found => stats
                        .strategy_mismatches
                        .push(format!("seed {seed} {strategy:?}")),
                    Some(_) => {}
                }
            }
        }
        stats.elapsed = start.elapsed();
        stats
    })
}

fn failures(list: &[String]) -> String {
    let shown: Vec<_> = list.iter().take(5).cloned().collect();
    format!("{} failures, e.g. {}", list.len(), shown.join("; "))
}

fn c5_oracle_equivalence() -> Verdict {
    let s = corpus();
    ensure(s.instances as u64 >= CORPUS_SIZE, || "corpus too small".into())?;
    ensure(s.oracle_mismatches.is_empty(), || failures(&s.oracle_mismatches))?;
    within(s.elapsed, Duration::from_secs(120), "corpus run")?;
    Ok(format!(
        "{} instances, {} matches, 0 mismatches across 5 strategies, {:?}",
        s.instances, s.matches, s.elapsed
    ))
}

fn c6_exactly_once() -> Verdict {
    let s = corpus();
    ensure(s.inspection_failures.is_empty(), || failures(&s.inspection_failures))?;
    Ok(format!("{} instances × 5 strategies: inspected = D(t) once each, work items = |D(t)|", s.instances))
}

fn c7_strategy_independence() -> Verdict {
    let s = corpus();
    ensure(s.strategy_mismatches.is_empty(), || failures(&s.strategy_mismatches))?;
    Ok("DepthFirst = BreadthFirst = Parallel(2,4,8) on every instance".into())
}

fn c8_state_invariants() -> Verdict {
    let mut checked = 0;
    for strategy in [LabelStrategy::Rightmost, LabelStrategy::Leftmost] {
        for ps in [associativity(), running_example()] {
            let a = compile(&ps, strategy);
            full_invariants(&a)?;
            checked += a.state_count();
        }
        for n in 1..=8 {
            let a = compile(&setmatch::cli::tn_family(n), strategy);
            full_invariants(&a)?;
            checked += a.state_count();
        }
    }
    let s = corpus();
    ensure(s.invariant_failures.is_empty(), || failures(&s.invariant_failures))?;
    checked += s.states;
    Ok(format!("{checked} states: root goal, incomparable positions, fresh goals, pos ⊆ R, gcp goal per class"))
}

fn random_position(rng: &mut ChaCha8Rng) -> setmatch::Position {
    let len = rng.random_range(0..5);
    setmatch::Position::new((0..len).map(|_| rng.random_range(1..=3)).collect()).unwrap()
}

fn c9_lattice_laws() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let checks = 100_000;
    for k in 0..checks {
        let (p, q, r) = (
            random_position(&mut rng),
            random_position(&mut rng),
            random_position(&mut rng),
        );
        let fail = |law: &str| format!("check {k}: {law} fails for p={p}, q={q}, r={r}");
        ensure(prefix_leq(&p, &p), || fail("reflexivity"))?;
        if prefix_leq(&p, &q) && prefix_leq(&q, &r) {
            ensure(prefix_leq(&p, &r), || fail("transitivity"))?;
        }
        if prefix_leq(&p, &q) && prefix_leq(&q, &p) {
            ensure(p == q, || fail("antisymmetry"))?;
        }
        ensure(
            prefix_leq(&p.concat(&q), &p.concat(&r)) == prefix_leq(&q, &r),
            || fail("p.q ≤ p.r ⇔ q ≤ r"),
        )?;
        let i = rng.random_range(1..=3);
        ensure(!prefix_leq(&p, &p.child(i)), || fail("p ≰ p.i"))?;
        if prefix_leq(&p, &q) && prefix_leq(&p, &r) {
            ensure(q.comparable(&r), || fail("common lower bound implies comparable"))?;
        }
        if p.comparable(&q) {
            let j = p.join(&q);
            ensure(j == p || j == q, || fail("join of comparable positions"))?;
        }
        let ps: Vec<_> = (0..rng.random_range(1..4)).map(|_| random_position(&mut rng)).collect();
        let qs: Vec<_> = (0..rng.random_range(1..4)).map(|_| random_position(&mut rng)).collect();
        let union: Vec<_> = ps.iter().chain(&qs).cloned().collect();
        ensure(
            gcp(&union).unwrap() == gcp(&ps).unwrap().join(&gcp(&qs).unwrap()),
            || fail("gcp(P∪Q) = gcp(P) ∨ gcp(Q)"),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(5), "lattice checks")?;
    Ok(format!("{checks} randomized checks, 0 failures, {:?}", start.elapsed()))
}

fn time_per_run(a: &SetAutomaton, t: &setmatch::Term, options: &EvalOptions) -> f64 {
    // Repeat small inputs until the total is long enough to time reliably;
    // take the best of three batches.
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let mut runs = 0u32;
        let start = Instant::now();
        while runs == 0 || start.elapsed() < Duration::from_millis(30) {
            evaluate(a, t, options).unwrap();
            runs += 1;
        }
        best = best.min(start.elapsed().as_secs_f64() / runs as f64);
    }
    best
}

fn c10_complexity() -> Verdict {
    let ps = setmatch::PatternSet::from_strs(
        setmatch::Signature::parse("f/2\ng/1\na/0\n").unwrap(),
        &["f(f(_,_),_)", "f(_,f(_,_))", "f(f(_,g(_)),g(_))", "f(a,a)"],
    )
    .unwrap();
    let a = compile(&ps, LabelStrategy::Rightmost);
    let depth = ps.max_depth() as f64;
    let mut points = Vec::new();
    for height in [9u32, 12, 15, 19] {
        let t = balanced(&ps, height);
        let n = count_positions(&t);
        let report = evaluate(&a, &t, &EvalOptions::default().instrumented().cached()).unwrap();
        ensure(report.count_inspections() == n && report.node_count == n, || {
            format!("size {n}: {} inspections", report.count_inspections())
        })?;
        ensure(report.inspections_unique(), || format!("size {n}: repeated inspection"))?;
        let secs = time_per_run(&a, &t, &EvalOptions::default().cached());
        points.push((n as f64, secs));
    }
    // Least-squares slope through the origin for time ≈ c·d·n.
    let num: f64 = points.iter().map(|(n, t)| n * depth * t).sum();
    let den: f64 = points.iter().map(|(n, _)| (n * depth).powi(2)).sum();
    let c = num / den;
    let mut report = Vec::new();
    for (n, t) in &points {
        let predicted = c * depth * n;
        ensure(*t <= 3.0 * predicted, || {
            format!("size {n}: {t:.2e}s exceeds 3× linear fit {predicted:.2e}s")
        })?;
        report.push(format!("{n}:{:.2}×", t / predicted));
    }
    Ok(format!("inspections exact for 1023..1048575 nodes; time/fit [{}]", report.join(" ")))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "associativity end-to-end", c1_associativity),
        (2, "running example reconstruction", c2_running_example),
        (3, "evaluation-tree bijection", c3_bijection),
        (4, "t_n size laws", c4_size_laws),
        (5, "oracle equivalence", c5_oracle_equivalence),
        (6, "exactly-once inspection", c6_exactly_once),
        (7, "strategy independence", c7_strategy_independence),
        (8, "state invariants", c8_state_invariants),
        (9, "position lattice laws", c9_lattice_laws),
        (10, "complexity smoke test", c10_complexity),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_owned()));
        match verdict {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
