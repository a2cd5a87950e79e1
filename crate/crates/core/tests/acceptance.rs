//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Seeds, case counts and time limits are fixed below.

use num_traits::{One, Zero};
use posskb::classical::{ClassicalStatement, Oracle, PropFormula, PropositionalOracle};
use posskb::concept::{parse_concept, Assertion, Axiom, Concept};
use posskb::fuzz::{self, ceil_log2};
use posskb::kb::{parse_kb, parse_query};
use posskb::oracle::{canonical_distribution_over, measure_necessity, resolution_incons};
use posskb::possibilistic::{
    entails_weighted, inconsistency_degree, max_necessity, max_possibility, necessity_cut, weight_geq,
    InconsDegree, Mode, PossFormula, PossKb, Weight,
};
use posskb::rational::Rational;
use posskb::tableau::{Reasoner, Stats};
use std::path::Path;
use std::time::{Duration, Instant};

const SEED_NECESSITY: u64 = 0x5eed_0005;
const SEED_RESOLUTION: u64 = 0x5eed_0006;
const SEED_ROUND_TRIP: u64 = 0x5eed_0007;

const NECESSITY_KBS: usize = 500;
const QUERIES_PER_KB: usize = 5;
const RESOLUTION_KBS: usize = 500;
const ROUND_TRIP_KBS: usize = 200;
const ROUND_TRIP_QUERIES: usize = 3;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn load(name: &str) -> PossKb {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("kb").join(name);
    parse_kb(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn statement(text: &str) -> ClassicalStatement {
    parse_query(text).unwrap().statement
}

fn weighted(text: &str) -> PossFormula {
    parse_query(text).unwrap().weighted().unwrap()
}

type Outcome = Result<String, String>;

fn expect(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn timed(limit: Duration, check: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(_) if elapsed >= limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
        other => other,
    };
    (outcome, elapsed)
}

fn worked_example() -> Outcome {
    let kb = load("worked_example.kb");
    let o = PropositionalOracle;
    expect(entails_weighted(&o, &kb, &weighted("formula r @ P 0.7")).unwrap().value, "(r, P0.7) not entailed")?;
    expect(entails_weighted(&o, &kb, &weighted("formula q @ N 0.4")).unwrap().value, "(q, N0.4) not entailed")?;
    let maxpi = max_possibility(&o, &kb, &statement("formula r")).unwrap().value;
    expect(maxpi == r(7, 10), format!("maxpi r = {maxpi}"))?;
    let maxn = max_necessity(&o, &kb, &statement("formula q")).unwrap().value;
    expect(maxn == r(2, 5), format!("maxn q = {maxn}"))?;
    Ok("maxpi r = 7/10, maxn q = 2/5".into())
}

fn inconsistency(name: &str, expected: InconsDegree) -> Outcome {
    let got = inconsistency_degree(&PropositionalOracle, &load(name)).unwrap().value;
    expect(got == expected, format!("{name}: {got}, expected {expected}"))?;
    Ok(format!("{name}: {got}"))
}

/// `tbox`, `abox` of the positive-necessity part of a DL knowledge base.
fn split(kb: &PossKb) -> (Vec<Axiom>, Vec<Assertion>) {
    let (mut tbox, mut abox) = (Vec::new(), Vec::new());
    for s in necessity_cut(kb, Rational::zero(), true).statements() {
        match s {
            ClassicalStatement::DlAxiom(a) => tbox.push(a.clone()),
            ClassicalStatement::DlAssertion(a) => abox.push(a.clone()),
            ClassicalStatement::Prop(_) => unreachable!("dl knowledge base"),
        }
    }
    (tbox, abox)
}

fn successful_father() -> Outcome {
    let o = Oracle::default();
    let certain = load("successful_father.kb");
    let q = weighted("assert John : successful_father @ N 1");
    expect(entails_weighted(&o, &certain, &q).unwrap().value, "(John : successful_father, N1) not entailed")?;

    // Refuting the query must merge the generated child into a named one.
    let (tbox, mut abox) = split(&certain);
    abox.push(Assertion::member("John", Concept::not(Concept::prim("successful_father"))));
    let v = Reasoner::default().check_consistency(&tbox, &abox).unwrap();
    let Stats { merges, named_merges, .. } = v.stats;
    expect(!v.consistent && merges > 0 && named_merges == 0, format!("refutation stats {:?}", v.stats))?;

    let likely = load("likely_graduate.kb");
    let maxn = max_necessity(&o, &likely, &statement("assert John : successful_father")).unwrap().value;
    expect(maxn == r(4, 5), format!("maxn = {maxn}"))?;
    Ok(format!("maxn = 4/5, {merges} merge(s), no named merges"))
}

fn golfer() -> Outcome {
    let o = Oracle::default();
    let kb = load("golfer.kb");
    expect(entails_weighted(&o, &kb, &weighted("assert Tom : golfer @ P 0.7")).unwrap().value, "P0.7 not entailed")?;
    expect(!entails_weighted(&o, &kb, &weighted("assert Tom : golfer @ P 0.8")).unwrap().value, "P0.8 entailed")?;
    Ok("P0.7 entailed, P0.8 not".into())
}

/// `(levels, calls)` of every `max_necessity` run, for the call bound.
type CallLog = Vec<(usize, usize, bool)>;

fn necessity_equivalence(log: &mut CallLog) -> Outcome {
    let mut g = fuzz::rng(SEED_NECESSITY);
    let mut discrepancies = Vec::new();
    for case in 0..NECESSITY_KBS {
        let (phi, atoms) = fuzz::necessity_kb(&mut g);
        let vocabulary = atoms.iter().map(|a| a.to_string()).collect();
        let pi = canonical_distribution_over(&phi, &vocabulary).unwrap();
        let levels = phi.necessity_levels().len();
        for _ in 0..QUERIES_PER_KB {
            let p = fuzz::formula(&mut g, &atoms, 2);
            let semantic = measure_necessity(&pi, &p).unwrap();
            let a = max_necessity(&PropositionalOracle, &phi, &p.clone().into()).unwrap();
            log.push((levels, a.oracle_calls, a.value == Rational::one()));
            if semantic != a.value {
                discrepancies.push(format!("case {case}, {p}: semantic {semantic}, computed {}", a.value));
            }
        }
    }
    expect(discrepancies.is_empty(), format!("{} discrepancies, first: {}", discrepancies.len(), discrepancies.join("; ")))?;
    Ok(format!("{} queries, 0 discrepancies", NECESSITY_KBS * QUERIES_PER_KB))
}

fn resolution_equivalence() -> Outcome {
    let mut g = fuzz::rng(SEED_RESOLUTION);
    let (mut discrepancies, mut inconsistent) = (Vec::new(), 0);
    for case in 0..RESOLUTION_KBS {
        let clauses = fuzz::clause_kb(&mut g);
        let derived = resolution_incons(&clauses);
        let computed = inconsistency_degree(&PropositionalOracle, &fuzz::clauses_as_kb(&clauses)).unwrap().value;
        if derived != computed {
            discrepancies.push(format!("case {case}: resolution {derived}, cuts {computed}"));
        }
        inconsistent += usize::from(computed != InconsDegree::CompletelyConsistent);
    }
    expect(discrepancies.is_empty(), format!("{} discrepancies: {}", discrepancies.len(), discrepancies.join("; ")))?;
    Ok(format!("{RESOLUTION_KBS} clause sets ({inconsistent} inconsistent), 0 discrepancies"))
}

fn round_trip() -> Outcome {
    let o = PropositionalOracle;
    let mut g = fuzz::rng(SEED_ROUND_TRIP);
    let (mut checks, mut discrepancies) = (0, Vec::new());
    for case in 0..ROUND_TRIP_KBS {
        let (phi, atoms) = fuzz::mixed_kb(&mut g);
        for _ in 0..ROUND_TRIP_QUERIES {
            let p = fuzz::formula(&mut g, &atoms, 2);
            let mut extended = phi.clone();
            extended.push(PossFormula::new(PropFormula::not(p.clone()), Weight::necessity(Rational::one()).unwrap())).unwrap();
            let incons = inconsistency_degree(&o, &extended).unwrap().value;
            for alpha in fuzz::sample_degrees(&phi) {
                for mode in [Mode::Necessity, Mode::Possibility] {
                    let w = Weight::new(mode, alpha).unwrap();
                    let entailed = entails_weighted(&o, &phi, &PossFormula::new(p.clone(), w)).unwrap().value;
                    checks += 1;
                    if entailed != weight_geq(incons, w.into()) {
                        discrepancies.push(format!("case {case}: {p} @ {w}: entailed {entailed}, Incons {incons}"));
                    }
                }
            }
        }
    }
    expect(discrepancies.is_empty(), format!("{} discrepancies: {}", discrepancies.len(), discrepancies.join("; ")))?;
    Ok(format!("{checks} weighted queries, 0 discrepancies"))
}

fn call_bound(log: &CallLog) -> Outcome {
    let over: Vec<_> = log.iter().filter(|(l, calls, _)| *calls > ceil_log2(*l) as usize + 1).collect();
    let worst = log.iter().map(|(l, c, _)| *c as i64 - (ceil_log2(*l) as i64 + 1)).max().unwrap_or(0);
    if over.is_empty() {
        return Ok(format!("{} runs within ⌈log₂ L⌉ + 1 calls", log.len()));
    }
    let single_level = over.iter().all(|(l, calls, _)| *l == 1 && *calls == 2);
    let tautologies = over.iter().filter(|(_, _, one)| *one).count();
    Err(format!(
        "{} of {} runs exceed ⌈log₂ L⌉ + 1 by at most {worst}; single-level KBs only: {single_level}; \
         {tautologies} of them answer 1 (tautologies)",
        over.len(),
        log.len()
    ))
}

fn tableau_rules() -> Outcome {
    let reasoner = Reasoner::default();
    let c = |s: &str| parse_concept(s).unwrap();
    let ax = |l: &str, rr: &str| Axiom::new(c(l), c(rr));
    let cases: Vec<(&str, Vec<Axiom>, Vec<Assertion>, bool)> = vec![
        ("and", vec![], vec![Assertion::member("a", c("(and A (not A))"))], false),
        ("or", vec![], vec![Assertion::member("a", c("(and (or A B) (and (not A) (not B)))"))], false),
        ("or, satisfiable", vec![], vec![Assertion::member("a", c("(and (or A B) (not A))"))], true),
        ("some", vec![], vec![Assertion::member("a", c("(and (some R A) (all R (not A)))"))], false),
        (
            "all",
            vec![],
            vec![Assertion::related("a", "b", "R"), Assertion::member("a", c("(all R A)")), Assertion::member("b", c("(not A)"))],
            false,
        ),
        ("atleast", vec![], vec![Assertion::member("a", c("(and (atleast 3 R) (atmost 2 R))"))], false),
        ("atmost, merging", vec![], vec![Assertion::member("a", c("(and (some R A) (some R B) (atmost 1 R) (all R (or (not A) (not B))))"))], false),
        (
            "atmost, unique names",
            vec![],
            vec![Assertion::related("a", "b", "R"), Assertion::related("a", "c", "R"), Assertion::member("a", c("(atmost 1 R)"))],
            false,
        ),
        ("tbox", vec![ax("A", "B")], vec![Assertion::member("a", c("(and A (not B))"))], false),
        ("blocking", vec![ax("A", "(some R A)")], vec![Assertion::member("a", c("A"))], true),
    ];
    let mut failures = Vec::new();
    for (name, tbox, abox, consistent) in &cases {
        match reasoner.check_consistency(tbox, abox) {
            Ok(v) if v.consistent == *consistent => {}
            Ok(v) => failures.push(format!("{name}: consistent = {}", v.consistent)),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    expect(failures.is_empty(), failures.join("; "))?;
    Ok(format!("{} rule cases under the default resource cap", cases.len()))
}

fn main() {
    let secs = Duration::from_secs;
    let mut log = CallLog::new();
    let mut results: Vec<(&str, (Outcome, Duration))> = Vec::new();

    results.push(("1 worked example", timed(secs(1), worked_example)));
    for (name, expected) in [
        ("necessary_conflict.kb", InconsDegree::NecessarilyIncons(r(2, 5))),
        ("possible_conflict.kb", InconsDegree::PossiblyIncons(r(3, 5))),
        ("tolerated_conflict.kb", InconsDegree::CompletelyConsistent),
    ] {
        results.push(("2 inconsistency degree", timed(secs(1), || inconsistency(name, expected))));
    }
    results.push(("3 successful father", timed(secs(5), successful_father)));
    results.push(("4 golfer", timed(secs(5), golfer)));
    results.push(("5 canonical necessity = max_necessity", timed(secs(60), || necessity_equivalence(&mut log))));
    results.push(("6 resolution = inconsistency degree", timed(secs(120), resolution_equivalence)));
    results.push(("7 weighted entailment round trip", timed(secs(120), round_trip)));
    results.push(("8 max_necessity call bound", timed(Duration::MAX, || call_bound(&log))));
    results.push(("9 tableau rules and blocking", timed(Duration::MAX, tableau_rules)));

    let mut failed = 0;
    for (name, (outcome, elapsed)) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name:<40} {elapsed:>10.2?}  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<40} {elapsed:>10.2?}  {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
