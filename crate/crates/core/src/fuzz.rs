//! Seeded generators for small propositional knowledge bases, and the
//! cross-checks that compare the cut-based algorithms with the semantic
//! reference in [`crate::oracle`].

use crate::classical::{Dialect, EntailmentOracle, PropFormula, PropositionalOracle};
use crate::oracle::{canonical_distribution_over, measure_necessity, resolution_incons, PossClause};
use crate::possibilistic::{
    inconsistency_degree, max_necessity, Mode, PossError, PossFormula, PossKb, Weight,
};
use crate::rational::Rational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub const ATOMS: [&str; 4] = ["p", "q", "r", "s"];
pub const MAX_FORMULAS: usize = 6;
pub const GRID: i64 = 10;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A degree `k/10` with `k` in `1..=10`.
pub fn grid_degree(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(1..=GRID), GRID)
}

/// A formula over `atoms` with connective depth at most `depth`.
pub fn formula(rng: &mut impl Rng, atoms: &[&str], depth: u32) -> PropFormula {
    if depth == 0 || rng.gen_bool(0.3) {
        let a = PropFormula::atom(atoms.choose(rng).expect("non-empty vocabulary"));
        return if rng.gen_bool(0.3) { PropFormula::not(a) } else { a };
    }
    let sub = |rng: &mut _| formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => PropFormula::not(sub(rng)),
        1 => PropFormula::and(sub(rng), sub(rng)),
        2 => PropFormula::or(sub(rng), sub(rng)),
        3 => PropFormula::implies(sub(rng), sub(rng)),
        _ => PropFormula::iff(sub(rng), sub(rng)),
    }
}

fn vocabulary(rng: &mut impl Rng) -> Vec<&'static str> {
    ATOMS[..rng.gen_range(1..=ATOMS.len())].to_vec()
}

fn prop_kb(formulas: Vec<PossFormula>) -> PossKb {
    PossKb::new(Dialect::Prop, formulas).expect("propositional formulas only")
}

/// A necessity-valued KB of 1 to 6 formulas over at most 4 atoms, with
/// degrees from the 10-level grid, and the atoms it may mention.
pub fn necessity_kb(rng: &mut impl Rng) -> (PossKb, Vec<&'static str>) {
    let atoms = vocabulary(rng);
    let formulas = (0..rng.gen_range(1..=MAX_FORMULAS))
        .map(|_| {
            let w = Weight::necessity(grid_degree(rng)).expect("grid degree in (0, 1]");
            PossFormula::new(formula(rng, &atoms, 2), w)
        })
        .collect();
    (prop_kb(formulas), atoms)
}

/// As [`necessity_kb`], with each weight a possibility one half the time.
pub fn mixed_kb(rng: &mut impl Rng) -> (PossKb, Vec<&'static str>) {
    let atoms = vocabulary(rng);
    let formulas = (0..rng.gen_range(1..=MAX_FORMULAS))
        .map(|_| {
            let mode = if rng.gen_bool(0.5) { Mode::Necessity } else { Mode::Possibility };
            let w = Weight::new(mode, grid_degree(rng)).expect("grid degree in (0, 1]");
            PossFormula::new(formula(rng, &atoms, 2), w)
        })
        .collect();
    (prop_kb(formulas), atoms)
}

/// 2 to 8 non-tautological clauses of 1 to 3 literals over at most 4 atoms,
/// each necessity- or possibility-valued.
pub fn clause_kb(rng: &mut impl Rng) -> Vec<PossClause> {
    let atoms = vocabulary(rng);
    let target = rng.gen_range(2..=8);
    let mut out = Vec::with_capacity(target);
    while out.len() < target {
        let width = rng.gen_range(1..=3);
        let lits: Vec<(String, bool)> = (0..width)
            .map(|_| (atoms.choose(rng).expect("non-empty").to_string(), rng.gen_bool(0.5)))
            .collect();
        let mode = if rng.gen_bool(0.5) { Mode::Necessity } else { Mode::Possibility };
        let w = Weight::new(mode, grid_degree(rng)).expect("grid degree in (0, 1]");
        if let Some(c) = PossClause::new(lits, w) {
            out.push(c);
        }
    }
    out
}

pub fn clauses_as_kb(clauses: &[PossClause]) -> PossKb {
    prop_kb(clauses.iter().map(|c| PossFormula::new(c.to_formula(), c.weight())).collect())
}

/// Levels of `phi` plus the midpoints below and between them.
pub fn sample_degrees(phi: &PossKb) -> Vec<Rational> {
    let levels: BTreeSet<Rational> = phi.formulas().iter().map(|f| f.weight.degree()).collect();
    let mut out = BTreeSet::new();
    let mut prev = Rational::new(0, 1);
    for &l in &levels {
        out.insert(l);
        out.insert((prev + l) / 2);
        prev = l;
    }
    out.into_iter().collect()
}

/// ⌈log₂ n⌉ for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n.max(1) - 1).leading_zeros()
}

/// Outcome of a cross-validation run.
#[derive(Debug, Default, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CrossCheck {
    pub seed: u64,
    pub necessity_cases: usize,
    pub resolution_cases: usize,
    pub round_trip_cases: usize,
    /// Human-readable description of every disagreement.
    pub discrepancies: Vec<String>,
    /// `max_necessity` runs exceeding ⌈log₂ L⌉ + 1 oracle calls.
    pub call_bound_violations: Vec<String>,
}

/// Canonical-distribution necessity against `max_necessity`, one query.
pub fn necessity_agrees(
    phi: &PossKb,
    atoms: &[&str],
    query: &PropFormula,
) -> Result<(Rational, Rational, usize), String> {
    let extra = atoms.iter().map(|a| a.to_string()).collect();
    let pi = canonical_distribution_over(phi, &extra).map_err(|e| e.to_string())?;
    let semantic = measure_necessity(&pi, query).map_err(|e| e.to_string())?;
    let answer = max_necessity(&PropositionalOracle, phi, &query.clone().into()).map_err(|e| e.to_string())?;
    Ok((semantic, answer.value, answer.oracle_calls))
}

/// Whether entailment of `(p, W α)` agrees with `Incons(Φ ∪ {(¬p, N1)}) ≥ W α`.
pub fn round_trip_agrees<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    p: &PropFormula,
    weight: Weight,
) -> Result<bool, PossError> {
    let q = PossFormula::new(p.clone(), weight);
    let entailed = crate::possibilistic::entails_weighted(oracle, phi, &q)?.value;
    let mut extended = phi.clone();
    extended.push(PossFormula::new(PropFormula::not(p.clone()), Weight::necessity(Rational::new(1, 1))?))?;
    let incons = inconsistency_degree(oracle, &extended)?.value;
    Ok(entailed == crate::possibilistic::weight_geq(incons, weight.into()))
}

/// Runs `cases` instances of each cross-check from `seed`: necessity
/// (5 queries per KB), resolution, and the weighted round trip.
pub fn cross_check(seed: u64, cases: usize) -> CrossCheck {
    let mut report = CrossCheck { seed, ..CrossCheck::default() };
    let mut g = rng(seed);
    for case in 0..cases {
        let (phi, atoms) = necessity_kb(&mut g);
        let levels = phi.necessity_levels().len();
        for _ in 0..5 {
            let query = formula(&mut g, &atoms, 2);
            report.necessity_cases += 1;
            match necessity_agrees(&phi, &atoms, &query) {
                Ok((semantic, computed, calls)) => {
                    if semantic != computed {
                        report.discrepancies.push(format!(
                            "necessity case {case}: {query}: semantic {semantic}, computed {computed}"
                        ));
                    }
                    if calls > ceil_log2(levels) as usize + 1 {
                        report.call_bound_violations.push(format!(
                            "case {case}: {query}: {calls} calls with {levels} level(s)"
                        ));
                    }
                }
                Err(e) => report.discrepancies.push(format!("necessity case {case}: {e}")),
            }
        }

        let clauses = clause_kb(&mut g);
        report.resolution_cases += 1;
        match inconsistency_degree(&PropositionalOracle, &clauses_as_kb(&clauses)) {
            Ok(a) => {
                let derived = resolution_incons(&clauses);
                if derived != a.value {
                    report.discrepancies.push(format!(
                        "resolution case {case}: resolution {derived}, cuts {}",
                        a.value
                    ));
                }
            }
            Err(e) => report.discrepancies.push(format!("resolution case {case}: {e}")),
        }

        let (phi, atoms) = mixed_kb(&mut g);
        let p = formula(&mut g, &atoms, 2);
        report.round_trip_cases += 1;
        for alpha in sample_degrees(&phi) {
            for mode in [Mode::Necessity, Mode::Possibility] {
                let w = Weight::new(mode, alpha).expect("sampled degrees are in (0, 1]");
                match round_trip_agrees(&PropositionalOracle, &phi, &p, w) {
                    Ok(true) => {}
                    Ok(false) => report
                        .discrepancies
                        .push(format!("round trip case {case}: {p} @ {w}")),
                    Err(e) => report.discrepancies.push(format!("round trip case {case}: {e}")),
                }
            }
        }
    }
    report
}
