//! Weighted knowledge bases and their reasoning services, reduced to
//! classical entailment on necessity cuts.
//!
//! For a knowledge base Φ, the cut `Φ_α` holds the classical parts of the
//! necessity-valued formulas of degree at least α, and `Φ^α` those of degree
//! strictly above α. Possibility-valued formulas never enter a cut; they
//! are tried one at a time on top of `Φ^{1-β}`.

use crate::classical::{ClassicalKb, ClassicalStatement, Dialect, EntailmentOracle, OracleError};
use crate::rational::{fraction, literal, Rational};
use num_traits::{One, Zero};
use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Π: possibility.
    Possibility,
    /// N: necessity.
    Necessity,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Possibility => "P",
            Mode::Necessity => "N",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PossError {
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("degree {} is outside (0, 1]", fraction(.0))]
    DegreeOutOfRange(Rational),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A valuation mode with a degree in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Weight {
    mode: Mode,
    degree: Rational,
}

fn check_degree(degree: Rational) -> Result<Rational, PossError> {
    if degree.is_zero() {
        return Err(PossError::ZeroDegree);
    }
    if degree < Rational::zero() || degree > Rational::one() {
        return Err(PossError::DegreeOutOfRange(degree));
    }
    Ok(degree)
}

impl Weight {
    pub fn new(mode: Mode, degree: Rational) -> Result<Self, PossError> {
        Ok(Weight { mode, degree: check_degree(degree)? })
    }

    pub fn necessity(degree: Rational) -> Result<Self, PossError> {
        Weight::new(Mode::Necessity, degree)
    }

    pub fn possibility(degree: Rational) -> Result<Self, PossError> {
        Weight::new(Mode::Possibility, degree)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn degree(&self) -> Rational {
        self.degree
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.mode, literal(&self.degree))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        InconsDegree::from(*self).cmp(&InconsDegree::from(*other))
    }
}

/// A weight extended with the bottom element Π0. As the result of an
/// inconsistency check, Π0 means completely consistent.
///
/// Ordered Π0 < Πα < Nβ for all α, β > 0, and by degree within a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InconsDegree {
    CompletelyConsistent,
    PossiblyIncons(Rational),
    NecessarilyIncons(Rational),
}

impl InconsDegree {
    fn key(&self) -> (u8, Rational) {
        match *self {
            InconsDegree::CompletelyConsistent => (0, Rational::zero()),
            InconsDegree::PossiblyIncons(b) => (1, b),
            InconsDegree::NecessarilyIncons(a) => (2, a),
        }
    }

    /// The degree, 0 for Π0.
    pub fn degree(&self) -> Rational {
        self.key().1
    }

    pub fn as_weight(&self) -> Option<Weight> {
        match *self {
            InconsDegree::CompletelyConsistent => None,
            InconsDegree::PossiblyIncons(b) => Some(Weight { mode: Mode::Possibility, degree: b }),
            InconsDegree::NecessarilyIncons(a) => Some(Weight { mode: Mode::Necessity, degree: a }),
        }
    }
}

impl From<Weight> for InconsDegree {
    fn from(w: Weight) -> Self {
        match w.mode {
            Mode::Possibility => InconsDegree::PossiblyIncons(w.degree),
            Mode::Necessity => InconsDegree::NecessarilyIncons(w.degree),
        }
    }
}

impl PartialOrd for InconsDegree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for InconsDegree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for InconsDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_weight() {
            Some(w) => w.fmt(f),
            None => f.write_str("P 0"),
        }
    }
}

pub fn weight_geq(v: InconsDegree, w: InconsDegree) -> bool {
    v >= w
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PossFormula {
    pub statement: ClassicalStatement,
    pub weight: Weight,
}

impl PossFormula {
    pub fn new(statement: impl Into<ClassicalStatement>, weight: Weight) -> Self {
        PossFormula { statement: statement.into(), weight }
    }
}

impl fmt::Display for PossFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.statement, self.weight)
    }
}

/// A dialect-homogeneous list of weighted formulas. Duplicates are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossKb {
    dialect: Dialect,
    formulas: Vec<PossFormula>,
}

impl PossKb {
    pub fn new(dialect: Dialect, formulas: Vec<PossFormula>) -> Result<Self, PossError> {
        if let Some(f) = formulas.iter().find(|f| f.statement.dialect() != dialect) {
            return Err(OracleError::DialectMismatch { expected: dialect, found: f.statement.dialect() }.into());
        }
        Ok(PossKb { dialect, formulas })
    }

    pub fn empty(dialect: Dialect) -> Self {
        PossKb { dialect, formulas: Vec::new() }
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn formulas(&self) -> &[PossFormula] {
        &self.formulas
    }

    pub fn push(&mut self, f: PossFormula) -> Result<(), PossError> {
        self.check_dialect(&f.statement)?;
        self.formulas.push(f);
        Ok(())
    }

    fn check_dialect(&self, s: &ClassicalStatement) -> Result<(), PossError> {
        if s.dialect() != self.dialect {
            return Err(OracleError::DialectMismatch { expected: self.dialect, found: s.dialect() }.into());
        }
        Ok(())
    }

    /// Distinct degrees of the necessity-valued formulas, ascending.
    pub fn necessity_levels(&self) -> Vec<Rational> {
        let mut levels: Vec<Rational> = self
            .formulas
            .iter()
            .filter(|f| f.weight.mode == Mode::Necessity)
            .map(|f| f.weight.degree)
            .collect();
        levels.sort();
        levels.dedup();
        levels
    }

    /// Possibility-valued formulas by descending degree, stable otherwise.
    fn possibility_formulas(&self) -> Vec<(&ClassicalStatement, Rational)> {
        let mut out: Vec<_> = self
            .formulas
            .iter()
            .filter(|f| f.weight.mode == Mode::Possibility)
            .map(|f| (&f.statement, f.weight.degree))
            .collect();
        out.sort_by_key(|&(_, beta)| std::cmp::Reverse(beta));
        out
    }
}

/// `Φ_α` (degrees ≥ α) or, with `strict`, `Φ^α` (degrees > α).
pub fn necessity_cut(phi: &PossKb, alpha: Rational, strict: bool) -> ClassicalKb {
    let statements = phi
        .formulas
        .iter()
        .filter(|f| f.weight.mode == Mode::Necessity)
        .filter(|f| if strict { f.weight.degree > alpha } else { f.weight.degree >= alpha })
        .map(|f| f.statement.clone())
        .collect();
    ClassicalKb::new(phi.dialect, statements).expect("PossKb is dialect-homogeneous")
}

/// A query result with the number of classical oracle calls it took.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Answer<T> {
    pub value: T,
    pub oracle_calls: usize,
}

/// Counts the oracle calls of a single query.
struct Counted<'a, O: ?Sized> {
    oracle: &'a O,
    calls: Cell<usize>,
}

impl<'a, O: EntailmentOracle + ?Sized> Counted<'a, O> {
    fn new(oracle: &'a O) -> Self {
        Counted { oracle, calls: Cell::new(0) }
    }

    fn entails(&self, kb: &ClassicalKb, q: &ClassicalStatement) -> Result<bool, PossError> {
        self.calls.set(self.calls.get() + 1);
        Ok(self.oracle.entails(kb, q)?)
    }

    fn is_consistent(&self, kb: &ClassicalKb) -> Result<bool, PossError> {
        self.calls.set(self.calls.get() + 1);
        Ok(self.oracle.is_consistent(kb)?)
    }

    fn answer<T>(&self, value: T) -> Answer<T> {
        Answer { value, oracle_calls: self.calls.get() }
    }
}

/// `Φ^{1-β} ∪ {q}`.
fn possibility_context(phi: &PossKb, q: &ClassicalStatement, beta: Rational) -> ClassicalKb {
    let mut kb = necessity_cut(phi, Rational::one() - beta, true);
    kb.push(q.clone()).expect("PossKb is dialect-homogeneous");
    kb
}

/// Largest `k ≤ n` with `holds(1..=k)`, for a predicate true on a prefix of
/// `1..=n`. Uses ⌈log₂(n+1)⌉ evaluations at most.
fn prefix_length(
    n: usize,
    mut holds: impl FnMut(usize) -> Result<bool, PossError>,
) -> Result<usize, PossError> {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Whether Φ ⊨ (p, Nα), i.e. `Φ_α ⊨ p`.
pub fn entails_necessity<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    p: &ClassicalStatement,
    alpha: Rational,
) -> Result<Answer<bool>, PossError> {
    let alpha = check_degree(alpha)?;
    phi.check_dialect(p)?;
    let o = Counted::new(oracle);
    let value = o.entails(&necessity_cut(phi, alpha, false), p)?;
    Ok(o.answer(value))
}

/// Whether Φ ⊨ (p, Πα): `Φ^0 ⊨ p`, or some (q, Πβ) with β ≥ α has
/// `Φ^{1-β} ∪ {q} ⊨ p`.
pub fn entails_possibility<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    p: &ClassicalStatement,
    alpha: Rational,
) -> Result<Answer<bool>, PossError> {
    let alpha = check_degree(alpha)?;
    phi.check_dialect(p)?;
    let o = Counted::new(oracle);
    if o.entails(&necessity_cut(phi, Rational::zero(), true), p)? {
        return Ok(o.answer(true));
    }
    for (q, beta) in phi.possibility_formulas() {
        if beta < alpha {
            break;
        }
        if o.entails(&possibility_context(phi, q, beta), p)? {
            return Ok(o.answer(true));
        }
    }
    Ok(o.answer(false))
}

pub fn entails_weighted<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    q: &PossFormula,
) -> Result<Answer<bool>, PossError> {
    match q.weight.mode {
        Mode::Necessity => entails_necessity(oracle, phi, &q.statement, q.weight.degree),
        Mode::Possibility => entails_possibility(oracle, phi, &q.statement, q.weight.degree),
    }
}

/// The largest α with Φ ⊨ (p, Nα), or 0 if there is none.
///
/// Candidate levels are the necessity degrees of Φ plus 1, since above the
/// top degree the cut is empty and still entails tautologies. Binary search
/// over the M candidates takes at most ⌈log₂(M+1)⌉ oracle calls.
pub fn max_necessity<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    p: &ClassicalStatement,
) -> Result<Answer<Rational>, PossError> {
    phi.check_dialect(p)?;
    let mut levels = phi.necessity_levels();
    if levels.last() != Some(&Rational::one()) {
        levels.push(Rational::one());
    }
    let o = Counted::new(oracle);
    let k = prefix_length(levels.len(), |i| o.entails(&necessity_cut(phi, levels[i - 1], false), p))?;
    let value = if k == 0 { Rational::zero() } else { levels[k - 1] };
    Ok(o.answer(value))
}

/// The largest α with Φ ⊨ (p, Πα): 1 if `Φ^0 ⊨ p`, else the degree of the
/// strongest possibility formula that yields p, else 0.
pub fn max_possibility<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
    p: &ClassicalStatement,
) -> Result<Answer<Rational>, PossError> {
    phi.check_dialect(p)?;
    let o = Counted::new(oracle);
    if o.entails(&necessity_cut(phi, Rational::zero(), true), p)? {
        return Ok(o.answer(Rational::one()));
    }
    for (q, beta) in phi.possibility_formulas() {
        if o.entails(&possibility_context(phi, q, beta), p)? {
            return Ok(o.answer(beta));
        }
    }
    Ok(o.answer(Rational::zero()))
}

/// Incons(Φ): the largest weight at which Φ is contradictory.
///
/// If the whole necessity part `Φ_γ` is inconsistent, binary search finds
/// the largest level α with `Φ_α` inconsistent. Otherwise possibility
/// formulas are tried by descending degree against `Φ^{1-β}`.
pub fn inconsistency_degree<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    phi: &PossKb,
) -> Result<Answer<InconsDegree>, PossError> {
    let o = Counted::new(oracle);
    let levels = phi.necessity_levels();
    if let Some(&gamma) = levels.first() {
        if !o.is_consistent(&necessity_cut(phi, gamma, false))? {
            let k = prefix_length(levels.len() - 1, |i| {
                Ok(!o.is_consistent(&necessity_cut(phi, levels[i], false))?)
            })?;
            return Ok(o.answer(InconsDegree::NecessarilyIncons(levels[k])));
        }
    }
    for (q, beta) in phi.possibility_formulas() {
        if !o.is_consistent(&possibility_context(phi, q, beta))? {
            return Ok(o.answer(InconsDegree::PossiblyIncons(beta)));
        }
    }
    Ok(o.answer(InconsDegree::CompletelyConsistent))
}
