//! Reference semantics for propositional knowledge bases: explicit
//! possibility distributions over enumerated worlds (plus the absurd world),
//! the canonical distribution of a necessity-valued knowledge base, and
//! possibilistic resolution. Used to cross-check the cut-based algorithms.

mod resolution;

pub use resolution::{combine_weights, resolution_incons, PossClause};

use crate::classical::{ClassicalStatement, Dialect, PropFormula};
use crate::possibilistic::{Mode, PossKb};
use crate::rational::{fraction, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeSet;

/// Worlds are enumerated exhaustively, so the atom count is bounded.
pub const MAX_ATOMS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("atom `{0}` is not in the distribution's vocabulary")]
    UnknownAtom(String),
    #[error("{0} atoms exceed the enumeration bound of {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("the canonical distribution is defined for necessity-valued formulas only")]
    PossibilityFormula,
    #[error("only propositional knowledge bases have enumerable worlds")]
    NotPropositional,
    #[error("expected {expected} world values, found {found}")]
    WrongSize { expected: usize, found: usize },
    #[error("possibility value {} is outside [0, 1]", fraction(.0))]
    OutOfRange(Rational),
    #[error("no world has possibility 1")]
    NotNormalized,
}

/// A classical interpretation, indexed by a bit per atom, or the absurd
/// interpretation that satisfies every formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum World {
    /// Bit `i` is the value of the `i`-th atom of the vocabulary.
    Classical(u32),
    Absurd,
}

impl World {
    pub fn is_absurd(&self) -> bool {
        matches!(self, World::Absurd)
    }

    pub fn satisfies(&self, atoms: &[String], p: &PropFormula) -> bool {
        match *self {
            World::Absurd => true,
            World::Classical(bits) => p.eval(&|a| {
                let i = atoms.iter().position(|x| x == a).expect("atom checked against vocabulary");
                bits & (1 << i) != 0
            }),
        }
    }
}

/// π over Ω⊥: every assignment of a fixed atom list, plus the absurd world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilityDistribution {
    atoms: Vec<String>,
    classical: Vec<Rational>,
    absurd: Rational,
}

impl PossibilityDistribution {
    /// `classical[bits]` is π of the world assigning atom `i` the bit `i`.
    pub fn new(atoms: Vec<String>, classical: Vec<Rational>, absurd: Rational) -> Result<Self, SemanticsError> {
        if atoms.len() > MAX_ATOMS {
            return Err(SemanticsError::TooManyAtoms(atoms.len()));
        }
        let expected = 1usize << atoms.len();
        if classical.len() != expected {
            return Err(SemanticsError::WrongSize { expected, found: classical.len() });
        }
        let unit = |v: &Rational| *v >= Rational::zero() && *v <= Rational::one();
        if let Some(v) = classical.iter().chain(std::iter::once(&absurd)).find(|v| !unit(v)) {
            return Err(SemanticsError::OutOfRange(*v));
        }
        if absurd != Rational::one() && !classical.contains(&Rational::one()) {
            return Err(SemanticsError::NotNormalized);
        }
        Ok(PossibilityDistribution { atoms, classical, absurd })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn value(&self, w: World) -> Rational {
        match w {
            World::Classical(bits) => self.classical[bits as usize],
            World::Absurd => self.absurd,
        }
    }

    /// Classical worlds in index order, then the absurd world.
    pub fn worlds(&self) -> impl Iterator<Item = World> {
        (0..self.classical.len() as u32).map(World::Classical).chain(std::iter::once(World::Absurd))
    }

    fn check_vocabulary(&self, p: &PropFormula) -> Result<(), SemanticsError> {
        match p.atoms().into_iter().find(|a| !self.atoms.contains(a)) {
            Some(a) => Err(SemanticsError::UnknownAtom(a)),
            None => Ok(()),
        }
    }
}

/// Π(p): the largest π(ω) over worlds satisfying p, the absurd one included.
pub fn measure_possibility(pi: &PossibilityDistribution, p: &PropFormula) -> Result<Rational, SemanticsError> {
    pi.check_vocabulary(p)?;
    Ok(pi
        .worlds()
        .filter(|w| w.satisfies(&pi.atoms, p))
        .map(|w| pi.value(w))
        .max()
        .unwrap_or_else(Rational::zero))
}

/// N(p): the smallest 1 − π(ω) over worlds violating p, 1 if none does.
pub fn measure_necessity(pi: &PossibilityDistribution, p: &PropFormula) -> Result<Rational, SemanticsError> {
    pi.check_vocabulary(p)?;
    Ok(pi
        .worlds()
        .filter(|w| !w.satisfies(&pi.atoms, p))
        .map(|w| Rational::one() - pi.value(w))
        .min()
        .unwrap_or_else(Rational::one))
}

/// The canonical distribution of a necessity-valued propositional knowledge
/// base over its own atoms: π(ω) = 1 − max{α | (p, Nα) ∈ Φ, ω ⊭ p}, with the
/// empty maximum 0, and π(ω⊥) = 1.
pub fn canonical_distribution(phi: &PossKb) -> Result<PossibilityDistribution, SemanticsError> {
    canonical_distribution_over(phi, &BTreeSet::new())
}

/// As [`canonical_distribution`], with `extra` atoms added to the
/// vocabulary so that queries mentioning them can be measured.
pub fn canonical_distribution_over(
    phi: &PossKb,
    extra: &BTreeSet<String>,
) -> Result<PossibilityDistribution, SemanticsError> {
    if phi.dialect() != Dialect::Prop {
        return Err(SemanticsError::NotPropositional);
    }
    let mut formulas = Vec::new();
    let mut atoms = extra.clone();
    for f in phi.formulas() {
        if f.weight.mode() == Mode::Possibility {
            return Err(SemanticsError::PossibilityFormula);
        }
        let ClassicalStatement::Prop(p) = &f.statement else {
            return Err(SemanticsError::NotPropositional);
        };
        p.collect_atoms(&mut atoms);
        formulas.push((p, f.weight.degree()));
    }
    let atoms: Vec<String> = atoms.into_iter().collect();
    if atoms.len() > MAX_ATOMS {
        return Err(SemanticsError::TooManyAtoms(atoms.len()));
    }
    let classical = (0..1u32 << atoms.len())
        .map(|bits| {
            let w = World::Classical(bits);
            let violated = formulas
                .iter()
                .filter(|(p, _)| !w.satisfies(&atoms, p))
                .map(|(_, a)| *a)
                .max()
                .unwrap_or_else(Rational::zero);
            Rational::one() - violated
        })
        .collect();
    PossibilityDistribution::new(atoms, classical, Rational::one())
}
