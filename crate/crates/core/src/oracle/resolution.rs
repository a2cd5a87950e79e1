//! Possibilistic resolution over propositional clauses.

use crate::classical::PropFormula;
use crate::possibilistic::{InconsDegree, Weight};
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt;

/// `Nα ∘ Nβ = N min(α, β)`, `Π ∘ Π = Π0`, and a necessity degree α with a
/// possibility degree β gives Πβ when α + β > 1, else Π0.
pub fn combine_weights(v: InconsDegree, w: InconsDegree) -> InconsDegree {
    use InconsDegree::*;
    match (v, w) {
        (NecessarilyIncons(a), NecessarilyIncons(b)) => NecessarilyIncons(a.min(b)),
        (NecessarilyIncons(a), PossiblyIncons(b)) | (PossiblyIncons(b), NecessarilyIncons(a)) => {
            if a + b > crate::rational::Rational::one() {
                PossiblyIncons(b)
            } else {
                CompletelyConsistent
            }
        }
        _ => CompletelyConsistent,
    }
}

/// A weighted disjunction of literals `(atom, positive)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PossClause {
    literals: BTreeSet<(String, bool)>,
    weight: Weight,
}

impl PossClause {
    /// `None` if the literals contain a complementary pair.
    pub fn new(literals: impl IntoIterator<Item = (String, bool)>, weight: Weight) -> Option<Self> {
        let literals: BTreeSet<(String, bool)> = literals.into_iter().collect();
        if literals.iter().any(|(a, s)| literals.contains(&(a.clone(), !s))) {
            return None;
        }
        Some(PossClause { literals, weight })
    }

    pub fn literals(&self) -> &BTreeSet<(String, bool)> {
        &self.literals
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    /// The clause as a disjunction; the empty clause is `false`.
    pub fn to_formula(&self) -> PropFormula {
        let lit = |(a, s): &(String, bool)| {
            let atom = PropFormula::atom(a);
            if *s {
                atom
            } else {
                PropFormula::not(atom)
            }
        };
        let mut lits: Vec<PropFormula> = self.literals.iter().map(lit).collect();
        let Some(mut acc) = lits.pop() else {
            return PropFormula::False;
        };
        while let Some(l) = lits.pop() {
            acc = PropFormula::or(l, acc);
        }
        acc
    }
}

impl fmt::Display for PossClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.to_formula(), self.weight)
    }
}

type Lits = BTreeSet<(String, bool)>;

/// Clause store with subsumption: `(c, v)` is redundant when some `(c', v')`
/// has `c' ⊆ c` and `v' ≥ v`.
#[derive(Default)]
struct Store {
    clauses: Vec<(Lits, InconsDegree)>,
}

impl Store {
    fn subsumed(&self, c: &Lits, v: InconsDegree) -> bool {
        self.clauses.iter().any(|(d, w)| *w >= v && d.is_subset(c))
    }

    fn insert(&mut self, c: Lits, v: InconsDegree) -> bool {
        if self.subsumed(&c, v) {
            return false;
        }
        self.clauses.retain(|(d, w)| !(v >= *w && c.is_subset(d)));
        self.clauses.push((c, v));
        true
    }
}

fn resolvents(a: &Lits, b: &Lits) -> Vec<Lits> {
    let mut out = Vec::new();
    for (atom, sign) in a {
        if b.contains(&(atom.clone(), !sign)) {
            let mut r: Lits = a.union(b).cloned().collect();
            r.remove(&(atom.clone(), *sign));
            r.remove(&(atom.clone(), !sign));
            if !r.iter().any(|(x, s)| r.contains(&(x.clone(), !s))) {
                out.push(r);
            }
        }
    }
    out
}

/// The largest weight of a derivable empty clause, by level saturation
/// with subsumption deletion. Π0 resolvents are dropped, so two
/// possibility-valued parents never resolve.
pub fn resolution_incons(clauses: &[PossClause]) -> InconsDegree {
    let mut store = Store::default();
    for c in clauses {
        store.insert(c.literals.clone(), c.weight.into());
    }
    loop {
        let mut fresh = Vec::new();
        let snapshot = store.clauses.clone();
        for (i, (a, v)) in snapshot.iter().enumerate() {
            for (b, w) in &snapshot[i + 1..] {
                let weight = combine_weights(*v, *w);
                if weight == InconsDegree::CompletelyConsistent {
                    continue;
                }
                for r in resolvents(a, b) {
                    if !store.subsumed(&r, weight) {
                        fresh.push((r, weight));
                    }
                }
            }
        }
        let mut grew = false;
        for (c, v) in fresh {
            grew |= store.insert(c, v);
        }
        if !grew {
            break;
        }
    }
    store
        .clauses
        .iter()
        .filter(|(c, _)| c.is_empty())
        .map(|(_, v)| *v)
        .max()
        .unwrap_or(InconsDegree::CompletelyConsistent)
}
