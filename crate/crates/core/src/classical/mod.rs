//! Classical entailment as an abstract capability.
//!
//! The possibilistic layer only ever asks two questions of a classical
//! knowledge base: is it consistent, and does it entail a statement. This
//! module answers them for the propositional dialect (DPLL refutation) and
//! the ALCN dialect (tableau).

pub mod dpll;
pub mod prop;

pub use prop::{parse_formula, PropFormula};

use crate::concept::{Assertion, Axiom};
use crate::tableau::{Reasoner, ResourceLimit};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dialect {
    Dl,
    Prop,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Dl => "dl",
            Dialect::Prop => "prop",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassicalStatement {
    DlAxiom(Axiom),
    DlAssertion(Assertion),
    Prop(PropFormula),
}

impl ClassicalStatement {
    pub fn dialect(&self) -> Dialect {
        match self {
            ClassicalStatement::DlAxiom(_) | ClassicalStatement::DlAssertion(_) => Dialect::Dl,
            ClassicalStatement::Prop(_) => Dialect::Prop,
        }
    }
}

impl fmt::Display for ClassicalStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalStatement::DlAxiom(a) => write!(f, "axiom {a}"),
            ClassicalStatement::DlAssertion(a) => write!(f, "assert {a}"),
            ClassicalStatement::Prop(p) => write!(f, "formula {p}"),
        }
    }
}

impl From<PropFormula> for ClassicalStatement {
    fn from(p: PropFormula) -> Self {
        ClassicalStatement::Prop(p)
    }
}

impl From<Axiom> for ClassicalStatement {
    fn from(a: Axiom) -> Self {
        ClassicalStatement::DlAxiom(a)
    }
}

impl From<Assertion> for ClassicalStatement {
    fn from(a: Assertion) -> Self {
        ClassicalStatement::DlAssertion(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("dialect mismatch: expected {expected}, found {found}")]
    DialectMismatch { expected: Dialect, found: Dialect },
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

/// A dialect-homogeneous set of classical statements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalKb {
    dialect: Dialect,
    statements: Vec<ClassicalStatement>,
}

impl ClassicalKb {
    pub fn new(dialect: Dialect, statements: Vec<ClassicalStatement>) -> Result<Self, OracleError> {
        if let Some(s) = statements.iter().find(|s| s.dialect() != dialect) {
            return Err(OracleError::DialectMismatch { expected: dialect, found: s.dialect() });
        }
        Ok(ClassicalKb { dialect, statements })
    }

    pub fn empty(dialect: Dialect) -> Self {
        ClassicalKb { dialect, statements: Vec::new() }
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    pub fn statements(&self) -> &[ClassicalStatement] {
        &self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn push(&mut self, s: ClassicalStatement) -> Result<(), OracleError> {
        if s.dialect() != self.dialect {
            return Err(OracleError::DialectMismatch { expected: self.dialect, found: s.dialect() });
        }
        self.statements.push(s);
        Ok(())
    }

    fn split_dl(&self) -> (Vec<Axiom>, Vec<Assertion>) {
        let mut tbox = Vec::new();
        let mut abox = Vec::new();
        for s in &self.statements {
            match s {
                ClassicalStatement::DlAxiom(a) => tbox.push(a.clone()),
                ClassicalStatement::DlAssertion(a) => abox.push(a.clone()),
                ClassicalStatement::Prop(_) => unreachable!("dialect checked on construction"),
            }
        }
        (tbox, abox)
    }

    fn formulas(&self) -> impl Iterator<Item = &PropFormula> {
        self.statements.iter().map(|s| match s {
            ClassicalStatement::Prop(p) => p,
            _ => unreachable!("dialect checked on construction"),
        })
    }
}

/// A decision procedure for classical consistency and entailment.
pub trait EntailmentOracle {
    fn is_consistent(&self, kb: &ClassicalKb) -> Result<bool, OracleError>;

    fn entails(&self, kb: &ClassicalKb, query: &ClassicalStatement) -> Result<bool, OracleError>;
}

fn expect_dialect(expected: Dialect, found: Dialect) -> Result<(), OracleError> {
    if expected != found {
        return Err(OracleError::DialectMismatch { expected, found });
    }
    Ok(())
}

/// Propositional backend: refutation by DPLL.
#[derive(Debug, Clone, Copy, Default)]
pub struct PropositionalOracle;

impl EntailmentOracle for PropositionalOracle {
    fn is_consistent(&self, kb: &ClassicalKb) -> Result<bool, OracleError> {
        expect_dialect(Dialect::Prop, kb.dialect)?;
        Ok(dpll::satisfiable(kb.formulas()))
    }

    fn entails(&self, kb: &ClassicalKb, query: &ClassicalStatement) -> Result<bool, OracleError> {
        expect_dialect(Dialect::Prop, kb.dialect)?;
        let ClassicalStatement::Prop(q) = query else {
            return Err(OracleError::DialectMismatch { expected: Dialect::Prop, found: query.dialect() });
        };
        let negated = PropFormula::not(q.clone());
        Ok(!dpll::satisfiable(kb.formulas().chain(std::iter::once(&negated))))
    }
}

/// ALCN backend: the tableau reasoner, with unique names.
#[derive(Debug, Clone, Copy, Default)]
pub struct TerminologicalOracle {
    pub reasoner: Reasoner,
}

impl EntailmentOracle for TerminologicalOracle {
    fn is_consistent(&self, kb: &ClassicalKb) -> Result<bool, OracleError> {
        expect_dialect(Dialect::Dl, kb.dialect)?;
        let (tbox, abox) = kb.split_dl();
        Ok(self.reasoner.check_consistency(&tbox, &abox)?.consistent)
    }

    fn entails(&self, kb: &ClassicalKb, query: &ClassicalStatement) -> Result<bool, OracleError> {
        expect_dialect(Dialect::Dl, kb.dialect)?;
        let (tbox, abox) = kb.split_dl();
        match query {
            ClassicalStatement::DlAxiom(ax) => {
                Ok(self.reasoner.is_subsumed_wrt(&tbox, &abox, &ax.lhs, &ax.rhs)?)
            }
            ClassicalStatement::DlAssertion(a) => Ok(self.reasoner.is_instance(&tbox, &abox, a)?),
            ClassicalStatement::Prop(_) => {
                Err(OracleError::DialectMismatch { expected: Dialect::Dl, found: Dialect::Prop })
            }
        }
    }
}

/// Dispatches on the dialect of the knowledge base.
#[derive(Debug, Clone, Copy, Default)]
pub struct Oracle {
    pub dl: TerminologicalOracle,
    pub prop: PropositionalOracle,
}

impl Oracle {
    pub fn with_reasoner(reasoner: Reasoner) -> Self {
        Oracle { dl: TerminologicalOracle { reasoner }, prop: PropositionalOracle }
    }
}

impl EntailmentOracle for Oracle {
    fn is_consistent(&self, kb: &ClassicalKb) -> Result<bool, OracleError> {
        match kb.dialect {
            Dialect::Dl => self.dl.is_consistent(kb),
            Dialect::Prop => self.prop.is_consistent(kb),
        }
    }

    fn entails(&self, kb: &ClassicalKb, query: &ClassicalStatement) -> Result<bool, OracleError> {
        expect_dialect(kb.dialect, query.dialect())?;
        match kb.dialect {
            Dialect::Dl => self.dl.entails(kb, query),
            Dialect::Prop => self.prop.entails(kb, query),
        }
    }
}

#[cfg(test)]
mod tests;
