//! Query dispatch and result rendering for the command-line tool.

use crate::classical::{ClassicalStatement, Dialect, EntailmentOracle, OracleError};
use crate::concept::{Axiom, Concept};
use crate::possibilistic::{
    entails_weighted, inconsistency_degree, max_necessity, max_possibility, necessity_cut, InconsDegree,
    PossError, PossFormula, PossKb,
};
use crate::rational::{decimal, fraction, Both, Rational};
use serde::Serialize;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Classical consistency of Φ^0.
    Check,
    Incons,
    Entail(PossFormula),
    MaxNecessity(ClassicalStatement),
    MaxPossibility(ClassicalStatement),
    /// Whether Φ^0 entails `sub → sup`.
    Subsumes { sub: Concept, sup: Concept },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bool(bool),
    Degree(Rational),
    Incons(InconsDegree),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub verdict: Verdict,
    pub calls: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("`subsumes` needs a dl knowledge base, this one is {0}")]
    NotTerminological(Dialect),
    #[error(transparent)]
    Poss(#[from] PossError),
}

impl QueryError {
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            QueryError::Poss(PossError::Oracle(OracleError::ResourceLimit(_)))
        )
    }
}

pub fn run_query<O: EntailmentOracle + ?Sized>(
    oracle: &O,
    kb: &PossKb,
    command: &Command,
) -> Result<QueryResult, QueryError> {
    let start = Instant::now();
    let classical = |r: Result<bool, OracleError>| r.map_err(|e| QueryError::Poss(e.into()));
    let (verdict, calls) = match command {
        Command::Check => {
            let cut = necessity_cut(kb, Rational::new(0, 1), true);
            (Verdict::Bool(classical(oracle.is_consistent(&cut))?), 1)
        }
        Command::Incons => {
            let a = inconsistency_degree(oracle, kb)?;
            (Verdict::Incons(a.value), a.oracle_calls)
        }
        Command::Entail(q) => {
            let a = entails_weighted(oracle, kb, q)?;
            (Verdict::Bool(a.value), a.oracle_calls)
        }
        Command::MaxNecessity(p) => {
            let a = max_necessity(oracle, kb, p)?;
            (Verdict::Degree(a.value), a.oracle_calls)
        }
        Command::MaxPossibility(p) => {
            let a = max_possibility(oracle, kb, p)?;
            (Verdict::Degree(a.value), a.oracle_calls)
        }
        Command::Subsumes { sub, sup } => {
            if kb.dialect() != Dialect::Dl {
                return Err(QueryError::NotTerminological(kb.dialect()));
            }
            let cut = necessity_cut(kb, Rational::new(0, 1), true);
            let axiom = Axiom::new(sub.clone(), sup.clone()).into();
            (Verdict::Bool(classical(oracle.entails(&cut, &axiom))?), 1)
        }
    };
    Ok(QueryResult { verdict, calls, elapsed: start.elapsed() })
}

impl QueryResult {
    /// Exit status: 1 for a false boolean verdict, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Bool(false) => 1,
            _ => 0,
        }
    }

    /// Deterministic one-line rendering: `true`, `4/5 (0.8)`, `N 2/5 (0.4)`.
    pub fn human(&self, command: &Command) -> String {
        match (self.verdict, command) {
            (Verdict::Bool(b), Command::Check) => {
                if b { "consistent" } else { "inconsistent" }.to_string()
            }
            (Verdict::Bool(b), _) => b.to_string(),
            (Verdict::Degree(d), _) => Both(&d).to_string(),
            (Verdict::Incons(InconsDegree::CompletelyConsistent), _) => "P 0 (completely consistent)".to_string(),
            (Verdict::Incons(i), _) => {
                let w = i.as_weight().expect("non-zero inconsistency degree");
                format!("{} {}", w.mode(), Both(&w.degree()))
            }
        }
    }

    pub fn json(&self) -> JsonResult {
        let (verdict, degree) = match self.verdict {
            Verdict::Bool(b) => (serde_json::Value::Bool(b), None),
            Verdict::Degree(d) => (serde_json::Value::String(decimal(&d)), Some(d)),
            Verdict::Incons(i) => {
                let text = match i.as_weight() {
                    Some(w) => format!("{} {}", w.mode(), fraction(&w.degree())),
                    None => "P 0".to_string(),
                };
                (serde_json::Value::String(text), Some(i.degree()))
            }
        };
        JsonResult {
            verdict,
            degree: degree.map(|d| JsonDegree { num: *d.numer(), den: *d.denom() }),
            calls: self.calls,
            millis: self.elapsed.as_millis(),
        }
    }
}

/// Machine-readable result. `degree` is null for boolean verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonResult {
    pub verdict: serde_json::Value,
    pub degree: Option<JsonDegree>,
    pub calls: usize,
    pub millis: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JsonDegree {
    pub num: i64,
    pub den: i64,
}
