//! Propositional satisfiability: structural (Tseitin) CNF and plain DPLL.

use super::prop::PropFormula;
use std::collections::BTreeMap;

type Lit = i32;

#[derive(Debug, Default)]
pub struct Cnf {
    pub clauses: Vec<Vec<Lit>>,
    vars: usize,
    atoms: BTreeMap<String, Lit>,
}

impl Cnf {
    pub fn num_vars(&self) -> usize {
        self.vars
    }

    fn fresh(&mut self) -> Lit {
        self.vars += 1;
        self.vars as Lit
    }

    /// Asserts `f`. Auxiliary variables name subformulas, so the result is
    /// equisatisfiable with the conjunction of everything added.
    pub fn add(&mut self, f: &PropFormula) {
        let l = self.encode(f);
        self.clauses.push(vec![l]);
    }

    fn encode(&mut self, f: &PropFormula) -> Lit {
        match f {
            PropFormula::Atom(a) => {
                if let Some(&v) = self.atoms.get(a) {
                    return v;
                }
                let v = self.fresh();
                self.atoms.insert(a.clone(), v);
                v
            }
            PropFormula::True | PropFormula::False => {
                let v = self.fresh();
                self.clauses.push(vec![v]);
                if matches!(f, PropFormula::True) {
                    v
                } else {
                    -v
                }
            }
            PropFormula::Not(g) => -self.encode(g),
            PropFormula::And(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let x = self.fresh();
                self.clauses.extend([vec![-x, a], vec![-x, b], vec![x, -a, -b]]);
                x
            }
            PropFormula::Or(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                self.or_gate(a, b)
            }
            PropFormula::Implies(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                self.or_gate(-a, b)
            }
            PropFormula::Iff(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let x = self.fresh();
                self.clauses.extend([
                    vec![-x, -a, b],
                    vec![-x, a, -b],
                    vec![x, a, b],
                    vec![x, -a, -b],
                ]);
                x
            }
        }
    }

    fn or_gate(&mut self, a: Lit, b: Lit) -> Lit {
        let x = self.fresh();
        self.clauses.extend([vec![-x, a, b], vec![x, -a], vec![x, -b]]);
        x
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unset,
    True,
    False,
}

fn value(assign: &[Val], l: Lit) -> Val {
    match (assign[l.unsigned_abs() as usize], l > 0) {
        (Val::Unset, _) => Val::Unset,
        (Val::True, true) | (Val::False, false) => Val::True,
        _ => Val::False,
    }
}

fn set(assign: &mut [Val], l: Lit) {
    assign[l.unsigned_abs() as usize] = if l > 0 { Val::True } else { Val::False };
}

/// Unit propagation to fixpoint. `false` on a conflict.
fn propagate(clauses: &[Vec<Lit>], assign: &mut [Val]) -> bool {
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unset = None;
            let mut unset_count = 0;
            let mut satisfied = false;
            for &l in clause {
                match value(assign, l) {
                    Val::True => {
                        satisfied = true;
                        break;
                    }
                    Val::Unset => {
                        unset_count += 1;
                        unset = Some(l);
                    }
                    Val::False => {}
                }
            }
            if satisfied {
                continue;
            }
            match unset_count {
                0 => return false,
                1 => {
                    set(assign, unset.expect("one unset literal"));
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(clauses: &[Vec<Lit>], mut assign: Vec<Val>) -> bool {
    if !propagate(clauses, &mut assign) {
        return false;
    }
    let branch = clauses.iter().find_map(|clause| {
        if clause.iter().any(|&l| value(&assign, l) == Val::True) {
            return None;
        }
        clause.iter().copied().find(|&l| value(&assign, l) == Val::Unset)
    });
    let Some(l) = branch else {
        return true;
    };
    let mut left = assign.clone();
    set(&mut left, l);
    if search(clauses, left) {
        return true;
    }
    set(&mut assign, -l);
    search(clauses, assign)
}

impl Cnf {
    pub fn is_satisfiable(&self) -> bool {
        search(&self.clauses, vec![Val::Unset; self.vars + 1])
    }
}

/// Whether the conjunction of `formulas` has a model.
pub fn satisfiable<'a>(formulas: impl IntoIterator<Item = &'a PropFormula>) -> bool {
    let mut cnf = Cnf::default();
    for f in formulas {
        cnf.add(f);
    }
    cnf.is_satisfiable()
}
