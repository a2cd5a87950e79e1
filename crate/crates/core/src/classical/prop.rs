use crate::syntax::{expression_tokens, Cursor, ErrorKind, ParseError, Tok, Token};
use std::collections::BTreeSet;
use std::fmt;

/// Propositional formula over named atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropFormula {
    True,
    False,
    Atom(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
    Iff(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(name: &str) -> Self {
        PropFormula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            PropFormula::True | PropFormula::False => {}
            PropFormula::Atom(a) => {
                out.insert(a.clone());
            }
            PropFormula::Not(f) => f.collect_atoms(out),
            PropFormula::And(a, b)
            | PropFormula::Or(a, b)
            | PropFormula::Implies(a, b)
            | PropFormula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Truth value under `value`, which assigns every atom.
    pub fn eval(&self, value: &dyn Fn(&str) -> bool) -> bool {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Atom(a) => value(a),
            PropFormula::Not(f) => !f.eval(value),
            PropFormula::And(a, b) => a.eval(value) && b.eval(value),
            PropFormula::Or(a, b) => a.eval(value) || b.eval(value),
            PropFormula::Implies(a, b) => !a.eval(value) || b.eval(value),
            PropFormula::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropFormula::True => f.write_str("true"),
            PropFormula::False => f.write_str("false"),
            PropFormula::Atom(a) => f.write_str(a),
            PropFormula::Not(x) => write!(f, "(not {x})"),
            PropFormula::And(a, b) => write!(f, "(and {a} {b})"),
            PropFormula::Or(a, b) => write!(f, "(or {a} {b})"),
            PropFormula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            PropFormula::Iff(a, b) => write!(f, "(iff {a} {b})"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<PropFormula, ParseError> {
    let (toks, end) = expression_tokens(text)?;
    let mut cur = Cursor::new(&toks, end);
    let f = parse_formula_tokens(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

pub(crate) fn parse_formula_tokens(cur: &mut Cursor<'_>) -> Result<PropFormula, ParseError> {
    let pos = cur.pos();
    match cur.next() {
        None => Err(ParseError::syntax(pos, "expected a formula, found end of input")),
        Some(Token { tok: Tok::Word(w), pos }) => match w.as_str() {
            "true" => Ok(PropFormula::True),
            "false" => Ok(PropFormula::False),
            _ if crate::syntax::is_identifier(w) => Ok(PropFormula::atom(w)),
            _ => Err(ParseError::new(*pos, ErrorKind::BadIdentifier(w.clone()))),
        },
        Some(Token { tok: Tok::LParen, .. }) => {
            let (head, head_pos) = cur.word("a connective")?;
            let f = match head {
                "not" => PropFormula::not(parse_formula_tokens(cur)?),
                "and" | "or" => {
                    let mut args = vec![parse_formula_tokens(cur)?, parse_formula_tokens(cur)?];
                    while !matches!(cur.peek(), Some(Token { tok: Tok::RParen, .. }) | None) {
                        args.push(parse_formula_tokens(cur)?);
                    }
                    let join = if head == "and" { PropFormula::and } else { PropFormula::or };
                    let mut acc = args.pop().expect("at least two arguments");
                    while let Some(f) = args.pop() {
                        acc = join(f, acc);
                    }
                    acc
                }
                "implies" => {
                    let a = parse_formula_tokens(cur)?;
                    PropFormula::implies(a, parse_formula_tokens(cur)?)
                }
                "iff" => {
                    let a = parse_formula_tokens(cur)?;
                    PropFormula::iff(a, parse_formula_tokens(cur)?)
                }
                other => {
                    return Err(ParseError::new(
                        head_pos,
                        ErrorKind::UnknownConstructor(other.to_string()),
                    ))
                }
            };
            cur.expect(&Tok::RParen)?;
            Ok(f)
        }
        Some(t) => Err(ParseError::syntax(t.pos, format!("expected a formula, found {}", t.tok))),
    }
}
