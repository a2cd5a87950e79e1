//! The ALCN concept language: abstract syntax, s-expression parser and
//! renderer, negation normal form, and TBox internalization.

use crate::syntax::{expression_tokens, Cursor, ErrorKind, ParseError, Tok, Token};
use std::fmt;

macro_rules! name_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

name_type!(
    /// Name of a primitive concept.
    ConceptName
);
name_type!(
    /// Name of a role (binary relation).
    RoleName
);
name_type!(
    /// Name of an individual. Distinct names denote distinct elements.
    IndividualName
);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Top,
    Bottom,
    Primitive(ConceptName),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Not(Box<Concept>),
    All(RoleName, Box<Concept>),
    Some(RoleName, Box<Concept>),
    AtLeast(u32, RoleName),
    AtMost(u32, RoleName),
}

impl Concept {
    pub fn prim(name: &str) -> Concept {
        Concept::Primitive(ConceptName::new(name))
    }

    pub fn and(lhs: Concept, rhs: Concept) -> Concept {
        Concept::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Concept, rhs: Concept) -> Concept {
        Concept::Or(Box::new(lhs), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Concept) -> Concept {
        Concept::Not(Box::new(inner))
    }

    pub fn all(role: &str, filler: Concept) -> Concept {
        Concept::All(RoleName::new(role), Box::new(filler))
    }

    pub fn some(role: &str, filler: Concept) -> Concept {
        Concept::Some(RoleName::new(role), Box::new(filler))
    }

    pub fn at_least(n: u32, role: &str) -> Concept {
        Concept::AtLeast(n, RoleName::new(role))
    }

    pub fn at_most(n: u32, role: &str) -> Concept {
        Concept::AtMost(n, RoleName::new(role))
    }

    /// Conjunction of all items, right-nested; `Top` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Concept>) -> Concept {
        let mut items: Vec<Concept> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Concept::Top;
        };
        while let Some(c) = items.pop() {
            acc = Concept::and(c, acc);
        }
        acc
    }

    pub fn depth(&self) -> usize {
        match self {
            Concept::Top
            | Concept::Bottom
            | Concept::Primitive(_)
            | Concept::AtLeast(..)
            | Concept::AtMost(..) => 0,
            Concept::Not(c) | Concept::All(_, c) | Concept::Some(_, c) => 1 + c.depth(),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// `Not` occurs only directly above a primitive.
    pub fn is_nnf(&self) -> bool {
        match self {
            Concept::Top
            | Concept::Bottom
            | Concept::Primitive(_)
            | Concept::AtLeast(..)
            | Concept::AtMost(..) => true,
            Concept::Not(c) => matches!(**c, Concept::Primitive(_)),
            Concept::All(_, c) | Concept::Some(_, c) => c.is_nnf(),
            Concept::And(a, b) | Concept::Or(a, b) => a.is_nnf() && b.is_nnf(),
        }
    }

    /// A primitive or a negated primitive.
    pub fn is_literal(&self) -> bool {
        match self {
            Concept::Primitive(_) => true,
            Concept::Not(c) => matches!(**c, Concept::Primitive(_)),
            _ => false,
        }
    }
}

/// Semantic complement, before normalization.
pub fn negate(c: &Concept) -> Concept {
    Concept::not(c.clone())
}

pub fn nnf(c: &Concept) -> Concept {
    match c {
        Concept::Top
        | Concept::Bottom
        | Concept::Primitive(_)
        | Concept::AtLeast(..)
        | Concept::AtMost(..) => c.clone(),
        Concept::And(a, b) => Concept::and(nnf(a), nnf(b)),
        Concept::Or(a, b) => Concept::or(nnf(a), nnf(b)),
        Concept::All(r, f) => Concept::All(r.clone(), Box::new(nnf(f))),
        Concept::Some(r, f) => Concept::Some(r.clone(), Box::new(nnf(f))),
        Concept::Not(inner) => nnf_negated(inner),
    }
}

/// NNF of `¬c`.
fn nnf_negated(c: &Concept) -> Concept {
    match c {
        Concept::Top => Concept::Bottom,
        Concept::Bottom => Concept::Top,
        Concept::Primitive(_) => Concept::not(c.clone()),
        Concept::Not(inner) => nnf(inner),
        Concept::And(a, b) => Concept::or(nnf_negated(a), nnf_negated(b)),
        Concept::Or(a, b) => Concept::and(nnf_negated(a), nnf_negated(b)),
        Concept::All(r, f) => Concept::Some(r.clone(), Box::new(nnf_negated(f))),
        Concept::Some(r, f) => Concept::All(r.clone(), Box::new(nnf_negated(f))),
        Concept::AtLeast(0, _) => Concept::Bottom,
        Concept::AtLeast(n, r) => Concept::AtMost(n - 1, r.clone()),
        Concept::AtMost(n, r) => Concept::AtLeast(n + 1, r.clone()),
    }
}

/// Equivalent concept with `top` and `bottom` propagated upwards,
/// `(atleast 0 R)` replaced by `top` and `(all R bottom)` by `(atmost 0 R)`.
/// Preserves NNF.
pub fn simplify(c: &Concept) -> Concept {
    use Concept::{Bottom, Top};
    match c {
        Concept::And(a, b) => match (simplify(a), simplify(b)) {
            (Bottom, _) | (_, Bottom) => Bottom,
            (Top, x) | (x, Top) => x,
            (x, y) => Concept::and(x, y),
        },
        Concept::Or(a, b) => match (simplify(a), simplify(b)) {
            (Top, _) | (_, Top) => Top,
            (Bottom, x) | (x, Bottom) => x,
            (x, y) => Concept::or(x, y),
        },
        Concept::All(r, f) => match simplify(f) {
            Top => Top,
            Bottom => Concept::AtMost(0, r.clone()),
            f => Concept::All(r.clone(), Box::new(f)),
        },
        Concept::Some(r, f) => match simplify(f) {
            Bottom => Bottom,
            f => Concept::Some(r.clone(), Box::new(f)),
        },
        Concept::Not(inner) => match simplify(inner) {
            Top => Bottom,
            Bottom => Top,
            x => Concept::not(x),
        },
        Concept::AtLeast(0, _) => Top,
        _ => c.clone(),
    }
}

/// Terminological axiom `lhs → rhs` (a general concept inclusion).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Axiom {
    pub lhs: Concept,
    pub rhs: Concept,
}

impl Axiom {
    pub fn new(lhs: Concept, rhs: Concept) -> Self {
        Axiom { lhs, rhs }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    ConceptMembership {
        individual: IndividualName,
        concept: Concept,
    },
    RoleMembership {
        subject: IndividualName,
        object: IndividualName,
        role: RoleName,
    },
}

impl Assertion {
    pub fn member(individual: &str, concept: Concept) -> Self {
        Assertion::ConceptMembership {
            individual: IndividualName::new(individual),
            concept,
        }
    }

    pub fn related(subject: &str, object: &str, role: &str) -> Self {
        Assertion::RoleMembership {
            subject: IndividualName::new(subject),
            object: IndividualName::new(object),
            role: RoleName::new(role),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::ConceptMembership { individual, concept } => {
                write!(f, "{individual} : {concept}")
            }
            Assertion::RoleMembership { subject, object, role } => {
                write!(f, "({subject}, {object}) : {role}")
            }
        }
    }
}

/// NNF of the conjunction of `¬C ⊔ D` over all axioms; `Top` for an empty TBox.
pub fn internalize<'a>(tbox: impl IntoIterator<Item = &'a Axiom>) -> Concept {
    let parts = tbox
        .into_iter()
        .map(|ax| Concept::or(negate(&ax.lhs), ax.rhs.clone()));
    simplify(&nnf(&Concept::conjunction(parts)))
}

pub fn parse_concept(text: &str) -> Result<Concept, ParseError> {
    let (toks, end) = expression_tokens(text)?;
    let mut cur = Cursor::new(&toks, end);
    let c = parse_concept_tokens(&mut cur)?;
    cur.finish()?;
    Ok(c)
}

pub(crate) fn parse_concept_tokens(cur: &mut Cursor<'_>) -> Result<Concept, ParseError> {
    let pos = cur.pos();
    match cur.next() {
        None => Err(ParseError::syntax(pos, "expected a concept, found end of input")),
        Some(Token { tok: Tok::Word(w), pos }) => match w.as_str() {
            "top" => Ok(Concept::Top),
            "bottom" => Ok(Concept::Bottom),
            _ if crate::syntax::is_identifier(w) => Ok(Concept::prim(w)),
            _ => Err(ParseError::new(*pos, ErrorKind::BadIdentifier(w.clone()))),
        },
        Some(Token { tok: Tok::LParen, .. }) => {
            let (head, head_pos) = cur.word("a constructor")?;
            let c = match head {
                "and" | "or" => {
                    let mut args = vec![parse_concept_tokens(cur)?, parse_concept_tokens(cur)?];
                    while !matches!(cur.peek(), Some(Token { tok: Tok::RParen, .. }) | None) {
                        args.push(parse_concept_tokens(cur)?);
                    }
                    let join = if head == "and" { Concept::and } else { Concept::or };
                    let mut acc = args.pop().expect("at least two arguments");
                    while let Some(c) = args.pop() {
                        acc = join(c, acc);
                    }
                    acc
                }
                "not" => Concept::not(parse_concept_tokens(cur)?),
                "all" | "some" => {
                    let (role, _) = cur.identifier("a role name")?;
                    let filler = parse_concept_tokens(cur)?;
                    if head == "all" {
                        Concept::all(role, filler)
                    } else {
                        Concept::some(role, filler)
                    }
                }
                "atleast" | "atmost" => {
                    let (n, n_pos) = cur.word("a cardinality")?;
                    let n = parse_cardinality(n, n_pos)?;
                    let (role, _) = cur.identifier("a role name")?;
                    if head == "atleast" {
                        Concept::at_least(n, role)
                    } else {
                        Concept::at_most(n, role)
                    }
                }
                other => {
                    return Err(ParseError::new(
                        head_pos,
                        ErrorKind::UnknownConstructor(other.to_string()),
                    ))
                }
            };
            cur.expect(&Tok::RParen)?;
            Ok(c)
        }
        Some(t) => Err(ParseError::syntax(t.pos, format!("expected a concept, found {}", t.tok))),
    }
}

fn parse_cardinality(text: &str, pos: crate::syntax::Pos) -> Result<u32, ParseError> {
    if let Some(rest) = text.strip_prefix('-') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::new(pos, ErrorKind::NegativeCardinality(text.to_string())));
        }
    }
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::syntax(pos, format!("`{text}` is not a cardinality")));
    }
    text.parse()
        .map_err(|_| ParseError::syntax(pos, format!("cardinality `{text}` is too large")))
}

pub fn render(c: &Concept) -> String {
    c.to_string()
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Top => f.write_str("top"),
            Concept::Bottom => f.write_str("bottom"),
            Concept::Primitive(n) => write!(f, "{n}"),
            Concept::And(a, b) => write!(f, "(and {a} {b})"),
            Concept::Or(a, b) => write!(f, "(or {a} {b})"),
            Concept::Not(c) => write!(f, "(not {c})"),
            Concept::All(r, c) => write!(f, "(all {r} {c})"),
            Concept::Some(r, c) => write!(f, "(some {r} {c})"),
            Concept::AtLeast(n, r) => write!(f, "(atleast {n} {r})"),
            Concept::AtMost(n, r) => write!(f, "(atmost {n} {r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pos;
    use proptest::prelude::*;

    fn p(n: &str) -> Concept {
        Concept::prim(n)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_concept("(and person rich)").unwrap(), Concept::and(p("person"), p("rich")));
        assert_eq!(
            parse_concept("(some owns porsche)").unwrap(),
            Concept::some("owns", p("porsche"))
        );
        assert_eq!(parse_concept("(atmost 2 child)").unwrap(), Concept::at_most(2, "child"));
        assert_eq!(parse_concept(" top ").unwrap(), Concept::Top);
        assert_eq!(
            parse_concept("(or A B C)").unwrap(),
            Concept::or(p("A"), Concept::or(p("B"), p("C")))
        );
    }

    #[test]
    fn parse_errors() {
        let e = parse_concept("(and A\n  (maybe B))").unwrap_err();
        assert_eq!(e.kind, ErrorKind::UnknownConstructor("maybe".into()));
        assert_eq!(e.pos, Pos { line: 2, col: 4 });

        let e = parse_concept("(atleast -1 R)").unwrap_err();
        assert_eq!(e.kind, ErrorKind::NegativeCardinality("-1".into()));

        assert!(matches!(parse_concept("(and A)").unwrap_err().kind, ErrorKind::Syntax(_)));
        assert!(matches!(parse_concept("(not A B)").unwrap_err().kind, ErrorKind::Syntax(_)));
        assert!(matches!(parse_concept("A B").unwrap_err().kind, ErrorKind::Syntax(_)));
        assert!(matches!(parse_concept("").unwrap_err().kind, ErrorKind::Syntax(_)));
        assert!(matches!(parse_concept("(atleast x R)").unwrap_err().kind, ErrorKind::Syntax(_)));
        assert!(matches!(
            parse_concept("0.5").unwrap_err().kind,
            ErrorKind::BadIdentifier(_)
        ));
    }

    #[test]
    fn negate_examples() {
        assert_eq!(negate(&p("A")), Concept::not(p("A")));
        assert_eq!(nnf(&negate(&Concept::Top)), Concept::Bottom);
        assert_eq!(nnf(&negate(&Concept::at_most(2, "R"))), Concept::at_least(3, "R"));
    }

    #[test]
    fn nnf_examples() {
        assert_eq!(
            nnf(&Concept::not(Concept::and(p("A"), p("B")))),
            Concept::or(Concept::not(p("A")), Concept::not(p("B")))
        );
        assert_eq!(
            nnf(&Concept::not(Concept::some("R", p("A")))),
            Concept::all("R", Concept::not(p("A")))
        );
        assert_eq!(nnf(&Concept::not(Concept::at_least(0, "R"))), Concept::Bottom);
        assert_eq!(nnf(&Concept::not(Concept::at_least(3, "R"))), Concept::at_most(2, "R"));
        assert_eq!(nnf(&Concept::not(Concept::not(p("A")))), p("A"));
    }

    #[test]
    fn simplify_examples() {
        let s = |c: Concept| simplify(&c);
        assert_eq!(s(Concept::some("R", Concept::and(p("A"), Concept::Bottom))), Concept::Bottom);
        assert_eq!(s(Concept::or(Concept::some("S", Concept::Bottom), p("A"))), p("A"));
        assert_eq!(s(Concept::all("R", Concept::or(p("A"), Concept::Top))), Concept::Top);
        assert_eq!(s(Concept::and(Concept::at_least(0, "R"), p("B"))), p("B"));
        assert_eq!(s(Concept::not(Concept::Top)), Concept::Bottom);
        assert_eq!(s(Concept::all("R", Concept::and(Concept::Bottom, p("A")))), Concept::at_most(0, "R"));
        assert_eq!(s(Concept::some("R", Concept::Top)), Concept::some("R", Concept::Top));
    }

    #[test]
    fn internalize_examples() {
        assert_eq!(internalize(&[]), Concept::Top);
        let ab = Axiom::new(p("A"), p("B"));
        let bc = Axiom::new(p("B"), p("C"));
        assert_eq!(internalize([&ab]), Concept::or(Concept::not(p("A")), p("B")));
        assert_eq!(
            internalize([&ab, &bc]),
            Concept::and(
                Concept::or(Concept::not(p("A")), p("B")),
                Concept::or(Concept::not(p("B")), p("C"))
            )
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Concept::and(p("A"), p("B"))), "(and A B)");
        assert_eq!(render(&Concept::at_least(1, "child")), "(atleast 1 child)");
        assert_eq!(
            render(&Concept::all("child", p("college_grad"))),
            "(all child college_grad)"
        );
    }

    pub(crate) fn arb_concept(depth: u32) -> impl Strategy<Value = Concept> {
        let leaf = prop_oneof![
            Just(Concept::Top),
            Just(Concept::Bottom),
            "[A-C][a-z0-9_]{0,3}".prop_map(|n| Concept::prim(&n)),
            (0u32..5, "[RS]").prop_map(|(n, r)| Concept::at_least(n, &r)),
            (0u32..5, "[RS]").prop_map(|(n, r)| Concept::at_most(n, &r)),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
                inner.clone().prop_map(Concept::not),
                ("[RS]", inner.clone()).prop_map(|(r, c)| Concept::all(&r, c)),
                ("[RS]", inner).prop_map(|(r, c)| Concept::some(&r, c)),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(c in arb_concept(6)) {
            prop_assert_eq!(parse_concept(&render(&c)).unwrap(), c);
        }

        #[test]
        fn nnf_shape_and_idempotence(c in arb_concept(6)) {
            let n = nnf(&c);
            prop_assert!(n.is_nnf());
            prop_assert_eq!(nnf(&n), n);
        }
    }
}
