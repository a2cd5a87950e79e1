//! Knowledge-base files and query statements.
//!
//! A file is a sequence of weighted statements, one per line:
//!
//! ```text
//! dialect dl                                   # optional, must come first
//! axiom father <=> (and man (atleast 1 child)) @ N 1
//! axiom rich_person => golfer @ P 0.7
//! assert Tom : (not car_fanatic) @ N 0.7
//! assert (Tom, 911) : owns @ N 1
//! ```
//!
//! Propositional files use `formula <expr> @ W` instead. A statement
//! continues onto following lines while its parentheses are open. Weights are
//! `N x` or `P x` with `x` a decimal or a fraction in (0, 1]. Without a
//! `dialect` line the dialect is that of the first statement (`prop` for an
//! empty file).

use crate::classical::prop::parse_formula_tokens;
use crate::classical::{ClassicalStatement, Dialect};
use crate::concept::{parse_concept_tokens, Assertion, Axiom};
use crate::possibilistic::{Mode, PossFormula, PossKb, Weight};
use crate::rational::{parse_rational, Rational};
use crate::syntax::{tokenize, Cursor, ErrorKind, ParseError, Pos, Tok, Token};
use num_traits::{One, Zero};
use std::fmt;

/// A statement together with the position of its first token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub formula: PossFormula,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbDocument {
    pub dialect: Dialect,
    /// `<=>` axioms appear as two entries sharing a position.
    pub statements: Vec<Located>,
}

impl KbDocument {
    pub fn to_kb(&self) -> PossKb {
        let formulas = self.statements.iter().map(|s| s.formula.clone()).collect();
        PossKb::new(self.dialect, formulas).expect("parser enforces a single dialect")
    }
}

/// Every error found in a document, in source order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct Diagnostics(pub Vec<ParseError>);

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A statement to ask about, weighted or not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub statement: ClassicalStatement,
    pub weight: Option<Weight>,
}

impl Query {
    /// The weighted form, or an error naming the missing weight.
    pub fn weighted(self) -> Result<PossFormula, ParseError> {
        match self.weight {
            Some(w) => Ok(PossFormula::new(self.statement, w)),
            None => Err(ParseError::new(
                Pos { line: 1, col: 1 },
                ErrorKind::BadWeight("this query needs a weight, e.g. `@ N 0.5`".to_string()),
            )),
        }
    }
}

enum Line {
    Dialect(Dialect),
    Statements(Vec<ClassicalStatement>, Option<Weight>),
}

pub fn parse_kb(text: &str) -> Result<PossKb, Diagnostics> {
    parse_document(text).map(|d| d.to_kb())
}

pub fn parse_document(text: &str) -> Result<KbDocument, Diagnostics> {
    let toks = tokenize(text).map_err(|e| Diagnostics(vec![e]))?;
    let mut errors = Vec::new();
    let mut declared: Option<Dialect> = None;
    let mut inferred: Option<Dialect> = None;
    let mut statements = Vec::new();

    for (i, group) in statement_groups(&toks).into_iter().enumerate() {
        let start = group[0].pos;
        let end = group.last().map(|t| t.pos).unwrap_or(start);
        let mut cur = Cursor::new(&group, end);
        let line = parse_line(&mut cur, true).and_then(|l| cur.finish().map(|_| l));
        match line {
            Err(e) => errors.push(e),
            Ok(Line::Dialect(d)) => {
                if i > 0 {
                    errors.push(ParseError::syntax(start, "`dialect` must be the first statement"));
                } else {
                    declared = Some(d);
                }
            }
            Ok(Line::Statements(stmts, weight)) => {
                let Some(weight) = weight else {
                    errors.push(ParseError::new(
                        end,
                        ErrorKind::BadWeight("statement has no `@ N x` or `@ P x` weight".to_string()),
                    ));
                    continue;
                };
                let dialect = stmts[0].dialect();
                let expected = *declared.get_or_insert_with(|| *inferred.get_or_insert(dialect));
                if dialect != expected {
                    errors.push(ParseError::new(
                        start,
                        ErrorKind::DialectMixing(format!("{dialect} statement in a {expected} knowledge base")),
                    ));
                    continue;
                }
                for s in stmts {
                    statements.push(Located { formula: PossFormula::new(s, weight), pos: start });
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(Diagnostics(errors));
    }
    Ok(KbDocument { dialect: declared.unwrap_or(Dialect::Prop), statements })
}

/// Splits at newlines outside parentheses, dropping the newlines.
fn statement_groups(toks: &[Token]) -> Vec<Vec<Token>> {
    let mut groups = Vec::new();
    let mut current = Vec::new();
    let mut depth = 0usize;
    for t in toks {
        match t.tok {
            Tok::Newline if depth == 0 => {
                if !current.is_empty() {
                    groups.push(std::mem::take(&mut current));
                }
            }
            Tok::Newline => {}
            Tok::LParen => {
                depth += 1;
                current.push(t.clone());
            }
            Tok::RParen => {
                depth = depth.saturating_sub(1);
                current.push(t.clone());
            }
            _ => current.push(t.clone()),
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
}

fn parse_line(cur: &mut Cursor<'_>, allow_equivalence: bool) -> Result<Line, ParseError> {
    let (keyword, pos) = cur.word("`axiom`, `assert`, `formula` or `dialect`")?;
    let stmts = match keyword {
        "dialect" => {
            let (d, pos) = cur.word("a dialect")?;
            return match d {
                "dl" => Ok(Line::Dialect(Dialect::Dl)),
                "prop" => Ok(Line::Dialect(Dialect::Prop)),
                other => Err(ParseError::syntax(pos, format!("unknown dialect `{other}`, expected `dl` or `prop`"))),
            };
        }
        "axiom" => {
            let lhs = parse_concept_tokens(cur)?;
            let arrow = cur.pos();
            match cur.next().map(|t| &t.tok) {
                Some(Tok::Arrow) => vec![Axiom::new(lhs, parse_concept_tokens(cur)?).into()],
                Some(Tok::DoubleArrow) if allow_equivalence => {
                    let rhs = parse_concept_tokens(cur)?;
                    vec![Axiom::new(lhs.clone(), rhs.clone()).into(), Axiom::new(rhs, lhs).into()]
                }
                Some(Tok::DoubleArrow) => {
                    return Err(ParseError::syntax(arrow, "`<=>` is two statements; query each direction with `=>`"))
                }
                _ => return Err(ParseError::syntax(arrow, "expected `=>` or `<=>`")),
            }
        }
        "assert" => {
            if matches!(cur.peek(), Some(Token { tok: Tok::LParen, .. })) {
                cur.next();
                let (a, _) = cur.identifier("an individual")?;
                cur.expect(&Tok::Comma)?;
                let (b, _) = cur.identifier("an individual")?;
                cur.expect(&Tok::RParen)?;
                cur.expect(&Tok::Colon)?;
                let (role, _) = cur.identifier("a role name")?;
                vec![Assertion::related(a, b, role).into()]
            } else {
                let (a, _) = cur.identifier("an individual")?;
                cur.expect(&Tok::Colon)?;
                vec![Assertion::member(a, parse_concept_tokens(cur)?).into()]
            }
        }
        "formula" => vec![parse_formula_tokens(cur)?.into()],
        other => {
            return Err(ParseError::syntax(
                pos,
                format!("unknown statement `{other}`, expected `axiom`, `assert` or `formula`"),
            ))
        }
    };
    let weight = match cur.peek() {
        Some(Token { tok: Tok::At, .. }) => {
            cur.next();
            Some(parse_weight(cur)?)
        }
        _ => None,
    };
    Ok(Line::Statements(stmts, weight))
}

fn parse_weight(cur: &mut Cursor<'_>) -> Result<Weight, ParseError> {
    let (mode, mode_pos) = cur.word("`N` or `P`")?;
    let mode = match mode {
        "N" => Mode::Necessity,
        "P" => Mode::Possibility,
        other => {
            return Err(ParseError::new(
                mode_pos,
                ErrorKind::BadWeight(format!("`{other}` is not a weight mode, expected `N` or `P`")),
            ))
        }
    };
    let (degree, pos) = cur.word("a degree")?;
    let degree: Rational =
        parse_rational(degree).map_err(|e| ParseError::new(pos, ErrorKind::BadWeight(e.to_string())))?;
    if degree.is_zero() {
        return Err(ParseError::new(pos, ErrorKind::ZeroWeight));
    }
    if degree > Rational::one() {
        return Err(ParseError::new(pos, ErrorKind::BadWeight(format!("degree `{degree}` exceeds 1"))));
    }
    Ok(Weight::new(mode, degree).expect("degree checked to lie in (0, 1]"))
}

/// Parses one statement, with or without a weight. `<=>` is rejected.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let toks: Vec<Token> = tokenize(text)?.into_iter().filter(|t| t.tok != Tok::Newline).collect();
    let mut cur = Cursor::new(&toks, crate::syntax::end_pos(text));
    let line = parse_line(&mut cur, false)?;
    cur.finish()?;
    match line {
        Line::Dialect(_) => Err(ParseError::syntax(Pos { line: 1, col: 1 }, "a `dialect` line is not a query")),
        Line::Statements(mut stmts, weight) => Ok(Query { statement: stmts.remove(0), weight }),
    }
}

/// A document that [`parse_kb`] reads back to `kb`.
pub fn render_kb(kb: &PossKb) -> String {
    let mut out = format!("dialect {}\n", kb.dialect());
    for f in kb.formulas() {
        out.push_str(&f.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::parse_concept;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn errors(text: &str) -> Vec<ParseError> {
        parse_kb(text).unwrap_err().0
    }

    #[test]
    fn equivalence_expands_to_two_axioms() {
        let kb = parse_kb("axiom father <=> (and man (atleast 1 child)) @ N 1").unwrap();
        let father = parse_concept("father").unwrap();
        let rhs = parse_concept("(and man (atleast 1 child))").unwrap();
        let n1 = Weight::necessity(r(1, 1)).unwrap();
        assert_eq!(kb.dialect(), Dialect::Dl);
        assert_eq!(
            kb.formulas(),
            [
                PossFormula::new(Axiom::new(father.clone(), rhs.clone()), n1),
                PossFormula::new(Axiom::new(rhs, father), n1),
            ]
        );
    }

    #[test]
    fn membership_with_decimal_weight() {
        let kb = parse_kb("assert Tom : (not car_fanatic) @ N 0.7").unwrap();
        let expected = PossFormula::new(
            Assertion::member("Tom", parse_concept("(not car_fanatic)").unwrap()),
            Weight::necessity(r(7, 10)).unwrap(),
        );
        assert_eq!(kb.formulas(), [expected]);
    }

    #[test]
    fn role_assertions_and_fractions() {
        let kb = parse_kb("assert (Tom, 911) : owns @ P 2/3").unwrap();
        assert_eq!(
            kb.formulas(),
            [PossFormula::new(Assertion::related("Tom", "911", "owns"), Weight::possibility(r(2, 3)).unwrap())]
        );
    }

    #[test]
    fn zero_weights_are_rejected() {
        let e = errors("formula (implies p q) @ N 0");
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, ErrorKind::ZeroWeight);
        assert_eq!(e[0].pos, Pos { line: 1, col: 27 });
    }

    #[test]
    fn bad_weights_are_located() {
        let e = errors("formula p @ N 1.5\nformula q @ X 0.5\nformula r @ P abc\nformula s");
        assert_eq!(e.len(), 4);
        assert!(e.iter().all(|e| matches!(e.kind, ErrorKind::BadWeight(_))));
        assert_eq!(e.iter().map(|e| e.pos.line).collect::<Vec<_>>(), [1, 2, 3, 4]);
    }

    #[test]
    fn dialects_cannot_mix() {
        let e = errors("formula p @ N 1\nassert a : A @ N 1");
        assert_eq!(e.len(), 1);
        assert!(matches!(e[0].kind, ErrorKind::DialectMixing(_)));
        assert_eq!(e[0].pos, Pos { line: 2, col: 1 });

        let e = errors("dialect dl\nformula p @ N 1");
        assert!(matches!(e[0].kind, ErrorKind::DialectMixing(_)));
        assert!(!errors("formula p @ N 1\ndialect prop").is_empty());
    }

    #[test]
    fn comments_blank_lines_and_continuations() {
        let text = "# a comment\n\ndialect prop\nformula (and p   # trailing\n   q) @ N 1/2\n\nformula r @ P 1\n";
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.statements.len(), 2);
        assert_eq!(doc.statements[0].pos, Pos { line: 4, col: 1 });
        assert_eq!(doc.statements[1].pos, Pos { line: 7, col: 1 });
    }

    #[test]
    fn duplicates_with_different_weights_are_kept() {
        let kb = parse_kb("formula p @ N 0.3\nformula p @ N 0.6\nformula p @ N 0.3").unwrap();
        assert_eq!(kb.formulas().len(), 3);
    }

    #[test]
    fn empty_documents_are_propositional() {
        assert_eq!(parse_kb("# nothing\n").unwrap(), PossKb::empty(Dialect::Prop));
        assert_eq!(parse_kb("dialect dl\n").unwrap(), PossKb::empty(Dialect::Dl));
    }

    #[test]
    fn unbalanced_statements_report_the_end() {
        let e = errors("formula (and p q @ N 1");
        assert!(matches!(e[0].kind, ErrorKind::Syntax(_)));
    }

    #[test]
    fn queries() {
        let q = parse_query("assert Tom : golfer @ P 0.7").unwrap();
        assert_eq!(q.weight, Some(Weight::possibility(r(7, 10)).unwrap()));
        let q = parse_query("assert John : successful_father").unwrap();
        assert_eq!(q.weight, None);
        assert!(q.clone().weighted().is_err());
        assert!(parse_query("axiom a <=> b").is_err());
        assert!(parse_query("axiom a => b @ N 1 extra").is_err());
        assert!(parse_query("formula p @ N 0").is_err());
    }

    #[test]
    fn rendering_round_trips() {
        let text = "axiom father <=> (and man (atleast 1 child)) @ N 1\n\
                    axiom rich => (or golfer (some owns (and car (atmost 2 wheel)))) @ P 1/3\n\
                    assert (a, b) : r @ N 0.25\nassert a : (all r bottom) @ P 1\n";
        let kb = parse_kb(text).unwrap();
        assert_eq!(parse_kb(&render_kb(&kb)).unwrap(), kb);

        let mut g = crate::fuzz::rng(5);
        for _ in 0..100 {
            let (kb, _) = crate::fuzz::mixed_kb(&mut g);
            assert_eq!(parse_kb(&render_kb(&kb)).unwrap(), kb);
        }
    }
}
