//! Tokenizer and token cursor shared by the concept, formula and KB parsers.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax(String),
    UnknownConstructor(String),
    NegativeCardinality(String),
    BadIdentifier(String),
    BadWeight(String),
    ZeroWeight,
    DialectMixing(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {}", describe(.kind))]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ErrorKind,
}

fn describe(kind: &ErrorKind) -> String {
    match kind {
        ErrorKind::Syntax(m) => format!("syntax error: {m}"),
        ErrorKind::UnknownConstructor(c) => format!("unknown constructor `{c}`"),
        ErrorKind::NegativeCardinality(n) => format!("negative cardinality `{n}`"),
        ErrorKind::BadIdentifier(s) => format!("`{s}` is not an identifier"),
        ErrorKind::BadWeight(m) => format!("bad weight: {m}"),
        ErrorKind::ZeroWeight => {
            "weight with degree 0 carries no information; remove the statement".to_string()
        }
        ErrorKind::DialectMixing(m) => format!("dialect mixing: {m}"),
    }
}

impl ParseError {
    pub fn new(pos: Pos, kind: ErrorKind) -> Self {
        ParseError { pos, kind }
    }

    pub fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        ParseError::new(pos, ErrorKind::Syntax(message.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    Comma,
    Colon,
    At,
    /// `=>`
    Arrow,
    /// `<=>`
    DoubleArrow,
    Newline,
    Word(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::At => f.write_str("`@`"),
            Tok::Arrow => f.write_str("`=>`"),
            Tok::DoubleArrow => f.write_str("`<=>`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Word(w) => write!(f, "`{w}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '/' | '-')
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                out.push(Token { tok: Tok::Newline, pos });
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
                continue;
            }
            '(' | ')' | ',' | ':' | '@' => {
                chars.next();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    _ => Tok::At,
                };
                out.push(Token { tok, pos });
            }
            '=' | '<' => {
                let expected = if c == '=' { "=>" } else { "<=>" };
                for e in expected.chars() {
                    if chars.peek() != Some(&e) {
                        return Err(ParseError::syntax(
                            pos,
                            format!("expected `{expected}`"),
                        ));
                    }
                    chars.next();
                    col += 1;
                }
                let tok = if c == '=' { Tok::Arrow } else { Tok::DoubleArrow };
                out.push(Token { tok, pos });
                continue;
            }
            c if is_word_char(c) => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Token { tok: Tok::Word(word), pos });
                continue;
            }
            other => {
                return Err(ParseError::syntax(pos, format!("unexpected character `{other}`")));
            }
        }
        col += 1;
    }
    Ok(out)
}

/// Cursor over a token slice. Newlines are expected to be filtered out by the
/// caller when parsing a single expression.
pub struct Cursor<'a> {
    toks: &'a [Token],
    idx: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token], end: Pos) -> Self {
        Cursor { toks, idx: 0, end }
    }

    pub fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.idx)
    }

    pub fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.idx);
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Pos, ParseError> {
        match self.next() {
            Some(t) if &t.tok == tok => Ok(t.pos),
            Some(t) => Err(ParseError::syntax(t.pos, format!("expected {tok}, found {}", t.tok))),
            None => Err(ParseError::syntax(self.end, format!("expected {tok}, found end of input"))),
        }
    }

    pub fn word(&mut self, what: &str) -> Result<(&'a str, Pos), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::Word(w), pos }) => Ok((w.as_str(), *pos)),
            Some(t) => Err(ParseError::syntax(t.pos, format!("expected {what}, found {}", t.tok))),
            None => Err(ParseError::syntax(self.end, format!("expected {what}, found end of input"))),
        }
    }

    pub fn identifier(&mut self, what: &str) -> Result<(&'a str, Pos), ParseError> {
        let (w, pos) = self.word(what)?;
        if !is_identifier(w) {
            return Err(ParseError::new(pos, ErrorKind::BadIdentifier(w.to_string())));
        }
        Ok((w, pos))
    }

    pub fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::syntax(t.pos, format!("unexpected trailing {}", t.tok))),
        }
    }
}

/// Tokenizes a single expression; newlines count as whitespace.
pub fn expression_tokens(text: &str) -> Result<(Vec<Token>, Pos), ParseError> {
    let toks: Vec<Token> = tokenize(text)?
        .into_iter()
        .filter(|t| t.tok != Tok::Newline)
        .collect();
    Ok((toks, end_pos(text)))
}

pub fn end_pos(text: &str) -> Pos {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    Pos { line, col }
}
