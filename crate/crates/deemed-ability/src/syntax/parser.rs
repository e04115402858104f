//! Recursive-descent parsers for both formula layers.
//!
//! Concrete syntax, loosest to tightest:
//!
//! ```text
//! ->                      implication, right associative
//! |                       disjunction, left associative
//! &                       conjunction, left associative
//! U S W                   temporal layer only; non-associative, chains must
//!                         be parenthesized
//! ! F G H P  Dabl{..} ..  prefix operators and modalities
//! p  T  _|_  ( .. )       atoms
//! ```
//!
//! `Task{G}(a; b)` and `Agree{G}(a; b)` take their two arguments in
//! parentheses, separated by `;`.
//!
//! In the temporal layer an atom is a monolithic static formula: a
//! proposition or a modality application. `T` and `_|_` are Boolean
//! combinations by definition and are rejected there (use the pinned-true
//! proposition `__true` if a temporal tautology atom is needed), and a
//! parenthesized group that contains no temporal operator and has a
//! top-level `&`, `|` or `->` is read as a static Boolean combination, so
//! it cannot stand directly as an operand of `U`, `S` or `W`: `(p & q) U r`
//! is rejected while `(!p) U r`, `Conf{a}(p & q) U r` and
//! `((p U p) & q) U r` are accepted.

use super::{Group, StaticFormula, TemporalFormula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("parse error at byte {offset}: found {found}, expected {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error(
        "monolithic violation at byte {offset}: `{formula}` is a Boolean combination \
         where the temporal grammar requires a monolithic atom"
    )]
    MonolithicViolation { offset: usize, formula: String },
}

impl ParseError {
    fn syntax(offset: usize, found: impl Into<String>, expected: &[&str]) -> Self {
        ParseError::Syntax {
            offset,
            found: found.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Parses a static formula.
pub fn parse_static(input: &str) -> Result<StaticFormula, ParseError> {
    let mut p = Parser::new(input)?;
    let f = p.static_implies()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a temporal formula. Sugar (`F G W H P`, `|`, `->`) is expanded
/// during parsing; the result contains only the core constructors.
pub fn parse_temporal(input: &str) -> Result<TemporalFormula, ParseError> {
    let mut p = Parser::new(input)?;
    let f = p.temporal_implies()?;
    p.expect_end()?;
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Ident,
    Dabl,
    Conf,
    Disc,
    Brings,
    Attempts,
    Task,
    Agree,
    Top,
    Bottom,
    Until,
    Since,
    Weak,
    Eventually,
    Globally,
    HasAlways,
    Past,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
}

impl Tok {
    fn is_temporal_op(self) -> bool {
        matches!(
            self,
            Tok::Until | Tok::Since | Tok::Weak | Tok::Eventually | Tok::Globally
                | Tok::HasAlways
                | Tok::Past
        )
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
    text: String,
}

fn keyword(text: &str) -> Option<Tok> {
    Some(match text {
        "Dabl" => Tok::Dabl,
        "Conf" => Tok::Conf,
        "Disc" => Tok::Disc,
        "E" => Tok::Brings,
        "Att" => Tok::Attempts,
        "Task" => Tok::Task,
        "Agree" => Tok::Agree,
        "T" => Tok::Top,
        "U" => Tok::Until,
        "S" => Tok::Since,
        "W" => Tok::Weak,
        "F" => Tok::Eventually,
        "G" => Tok::Globally,
        "H" => Tok::HasAlways,
        "P" => Tok::Past,
        _ => return None,
    })
}

fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let is_ident = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'!' => {
                i += 1;
                Tok::Bang
            }
            b'&' => {
                i += 1;
                Tok::Amp
            }
            b'|' => {
                i += 1;
                Tok::Pipe
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Tok::Arrow
                } else {
                    return Err(ParseError::syntax(i, "'-'", &["'->'"]));
                }
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'{' => {
                i += 1;
                Tok::LBrace
            }
            b'}' => {
                i += 1;
                Tok::RBrace
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b';' => {
                i += 1;
                Tok::Semi
            }
            b'_' if bytes[i..].starts_with(b"_|_")
                && bytes.get(i + 3).is_none_or(|b| !is_ident(*b)) =>
            {
                i += 3;
                Tok::Bottom
            }
            b if is_ident(b) => {
                while i < bytes.len() && is_ident(bytes[i]) {
                    i += 1;
                }
                let text = &input[start..i];
                keyword(text).unwrap_or(Tok::Ident)
            }
            other => {
                return Err(ParseError::syntax(
                    i,
                    format!("{:?}", other as char),
                    &["a formula token"],
                ));
            }
        };
        tokens.push(Token {
            tok,
            offset: start,
            text: input[start..i].to_string(),
        });
    }
    Ok(tokens)
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Result<Self, ParseError> {
        Ok(Parser {
            input,
            tokens: lex(input)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_tok(&self) -> Option<Tok> {
        self.peek().map(|t| t.tok)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek_tok() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn found(&self) -> (usize, String) {
        match self.peek() {
            Some(t) => (t.offset, format!("'{}'", t.text)),
            None => (self.input.len(), "end of input".to_string()),
        }
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let (offset, found) = self.found();
        ParseError::syntax(offset, found, expected)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek_tok() == Some(tok) {
            Ok(self.advance())
        } else {
            Err(self.err(&[what]))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.err(&["end of input"]))
        }
    }

    // ---- static layer ----

    fn static_implies(&mut self) -> Result<StaticFormula, ParseError> {
        let l = self.static_or()?;
        if self.eat(Tok::Arrow) {
            let r = self.static_implies()?;
            Ok(StaticFormula::implies(l, r))
        } else {
            Ok(l)
        }
    }

    fn static_or(&mut self) -> Result<StaticFormula, ParseError> {
        let mut l = self.static_and()?;
        while self.eat(Tok::Pipe) {
            let r = self.static_and()?;
            l = StaticFormula::or(l, r);
        }
        Ok(l)
    }

    fn static_and(&mut self) -> Result<StaticFormula, ParseError> {
        let mut l = self.static_unary()?;
        while self.eat(Tok::Amp) {
            let r = self.static_unary()?;
            l = StaticFormula::and(l, r);
        }
        Ok(l)
    }

    fn static_unary(&mut self) -> Result<StaticFormula, ParseError> {
        match self.peek_tok() {
            Some(Tok::Bang) => {
                self.advance();
                Ok(StaticFormula::not(self.static_unary()?))
            }
            Some(Tok::Dabl) => self.unary_modality(StaticFormula::dabl),
            Some(Tok::Conf) => self.unary_modality(StaticFormula::conf),
            Some(Tok::Disc) => self.unary_modality(StaticFormula::disc),
            Some(Tok::Brings) => self.unary_modality(StaticFormula::brings),
            Some(Tok::Attempts) => self.unary_modality(StaticFormula::attempts),
            Some(Tok::Task) => self.binary_modality(StaticFormula::task),
            Some(Tok::Agree) => self.binary_modality(StaticFormula::agree),
            _ => self.static_atom(),
        }
    }

    fn unary_modality(
        &mut self,
        build: fn(Group, StaticFormula) -> StaticFormula,
    ) -> Result<StaticFormula, ParseError> {
        self.advance();
        let g = self.group()?;
        let arg = self.static_unary()?;
        Ok(build(g, arg))
    }

    fn binary_modality(
        &mut self,
        build: fn(Group, StaticFormula, StaticFormula) -> StaticFormula,
    ) -> Result<StaticFormula, ParseError> {
        self.advance();
        let g = self.group()?;
        self.expect(Tok::LParen, "'('")?;
        let a = self.static_implies()?;
        self.expect(Tok::Semi, "';'")?;
        let b = self.static_implies()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(build(g, a, b))
    }

    fn static_atom(&mut self) -> Result<StaticFormula, ParseError> {
        match self.peek_tok() {
            Some(Tok::Ident) => Ok(StaticFormula::Prop(self.advance().text)),
            Some(Tok::Top) => {
                self.advance();
                Ok(StaticFormula::Top)
            }
            Some(Tok::Bottom) => {
                self.advance();
                Ok(StaticFormula::Bottom)
            }
            Some(Tok::LParen) => {
                self.advance();
                let f = self.static_implies()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ => Err(self.err(&["a formula"])),
        }
    }

    fn group(&mut self) -> Result<Group, ParseError> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut agents = Vec::new();
        if !self.eat(Tok::RBrace) {
            loop {
                let t = match self.peek() {
                    Some(t) if super::valid_name(&t.text) => self.advance(),
                    _ => return Err(self.err(&["an agent name"])),
                };
                agents.push(super::AgentId::new(t.text).expect("validated above"));
                if self.eat(Tok::RBrace) {
                    break;
                }
                self.expect(Tok::Comma, "','")?;
            }
        }
        Ok(Group::new(agents))
    }

    // ---- temporal layer ----

    fn temporal_implies(&mut self) -> Result<TemporalFormula, ParseError> {
        let l = self.temporal_or()?;
        if self.eat(Tok::Arrow) {
            let r = self.temporal_implies()?;
            Ok(TemporalFormula::implies(l, r))
        } else {
            Ok(l)
        }
    }

    fn temporal_or(&mut self) -> Result<TemporalFormula, ParseError> {
        let mut l = self.temporal_and()?;
        while self.eat(Tok::Pipe) {
            let r = self.temporal_and()?;
            l = TemporalFormula::or(l, r);
        }
        Ok(l)
    }

    fn temporal_and(&mut self) -> Result<TemporalFormula, ParseError> {
        let mut l = self.temporal_until()?;
        while self.eat(Tok::Amp) {
            let r = self.temporal_until()?;
            l = TemporalFormula::and(l, r);
        }
        Ok(l)
    }

    fn temporal_until(&mut self) -> Result<TemporalFormula, ParseError> {
        let (l, l_group) = self.temporal_unary()?;
        let op = match self.peek_tok() {
            Some(t @ (Tok::Until | Tok::Since | Tok::Weak)) => t,
            _ => return Ok(l),
        };
        self.reject_static_boolean_operand(l_group)?;
        self.advance();
        let (r, r_group) = self.temporal_unary()?;
        self.reject_static_boolean_operand(r_group)?;
        if matches!(self.peek_tok(), Some(Tok::Until | Tok::Since | Tok::Weak)) {
            return Err(self.err(&["no second U/S/W (non-associative; parenthesize the chain)"]));
        }
        Ok(match op {
            Tok::Until => TemporalFormula::until(l, r),
            Tok::Since => TemporalFormula::since(l, r),
            _ => TemporalFormula::weak_until(l, r),
        })
    }

    /// Parses a prefix chain over a temporal atom. The second component
    /// reports a parenthesized group that reads as a purely static Boolean
    /// combination, which may not stand directly as a `U`/`S`/`W` operand.
    fn temporal_unary(&mut self) -> Result<(TemporalFormula, Option<StaticBooleanGroup>), ParseError> {
        match self.peek_tok() {
            Some(Tok::Bang) => {
                self.advance();
                let (f, _) = self.temporal_unary()?;
                Ok((TemporalFormula::not(f), None))
            }
            Some(Tok::Eventually) => {
                self.advance();
                let (f, _) = self.temporal_unary()?;
                Ok((TemporalFormula::eventually(f), None))
            }
            Some(Tok::Globally) => {
                self.advance();
                let (f, _) = self.temporal_unary()?;
                Ok((TemporalFormula::globally(f), None))
            }
            Some(Tok::HasAlways) => {
                self.advance();
                let (f, _) = self.temporal_unary()?;
                Ok((TemporalFormula::has_always(f), None))
            }
            Some(Tok::Past) => {
                self.advance();
                let (f, _) = self.temporal_unary()?;
                Ok((TemporalFormula::past(f), None))
            }
            _ => self.temporal_atom(),
        }
    }

    fn temporal_atom(&mut self) -> Result<(TemporalFormula, Option<StaticBooleanGroup>), ParseError> {
        match self.peek_tok() {
            Some(Tok::LParen) => {
                let open = self.advance();
                let shape = self.scan_group_shape();
                let f = self.temporal_implies()?;
                let close = self.expect(Tok::RParen, "')'")?;
                let group = match shape {
                    GroupShape::StaticBoolean => Some(StaticBooleanGroup {
                        offset: open.offset,
                        text: self.input[open.offset..close.offset + 1].to_string(),
                    }),
                    GroupShape::Other => None,
                };
                Ok((f, group))
            }
            Some(
                Tok::Ident
                | Tok::Dabl
                | Tok::Conf
                | Tok::Disc
                | Tok::Brings
                | Tok::Attempts
                | Tok::Task
                | Tok::Agree,
            ) => {
                let f = self.static_unary()?;
                match TemporalFormula::mono(f) {
                    Ok(m) => Ok((m, None)),
                    Err(e) => {
                        let (offset, _) = self.found();
                        Err(ParseError::MonolithicViolation {
                            offset,
                            formula: e.0,
                        })
                    }
                }
            }
            Some(Tok::Top | Tok::Bottom) => {
                let t = self.advance();
                Err(ParseError::MonolithicViolation {
                    offset: t.offset,
                    formula: t.text,
                })
            }
            _ => Err(self.err(&["a temporal formula"])),
        }
    }

    /// Looks ahead from just inside an opening parenthesis to the matching
    /// close: does the group contain any temporal operator, and does it
    /// have a Boolean connective at its own nesting level?
    fn scan_group_shape(&self) -> GroupShape {
        let mut depth = 1usize;
        let mut top_boolean = false;
        for t in &self.tokens[self.pos..] {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Amp | Tok::Pipe | Tok::Arrow if depth == 1 => top_boolean = true,
                tok if tok.is_temporal_op() => return GroupShape::Other,
                _ => {}
            }
        }
        if top_boolean {
            GroupShape::StaticBoolean
        } else {
            GroupShape::Other
        }
    }

    fn reject_static_boolean_operand(
        &self,
        group: Option<StaticBooleanGroup>,
    ) -> Result<(), ParseError> {
        match group {
            Some(g) => Err(ParseError::MonolithicViolation {
                offset: g.offset,
                formula: g.text,
            }),
            None => Ok(()),
        }
    }
}

enum GroupShape {
    /// Purely static content with a top-level `&`/`|`/`->`.
    StaticBoolean,
    Other,
}

struct StaticBooleanGroup {
    offset: usize,
    text: String,
}
