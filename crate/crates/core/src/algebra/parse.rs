//! Parser for polynomial expressions over a ring presentation.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := '-'? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' nat)?
//! atom   := nat | ident | '(' expr ')'
//! ```
//!
//! The optional leading minus is the one extension beyond sums of terms: it
//! makes the canonical printed form of any element re-parseable.  Evaluation
//! happens inside the target ring, so relation monomials vanish silently;
//! terms discarded purely by the truncation degree are an error unless the
//! caller opts into silent truncation.

use super::{Coefficient, Poly, Ring};
use num_bigint::BigInt;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverflowPolicy {
    /// Reject expressions that lose terms to the truncation degree.
    Error,
    /// Silently drop terms above the truncation degree.
    Truncate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownGenerator,
    Number,
    Overflow,
}

impl ParseErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownGenerator => "unknown-generator",
            ParseErrorKind::Number => "number",
            ParseErrorKind::Overflow => "overflow",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: error[{}]: {}",
            self.line,
            self.col,
            self.kind.code(),
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Debug, PartialEq)]
enum TokenKind {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokenKind,
    pos: Pos,
}

fn err(pos: Pos, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        kind,
        message: message.into(),
    }
}

fn tokenize(input: &str, start: Pos) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = start.line;
    let mut col = start.col;
    let mut chars = input.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, col };
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '+' | '-' | '*' | '^' | '(' | ')' => {
                chars.next();
                col += 1;
                let kind = match ch {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '^' => TokenKind::Caret,
                    '(' => TokenKind::LParen,
                    _ => TokenKind::RParen,
                };
                tokens.push(Token { kind, pos });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let n: BigInt = s
                    .parse()
                    .map_err(|_| err(pos, ParseErrorKind::Number, "invalid number"))?;
                tokens.push(Token {
                    kind: TokenKind::Num(n),
                    pos,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(s),
                    pos,
                });
            }
            c => {
                return Err(err(
                    pos,
                    ParseErrorKind::Syntax,
                    format!("unexpected character `{}`", c),
                ));
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::End,
        pos: Pos { line, col },
    });
    Ok(tokens)
}

enum Ast {
    Num(BigInt),
    Gen(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32, Pos),
}

struct Parser<'a> {
    tokens: Vec<Token>,
    idx: usize,
    ring: &'a Ring,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut node = if matches!(self.peek().kind, TokenKind::Minus) {
            self.bump();
            Ast::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.bump();
                    node = Ast::Add(Box::new(node), Box::new(self.term()?));
                }
                TokenKind::Minus => {
                    self.bump();
                    node = Ast::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut node = self.factor()?;
        while matches!(self.peek().kind, TokenKind::Star) {
            self.bump();
            node = Ast::Mul(Box::new(node), Box::new(self.factor()?));
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek().kind, TokenKind::Caret) {
            let caret = self.bump();
            let t = self.bump();
            match t.kind {
                TokenKind::Num(n) => {
                    let e = u32::try_from(&n).map_err(|_| {
                        err(t.pos, ParseErrorKind::Number, "exponent out of range")
                    })?;
                    Ok(Ast::Pow(Box::new(base), e, caret.pos))
                }
                _ => Err(err(
                    t.pos,
                    ParseErrorKind::Syntax,
                    "expected a natural number after `^`",
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let t = self.bump();
        match t.kind {
            TokenKind::Num(n) => Ok(Ast::Num(n)),
            TokenKind::Ident(name) => match self.ring.gen_index(&name) {
                Some(i) => Ok(Ast::Gen(i)),
                None => Err(err(
                    t.pos,
                    ParseErrorKind::UnknownGenerator,
                    format!("unknown generator `{}`", name),
                )),
            },
            TokenKind::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if matches!(close.kind, TokenKind::RParen) {
                    Ok(inner)
                } else {
                    Err(err(close.pos, ParseErrorKind::Syntax, "expected `)`"))
                }
            }
            TokenKind::End => Err(err(
                t.pos,
                ParseErrorKind::Syntax,
                "unexpected end of expression",
            )),
            _ => Err(err(
                t.pos,
                ParseErrorKind::Syntax,
                "expected a number, generator, or `(`",
            )),
        }
    }
}

fn eval<C: Coefficient>(
    ast: &Ast,
    ring: &Ring,
    truncated: &mut Option<Pos>,
    at: Pos,
) -> Poly<C> {
    match ast {
        Ast::Num(n) => Poly::constant(ring, C::from_bigint(n)),
        Ast::Gen(i) => {
            let g = Poly::generator(ring, *i);
            // A generator can vanish outright when its degree exceeds the
            // truncation; that counts as overflow, a relation kill does not.
            if g.is_zero()
                && truncated.is_none()
                && ring.generators()[*i].degree > ring.truncation()
            {
                *truncated = Some(at);
            }
            g
        }
        Ast::Neg(a) => eval::<C>(a, ring, truncated, at).neg(),
        Ast::Add(a, b) => {
            eval::<C>(a, ring, truncated, at).add_ref(&eval::<C>(b, ring, truncated, at))
        }
        Ast::Sub(a, b) => {
            eval::<C>(a, ring, truncated, at).sub_ref(&eval::<C>(b, ring, truncated, at))
        }
        Ast::Mul(a, b) => {
            let (p, t) = eval::<C>(a, ring, truncated, at)
                .mul_tracked(&eval::<C>(b, ring, truncated, at));
            if t && truncated.is_none() {
                *truncated = Some(at);
            }
            p
        }
        Ast::Pow(a, e, pos) => {
            let (p, t) = eval::<C>(a, ring, truncated, *pos).pow_tracked(*e);
            if t && truncated.is_none() {
                *truncated = Some(*pos);
            }
            p
        }
    }
}

/// Parse an expression into an element of `ring`, reporting errors with
/// positions relative to `start` (use `Pos { line: 1, col: 1 }` for a
/// standalone string).
pub fn parse_poly_at<C: Coefficient>(
    input: &str,
    ring: &Ring,
    policy: OverflowPolicy,
    start: Pos,
) -> Result<Poly<C>, ParseError> {
    let tokens = tokenize(input, start)?;
    if matches!(tokens[0].kind, TokenKind::End) {
        return Err(err(tokens[0].pos, ParseErrorKind::Syntax, "empty expression"));
    }
    let mut parser = Parser {
        tokens,
        idx: 0,
        ring,
    };
    let ast = parser.expr()?;
    let end = parser.bump();
    if !matches!(end.kind, TokenKind::End) {
        return Err(err(
            end.pos,
            ParseErrorKind::Syntax,
            "unexpected trailing input",
        ));
    }
    let mut truncated = None;
    let p = eval::<C>(&ast, ring, &mut truncated, start);
    if policy == OverflowPolicy::Error {
        if let Some(pos) = truncated {
            return Err(err(
                pos,
                ParseErrorKind::Overflow,
                format!(
                    "term exceeds the truncation degree {} (pass --allow-truncation to drop it)",
                    ring.truncation()
                ),
            ));
        }
    }
    Ok(p)
}

pub fn parse_poly<C: Coefficient>(
    input: &str,
    ring: &Ring,
    policy: OverflowPolicy,
) -> Result<Poly<C>, ParseError> {
    parse_poly_at(input, ring, policy, Pos { line: 1, col: 1 })
}
