//! Lexer and recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | power
//! power    := atom ('^' exponent)*
//! atom     := number | 't' | 'pi' | name '(' expr ')' | '(' expr ')'
//! exponent := '-' exponent | number | '(' const-expr ')'
//! ```
//!
//! The `^` exponent must fold to a rational constant. Immediately after `^`
//! only a signed number or a parenthesized constant expression is accepted,
//! so `^` binds tighter than `/`: `t^2/4` is `(t^2)/4` while `t^(1/2)` is a
//! square root. Inside the parentheses the usual operator shapes apply,
//! evaluated in exact rational arithmetic. `2^t` is a syntax error.
//! Whitespace is insignificant. Error positions are 1-based byte columns.

use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::ast::{Expr, Func, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, exact: Option<Rational> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Ident(name) => format!("identifier {name:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i + 1;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                out.push(Lexed { tok: Tok::Plus, pos });
                i += 1;
            }
            b'-' => {
                out.push(Lexed { tok: Tok::Minus, pos });
                i += 1;
            }
            b'*' => {
                out.push(Lexed { tok: Tok::Star, pos });
                i += 1;
            }
            b'/' => {
                out.push(Lexed { tok: Tok::Slash, pos });
                i += 1;
            }
            b'^' => {
                out.push(Lexed { tok: Tok::Caret, pos });
                i += 1;
            }
            b'(' => {
                out.push(Lexed { tok: Tok::LParen, pos });
                i += 1;
            }
            b')' => {
                out.push(Lexed { tok: Tok::RParen, pos });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent part only when digits follow, so `2e` stays two tokens.
                if i < bytes.len() && (bytes[i] | 0x20) == b'e' {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("malformed number {text:?}"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("number {text:?} overflows"),
                    });
                }
                out.push(Lexed { tok: Tok::Num { value, exact: decimal_rational(text) }, pos });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Lexed { tok: Tok::Ident(src[start..i].to_string()), pos });
            }
            _ => {
                return Err(Error::Parse {
                    position: pos,
                    message: format!("unexpected character {:?}", src[i..].chars().next().unwrap()),
                });
            }
        }
    }
    Ok(out)
}

/// The exact rational value of a decimal literal, when it fits `i64`.
fn decimal_rational(text: &str) -> Option<Rational> {
    let (mantissa_text, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa_text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa_text, ""),
    };
    let digits: String = [int_part, frac_part].concat();
    if digits.is_empty() {
        return None;
    }
    let mantissa: i64 = digits.parse().ok()?;
    let power = exp - frac_part.len() as i32;
    let scale = 10i64.checked_pow(power.unsigned_abs())?;
    if power >= 0 {
        Some(Rational::from_integer(mantissa.checked_mul(scale)?))
    } else {
        Some(Rational::new(mantissa, scale))
    }
}

struct Parser {
    toks: Vec<Lexed>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|l| &l.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |l| l.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|l| l.tok.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, want: Tok, context: &str) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.at += 1;
                Ok(())
            }
            Some(t) => Err(Error::Parse {
                position: self.pos(),
                message: format!("expected {} {context}, got {}", want.describe(), t.describe()),
            }),
            None => Err(Error::Parse {
                position: self.end,
                message: format!("expected {} {context}, got end of input", want.describe()),
            }),
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => Error::Parse {
                position: self.pos(),
                message: format!("expected {wanted}, got {}", t.describe()),
            },
            None => Error::Parse {
                position: self.end,
                message: format!("expected {wanted}, got end of input"),
            },
        }
    }

    fn parse_expr(&mut self) -> Result<Expr> {
        let mut e = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    e = Expr::Add(Box::new(e), Box::new(self.parse_term()?));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    e = Expr::Sub(Box::new(e), Box::new(self.parse_term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut e = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    e = Expr::Mul(Box::new(e), Box::new(self.parse_factor()?));
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    e = Expr::Div(Box::new(e), Box::new(self.parse_factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.at += 1;
            let inner = self.parse_factor()?;
            // Negated literals fold so printing and reparsing is stable.
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let mut e = self.parse_atom()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.at += 1;
            let r = self.parse_exp_factor()?;
            e = Expr::Pow(Box::new(e), r);
        }
        Ok(e)
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num { value, .. }) => Ok(Expr::Const(value)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "pi" => Ok(Expr::Const(PI)),
                _ => {
                    if let Some(func) = Func::from_name(&name) {
                        self.eat(Tok::LParen, &format!("after {name}"))?;
                        let arg = self.parse_expr()?;
                        self.eat(Tok::RParen, "to close the call")?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    } else {
                        Err(Error::Parse {
                            position: pos,
                            message: format!("unknown identifier {name:?}"),
                        })
                    }
                }
            },
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.eat(Tok::RParen, "to close the group")?;
                Ok(e)
            }
            Some(t) => Err(Error::Parse {
                position: pos,
                message: format!("expected a value, got {}", t.describe()),
            }),
            None => Err(Error::Parse {
                position: self.end,
                message: "expected a value, got end of input".into(),
            }),
        }
    }

    // Exponent bodies inside parentheses: the usual operator shapes, folded
    // in exact rational arithmetic. Directly after `^` only parse_exp_factor
    // applies, keeping `^` tighter than `*` and `/`.

    fn parse_exponent(&mut self) -> Result<Rational> {
        let mut r = self.parse_exp_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    r += self.parse_exp_term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    r -= self.parse_exp_term()?;
                }
                _ => return Ok(r),
            }
        }
    }

    fn parse_exp_term(&mut self) -> Result<Rational> {
        let mut r = self.parse_exp_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    r *= self.parse_exp_factor()?;
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.at += 1;
                    let d = self.parse_exp_factor()?;
                    if d == Rational::from_integer(0) {
                        return Err(Error::Parse {
                            position: pos,
                            message: "division by zero in exponent".into(),
                        });
                    }
                    r /= d;
                }
                _ => return Ok(r),
            }
        }
    }

    fn parse_exp_factor(&mut self) -> Result<Rational> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-self.parse_exp_factor()?)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let r = self.parse_exponent()?;
                self.eat(Tok::RParen, "to close the exponent group")?;
                Ok(r)
            }
            Some(Tok::Num { exact, .. }) => {
                let r = exact.ok_or_else(|| Error::Parse {
                    position: pos,
                    message: "exponent literal does not fit an exact rational".into(),
                })?;
                self.at += 1;
                Ok(r)
            }
            _ => Err(self.unexpected("a constant exponent")),
        }
    }
}

/// Parses an expression in the variable `t`.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len() + 1 };
    if p.peek().is_none() {
        return Err(Error::Parse { position: 1, message: "empty expression".into() });
    }
    let e = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}
