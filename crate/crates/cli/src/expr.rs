//! Tiny arithmetic parser for angle literals such as `pi/2` or `-2*pi/3`.
//!
//! Grammar: numbers, `pi`, binary `+ - * /`, unary minus and parentheses.

use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ExprError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse `{}` at offset {}: {}", self.input, self.position, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

pub fn parse_angle(input: &str) -> Result<f64, ExprError> {
    let tokens = tokenize(input)?;
    let mut p = Parser { input, tokens, pos: 0 };
    let value = p.expr()?;
    if let Some(&(at, _)) = p.tokens.get(p.pos) {
        return Err(p.error(at, "unexpected trailing input"));
    }
    if !value.is_finite() {
        return Err(p.error(0, "value is not finite"));
    }
    Ok(value)
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let err = |position: usize, message: String| ExprError { input: input.to_string(), position, message };
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let single = match c {
            '+' => Some(Token::Plus),
            '-' | '\u{2212}' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            'π' => Some(Token::Num(PI)),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            chars.next();
            continue;
        }
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            let mut prev = ' ';
            // digits, dots, and an exponent with optional sign: 1e-5, 2.5E+3
            while let Some(&(j, d)) = chars.peek() {
                let sign_ok = (d == '+' || d == '-') && (prev == 'e' || prev == 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || sign_ok {
                    end = j + d.len_utf8();
                    prev = d;
                    chars.next();
                } else {
                    break;
                }
            }
            let text = &input[i..end];
            let v: f64 = text.parse().map_err(|_| err(i, format!("malformed number `{text}`")))?;
            out.push((i, Token::Num(v)));
        } else if c.is_ascii_alphabetic() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if d.is_ascii_alphabetic() {
                    end = j + 1;
                    chars.next();
                } else {
                    break;
                }
            }
            match &input[i..end] {
                "pi" | "PI" | "Pi" => out.push((i, Token::Num(PI))),
                other => return Err(err(i, format!("unknown name `{other}`"))),
            }
        } else {
            return Err(err(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

impl Parser<'_> {
    fn error(&self, position: usize, message: &str) -> ExprError {
        ExprError { input: self.input.to_string(), position, message: message.to_string() }
    }

    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).map(|&(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.input.len(), |&(at, _)| at)
    }

    fn expr(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.term()?;
        while let Some(t @ (Token::Plus | Token::Minus)) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if t == Token::Plus { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc *= self.unary()?;
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let rhs = self.unary()?;
                    if rhs == 0.0 {
                        return Err(self.error(at, "division by zero"));
                    }
                    acc /= rhs;
                }
                // implicit product: `2pi`, `3(pi/4)`
                Some(Token::Num(_) | Token::LParen) => acc *= self.unary()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ExprError> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, ExprError> {
        let at = self.here();
        match self.peek() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(Token::RParen) {
                    return Err(self.error(self.here(), "expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(_) => Err(self.error(at, "expected a number, `pi` or `(`")),
            None => Err(self.error(at, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_and_pi() {
        assert_eq!(parse_angle("1.5").unwrap(), 1.5);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("π").unwrap(), PI);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_angle("2.5E+1").unwrap(), 25.0);
    }

    #[test]
    fn operators_follow_usual_precedence() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("1 + 2 * 3").unwrap(), 7.0);
        assert_eq!(parse_angle("(1 + 2) * 3").unwrap(), 9.0);
        assert_eq!(parse_angle("pi - pi/4").unwrap(), PI - PI / 4.0);
        assert_eq!(parse_angle("8/4/2").unwrap(), 1.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
    }

    #[test]
    fn unary_minus() {
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("--1").unwrap(), 1.0);
        assert_eq!(parse_angle("2*-3").unwrap(), -6.0);
        assert_eq!(parse_angle("−pi").unwrap(), -PI);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["", "pi/", "(1", "1)", "tau", "1..2", "3/0", "2 $ 3", "1 2 +"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
        let e = parse_angle("pi/x").unwrap_err();
        assert_eq!(e.position, 3);
    }
}
