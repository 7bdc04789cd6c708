//! Recursive-descent parser for scalar expressions and 1-forms.
//!
//! ```text
//! oneform := term (("+"|"-") term)*
//! term    := [expr "*"] ("dx"|"dy"|"dz")
//! expr    := sum
//! sum     := product (("+"|"-") product)*
//! product := unary (("*"|"/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" exponent)*
//! exponent:= ["-"] integer | "(" ["-"] integer ["/" integer] ")"
//! atom    := number | "x" | "y" | "z" | func "(" expr ")" | "(" expr ")"
//! ```
//!
//! Implicit multiplication is rejected. Differentials may only appear as the
//! last factor of a top-level term of a 1-form.

use crate::error::{ParseError, Result};
use crate::expr::{BinOp, Expr, Func, Ratio};
use crate::jet::Axis;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> std::result::Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos: start });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s
                .parse()
                .map_err(|_| ParseError::new(start, format!("malformed number '{s}'")))?;
            out.push(Token {
                tok: Tok::Num(v),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos: start,
            });
        } else {
            return Err(ParseError::new(
                start,
                format!("unexpected character '{c}'"),
            ));
        }
    }
    Ok(out)
}

fn differential(name: &str) -> Option<Axis> {
    match name {
        "dx" => Some(Axis::X),
        "dy" => Some(Axis::Y),
        "dz" => Some(Axis::Z),
        _ => None,
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    at: usize,
    end_pos: usize,
}

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], end_pos: usize) -> Self {
        Parser {
            toks,
            at: 0,
            end_pos,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end_pos, |t| t.pos)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.at).map(|t| &t.tok);
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> std::result::Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.pos(), format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.product()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            return Ok(Expr::negate(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let r = self.exponent()?;
            base = Expr::pow(base, r);
        }
        Ok(base)
    }

    fn integer(&mut self) -> std::result::Result<i64, ParseError> {
        let pos = self.pos();
        let negative = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() < 1e9 => {
                let n = *v as i64;
                Ok(if negative { -n } else { n })
            }
            _ => Err(ParseError::new(
                pos,
                "exponent must be an integer or a parenthesized ratio p/q",
            )),
        }
    }

    fn exponent(&mut self) -> std::result::Result<Ratio, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.at += 1;
            let num = self.integer()?;
            let den = if self.peek() == Some(&Tok::Slash) {
                self.at += 1;
                let pos = self.pos();
                let d = self.integer()?;
                if d == 0 {
                    return Err(ParseError::new(pos, "zero denominator in exponent"));
                }
                d
            } else {
                1
            };
            self.expect(Tok::RParen, "')' closing the exponent")?;
            Ok(Ratio::new(num, den).expect("nonzero denominator"))
        } else {
            Ok(Ratio::integer(self.integer()?))
        }
    }

    fn atom(&mut self) -> std::result::Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump().cloned() {
            Some(Tok::Num(v)) => Ok(Expr::num(v)),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(axis) = match name.as_str() {
                    "x" => Some(Axis::X),
                    "y" => Some(Axis::Y),
                    "z" => Some(Axis::Z),
                    _ => None,
                } {
                    return Ok(Expr::var(axis));
                }
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                    let arg = self.sum()?;
                    self.expect(Tok::RParen, "')'")?;
                    return Ok(Expr::call(f, arg));
                }
                if differential(&name).is_some() {
                    return Err(ParseError::new(
                        pos,
                        format!(
                            "differential '{name}' may only be the last factor of a 1-form term"
                        ),
                    ));
                }
                Err(ParseError::new(pos, format!("unknown identifier '{name}'")))
            }
            Some(_) => Err(ParseError::new(pos, "expected a number, variable or '('")),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }

    fn finish(&self) -> std::result::Result<(), ParseError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some(t) => {
                let message = match &t.tok {
                    Tok::Ident(_) | Tok::Num(_) | Tok::LParen => {
                        "implicit multiplication is not allowed; use '*'"
                    }
                    _ => "unexpected token",
                };
                Err(ParseError::new(t.pos, message))
            }
        }
    }
}

pub(crate) fn parse_expr(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.chars().count());
    let e = p.sum()?;
    p.finish()?;
    Ok(e)
}

fn ends_operand(tok: &Tok) -> bool {
    matches!(tok, Tok::Num(_) | Tok::Ident(_) | Tok::RParen)
}

/// Parses `f₁ dx + f₂ dy + f₃ dz` text into coefficient expressions.
pub(crate) fn parse_one_form_exprs(text: &str) -> Result<[Expr; 3]> {
    let toks = lex(text)?;
    let end_pos = text.chars().count();
    if toks.is_empty() {
        return Err(ParseError::new(0, "empty 1-form").into());
    }

    // Split into top-level terms at binary +/-.
    let mut terms: Vec<(bool, usize, usize)> = Vec::new();
    let mut depth = 0i32;
    let mut negative = false;
    let mut start = 0;
    if matches!(toks[0].tok, Tok::Plus | Tok::Minus) {
        negative = toks[0].tok == Tok::Minus;
        start = 1;
    }
    let first = start;
    for i in first..toks.len() {
        match toks[i].tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            Tok::Plus | Tok::Minus if depth == 0 && i > start && ends_operand(&toks[i - 1].tok) => {
                terms.push((negative, start, i));
                negative = toks[i].tok == Tok::Minus;
                start = i + 1;
            }
            _ => {}
        }
    }
    terms.push((negative, start, toks.len()));

    let mut comps: [Option<Expr>; 3] = [None, None, None];
    for (negative, s, e) in terms {
        let pos = toks.get(s).map_or(end_pos, |t| t.pos);
        if s >= e {
            return Err(ParseError::new(pos, "empty term").into());
        }
        let last = &toks[e - 1];
        let axis = match &last.tok {
            Tok::Ident(name) => differential(name),
            _ => None,
        }
        .ok_or_else(|| ParseError::new(pos, "term has no differential dx, dy or dz"))?;
        let coeff = if e - s == 1 {
            Expr::num(1.0)
        } else {
            if toks[e - 2].tok != Tok::Star {
                return Err(ParseError::new(
                    last.pos,
                    "differential must follow '*' (implicit multiplication is not allowed)",
                )
                .into());
            }
            let inner = &toks[s..e - 2];
            if inner.is_empty() {
                return Err(ParseError::new(pos, "missing coefficient before '*'").into());
            }
            let mut p = Parser::new(inner, toks[e - 2].pos);
            let c = p.sum()?;
            p.finish()?;
            c
        };
        let coeff = if negative { Expr::negate(coeff) } else { coeff };
        let slot = &mut comps[axis.index()];
        *slot = Some(match slot.take() {
            None => coeff,
            Some(prev) => Expr::bin(BinOp::Add, prev, coeff),
        });
    }
    Ok(comps.map(|c| c.unwrap_or(Expr::num(0.0))))
}

/// Splits a metric block into its six expressions.
///
/// Accepts a JSON array of six strings or numbers, a JSON object with a
/// `"metric"` array, or plain text with expressions separated by newlines,
/// semicolons or commas.
pub(crate) fn parse_metric_block(text: &str) -> Result<[Expr; 6]> {
    let trimmed = text.trim();
    let items: Vec<String> = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| crate::error::Error::Config(format!("metric JSON: {e}")))?;
        let arr = match &value {
            serde_json::Value::Array(a) => a,
            serde_json::Value::Object(o) => {
                o.get("metric").and_then(|m| m.as_array()).ok_or_else(|| {
                    crate::error::Error::Config("metric JSON needs a \"metric\" array".into())
                })?
            }
            _ => unreachable!(),
        };
        arr.iter()
            .map(|v| match v {
                serde_json::Value::String(s) => Ok(s.clone()),
                serde_json::Value::Number(n) => Ok(n.to_string()),
                _ => Err(crate::error::Error::Config(
                    "metric entries must be strings or numbers".into(),
                )),
            })
            .collect::<Result<_>>()?
    } else {
        trimmed
            .split(['\n', ';', ','])
            .map(str::trim)
            .filter(|s| !s.is_empty() && !s.starts_with('#'))
            .map(String::from)
            .collect()
    };
    if items.len() != 6 {
        return Err(crate::error::Error::Config(format!(
            "metric needs 6 upper-triangle entries (g11 g12 g13 g22 g23 g33), got {}",
            items.len()
        )));
    }
    let exprs: Vec<Expr> = items.iter().map(|s| parse_expr(s)).collect::<Result<_>>()?;
    Ok(exprs.try_into().expect("six entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn form(text: &str) -> [Expr; 3] {
        parse_one_form_exprs(text).unwrap()
    }

    #[test]
    fn heisenberg_form() {
        let [a, b, c] = form("dz + y*dx - x*dy");
        assert_eq!(a, Expr::var(Axis::Y));
        assert_eq!(b, Expr::negate(Expr::var(Axis::X)));
        assert_eq!(c, Expr::num(1.0));
    }

    #[test]
    fn martinet_form() {
        let [a, b, c] = form("dy + x^2*dz");
        assert_eq!(a, Expr::num(0.0));
        assert_eq!(b, Expr::num(1.0));
        assert_eq!(c, Expr::pow(Expr::var(Axis::X), Ratio::integer(2)));
    }

    #[test]
    fn bare_differential() {
        let [a, b, c] = form("dz");
        assert_eq!((a, b, c), (Expr::num(0.0), Expr::num(0.0), Expr::num(1.0)));
    }

    #[test]
    fn leading_sign_and_repeated_differential() {
        let [a, _, _] = form("-x*dx + (1 + y)*dx");
        let p = [2.0, 3.0, 0.0];
        assert_eq!(a.eval(p), -2.0 + 4.0);
    }

    #[test]
    fn signs_inside_exponents_do_not_split() {
        let [a, _, c] = form("x^-2*dx + (y - 1)*dz");
        assert_eq!(a.eval([2.0, 0.0, 0.0]), 0.25);
        assert_eq!(c.eval([0.0, 3.0, 0.0]), 2.0);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_one_form_exprs("dz + 2 x*dy") {
            Err(Error::Parse(e)) => assert_eq!(e.position, 7),
            other => panic!("unexpected {other:?}"),
        }
        match parse_one_form_exprs("dz + y") {
            Err(Error::Parse(e)) => assert!(e.message.contains("no differential")),
            other => panic!("unexpected {other:?}"),
        }
        match parse_one_form_exprs("dz + w*dx") {
            Err(Error::Parse(e)) => {
                assert_eq!(e.position, 5);
                assert!(e.message.contains("unknown identifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_one_form_exprs("dz + dx*y").is_err());
        assert!(parse_one_form_exprs("(dz)").is_err());
        assert!(parse_one_form_exprs("").is_err());
    }

    #[test]
    fn expression_precedence() {
        let e = parse_expr("-x^2").unwrap();
        assert_eq!(e.eval([3.0, 0.0, 0.0]), -9.0);
        let e = parse_expr("2*3^2/6 - 1").unwrap();
        assert_eq!(e.eval([0.0; 3]), 2.0);
        let e = parse_expr("x^(1/2)*x^(-1/2)").unwrap();
        assert!((e.eval([5.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(parse_expr("x^0.5").is_err());
        assert!(parse_expr("sin x").is_err());
        assert!(parse_expr("2x").is_err());
        assert!(parse_expr("1.5e-3*x").is_ok());
    }

    #[test]
    fn metric_blocks() {
        let m = parse_metric_block("1\n0\n0\n1 + x^2\n0\n1").unwrap();
        assert_eq!(m[3].eval([2.0, 0.0, 0.0]), 5.0);
        let m = parse_metric_block(r#"["1", 0, "0", "2", "0", "3"]"#).unwrap();
        assert_eq!(m[5].eval([0.0; 3]), 3.0);
        let m = parse_metric_block(r#"{"metric": ["1","0","0","1","0","1"]}"#).unwrap();
        assert_eq!(m[0].eval([0.0; 3]), 1.0);
        assert!(parse_metric_block("1;0;0;1").is_err());
    }
}
