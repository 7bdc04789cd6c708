//! Expression trees over the coordinates `x, y, z`.

use std::fmt;

use crate::error::{JetError, Result};
use crate::jet::{Axis, Jet, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Sin,
    Cos,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "ln" => Func::Ln,
            _ => return None,
        })
    }
}

/// A rational exponent `num/den` in lowest terms with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: i64,
    den: u64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Option<Ratio> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Some(Ratio {
            num: sign * num / g as i64,
            den: den.unsigned_abs() / g,
        })
    }

    pub fn integer(n: i64) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}/{})", self.num, self.den)
        }
    }
}

/// Abstract syntax tree of a scalar expression.
///
/// Numeric literals produced by the parser are always non-negative; a leading
/// minus is a [`Expr::Neg`] node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Axis),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Ratio),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn var(a: Axis) -> Expr {
        Expr::Var(a)
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn call(f: Func, e: Expr) -> Expr {
        Expr::Call(f, Box::new(e))
    }

    pub fn pow(e: Expr, r: Ratio) -> Expr {
        Expr::Pow(Box::new(e), r)
    }

    /// Jet of the expression at `p`.
    pub fn eval_jet(&self, p: Point, order: u8) -> std::result::Result<Jet, JetError> {
        Ok(match self {
            Expr::Num(v) => Jet::constant(p, *v, order)?,
            Expr::Var(a) => Jet::variable(p, *a, order)?,
            Expr::Neg(e) => -e.eval_jet(p, order)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval_jet(p, order)?;
                let b = r.eval_jet(p, order)?;
                match op {
                    BinOp::Add => a.try_add(&b)?,
                    BinOp::Sub => a.try_sub(&b)?,
                    BinOp::Mul => a.try_mul(&b)?,
                    BinOp::Div => a.try_div(&b)?,
                }
            }
            Expr::Pow(e, r) => {
                let base = e.eval_jet(p, order)?;
                if r.is_integer() {
                    base.powi(r.numerator() as i32)?
                } else {
                    base.powf(r.as_f64())?
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval_jet(p, order)?;
                match f {
                    Func::Sqrt => a.sqrt()?,
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Ln => a.ln()?,
                }
            }
        })
    }

    /// Plain floating-point evaluation; NaN/inf outside the domain.
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(a) => p[a.index()],
            Expr::Neg(e) => -e.eval(p),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(p), r.eval(p));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(e, r) => {
                let b = e.eval(p);
                if r.is_integer() {
                    b.powi(r.numerator() as i32)
                } else {
                    b.powf(r.as_f64())
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(p);
                match f {
                    Func::Sqrt => a.sqrt(),
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Ln => a.ln(),
                }
            }
        }
    }

    /// Parses a scalar expression.
    pub fn parse(text: &str) -> Result<Expr> {
        crate::parse::parse_expr(text)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(_, _) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(_, _) => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(a) => f.write_str(a.name()),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_child(f, 3)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                l.write_child(f, p)?;
                write!(f, " {} ", op.symbol())?;
                r.write_child(f, p + 1)
            }
            Expr::Pow(e, r) => {
                e.write_child(f, 5)?;
                write!(f, "^{r}")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_normalizes() {
        let r = Ratio::new(2, -4).unwrap();
        assert_eq!((r.numerator(), r.denominator()), (-1, 2));
        assert!(Ratio::new(1, 0).is_none());
        assert!(Ratio::new(6, 3).unwrap().is_integer());
    }

    #[test]
    fn display_is_minimal_but_faithful() {
        let e = Expr::parse("-x^2 + (y - z) * 3 / sqrt(1 + x^(1/2))").unwrap();
        assert_eq!(e.to_string(), "-x^2 + (y - z) * 3.0 / sqrt(1.0 + x^(1/2))");
        let nested = Expr::parse("x - (y - z)").unwrap();
        assert_eq!(nested.to_string(), "x - (y - z)");
        let pw = Expr::parse("(-x)^3").unwrap();
        assert_eq!(pw.to_string(), "(-x)^3");
    }

    #[test]
    fn plain_eval_matches_jet_value() {
        let e = Expr::parse("exp(x) * sin(y) + ln(2 + z^2) - x^(3/2)").unwrap();
        let p = [0.7, -0.4, 1.1];
        let jet = e.eval_jet(p, 3).unwrap();
        assert!((jet.value() - e.eval(p)).abs() < 1e-14);
    }

    #[test]
    fn domain_errors_surface() {
        let e = Expr::parse("sqrt(x)").unwrap();
        assert!(e.eval_jet([-1.0, 0.0, 0.0], 2).is_err());
        let e = Expr::parse("1 / x").unwrap();
        assert!(e.eval_jet([0.0, 0.0, 0.0], 2).is_err());
    }
}
