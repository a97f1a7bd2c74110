//! Expression trees: representation, evaluation, and printing.
//!
//! The grammar has one variable `t`, decimal literals, the constant `pi`,
//! the binary operators `+ - * /`, the power operator `^` with a constant
//! rational exponent, unary minus, and the functions `sqrt cbrt abs exp ln
//! sin cos`. `cbrt` is a primitive rather than a power so that odd roots of
//! negative arguments stay legal; `^` on a negative base is only defined for
//! integer exponents.
//!
//! Evaluation surfaces domain violations as [`EvalError`] values instead of
//! letting NaN or infinity propagate.

use std::fmt;

use crate::error::EvalError;

/// Exact rational numbers used for `^` exponents.
pub type Rational = num::rational::Ratio<i64>;

/// Unary function heads of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Cbrt,
    Abs,
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
            Func::Abs => "abs",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "cbrt" => Func::Cbrt,
            "abs" => Func::Abs,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

/// An expression in the single variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant rational exponent.
    Pow(Box<Expr>, Rational),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at `t = x`. Domain violations and non-finite intermediate
    /// results are reported as errors, never as NaN.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(u) => -u.eval(x)?,
            Expr::Add(u, v) => u.eval(x)? + v.eval(x)?,
            Expr::Sub(u, v) => u.eval(x)? - v.eval(x)?,
            Expr::Mul(u, v) => u.eval(x)? * v.eval(x)?,
            Expr::Div(u, v) => {
                let den = v.eval(x)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                u.eval(x)? / den
            }
            Expr::Pow(u, r) => pow_rational(u.eval(x)?, *r)?,
            Expr::Call(func, u) => {
                let a = u.eval(x)?;
                match func {
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::SqrtNegative(a));
                        }
                        a.sqrt()
                    }
                    Func::Cbrt => a.cbrt(),
                    Func::Abs => a.abs(),
                    Func::Exp => a.exp(),
                    Func::Ln => {
                        if a <= 0.0 {
                            return Err(EvalError::LnNonPositive(a));
                        }
                        a.ln()
                    }
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// The value of a closed expression, when every leaf is a constant and
    /// evaluation succeeds.
    pub fn const_value(&self) -> Option<f64> {
        match self {
            Expr::Var => None,
            Expr::Const(c) => Some(*c),
            Expr::Neg(u) => u.const_value().map(|v| -v),
            Expr::Add(..) | Expr::Sub(..) | Expr::Mul(..) | Expr::Div(..) | Expr::Pow(..)
            | Expr::Call(..) => {
                if self.depends_on_var() {
                    None
                } else {
                    self.eval(0.0).ok()
                }
            }
        }
    }

    /// Whether the variable `t` occurs anywhere in the tree.
    pub fn depends_on_var(&self) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var => true,
            Expr::Neg(u) | Expr::Pow(u, _) | Expr::Call(_, u) => u.depends_on_var(),
            Expr::Add(u, v) | Expr::Sub(u, v) | Expr::Mul(u, v) | Expr::Div(u, v) => {
                u.depends_on_var() || v.depends_on_var()
            }
        }
    }

    /// Polynomial degree in `t`, when the tree is a polynomial with constant
    /// coefficients (division only by constants, powers only by nonnegative
    /// integers). `None` otherwise.
    pub fn poly_degree(&self) -> Option<u32> {
        match self {
            Expr::Const(_) => Some(0),
            Expr::Var => Some(1),
            Expr::Neg(u) => u.poly_degree(),
            Expr::Add(u, v) | Expr::Sub(u, v) => Some(u.poly_degree()?.max(v.poly_degree()?)),
            Expr::Mul(u, v) => Some(u.poly_degree()? + v.poly_degree()?),
            Expr::Div(u, v) => {
                if v.depends_on_var() {
                    None
                } else {
                    u.poly_degree()
                }
            }
            Expr::Pow(u, r) => {
                if r.is_integer() && *r.numer() >= 0 {
                    u.poly_degree()?.checked_mul(u32::try_from(*r.numer()).ok()?)
                } else {
                    None
                }
            }
            Expr::Call(..) => None,
        }
    }

    /// Substitutes `inner` for the variable, building the composite tree.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var => inner.clone(),
            Expr::Neg(u) => Expr::Neg(Box::new(u.substitute(inner))),
            Expr::Add(u, v) => {
                Expr::Add(Box::new(u.substitute(inner)), Box::new(v.substitute(inner)))
            }
            Expr::Sub(u, v) => {
                Expr::Sub(Box::new(u.substitute(inner)), Box::new(v.substitute(inner)))
            }
            Expr::Mul(u, v) => {
                Expr::Mul(Box::new(u.substitute(inner)), Box::new(v.substitute(inner)))
            }
            Expr::Div(u, v) => {
                Expr::Div(Box::new(u.substitute(inner)), Box::new(v.substitute(inner)))
            }
            Expr::Pow(u, r) => Expr::Pow(Box::new(u.substitute(inner)), *r),
            Expr::Call(f, u) => Expr::Call(*f, Box::new(u.substitute(inner))),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }

    fn fmt_child(&self, out: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(out, "({self})")
        } else {
            write!(out, "{self}")
        }
    }
}

/// `base^r` for a rational exponent: integer exponents allow negative bases,
/// fractional exponents require a positive base.
pub fn pow_rational(base: f64, r: Rational) -> Result<f64, EvalError> {
    let exponent = *r.numer() as f64 / *r.denom() as f64;
    let v = if r.is_integer() {
        let n = *r.numer();
        if base == 0.0 && n < 0 {
            return Err(EvalError::PowDomain { base, exponent });
        }
        match i32::try_from(n) {
            Ok(n) => base.powi(n),
            Err(_) => base.powf(exponent),
        }
    } else if base > 0.0 {
        base.powf(exponent)
    } else if base == 0.0 {
        if exponent > 0.0 {
            0.0
        } else {
            return Err(EvalError::PowDomain { base, exponent });
        }
    } else {
        return Err(EvalError::PowDomain { base, exponent });
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

impl fmt::Display for Expr {
    /// Prints in the input grammar with minimal parentheses; printed text
    /// re-parses to a structurally equal tree.
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(out, "{c}"),
            Expr::Var => write!(out, "t"),
            Expr::Neg(u) => {
                write!(out, "-")?;
                u.fmt_child(out, 3)
            }
            Expr::Add(u, v) => {
                u.fmt_child(out, 1)?;
                write!(out, "+")?;
                v.fmt_child(out, 2)
            }
            Expr::Sub(u, v) => {
                u.fmt_child(out, 1)?;
                write!(out, "-")?;
                v.fmt_child(out, 2)
            }
            Expr::Mul(u, v) => {
                u.fmt_child(out, 2)?;
                write!(out, "*")?;
                v.fmt_child(out, 3)
            }
            Expr::Div(u, v) => {
                u.fmt_child(out, 2)?;
                write!(out, "/")?;
                v.fmt_child(out, 3)
            }
            Expr::Pow(u, r) => {
                u.fmt_child(out, 5)?;
                if r.is_integer() && *r.numer() >= 0 {
                    write!(out, "^{}", r.numer())
                } else if r.is_integer() {
                    write!(out, "^({})", r.numer())
                } else {
                    write!(out, "^({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Call(f, u) => write!(out, "{}({u})", f.name()),
        }
    }
}
