//! Symbolic differentiation and light simplification of expression trees.

use super::ast::{pow_rational, Expr, Func, Rational};

/// Ordinary symbolic derivative with respect to `t`. The result is not
/// simplified; pass it through [`simplify`].
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::Const(0.0),
        Expr::Var => Expr::Const(1.0),
        Expr::Neg(u) => Expr::Neg(Box::new(differentiate(u))),
        Expr::Add(u, v) => Expr::Add(Box::new(differentiate(u)), Box::new(differentiate(v))),
        Expr::Sub(u, v) => Expr::Sub(Box::new(differentiate(u)), Box::new(differentiate(v))),
        Expr::Mul(u, v) => Expr::Add(
            Box::new(Expr::Mul(Box::new(differentiate(u)), v.clone())),
            Box::new(Expr::Mul(u.clone(), Box::new(differentiate(v)))),
        ),
        Expr::Div(u, v) => Expr::Div(
            Box::new(Expr::Sub(
                Box::new(Expr::Mul(Box::new(differentiate(u)), v.clone())),
                Box::new(Expr::Mul(u.clone(), Box::new(differentiate(v)))),
            )),
            Box::new(Expr::Pow(v.clone(), Rational::from_integer(2))),
        ),
        Expr::Pow(u, r) => {
            let coeff = *r.numer() as f64 / *r.denom() as f64;
            Expr::Mul(
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(coeff)),
                    Box::new(Expr::Pow(u.clone(), r - Rational::from_integer(1))),
                )),
                Box::new(differentiate(u)),
            )
        }
        Expr::Call(func, u) => {
            let du = Box::new(differentiate(u));
            match func {
                Func::Sqrt => Expr::Div(
                    du,
                    Box::new(Expr::Mul(Box::new(Expr::Const(2.0)), Box::new(e.clone()))),
                ),
                Func::Cbrt => Expr::Div(
                    du,
                    Box::new(Expr::Mul(
                        Box::new(Expr::Const(3.0)),
                        Box::new(Expr::Pow(Box::new(e.clone()), Rational::from_integer(2))),
                    )),
                ),
                // |u|' = u u' / |u|; undefined at u = 0, where evaluation
                // reports division by zero.
                Func::Abs => Expr::Div(
                    Box::new(Expr::Mul(u.clone(), du)),
                    Box::new(e.clone()),
                ),
                Func::Exp => Expr::Mul(Box::new(e.clone()), du),
                Func::Ln => Expr::Div(du, u.clone()),
                Func::Sin => Expr::Mul(Box::new(Expr::Call(Func::Cos, u.clone())), du),
                Func::Cos => Expr::Neg(Box::new(Expr::Mul(
                    Box::new(Expr::Call(Func::Sin, u.clone())),
                    du,
                ))),
            }
        }
    }
}

/// Bottom-up constant folding and identity elimination. Folding `0 * u` to
/// `0` can widen the domain of a derivative tree slightly; evaluation of the
/// original function still reports its own domain violations first.
pub fn simplify(e: Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var => e,
        Expr::Neg(u) => match simplify(*u) {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            u => Expr::Neg(Box::new(u)),
        },
        Expr::Add(u, v) => match (simplify(*u), simplify(*v)) {
            (Expr::Const(a), Expr::Const(b)) if (a + b).is_finite() => Expr::Const(a + b),
            (Expr::Const(c), v) if c == 0.0 => v,
            (u, Expr::Const(c)) if c == 0.0 => u,
            (u, v) => Expr::Add(Box::new(u), Box::new(v)),
        },
        Expr::Sub(u, v) => match (simplify(*u), simplify(*v)) {
            (Expr::Const(a), Expr::Const(b)) if (a - b).is_finite() => Expr::Const(a - b),
            (u, Expr::Const(c)) if c == 0.0 => u,
            (Expr::Const(c), v) if c == 0.0 => simplify(Expr::Neg(Box::new(v))),
            (u, v) => Expr::Sub(Box::new(u), Box::new(v)),
        },
        Expr::Mul(u, v) => match (simplify(*u), simplify(*v)) {
            (Expr::Const(a), Expr::Const(b)) if (a * b).is_finite() => Expr::Const(a * b),
            (Expr::Const(c), _) | (_, Expr::Const(c)) if c == 0.0 => Expr::Const(0.0),
            (Expr::Const(c), v) if c == 1.0 => v,
            (u, Expr::Const(c)) if c == 1.0 => u,
            (u, v) => Expr::Mul(Box::new(u), Box::new(v)),
        },
        Expr::Div(u, v) => match (simplify(*u), simplify(*v)) {
            (Expr::Const(a), Expr::Const(b)) if b != 0.0 && (a / b).is_finite() => {
                Expr::Const(a / b)
            }
            (Expr::Const(c), _) if c == 0.0 => Expr::Const(0.0),
            (u, Expr::Const(c)) if c == 1.0 => u,
            (u, v) => Expr::Div(Box::new(u), Box::new(v)),
        },
        Expr::Pow(u, r) => {
            let u = simplify(*u);
            if r == Rational::from_integer(0) {
                return Expr::Const(1.0);
            }
            if r == Rational::from_integer(1) {
                return u;
            }
            if let Expr::Const(c) = u {
                if let Ok(v) = pow_rational(c, r) {
                    return Expr::Const(v);
                }
            }
            Expr::Pow(Box::new(u), r)
        }
        Expr::Call(func, u) => {
            let u = simplify(*u);
            if let Expr::Const(c) = u {
                if let Ok(v) = Expr::Call(func, Box::new(Expr::Const(c))).eval(0.0) {
                    return Expr::Const(v);
                }
            }
            Expr::Call(func, Box::new(u))
        }
    }
}
