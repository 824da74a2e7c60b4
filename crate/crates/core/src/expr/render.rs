use super::Expr;
use std::fmt;

fn literal(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x:?}")
    }
}

// One writer per grammar level; each wraps in parentheses only when the
// child cannot be produced by that level.
fn expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Add(a, b) => {
            expr(a, f)?;
            f.write_str(" + ")?;
            term(b, f)
        }
        Expr::Sub(a, b) => {
            expr(a, f)?;
            f.write_str(" - ")?;
            term(b, f)
        }
        _ => term(e, f),
    }
}

fn term(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Mul(a, b) => {
            term(a, f)?;
            f.write_str("*")?;
            factor(b, f)
        }
        Expr::Div(a, b) => {
            term(a, f)?;
            f.write_str("/")?;
            factor(b, f)
        }
        _ => factor(e, f),
    }
}

fn factor(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Pow(b, n) => {
            base(b, f)?;
            write!(f, "^{n}")
        }
        _ => base(e, f),
    }
}

fn base(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Num(x) => f.write_str(&literal(*x)),
        Expr::Sym(s) => f.write_str(s),
        Expr::Call(func, arg) => {
            write!(f, "{}(", func.name())?;
            expr(arg, f)?;
            f.write_str(")")
        }
        Expr::Neg(a) => {
            f.write_str("-")?;
            base(a, f)
        }
        _ => {
            f.write_str("(")?;
            expr(e, f)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        expr(self, f)
    }
}
