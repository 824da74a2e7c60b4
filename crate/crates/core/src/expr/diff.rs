use super::{Expr, Func};
use crate::error::{Error, Result};

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// Symbolic derivative with respect to `symbol`, simplified.
pub fn differentiate(e: &Expr, symbol: &str) -> Result<Expr> {
    Ok(simplify(&derive(e, symbol)?))
}

fn derive(e: &Expr, x: &str) -> Result<Expr> {
    if !e.depends_on(x) {
        return Ok(Expr::Num(0.0));
    }
    Ok(match e {
        Expr::Num(_) => Expr::Num(0.0),
        Expr::Sym(s) => Expr::Num(if s == x { 1.0 } else { 0.0 }),
        Expr::Neg(a) => Expr::Neg(bx(derive(a, x)?)),
        Expr::Add(a, b) => Expr::Add(bx(derive(a, x)?), bx(derive(b, x)?)),
        Expr::Sub(a, b) => Expr::Sub(bx(derive(a, x)?), bx(derive(b, x)?)),
        Expr::Mul(a, b) => Expr::Add(
            bx(Expr::Mul(bx(derive(a, x)?), b.clone())),
            bx(Expr::Mul(a.clone(), bx(derive(b, x)?))),
        ),
        Expr::Div(a, b) => Expr::Div(
            bx(Expr::Sub(
                bx(Expr::Mul(bx(derive(a, x)?), b.clone())),
                bx(Expr::Mul(a.clone(), bx(derive(b, x)?))),
            )),
            bx(Expr::Pow(b.clone(), 2)),
        ),
        Expr::Pow(_, 0) => Expr::Num(0.0),
        Expr::Pow(a, n) => Expr::Mul(
            bx(Expr::Mul(
                bx(Expr::Num(*n as f64)),
                bx(Expr::Pow(a.clone(), n - 1)),
            )),
            bx(derive(a, x)?),
        ),
        Expr::Call(f, a) => {
            let inner = derive(a, x)?;
            let outer = match f {
                Func::Sqrt => Expr::Div(
                    bx(Expr::Num(1.0)),
                    bx(Expr::Mul(bx(Expr::Num(2.0)), bx(e.clone()))),
                ),
                Func::Sin => Expr::Call(Func::Cos, a.clone()),
                Func::Cos => Expr::Neg(bx(Expr::Call(Func::Sin, a.clone()))),
                Func::Exp => e.clone(),
                Func::Conj => return Err(Error::NotDifferentiable(e.to_string())),
            };
            Expr::Mul(bx(outer), bx(inner))
        }
    })
}

/// Local bottom-up simplification: constant folding and absorption of 0 and 1.
pub fn simplify(e: &Expr) -> Expr {
    use Expr::*;
    match e {
        Num(_) | Sym(_) => e.clone(),
        Neg(a) => match simplify(a) {
            Num(x) => Num(-x),
            Neg(inner) => *inner,
            Mul(c, y) if matches!(*c, Num(_)) => {
                let Num(k) = *c else { unreachable!() };
                Mul(bx(Num(-k)), y)
            }
            s => Neg(bx(s)),
        },
        Add(a, b) => match (simplify(a), simplify(b)) {
            (Num(x), Num(y)) if (x + y).is_finite() => Num(x + y),
            (Num(z), s) | (s, Num(z)) if z == 0.0 => s,
            (s, Neg(t)) => Sub(bx(s), t),
            (s, t) => Add(bx(s), bx(t)),
        },
        Sub(a, b) => match (simplify(a), simplify(b)) {
            (Num(x), Num(y)) if (x - y).is_finite() => Num(x - y),
            (s, Num(z)) if z == 0.0 => s,
            (Num(z), t) if z == 0.0 => simplify(&Neg(bx(t))),
            (s, t) => Sub(bx(s), bx(t)),
        },
        Mul(a, b) => match (simplify(a), simplify(b)) {
            (Num(x), Num(y)) if (x * y).is_finite() => Num(x * y),
            (Num(z), _) | (_, Num(z)) if z == 0.0 => Num(0.0),
            (Num(o), s) | (s, Num(o)) if o == 1.0 => s,
            (Num(x), Mul(c, t)) if matches!(*c, Num(_)) => {
                let Num(y) = *c else { unreachable!() };
                simplify(&Mul(bx(Num(x * y)), t))
            }
            (s, Num(x)) => simplify(&Mul(bx(Num(x)), bx(s))),
            (Num(x), Neg(t)) => Mul(bx(Num(-x)), t),
            (Mul(c, s), t) if matches!(*c, Num(_)) => simplify(&Mul(c, bx(Mul(s, bx(t))))),
            (s, t) => Mul(bx(s), bx(t)),
        },
        Div(a, b) => match (simplify(a), simplify(b)) {
            (Num(x), Num(y)) if y != 0.0 => Num(x / y),
            (Num(z), _) if z == 0.0 => Num(0.0),
            (s, Num(o)) if o == 1.0 => s,
            (s, t) => Div(bx(s), bx(t)),
        },
        Pow(a, n) => match (simplify(a), *n) {
            (_, 0) => Num(1.0),
            (s, 1) => s,
            (Num(x), k) if x.powi(k).is_finite() => Num(x.powi(k)),
            (s, k) => Pow(bx(s), k),
        },
        Call(f, a) => {
            let s = simplify(a);
            match (f, &s) {
                (Func::Sin, Num(x)) => Num(x.sin()),
                (Func::Cos, Num(x)) => Num(x.cos()),
                (Func::Exp, Num(x)) if x.exp().is_finite() => Num(x.exp()),
                (Func::Sqrt, Num(x)) if *x >= 0.0 => Num(x.sqrt()),
                (Func::Conj, Num(x)) => Num(*x),
                _ => Call(*f, bx(s)),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn d(src: &str, x: &str) -> Expr {
        differentiate(&parse_expression(src).unwrap(), x).unwrap()
    }

    #[test]
    fn zero_power_folds_without_nan() {
        assert_eq!(d("cos((0*x)^0 - 1)", "x"), Expr::Num(0.0));
        assert_eq!(simplify(&parse_expression("0^-1").unwrap()).to_string(), "0^-1");
    }

    #[test]
    fn linear_profile() {
        assert_eq!(d("2*A1", "A1"), Expr::Num(2.0));
    }

    #[test]
    fn sphere_profile() {
        let g = d("r^2 - A1^2", "A1");
        assert_eq!(g, Expr::Mul(bx(Expr::Num(-2.0)), bx(Expr::sym("A1"))));
        assert_eq!(g.to_string(), "-2*A1");
    }

    #[test]
    fn constant_profile() {
        assert_eq!(d("1", "A1"), Expr::Num(0.0));
        assert_eq!(d("r^2 + 3*hbar", "A1"), Expr::Num(0.0));
    }

    #[test]
    fn conj_is_not_differentiable() {
        let e = parse_expression("conj(A1)*2").unwrap();
        assert!(matches!(
            differentiate(&e, "A1"),
            Err(Error::NotDifferentiable(_))
        ));
        // independent of x: zero derivative, no error
        assert_eq!(d("conj(chi1)", "A1"), Expr::Num(0.0));
    }

    #[test]
    fn chain_rule_through_functions() {
        let g = d("sin(2*A1)", "A1");
        let v = g.eval_real(&|n| (n == "A1").then_some(0.3)).unwrap();
        assert!((v - 2.0 * (0.6f64).cos()).abs() < 1e-15);
    }
}
