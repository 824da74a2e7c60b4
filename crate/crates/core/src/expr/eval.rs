use super::{Expr, Func};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::HashMap;

/// Values of the reserved names when the caller does not bind them.
fn builtin(name: &str) -> Option<Complex64> {
    match name {
        "pi" => Some(Complex64::new(std::f64::consts::PI, 0.0)),
        "i" => Some(Complex64::new(0.0, 1.0)),
        _ => None,
    }
}

fn finite(value: Complex64, what: &dyn Fn() -> String) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        // drop signed zeros so sqrt(-4) lands on +2i rather than the cut's other side
        Ok(value + Complex64::new(0.0, 0.0))
    } else {
        Err(Error::Evaluation(format!("non-finite result in `{}`", what())))
    }
}

fn finite_real(value: f64, what: &dyn Fn() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation(format!("non-finite result in `{}`", what())))
    }
}

/// Evaluate with a map of complex bindings; `pi` and `i` fall back to their
/// usual values when unbound.
pub fn eval_expression(e: &Expr, bindings: &HashMap<String, Complex64>) -> Result<Complex64> {
    e.eval_complex(&|name| bindings.get(name).copied())
}

impl Expr {
    pub fn eval_complex(&self, lookup: &dyn Fn(&str) -> Option<Complex64>) -> Result<Complex64> {
        let v = match self {
            Expr::Num(x) => Complex64::new(*x, 0.0),
            Expr::Sym(s) => lookup(s)
                .or_else(|| builtin(s))
                .ok_or_else(|| Error::UnboundSymbol(s.clone()))?,
            Expr::Neg(a) => -a.eval_complex(lookup)?,
            Expr::Add(a, b) => a.eval_complex(lookup)? + b.eval_complex(lookup)?,
            Expr::Sub(a, b) => a.eval_complex(lookup)? - b.eval_complex(lookup)?,
            Expr::Mul(a, b) => a.eval_complex(lookup)? * b.eval_complex(lookup)?,
            Expr::Div(a, b) => {
                let d = b.eval_complex(lookup)?;
                if d == Complex64::new(0.0, 0.0) {
                    return Err(Error::Evaluation(format!("division by zero in `{self}`")));
                }
                a.eval_complex(lookup)? / d
            }
            Expr::Pow(a, n) => a.eval_complex(lookup)?.powi(*n),
            Expr::Call(f, a) => {
                let x = a.eval_complex(lookup)?;
                match f {
                    Func::Sqrt => x.sqrt(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Conj => x.conj(),
                }
            }
        };
        finite(v, &|| self.to_string())
    }

    /// Real-context evaluation: `sqrt` of a negative number is an error and
    /// `conj` is the identity.
    pub fn eval_real(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        let v = match self {
            Expr::Num(x) => *x,
            Expr::Sym(s) => match lookup(s) {
                Some(v) => v,
                None => match builtin(s) {
                    Some(c) if c.im == 0.0 => c.re,
                    Some(_) => {
                        return Err(Error::Evaluation(format!(
                            "`{s}` is imaginary in a real context"
                        )))
                    }
                    None => return Err(Error::UnboundSymbol(s.clone())),
                },
            },
            Expr::Neg(a) => -a.eval_real(lookup)?,
            Expr::Add(a, b) => a.eval_real(lookup)? + b.eval_real(lookup)?,
            Expr::Sub(a, b) => a.eval_real(lookup)? - b.eval_real(lookup)?,
            Expr::Mul(a, b) => a.eval_real(lookup)? * b.eval_real(lookup)?,
            Expr::Div(a, b) => {
                let d = b.eval_real(lookup)?;
                if d == 0.0 {
                    return Err(Error::Evaluation(format!("division by zero in `{self}`")));
                }
                a.eval_real(lookup)? / d
            }
            Expr::Pow(a, n) => a.eval_real(lookup)?.powi(*n),
            Expr::Call(f, a) => {
                let x = a.eval_real(lookup)?;
                match f {
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(Error::NegativeSqrt {
                                value: x,
                                expr: self.to_string(),
                            });
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Conj => x,
                }
            }
        };
        finite_real(v, &|| self.to_string())
    }
}

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>, String),
    Pow(Box<Node>, i32),
    Sqrt(Box<Node>, String),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Exp(Box<Node>),
}

/// A real expression with its free symbols resolved to positional slots and
/// every other symbol folded to a constant. Used on hot paths (quadrature,
/// lattice sweeps) where name lookups would dominate.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    arity: usize,
    source: String,
}

impl Compiled {
    pub fn new(e: &Expr, slots: &[&str], lookup: &dyn Fn(&str) -> Option<f64>) -> Result<Self> {
        Ok(Compiled {
            root: compile(e, slots, lookup)?,
            arity: slots.len(),
            source: e.to_string(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        debug_assert_eq!(x.len(), self.arity);
        let v = run(&self.root, x)?;
        finite_real(v, &|| self.source.clone())
    }

    /// Value if the expression has no free slots in use.
    pub fn constant(&self) -> Option<f64> {
        match self.root {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }
}

fn compile(e: &Expr, slots: &[&str], lookup: &dyn Fn(&str) -> Option<f64>) -> Result<Node> {
    let uses_slot = slots.iter().any(|s| e.depends_on(s));
    if !uses_slot {
        return Ok(Node::Const(e.eval_real(lookup)?));
    }
    let c = |x: &Expr| compile(x, slots, lookup).map(Box::new);
    Ok(match e {
        Expr::Num(x) => Node::Const(*x),
        Expr::Sym(s) => match slots.iter().position(|t| t == s) {
            Some(i) => Node::Slot(i),
            None => unreachable!("constant subtrees are folded above"),
        },
        Expr::Neg(a) => Node::Neg(c(a)?),
        Expr::Add(a, b) => Node::Add(c(a)?, c(b)?),
        Expr::Sub(a, b) => Node::Sub(c(a)?, c(b)?),
        Expr::Mul(a, b) => Node::Mul(c(a)?, c(b)?),
        Expr::Div(a, b) => Node::Div(c(a)?, c(b)?, e.to_string()),
        Expr::Pow(a, n) => Node::Pow(c(a)?, *n),
        Expr::Call(f, a) => match f {
            Func::Sqrt => Node::Sqrt(c(a)?, e.to_string()),
            Func::Sin => Node::Sin(c(a)?),
            Func::Cos => Node::Cos(c(a)?),
            Func::Exp => Node::Exp(c(a)?),
            Func::Conj => compile(a, slots, lookup)?,
        },
    })
}

fn run(n: &Node, x: &[f64]) -> Result<f64> {
    Ok(match n {
        Node::Const(c) => *c,
        Node::Slot(i) => x[*i],
        Node::Neg(a) => -run(a, x)?,
        Node::Add(a, b) => run(a, x)? + run(b, x)?,
        Node::Sub(a, b) => run(a, x)? - run(b, x)?,
        Node::Mul(a, b) => run(a, x)? * run(b, x)?,
        Node::Div(a, b, src) => {
            let d = run(b, x)?;
            if d == 0.0 {
                return Err(Error::Evaluation(format!("division by zero in `{src}`")));
            }
            run(a, x)? / d
        }
        Node::Pow(a, k) => run(a, x)?.powi(*k),
        Node::Sqrt(a, src) => {
            let v = run(a, x)?;
            if v < 0.0 {
                return Err(Error::NegativeSqrt {
                    value: v,
                    expr: src.clone(),
                });
            }
            v.sqrt()
        }
        Node::Sin(a) => run(a, x)?.sin(),
        Node::Cos(a) => run(a, x)?.cos(),
        Node::Exp(a) => run(a, x)?.exp(),
    })
}
