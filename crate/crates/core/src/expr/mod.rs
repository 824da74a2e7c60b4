//! Arithmetic expressions over action symbols, named constants, the angle
//! `alpha` and the shift symbols `chiK` / `conj(chiK)`.
//!
//! Grammar:
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = factor { ("*" | "/") factor } ;
//! factor = base [ "^" integer ] ;
//! base   = number | symbol | func "(" expr ")" | "(" expr ")" | "-" base ;
//! func   = "sqrt" | "sin" | "cos" | "exp" | "conj" ;
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`.

mod analysis;
mod diff;
mod eval;
mod parse;
mod render;

pub use analysis::{affine_form, shift_decomposition, AffineForm, ShiftKey};
pub use diff::{differentiate, simplify};
pub use eval::{eval_expression, Compiled};
pub use parse::{parse_constraint, parse_expression, Comparison, ConstraintExpr};

use std::collections::BTreeSet;

/// Reserved symbol bound to the reduced Planck constant of the run.
pub const HBAR: &str = "hbar";
/// Reserved angle symbol of one-degree-of-freedom potentials.
pub const ALPHA: &str = "alpha";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Conj,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Conj => "conj",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "conj" => Func::Conj,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

/// What a symbol name denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `A<k>`, 1-based axis.
    Action(usize),
    /// `chi<k>`, 1-based axis.
    Chi(usize),
    /// `alpha`.
    Angle,
    /// Anything else: model constants and the reserved `hbar`, `pi`, `i`.
    Named,
}

pub fn classify(name: &str) -> SymbolKind {
    fn axis(rest: &str) -> Option<usize> {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            rest.parse().ok()
        } else {
            None
        }
    }
    if let Some(k) = name.strip_prefix("chi").and_then(axis) {
        return SymbolKind::Chi(k);
    }
    if let Some(k) = name.strip_prefix('A').and_then(axis) {
        return SymbolKind::Action(k);
    }
    if name == ALPHA {
        return SymbolKind::Angle;
    }
    SymbolKind::Named
}

/// Name of the action symbol for a 1-based axis.
pub fn action_symbol(axis: usize) -> String {
    format!("A{axis}")
}

impl Expr {
    pub fn num(x: f64) -> Expr {
        Expr::Num(x)
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    /// Every symbol name referenced anywhere in the tree.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Sym(s) => s == name,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.depends_on(name),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(name) || b.depends_on(name)
            }
        }
    }

    /// True if any symbol satisfies `pred`.
    pub fn mentions(&self, pred: &dyn Fn(&str) -> bool) -> bool {
        self.symbols().iter().any(|s| pred(s))
    }
}

impl std::str::FromStr for Expr {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}
