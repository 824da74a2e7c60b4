//! Structural checks: affinity of constraints in the actions, and
//! decomposition of observables into diagonal and single-shift parts.

use super::{classify, diff::simplify, Expr, Func, SymbolKind};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// `Σ_k coeffs[k]·A_{k+1} + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineForm {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl AffineForm {
    fn constant(dof: usize, c: f64) -> Self {
        AffineForm {
            coeffs: vec![0.0; dof],
            constant: c,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    fn scaled(mut self, s: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
        self.constant *= s;
        self
    }

    fn plus(mut self, other: &AffineForm, sign: f64) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += sign * b;
        }
        self.constant += sign * other.constant;
        self
    }

    pub fn eval(&self, actions: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(actions)
            .fold(self.constant, |acc, (c, a)| acc + c * a)
    }
}

/// Reduce `e` to an affine form in `A1..A_dof`. Constants are resolved
/// through `lookup`; the error string explains why the form is not affine.
pub fn affine_form(
    e: &Expr,
    dof: usize,
    lookup: &dyn Fn(&str) -> Option<f64>,
) -> std::result::Result<AffineForm, String> {
    let rec = |x: &Expr| affine_form(x, dof, lookup);
    Ok(match e {
        Expr::Num(x) => AffineForm::constant(dof, *x),
        Expr::Sym(s) => match classify(s) {
            SymbolKind::Action(k) if (1..=dof).contains(&k) => {
                let mut f = AffineForm::constant(dof, 0.0);
                f.coeffs[k - 1] = 1.0;
                f
            }
            SymbolKind::Action(k) => return Err(format!("A{k} is outside 1..={dof}")),
            SymbolKind::Chi(_) => return Err(format!("shift symbol `{s}` in a constraint")),
            SymbolKind::Angle => return Err("angle `alpha` in a constraint".into()),
            SymbolKind::Named => match e.eval_real(lookup) {
                Ok(v) => AffineForm::constant(dof, v),
                Err(_) => return Err(format!("unknown constant `{s}`")),
            },
        },
        Expr::Neg(a) => rec(a)?.scaled(-1.0),
        Expr::Add(a, b) => rec(a)?.plus(&rec(b)?, 1.0),
        Expr::Sub(a, b) => rec(a)?.plus(&rec(b)?, -1.0),
        Expr::Mul(a, b) => {
            let (fa, fb) = (rec(a)?, rec(b)?);
            if fa.is_constant() {
                fb.scaled(fa.constant)
            } else if fb.is_constant() {
                fa.scaled(fb.constant)
            } else {
                return Err(format!("product of action-dependent terms in `{e}`"));
            }
        }
        Expr::Div(a, b) => {
            let fb = rec(b)?;
            if !fb.is_constant() {
                return Err(format!("division by an action-dependent term in `{e}`"));
            }
            if fb.constant == 0.0 {
                return Err(format!("division by zero in `{e}`"));
            }
            rec(a)?.scaled(1.0 / fb.constant)
        }
        Expr::Pow(a, n) => {
            let fa = rec(a)?;
            if fa.is_constant() {
                AffineForm::constant(dof, fa.constant.powi(*n))
            } else if *n == 1 {
                fa
            } else if *n == 0 {
                AffineForm::constant(dof, 1.0)
            } else {
                return Err(format!("power of an action-dependent term in `{e}`"));
            }
        }
        Expr::Call(_, a) => {
            if !rec(a)?.is_constant() {
                return Err(format!("function of an action-dependent term in `{e}`"));
            }
            AffineForm::constant(
                dof,
                e.eval_real(lookup).map_err(|err| err.to_string())?,
            )
        }
    })
}

/// Which shift an observable term carries: none, `chiK` (lowers axis K) or
/// `conj(chiK)` (raises axis K).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ShiftKey {
    Diagonal,
    Lower(usize),
    Raise(usize),
}

impl ShiftKey {
    fn conjugate(self) -> Self {
        match self {
            ShiftKey::Diagonal => ShiftKey::Diagonal,
            ShiftKey::Lower(k) => ShiftKey::Raise(k),
            ShiftKey::Raise(k) => ShiftKey::Lower(k),
        }
    }
}

type Terms = BTreeMap<ShiftKey, Expr>;

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

fn diagonal_only(t: &Terms) -> Option<Expr> {
    match t.len() {
        0 => Some(Expr::Num(0.0)),
        1 => t.get(&ShiftKey::Diagonal).cloned(),
        _ => None,
    }
}

fn map_coeffs(t: Terms, f: impl Fn(Expr) -> Expr) -> Terms {
    t.into_iter().map(|(k, c)| (k, f(c))).collect()
}

fn merge(mut a: Terms, b: Terms, subtract: bool) -> Terms {
    for (k, c) in b {
        let next = match a.remove(&k) {
            Some(prev) if subtract => Expr::Sub(bx(prev), bx(c)),
            Some(prev) => Expr::Add(bx(prev), bx(c)),
            None if subtract => Expr::Neg(bx(c)),
            None => c,
        };
        a.insert(k, next);
    }
    a
}

/// Split `e` into `F0 + Σ_k (F_k·chiK + G_k·conj(chiK))` with coefficients
/// free of shift symbols. Anything of higher degree in the shift symbols,
/// or a shift symbol under a nonlinear function, is rejected.
pub fn shift_decomposition(e: &Expr) -> Result<BTreeMap<ShiftKey, Expr>> {
    let terms = decompose(e)?;
    Ok(terms
        .into_iter()
        .map(|(k, c)| (k, simplify(&c)))
        .collect())
}

fn decompose(e: &Expr) -> Result<Terms> {
    let degree = |what: String| Error::Degree(what);
    Ok(match e {
        Expr::Sym(s) => match classify(s) {
            SymbolKind::Chi(k) => BTreeMap::from([(ShiftKey::Lower(k), Expr::Num(1.0))]),
            _ => BTreeMap::from([(ShiftKey::Diagonal, e.clone())]),
        },
        Expr::Num(_) => BTreeMap::from([(ShiftKey::Diagonal, e.clone())]),
        Expr::Neg(a) => map_coeffs(decompose(a)?, |c| Expr::Neg(bx(c))),
        Expr::Add(a, b) => merge(decompose(a)?, decompose(b)?, false),
        Expr::Sub(a, b) => merge(decompose(a)?, decompose(b)?, true),
        Expr::Mul(a, b) => {
            let (ta, tb) = (decompose(a)?, decompose(b)?);
            if let Some(ca) = diagonal_only(&ta) {
                map_coeffs(tb, |c| Expr::Mul(bx(ca.clone()), bx(c)))
            } else if let Some(cb) = diagonal_only(&tb) {
                map_coeffs(ta, |c| Expr::Mul(bx(c), bx(cb.clone())))
            } else {
                return Err(degree(format!("`{e}` multiplies two shift symbols")));
            }
        }
        Expr::Div(a, b) => {
            let cb = diagonal_only(&decompose(b)?)
                .ok_or_else(|| degree(format!("`{e}` divides by a shift symbol")))?;
            map_coeffs(decompose(a)?, |c| Expr::Div(bx(c), bx(cb.clone())))
        }
        Expr::Pow(a, n) => {
            let ta = decompose(a)?;
            match (diagonal_only(&ta), *n) {
                (Some(c), k) => BTreeMap::from([(ShiftKey::Diagonal, Expr::Pow(bx(c), k))]),
                (None, 1) => ta,
                (None, 0) => BTreeMap::from([(ShiftKey::Diagonal, Expr::Num(1.0))]),
                (None, _) => return Err(degree(format!("`{e}` raises a shift symbol to a power"))),
            }
        }
        Expr::Call(Func::Conj, a) => decompose(a)?
            .into_iter()
            .map(|(k, c)| (k.conjugate(), Expr::Call(Func::Conj, bx(c))))
            .collect(),
        Expr::Call(f, a) => {
            let c = diagonal_only(&decompose(a)?)
                .ok_or_else(|| degree(format!("`{e}` applies {} to a shift symbol", f.name())))?;
            BTreeMap::from([(ShiftKey::Diagonal, Expr::Call(*f, bx(c)))])
        }
    })
}
