use super::LatticeOperator;
use crate::error::{Error, Result};
use crate::expr::{action_symbol, classify, shift_decomposition, Expr, ShiftKey, SymbolKind};
use crate::lattice::StateSpace;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A first-degree observable `F0 + Σ_k (F_k·chiK + G_k·conj(chiK))` with
/// coefficients that are functions of the actions only.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableExpr {
    pub source: String,
    pub diagonal: Expr,
    pub lower: BTreeMap<usize, Expr>,
    pub raise: BTreeMap<usize, Expr>,
}

impl ObservableExpr {
    pub fn new(e: &Expr, dof: usize) -> Result<Self> {
        let mut out = ObservableExpr {
            source: e.to_string(),
            diagonal: Expr::Num(0.0),
            lower: BTreeMap::new(),
            raise: BTreeMap::new(),
        };
        for (key, coeff) in shift_decomposition(e)? {
            check_coefficient(&coeff, dof)?;
            match key {
                ShiftKey::Diagonal => out.diagonal = coeff,
                ShiftKey::Lower(k) | ShiftKey::Raise(k) if !(1..=dof).contains(&k) => {
                    return Err(Error::InvalidArgument(format!(
                        "chi{k} is outside 1..={dof}"
                    )))
                }
                ShiftKey::Lower(k) => {
                    out.lower.insert(k, coeff);
                }
                ShiftKey::Raise(k) => {
                    out.raise.insert(k, coeff);
                }
            }
        }
        Ok(out)
    }

    pub fn parse(src: &str, dof: usize) -> Result<Self> {
        let mut o = Self::new(&crate::expr::parse_expression(src)?, dof)?;
        o.source = src.to_string();
        Ok(o)
    }

    pub fn is_diagonal(&self) -> bool {
        self.lower.is_empty() && self.raise.is_empty()
    }

    /// Axes whose ladder the observable needs.
    pub fn axes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.lower.keys().chain(self.raise.keys()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn check_coefficient(e: &Expr, dof: usize) -> Result<()> {
    for s in e.symbols() {
        match classify(&s) {
            SymbolKind::Action(k) if !(1..=dof).contains(&k) => {
                return Err(Error::InvalidArgument(format!("A{k} is outside 1..={dof}")))
            }
            SymbolKind::Angle => {
                return Err(Error::Degree(format!(
                    "`{e}` depends on the angle; only action functions may multiply shift symbols"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Diagonal operator `F(A(m))`. `constants` resolves every non-action symbol.
pub fn diagonal_op(
    f: &Expr,
    space: &Arc<StateSpace>,
    constants: &dyn Fn(&str) -> Option<f64>,
) -> Result<LatticeOperator> {
    let dof = space.dof();
    let names: Vec<String> = (1..=dof).map(action_symbol).collect();
    let mut values = Vec::with_capacity(space.dim());
    for i in 0..space.dim() {
        let a = space.actions_of(i);
        let lookup = |n: &str| {
            names
                .iter()
                .position(|s| s == n)
                .map(|k| a[k])
                .or_else(|| constants(n))
                .map(|x| Complex64::new(x, 0.0))
        };
        let v = f
            .eval_complex(&lookup)
            .map_err(|e| Error::at_state(space.point_of(i).as_slice(), e))?;
        values.push(v);
    }
    LatticeOperator::diagonal(space.clone(), values)
}

/// `Q = Q_{F0} + Σ_k Q_{F_k}∘Q_{chiK} + Q_{G_k}∘Q_{chiK}†`, given the
/// lowering operator of every axis the observable uses.
pub fn quantize_observable(
    obs: &ObservableExpr,
    space: &Arc<StateSpace>,
    lowering: &BTreeMap<usize, LatticeOperator>,
    constants: &dyn Fn(&str) -> Option<f64>,
) -> Result<LatticeOperator> {
    let ladder = |k: usize| {
        lowering.get(&k).ok_or_else(|| {
            Error::InvalidArgument(format!("no ladder coefficients for axis {k}"))
        })
    };
    let mut q = diagonal_op(&obs.diagonal, space, constants)?;
    for (k, f) in &obs.lower {
        let term = diagonal_op(f, space, constants)?.compose(ladder(*k)?)?;
        q = q.add(&term)?;
    }
    for (k, g) in &obs.raise {
        let term = diagonal_op(g, space, constants)?.compose(&ladder(*k)?.adjoint())?;
        q = q.add(&term)?;
    }
    Ok(q.pruned())
}
