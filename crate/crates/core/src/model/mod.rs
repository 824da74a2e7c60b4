//! Model definitions, the builtin examples, and models bound to a value of
//! hbar.

mod builtin;
mod file;

pub use builtin::{builtin, model_ho1d, model_ho2d, model_pendulum, model_so3, model_so3_radius, BUILTIN_NAMES};
pub use file::{parse_model_file, to_model_file};

use crate::error::{Error, Result};
use crate::expr::{classify, parse_constraint, ConstraintExpr, Expr, SymbolKind, HBAR};
use crate::ladder::{ladder_coefficients, Convention, LadderCoefficients, RadialProfile};
use crate::lattice::{enumerate_states, BoxAxis, LatticeConfig, LatticeRegion, StateSpace};
use crate::numerics::{Domain, OneDofSystem};
use crate::operator::{quantize_observable, LatticeOperator, ObservableExpr};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Names bound automatically in every expression.
pub const RESERVED: [&str; 3] = [HBAR, "pi", "i"];

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeData {
    pub offsets: Vec<f64>,
    pub constraints: Vec<ConstraintExpr>,
    /// axis (1-based) → `rho_k`
    pub profiles: BTreeMap<usize, Expr>,
    pub hamiltonian: Expr,
    pub default_box: Vec<BoxAxis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialData {
    pub potential: Expr,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Lattice(LatticeData),
    Potential(PotentialData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelDefinition {
    pub name: String,
    pub dof: usize,
    /// Values may reference `hbar` and other constants.
    pub constants: BTreeMap<String, Expr>,
    pub kind: ModelKind,
    pub observables: BTreeMap<String, Expr>,
    pub default_hbar: f64,
    pub notes: Vec<String>,
}

impl ModelDefinition {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::Lattice(_) => "lattice",
            ModelKind::Potential(_) => "potential",
        }
    }

    pub fn lattice(&self) -> Option<&LatticeData> {
        match &self.kind {
            ModelKind::Lattice(l) => Some(l),
            ModelKind::Potential(_) => None,
        }
    }

    pub fn potential(&self) -> Option<&PotentialData> {
        match &self.kind {
            ModelKind::Potential(p) => Some(p),
            ModelKind::Lattice(_) => None,
        }
    }

    /// Numeric values of the constants for a given hbar. Constants may refer
    /// to each other in any order; cycles are rejected.
    pub fn resolve_constants(&self, hbar: f64) -> Result<BTreeMap<String, f64>> {
        let mut done: BTreeMap<String, f64> = BTreeMap::new();
        let mut pending: Vec<(&String, &Expr)> = self.constants.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut still = Vec::new();
            for (name, e) in pending {
                let ready = e
                    .symbols()
                    .iter()
                    .all(|s| RESERVED.contains(&s.as_str()) || done.contains_key(s) || !self.constants.contains_key(s));
                if !ready {
                    still.push((name, e));
                    continue;
                }
                let v = e
                    .eval_real(&|n| if n == HBAR { Some(hbar) } else { done.get(n).copied() })
                    .map_err(|err| Error::model(format!("constants.{name}"), err.to_string()))?;
                done.insert(name.clone(), v);
            }
            if still.len() == before {
                return Err(Error::model(
                    format!("constants.{}", still[0].0),
                    "constants refer to each other in a cycle",
                ));
            }
            pending = still;
        }
        Ok(done)
    }

    /// Structural and semantic checks, run for builtins and files alike.
    pub fn validate(&self) -> Result<()> {
        if self.dof == 0 {
            return Err(Error::model("dof", "must be positive"));
        }
        for name in self.constants.keys() {
            if RESERVED.contains(&name.as_str()) || classify(name) != SymbolKind::Named {
                return Err(Error::model(
                    format!("constants.{name}"),
                    "name is reserved or collides with a model symbol",
                ));
            }
        }
        let consts = self.resolve_constants(self.default_hbar)?;
        let lookup = scope(self.default_hbar, &consts);
        match &self.kind {
            ModelKind::Lattice(l) => {
                if l.offsets.len() != self.dof {
                    return Err(Error::model(
                        "lattice.offsets",
                        format!("expected {} entries, found {}", self.dof, l.offsets.len()),
                    ));
                }
                LatticeConfig::with_offsets(self.default_hbar, l.offsets.clone())
                    .map_err(|e| Error::model("lattice.offsets", e.to_string()))?;
                for (i, c) in l.constraints.iter().enumerate() {
                    LatticeRegion::new(self.dof, std::slice::from_ref(c), &lookup)
                        .map_err(|e| Error::model(format!("lattice.constraints[{i}]"), e.to_string()))?;
                }
                for (axis, rho) in &l.profiles {
                    RadialProfile::new(*axis, rho.clone(), self.dof)
                        .map_err(|e| Error::model(format!("profiles.{axis}"), e.to_string()))?;
                }
                check_action_function(&l.hamiltonian, self.dof, &consts)
                    .map_err(|m| Error::model("hamiltonian", m))?;
                if l.default_box.len() != self.dof {
                    return Err(Error::model(
                        "box",
                        format!("expected {} intervals, found {}", self.dof, l.default_box.len()),
                    ));
                }
                for (name, e) in &self.observables {
                    let o = ObservableExpr::new(e, self.dof)
                        .map_err(|err| Error::model(format!("observables.{name}"), err.to_string()))?;
                    for k in o.axes() {
                        if !l.profiles.contains_key(&k) {
                            return Err(Error::model(
                                format!("observables.{name}"),
                                format!("uses chi{k} but no profile is given for axis {k}"),
                            ));
                        }
                    }
                    check_unknown(e, &consts).map_err(|m| Error::model(format!("observables.{name}"), m))?;
                }
            }
            ModelKind::Potential(p) => {
                if self.dof != 1 {
                    return Err(Error::model("dof", "potential models have one degree of freedom"));
                }
                for s in p.potential.symbols() {
                    let ok = match classify(&s) {
                        SymbolKind::Angle => true,
                        SymbolKind::Named => consts.contains_key(&s) || RESERVED.contains(&s.as_str()),
                        _ => false,
                    };
                    if !ok {
                        return Err(Error::model(
                            "potential",
                            format!("`{s}` is not the angle or a declared constant"),
                        ));
                    }
                }
                if !self.observables.is_empty() {
                    return Err(Error::model("observables", "potential models carry no observables"));
                }
            }
        }
        Ok(())
    }
}

fn check_unknown(e: &Expr, consts: &BTreeMap<String, f64>) -> std::result::Result<(), String> {
    for s in e.symbols() {
        if classify(&s) == SymbolKind::Named && !consts.contains_key(&s) && !RESERVED.contains(&s.as_str()) {
            return Err(format!("unknown symbol `{s}`"));
        }
    }
    Ok(())
}

fn check_action_function(e: &Expr, dof: usize, consts: &BTreeMap<String, f64>) -> std::result::Result<(), String> {
    for s in e.symbols() {
        match classify(&s) {
            SymbolKind::Action(k) if (1..=dof).contains(&k) => {}
            SymbolKind::Named => {}
            _ => return Err(format!("`{s}` is not an action symbol or constant")),
        }
    }
    check_unknown(e, consts)
}

/// Name resolution for constants and hbar.
pub fn scope<'a>(hbar: f64, consts: &'a BTreeMap<String, f64>) -> impl Fn(&str) -> Option<f64> + 'a {
    move |n: &str| if n == HBAR { Some(hbar) } else { consts.get(n).copied() }
}

pub(crate) fn constraints(src: &[&str]) -> Vec<ConstraintExpr> {
    src.iter()
        .map(|s| parse_constraint(s).expect("builtin constraint parses"))
        .collect()
}

/// A lattice model at a fixed hbar, offsets and truncation box.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    name: String,
    hbar: f64,
    constants: BTreeMap<String, f64>,
    space: Arc<StateSpace>,
    profiles: BTreeMap<usize, RadialProfile>,
    observables: BTreeMap<String, ObservableExpr>,
    hamiltonian: Expr,
}

impl LatticeSystem {
    pub fn new(
        model: &ModelDefinition,
        hbar: f64,
        bounds: Option<Vec<BoxAxis>>,
        offsets: Option<Vec<f64>>,
    ) -> Result<Self> {
        let ModelKind::Lattice(data) = &model.kind else {
            return Err(Error::model("kind", format!("`{}` is not a lattice model", model.name)));
        };
        let constants = model.resolve_constants(hbar)?;
        let lookup = scope(hbar, &constants);
        let offsets = offsets.unwrap_or_else(|| data.offsets.clone());
        if offsets.len() != model.dof {
            return Err(Error::DimensionMismatch {
                expected: model.dof,
                found: offsets.len(),
            });
        }
        let config = LatticeConfig::with_offsets(hbar, offsets)?;
        let region = LatticeRegion::new(model.dof, &data.constraints, &lookup)?;
        let bounds = bounds.unwrap_or_else(|| data.default_box.clone());
        let space = Arc::new(enumerate_states(region, bounds, config)?);
        let mut profiles = BTreeMap::new();
        for (axis, rho) in &data.profiles {
            let p = RadialProfile::new(*axis, rho.clone(), model.dof)?;
            p.check_nonnegative(&space, &lookup)?;
            profiles.insert(*axis, p);
        }
        drop(lookup);
        let observables = model
            .observables
            .iter()
            .map(|(k, e)| Ok((k.clone(), ObservableExpr::new(e, model.dof)?)))
            .collect::<Result<_>>()?;
        Ok(LatticeSystem {
            name: model.name.clone(),
            hbar,
            constants,
            space,
            profiles,
            observables,
            hamiltonian: data.hamiltonian.clone(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn constants(&self) -> &BTreeMap<String, f64> {
        &self.constants
    }

    pub fn lookup(&self) -> impl Fn(&str) -> Option<f64> + '_ {
        scope(self.hbar, &self.constants)
    }

    pub fn profiles(&self) -> &BTreeMap<usize, RadialProfile> {
        &self.profiles
    }

    pub fn profile(&self, axis: usize) -> Result<&RadialProfile> {
        self.profiles
            .get(&axis)
            .ok_or_else(|| Error::InvalidArgument(format!("model has no profile for axis {axis}")))
    }

    pub fn hamiltonian(&self) -> &Expr {
        &self.hamiltonian
    }

    pub fn observable_names(&self) -> impl Iterator<Item = &str> {
        self.observables.keys().map(String::as_str)
    }

    pub fn observable(&self, name: &str) -> Result<&ObservableExpr> {
        self.observables
            .get(name)
            .ok_or_else(|| Error::UnknownObservable(name.to_string()))
    }

    pub fn ladder(&self, axis: usize, convention: Convention, tol: f64) -> Result<LadderCoefficients> {
        ladder_coefficients(self.profile(axis)?, &self.space, convention, &self.lookup(), tol)
    }

    pub fn lowering(&self, axis: usize, convention: Convention, tol: f64) -> Result<LatticeOperator> {
        self.ladder(axis, convention, tol)?.lowering(&self.space)
    }

    pub fn quantize_expr(&self, obs: &ObservableExpr, convention: Convention, tol: f64) -> Result<LatticeOperator> {
        let mut ladders = BTreeMap::new();
        for k in obs.axes() {
            ladders.insert(k, self.lowering(k, convention, tol)?);
        }
        quantize_observable(obs, &self.space, &ladders, &self.lookup())
    }

    pub fn quantize(&self, name: &str, convention: Convention, tol: f64) -> Result<LatticeOperator> {
        self.quantize_expr(self.observable(name)?, convention, tol)
    }
}

/// A potential model at a fixed set of constants.
pub fn potential_system(model: &ModelDefinition, hbar: f64) -> Result<OneDofSystem> {
    let ModelKind::Potential(p) = &model.kind else {
        return Err(Error::model("kind", format!("`{}` is not a potential model", model.name)));
    };
    let constants = model.resolve_constants(hbar)?;
    let sys = OneDofSystem::new(&p.potential, p.domain, &scope(hbar, &constants));
    sys
}
