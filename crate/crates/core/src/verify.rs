//! Operator identity suite for a quantized lattice model.

use crate::error::Result;
use crate::expr::{action_symbol, Expr};
use crate::ladder::{
    dirac_recursion_unchecked, semiclassical_coefficients, verify_consistency, ConsistencyReport,
    Convention, LadderCoefficients,
};
use crate::lattice::Direction;
use crate::model::LatticeSystem;
use crate::operator::{diagonal_op, quantize_observable, LatticeOperator, ObservableExpr, StateVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Relative tolerance for identities that hold exactly up to rounding.
pub const MACHINE_TOL: f64 = 1e-12;

/// Full Gram matrices are formed up to this dimension; beyond it only the
/// norms and the state indexing are checked.
const GRAM_DIM_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub axis: Option<usize>,
    pub pass: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, axis: Option<usize>, max_deviation: f64, tolerance: f64) -> Check {
        Check {
            name: name.to_string(),
            axis,
            pass: max_deviation <= tolerance,
            max_deviation,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub consistency: Vec<ConsistencyReport>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn rel(scale: f64) -> f64 {
    MACHINE_TOL * if scale > 0.0 { scale } else { 1.0 }
}

fn ladder(sys: &LatticeSystem, axis: usize, convention: Convention, tol: f64) -> Result<LadderCoefficients> {
    let p = sys.profile(axis)?;
    match convention {
        Convention::Dirac => dirac_recursion_unchecked(p, sys.space(), &sys.lookup(), tol),
        c => semiclassical_coefficients(p, sys.space(), c, &sys.lookup()),
    }
}

/// Raising band built directly from the lowering coefficients:
/// `Q_chibar σ_m = conj(b_{m+e_k}) σ_{m+e_k}`.
fn raising_band(sys: &LatticeSystem, axis: usize, b: &[f64]) -> Result<LatticeOperator> {
    let space = sys.space();
    let mut offset = vec![0; space.dof()];
    offset[axis - 1] = 1;
    let coeffs = (0..space.dim())
        .map(|i| {
            space
                .neighbor(i, axis, Direction::Raise)
                .map_or(Complex64::new(0.0, 0.0), |j| Complex64::new(b[j], 0.0))
        })
        .collect();
    LatticeOperator::from_band(space.clone(), offset, coeffs)
}

fn orthonormality(sys: &LatticeSystem) -> Result<Check> {
    let space = sys.space();
    let n = space.dim();
    let mut dev: f64 = 0.0;
    if n <= GRAM_DIM_CAP {
        let basis: Vec<StateVector> = (0..n).map(|i| StateVector::basis(space.clone(), i)).collect();
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((u.inner(v)? - expect).norm());
            }
        }
    } else {
        for i in 0..n {
            let u = StateVector::basis(space.clone(), i);
            dev = dev.max((u.inner(&u)? - 1.0).norm());
            if space.state_index(space.point_of(i)) != Some(i) {
                dev = dev.max(1.0);
            }
        }
    }
    Ok(Check::new("orthonormality", None, dev, 0.0))
}

/// Run every identity on the interior of the truncation box.
pub fn run_suite(sys: &LatticeSystem, convention: Convention, tol: f64) -> Result<VerifyReport> {
    let space = sys.space();
    let dof = space.dof();
    let hbar = sys.hbar();
    let lookup = sys.lookup();
    let interior = space.interior_mask();
    let mut checks = vec![orthonormality(sys)?];
    let mut consistency = Vec::new();

    let actions: Vec<LatticeOperator> = (1..=dof)
        .map(|j| diagonal_op(&Expr::sym(action_symbol(j)), space, &lookup))
        .collect::<Result<_>>()?;
    for j in 0..dof {
        for k in j + 1..dof {
            let c = actions[j].commutator(&actions[k])?;
            let name = format!("action-commutator-{}-{}", j + 1, k + 1);
            checks.push(Check::new(&name, None, c.max_abs(), 0.0));
        }
    }

    let mut lowering = BTreeMap::new();
    let mut raising = BTreeMap::new();
    for &k in sys.profiles().keys() {
        let coeffs = ladder(sys, k, convention, tol)?;
        let profile = sys.profile(k)?;
        let report = verify_consistency(&coeffs, space, profile, &lookup, tol)?;
        checks.push(Check {
            name: "ladder-consistency".into(),
            axis: Some(k),
            pass: report.pass,
            max_deviation: report.residual,
            tolerance: report.tolerance,
        });
        checks.push(Check::new(
            "ladder-defect",
            Some(k),
            report.defect.max(report.residual),
            report.tolerance,
        ));
        consistency.push(report);

        let chi = coeffs.lowering(space)?;
        let conj = ObservableExpr::parse(&format!("conj(chi{k})"), dof)?;
        let chibar = quantize_observable(&conj, space, &BTreeMap::from([(k, chi.clone())]), &lookup)?;
        let direct = raising_band(sys, k, &coeffs.b)?;
        checks.push(Check::new("adjoint", Some(k), chibar.max_diff(&direct)?, 0.0));
        let chi_scale = chi.max_abs();

        // lowering annihilates the lower region boundary
        let mut boundary: f64 = 0.0;
        for i in 0..space.dim() {
            if !space.neighbor_torus_nonempty(i, k, Direction::Lower) {
                let v = chi.apply(&StateVector::basis(space.clone(), i))?;
                boundary = boundary.max(v.amplitudes().iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        checks.push(Check::new("boundary-annihilation", Some(k), boundary, 0.0));

        // Q_{A_k} Q_chi σ_m = A_k(m − e_k) Q_chi σ_m
        let mut shift: f64 = 0.0;
        let a_scale = actions[k - 1].max_abs();
        for i in (0..space.dim()).filter(|&i| interior[i]) {
            let v = chi.apply(&StateVector::basis(space.clone(), i))?;
            let w = actions[k - 1].apply(&v)?;
            let mut m = space.point_of(i).0.clone();
            m[k - 1] -= 1;
            let lowered = space.config().action_along(k - 1, m[k - 1]);
            shift = shift.max(w.max_abs_diff(&v.scaled(Complex64::new(lowered, 0.0))));
        }
        checks.push(Check::new("shift-property", Some(k), shift, rel(chi_scale * a_scale)));

        for (j, a) in actions.iter().enumerate() {
            let delta = if j + 1 == k { hbar } else { 0.0 };
            let tol_j = rel(chi_scale * a.max_abs().max(hbar));
            let lhs = chi.commutator(a)?;
            let dev = lhs.max_diff_masked(&chi.scaled(Complex64::new(delta, 0.0)), &interior)?;
            checks.push(Check::new(&format!("commutator-chi-A{}", j + 1), Some(k), dev, tol_j));
            let lhs = chibar.commutator(a)?;
            let dev = lhs.max_diff_masked(&chibar.scaled(Complex64::new(-delta, 0.0)), &interior)?;
            checks.push(Check::new(&format!("commutator-chibar-A{}", j + 1), Some(k), dev, tol_j));
        }

        let g = diagonal_op(profile.drho(), space, &lookup)?.scaled(Complex64::new(hbar, 0.0));
        let lhs = chi.commutator(&chibar)?;
        let dev = lhs.max_diff_masked(&g, &interior)?;
        checks.push(Check::new(
            "commutator-chi-chibar",
            Some(k),
            dev,
            rel(coeffs.scale.max(g.max_abs())),
        ));
        lowering.insert(k, chi);
        raising.insert(k, chibar);
    }

    let axes: Vec<usize> = lowering.keys().copied().collect();
    for (a, &j) in axes.iter().enumerate() {
        for &k in &axes[a + 1..] {
            let (lj, lk, rk) = (&lowering[&j], &lowering[&k], &raising[&k]);
            let tol_jk = rel(lj.max_abs() * lk.max_abs());
            let dev = lj.commutator(lk)?.max_diff_masked(&LatticeOperator::zero(space.clone()), &interior)?;
            checks.push(Check::new(&format!("commutator-chi{j}-chi{k}"), Some(j), dev, tol_jk));
            let dev = lj.commutator(rk)?.max_diff_masked(&LatticeOperator::zero(space.clone()), &interior)?;
            checks.push(Check::new(&format!("commutator-chi{j}-chibar{k}"), Some(j), dev, tol_jk));
        }
    }
    Ok(VerifyReport { checks, consistency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::DEFAULT_TOLERANCE;
    use crate::model::{model_ho1d, model_ho2d, model_so3, model_so3_radius};

    fn suite(m: &crate::model::ModelDefinition, c: Convention) -> VerifyReport {
        let sys = LatticeSystem::new(m, 1.0, None, None).unwrap();
        run_suite(&sys, c, DEFAULT_TOLERANCE).unwrap()
    }

    fn failing(r: &VerifyReport) -> Vec<String> {
        r.checks.iter().filter(|c| !c.pass).map(|c| format!("{} {:?}", c.name, c.axis)).collect()
    }

    #[test]
    fn builtins_pass() {
        for m in [model_ho1d(1.0), model_ho2d(1.0), model_so3(4, 1.0, false).unwrap()] {
            let r = suite(&m, Convention::Dirac);
            assert!(r.all_pass(), "{}: {:?}", m.name, failing(&r));
        }
    }

    #[test]
    fn semiclassical_so3_fails_defect_only() {
        let r = suite(&model_so3(4, 1.0, false).unwrap(), Convention::SemiclassicalSource);
        let bad = failing(&r);
        assert!(bad.iter().any(|s| s.starts_with("ladder-defect")), "{bad:?}");
        assert!(!bad.iter().any(|s| s.starts_with("boundary") || s.starts_with("adjoint")));
    }

    #[test]
    fn inconsistent_radius_reported() {
        let r = suite(&model_so3_radius(2.3, 1.0, 0.0), Convention::Dirac);
        assert!(!r.all_pass());
        assert!(r.consistency[0].residual > 0.1);
    }
}
