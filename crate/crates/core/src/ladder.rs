//! Ladder coefficients `b_{m,k}` of the lowering operators `Q_{chiK}`:
//! exact solution of the commutator recursion and naive semiclassical rules.

use crate::error::{Error, Result};
use crate::expr::{action_symbol, classify, differentiate, Compiled, Expr, SymbolKind};
use crate::lattice::{Direction, LineRange, StateSpace};
use crate::operator::{shift_op, LatticeOperator};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const MAX_RECURSION_STEPS: i64 = 10_000_000;

/// `rho = r_k^2` as a function of `A_k` alone, with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    axis: usize,
    rho: Expr,
    drho: Expr,
}

impl RadialProfile {
    pub fn new(axis: usize, rho: Expr, dof: usize) -> Result<Self> {
        if !(1..=dof).contains(&axis) {
            return Err(Error::InvalidArgument(format!(
                "profile axis {axis} outside 1..={dof}"
            )));
        }
        for s in rho.symbols() {
            let local = match classify(&s) {
                SymbolKind::Action(k) => k == axis,
                SymbolKind::Named => true,
                SymbolKind::Chi(_) | SymbolKind::Angle => false,
            };
            if !local {
                return Err(Error::ProfileNotLocal { axis, symbol: s });
            }
        }
        let drho = differentiate(&rho, &action_symbol(axis))?;
        Ok(RadialProfile { axis, rho, drho })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn rho(&self) -> &Expr {
        &self.rho
    }

    /// `G_k = d rho / d A_k`; with `{chi, conj(chi)} = −i·G` this is the
    /// diagonal that `[Q_chi, Q_chi†]` must equal, divided by hbar.
    pub fn drho(&self) -> &Expr {
        &self.drho
    }

    fn compile(&self, constants: &dyn Fn(&str) -> Option<f64>) -> Result<(Compiled, Compiled)> {
        let a = action_symbol(self.axis);
        Ok((
            Compiled::new(&self.rho, &[&a], constants)?,
            Compiled::new(&self.drho, &[&a], constants)?,
        ))
    }

    /// Check `rho(A(m)) ≥ 0` at every state of `space`.
    pub fn check_nonnegative(
        &self,
        space: &StateSpace,
        constants: &dyn Fn(&str) -> Option<f64>,
    ) -> Result<()> {
        let (rho, _) = self.compile(constants)?;
        let tol = space.hbar() * space.hbar() * 1e-12;
        for i in 0..space.dim() {
            let a = space.actions_of(i)[self.axis - 1];
            let v = rho
                .eval(&[a])
                .map_err(|e| Error::at_state(space.point_of(i).as_slice(), e))?;
            if v < -tol {
                return Err(Error::NotQuantizable {
                    axis: self.axis,
                    state: space.point_of(i).0.clone(),
                    beta: v,
                });
            }
        }
        Ok(())
    }
}

/// The bracket profile `G_k = d rho_k / d A_k`.
pub fn bracket_profile(p: &RadialProfile) -> Expr {
    p.drho.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Convention {
    Dirac,
    SemiclassicalSource,
    SemiclassicalMidpoint,
}

impl Convention {
    pub fn name(self) -> &'static str {
        match self {
            Convention::Dirac => "dirac",
            Convention::SemiclassicalSource => "semiclassical-source",
            Convention::SemiclassicalMidpoint => "semiclassical-midpoint",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirac" => Ok(Convention::Dirac),
            "semiclassical-source" => Ok(Convention::SemiclassicalSource),
            "semiclassical-midpoint" => Ok(Convention::SemiclassicalMidpoint),
            other => Err(Error::InvalidArgument(format!("unknown convention `{other}`"))),
        }
    }
}

/// Lowering coefficients for one axis, indexed like the states of the space.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoefficients {
    pub axis: usize,
    pub convention: Convention,
    /// `beta_m = |b_m|^2`
    pub beta: Vec<f64>,
    pub b: Vec<f64>,
    /// Boundary defect of the recursion; zero for semiclassical rules.
    pub residual: f64,
    /// Scale that relative tolerances multiply.
    pub scale: f64,
    /// States where a negative `rho` was clamped to zero.
    pub clamped: Vec<usize>,
}

impl LadderCoefficients {
    /// The lowering operator `Q_{chiK}`.
    pub fn lowering(&self, space: &Arc<StateSpace>) -> Result<LatticeOperator> {
        shift_op(
            space.clone(),
            self.axis,
            self.b.iter().map(|x| Complex64::new(*x, 0.0)).collect(),
        )
    }
}

// States of the space grouped by line along `axis`, each sorted by m_axis.
fn lines(space: &StateSpace, axis: usize) -> BTreeMap<Vec<i64>, Vec<usize>> {
    let mut out: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, m) in space.states().iter().enumerate() {
        let mut key = m.0.clone();
        key.remove(axis - 1);
        out.entry(key).or_default().push(i);
    }
    for idx in out.values_mut() {
        idx.sort_by_key(|i| space.point_of(*i).0[axis - 1]);
    }
    out
}

/// Solve `beta_{m+e_k} − beta_m = hbar·G_k(A(m))` along every line through
/// the space, anchored at `beta = 0` on the lower region boundary, and fail
/// when the boundary residual exceeds `tol` (relative to the coefficient
/// scale).
pub fn solve_dirac_recursion(
    profile: &RadialProfile,
    space: &StateSpace,
    constants: &dyn Fn(&str) -> Option<f64>,
    tol: f64,
) -> Result<LadderCoefficients> {
    let c = dirac_recursion_unchecked(profile, space, constants, tol)?;
    let limit = tol * c.scale;
    if c.residual > limit {
        return Err(Error::InconsistentQuantization {
            axis: profile.axis,
            residual: c.residual,
            tolerance: limit,
        });
    }
    Ok(c)
}

/// As [`solve_dirac_recursion`] but returns the residual instead of failing
/// on it. Negative `beta` still fails.
pub fn dirac_recursion_unchecked(
    profile: &RadialProfile,
    space: &StateSpace,
    constants: &dyn Fn(&str) -> Option<f64>,
    tol: f64,
) -> Result<LadderCoefficients> {
    let axis = profile.axis;
    let k0 = axis - 1;
    let hbar = space.hbar();
    let cfg = space.config();
    let (rho, g) = profile.compile(constants)?;
    let mut beta = vec![0.0; space.dim()];
    let mut residual: f64 = 0.0;
    let mut scale = hbar * hbar;
    // negative betas in visiting order; judged once the scale is known
    let mut negative: Vec<(Vec<i64>, f64)> = Vec::new();

    for idx in lines(space, axis).values() {
        let first = space.point_of(idx[0]).0.clone();
        let last_m = space.point_of(*idx.last().unwrap()).0[k0];
        let (lo, hi) = match space.line_range(idx[0], axis) {
            LineRange::Span(lo, hi) => (lo, hi),
            LineRange::Empty => unreachable!("line contains a state"),
        };
        let at = |mk: i64| {
            let mut m = first.clone();
            m[k0] = mk;
            m
        };
        let eval = |f: &Compiled, mk: i64| {
            f.eval(&[cfg.action_along(k0, mk)])
                .map_err(|e| Error::at_state(&at(mk), e))
        };
        let (start, mut b) = match lo {
            Some(l) => {
                if hi.is_some() {
                    // a doubly bounded line also needs the radial factor to
                    // vanish on its lowest torus
                    residual = residual.max(eval(&rho, l)?.abs());
                }
                (l, 0.0)
            }
            None => (first[k0], eval(&rho, first[k0])?),
        };
        let stop = match hi {
            Some(h) => h + 1,
            None => last_m,
        };
        if first[k0] - start > MAX_RECURSION_STEPS {
            return Err(Error::InvalidArgument(format!(
                "recursion along axis {axis} would start {} steps below the box",
                first[k0] - start
            )));
        }
        let mut cursor = 0;
        let mut mk = start;
        loop {
            scale = scale.max(b.abs());
            if b < 0.0 && mk <= hi.unwrap_or(i64::MAX) {
                negative.push((at(mk), b));
            }
            if cursor < idx.len() && space.point_of(idx[cursor]).0[k0] == mk {
                beta[idx[cursor]] = b;
                cursor += 1;
            }
            if mk == stop {
                break;
            }
            let step = hbar * eval(&g, mk)?;
            scale = scale.max(step.abs());
            b += step;
            mk += 1;
        }
        if hi.is_some() {
            residual = residual.max(b.abs());
        }
    }

    if let Some((state, value)) = negative.into_iter().find(|(_, v)| *v < -tol * scale) {
        return Err(Error::NotQuantizable {
            axis,
            state,
            beta: value,
        });
    }
    let beta: Vec<f64> = beta.into_iter().map(|x| x.max(0.0)).collect();
    Ok(LadderCoefficients {
        axis,
        convention: Convention::Dirac,
        b: beta.iter().map(|x| x.sqrt()).collect(),
        beta,
        residual,
        scale,
        clamped: Vec::new(),
    })
}

/// `b_m = sqrt(rho)` at `A(m)` (source) or half a step below along the axis
/// (midpoint); zero where the lowered torus is empty.
pub fn semiclassical_coefficients(
    profile: &RadialProfile,
    space: &StateSpace,
    convention: Convention,
    constants: &dyn Fn(&str) -> Option<f64>,
) -> Result<LadderCoefficients> {
    let axis = profile.axis;
    let shift = match convention {
        Convention::SemiclassicalSource => 0.0,
        Convention::SemiclassicalMidpoint => -0.5,
        Convention::Dirac => {
            return Err(Error::InvalidArgument(
                "dirac coefficients come from the recursion".into(),
            ))
        }
    };
    let hbar = space.hbar();
    let (rho, _) = profile.compile(constants)?;
    let mut beta = vec![0.0; space.dim()];
    let mut clamped = Vec::new();
    let mut scale = hbar * hbar;
    for (i, slot) in beta.iter_mut().enumerate() {
        if !space.neighbor_torus_nonempty(i, axis, Direction::Lower) {
            continue;
        }
        let a = space.actions_of(i)[axis - 1] + shift * hbar;
        let v = rho
            .eval(&[a])
            .map_err(|e| Error::at_state(space.point_of(i).as_slice(), e))?;
        scale = scale.max(v.abs());
        if v < 0.0 {
            clamped.push(i);
        }
        *slot = v.max(0.0);
    }
    Ok(LadderCoefficients {
        axis,
        convention,
        b: beta.iter().map(|x| x.sqrt()).collect(),
        beta,
        residual: 0.0,
        scale,
        clamped,
    })
}

/// Coefficients under the requested convention; the dirac branch enforces
/// the residual tolerance.
pub fn ladder_coefficients(
    profile: &RadialProfile,
    space: &StateSpace,
    convention: Convention,
    constants: &dyn Fn(&str) -> Option<f64>,
    tol: f64,
) -> Result<LadderCoefficients> {
    match convention {
        Convention::Dirac => solve_dirac_recursion(profile, space, constants, tol),
        _ => semiclassical_coefficients(profile, space, convention, constants),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub axis: usize,
    pub convention: Convention,
    pub boundary_zeros: bool,
    /// States on the lower boundary whose coefficient is nonzero.
    pub boundary_failures: Vec<usize>,
    pub positivity: bool,
    /// `max |(beta_{m+e_k} − beta_m) − hbar·G_k(A(m))|` over states whose
    /// upper neighbour is a state or an empty torus.
    pub defect: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ConsistencyReport {
    pub fn defect_ok(&self) -> bool {
        self.defect <= self.tolerance && self.residual <= self.tolerance
    }
}

pub fn verify_consistency(
    coeffs: &LadderCoefficients,
    space: &StateSpace,
    profile: &RadialProfile,
    constants: &dyn Fn(&str) -> Option<f64>,
    tol: f64,
) -> Result<ConsistencyReport> {
    let axis = coeffs.axis;
    if coeffs.beta.len() != space.dim() || coeffs.b.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: coeffs.beta.len(),
        });
    }
    let (_, g) = profile.compile(constants)?;
    let hbar = space.hbar();
    let mut boundary_failures = Vec::new();
    let mut positivity = true;
    let mut defect: f64 = 0.0;
    let mut scale = coeffs.scale.max(hbar * hbar);
    for i in 0..space.dim() {
        let (beta, b) = (coeffs.beta[i], coeffs.b[i]);
        if !(beta >= 0.0 && b >= 0.0 && beta.is_finite() && b.is_finite()) {
            positivity = false;
        }
        if !space.neighbor_torus_nonempty(i, axis, Direction::Lower) && b != 0.0 {
            boundary_failures.push(i);
        }
        let next = match space.neighbor(i, axis, Direction::Raise) {
            Some(j) => coeffs.beta[j],
            None if !space.neighbor_torus_nonempty(i, axis, Direction::Raise) => 0.0,
            None => continue,
        };
        let step = hbar
            * g.eval(&[space.actions_of(i)[axis - 1]])
                .map_err(|e| Error::at_state(space.point_of(i).as_slice(), e))?;
        scale = scale.max(step.abs()).max(beta.abs());
        defect = defect.max(((next - beta) - step).abs());
    }
    let boundary_zeros = boundary_failures.is_empty();
    let tolerance = tol * scale;
    let mut report = ConsistencyReport {
        axis,
        convention: coeffs.convention,
        boundary_zeros,
        boundary_failures,
        positivity,
        defect,
        residual: coeffs.residual,
        tolerance,
        pass: false,
    };
    report.pass = boundary_zeros
        && positivity
        && (coeffs.convention != Convention::Dirac || report.defect_ok());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::lattice::{enumerate_states, BoxAxis, LatticeConfig, LatticeRegion};

    fn consts(r: f64) -> impl Fn(&str) -> Option<f64> {
        move |n| (n == "r").then_some(r)
    }

    fn space(constraints: &[&str], lo: i64, hi: i64, r: f64) -> StateSpace {
        let region = LatticeRegion::parse(1, constraints, &consts(r)).unwrap();
        enumerate_states(
            region,
            vec![BoxAxis::new(lo, hi).unwrap()],
            LatticeConfig::new(1.0, 1).unwrap(),
        )
        .unwrap()
    }

    fn profile(src: &str) -> RadialProfile {
        RadialProfile::new(1, parse_expression(src).unwrap(), 1).unwrap()
    }

    #[test]
    fn bracket_profiles() {
        assert_eq!(bracket_profile(&profile("2*A1")), Expr::Num(2.0));
        assert_eq!(bracket_profile(&profile("r^2 - A1^2")).to_string(), "-2*A1");
        assert_eq!(bracket_profile(&profile("1")), Expr::Num(0.0));
    }

    #[test]
    fn profile_must_be_local() {
        let e = parse_expression("A1*A2").unwrap();
        match RadialProfile::new(1, e, 2) {
            Err(Error::ProfileNotLocal { axis: 1, symbol }) => assert_eq!(symbol, "A2"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oscillator_recursion() {
        let s = space(&["A1 >= 0"], 0, 6, 0.0);
        let c = solve_dirac_recursion(&profile("2*A1"), &s, &|_| None, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.beta, (0..=6).map(|m| 2.0 * m as f64).collect::<Vec<_>>());
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn spin_two_recursion() {
        let s = space(&["A1 >= -r", "A1 <= r"], -10, 10, 2.0);
        let c = solve_dirac_recursion(&profile("r^2 - A1^2"), &s, &consts(2.0), DEFAULT_TOLERANCE)
            .unwrap();
        assert_eq!(c.beta, vec![0.0, 4.0, 6.0, 6.0, 4.0]);
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn off_lattice_radius_is_inconsistent() {
        let s = space(&["A1 >= -r", "A1 <= r"], -10, 10, 2.3);
        let p = profile("r^2 - A1^2");
        let c = dirac_recursion_unchecked(&p, &s, &consts(2.3), DEFAULT_TOLERANCE).unwrap();
        assert!(c.residual > 0.1);
        assert!(matches!(
            solve_dirac_recursion(&p, &s, &consts(2.3), DEFAULT_TOLERANCE),
            Err(Error::InconsistentQuantization { axis: 1, .. })
        ));
    }

    #[test]
    fn recursion_starts_below_the_box() {
        let s = space(&["A1 >= 0"], 3, 5, 0.0);
        let c = solve_dirac_recursion(&profile("2*A1"), &s, &|_| None, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.beta, vec![6.0, 8.0, 10.0]);
    }

    #[test]
    fn unbounded_line_anchors_semiclassically() {
        let s = space(&[], -2, 2, 0.0);
        let c = solve_dirac_recursion(&profile("1"), &s, &|_| None, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(c.beta, vec![1.0; 5]);
    }

    #[test]
    fn negative_beta_is_reported() {
        let s = space(&["A1 >= 0"], 0, 5, 0.0);
        match solve_dirac_recursion(&profile("-2*A1"), &s, &|_| None, DEFAULT_TOLERANCE) {
            Err(Error::NotQuantizable { state, beta, .. }) => {
                assert_eq!(state, vec![1]);
                assert_eq!(beta, -2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semiclassical_rules() {
        let s = space(&["A1 >= -r", "A1 <= r"], -10, 10, 2.0);
        let p = profile("r^2 - A1^2");
        let src =
            semiclassical_coefficients(&p, &s, Convention::SemiclassicalSource, &consts(2.0)).unwrap();
        assert_eq!(src.beta, vec![0.0, 3.0, 4.0, 3.0, 0.0]);
        let mid =
            semiclassical_coefficients(&p, &s, Convention::SemiclassicalMidpoint, &consts(2.0))
                .unwrap();
        assert_eq!(mid.beta, vec![0.0, 1.75, 3.75, 3.75, 1.75]);
        let report = verify_consistency(&src, &s, &p, &consts(2.0), DEFAULT_TOLERANCE).unwrap();
        assert!(report.boundary_zeros && report.positivity && report.pass);
        assert!(report.defect > 0.0 && !report.defect_ok());
    }

    #[test]
    fn dirac_report_passes() {
        let s = space(&["A1 >= 0"], 0, 10, 0.0);
        let p = profile("2*A1");
        let c = solve_dirac_recursion(&p, &s, &|_| None, DEFAULT_TOLERANCE).unwrap();
        let r = verify_consistency(&c, &s, &p, &|_| None, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert_eq!(r.defect, 0.0);
    }

    #[test]
    fn zero_coefficients_with_flat_profile() {
        let s = space(&["A1 >= 0"], 0, 4, 0.0);
        let p = profile("0");
        let zero = LadderCoefficients {
            axis: 1,
            convention: Convention::Dirac,
            beta: vec![0.0; 5],
            b: vec![0.0; 5],
            residual: 0.0,
            scale: 1.0,
            clamped: vec![],
        };
        assert!(verify_consistency(&zero, &s, &p, &|_| None, DEFAULT_TOLERANCE).unwrap().pass);
    }
}
