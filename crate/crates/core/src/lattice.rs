//! Lattice points, admissibility of Bohr-Sommerfeld tori and the enumerated
//! basis of the quantum Hilbert space.

use crate::error::{Error, Result};
use crate::expr::{affine_form, parse_constraint, AffineForm, Comparison, ConstraintExpr};
use std::collections::HashMap;
use std::fmt;

/// Integer quantum numbers `m = (m_1, …, m_n)` labelling a torus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumNumbers(pub Vec<i64>);

impl QuantumNumbers {
    pub fn dof(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for QuantumNumbers {
    fn from(v: Vec<i64>) -> Self {
        QuantumNumbers(v)
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Lower,
    Raise,
}

impl Direction {
    pub fn step(self) -> i64 {
        match self {
            Direction::Lower => -1,
            Direction::Raise => 1,
        }
    }
}

/// `m` with `m_axis` moved one step; `axis` is 1-based.
pub fn shift_target(m: &QuantumNumbers, axis: usize, direction: Direction) -> QuantumNumbers {
    assert!(
        (1..=m.dof()).contains(&axis),
        "axis {axis} out of range 1..={}",
        m.dof()
    );
    let mut out = m.clone();
    out.0[axis - 1] += direction.step();
    out
}

/// Planck constant and per-axis lattice offsets; the action of state `m`
/// along axis k is `(m_k + offset_k)·hbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    hbar: f64,
    offsets: Vec<f64>,
}

impl LatticeConfig {
    pub fn new(hbar: f64, dof: usize) -> Result<Self> {
        Self::with_offsets(hbar, vec![0.0; dof])
    }

    /// Nonzero offsets are an experimental mode; the caller opts in by
    /// passing them explicitly.
    pub fn with_offsets(hbar: f64, offsets: Vec<f64>) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "hbar must be positive and finite, got {hbar}"
            )));
        }
        if offsets.is_empty() {
            return Err(Error::InvalidArgument("at least one axis is required".into()));
        }
        if let Some(bad) = offsets.iter().find(|d| !(0.0..1.0).contains(*d)) {
            return Err(Error::InvalidArgument(format!(
                "lattice offset {bad} outside [0, 1)"
            )));
        }
        Ok(LatticeConfig { hbar, offsets })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn dof(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_experimental(&self) -> bool {
        self.offsets.iter().any(|d| *d != 0.0)
    }

    /// Action along a 0-based axis for quantum number `m_k`.
    pub fn action_along(&self, axis0: usize, m_k: i64) -> f64 {
        (m_k as f64 + self.offsets[axis0]) * self.hbar
    }

    pub fn actions(&self, m: &[i64]) -> Vec<f64> {
        m.iter()
            .enumerate()
            .map(|(k, mk)| self.action_along(k, *mk))
            .collect()
    }
}

/// One validated constraint `form ≥ 0` (or `= 0`) in the actions.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConstraint {
    pub form: AffineForm,
    pub equality: bool,
    pub source: String,
}

impl AffineConstraint {
    fn slack(&self, hbar: f64) -> f64 {
        let scale = 1.0 + self.form.coeffs.iter().map(|c| c.abs()).sum::<f64>();
        1e-9 * hbar * scale
    }

    fn holds(&self, actions: &[f64], hbar: f64) -> bool {
        let v = self.form.eval(actions);
        let eps = self.slack(hbar);
        if self.equality {
            v.abs() <= eps
        } else {
            v >= -eps
        }
    }
}

/// A convex region of action space: a conjunction of affine constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRegion {
    dof: usize,
    constraints: Vec<AffineConstraint>,
}

/// Range of `m_k` along one lattice line inside a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRange {
    Empty,
    /// Inclusive bounds; `None` means unbounded on that side.
    Span(Option<i64>, Option<i64>),
}

impl LatticeRegion {
    /// Validate constraints, resolving named constants through `lookup`.
    pub fn new(
        dof: usize,
        constraints: &[ConstraintExpr],
        lookup: &dyn Fn(&str) -> Option<f64>,
    ) -> Result<Self> {
        if dof == 0 {
            return Err(Error::InvalidArgument("dof must be positive".into()));
        }
        let mut out = Vec::with_capacity(constraints.len());
        for c in constraints {
            let form = affine_form(&c.normalized(), dof, lookup).map_err(|reason| {
                Error::NonAffine {
                    constraint: c.source.clone(),
                    reason,
                }
            })?;
            out.push(AffineConstraint {
                form,
                equality: c.cmp == Comparison::Eq,
                source: c.source.clone(),
            });
        }
        Ok(LatticeRegion {
            dof,
            constraints: out,
        })
    }

    pub fn parse(dof: usize, constraints: &[&str], lookup: &dyn Fn(&str) -> Option<f64>) -> Result<Self> {
        let parsed = constraints
            .iter()
            .map(|s| parse_constraint(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dof, &parsed, lookup)
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn constraints(&self) -> &[AffineConstraint] {
        &self.constraints
    }

    pub fn contains_actions(&self, actions: &[f64], hbar: f64) -> bool {
        self.constraints.iter().all(|c| c.holds(actions, hbar))
    }

    pub fn contains(&self, config: &LatticeConfig, m: &[i64]) -> bool {
        self.contains_actions(&config.actions(m), config.hbar())
    }

    /// Integer range of `m_axis` (0-based axis) with the other components of
    /// `m` held fixed.
    pub fn line_range(&self, config: &LatticeConfig, m: &[i64], axis0: usize) -> LineRange {
        let hbar = config.hbar();
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        let mut probe = m.to_vec();
        probe[axis0] = 0;
        let base = config.actions(&probe);
        const LIMIT: f64 = 9.0e15;
        for c in &self.constraints {
            let ck = c.form.coeffs[axis0] * hbar;
            let rest = c.form.eval(&base);
            let eps = c.slack(hbar);
            if ck == 0.0 {
                if !c.holds(&base, hbar) {
                    return LineRange::Empty;
                }
                continue;
            }
            // rest + ck·m ≥ −eps, and for equalities also ≤ eps
            let ge_cut = (-eps - rest) / ck;
            let le_cut = (eps - rest) / ck;
            let (new_lo, new_hi) = if ck > 0.0 {
                (Some(ge_cut.ceil()), c.equality.then(|| le_cut.floor()))
            } else {
                (c.equality.then(|| le_cut.ceil()), Some(ge_cut.floor()))
            };
            if let Some(v) = new_lo {
                let v = v.clamp(-LIMIT, LIMIT) as i64;
                lo = Some(lo.map_or(v, |cur| cur.max(v)));
            }
            if let Some(v) = new_hi {
                let v = v.clamp(-LIMIT, LIMIT) as i64;
                hi = Some(hi.map_or(v, |cur| cur.min(v)));
            }
        }
        // Snap the analytic bounds onto the exact membership predicate.
        let mut inside = |k: i64| {
            probe[axis0] = k;
            self.contains(config, &probe)
        };
        if let Some(l) = lo.as_mut() {
            for _ in 0..4 {
                if !inside(*l) && inside(*l + 1) {
                    *l += 1;
                } else if inside(*l - 1) {
                    *l -= 1;
                } else {
                    break;
                }
            }
        }
        if let Some(h) = hi.as_mut() {
            for _ in 0..4 {
                if !inside(*h) && inside(*h - 1) {
                    *h -= 1;
                } else if inside(*h + 1) {
                    *h += 1;
                } else {
                    break;
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l > h => LineRange::Empty,
            (Some(l), _) if !inside(l) => LineRange::Empty,
            (_, Some(h)) if !inside(h) => LineRange::Empty,
            _ => LineRange::Span(lo, hi),
        }
    }
}

/// True iff the Bohr-Sommerfeld torus at `m` is nonempty.
pub fn torus_nonempty(region: &LatticeRegion, config: &LatticeConfig, m: &QuantumNumbers) -> bool {
    assert_eq!(region.dof(), m.dof(), "dimension mismatch");
    region.contains(config, m.as_slice())
}

/// Inclusive integer interval of one truncation-box axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxAxis {
    pub lo: i64,
    pub hi: i64,
}

impl BoxAxis {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty box interval {lo}:{hi}")));
        }
        Ok(BoxAxis { lo, hi })
    }

    pub fn contains(&self, m: i64) -> bool {
        (self.lo..=self.hi).contains(&m)
    }

    fn len(&self) -> u128 {
        (self.hi - self.lo) as u128 + 1
    }
}

const MAX_BOX_POINTS: u128 = 20_000_000;

/// The admissible lattice points inside a truncation box, in lexicographic
/// order, with the inverse index.
#[derive(Debug, Clone)]
pub struct StateSpace {
    config: LatticeConfig,
    region: LatticeRegion,
    bounds: Vec<BoxAxis>,
    states: Vec<QuantumNumbers>,
    index: HashMap<QuantumNumbers, usize>,
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.region == other.region
            && self.bounds == other.bounds
            && self.states == other.states
    }
}

/// Enumerate every admissible lattice point in the box.
pub fn enumerate_states(
    region: LatticeRegion,
    bounds: Vec<BoxAxis>,
    config: LatticeConfig,
) -> Result<StateSpace> {
    let dof = region.dof();
    if bounds.len() != dof || config.dof() != dof {
        return Err(Error::DimensionMismatch {
            expected: dof,
            found: if bounds.len() != dof { bounds.len() } else { config.dof() },
        });
    }
    let total = bounds.iter().map(BoxAxis::len).product::<u128>();
    if total > MAX_BOX_POINTS {
        return Err(Error::InvalidArgument(format!(
            "truncation box has {total} points, limit is {MAX_BOX_POINTS}"
        )));
    }
    let mut states = Vec::new();
    let mut m: Vec<i64> = bounds.iter().map(|b| b.lo).collect();
    // odometer, last axis fastest: yields lexicographic order
    'outer: loop {
        if region.contains(&config, &m) {
            states.push(QuantumNumbers(m.clone()));
        }
        let mut k = dof;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if m[k] < bounds[k].hi {
                m[k] += 1;
                for (j, b) in bounds.iter().enumerate().skip(k + 1) {
                    m[j] = b.lo;
                }
                break;
            }
        }
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(StateSpace {
        config,
        region,
        bounds,
        states,
        index,
    })
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn dof(&self) -> usize {
        self.region.dof()
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    pub fn hbar(&self) -> f64 {
        self.config.hbar()
    }

    pub fn region(&self) -> &LatticeRegion {
        &self.region
    }

    pub fn bounds(&self) -> &[BoxAxis] {
        &self.bounds
    }

    pub fn states(&self) -> &[QuantumNumbers] {
        &self.states
    }

    pub fn state_index(&self, m: &QuantumNumbers) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn point_of(&self, index: usize) -> &QuantumNumbers {
        &self.states[index]
    }

    pub fn actions_of(&self, index: usize) -> Vec<f64> {
        self.config.actions(self.states[index].as_slice())
    }

    /// Index of `states[index] + offset`, if that is a state.
    pub fn shifted(&self, index: usize, offset: &[i64]) -> Option<usize> {
        let m: Vec<i64> = self.states[index]
            .0
            .iter()
            .zip(offset)
            .map(|(a, d)| a + d)
            .collect();
        self.index.get(&QuantumNumbers(m)).copied()
    }

    /// Neighbour one step along a 1-based axis.
    pub fn neighbor(&self, index: usize, axis: usize, direction: Direction) -> Option<usize> {
        let target = shift_target(&self.states[index], axis, direction);
        self.index.get(&target).copied()
    }

    /// Whether the torus one step along `axis` from state `index` is nonempty.
    pub fn neighbor_torus_nonempty(&self, index: usize, axis: usize, direction: Direction) -> bool {
        let target = shift_target(&self.states[index], axis, direction);
        self.region.contains(&self.config, target.as_slice())
    }

    /// A state is on the truncation edge along `axis` when a neighbour torus
    /// exists in the region but was cut off by the box.
    pub fn is_edge_along(&self, index: usize, axis: usize) -> bool {
        [Direction::Lower, Direction::Raise].into_iter().any(|d| {
            self.neighbor(index, axis, d).is_none() && self.neighbor_torus_nonempty(index, axis, d)
        })
    }

    pub fn is_edge(&self, index: usize) -> bool {
        (1..=self.dof()).any(|k| self.is_edge_along(index, k))
    }

    /// Mask of states whose every axis neighbour is either represented or
    /// absent from the region.
    pub fn interior_mask(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| !self.is_edge(i)).collect()
    }

    /// Region range of `m_axis` (1-based) through state `index`.
    pub fn line_range(&self, index: usize, axis: usize) -> LineRange {
        self.region
            .line_range(&self.config, self.states[index].as_slice(), axis - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_consts(_: &str) -> Option<f64> {
        None
    }

    fn region(dof: usize, cs: &[&str]) -> LatticeRegion {
        LatticeRegion::parse(dof, cs, &no_consts).unwrap()
    }

    fn ints(space: &StateSpace) -> Vec<Vec<i64>> {
        space.states().iter().map(|s| s.0.clone()).collect()
    }

    #[test]
    fn half_line() {
        let s = enumerate_states(
            region(1, &["A1 >= 0"]),
            vec![BoxAxis::new(-3, 5).unwrap()],
            LatticeConfig::new(1.0, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(s.dim(), 6);
        assert_eq!(ints(&s), (0..=5).map(|m| vec![m]).collect::<Vec<_>>());
    }

    #[test]
    fn sphere_interval_has_2j_plus_1_points() {
        let s = enumerate_states(
            region(1, &["A1 >= -2", "A1 <= 2"]),
            vec![BoxAxis::new(-10, 10).unwrap()],
            LatticeConfig::new(1.0, 1).unwrap(),
        )
        .unwrap();
        let j = 2;
        assert_eq!(s.dim(), 2 * j + 1);
        assert_eq!(ints(&s), (-2..=2).map(|m| vec![m]).collect::<Vec<_>>());
        assert_eq!(s.state_index(&QuantumNumbers(vec![-2])), Some(0));
        assert_eq!(s.state_index(&QuantumNumbers(vec![3])), None);
    }

    #[test]
    fn quadrant_box() {
        let s = enumerate_states(
            region(2, &["A1 >= 0", "A2 >= 0"]),
            vec![BoxAxis::new(0, 3).unwrap(); 2],
            LatticeConfig::new(1.0, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(s.dim(), 16);
        assert_eq!(s.states()[0].0, vec![0, 0]);
        assert_eq!(s.states()[15].0, vec![3, 3]);
    }

    #[test]
    fn empty_intersection_is_legal() {
        let s = enumerate_states(
            region(1, &["A1 >= 100"]),
            vec![BoxAxis::new(0, 5).unwrap()],
            LatticeConfig::new(1.0, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn torus_membership() {
        let cfg = LatticeConfig::new(1.0, 1).unwrap();
        let half = region(1, &["A1 >= 0"]);
        assert!(torus_nonempty(&half, &cfg, &QuantumNumbers(vec![0])));
        assert!(!torus_nonempty(&half, &cfg, &QuantumNumbers(vec![-1])));
        let sphere = region(1, &["A1 >= -2", "A1 <= 2"]);
        assert!(!torus_nonempty(&sphere, &cfg, &QuantumNumbers(vec![3])));
    }

    #[test]
    fn shift_targets() {
        let m = QuantumNumbers(vec![2, 5]);
        assert_eq!(shift_target(&m, 1, Direction::Lower).0, vec![1, 5]);
        assert_eq!(
            shift_target(&QuantumNumbers(vec![0]), 1, Direction::Raise).0,
            vec![1]
        );
    }

    #[test]
    fn non_affine_constraint_is_named() {
        let err = LatticeRegion::parse(2, &["A1 >= 0", "A1*A2 <= 4"], &no_consts).unwrap_err();
        match err {
            Error::NonAffine { constraint, .. } => assert_eq!(constraint, "A1*A2 <= 4"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn line_ranges() {
        let cfg = LatticeConfig::new(1.0, 2).unwrap();
        let tri = region(2, &["A1 >= 0", "A2 >= 0", "A1 + A2 <= 5"]);
        assert_eq!(tri.line_range(&cfg, &[0, 2], 0), LineRange::Span(Some(0), Some(3)));
        assert_eq!(tri.line_range(&cfg, &[4, 0], 1), LineRange::Span(Some(0), Some(1)));
        assert_eq!(tri.line_range(&cfg, &[0, 9], 0), LineRange::Empty);
        let half = region(2, &["A1 >= 0"]);
        assert_eq!(half.line_range(&cfg, &[3, 3], 1), LineRange::Span(None, None));
        assert_eq!(half.line_range(&cfg, &[3, 3], 0), LineRange::Span(Some(0), None));

        let cfg = LatticeConfig::new(0.1, 1).unwrap();
        let sphere = region(1, &["A1 >= -0.23", "A1 <= 0.23"]);
        assert_eq!(sphere.line_range(&cfg, &[0], 0), LineRange::Span(Some(-2), Some(2)));
        let eq = region(1, &["A1 = 0.3"]);
        assert_eq!(eq.line_range(&cfg, &[0], 0), LineRange::Span(Some(3), Some(3)));
    }

    #[test]
    fn truncation_edges() {
        let s = enumerate_states(
            region(1, &["A1 >= 0"]),
            vec![BoxAxis::new(0, 4).unwrap()],
            LatticeConfig::new(1.0, 1).unwrap(),
        )
        .unwrap();
        let mask = s.interior_mask();
        assert_eq!(mask, vec![true, true, true, true, false]);
    }
}
