use super::quadrature::{tanh_sinh, QuadratureSpec};
use super::roots::{brent, golden_min};
use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr, ALPHA};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Circle,
    Line,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Circle => "circle",
            Domain::Line => "line",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(Domain::Circle),
            "line" => Ok(Domain::Line),
            other => Err(Error::InvalidArgument(format!("unknown domain `{other}`"))),
        }
    }
}

// Where the well stops confining on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Barrier {
    At { alpha: f64, height: f64 },
    Unbounded,
}

/// `H = p²/2 + V(α)` restricted to the oscillation region around the
/// deepest well.
#[derive(Debug, Clone)]
pub struct OneDofSystem {
    potential: Compiled,
    domain: Domain,
    well: f64,
    e_min: f64,
    left: Barrier,
    right: Barrier,
}

const LINE_SEARCH: f64 = 10.0;
const LINE_REACH: f64 = 1e6;
const GRID: usize = 2000;

impl OneDofSystem {
    pub fn new(potential: &Expr, domain: Domain, constants: &dyn Fn(&str) -> Option<f64>) -> Result<Self> {
        let compiled = Compiled::new(potential, &[ALPHA], constants)?;
        let v = |x: f64| compiled.eval(&[x]);
        let (lo, hi) = match domain {
            Domain::Circle => (-PI, PI),
            Domain::Line => (-LINE_SEARCH, LINE_SEARCH),
        };
        let step = (hi - lo) / GRID as f64;
        let mut best = (lo, v(lo)?);
        for i in 1..GRID {
            let x = lo + (hi - lo) * i as f64 / GRID as f64;
            let fx = v(x)?;
            if fx < best.1 {
                best = (x, fx);
            }
        }
        let (x, fx) = golden_min(v, best.0 - step, best.0 + step, 1e-12)?;
        let (well, e_min) = if fx < best.1 { (x, fx) } else { best };

        let reach = match domain {
            Domain::Circle => TAU,
            Domain::Line => LINE_REACH,
        };
        let left = find_barrier(&compiled, well, -1.0, reach, domain)?;
        let right = find_barrier(&compiled, well, 1.0, reach, domain)?;
        let sys = OneDofSystem {
            potential: compiled,
            domain,
            well,
            e_min,
            left,
            right,
        };
        // a periodic potential without a descent over a full turn is flat
        let flat = domain == Domain::Circle && (left == Barrier::Unbounded || right == Barrier::Unbounded);
        if flat || sys.e_max() <= sys.e_min {
            return Err(Error::Evaluation(format!(
                "potential `{}` has no confining well",
                potential
            )));
        }
        Ok(sys)
    }

    pub fn potential(&self, alpha: f64) -> Result<f64> {
        self.potential.eval(&[alpha])
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Position of the well minimum.
    pub fn well(&self) -> f64 {
        self.well
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    /// Lowest barrier height; infinite for a confining potential.
    pub fn e_max(&self) -> f64 {
        let h = |b: Barrier| match b {
            Barrier::At { height, .. } => height,
            Barrier::Unbounded => f64::INFINITY,
        };
        h(self.left).min(h(self.right))
    }

    fn check_energy(&self, e: f64) -> Result<()> {
        if !(e > self.e_min && e < self.e_max()) {
            return Err(Error::EnergyOutOfRange {
                energy: e,
                min: self.e_min,
                max: self.e_max(),
            });
        }
        Ok(())
    }
}

// Walk away from the well until V turns down, then refine the maximum.
fn find_barrier(v: &Compiled, well: f64, dir: f64, reach: f64, domain: Domain) -> Result<Barrier> {
    let f = |x: f64| v.eval(&[x]);
    let (mut step, growth) = match domain {
        Domain::Circle => (TAU / GRID as f64, 1.0),
        Domain::Line => (1e-3 * well.abs().max(1.0), 1.05),
    };
    let mut prev = (well, f(well)?);
    let mut cur = (well + dir * step, f(well + dir * step)?);
    loop {
        step *= growth;
        let x = cur.0 + dir * step;
        if (x - well).abs() > reach {
            return Ok(Barrier::Unbounded);
        }
        let fx = f(x)?;
        if fx < cur.1 {
            let (xm, neg) = golden_min(|y| f(y).map(|z| -z), prev.0, x, 1e-12)?;
            let (alpha, height) = if -neg >= cur.1 { (xm, -neg) } else { cur };
            return Ok(Barrier::At { alpha, height });
        }
        prev = cur;
        cur = (x, fx);
    }
}

/// The two roots of `V(α) = E` around the well, `α− < α+`.
pub fn turning_points(sys: &OneDofSystem, energy: f64, tol: f64) -> Result<(f64, f64)> {
    sys.check_energy(energy)?;
    Ok((
        side_root(sys, sys.left, -1.0, energy, tol)?,
        side_root(sys, sys.right, 1.0, energy, tol)?,
    ))
}

fn side_root(sys: &OneDofSystem, barrier: Barrier, dir: f64, energy: f64, tol: f64) -> Result<f64> {
    let g = |x: f64| Ok(sys.potential(x)? - energy);
    let g0 = g(sys.well)?;
    let (far, gf) = match barrier {
        Barrier::At { alpha, height } => (alpha, height - energy),
        Barrier::Unbounded => {
            let mut d = 1.0;
            loop {
                let x = sys.well + dir * d;
                let gx = g(x)?;
                if gx > 0.0 {
                    break (x, gx);
                }
                d *= 2.0;
                if d > LINE_REACH {
                    return Err(Error::Bracket {
                        a: sys.well,
                        b: x,
                        fa: g0,
                        fb: gx,
                    });
                }
            }
        }
    };
    brent(g, sys.well, far, g0, gf, tol)
}

/// `A(E) = (1/π)∫_{α−}^{α+} sqrt(2(E − V(α))) dα`.
pub fn action_integral(sys: &OneDofSystem, energy: f64, quad: &QuadratureSpec) -> Result<f64> {
    if energy == sys.e_min {
        return Ok(0.0);
    }
    let (a, b) = turning_points(sys, energy, 0.0)?;
    integrate_between(sys, energy, a, b, quad)
}

fn integrate_between(sys: &OneDofSystem, energy: f64, a: f64, b: f64, quad: &QuadratureSpec) -> Result<f64> {
    let p = |x: f64| Ok((2.0 * (energy - sys.potential(x)?)).max(0.0).sqrt());
    Ok(tanh_sinh(p, a, b, quad)?.value / PI)
}

// Action of the orbit at the top of the oscillation range, when bounded.
fn separatrix_action(sys: &OneDofSystem, quad: &QuadratureSpec) -> Result<Option<f64>> {
    let e = sys.e_max();
    if !e.is_finite() {
        return Ok(None);
    }
    // the lower barrier bounds the orbit; the other side is a plain root
    let end = |barrier: Barrier, dir: f64| match barrier {
        Barrier::At { alpha, height } if height <= e => Ok(alpha),
        _ => side_root(sys, barrier, dir, e, 0.0),
    };
    let lo = end(sys.left, -1.0)?;
    let hi = end(sys.right, 1.0)?;
    Ok(Some(integrate_between(sys, e, lo, hi, quad)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub m: u64,
    pub energy: f64,
    /// `|A(E_m) − m·hbar|`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Excluded {
    pub m: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    pub levels: Vec<Level>,
    pub excluded: Vec<Excluded>,
    /// Action at the top of the oscillation range, when bounded.
    pub max_action: Option<f64>,
}

pub const DEFAULT_UNBOUNDED_M_MAX: u64 = 10;
const MONOTONE_GRID: usize = 100;

/// Solve `A(E_m) = m·hbar` for `m = 0, 1, …`. Without `m_max` every level
/// below the top of the oscillation range is returned, followed by the
/// first excluded `m`.
pub fn bs_energy_levels(
    sys: &OneDofSystem,
    hbar: f64,
    m_max: Option<u64>,
    tol: f64,
    quad: &QuadratureSpec,
) -> Result<LevelTable> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    let a_max = separatrix_action(sys, quad)?;
    let e_lo = sys.e_min;
    let (e_hi, a_hi) = match a_max {
        Some(a) => (sys.e_max(), a),
        None => {
            // confining: widen until the requested top level is inside
            let want = m_max.unwrap_or(DEFAULT_UNBOUNDED_M_MAX) as f64 * hbar;
            let mut width = 1.0;
            loop {
                let e = e_lo + width;
                let a = action_integral(sys, e, quad)?;
                if a > want {
                    break (e, a);
                }
                width *= 2.0;
                if !e.is_finite() || width > 1e300 {
                    return Err(Error::Evaluation("action stays bounded on a confining well".into()));
                }
            }
        }
    };

    let mut grid = Vec::with_capacity(MONOTONE_GRID + 1);
    grid.push((e_lo, 0.0));
    for i in 1..MONOTONE_GRID {
        let e = e_lo + (e_hi - e_lo) * i as f64 / MONOTONE_GRID as f64;
        grid.push((e, action_integral(sys, e, quad)?));
    }
    grid.push((e_hi, a_hi));
    for w in grid.windows(2) {
        if w[1].1 <= w[0].1 {
            return Err(Error::NotMonotone { e0: w[0].0, e1: w[1].0 });
        }
    }

    let near = tol.max(quad.tolerance * a_hi.max(1.0));
    let m_cap = match (m_max, a_max) {
        (Some(m), _) => m,
        (None, Some(a)) => (a / hbar).floor() as u64 + 1,
        (None, None) => DEFAULT_UNBOUNDED_M_MAX,
    };
    let mut table = LevelTable {
        levels: Vec::new(),
        excluded: Vec::new(),
        max_action: a_max,
    };
    for m in 0..=m_cap {
        let target = m as f64 * hbar;
        if m == 0 {
            table.levels.push(Level { m, energy: e_lo, residual: 0.0 });
            continue;
        }
        if let Some(a) = a_max {
            if target >= a {
                table.excluded.push(Excluded {
                    m,
                    reason: "beyond separatrix".into(),
                });
                if m_max.is_none() {
                    break;
                }
                continue;
            }
            if a - target <= near {
                table.excluded.push(Excluded {
                    m,
                    reason: "near-separatrix, low confidence".into(),
                });
                continue;
            }
        }
        let cell = grid
            .windows(2)
            .find(|w| w[0].1 <= target && target < w[1].1)
            .ok_or(Error::Bracket {
                a: e_lo,
                b: e_hi,
                fa: -target,
                fb: a_hi - target,
            })?;
        let (e0, a0) = cell[0];
        let (e1, a1) = cell[1];
        let energy = brent(
            |e| Ok(action_integral(sys, e, quad)? - target),
            e0,
            e1,
            a0 - target,
            a1 - target,
            0.0,
        )?;
        let residual = (action_integral(sys, energy, quad)? - target).abs();
        if residual > tol {
            return Err(Error::RootNoConvergence(0));
        }
        table.levels.push(Level { m, energy, residual });
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;
    use crate::numerics::elliptic::{pendulum_action_closed_form, PENDULUM_SEPARATRIX_ACTION};
    use std::f64::consts::FRAC_PI_2;

    fn pendulum() -> OneDofSystem {
        OneDofSystem::new(&parse_expression("1 - cos(alpha)").unwrap(), Domain::Circle, &|_| None).unwrap()
    }

    fn harmonic() -> OneDofSystem {
        OneDofSystem::new(&parse_expression("alpha^2/2").unwrap(), Domain::Line, &|_| None).unwrap()
    }

    #[test]
    fn pendulum_geometry() {
        let p = pendulum();
        assert_eq!(p.well(), 0.0);
        assert_eq!(p.e_min(), 0.0);
        assert!((p.e_max() - 2.0).abs() < 1e-14);
        let (a, b) = turning_points(&p, 1.0, 0.0).unwrap();
        assert!((a + FRAC_PI_2).abs() < 1e-14 && (b - FRAC_PI_2).abs() < 1e-14);
        let (a, b) = turning_points(&p, 0.5, 0.0).unwrap();
        assert!((a + PI / 3.0).abs() < 1e-14 && (b - PI / 3.0).abs() < 1e-14);
        let (a, b) = turning_points(&p, 1.999, 0.0).unwrap();
        assert!((a + PI).abs() < 0.1 && (b - PI).abs() < 0.1);
        assert!(turning_points(&p, 2.5, 0.0).is_err());
    }

    #[test]
    fn harmonic_action_is_energy() {
        let h = harmonic();
        assert_eq!(h.e_max(), f64::INFINITY);
        for e in [0.01, 0.5, 3.0] {
            let a = action_integral(&h, e, &QuadratureSpec::default()).unwrap();
            assert!((a - e).abs() < 1e-12, "{e}: {a}");
        }
    }

    #[test]
    fn pendulum_matches_closed_form() {
        let p = pendulum();
        for e in [0.2, 0.5, 1.0, 1.5, 1.9] {
            let q = action_integral(&p, e, &QuadratureSpec::default()).unwrap();
            let c = pendulum_action_closed_form(e).unwrap();
            assert!((q - c).abs() < 1e-12, "{e}: {q} vs {c}");
        }
    }

    #[test]
    fn pendulum_separatrix() {
        let a = separatrix_action(&pendulum(), &QuadratureSpec::default()).unwrap().unwrap();
        assert!((a - PENDULUM_SEPARATRIX_ACTION).abs() < 1e-12);
    }

    #[test]
    fn harmonic_levels() {
        let t = bs_energy_levels(&harmonic(), 0.1, Some(10), 1e-9, &QuadratureSpec::default()).unwrap();
        assert_eq!(t.levels.len(), 11);
        for l in &t.levels {
            assert!((l.energy - 0.1 * l.m as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn pendulum_level_count() {
        let t = bs_energy_levels(&pendulum(), 2.0, None, 1e-9, &QuadratureSpec::default()).unwrap();
        assert_eq!(t.levels.iter().map(|l| l.m).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(t.excluded[0].m, 2);
    }
}
