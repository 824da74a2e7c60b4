use super::{constraints, LatticeData, ModelDefinition, ModelKind, PotentialData};
use crate::error::{Error, Result};
use crate::expr::{parse_expression, Expr, HBAR};
use crate::lattice::BoxAxis;
use crate::numerics::Domain;
use std::collections::BTreeMap;

pub const BUILTIN_NAMES: [&str; 4] = ["ho1d", "ho2d", "so3", "pendulum"];

fn e(src: &str) -> Expr {
    parse_expression(src).expect("builtin expression parses")
}

fn observables(pairs: &[(&str, &str)]) -> BTreeMap<String, Expr> {
    pairs.iter().map(|(k, v)| (k.to_string(), e(v))).collect()
}

fn interval(lo: i64, hi: i64) -> BoxAxis {
    BoxAxis::new(lo, hi).expect("builtin box is nonempty")
}

/// One-dimensional oscillator, `H = (p² + q²)/2 = A1`, `|chi|² = 2·A1`.
pub fn model_ho1d(hbar: f64) -> ModelDefinition {
    ModelDefinition {
        name: "ho1d".into(),
        dof: 1,
        constants: BTreeMap::new(),
        kind: ModelKind::Lattice(LatticeData {
            offsets: vec![0.0],
            constraints: constraints(&["A1 >= 0"]),
            profiles: BTreeMap::from([(1, e("2*A1"))]),
            hamiltonian: e("A1"),
            default_box: vec![interval(0, 10)],
        }),
        observables: observables(&[("H", "A1"), ("chi", "chi1")]),
        default_hbar: hbar,
        notes: vec!["rho is stored as 2*A1; r = sqrt(2H) itself is not smooth at the origin".into()],
    }
}

/// Rotation group orbit of radius `r = (n/2)·hbar`, action `J3`.
/// Odd `n` needs the experimental half-step lattice offset.
pub fn model_so3(n: u32, hbar: f64, experimental: bool) -> Result<ModelDefinition> {
    if n == 0 {
        return Err(Error::InvalidArgument("so3 needs n >= 1".into()));
    }
    let offset = if n % 2 == 1 {
        if !experimental {
            return Err(Error::HalfIntegerSpin);
        }
        0.5
    } else {
        0.0
    };
    let mut m = model_so3_radius(n as f64 / 2.0, hbar, offset);
    m.name = "so3".into();
    let span = n as i64;
    if let ModelKind::Lattice(l) = &mut m.kind {
        l.default_box = vec![interval(-span, span)];
    }
    Ok(m)
}

/// As [`model_so3`] with an arbitrary radius `j·hbar`, for probing which
/// radii quantize consistently.
pub fn model_so3_radius(j: f64, hbar: f64, offset: f64) -> ModelDefinition {
    let span = j.abs().ceil() as i64 + 1;
    ModelDefinition {
        name: "so3-radius".into(),
        dof: 1,
        constants: BTreeMap::from([(
            "r".to_string(),
            Expr::Mul(Box::new(Expr::Num(j)), Box::new(Expr::sym(HBAR))),
        )]),
        kind: ModelKind::Lattice(LatticeData {
            offsets: vec![offset],
            constraints: constraints(&["A1 >= -r", "A1 <= r"]),
            profiles: BTreeMap::from([(1, e("r^2 - A1^2"))]),
            hamiltonian: e("A1"),
            default_box: vec![interval(-span, span)],
        }),
        observables: observables(&[
            ("J3", "A1"),
            ("J1", "(chi1 + conj(chi1))/2"),
            ("J2", "(chi1 - conj(chi1))/(2*i)"),
        ]),
        default_hbar: hbar,
        notes: vec!["Q_chi lowers J3; with this bracket convention [J1, J2] = -i*hbar*J3".into()],
    }
}

/// Two independent oscillators in action-angle form.
pub fn model_ho2d(hbar: f64) -> ModelDefinition {
    ModelDefinition {
        name: "ho2d".into(),
        dof: 2,
        constants: BTreeMap::new(),
        kind: ModelKind::Lattice(LatticeData {
            offsets: vec![0.0, 0.0],
            constraints: constraints(&["A1 >= 0", "A2 >= 0"]),
            profiles: BTreeMap::from([(1, e("2*A1")), (2, e("2*A2"))]),
            hamiltonian: e("A1 + A2"),
            default_box: vec![interval(0, 6), interval(0, 6)],
        }),
        observables: observables(&[
            ("H", "A1 + A2"),
            ("L", "A1 - A2"),
            ("chi1", "chi1"),
            ("chi2", "chi2"),
        ]),
        default_hbar: hbar,
        notes: Vec::new(),
    }
}

/// `H = p²/2 + 1 − cos α`; only the oscillation region `H < 2` is handled.
pub fn model_pendulum(hbar: f64) -> ModelDefinition {
    ModelDefinition {
        name: "pendulum".into(),
        dof: 1,
        constants: BTreeMap::new(),
        kind: ModelKind::Potential(PotentialData {
            potential: e("1 - cos(alpha)"),
            domain: Domain::Circle,
        }),
        observables: BTreeMap::new(),
        default_hbar: hbar,
        notes: vec![
            "energies above the separatrix H = 2 form two disconnected tori per level and are not quantized".into(),
        ],
    }
}

/// Builtin by name; `n` is required for `so3`.
pub fn builtin(name: &str, hbar: f64, n: Option<u32>, experimental: bool) -> Result<ModelDefinition> {
    match name {
        "ho1d" => Ok(model_ho1d(hbar)),
        "ho2d" => Ok(model_ho2d(hbar)),
        "pendulum" => Ok(model_pendulum(hbar)),
        "so3" => {
            let n = n.ok_or_else(|| Error::InvalidArgument("so3 needs --n".into()))?;
            model_so3(n, hbar, experimental)
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for m in [
            model_ho1d(1.0),
            model_ho2d(0.5),
            model_so3(4, 1.0, false).unwrap(),
            model_so3(3, 1.0, true).unwrap(),
            model_so3_radius(2.3, 1.0, 0.0),
            model_pendulum(0.1),
        ] {
            m.validate().unwrap_or_else(|e| panic!("{}: {e}", m.name));
        }
    }

    #[test]
    fn odd_spin_needs_offsets() {
        assert!(matches!(model_so3(3, 1.0, false), Err(Error::HalfIntegerSpin)));
        assert!(matches!(builtin("nope", 1.0, None, false), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn so3_radius_constant() {
        let m = model_so3(4, 0.5, false).unwrap();
        assert_eq!(m.resolve_constants(0.5).unwrap()["r"], 1.0);
    }
}
