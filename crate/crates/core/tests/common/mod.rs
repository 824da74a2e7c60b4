#![allow(dead_code)]

use rand::Rng;
use std::f64::consts::PI;

/// Expressions covering every production of the grammar.
pub const CORPUS: [&str; 50] = [
    "0",
    "1.5",
    "2.5e-3",
    "1e10",
    "A1",
    "chi2",
    "alpha",
    "hbar",
    "r",
    "2*A1",
    "A1 + A2",
    "A1 - A2 - A3",
    "A1 - (A2 - A3)",
    "A1 / A2 / 3",
    "A1 / (A2 / 3)",
    "A1*A2 + A3",
    "A1*(A2 + A3)",
    "A1^2",
    "A1^-2",
    "(A1 + 1)^3",
    "-A1",
    "-A1^2",
    "-(A1^2)",
    "--A1",
    "2*-A1",
    "r^2 - A1^2",
    "sqrt(2*A1)",
    "sin(alpha)",
    "cos(alpha)^2",
    "exp(-alpha^2/2)",
    "conj(chi1)",
    "(chi1 + conj(chi1))/2",
    "(chi1 - conj(chi1))/(2*i)",
    "1 - cos(alpha)",
    "A1*chi1 + A2*conj(chi2)",
    "sqrt(r^2 - A1^2)*chi1",
    "pi*hbar",
    "sin(cos(exp(A1)))",
    "(((A1)))",
    "A1 + 2*A2 - 3*A3 + 4",
    "hbar^2*(A1 + 1/2)",
    "x1 * y_2",
    "1/(1 + A1^2)",
    "A1^0",
    "0.5*alpha^2",
    "2^3 + A1^1",
    "exp(A1)*sin(A2) - cos(A3)/sqrt(A4)",
    "-(1 - A1)*(-2)",
    "3 - -2",
    "chi10 + A12",
];

/// Random smooth expression in `x`, rendered as source text.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "x".into(),
            1 => format!("{:.3}", rng.gen_range(-3.0..3.0)),
            _ => format!("({:.2}*x)", rng.gen_range(-2.0..2.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..9) {
        0 => format!("({a} + {})", random_expr(rng, depth - 1)),
        1 => format!("({a} - {})", random_expr(rng, depth - 1)),
        2 => format!("({a} * {})", random_expr(rng, depth - 1)),
        3 => format!("({a} / (2 + sin({})^2))", random_expr(rng, depth - 1)),
        4 => format!("({a})^{}", rng.gen_range(0..4)),
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp(sin({a}))"),
        _ => format!("sqrt(1 + ({a})^2)"),
    }
}

/// Complete elliptic integrals of parameter `m = k²` by the trapezoidal
/// rule over a full period, which converges geometrically for smooth
/// periodic integrands.
pub fn oracle_k_e(m: f64) -> (f64, f64) {
    let n = 4000;
    let h = PI / n as f64;
    let (mut k, mut e) = (0.0, 0.0);
    for i in 0..n {
        let s = (i as f64 * h).sin();
        let w = (1.0 - m * s * s).sqrt();
        k += 1.0 / w;
        e += w;
    }
    (k * h / 2.0, e * h / 2.0)
}

/// Oscillation action of `p²/2 + 1 − cos α` below the separatrix.
pub fn oracle_pendulum_action(energy: f64) -> f64 {
    let m = energy / 2.0;
    let (k, e) = oracle_k_e(m);
    8.0 / PI * (e - (1.0 - m) * k)
}

/// `A(E) = target` by bisection on the oracle action.
pub fn oracle_pendulum_level(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 2.0 - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if oracle_pendulum_action(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Run the command-line binary.
pub fn bshq(args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_bshq"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

pub const GOLDEN: [(&str, &[&str]); 3] = [
    (
        "ho1d_spectrum.json",
        &["spectrum", "--model", "ho1d", "--observable", "H", "--hbar", "1", "--box", "0:5"],
    ),
    ("so3_n4_verify.json", &["verify", "--model", "so3", "--n", "4"]),
    ("pendulum_levels_0.1.json", &["levels", "--model", "pendulum", "--hbar", "0.1"]),
];

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}
