//! Command-line front end shared by the `bshq` binary and the tests.

use crate::error::{Category, Error, Result};
use crate::json::{format_csv_number, Json};
use crate::ladder::{Convention, DEFAULT_TOLERANCE};
use crate::lattice::BoxAxis;
use crate::model::{builtin, parse_model_file, potential_system, LatticeSystem, ModelDefinition, BUILTIN_NAMES};
use crate::numerics::{bs_energy_levels, LevelTable, QuadratureSpec};
use crate::operator::{eigenvalues_hermitian, LatticeOperator};
use crate::verify::{run_suite, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

const EIGEN_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "bshq", version, about = "Quantize integrable systems on a lattice of Bohr-Sommerfeld tori")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a quantized observable
    Spectrum {
        #[arg(long)]
        observable: String,
    },
    /// Bohr-Sommerfeld energy levels of a one-degree-of-freedom potential
    Levels {
        /// Highest quantum number to solve for
        #[arg(long)]
        m_max: Option<u64>,
    },
    /// Run the operator identity suite
    Verify,
    /// Write a quantized observable in band form
    Export {
        #[arg(long)]
        observable: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Builtin model name or path to a model file
    #[arg(long, global = true, default_value = "ho1d")]
    pub model: String,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    /// Truncation box, `lo:hi` per axis separated by commas
    #[arg(long = "box", global = true)]
    pub bounds: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, global = true, default_value = "dirac")]
    pub convention: String,
    /// so3: twice the spin
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Experimental lattice offsets, one per axis
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub offsets: Option<Vec<f64>>,
}

/// Rendered output and the exit status it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit: i32,
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        Category::Usage => 1,
        Category::Model => 2,
        Category::Numerical => 3,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

/// Parse `lo:hi[,lo:hi…]`.
pub fn parse_box(src: &str) -> Result<Vec<BoxAxis>> {
    src.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| usage(format!("box axis `{part}` is not lo:hi")))?;
            let lo: i64 = lo.trim().parse().map_err(|_| usage(format!("bad box bound `{lo}`")))?;
            let hi: i64 = hi.trim().parse().map_err(|_| usage(format!("bad box bound `{hi}`")))?;
            BoxAxis::new(lo, hi).map_err(|e| usage(e.to_string()))
        })
        .collect()
}

pub fn load_model(common: &Common) -> Result<ModelDefinition> {
    let name = common.model.as_str();
    if common.n.is_some() && name != "so3" {
        return Err(usage("--n applies only to the so3 model"));
    }
    if BUILTIN_NAMES.contains(&name) {
        return builtin(name, common.hbar, common.n, common.offsets.is_some());
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(Error::UnknownModel(name.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Model {
        path: "$".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_model_file(&text)
}

fn lattice_system(common: &Common, model: &ModelDefinition) -> Result<LatticeSystem> {
    let bounds = common.bounds.as_deref().map(parse_box).transpose()?;
    if let Some(b) = &bounds {
        if b.len() != model.dof {
            return Err(usage(format!("--box has {} axes, model has {}", b.len(), model.dof)));
        }
    }
    LatticeSystem::new(model, common.hbar, bounds, common.offsets.clone())
}

fn envelope(model: &str, hbar: f64, command: &str, results: Json, checks: Json, extra: Vec<(&str, Json)>) -> Json {
    let mut fields = vec![
        ("model", Json::str(model)),
        ("hbar", Json::Num(hbar)),
        ("command", Json::str(command)),
        ("results", results),
        ("checks", checks),
    ];
    fields.extend(extra);
    Json::obj(fields)
}

fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// Spectrum rows: quantum numbers (diagonal observables only) and value.
fn spectrum(sys: &LatticeSystem, observable: &str, convention: Convention, tol: f64) -> Result<(Option<Vec<Vec<i64>>>, Vec<f64>)> {
    let op = sys.quantize(observable, convention, tol)?;
    let values = eigenvalues_hermitian(&op, EIGEN_TOL)?;
    if op.as_diagonal().is_none() {
        return Ok((None, values));
    }
    let diag: Vec<f64> = op.as_diagonal().expect("diagonal").iter().map(|z| z.re).collect();
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
    let space = sys.space();
    Ok((
        Some(order.iter().map(|&i| space.point_of(i).0.clone()).collect()),
        order.iter().map(|&i| diag[i]).collect(),
    ))
}

fn cmd_spectrum(common: &Common, model: &ModelDefinition, observable: &str, convention: Convention) -> Result<Outcome> {
    let sys = lattice_system(common, model)?;
    let (states, values) = spectrum(&sys, observable, convention, common.tol)?;
    let text = match common.format {
        Format::Json => {
            let rows = values
                .iter()
                .enumerate()
                .map(|(i, v)| match &states {
                    Some(s) => Json::obj([("m", Json::ints(&s[i])), ("value", Json::Num(*v))]),
                    None => Json::obj([("index", Json::Int(i as i64)), ("value", Json::Num(*v))]),
                })
                .collect();
            envelope(&model.name, common.hbar, "spectrum", Json::Arr(rows), Json::Arr(vec![]), vec![]).render()
        }
        Format::Csv => {
            let mut header: Vec<String> = match &states {
                Some(_) => (1..=model.dof).map(|k| format!("m{k}")).collect(),
                None => vec!["index".into()],
            };
            header.push("value".into());
            let rows: Vec<Vec<String>> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let mut r: Vec<String> = match &states {
                        Some(s) => s[i].iter().map(i64::to_string).collect(),
                        None => vec![i.to_string()],
                    };
                    r.push(format_csv_number(*v));
                    r
                })
                .collect();
            csv(&header, &rows)
        }
    };
    Ok(Outcome { text, exit: 0 })
}

fn levels_json(model: &str, hbar: f64, t: &LevelTable) -> Json {
    let rows = t
        .levels
        .iter()
        .map(|l| {
            Json::obj([
                ("m", Json::Int(l.m as i64)),
                ("energy", Json::Num(l.energy)),
                ("residual", Json::Num(l.residual)),
            ])
        })
        .collect();
    let excluded = t
        .excluded
        .iter()
        .map(|x| Json::obj([("m", Json::Int(x.m as i64)), ("reason", Json::str(&x.reason))]))
        .collect();
    envelope(model, hbar, "levels", Json::Arr(rows), Json::Arr(vec![]), vec![("excluded", Json::Arr(excluded))])
}

fn cmd_levels(common: &Common, model: &ModelDefinition, m_max: Option<u64>) -> Result<Outcome> {
    if common.bounds.is_some() || common.offsets.is_some() {
        return Err(usage("--box and --offsets apply to lattice models"));
    }
    let sys = potential_system(model, common.hbar)?;
    let table = bs_energy_levels(&sys, common.hbar, m_max, common.tol, &QuadratureSpec::default())?;
    let text = match common.format {
        Format::Json => levels_json(&model.name, common.hbar, &table).render(),
        Format::Csv => {
            let rows: Vec<Vec<String>> = table
                .levels
                .iter()
                .map(|l| vec![l.m.to_string(), format_csv_number(l.energy), format_csv_number(l.residual)])
                .collect();
            let mut s = csv(&["m".into(), "E".into(), "A_residual".into()], &rows);
            for x in &table.excluded {
                s.push_str(&format!("# excluded m={}: {}\n", x.m, x.reason));
            }
            s
        }
    };
    Ok(Outcome { text, exit: 0 })
}

fn axis_json(axis: Option<usize>) -> Json {
    axis.map_or(Json::Null, |k| Json::Int(k as i64))
}

pub fn verify_json(model: &str, hbar: f64, r: &VerifyReport) -> Json {
    let results = r
        .consistency
        .iter()
        .map(|c| {
            Json::obj([
                ("axis", Json::Int(c.axis as i64)),
                ("convention", Json::str(c.convention.name())),
                ("boundary_zeros", Json::Bool(c.boundary_zeros)),
                ("positivity", Json::Bool(c.positivity)),
                ("defect", Json::Num(c.defect)),
                ("residual", Json::Num(c.residual)),
                ("pass", Json::Bool(c.pass)),
            ])
        })
        .collect();
    let checks = r
        .checks
        .iter()
        .map(|c| {
            Json::obj([
                ("name", Json::str(&c.name)),
                ("axis", axis_json(c.axis)),
                ("pass", Json::Bool(c.pass)),
                ("max_deviation", Json::Num(c.max_deviation)),
                ("tolerance", Json::Num(c.tolerance)),
            ])
        })
        .collect();
    envelope(model, hbar, "verify", Json::Arr(results), Json::Arr(checks), vec![])
}

fn cmd_verify(common: &Common, model: &ModelDefinition, convention: Convention) -> Result<Outcome> {
    let sys = lattice_system(common, model)?;
    let report = run_suite(&sys, convention, common.tol)?;
    let text = match common.format {
        Format::Json => verify_json(&model.name, common.hbar, &report).render(),
        Format::Csv => {
            let header = ["check", "axis", "pass", "max_deviation", "tolerance"].map(String::from);
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.axis.map_or(String::new(), |k| k.to_string()),
                        c.pass.to_string(),
                        format_csv_number(c.max_deviation),
                        format_csv_number(c.tolerance),
                    ]
                })
                .collect();
            csv(&header, &rows)
        }
    };
    Ok(Outcome {
        text,
        exit: if report.all_pass() { 0 } else { 1 },
    })
}

/// Band listing `{dimension, bands: [{offset, coefficients}]}`.
pub fn operator_json(op: &LatticeOperator) -> Json {
    let bands = op
        .bands()
        .iter()
        .map(|(d, c)| {
            Json::obj([
                ("offset", Json::ints(d)),
                ("coefficients", Json::Arr(c.iter().map(|z| Json::complex(z.re, z.im)).collect())),
            ])
        })
        .collect();
    Json::obj([("dimension", Json::Int(op.dim() as i64)), ("bands", Json::Arr(bands))])
}

fn cmd_export(common: &Common, model: &ModelDefinition, observable: &str, convention: Convention) -> Result<Outcome> {
    let sys = lattice_system(common, model)?;
    let op = sys.quantize(observable, convention, common.tol)?;
    let text = match common.format {
        Format::Json => operator_json(&op).render(),
        Format::Csv => {
            let mut header: Vec<String> = (1..=model.dof).map(|k| format!("d{k}")).collect();
            header.extend(["index", "re", "im"].map(String::from));
            let mut rows = Vec::new();
            for (d, c) in op.bands() {
                for (i, z) in c.iter().enumerate() {
                    let mut r: Vec<String> = d.iter().map(i64::to_string).collect();
                    r.extend([i.to_string(), format_csv_number(z.re), format_csv_number(z.im)]);
                    rows.push(r);
                }
            }
            csv(&header, &rows)
        }
    };
    Ok(Outcome { text, exit: 0 })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let common = &cli.common;
    if !(common.hbar > 0.0 && common.hbar.is_finite()) {
        return Err(usage(format!("--hbar must be positive and finite, got {}", common.hbar)));
    }
    if !(common.tol > 0.0 && common.tol.is_finite()) {
        return Err(usage(format!("--tol must be positive and finite, got {}", common.tol)));
    }
    let convention: Convention = common.convention.parse()?;
    let model = load_model(common)?;
    match &cli.command {
        Command::Spectrum { observable } => cmd_spectrum(common, &model, observable, convention),
        Command::Levels { m_max } => cmd_levels(common, &model, *m_max),
        Command::Verify => cmd_verify(common, &model, convention),
        Command::Export { observable } => cmd_export(common, &model, observable, convention),
    }
}

fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Parse arguments, run, write output, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => match emit(&outcome.text, cli.common.out.as_deref()) {
            Ok(()) => outcome.exit,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
