use super::{LatticeData, ModelDefinition, ModelKind, PotentialData};
use crate::error::{Error, Result};
use crate::expr::{parse_constraint, parse_expression, Expr};
use crate::json::Json;
use crate::lattice::BoxAxis;
use crate::numerics::Domain;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

fn err(path: &str, msg: impl Into<String>) -> Error {
    Error::model(path, msg)
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| err(path, "expected a string"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| err(path, "expected a number"))
}

fn integer(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| err(path, "expected an integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn expression(v: &Value, path: &str) -> Result<Expr> {
    match v {
        Value::Number(_) => Ok(Expr::Num(number(v, path)?)),
        _ => parse_expression(string(v, path)?).map_err(|e| err(path, e.to_string())),
    }
}

fn required<'a>(doc: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    doc.get(key)
        .ok_or_else(|| err(path, format!("missing key `{key}`")))
}

fn only_keys(doc: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    match doc.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(err(&format!("{path}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn expression_map(v: Option<&Value>, path: &str) -> Result<BTreeMap<String, Expr>> {
    let Some(v) = v else {
        return Ok(BTreeMap::new());
    };
    object(v, path)?
        .iter()
        .map(|(k, x)| Ok((k.clone(), expression(x, &format!("{path}.{k}"))?)))
        .collect()
}

/// Parse and validate a JSON model document. hbar is supplied at run time,
/// so the document's default is 1.
pub fn parse_model_file(text: &str) -> Result<ModelDefinition> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        err(
            "$",
            format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column()),
        )
    })?;
    let doc = object(&doc, "$")?;
    let name = string(required(doc, "name", "$")?, "name")?.to_string();
    let kind = string(required(doc, "kind", "$")?, "kind")?;
    let dof = integer(required(doc, "dof", "$")?, "dof")?;
    if dof < 1 {
        return Err(err("dof", "must be a positive integer"));
    }
    let dof = dof as usize;
    let constants = expression_map(doc.get("constants"), "constants")?;
    let notes = match doc.get("notes") {
        None => Vec::new(),
        Some(v) => array(v, "notes")?
            .iter()
            .enumerate()
            .map(|(i, x)| Ok(string(x, &format!("notes[{i}]"))?.to_string()))
            .collect::<Result<_>>()?,
    };
    const COMMON: [&str; 5] = ["name", "kind", "dof", "constants", "notes"];

    let model_kind = match kind {
        "lattice" => {
            let allowed: Vec<&str> = COMMON
                .iter()
                .copied()
                .chain(["lattice", "profiles", "hamiltonian", "observables", "box"])
                .collect();
            only_keys(doc, &allowed, "$")?;
            let lattice = object(required(doc, "lattice", "$")?, "lattice")?;
            only_keys(lattice, &["offsets", "constraints"], "lattice")?;
            let offsets = match lattice.get("offsets") {
                None => vec![0.0; dof],
                Some(v) => array(v, "lattice.offsets")?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| number(x, &format!("lattice.offsets[{i}]")))
                    .collect::<Result<_>>()?,
            };
            let constraints = array(required(lattice, "constraints", "lattice")?, "lattice.constraints")?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let path = format!("lattice.constraints[{i}]");
                    parse_constraint(string(x, &path)?).map_err(|e| err(&path, e.to_string()))
                })
                .collect::<Result<_>>()?;
            let mut profiles = BTreeMap::new();
            if let Some(v) = doc.get("profiles") {
                for (k, x) in object(v, "profiles")? {
                    let path = format!("profiles.{k}");
                    let axis: usize = k
                        .parse()
                        .ok()
                        .filter(|a| (1..=dof).contains(a))
                        .ok_or_else(|| err(&path, format!("axis must be an integer in 1..={dof}")))?;
                    profiles.insert(axis, expression(x, &path)?);
                }
            }
            let hamiltonian = expression(required(doc, "hamiltonian", "$")?, "hamiltonian")?;
            let default_box = match doc.get("box") {
                None => vec![BoxAxis::new(0, 10).expect("nonempty"); dof],
                Some(v) => array(v, "box")?
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        let path = format!("box[{i}]");
                        let pair = array(x, &path)?;
                        if pair.len() != 2 {
                            return Err(err(&path, "expected [lo, hi]"));
                        }
                        BoxAxis::new(integer(&pair[0], &path)?, integer(&pair[1], &path)?)
                            .map_err(|e| err(&path, e.to_string()))
                    })
                    .collect::<Result<_>>()?,
            };
            ModelKind::Lattice(LatticeData {
                offsets,
                constraints,
                profiles,
                hamiltonian,
                default_box,
            })
        }
        "potential" => {
            let allowed: Vec<&str> = COMMON.iter().copied().chain(["potential", "domain"]).collect();
            only_keys(doc, &allowed, "$")?;
            let potential = expression(required(doc, "potential", "$")?, "potential")?;
            let domain = string(required(doc, "domain", "$")?, "domain")?
                .parse::<Domain>()
                .map_err(|e| err("domain", e.to_string()))?;
            ModelKind::Potential(PotentialData { potential, domain })
        }
        other => return Err(err("kind", format!("expected `lattice` or `potential`, found `{other}`"))),
    };
    let model = ModelDefinition {
        name,
        dof,
        constants,
        kind: model_kind,
        observables: expression_map(doc.get("observables"), "observables")?,
        default_hbar: 1.0,
        notes,
    };
    model.validate()?;
    Ok(model)
}

/// Model document accepted by [`parse_model_file`].
pub fn to_model_file(model: &ModelDefinition) -> String {
    let exprs = |m: &BTreeMap<String, Expr>| {
        Json::Obj(
            m.iter()
                .map(|(k, e)| (k.clone(), Json::Str(e.to_string())))
                .collect(),
        )
    };
    let mut fields = vec![
        ("name".to_string(), Json::str(&model.name)),
        ("kind".to_string(), Json::str(model.kind_name())),
        ("dof".to_string(), Json::Int(model.dof as i64)),
        ("constants".to_string(), exprs(&model.constants)),
    ];
    match &model.kind {
        ModelKind::Lattice(l) => {
            fields.push((
                "lattice".into(),
                Json::obj([
                    ("offsets", Json::nums(&l.offsets)),
                    (
                        "constraints",
                        Json::Arr(l.constraints.iter().map(|c| Json::str(&c.source)).collect()),
                    ),
                ]),
            ));
            fields.push((
                "profiles".into(),
                Json::Obj(
                    l.profiles
                        .iter()
                        .map(|(k, e)| (k.to_string(), Json::Str(e.to_string())))
                        .collect(),
                ),
            ));
            fields.push(("hamiltonian".into(), Json::Str(l.hamiltonian.to_string())));
            fields.push(("observables".into(), exprs(&model.observables)));
            fields.push((
                "box".into(),
                Json::Arr(l.default_box.iter().map(|b| Json::ints(&[b.lo, b.hi])).collect()),
            ));
        }
        ModelKind::Potential(p) => {
            fields.push(("potential".into(), Json::Str(p.potential.to_string())));
            fields.push(("domain".into(), Json::str(p.domain.name())));
        }
    }
    if !model.notes.is_empty() {
        fields.push((
            "notes".into(),
            Json::Arr(model.notes.iter().map(Json::str).collect()),
        ));
    }
    Json::Obj(fields).render()
}
