//! Workbench files: JSON documents tagged `emodule/1`, `scomplex/1` or
//! `rcomplex/1`. Output is canonical: sorted keys, lowest-terms scalars,
//! polynomials in graded-lex order.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::bgg::LinearSComplex;
use crate::emodule::{validate_module, ExteriorContext, GradedEModule};
use crate::error::{Error, Result};
use crate::filtered::{validate_complex, FilteredFreeComplex, PolyMatrix, Polynomial};
use crate::linalg::{Field, Matrix, Scalar};

pub const EMODULE: &str = "emodule/1";
pub const SCOMPLEX: &str = "scomplex/1";
pub const RCOMPLEX: &str = "rcomplex/1";

#[derive(Clone, Debug)]
pub enum WorkbenchFile {
    EModule(GradedEModule),
    SComplex(LinearSComplex),
    RComplex(FilteredFreeComplex),
}

impl WorkbenchFile {
    pub fn schema(&self) -> &'static str {
        match self {
            WorkbenchFile::EModule(_) => EMODULE,
            WorkbenchFile::SComplex(_) => SCOMPLEX,
            WorkbenchFile::RComplex(_) => RCOMPLEX,
        }
    }
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn matrix_value(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

pub fn emodule_to_string(m: &GradedEModule) -> String {
    let m = m.trimmed();
    let supp = m.support();
    let components: Vec<Value> = supp.iter().map(|&j| json!({"degree": j, "dim": m.dim(j)})).collect();
    let mut action = Vec::new();
    for a in 0..m.q() {
        for &j in &supp {
            let mat = m.action(a, j);
            if m.dim(j - 1) > 0 && !mat.is_zero() {
                action.push(json!({"var": format!("e{}", a + 1), "degree": j, "matrix": matrix_value(&mat)}));
            }
        }
    }
    to_text(&json!({
        "schema": EMODULE,
        "field": m.field().tag(),
        "q": m.q(),
        "components": components,
        "action": action,
    }))
}

pub fn scomplex_to_string(l: &LinearSComplex) -> String {
    let ctx = l.context();
    let spots: Vec<Value> = (0..l.spots())
        .map(|n| json!({"index": n, "generation_degree": l.generation_degree(n), "rank": l.rank(n)}))
        .collect();
    let differentials: Vec<Value> = (0..l.spots().saturating_sub(1))
        .map(|n| {
            let coefficients: Vec<Value> = (0..ctx.q)
                .map(|a| json!({"var": format!("x{}", a + 1), "matrix": matrix_value(l.coefficient(n, a))}))
                .collect();
            json!({"from": n, "coefficients": coefficients})
        })
        .collect();
    to_text(&json!({
        "schema": SCOMPLEX,
        "field": ctx.field.tag(),
        "q": ctx.q,
        "spots": spots,
        "differentials": differentials,
    }))
}

pub fn rcomplex_to_string(k: &FilteredFreeComplex) -> String {
    let spots: Vec<Value> = k.spots().map(|n| json!({"n": n, "rank": k.rank(n)})).collect();
    let differentials: Vec<Value> = (k.n_lo()..k.n_hi())
        .map(|n| {
            let d = k.differential(n).expect("inner spot");
            let rows: Vec<Value> = d
                .iter()
                .map(|r| Value::Array(r.iter().map(|p| Value::String(p.to_string())).collect()))
                .collect();
            json!({"from": n, "matrix": rows})
        })
        .collect();
    to_text(&json!({
        "schema": RCOMPLEX,
        "field": k.field().tag(),
        "vars": k.e(),
        "precision": k.precision(),
        "spots": spots,
        "differentials": differentials,
    }))
}

pub fn serialize(f: &WorkbenchFile) -> String {
    match f {
        WorkbenchFile::EModule(m) => emodule_to_string(m),
        WorkbenchFile::SComplex(l) => scomplex_to_string(l),
        WorkbenchFile::RComplex(k) => rcomplex_to_string(k),
    }
}

// ---- parsing ----

fn schema_err(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema_err(format!("{ctx}: missing key \"{key}\"")))
}

fn as_object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema_err(format!("{ctx}: expected an object")))
}

fn as_array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(format!("{ctx}: expected an array")))
}

fn as_int(v: &Value, ctx: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema_err(format!("{ctx}: expected an integer")))
}

fn as_usize(v: &Value, ctx: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| schema_err(format!("{ctx}: expected a nonnegative integer")))
}

fn as_str<'a>(v: &'a Value, ctx: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema_err(format!("{ctx}: expected a string")))
}

/// Converts into the requested field (rationals reduce modulo `p`).
fn scalar_in(field: Field, target: Field, s: &str, ctx: &str) -> Result<Scalar> {
    let x = field
        .parse_scalar(s)
        .map_err(|e| Error::Parse(format!("{ctx}: {e}")))?;
    x.convert(target)
}

fn parse_matrix(v: &Value, field: Field, target: Field, rows: usize, cols: usize, ctx: &str) -> Result<Matrix> {
    let arr = as_array(v, ctx)?;
    let shape_err = || Error::DimensionMismatch(format!("{ctx}: expected a {rows}x{cols} matrix"));
    if arr.len() != rows {
        return Err(shape_err());
    }
    let mut out = Matrix::zeros(target, rows, cols);
    for (i, row) in arr.iter().enumerate() {
        let row = as_array(row, ctx)?;
        if row.len() != cols {
            return Err(shape_err());
        }
        for (j, x) in row.iter().enumerate() {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(schema_err(format!("{ctx}: entries must be strings"))),
            };
            out.set(i, j, scalar_in(field, target, &s, ctx)?);
        }
    }
    Ok(out)
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })
}

fn header(v: &Value) -> Result<(&Map<String, Value>, String, Field)> {
    let obj = as_object(v, "document")?;
    let schema = as_str(get(obj, "schema", "document")?, "schema")?.to_string();
    let field: Field = as_str(get(obj, "field", "document")?, "field")?.parse()?;
    Ok((obj, schema, field))
}

/// Parses a document and checks the invariants of its type. `field`
/// overrides the field declared in the file.
pub fn parse_str(text: &str, field: Option<Field>) -> Result<WorkbenchFile> {
    let f = parse_unchecked(text, field)?;
    check_invariants(&f)?;
    Ok(f)
}

/// Structural checks only (syntax, schema, shapes).
pub fn parse_unchecked(text: &str, field: Option<Field>) -> Result<WorkbenchFile> {
    let v = parse_json(text)?;
    let (obj, schema, declared) = header(&v)?;
    let target = field.unwrap_or(declared);
    if declared != target && declared != Field::Rationals {
        return Err(Error::FieldMismatch(declared, target));
    }
    match schema.as_str() {
        EMODULE => parse_emodule(obj, declared, target).map(WorkbenchFile::EModule),
        SCOMPLEX => parse_scomplex(obj, declared, target).map(WorkbenchFile::SComplex),
        RCOMPLEX => parse_rcomplex(obj, declared, target).map(WorkbenchFile::RComplex),
        other => Err(schema_err(format!("unknown schema \"{other}\""))),
    }
}

fn parse_emodule(obj: &Map<String, Value>, field: Field, target: Field) -> Result<GradedEModule> {
    let q = as_usize(get(obj, "q", "emodule")?, "q")?;
    let ctx = ExteriorContext::new(q, target);
    let mut dims = std::collections::BTreeMap::new();
    for c in as_array(get(obj, "components", "emodule")?, "components")? {
        let c = as_object(c, "component")?;
        let j = as_int(get(c, "degree", "component")?, "degree")?;
        let d = as_usize(get(c, "dim", "component")?, "dim")?;
        if dims.insert(j, d).is_some() {
            return Err(schema_err(format!("degree {j} listed twice in components")));
        }
    }
    dims.retain(|_, d| *d > 0);
    let (Some(&lo), Some(&hi)) = (dims.keys().next(), dims.keys().next_back()) else {
        return Ok(GradedEModule::zero(ctx));
    };
    let dim = |j: i64| dims.get(&j).copied().unwrap_or(0);
    let mut action: std::collections::BTreeMap<(usize, i64), Matrix> = std::collections::BTreeMap::new();
    let entries = match obj.get("action") {
        Some(v) => as_array(v, "action")?.clone(),
        None => Vec::new(),
    };
    for e in &entries {
        let e = as_object(e, "action entry")?;
        let var = as_str(get(e, "var", "action entry")?, "var")?;
        let a = var
            .strip_prefix('e')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&a| a >= 1 && a <= q)
            .ok_or_else(|| schema_err(format!("unknown variable \"{var}\" (expected e1..e{q})")))?;
        let j = as_int(get(e, "degree", "action entry")?, "degree")?;
        let ctx_msg = format!("{var} at degree {j}");
        let m = parse_matrix(get(e, "matrix", "action entry")?, field, target, dim(j - 1), dim(j), &ctx_msg)?;
        if action.insert((a - 1, j), m).is_some() {
            return Err(schema_err(format!("{ctx_msg} given twice")));
        }
    }
    let dims_vec = (lo..=hi).map(dim).collect();
    GradedEModule::from_fn(ctx, lo, dims_vec, |a, j| {
        action
            .remove(&(a, j))
            .unwrap_or_else(|| Matrix::zeros(target, dim(j - 1), dim(j)))
    })
}

fn parse_scomplex(obj: &Map<String, Value>, field: Field, target: Field) -> Result<LinearSComplex> {
    let q = as_usize(get(obj, "q", "scomplex")?, "q")?;
    let ctx = ExteriorContext::new(q, target);
    let spots = as_array(get(obj, "spots", "scomplex")?, "spots")?;
    let mut ranks = Vec::new();
    let mut c0 = 0;
    for (i, s) in spots.iter().enumerate() {
        let s = as_object(s, "spot")?;
        let idx = as_usize(get(s, "index", "spot")?, "index")?;
        if idx != i {
            return Err(schema_err(format!("spot {i} has index {idx}; spots must be listed in order from 0")));
        }
        let c = as_int(get(s, "generation_degree", "spot")?, "generation_degree")?;
        if i == 0 {
            c0 = c;
        } else if c != c0 + i as i64 {
            return Err(schema_err(format!("spot {i} must be generated in degree {}", c0 + i as i64)));
        }
        ranks.push(as_usize(get(s, "rank", "spot")?, "rank")?);
    }
    let mut coefficients: Vec<Option<Vec<Matrix>>> = vec![None; ranks.len().saturating_sub(1)];
    for d in as_array(get(obj, "differentials", "scomplex")?, "differentials")? {
        let d = as_object(d, "differential")?;
        let from = as_usize(get(d, "from", "differential")?, "from")?;
        if from + 1 >= ranks.len() {
            return Err(schema_err(format!("differential from spot {from} leaves the complex")));
        }
        let mut per_var = vec![Matrix::zeros(target, ranks[from + 1], ranks[from]); q];
        for c in as_array(get(d, "coefficients", "differential")?, "coefficients")? {
            let c = as_object(c, "coefficient")?;
            let var = as_str(get(c, "var", "coefficient")?, "var")?;
            let a = var
                .strip_prefix('x')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&a| a >= 1 && a <= q)
                .ok_or_else(|| schema_err(format!("unknown variable \"{var}\" (expected x1..x{q})")))?;
            per_var[a - 1] = parse_matrix(
                get(c, "matrix", "coefficient")?,
                field,
                target,
                ranks[from + 1],
                ranks[from],
                &format!("{var} from spot {from}"),
            )?;
        }
        if coefficients[from].replace(per_var).is_some() {
            return Err(schema_err(format!("differential from spot {from} given twice")));
        }
    }
    let coefficients = coefficients
        .into_iter()
        .enumerate()
        .map(|(n, c)| c.unwrap_or_else(|| vec![Matrix::zeros(target, ranks[n + 1], ranks[n]); q]))
        .collect();
    LinearSComplex::new(ctx, c0, ranks, coefficients)
}

fn parse_rcomplex(obj: &Map<String, Value>, field: Field, target: Field) -> Result<FilteredFreeComplex> {
    let e = as_usize(get(obj, "vars", "rcomplex")?, "vars")?;
    let precision = as_usize(get(obj, "precision", "rcomplex")?, "precision")?;
    let spots = as_array(get(obj, "spots", "rcomplex")?, "spots")?;
    if spots.is_empty() {
        return Err(schema_err("a complex needs at least one spot"));
    }
    let mut n_lo = 0;
    let mut ranks = Vec::new();
    for (i, s) in spots.iter().enumerate() {
        let s = as_object(s, "spot")?;
        let n = as_int(get(s, "n", "spot")?, "n")?;
        if i == 0 {
            n_lo = n;
        } else if n != n_lo + i as i64 {
            return Err(schema_err(format!("spots must be consecutive; found n = {n} after {}", n_lo + i as i64 - 1)));
        }
        ranks.push(as_usize(get(s, "rank", "spot")?, "rank")?);
    }
    let mut diffs: Vec<Option<PolyMatrix>> = vec![None; ranks.len() - 1];
    for d in as_array(get(obj, "differentials", "rcomplex")?, "differentials")? {
        let d = as_object(d, "differential")?;
        let from = as_int(get(d, "from", "differential")?, "from")?;
        let idx = from - n_lo;
        if idx < 0 || idx as usize + 1 >= ranks.len() {
            return Err(schema_err(format!("differential from spot {from} leaves the complex")));
        }
        let idx = idx as usize;
        let (rows, cols) = (ranks[idx + 1], ranks[idx]);
        let ctx = format!("d^{from}");
        let arr = as_array(get(d, "matrix", "differential")?, &ctx)?;
        let shape_err = || Error::DimensionMismatch(format!("{ctx}: expected a {rows}x{cols} matrix"));
        if arr.len() != rows {
            return Err(shape_err());
        }
        let mut m = Vec::with_capacity(rows);
        for row in arr {
            let row = as_array(row, &ctx)?;
            if row.len() != cols {
                return Err(shape_err());
            }
            let mut out = Vec::with_capacity(cols);
            for x in row {
                let s = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(schema_err(format!("{ctx}: entries must be strings"))),
                };
                let p = Polynomial::parse(&s, e, field).map_err(|err| Error::Parse(format!("{ctx}: {err}")))?;
                out.push(p.convert(target)?);
            }
            m.push(out);
        }
        if diffs[idx].replace(m).is_some() {
            return Err(schema_err(format!("differential from spot {from} given twice")));
        }
    }
    let diffs = diffs
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.unwrap_or_else(|| vec![vec![Polynomial::zero(target, e); ranks[i]]; ranks[i + 1]]))
        .collect();
    FilteredFreeComplex::new(target, e, precision, n_lo, ranks, diffs)
}

pub fn read_file(path: &Path, field: Option<Field>) -> Result<WorkbenchFile> {
    parse_str(&std::fs::read_to_string(path)?, field)
}

/// Anticommutation for modules, `d² = 0` for complexes.
pub fn check_invariants(f: &WorkbenchFile) -> Result<()> {
    match f {
        WorkbenchFile::EModule(m) => {
            if let Some(v) = validate_module(&m.context(), m)?.first() {
                return Err(Error::InvalidModule(v.to_string()));
            }
        }
        WorkbenchFile::SComplex(l) => {
            if let Some((n, a, b)) = l.d_squared_violations().first() {
                return Err(Error::InvalidComplex(format!(
                    "differentials do not compose to zero at spot {n} (x{} x{})",
                    a + 1,
                    b + 1
                )));
            }
        }
        WorkbenchFile::RComplex(k) => {
            if let Some(v) = validate_complex(k).first() {
                return Err(Error::InvalidComplex(format!("d^2 != 0: {v}")));
            }
        }
    }
    Ok(())
}

pub fn load_emodule(path: &Path, field: Option<Field>) -> Result<GradedEModule> {
    match read_file(path, field)? {
        WorkbenchFile::EModule(m) => Ok(m),
        other => Err(schema_err(format!("expected {EMODULE}, found {}", other.schema()))),
    }
}

pub fn load_rcomplex(path: &Path, field: Option<Field>) -> Result<FilteredFreeComplex> {
    match read_file(path, field)? {
        WorkbenchFile::RComplex(k) => Ok(k),
        other => Err(schema_err(format!("expected {RCOMPLEX}, found {}", other.schema()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bgg::build_bgg;
    use crate::models::{generate, ModelSpec};

    const Q: Field = Field::Rationals;

    fn module(text: &str) -> Result<GradedEModule> {
        match parse_str(text, None)? {
            WorkbenchFile::EModule(m) => Ok(m),
            _ => panic!("not a module"),
        }
    }

    #[test]
    fn curve_round_trip() {
        let m = generate(&ModelSpec::Curve(2), Q).unwrap().p;
        let text = emodule_to_string(&m);
        assert_eq!(module(&text).unwrap(), m.trimmed());
        assert_eq!(emodule_to_string(&module(&text).unwrap()), text);
        assert!(text.find("\"action\"").unwrap() < text.find("\"components\"").unwrap());
    }

    #[test]
    fn wrong_shape_names_degree() {
        let text = r#"{"schema":"emodule/1","field":"Q","q":1,
            "components":[{"degree":0,"dim":1},{"degree":-1,"dim":1}],
            "action":[{"var":"e1","degree":0,"matrix":[["1","0"]]}]}"#;
        let err = module(text).unwrap_err().to_string();
        assert!(err.contains("e1 at degree 0"), "{err}");
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_str("{\n  \"schema\": \"emodule/1\",\n  \"field\" \"Q\"\n}", None).unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_schema_is_rejected() {
        let err = parse_str(r#"{"schema":"emodule/2","field":"Q"}"#, None).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn complexes_round_trip() {
        let k = FilteredFreeComplex::new(
            Q,
            2,
            4,
            -1,
            vec![1, 1],
            vec![vec![vec![Polynomial::parse("t1^2 - 2/3*t2", 2, Q).unwrap()]]],
        )
        .unwrap();
        let text = rcomplex_to_string(&k);
        assert!(text.contains("\"t1^2 - 2/3*t2\""), "{text}");
        match parse_str(&text, None).unwrap() {
            WorkbenchFile::RComplex(k2) => assert_eq!(k2, k),
            _ => panic!(),
        }
        let l = build_bgg(&generate(&ModelSpec::Curve(2), Q).unwrap().p).unwrap();
        let text = scomplex_to_string(&l);
        match parse_str(&text, None).unwrap() {
            WorkbenchFile::SComplex(l2) => assert_eq!(l2, l),
            _ => panic!(),
        }
    }

    #[test]
    fn field_override_reduces_coefficients() {
        let m = generate(&ModelSpec::Curve(2), Q).unwrap().p;
        let text = emodule_to_string(&m);
        let p = Field::prime(7).unwrap();
        let m7 = match parse_str(&text, Some(p)).unwrap() {
            WorkbenchFile::EModule(m) => m,
            _ => panic!(),
        };
        assert_eq!(m7.field(), p);
    }

    #[test]
    fn invalid_module_is_reported_on_load() {
        let text = r#"{"schema":"emodule/1","field":"Q","q":2,
            "components":[{"degree":1,"dim":1},{"degree":0,"dim":1},{"degree":-1,"dim":1}],
            "action":[{"var":"e1","degree":1,"matrix":[["1"]]},{"var":"e1","degree":0,"matrix":[["1"]]}]}"#;
        let f = parse_unchecked(text, None).unwrap();
        assert!(check_invariants(&f).is_err());
        let err = parse_str(text, None).unwrap_err();
        assert!(matches!(err, Error::InvalidModule(_)), "{err}");
    }
}
