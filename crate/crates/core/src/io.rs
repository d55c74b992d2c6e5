//! State files (`{"dim": d, "matrix": [[[re, im], …], …]}`) and CSV output.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exponents::BoundReport;
use crate::linalg::{validate_state, CMatrix, QuantumState};
use crate::rs_dist::RsRow;

fn parse_err(origin: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: origin.to_string(), message: message.into() }
}

fn entry(v: &Value, origin: &str, r: usize, c: usize) -> Result<Complex64> {
    let bad = || parse_err(origin, format!("matrix[{r}][{c}]: expected a [re, im] pair of numbers"));
    let pair = v.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
    let re = pair[0].as_f64().ok_or_else(bad)?;
    let im = pair[1].as_f64().ok_or_else(bad)?;
    Ok(Complex64::new(re, im))
}

/// Parses and validates a state; `origin` labels error messages.
pub fn parse_state_json(text: &str, origin: &str, cfg: &Config) -> Result<QuantumState> {
    let doc: Value = serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    let dim = doc
        .get("dim")
        .and_then(Value::as_u64)
        .filter(|&d| d > 0)
        .ok_or_else(|| parse_err(origin, "dim: expected a positive integer"))? as usize;
    let rows = doc
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(origin, "matrix: expected an array of rows"))?;
    if rows.len() != dim {
        return Err(parse_err(origin, format!("matrix: expected {dim} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| parse_err(origin, format!("matrix[{r}]: expected an array")))?;
        if row.len() != dim {
            return Err(parse_err(origin, format!("matrix[{r}]: expected {dim} entries, found {}", row.len())));
        }
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = entry(v, origin, r, c)?;
        }
    }
    validate_state(m, cfg, false)
}

pub fn parse_state_file(path: &Path, cfg: &Config) -> Result<QuantumState> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{origin}: {e}")))?;
    parse_state_json(&text, &origin, cfg)
}

pub fn state_to_json(state: &QuantumState) -> Value {
    let m = state.matrix();
    let d = state.dim();
    let rows: Vec<Value> =
        (0..d).map(|r| Value::Array((0..d).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect())).collect();
    json!({ "dim": d, "matrix": rows })
}

pub fn write_state_file(path: &Path, state: &QuantumState) -> Result<()> {
    let text = serde_json::to_string_pretty(&state_to_json(state)).expect("state JSON serializes");
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns `gamma,P,Q,jump_P,jump_Q`.
pub fn write_rs_csv<W: Write>(out: W, rows: &[RsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "P", "Q", "jump_P", "jump_Q"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.gamma, r.p, r.q, r.jump_p, r.jump_q].map(|x| x.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Columns `n,a,alpha,type1,type2,bound2,bound1s,bound1e,holds`.
pub fn write_exponents_csv<W: Write>(out: W, rows: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "a", "alpha", "type1", "type2", "bound2", "bound1s", "bound1e", "holds"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.a.to_string(),
            r.alpha.to_string(),
            r.type1_error.to_string(),
            r.type2_error.to_string(),
            r.bound_type2.to_string(),
            opt(r.bound_type1_success),
            opt(r.bound_type1_error),
            r.all_hold().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Columns `alpha` then one per method.
pub fn write_sweep_csv<W: Write>(out: W, methods: &[String], rows: &[(f64, Vec<f64>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["alpha".to_string()];
    header.extend(methods.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    for (alpha, vals) in rows {
        let mut rec = vec![alpha.to_string()];
        rec.extend(vals.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
