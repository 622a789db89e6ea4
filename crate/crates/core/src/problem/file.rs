//! JSON problem files.
//!
//! ```json
//! {
//!   "id": "affine-vi-n5-s42-i0",
//!   "class": "affine-vi",
//!   "n": 2,
//!   "P": [1.0, 1.0, 0.0, 0.0],
//!   "r": [0.0, 1.0],
//!   "lower": [0.0, 0.0],
//!   "upper": [1.0, 1.0]
//! }
//! ```
//!
//! `P` and `Q` are row-major. `Q` is required for `affine-ep`; `w` and `v` for
//! `trig-vi`. Numbers are written with 17 significant digits so a save/load
//! cycle reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{BoxSet, ProblemClass, ProblemInstance, ProblemSpec};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    id: String,
    class: String,
    n: usize,
    #[serde(rename = "P")]
    p: Vec<f64>,
    #[serde(rename = "Q", default)]
    q: Option<Vec<f64>>,
    r: Vec<f64>,
    #[serde(default)]
    w: Option<Vec<f64>>,
    #[serde(default)]
    v: Option<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Parses a problem from JSON text. `origin` is used in diagnostics only.
pub fn parse_problem<T: Scalar>(text: &str, origin: &Path) -> Result<ProblemInstance<T>> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let class: ProblemClass = raw.class.parse()?;
    let n = raw.n;
    let field_err = |msg: String| Error::Invariant(format!("{}: {msg}", origin.display()));
    let vec_field = |name: &str, v: Vec<f64>| -> Result<Vec<T>> {
        if v.len() != n {
            return Err(field_err(format!("field '{name}' has {} entries, expected n = {n}", v.len())));
        }
        Ok(v.into_iter().map(T::lit).collect())
    };
    let mat_field = |name: &str, v: Vec<f64>| -> Result<Matrix<T>> {
        if v.len() != n * n {
            return Err(field_err(format!("field '{name}' has {} entries, expected n*n = {}", v.len(), n * n)));
        }
        Matrix::from_row_major(n, n, v.into_iter().map(T::lit).collect())
    };
    let forbid = |name: &str, present: bool| -> Result<()> {
        if present {
            Err(field_err(format!("field '{name}' is not allowed for class {class}")))
        } else {
            Ok(())
        }
    };

    let feasible = BoxSet::new(vec_field("lower", raw.lower)?, vec_field("upper", raw.upper)?)
        .map_err(|e| field_err(e.to_string()))?;
    let p = mat_field("P", raw.p)?;
    let r = vec_field("r", raw.r)?;
    let spec = match class {
        ProblemClass::AffineVi => {
            forbid("Q", raw.q.is_some())?;
            forbid("w", raw.w.is_some())?;
            forbid("v", raw.v.is_some())?;
            ProblemSpec::AffineVi(super::AffineViSpec { p, r })
        }
        ProblemClass::TrigVi => {
            forbid("Q", raw.q.is_some())?;
            let w = raw.w.ok_or_else(|| field_err("missing field 'w'".into()))?;
            let v = raw.v.ok_or_else(|| field_err("missing field 'v'".into()))?;
            ProblemSpec::TrigVi(super::TrigViSpec { p, r, w: vec_field("w", w)?, v: vec_field("v", v)? })
        }
        ProblemClass::AffineEp => {
            forbid("w", raw.w.is_some())?;
            forbid("v", raw.v.is_some())?;
            let q = raw.q.ok_or_else(|| field_err("missing field 'Q'".into()))?;
            ProblemSpec::AffineEp(super::AffineEpSpec { p, q: mat_field("Q", q)?, r })
        }
    };
    ProblemInstance::new(raw.id, spec, feasible).map_err(|e| match e {
        Error::Invariant(m) => field_err(m),
        other => other,
    })
}

pub fn load_problem<T: Scalar>(path: impl AsRef<Path>) -> Result<ProblemInstance<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_problem(&text, path)
}

/// Serialises a problem to JSON text.
pub fn write_problem<T: Scalar>(p: &ProblemInstance<T>) -> String {
    let mut s = String::new();
    let id = serde_json::to_string(p.id()).expect("string serialises");
    let _ = writeln!(s, "{{");
    let _ = writeln!(s, "  \"id\": {id},");
    let _ = writeln!(s, "  \"class\": \"{}\",", p.class());
    let _ = writeln!(s, "  \"n\": {},", p.n());
    let mut field = |name: &str, values: &[T], last: bool| {
        let body: Vec<String> = values.iter().map(|v| fmt_f64(v.as_f64())).collect();
        let _ = writeln!(s, "  \"{name}\": [{}]{}", body.join(", "), if last { "" } else { "," });
    };
    field("P", p.p().as_slice(), false);
    if let Some(q) = p.q() {
        field("Q", q.as_slice(), false);
    }
    field("r", p.r(), false);
    if let Some((w, v)) = p.trig_terms() {
        field("w", w, false);
        field("v", v, false);
    }
    field("lower", p.feasible().lower(), false);
    field("upper", p.feasible().upper(), true);
    s.push_str("}\n");
    s
}

pub fn save_problem<T: Scalar>(p: &ProblemInstance<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_problem(p)).map_err(|e| Error::io(path, e))
}

/// Decimal with 17 significant digits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
