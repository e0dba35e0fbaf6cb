//! Algebra specification files, key=value report blocks, and CSV output.
//!
//! An algebra file is TOML with fields:
//!
//! ```toml
//! dim = 5
//!
//! [params]
//! alpha = 1.4142135623730951
//!
//! [[brackets]]
//! a = 1
//! b = 4
//! c = 5
//! value = "alpha^2"
//!
//! # optional isotropy subalgebra basis (coefficient vectors)
//! subalgebra = [["1", "0", "0", "0", "0"]]
//! ```
//!
//! Generator indices are 1-based. A value string is an optional sign,
//! an optional rational (`p/q`), integer, or decimal coefficient, and an
//! optional parameter factor `name` or `name^k`. Exact mode is selected
//! iff every value is an integer or `p/q` with no parameter references.

use crate::algebra::LieAlgebra;
use crate::error::HomflowError;
use crate::scalar::{Scalar, ScalarMode};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
struct RawAlgebraFile {
    dim: usize,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(default)]
    brackets: Vec<RawBracket>,
    #[serde(default)]
    subalgebra: Option<Vec<Vec<toml::Value>>>,
}

#[derive(Debug, Deserialize)]
struct RawBracket {
    a: usize,
    b: usize,
    c: usize,
    value: String,
}

/// A parsed algebra file: the algebra plus an optional subalgebra basis.
#[derive(Debug)]
pub struct AlgebraSpec {
    pub algebra: LieAlgebra,
    pub subalgebra: Option<Vec<Vec<Scalar>>>,
}

/// A value string split into coefficient and parameter factor.
struct ParsedValue {
    rational: Option<BigRational>,
    float: f64,
    uses_param: bool,
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.trim().parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

fn parse_value(s: &str, params: &BTreeMap<String, f64>) -> Result<ParsedValue, HomflowError> {
    let err = |msg: &str| HomflowError::Parse(format!("value '{s}': {msg}"));
    let mut rest = s.trim();
    let mut sign = 1.0;
    let mut neg = false;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1.0;
        neg = true;
        rest = r.trim_start();
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    // Split an optional parameter factor off the end: `coef`, `param^k`,
    // or `coef*param^k`.
    let (coef_str, param_str) = match rest.split_once('*') {
        Some((c, p)) => (c.trim(), Some(p.trim())),
        None => {
            if rest.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                ("1", Some(rest))
            } else {
                (rest, None)
            }
        }
    };
    let param_factor = match param_str {
        None => None,
        Some(p) => {
            let (name, pow) = match p.split_once('^') {
                Some((n, k)) => {
                    let k: u32 = k
                        .trim()
                        .parse()
                        .map_err(|_| err("bad exponent"))?;
                    (n.trim(), k)
                }
                None => (p, 1),
            };
            let base = params
                .get(name)
                .copied()
                .ok_or_else(|| err(&format!("unknown parameter '{name}'")))?;
            Some(base.powi(pow as i32))
        }
    };
    if coef_str.is_empty() {
        return Err(err("empty coefficient"));
    }
    let rational = parse_rational(coef_str);
    let coef_float = match &rational {
        Some(r) => crate::scalar::rational_to_f64(r),
        None => coef_str
            .parse::<f64>()
            .map_err(|_| err("not a rational, decimal, or parameter expression"))?,
    };
    // A decimal literal or parameter reference forces floating mode.
    let is_decimal = rational.is_none();
    Ok(ParsedValue {
        rational: if param_factor.is_none() && !is_decimal {
            rational.map(|r| if neg { -r } else { r })
        } else {
            None
        },
        float: sign * coef_float * param_factor.unwrap_or(1.0),
        uses_param: param_factor.is_some() || is_decimal,
    })
}

fn subalgebra_entry(v: &toml::Value, mode: ScalarMode) -> Result<Scalar, HomflowError> {
    let err = || HomflowError::Parse(format!("bad subalgebra entry '{v}'"));
    let as_f64 = match v {
        toml::Value::Integer(i) => *i as f64,
        toml::Value::Float(f) => *f,
        toml::Value::String(s) => {
            if let Some(r) = parse_rational(s) {
                if mode == ScalarMode::Exact {
                    return Ok(Scalar::Exact(r));
                }
                crate::scalar::rational_to_f64(&r)
            } else {
                s.parse::<f64>().map_err(|_| err())?
            }
        }
        _ => return Err(err()),
    };
    match mode {
        ScalarMode::Float => Ok(Scalar::Float(as_f64)),
        ScalarMode::Exact => {
            // Integers arrive exactly; anything else must be a rational
            // string in exact mode.
            if let toml::Value::Integer(i) = v {
                Ok(Scalar::from_int(*i))
            } else {
                Err(HomflowError::Parse(format!(
                    "subalgebra entry '{v}' is not exact; use an integer or \"p/q\" string"
                )))
            }
        }
    }
}

/// Parse an algebra specification from TOML text.
pub fn parse_algebra_file(text: &str) -> Result<AlgebraSpec, HomflowError> {
    let raw: RawAlgebraFile =
        toml::from_str(text).map_err(|e| HomflowError::Parse(e.to_string()))?;
    if raw.dim == 0 {
        return Err(HomflowError::Parse("dim must be positive".into()));
    }
    let parsed: Vec<(usize, usize, usize, ParsedValue)> = raw
        .brackets
        .iter()
        .map(|b| {
            for (name, idx) in [("a", b.a), ("b", b.b), ("c", b.c)] {
                if idx == 0 || idx > raw.dim {
                    return Err(HomflowError::Parse(format!(
                        "bracket index {name} = {idx} outside 1..={}",
                        raw.dim
                    )));
                }
            }
            Ok((b.a, b.b, b.c, parse_value(&b.value, &raw.params)?))
        })
        .collect::<Result<_, _>>()?;
    let mode = if parsed.iter().all(|(_, _, _, v)| !v.uses_param && v.rational.is_some()) {
        ScalarMode::Exact
    } else {
        ScalarMode::Float
    };
    let entries: Vec<(usize, usize, usize, Scalar)> = parsed
        .into_iter()
        .map(|(a, b, c, v)| {
            let s = match mode {
                ScalarMode::Exact => Scalar::Exact(v.rational.expect("checked rational")),
                ScalarMode::Float => Scalar::Float(v.float),
            };
            (a, b, c, s)
        })
        .collect();
    let algebra = LieAlgebra::new(raw.dim, &entries)?;
    let subalgebra = match raw.subalgebra {
        None => None,
        Some(rows) => {
            let mut basis = Vec::with_capacity(rows.len());
            for row in &rows {
                if row.len() != raw.dim {
                    return Err(HomflowError::Parse(format!(
                        "subalgebra vector has {} entries, expected {}",
                        row.len(),
                        raw.dim
                    )));
                }
                basis.push(
                    row.iter()
                        .map(|v| subalgebra_entry(v, mode))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            Some(basis)
        }
    };
    Ok(AlgebraSpec { algebra, subalgebra })
}

/// Parse a subalgebra given on the command line: vectors separated by
/// `;`, entries by `,`, e.g. `0,0,0,0,1`.
pub fn parse_subalgebra_arg(s: &str, dim: usize, mode: ScalarMode) -> Result<Vec<Vec<Scalar>>, HomflowError> {
    let mut basis = Vec::new();
    for vec_str in s.split(';') {
        let entries: Vec<&str> = vec_str.split(',').map(str::trim).collect();
        if entries.len() != dim {
            return Err(HomflowError::Parse(format!(
                "subalgebra vector '{vec_str}' has {} entries, expected {dim}",
                entries.len()
            )));
        }
        let mut row = Vec::with_capacity(dim);
        for e in entries {
            let scl = match mode {
                ScalarMode::Exact => Scalar::Exact(
                    parse_rational(e)
                        .ok_or_else(|| HomflowError::Parse(format!("bad entry '{e}'")))?,
                ),
                ScalarMode::Float => {
                    let v = if let Some(r) = parse_rational(e) {
                        crate::scalar::rational_to_f64(&r)
                    } else {
                        e.parse::<f64>()
                            .map_err(|_| HomflowError::Parse(format!("bad entry '{e}'")))?
                    };
                    Scalar::Float(v)
                }
            };
            row.push(scl);
        }
        basis.push(row);
    }
    Ok(basis)
}

/// Render a key=value block: one line, space-separated, insertion order.
/// Keys and values must not contain spaces or `=`.
pub fn write_kv(pairs: &[(String, String)]) -> String {
    pairs
        .iter()
        .map(|(k, v)| {
            debug_assert!(!k.contains([' ', '=']) && !v.contains([' ', '=']));
            format!("{k}={v}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse a key=value block produced by [`write_kv`].
pub fn parse_kv(line: &str) -> Result<Vec<(String, String)>, HomflowError> {
    line.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| HomflowError::Parse(format!("bad kv token '{tok}'")))
        })
        .collect()
}

/// Render a CSV table with the given header. Values print with Rust's
/// shortest round-trip float formatting (full double precision).
pub fn write_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let ncols = header.split(',').count();
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), ncols, "row width does not match header");
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// The Casimir-series CSV of the branch-jump reproduction.
pub fn write_casimir_csv(rows: &[crate::dynamics::CasimirRow]) -> String {
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| vec![r.t, r.k1, r.k2, r.k3_wrapped, r.k3_unwrapped])
        .collect();
    write_csv("t,K1,K2,K3_wrapped,K3_unwrapped", &data)
}
