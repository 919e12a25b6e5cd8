//! File formats: charge-matrix JSON input, run reports, and serde helpers
//! that write rationals as `"p/q"` strings.

use std::path::Path;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::algebra::{parse_rational, CentralCharges};
use crate::{Error, Result};

pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn ser_rationals<S: Serializer>(rs: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ToString::to_string))
}

/// Float tolerance for antisymmetry of non-rational entries.
pub const FLOAT_ANTISYM_TOL: f64 = 1e-12;

/// A parsed charge file. Float entries are converted to the exact rational
/// value of the binary float; the strictly-lower triangle is then replaced by
/// the negated upper triangle, so the stored matrix is exactly antisymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargeFile {
    pub charges: CentralCharges,
    /// True when every entry was an integer or a `"p/q"` string.
    pub exact: bool,
}

impl ChargeFile {
    pub fn n(&self) -> usize {
        self.charges.n()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        self.charges.to_f64()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("malformed JSON: {e}")))?;
        let n = doc
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("field `n` must be a positive integer".into()))? as usize;
        if n == 0 {
            return Err(Error::Parse("field `n` must be a positive integer".into()));
        }
        if n % 2 == 1 {
            return Err(Error::OddDimension(n));
        }
        let alpha = doc.get("alpha").and_then(Value::as_array).ok_or_else(|| Error::Parse("field `alpha` must be an array".into()))?;
        let flat: Vec<&Value> = if alpha.iter().all(Value::is_array) {
            if alpha.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: alpha.len() });
            }
            let mut out = Vec::with_capacity(n * n);
            for row in alpha {
                let row = row.as_array().expect("checked above");
                if row.len() != n {
                    return Err(Error::LengthMismatch { expected: n, got: row.len() });
                }
                out.extend(row);
            }
            out
        } else {
            alpha.iter().collect()
        };
        if flat.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, got: flat.len() });
        }

        let mut exact = true;
        let mut entries = Vec::with_capacity(n * n);
        let mut floats = Vec::with_capacity(n * n);
        for v in flat {
            let (r, f, is_exact) = entry(v)?;
            exact &= is_exact;
            entries.push(r);
            floats.push(f);
        }
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (i * n + j, j * n + i);
                if i == j {
                    if floats[a].abs() > FLOAT_ANTISYM_TOL || (exact && !entries[a].is_zero()) {
                        return Err(Error::NotAntisymmetric { row: i, col: j });
                    }
                } else if exact {
                    if entries[a] != -entries[b].clone() {
                        return Err(Error::NotAntisymmetric { row: i, col: j });
                    }
                } else if (floats[a] + floats[b]).abs() > FLOAT_ANTISYM_TOL * floats[a].abs().max(1.0) {
                    return Err(Error::NotAntisymmetric { row: i, col: j });
                }
                if i < j {
                    rows[i][j] = entries[a].clone();
                    rows[j][i] = -entries[a].clone();
                }
            }
        }
        Ok(ChargeFile { charges: CentralCharges::new(rows)?, exact })
    }

    pub fn read(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))?;
        Ok((Self::parse(text)?, bytes))
    }
}

fn entry(v: &Value) -> Result<(BigRational, f64, bool)> {
    match v {
        Value::String(s) => {
            let r = parse_rational(s)?;
            let f = crate::algebra::rational_to_f64(&r);
            Ok((r, f, true))
        }
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Ok((BigRational::from_integer(BigInt::from(i)), i as f64, true))
            } else {
                let f = num.as_f64().ok_or_else(|| Error::Parse(format!("bad number {num}")))?;
                let r = BigRational::from_float(f).ok_or_else(|| Error::Parse(format!("non-finite entry {num}")))?;
                Ok((r, f, false))
            }
        }
        other => Err(Error::Parse(format!("entry {other} is neither a number nor a \"p/q\" string"))),
    }
}

/// Envelope shared by every subcommand. `timing` is the only field that
/// varies between identical runs.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub subcommand: &'static str,
    pub input_digest: String,
    pub parameters: Value,
    pub results: Value,
    pub residuals: Value,
    pub pass: bool,
    pub checks: Vec<(String, bool)>,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub wall_clock_s: f64,
}

/// SHA-256 over the raw input bytes followed by the canonical parameter JSON.
pub fn input_digest(input: &[u8], parameters: &Value) -> String {
    let mut h = Sha256::new();
    h.update(input);
    h.update(parameters.to_string().as_bytes());
    hex::encode(h.finalize())
}

/// Report JSON with `timing` removed; what golden comparisons see.
pub fn strip_timing(report: &str) -> Result<Value> {
    let mut v: Value = serde_json::from_str(report).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing");
    }
    Ok(v)
}
