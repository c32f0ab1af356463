//! File formats and number formatting.
//!
//! Operators are stored as `d x d` nested arrays of `[re, im]` pairs:
//!
//! ```text
//! ensemble: { "dim": d, "priors": [p_1, ..., p_N], "states": [S_1, ..., S_N] }
//! povm:     { "dim": d, "elements": [M_0, ..., M_N] }
//! ```
//!
//! Loading distinguishes malformed input (bad JSON, wrong shapes) from
//! content that parses but fails a mathematical check (Hermiticity), so the
//! command line can report them with different exit codes.

use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ensemble::StateEnsemble;
use crate::hermitian::HermitianOperator;
use crate::solver::Povm;

/// One complex entry as `[re, im]`.
pub type Entry = [f64; 2];
/// A `d x d` operator in the file convention.
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("bad shape: {0}")]
    Shape(String),

    /// Parsed fine but the content is mathematically invalid.
    #[error("{0}")]
    Content(#[from] crate::Error),
}

impl FormatError {
    /// True for unreadable or structurally malformed input.
    pub fn is_parse_error(&self) -> bool {
        !matches!(self, FormatError::Content(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dim: usize,
    pub priors: Vec<f64>,
    pub states: Vec<MatrixRows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub dim: usize,
    pub elements: Vec<MatrixRows>,
}

fn to_matrix(rows: &MatrixRows, dim: usize, what: &str) -> Result<DMatrix<Complex64>, FormatError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(FormatError::Shape(format!("{what} is not {dim}x{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn to_operators(
    mats: &[MatrixRows],
    dim: usize,
    label: &str,
) -> Result<Vec<HermitianOperator>, FormatError> {
    if dim == 0 {
        return Err(FormatError::Shape("dim must be >= 1".into()));
    }
    mats.iter()
        .enumerate()
        .map(|(k, rows)| {
            let m = to_matrix(rows, dim, &format!("{label} {k}"))?;
            Ok(HermitianOperator::new(m)?)
        })
        .collect()
}

pub fn operator_rows(op: &HermitianOperator) -> MatrixRows {
    let m = op.matrix();
    (0..op.dim())
        .map(|i| {
            (0..op.dim())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

impl EnsembleFile {
    /// Builds the ensemble without checking priors, traces or positivity;
    /// call [`StateEnsemble::validate`] for the report.
    pub fn to_unchecked(&self) -> Result<StateEnsemble, FormatError> {
        let states = to_operators(&self.states, self.dim, "state")?;
        Ok(StateEnsemble::from_parts_unchecked(
            states,
            self.priors.clone(),
        ))
    }

    pub fn to_ensemble(&self) -> Result<StateEnsemble, FormatError> {
        let states = to_operators(&self.states, self.dim, "state")?;
        Ok(StateEnsemble::new(states, self.priors.clone())?)
    }

    pub fn from_ensemble(e: &StateEnsemble) -> Self {
        Self {
            dim: e.dim(),
            priors: e.priors().to_vec(),
            states: e.states().iter().map(operator_rows).collect(),
        }
    }
}

impl PovmFile {
    /// Elements are checked for Hermiticity only; closure and positivity are
    /// left to [`Povm::check`].
    pub fn to_unchecked(&self) -> Result<Povm, FormatError> {
        let elements = to_operators(&self.elements, self.dim, "element")?;
        if elements.is_empty() {
            return Err(FormatError::Shape("no POVM elements".into()));
        }
        Ok(Povm::from_elements_unchecked(elements))
    }

    pub fn from_povm(p: &Povm) -> Self {
        Self {
            dim: p.dim(),
            elements: p.elements().iter().map(operator_rows).collect(),
        }
    }
}

/// Raw bytes of a file, with the read error tagged by path.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>, FormatError> {
    std::fs::read(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_ensemble(bytes: &[u8]) -> Result<EnsembleFile, FormatError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn parse_povm(bytes: &[u8]) -> Result<PovmFile, FormatError> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Lowercase hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A float with 17 significant digits, which round-trips exactly.
/// Non-finite values print as `NaN`, `inf` and `-inf`.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of the output
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// serde_json formatter that writes every float with 17 significant digits.
struct FullPrecision<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// Pretty JSON with full-precision floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FullPrecision(Default::default()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::symmetric_qubit_pair;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            0.8535533905932737,
            1e-300,
            -2.5e17,
            f64::MIN_POSITIVE,
        ] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(format_f64(-0.0), format_f64(0.0));
    }

    #[test]
    fn json_uses_full_precision() {
        let s =
            to_json_string(&serde_json::json!({"x": 0.1, "n": 3, "v": [1.0, f64::NAN]})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn ensemble_round_trip() {
        let e = symmetric_qubit_pair(0.9, 0.6).unwrap();
        let file = EnsembleFile::from_ensemble(&e);
        let text = to_json_string(&file).unwrap();
        let back = parse_ensemble(text.as_bytes())
            .unwrap()
            .to_ensemble()
            .unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn shape_and_content_errors_differ() {
        let bad_shape = br#"{"dim": 2, "priors": [1.0], "states": [[[[1,0]]]]}"#;
        let err = parse_ensemble(bad_shape)
            .unwrap()
            .to_ensemble()
            .unwrap_err();
        assert!(err.is_parse_error(), "{err}");

        let non_hermitian = br#"{"dim": 2, "priors": [1.0],
            "states": [[[[0.5,0],[0.3,0]],[[0.0,0],[0.5,0]]]]}"#;
        let err = parse_ensemble(non_hermitian)
            .unwrap()
            .to_ensemble()
            .unwrap_err();
        assert!(!err.is_parse_error(), "{err}");

        assert!(parse_ensemble(b"{not json").unwrap_err().is_parse_error());
        assert!(parse_ensemble(br#"{"dim": 2}"#)
            .unwrap_err()
            .is_parse_error());
    }

    #[test]
    fn unchecked_load_keeps_bad_priors() {
        let text = br#"{"dim": 1, "priors": [0.5, 0.6], "states": [[[[1,0]]], [[[1,0]]]]}"#;
        let e = parse_ensemble(text).unwrap().to_unchecked().unwrap();
        assert!(!e.validate().is_valid());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
