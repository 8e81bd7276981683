//! Operator and part-map descriptions, as read from `.op` files or named on
//! the command line.
//!
//! An operator file is TOML. Either it names a catalog entry:
//!
//! ```toml
//! name = "curl3"
//! catalog = "curl_matrix_rowwise"
//! n = 3
//! ```
//!
//! or it lists coefficients explicitly, one `[[coeff]]` table per
//! multi-index, with the `l × d` matrix given as `l` rows of `d` numbers:
//!
//! ```toml
//! name = "grad2"
//! n = 2
//! d = 1
//! l = 2
//! k = 1
//!
//! [[coeff]]
//! alpha = [1, 0]
//! matrix = [[1.0], [0.0]]
//!
//! [[coeff]]
//! alpha = [0, 1]
//! matrix = [[0.0], [1.0]]
//! ```
//!
//! Unknown keys are rejected. Errors carry the file name and line.

use std::ops::Range;

use kms_core::{catalog_operator, catalog_partmap_with_dim, DMatrix, MultiIndex, OperatorSpec, PartMap};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{LabError, Result};

/// One `(α, B_α)` pair; `matrix` is row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub alpha: Vec<u32>,
    pub matrix: Vec<Vec<f64>>,
}

/// A resolved operator description. Replays rebuild the operator from this
/// alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum OperatorSource {
    Catalog {
        name: String,
        catalog: String,
        n: usize,
    },
    Explicit {
        name: String,
        n: usize,
        d: usize,
        l: usize,
        k: u32,
        coeff: Vec<CoefficientEntry>,
    },
}

/// Short names accepted wherever a catalog operator is expected.
pub fn operator_alias(name: &str) -> &str {
    match name {
        "curl3" | "curl" | "Curl" => "curl_matrix_rowwise",
        "grad" => "gradient",
        "eps" | "sym_grad" => "sym_gradient",
        "div" => "divergence",
        other => other,
    }
}

impl OperatorSource {
    pub fn catalog(name: &str, n: usize) -> Self {
        OperatorSource::Catalog {
            name: name.to_string(),
            catalog: operator_alias(name).to_string(),
            n,
        }
    }

    pub fn build(&self) -> Result<OperatorSpec> {
        match self {
            OperatorSource::Catalog { catalog, n, .. } => Ok(catalog_operator(catalog, *n)?),
            OperatorSource::Explicit {
                name,
                n,
                d,
                l,
                k,
                coeff,
            } => {
                let mut pairs = Vec::with_capacity(coeff.len());
                for c in coeff {
                    let flat: Vec<f64> = c.matrix.iter().flatten().copied().collect();
                    if c.matrix.len() != *l || flat.len() != l * d {
                        return Err(LabError::parse(
                            format!("operator `{name}`"),
                            format!("coefficient for {:?} is not {l} × {d}", c.alpha),
                        ));
                    }
                    pairs.push((MultiIndex::new(c.alpha.clone()), DMatrix::from_row_slice(*l, *d, &flat)));
                }
                Ok(OperatorSpec::new(name.clone(), *n, *d, *l, *k, pairs)?)
            }
        }
    }
}

/// A part map named from the catalog or given by its matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum PartMapSource {
    Catalog { name: String },
    Explicit { name: String, matrix: Vec<Vec<f64>> },
}

impl PartMapSource {
    pub fn catalog(name: &str) -> Self {
        PartMapSource::Catalog { name: name.to_string() }
    }

    /// Builds the map acting on `ℝ^d` for an operator in dimension `n`.
    pub fn build(&self, n: usize, d: usize) -> Result<PartMap> {
        match self {
            PartMapSource::Catalog { name } => Ok(catalog_partmap_with_dim(name, n, d)?),
            PartMapSource::Explicit { name, matrix } => {
                let rows = matrix.len();
                if rows == 0 || matrix.iter().any(|r| r.len() != d) {
                    return Err(LabError::parse(
                        format!("part map `{name}`"),
                        format!("every row must have d = {d} entries"),
                    ));
                }
                let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
                Ok(PartMap::new(name.clone(), DMatrix::from_row_slice(rows, d, &flat))?)
            }
        }
    }

    pub fn name(&self) -> &str {
        match self {
            PartMapSource::Catalog { name } | PartMapSource::Explicit { name, .. } => name,
        }
    }
}

/// 1-based line of a byte offset.
pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

pub(crate) fn at(file: &str, text: &str, span: Range<usize>, field: &str) -> String {
    format!("{file}:{}: field `{field}`", line_of(text, span.start))
}

pub(crate) fn toml_error(file: &str, text: &str, e: toml::de::Error) -> LabError {
    let location = match e.span() {
        Some(span) => format!("{file}:{}", line_of(text, span.start)),
        None => file.to_string(),
    };
    LabError::parse(location, e.message().trim().to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    alpha: Spanned<Vec<u32>>,
    matrix: Spanned<Vec<Spanned<Vec<f64>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperatorFile {
    name: Option<String>,
    catalog: Option<Spanned<String>>,
    n: Spanned<usize>,
    d: Option<Spanned<usize>>,
    l: Option<Spanned<usize>>,
    k: Option<Spanned<u32>>,
    #[serde(default)]
    coeff: Vec<Spanned<RawCoefficient>>,
}

/// Parses an operator file. `file` is only used in messages.
pub fn parse_operator_file(file: &str, text: &str) -> Result<OperatorSource> {
    let raw: RawOperatorFile = toml::from_str(text).map_err(|e| toml_error(file, text, e))?;
    let n = *raw.n.get_ref();
    let name = raw.name.clone().unwrap_or_else(|| {
        std::path::Path::new(file)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "operator".into())
    });
    if let Some(cat) = &raw.catalog {
        if !raw.coeff.is_empty() || raw.d.is_some() || raw.l.is_some() || raw.k.is_some() {
            return Err(LabError::parse(
                at(file, text, cat.span(), "catalog"),
                "`catalog` excludes `d`, `l`, `k` and `[[coeff]]`",
            ));
        }
        let src = OperatorSource::Catalog {
            name,
            catalog: operator_alias(cat.get_ref()).to_string(),
            n,
        };
        src.build()
            .map_err(|e| LabError::parse(at(file, text, cat.span(), "catalog"), e.to_string()))?;
        return Ok(src);
    }
    let need = |v: &Option<Spanned<usize>>, key: &str| -> Result<usize> {
        v.as_ref()
            .map(|s| *s.get_ref())
            .ok_or_else(|| LabError::parse(file, format!("missing field `{key}` (or give `catalog`)")))
    };
    let d = need(&raw.d, "d")?;
    let l = need(&raw.l, "l")?;
    let k = *raw
        .k
        .as_ref()
        .ok_or_else(|| LabError::parse(file, "missing field `k` (or give `catalog`)"))?
        .get_ref();
    if raw.coeff.is_empty() {
        return Err(LabError::parse(file, "no `[[coeff]]` entries"));
    }
    let mut coeff = Vec::with_capacity(raw.coeff.len());
    for entry in &raw.coeff {
        let c = entry.get_ref();
        let alpha = c.alpha.get_ref();
        if alpha.len() != n || alpha.iter().sum::<u32>() != k {
            return Err(LabError::parse(
                at(file, text, c.alpha.span(), "alpha"),
                format!("multi-index {alpha:?} must have {n} entries summing to k = {k}"),
            ));
        }
        let rows = c.matrix.get_ref();
        if rows.len() != l {
            // point at the closing bracket when rows are missing
            let span = c.matrix.span();
            return Err(LabError::parse(
                at(file, text, span.end.saturating_sub(1)..span.end, "matrix"),
                format!("coefficient for {alpha:?} has {} rows, expected l = {l}", rows.len()),
            ));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.get_ref().len() != d {
                return Err(LabError::parse(
                    at(file, text, row.span(), "matrix"),
                    format!(
                        "row {r} of coefficient {alpha:?} has {} entries, expected d = {d}",
                        row.get_ref().len()
                    ),
                ));
            }
        }
        coeff.push(CoefficientEntry {
            alpha: alpha.clone(),
            matrix: rows.iter().map(|r| r.get_ref().clone()).collect(),
        });
    }
    let src = OperatorSource::Explicit {
        name,
        n,
        d,
        l,
        k,
        coeff,
    };
    src.build().map_err(|e| LabError::parse(file, e.to_string()))?;
    Ok(src)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartMapFile {
    name: Option<String>,
    matrix: Vec<Vec<f64>>,
}

/// Parses a part-map file: `name` and `matrix` (rows of `d` numbers).
pub fn parse_partmap_file(file: &str, text: &str) -> Result<PartMapSource> {
    let raw: RawPartMapFile = toml::from_str(text).map_err(|e| toml_error(file, text, e))?;
    Ok(PartMapSource::Explicit {
        name: raw.name.unwrap_or_else(|| "A".into()),
        matrix: raw.matrix,
    })
}
