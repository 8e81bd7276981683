//! Inequality run files (`.cfg`, TOML).
//!
//! ```toml
//! inequality = "kms_sym"
//! p = 2.0
//! grid = 16
//! operator = "curl3"        # catalog name; or operator_file = "curl3.op"
//! partmap = "sym"           # catalog name; or partmap_file = "a.toml"
//! n = 3                     # dimension for catalog operators (default 3)
//! correction = false
//! sizes = [8, 16, 32]       # optional: run a refinement study instead
//! seed = 7                  # optional: default root seed
//!
//! [family]
//! random_trials = 50
//! ```
//!
//! `operator_file` and `partmap_file` are resolved relative to the run
//! file; their contents are returned so reports can embed them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use super::spec::{at, parse_operator_file, parse_partmap_file, toml_error, OperatorSource, PartMapSource};
use crate::error::{LabError, Result};
use crate::verifier::{FieldFamily, InequalityId, INEQUALITY_NAMES};

/// A file read while resolving inputs, kept verbatim for the manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub contents: String,
}

pub fn read_input(path: &Path) -> Result<InputFile> {
    let contents = std::fs::read_to_string(path).map_err(|e| LabError::io(path.display().to_string(), e))?;
    Ok(InputFile {
        path: path.display().to_string(),
        contents,
    })
}

/// A run file with every reference resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub inequality: InequalityId,
    pub operator: OperatorSource,
    pub partmap: Option<PartMapSource>,
    pub p: f64,
    pub grid: usize,
    pub correction: bool,
    pub family: FieldFamily,
    pub sizes: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    inequality: Spanned<String>,
    p: f64,
    grid: usize,
    operator: Option<Spanned<String>>,
    operator_file: Option<Spanned<String>>,
    n: Option<usize>,
    partmap: Option<String>,
    partmap_file: Option<Spanned<String>>,
    #[serde(default)]
    correction: bool,
    #[serde(default)]
    family: FieldFamily,
    sizes: Option<Vec<usize>>,
    seed: Option<u64>,
}

/// Parses a run file. Returns the resolved spec and every referenced file.
pub fn parse_run_file(path: &Path) -> Result<(RunSpec, Vec<InputFile>)> {
    let main = read_input(path)?;
    let file = main.path.clone();
    let text = main.contents.clone();
    let raw: RawRun = toml::from_str(&text).map_err(|e| toml_error(&file, &text, e))?;
    let inequality = InequalityId::parse(raw.inequality.get_ref()).ok_or_else(|| {
        LabError::parse(
            at(&file, &text, raw.inequality.span(), "inequality"),
            format!(
                "unknown inequality `{}`; expected one of {}",
                raw.inequality.get_ref(),
                INEQUALITY_NAMES.join(", ")
            ),
        )
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let mut inputs = vec![main];
    let operator = match (&raw.operator, &raw.operator_file) {
        (Some(name), None) => OperatorSource::catalog(name.get_ref(), raw.n.unwrap_or(3)),
        (None, Some(rel)) => {
            let f = read_input(&base.join(rel.get_ref())).map_err(|e| {
                LabError::parse(at(&file, &text, rel.span(), "operator_file"), e.to_string())
            })?;
            let src = parse_operator_file(&f.path, &f.contents)?;
            inputs.push(f);
            src
        }
        _ => return Err(LabError::parse(&file, "give exactly one of `operator` and `operator_file`")),
    };
    let partmap = match (&raw.partmap, &raw.partmap_file) {
        (Some(name), None) => Some(PartMapSource::catalog(name)),
        (None, Some(rel)) => {
            let f = read_input(&base.join(rel.get_ref())).map_err(|e| {
                LabError::parse(at(&file, &text, rel.span(), "partmap_file"), e.to_string())
            })?;
            let src = parse_partmap_file(&f.path, &f.contents)?;
            inputs.push(f);
            Some(src)
        }
        (None, None) => None,
        _ => return Err(LabError::parse(&file, "give at most one of `partmap` and `partmap_file`")),
    };
    Ok((
        RunSpec {
            inequality,
            operator,
            partmap,
            p: raw.p,
            grid: raw.grid,
            correction: raw.correction,
            family: raw.family,
            sizes: raw.sizes,
            seed: raw.seed,
        },
        inputs,
    ))
}
