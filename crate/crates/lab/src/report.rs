//! The JSON report envelope.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "tool": {"name": "kms", "version": "…"},
//!   "manifest": {command, argv, root_seed, inputs, request, verdicts, [timestamp_unix]},
//!   "assumptions": [...],
//!   "result": {"kind": …, …}
//! }
//! ```
//!
//! The schema ships as `schema/report.schema.json`. Reports carry no
//! timestamp unless asked for, so identical inputs give identical bytes.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::InputFile;
use crate::run::{execute, Outcome, Request, RunResult, VerdictEcho};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_NAME: &str = "kms";
pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub root_seed: Option<u64>,
    /// Input files as read, for the record; replays use `request`.
    pub inputs: Vec<InputFile>,
    pub request: Request,
    pub verdicts: Vec<VerdictEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub manifest: RunManifest,
    pub assumptions: Vec<String>,
    pub result: RunResult,
}

/// The part of a report needed to replay it; `result` is not parsed.
#[derive(Clone, Debug, Deserialize)]
pub struct ReportHeader {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub manifest: RunManifest,
}

pub fn assumptions(request: &Request) -> Vec<String> {
    let mut out = vec![
        "fields live on the periodic torus [0, 2π)^n, sampled on a uniform M^n grid".to_string(),
        "test fields have zero mean; every multiplier annihilates the zero frequency".to_string(),
        "L^p norms are grid Riemann sums; derivatives are spectral".to_string(),
        "classifier verdicts come from finite sphere samples and are evidence, not proofs".to_string(),
    ];
    match request {
        Request::Verify { .. } | Request::ProbeP1 { .. } | Request::DemoNecessity { .. } => {
            out.push("ratios estimate grid constants from below; they are not bounds".into());
            out.push("negative-order norms are implemented for p = 2 only".into());
        }
        Request::CrosscheckCurlRiesz { .. } => {
            out.push("the quadrature uses the whole-space kernel on a periodic field; agreement is approximate".into());
        }
        _ => {}
    }
    out
}

/// Runs `request` and wraps the result.
pub fn build_report(
    request: Request,
    argv: Vec<String>,
    inputs: Vec<InputFile>,
    timestamp_unix: Option<u64>,
) -> Result<(Report, Option<Vec<u8>>)> {
    let Outcome {
        result,
        verdicts,
        artifact,
    } = execute(&request)?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        manifest: RunManifest {
            command: request.command().to_string(),
            argv,
            root_seed: request.root_seed(),
            inputs,
            request: request.clone(),
            verdicts,
            timestamp_unix,
        },
        assumptions: assumptions(&request),
        result,
    };
    Ok((report, artifact))
}

pub fn to_json(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Re-runs a report's request, keeping its manifest as recorded. With a
/// deterministic request the result equals the original byte for byte.
pub fn replay(header: &ReportHeader) -> Result<(Report, Option<Vec<u8>>)> {
    let m = &header.manifest;
    build_report(m.request.clone(), m.argv.clone(), m.inputs.clone(), m.timestamp_unix)
}

pub fn parse_header(name: &str, text: &str) -> Result<ReportHeader> {
    serde_json::from_str(text).map_err(|e| crate::LabError::parse(format!("{name}:{}", e.line()), e.to_string()))
}
