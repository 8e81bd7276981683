//! The `kms` command line.
//!
//! Exit status: 0 on success, 1 when a precondition fails (the classifier
//! contradicts the requested run, or a replay does not reproduce), 2 for
//! malformed inputs or flags.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{LabError, Result};
use crate::formats::{
    parse_operator_file, parse_partmap_file, parse_run_file, read_input, write_file, InputFile, OperatorSource,
    PartMapSource,
};
use crate::report::{build_report, parse_header, replay, to_json, Report};
use crate::run::{FieldSpec, MultiplierKind, Request, RunResult};
use crate::torus::Envelope;
use crate::verifier::{CrosscheckMode, FieldFamily, NecessityOutcome};

/// Environment variable with the worker count. Affects speed only.
pub const WORKERS_ENV: &str = "KMS_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "kms", version, about = "Symbol classification and KMS inequality checks on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the wall-clock time in the manifest (reports then differ
    /// between runs).
    #[arg(long)]
    timestamp: bool,
    /// No human-readable summary on stderr.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify an operator (optionally restricted to ker 𝒜).
    Classify {
        /// Operator file (.op).
        #[arg(long)]
        spec: PathBuf,
        /// Restrict to the kernel of this part map (catalog name or file).
        #[arg(long = "on-kernel-of", value_name = "PARTMAP")]
        on_kernel_of: Option<String>,
        #[arg(long, default_value_t = kms_core::sampling::DEFAULT_SAMPLE_COUNT)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = kms_core::RANK_TOL)]
        tol: f64,
        /// Also decide ℂ-ellipticity.
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Estimate an inequality constant from a run file.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Number of random band-limited fields (overrides the run file).
        #[arg(long)]
        trials: Option<usize>,
        /// Root seed (overrides the run file; default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Grid sizes for a refinement study, e.g. 8,16,32.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[command(flatten)]
        output: Output,
    },
    /// Demonstrations.
    Demo {
        #[command(subcommand)]
        which: DemoCommand,
    },
    /// Cross-checks against closed forms.
    Crosscheck {
        #[command(subcommand)]
        which: CrosscheckCommand,
    },
    /// Boundedness probes.
    Probe {
        #[command(subcommand)]
        which: ProbeCommand,
    },
    /// Test-field generation.
    Field {
        #[command(subcommand)]
        which: FieldCommand,
    },
    /// Grid multiplier dumps.
    Multiplier {
        #[command(subcommand)]
        which: MultiplierCommand,
    },
    /// Re-run the request recorded in a report.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        /// Fail (exit 1) unless the new report equals the old one byte for byte.
        #[arg(long)]
        check: bool,
        /// Where to write a regenerated binary dump, if the run makes one.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    /// Show that the correction term cannot be dropped.
    Necessity {
        /// Part map 𝒜 (catalog name or file).
        #[arg(long = "A", value_name = "PARTMAP")]
        a: String,
        /// Operator B (catalog name, alias such as curl3, or .op file).
        #[arg(long = "B", value_name = "OPERATOR")]
        b: String,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Dimension for catalog operators.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Symbol,
    Quadrature,
}

#[derive(Subcommand, Debug)]
enum CrosscheckCommand {
    /// Curl correction for 𝒜 = tr against its Riesz-kernel closed form.
    CurlRiesz {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Points per axis (default 16 for symbol, 32 for quadrature).
        #[arg(long)]
        grid: Option<usize>,
        /// Bump radius.
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        /// Distance of the evaluation points from the bump centre
        /// (default: half the width).
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand, Debug)]
enum ProbeCommand {
    /// korn_const at p = 1 across grid sizes.
    P1 {
        #[arg(long = "A", value_name = "PARTMAP")]
        a: String,
        #[arg(long = "B", value_name = "OPERATOR")]
        b: String,
        #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GeneratorArg {
    Random,
    PlaneWave,
    Bump,
}

#[derive(Subcommand, Debug)]
enum FieldCommand {
    /// Write a test field as a KMSF file.
    Gen {
        #[arg(long, value_enum)]
        generator: GeneratorArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        grid: usize,
        /// Fiber dimension (random fields).
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Band limit (random fields; default M/4).
        #[arg(long)]
        cutoff: Option<usize>,
        /// Frequency (plane waves), e.g. 1,0,0.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        xi: Option<Vec<i64>>,
        /// Amplitude vector (plane waves and bumps).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        amplitude: Option<Vec<f64>>,
        /// Bump or envelope centre (default π in every coordinate).
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<f64>>,
        /// Bump radius.
        #[arg(long, default_value_t = 0.8)]
        width: f64,
        /// Envelope concentration for plane waves (none if absent).
        #[arg(long)]
        envelope: Option<f64>,
        /// KMSF output file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Operator,
    Projection,
    Correction,
    Reconstruction,
}

#[derive(Subcommand, Debug)]
enum MultiplierCommand {
    /// Write a grid multiplier as a KMSM file.
    Dump {
        #[arg(long = "B", value_name = "OPERATOR")]
        b: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "A", value_name = "PARTMAP")]
        a: Option<String>,
        /// Multi-index for the reconstruction, e.g. 1,0,0.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<u32>>,
        #[arg(long)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// KMSM output file.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

fn looks_like_path(s: &str) -> bool {
    s.contains('/') || s.contains('.') || Path::new(s).is_file()
}

fn resolve_operator(arg: &str, n: usize, inputs: &mut Vec<InputFile>) -> Result<OperatorSource> {
    if looks_like_path(arg) {
        let f = read_input(Path::new(arg))?;
        let src = parse_operator_file(&f.path, &f.contents)?;
        inputs.push(f);
        Ok(src)
    } else {
        let src = OperatorSource::catalog(arg, n);
        src.build()
            .map_err(|e| LabError::parse("--B", e.to_string()))?;
        Ok(src)
    }
}

fn resolve_partmap(arg: &str, inputs: &mut Vec<InputFile>) -> Result<PartMapSource> {
    if looks_like_path(arg) {
        let f = read_input(Path::new(arg))?;
        let src = parse_partmap_file(&f.path, &f.contents)?;
        inputs.push(f);
        Ok(src)
    } else if kms_core::catalog::PARTMAP_NAMES.contains(&arg) {
        Ok(PartMapSource::catalog(arg))
    } else {
        Err(LabError::parse(
            "--A",
            format!(
                "unknown part map `{arg}`; expected one of {} or a file",
                kms_core::catalog::PARTMAP_NAMES.join(", ")
            ),
        ))
    }
}

fn family_with_trials(trials: usize) -> FieldFamily {
    FieldFamily {
        random_trials: trials,
        ..FieldFamily::default()
    }
}

/// What the command line asked for, before execution.
struct Plan {
    request: Option<Request>,
    inputs: Vec<InputFile>,
    output: Output,
    dump: Option<PathBuf>,
    replay: Option<(PathBuf, bool)>,
}

fn plan(cli: Cli) -> Result<Plan> {
    let mut inputs = Vec::new();
    let simple = |request: Request, inputs: Vec<InputFile>, output: Output, dump: Option<PathBuf>| Plan {
        request: Some(request),
        inputs,
        output,
        dump,
        replay: None,
    };
    Ok(match cli.command {
        Command::Classify {
            spec,
            on_kernel_of,
            samples,
            seed,
            tol,
            complex,
            output,
        } => {
            let f = read_input(&spec)?;
            let operator = parse_operator_file(&f.path, &f.contents)?;
            inputs.push(f);
            let on_kernel_of = on_kernel_of.map(|a| resolve_partmap(&a, &mut inputs)).transpose()?;
            simple(
                Request::Classify {
                    operator,
                    on_kernel_of,
                    samples,
                    seed,
                    tol,
                    complex,
                },
                inputs,
                output,
                None,
            )
        }
        Command::Verify {
            config,
            trials,
            seed,
            sizes,
            output,
        } => {
            let (mut run, files) = parse_run_file(&config)?;
            if let Some(t) = trials {
                run.family.random_trials = t;
            }
            if sizes.is_some() {
                run.sizes = sizes;
            }
            let seed = seed.or(run.seed).unwrap_or(0);
            simple(Request::Verify { run, seed }, files, output, None)
        }
        Command::Demo {
            which: DemoCommand::Necessity {
                a,
                b,
                grid,
                p,
                n,
                output,
            },
        } => {
            let operator = resolve_operator(&b, n, &mut inputs)?;
            let partmap = resolve_partmap(&a, &mut inputs)?;
            simple(
                Request::DemoNecessity {
                    operator,
                    partmap,
                    grid,
                    p,
                },
                inputs,
                output,
                None,
            )
        }
        Command::Crosscheck {
            which:
                CrosscheckCommand::CurlRiesz {
                    mode,
                    grid,
                    width,
                    radius,
                    output,
                },
        } => {
            let mode = match mode {
                ModeArg::Symbol => CrosscheckMode::Symbol,
                ModeArg::Quadrature => CrosscheckMode::Quadrature,
            };
            let grid = grid.unwrap_or(match mode {
                CrosscheckMode::Symbol => 16,
                CrosscheckMode::Quadrature => 32,
            });
            simple(
                Request::CrosscheckCurlRiesz {
                    mode,
                    grid,
                    center: vec![std::f64::consts::PI; 3],
                    width,
                    radius: radius.unwrap_or(0.5 * width),
                    amplitude: default_bump_amplitude(),
                },
                inputs,
                output,
                None,
            )
        }
        Command::Probe {
            which:
                ProbeCommand::P1 {
                    a,
                    b,
                    sizes,
                    trials,
                    seed,
                    n,
                    output,
                },
        } => {
            let operator = resolve_operator(&b, n, &mut inputs)?;
            let partmap = resolve_partmap(&a, &mut inputs)?;
            simple(
                Request::ProbeP1 {
                    operator,
                    partmap,
                    sizes,
                    family: family_with_trials(trials),
                    seed,
                },
                inputs,
                output,
                None,
            )
        }
        Command::Field {
            which:
                FieldCommand::Gen {
                    generator,
                    n,
                    grid,
                    d,
                    seed,
                    cutoff,
                    xi,
                    amplitude,
                    center,
                    width,
                    envelope,
                    dump,
                    output,
                },
        } => {
            let center = center.unwrap_or_else(|| vec![std::f64::consts::PI; n]);
            let need_amp = || amplitude.clone().ok_or_else(|| LabError::parse("--amplitude", "required for this generator"));
            let field = match generator {
                GeneratorArg::Random => FieldSpec::RandomBandlimited {
                    d,
                    cutoff: cutoff.unwrap_or((grid / 4).max(1)),
                    seed,
                },
                GeneratorArg::PlaneWave => FieldSpec::PlaneWave {
                    xi: xi.ok_or_else(|| LabError::parse("--xi", "required for plane waves"))?,
                    v: need_amp()?,
                    envelope: envelope.map(|concentration| Envelope {
                        center: center.clone(),
                        concentration,
                    }),
                },
                GeneratorArg::Bump => FieldSpec::Bump {
                    center,
                    width,
                    v: need_amp()?,
                },
            };
            simple(Request::FieldGen { n, grid, field }, inputs, output, dump)
        }
        Command::Multiplier {
            which:
                MultiplierCommand::Dump {
                    b,
                    kind,
                    a,
                    alpha,
                    grid,
                    n,
                    dump,
                    output,
                },
        } => {
            let operator = resolve_operator(&b, n, &mut inputs)?;
            let partmap = a.map(|a| resolve_partmap(&a, &mut inputs)).transpose()?;
            let kind = match kind {
                KindArg::Operator => MultiplierKind::Operator,
                KindArg::Projection => MultiplierKind::Projection,
                KindArg::Correction => MultiplierKind::Correction,
                KindArg::Reconstruction => MultiplierKind::Reconstruction,
            };
            simple(
                Request::MultiplierDump {
                    operator,
                    kind,
                    partmap,
                    alpha,
                    grid,
                },
                inputs,
                output,
                dump,
            )
        }
        Command::Replay {
            manifest,
            check,
            dump,
            output,
        } => Plan {
            request: None,
            inputs,
            output,
            dump,
            replay: Some((manifest, check)),
        },
    })
}

/// Amplitude of the default cross-check bump: a fixed matrix with a
/// nonzero trace and a nonzero deviatoric part.
pub fn default_bump_amplitude() -> Vec<f64> {
    vec![1.0, 2.0, 0.0, -1.0, 0.5, 3.0, 0.0, -2.0, 1.5]
}

fn summary(report: &Report) -> String {
    match &report.result {
        RunResult::Classification(c) => {
            let r = &c.report;
            let on = c.on_kernel_of.as_ref().map(|a| format!(" on ker({a})")).unwrap_or_default();
            let mut s = format!(
                "{}{on}: elliptic={} constant_rank={} rank={} cancelling={}",
                r.operator,
                r.is_elliptic,
                r.is_constant_rank,
                r.common_rank.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
                r.is_cancelling
            );
            if let Some(ce) = &r.c_ellipticity {
                s.push_str(&format!(" c_elliptic={}", ce.is_c_elliptic));
            }
            s
        }
        RunResult::Estimate(e) => format!(
            "{}: max ratio {} (median {}) over {} trials, {} swept frequencies",
            e.config.inequality.name(),
            fmt_ratio(e.max_ratio),
            fmt_ratio(e.median_ratio),
            e.trial_count,
            e.swept_frequencies
        ),
        RunResult::Refinement(r) => format!(
            "max ratios {:?} at M = {:?}; growth {}",
            r.max_ratios().iter().map(|x| fmt_ratio(*x)).collect::<Vec<_>>(),
            r.sizes,
            fmt_ratio(r.growth)
        ),
        RunResult::Necessity(n) => match &n.outcome {
            NecessityOutcome::Demonstrated {
                witness,
                uncorrected,
                corrected,
                ..
            } => format!(
                "witness ξ = {:?}: uncorrected ratio {} (rhs {:.1e}), corrected lhs {:.1e}",
                witness.xi,
                fmt_ratio(uncorrected.sides.ratio),
                uncorrected.sides.rhs,
                corrected.sides.lhs
            ),
            NecessityOutcome::CorrectionUnnecessary { message } => message.clone(),
        },
        RunResult::Crosscheck(c) => format!("{:?} cross-check: max deviation {:.3e}", c.mode, c.max_deviation),
        RunResult::P1Probe(p) => format!(
            "p = 1 probe ({}): max ratios {:?}, growth {}",
            p.verdict,
            p.refinement.max_ratios().iter().map(|x| fmt_ratio(*x)).collect::<Vec<_>>(),
            fmt_ratio(p.refinement.growth)
        ),
        RunResult::Dump(d) => format!("{} dump, {} bytes, fnv1a64 {}", d.format, d.byte_len, d.fnv1a64),
    }
}

fn fmt_ratio(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn emit(report: &Report, artifact: Option<Vec<u8>>, plan: &Plan, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<String> {
    let json = to_json(report)?;
    match &plan.output.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => stdout
            .write_all(json.as_bytes())
            .map_err(|e| LabError::io("<stdout>", e))?,
    }
    if let (Some(path), Some(bytes)) = (&plan.dump, artifact) {
        write_file(path, &bytes)?;
    }
    if !plan.output.quiet {
        let _ = writeln!(stderr, "{}", summary(report));
    }
    Ok(json)
}

/// A finished run, not yet written anywhere.
struct Computed {
    plan: Plan,
    report: Report,
    artifact: Option<Vec<u8>>,
    /// For `replay --check`: the recorded report text.
    expected: Option<InputFile>,
}

fn compute(plan: Plan, argv: Vec<String>) -> Result<Computed> {
    if let Some((path, check)) = &plan.replay {
        let original = read_input(path)?;
        let header = parse_header(&original.path, &original.contents)?;
        let (report, artifact) = replay(&header)?;
        let expected = check.then_some(original);
        return Ok(Computed {
            plan,
            report,
            artifact,
            expected,
        });
    }
    let request = plan.request.clone().expect("non-replay plans carry a request");
    let stamp = plan.output.timestamp.then(now_unix);
    let (report, artifact) = build_report(request, argv, plan.inputs.clone(), stamp)?;
    Ok(Computed {
        plan,
        report,
        artifact,
        expected: None,
    })
}

fn finish(done: Computed, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let json = emit(&done.report, done.artifact, &done.plan, stdout, stderr)?;
    if let Some(original) = done.expected {
        if json != original.contents {
            let _ = writeln!(stderr, "replay of {} differs from the recorded report", original.path);
            return Ok(1);
        }
    }
    Ok(0)
}

/// Runs the CLI with explicit streams and worker count (`None`: rayon's
/// default). Returns the exit status.
pub fn run_with<I, T>(argv: I, workers: Option<usize>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{rendered}");
            }
            return code;
        }
    };
    // the program name is not part of the recorded argv
    let recorded: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let body = || plan(cli).and_then(|p| compute(p, recorded));
    let computed = match workers {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(body),
            Err(e) => Err(LabError::InvalidArgument(format!("cannot start {k} workers: {e}"))),
        },
        None => body(),
    };
    let outcome = computed.and_then(|done| finish(done, stdout, stderr));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Worker count from `KMS_WORKERS`, if set.
pub fn workers_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")),
        },
    }
}

/// Runs the CLI on the process streams, honouring `KMS_WORKERS`.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let workers = match workers_from_env() {
        Ok(w) => w,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    run_with(argv, workers, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
