//! Command-line surface for the pg3 library.
//!
//! Inputs that expect JSON accept either a literal JSON string or a path to
//! a file containing one. Data goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 2 input parse error, 3 singular matrix,
//! 4 ill-conditioned classification, 5 witness search failed, 6 nothing to
//! falsify (verdict is Possible), 1 other errors.

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::process::ExitCode;

use pg3::clifford::{self, Chirality};
use pg3::collineation::{automorphism_verdict, classify_case, Collineation};
use pg3::config::{OutputFormat, RunConfig};
use pg3::dynamics::{line_orbit_trace, recurrence_schedule, RecurrenceSchedule};
use pg3::error::{CollineationError, FalsifyError, LemmaError};
use pg3::falsify::{falsify_invariance, FalsificationCertificate, FalsifyOptions};
use pg3::geometry::ProjPoint;
use pg3::json;
use pg3::lemmas;

const EXIT_PARSE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;
const EXIT_ILL_CONDITIONED: u8 = 4;
const EXIT_WITNESS_FAILED: u8 = 5;
const EXIT_NOTHING_TO_FALSIFY: u8 = 6;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Chirality {
    fn from(s: SideArg) -> Chirality {
        match s {
            SideArg::Left => Chirality::Left,
            SideArg::Right => Chirality::Right,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pg3",
    about = "Projective line geometry of PG(3,R): Clifford parallelism, collineation classification, falsification experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Tolerance for algebraic identity self-checks on outputs.
    #[arg(long, global = true)]
    tol_alg: Option<f64>,
    /// Tolerance for incidence and parallelism decisions.
    #[arg(long, global = true)]
    tol_inc: Option<f64>,
    /// Limit-detection tolerance.
    #[arg(long, global = true)]
    tol_conv: Option<f64>,
    /// Seed for stochastic operations (fixed default keeps runs reproducible).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Scan bound for recurrence schedules.
    #[arg(long, global = true)]
    nmax: Option<u64>,
    /// Target defect for recurrence schedules.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Output format where both are meaningful.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Evaluate data-parallel where supported.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a collineation and print its case label, parameters and verdicts.
    Classify {
        /// 4x4 matrix (JSON literal or file path).
        matrix: String,
        /// Eigenvalue clustering tolerance (relative).
        #[arg(long, default_value_t = pg3::collineation::TOL_CLASSIFY)]
        tol: f64,
    },
    /// Clifford parallelism operations.
    Clifford {
        #[command(subcommand)]
        op: CliffordOp,
    },
    /// Orbit dynamics on the line Grassmannian.
    Dynamics {
        #[command(subcommand)]
        op: DynamicsOp,
    },
    /// Run the falsification experiment for an excluded collineation.
    Falsify {
        /// 4x4 matrix (JSON literal or file path).
        matrix: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// Write the certificate JSON to this file as well as stdout.
        #[arg(long)]
        witness_out: Option<String>,
        /// Write the convergence trace CSV to this file.
        #[arg(long)]
        trace_out: Option<String>,
    },
    /// Constructive lemma realizations.
    Lemma {
        #[command(subcommand)]
        op: LemmaOp,
    },
}

#[derive(Subcommand)]
enum CliffordOp {
    /// The parallel to a line through a point.
    Parallel {
        #[arg(long)]
        point: String,
        #[arg(long)]
        line: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// The class invariant of a line.
    Class {
        #[arg(long)]
        line: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// Whether two lines are parallel.
    Check {
        #[arg(long)]
        line: String,
        #[arg(long)]
        other: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
}

#[derive(Subcommand)]
enum DynamicsOp {
    /// Trace the orbit of a line under powers of a collineation.
    Trace {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        line: String,
        /// Number of schedule points.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Derive a recurrence schedule from the unit-modulus eigenvalues
        /// instead of the plain range 1..count.
        #[arg(long)]
        recurrence: bool,
        /// Limit-detection window.
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
}

#[derive(Subcommand)]
enum LemmaOp {
    /// A parallel of a line avoiding finitely many obstacle lines.
    Avoid {
        #[arg(long)]
        line: String,
        /// JSON array of line specs (literal or file path).
        #[arg(long)]
        obstacles: Option<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long, default_value_t = 1000)]
        max_tries: usize,
    },
    /// Two distinct parallel common transversals of two disjoint lines.
    Transversals {
        #[arg(long)]
        line: String,
        #[arg(long)]
        other: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Pencil equivariance defect at two fixed points of a collineation.
    Pencil {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        point_p: String,
        #[arg(long)]
        point_q: String,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

/// JSON literal or path to a JSON file.
fn read_json_arg(arg: &str) -> Result<serde_json::Value, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Failure::parse(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::parse(format!("invalid JSON: {e}")))
}

fn parse_matrix(arg: &str) -> Result<Collineation, Failure> {
    let v = read_json_arg(arg)?;
    let m = json::matrix_from_json(&v).map_err(|e| Failure::parse(format!("matrix: {e}")))?;
    Collineation::new(m).map_err(|e| match e {
        CollineationError::Singular(d) => {
            Failure::new(EXIT_SINGULAR, format!("singular matrix (|det| = {d:.3e})"))
        }
        other => Failure::new(1, other.to_string()),
    })
}

fn parse_line(arg: &str) -> Result<pg3::ProjLine, Failure> {
    let v = read_json_arg(arg)?;
    json::line_from_json(&v).map_err(|e| Failure::parse(format!("line: {e}")))
}

fn parse_point(arg: &str) -> Result<ProjPoint, Failure> {
    let v = read_json_arg(arg)?;
    json::point_from_json(&v).map_err(|e| Failure::parse(format!("point: {e}")))
}

/// Merged configuration plus whether the output format was set explicitly
/// (traces default to CSV, everything else to JSON).
fn load_config(cli: &Cli) -> Result<(RunConfig, bool), Failure> {
    let mut format_explicit = cli.format.is_some();
    let mut cfg = match std::env::var("PG3_CONFIG") {
        Ok(path) if !path.is_empty() => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::parse(format!("PG3_CONFIG {path}: {e}")))?;
            let raw: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Failure::parse(format!("PG3_CONFIG {path}: {e}")))?;
            format_explicit |= raw.get("format").is_some();
            serde_json::from_value(raw)
                .map_err(|e| Failure::parse(format!("PG3_CONFIG {path}: {e}")))?
        }
        _ => RunConfig::default(),
    };
    if let Some(v) = cli.tol_alg {
        cfg.tol_algebraic = v;
    }
    if let Some(v) = cli.tol_inc {
        cfg.tol_incidence = v;
    }
    if let Some(v) = cli.tol_conv {
        cfg.tol_convergence = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = cli.nmax {
        cfg.nmax = v;
    }
    if let Some(v) = cli.eps {
        cfg.schedule_eps = v;
    }
    if let Some(f) = cli.format {
        cfg.format = match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        };
    }
    cfg.parallel |= cli.parallel;
    cfg.validate().map_err(Failure::parse)?;
    Ok((cfg, format_explicit))
}

fn emit(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn trace_csv(records: &[(usize, u64, f64, f64)]) -> String {
    let mut out = String::from("k,n,distance_to_limit,class_defect\n");
    for (k, n, d, c) in records {
        out.push_str(&format!("{k},{n},{d:.12e},{c:.12e}\n"));
    }
    out
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (cfg, format_explicit) = load_config(cli)?;
    match &cli.command {
        Command::Classify { matrix, tol } => {
            let g = parse_matrix(matrix)?;
            let case = classify_case(&g, *tol).map_err(|e| match e {
                CollineationError::IllConditioned(a, b) => Failure::new(
                    EXIT_ILL_CONDITIONED,
                    format!("ill-conditioned classification; candidates {a} and {b}"),
                ),
                other => Failure::new(1, other.to_string()),
            })?;
            let verdicts = automorphism_verdict(&g);
            let report = json::verdict_report(&case, &verdicts);
            emit(&serde_json::to_value(&report).expect("report serializes"));
            Ok(())
        }
        Command::Clifford { op } => {
            match op {
                CliffordOp::Parallel { point, line, side } => {
                    let p = parse_point(point)?;
                    let l = parse_line(line)?;
                    let result = clifford::clifford_parallel(&p, &l, (*side).into());
                    let residual = pg3::geometry::klein_form(result.plucker()).abs();
                    if residual > cfg.tol_algebraic {
                        return Err(Failure::new(
                            1,
                            format!("output failed the algebraic self-check ({residual:.3e})"),
                        ));
                    }
                    emit(&json::line_to_json(&result));
                }
                CliffordOp::Class { line, side } => {
                    let l = parse_line(line)?;
                    let inv = clifford::class_invariant(&l, (*side).into());
                    let a = inv.axis();
                    emit(&serde_json::json!({ "axis": [a[0], a[1], a[2]] }));
                }
                CliffordOp::Check { line, other, side } => {
                    let l = parse_line(line)?;
                    let m = parse_line(other)?;
                    let parallel =
                        clifford::is_parallel_with_tol(&l, &m, (*side).into(), cfg.tol_incidence);
                    emit(&serde_json::json!(parallel));
                }
            }
            Ok(())
        }
        Command::Dynamics { op } => {
            let DynamicsOp::Trace {
                matrix,
                line,
                count,
                recurrence,
                window,
                side,
            } = op;
            let g = parse_matrix(matrix)?;
            let l = parse_line(line)?;
            let schedule = if *recurrence {
                let eigs = g.normalized().complex_eigenvalues();
                let units: Vec<num_complex::Complex<f64>> = eigs
                    .iter()
                    .filter(|z| (z.norm() - 1.0).abs() < 1e-9)
                    .copied()
                    .collect();
                recurrence_schedule(&units, *count, cfg.schedule_eps, cfg.nmax)
                    .map_err(|e| Failure::new(1, e.to_string()))?
            } else {
                RecurrenceSchedule::unconstrained(*count)
            };
            let trace = line_orbit_trace(&g, &l, &schedule, *window, cfg.tol_convergence);
            let start_class = clifford::class_invariant(&l, (*side).into());
            let rows: Vec<(usize, u64, f64, f64)> = trace
                .records
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let drift =
                        clifford::class_invariant(&r.line, (*side).into()).distance(&start_class);
                    (k, r.n, r.distance_to_limit, drift)
                })
                .collect();
            let use_json = format_explicit && cfg.format == OutputFormat::Json;
            match use_json {
                false => print!("{}", trace_csv(&rows)),
                true => emit(&serde_json::json!({
                    "limit": trace.limit.as_ref().map(json::line_to_json),
                    "records": rows.iter().map(|(k, n, d, c)| serde_json::json!({
                        "k": k, "n": n, "distance_to_limit": d, "class_defect": c,
                    })).collect::<Vec<_>>(),
                })),
            }
            Ok(())
        }
        Command::Falsify {
            matrix,
            side,
            witness_out,
            trace_out,
        } => {
            let g = parse_matrix(matrix)?;
            let case = classify_case(&g, pg3::collineation::TOL_CLASSIFY).map_err(|e| match e {
                CollineationError::IllConditioned(a, b) => Failure::new(
                    EXIT_ILL_CONDITIONED,
                    format!("ill-conditioned classification; candidates {a} and {b}"),
                ),
                other => Failure::new(1, other.to_string()),
            })?;
            let opts = FalsifyOptions {
                side: (*side).into(),
                seed: cfg.seed,
                nmax: cfg.nmax,
                schedule_eps: cfg.schedule_eps,
                parallel: cfg.parallel,
            };
            match falsify_invariance(&g, &case, &opts) {
                Ok(cert) => {
                    let value = serde_json::to_value(&cert).expect("certificate serializes");
                    if let Some(path) = witness_out {
                        std::fs::write(path, serde_json::to_string_pretty(&value).unwrap())
                            .map_err(|e| Failure::new(1, format!("writing {path}: {e}")))?;
                    }
                    if let Some(path) = trace_out {
                        let rows: Vec<(usize, u64, f64, f64)> = match &cert {
                            FalsificationCertificate::Limit(w) => w
                                .trace
                                .iter()
                                .map(|r| (r.k, r.n, r.distance_to_limit, r.class_defect))
                                .collect(),
                            FalsificationCertificate::Structural(_) => Vec::new(),
                        };
                        std::fs::write(path, trace_csv(&rows))
                            .map_err(|e| Failure::new(1, format!("writing {path}: {e}")))?;
                    }
                    emit(&value);
                    Ok(())
                }
                Err(FalsifyError::VerdictPossible { defect }) => {
                    emit(&serde_json::json!({
                        "status": "possible",
                        "invariance_defect": defect,
                    }));
                    Err(Failure::new(
                        EXIT_NOTHING_TO_FALSIFY,
                        format!("verdict is Possible; nothing to falsify (defect {defect:.3e})"),
                    ))
                }
                Err(e) => Err(Failure::new(EXIT_WITNESS_FAILED, e.to_string())),
            }
        }
        Command::Lemma { op } => match op {
            LemmaOp::Avoid {
                line,
                obstacles,
                side,
                max_tries,
            } => {
                let m = parse_line(line)?;
                let obstacle_lines: Vec<pg3::ProjLine> = match obstacles {
                    None => Vec::new(),
                    Some(arg) => {
                        let v = read_json_arg(arg)?;
                        let arr = v
                            .as_array()
                            .ok_or_else(|| Failure::parse("obstacles must be a JSON array"))?;
                        arr.iter()
                            .map(|item| {
                                json::line_from_json(item)
                                    .map_err(|e| Failure::parse(format!("obstacle: {e}")))
                            })
                            .collect::<Result<_, _>>()?
                    }
                };
                let n = lemmas::avoiding_parallel(
                    &m,
                    &obstacle_lines,
                    (*side).into(),
                    cfg.seed,
                    *max_tries,
                )
                .map_err(|e| Failure::new(1, e.to_string()))?;
                emit(&json::line_to_json(&n));
                Ok(())
            }
            LemmaOp::Transversals {
                line,
                other,
                side,
                grid,
            } => {
                let k = parse_line(line)?;
                let l = parse_line(other)?;
                let pair = lemmas::common_transversal_parallels(
                    &k,
                    &l,
                    (*side).into(),
                    *grid,
                    cfg.parallel,
                )
                .map_err(|e| Failure::new(1, e.to_string()))?;
                emit(&serde_json::json!({
                    "m": json::line_to_json(&pair.m),
                    "n": json::line_to_json(&pair.n),
                    "anchors_m": [json::point_to_json(&pair.anchors_m.0), json::point_to_json(&pair.anchors_m.1)],
                    "anchors_n": [json::point_to_json(&pair.anchors_n.0), json::point_to_json(&pair.anchors_n.1)],
                    "invariant_defect": pair.invariant_defect,
                }));
                Ok(())
            }
            LemmaOp::Pencil {
                matrix,
                point_p,
                point_q,
                side,
                samples,
            } => {
                let g = parse_matrix(matrix)?;
                let p = parse_point(point_p)?;
                let q = parse_point(point_q)?;
                let defect = lemmas::pencil_equivariance_check(
                    &g,
                    &p,
                    &q,
                    (*side).into(),
                    *samples,
                    cfg.seed,
                )
                .map_err(|e| match e {
                    LemmaError::NotFixed(d) => {
                        Failure::new(1, format!("point not fixed (moved {d:.3e})"))
                    }
                    other => Failure::new(1, other.to_string()),
                })?;
                emit(&serde_json::json!({ "defect": defect }));
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = writeln!(std::io::stderr(), "error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
