//! Command-line front end: validate knot complex files, compute surgeries,
//! d-invariants, and cobordism maps.
//!
//! Exit codes: 0 success, 1 validation/parse failure, 2 computation failure
//! (no stabilization), 3 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use floercone::cone::{cobordism_map, surgery_homology, zero_surgery_homology};
use floercone::error::Error;
use floercone::knotcx::{
    builtin_borromean, builtin_staircase, builtin_t34, builtin_unknot, parse_complex,
    serialize_complex, KnotComplex,
};
use floercone::report::{rational_string, Params, Report, ResultEntry};

#[derive(Parser)]
#[command(name = "floercone", version, about = "Heegaard Floer homology of integer surgeries")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Input {
    /// Path to a knot complex JSON file
    path: Option<PathBuf>,
    /// Built-in complex: unknot | t34 | staircase:1,2,2,1 | borromean:G
    #[arg(long)]
    builtin: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a knot complex file against every invariant
    Validate { path: PathBuf },
    /// Compute HF⁺ of n-surgery
    Surgery {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        /// Spin^c class (residue mod n, or any integer when n = 0)
        #[arg(long, allow_hyphen_values = true, conflicts_with = "all_spinc")]
        spinc: Option<i64>,
        /// All Spin^c classes (default when --spinc is omitted, n ≠ 0)
        #[arg(long)]
        all_spinc: bool,
        /// Truncation level: auto or a fixed integer
        #[arg(long, default_value = "auto")]
        delta: String,
        /// Truncation width: auto or a fixed integer
        #[arg(long, default_value = "auto")]
        width: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also print the parsed complex
        #[arg(long)]
        dump: bool,
    },
    /// d-invariants (tower bottoms) of n-surgery, per Spin^c class
    Dinv {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Matrix of the two-handle cobordism map H(B_s) → H(X_i(n))
    Cobordism {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long, default_value = "auto")]
        delta: String,
        #[arg(long, default_value = "auto")]
        width: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn from_error(e: Error) -> Failure {
    let code = match e {
        Error::Parse(_) | Error::Validation(_) | Error::FlipMissing => 1,
        Error::Stabilization { .. } => 2,
        _ => 3,
    };
    fail(code, e.to_string())
}

fn load(input: &Input) -> Result<(KnotComplex, String), Failure> {
    match (&input.path, &input.builtin) {
        (Some(_), Some(_)) => Err(fail(3, "give either a path or --builtin, not both")),
        (None, None) => Err(fail(3, "an input file or --builtin is required")),
        (Some(path), None) => {
            let doc = std::fs::read_to_string(path)
                .map_err(|e| fail(1, format!("cannot read {}: {e}", path.display())))?;
            let c = parse_complex(&doc).map_err(from_error)?;
            Ok((c, path.display().to_string()))
        }
        (None, Some(name)) => {
            let c = parse_builtin(name)?;
            Ok((c, format!("builtin:{name}")))
        }
    }
}

fn parse_builtin(name: &str) -> Result<KnotComplex, Failure> {
    match name.split_once(':') {
        None => match name {
            "unknot" => Ok(builtin_unknot()),
            "t34" => Ok(builtin_t34()),
            _ => Err(fail(3, format!("unknown builtin '{name}'"))),
        },
        Some(("staircase", steps)) => {
            let steps: Vec<u64> = steps
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| fail(3, "staircase steps must be positive integers"))?;
            builtin_staircase(&steps).map_err(from_error)
        }
        Some(("borromean", g)) => {
            let g: u32 = g
                .parse()
                .ok()
                .filter(|&g| (1..=8).contains(&g))
                .ok_or_else(|| fail(3, "borromean genus must be between 1 and 8"))?;
            Ok(builtin_borromean(g))
        }
        Some(_) => Err(fail(3, format!("unknown builtin '{name}'"))),
    }
}

fn parse_auto_u32(value: &str, flag: &str) -> Result<Option<u32>, Failure> {
    if value == "auto" {
        Ok(None)
    } else {
        value
            .parse()
            .map(Some)
            .map_err(|_| fail(3, format!("--{flag} must be 'auto' or a non-negative integer")))
    }
}

fn parse_auto_i64(value: &str, flag: &str) -> Result<Option<i64>, Failure> {
    if value == "auto" {
        Ok(None)
    } else {
        value
            .parse()
            .ok()
            .filter(|&b| b >= 1)
            .map(Some)
            .ok_or_else(|| fail(3, format!("--{flag} must be 'auto' or a positive integer")))
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.cmd {
        Cmd::Validate { path } => {
            let doc = std::fs::read_to_string(&path)
                .map_err(|e| fail(1, format!("cannot read {}: {e}", path.display())))?;
            let c: KnotComplex =
                serde_json::from_str(&doc).map_err(|e| fail(1, format!("parse error: {e}")))?;
            let report = c.validate();
            if report.is_valid() {
                Ok(format!("{}: ok ({} generators)\n", c.name, c.generator_count()))
            } else {
                Err(fail(1, report.violations.join("\n")))
            }
        }
        Cmd::Surgery { input, n, spinc, all_spinc, delta, width, format, dump } => {
            let (c, source) = load(&input)?;
            let delta_opt = parse_auto_u32(&delta, "delta")?;
            let width_opt = parse_auto_i64(&width, "width")?;
            if n == 0 && spinc.is_none() && !all_spinc {
                return Err(fail(3, "n = 0 has infinitely many Spin^c classes; give --spinc"));
            }
            if n == 0 && all_spinc {
                return Err(fail(3, "--all-spinc is not available for n = 0"));
            }
            let classes: Vec<i64> = match spinc {
                Some(i) if n != 0 => vec![i.rem_euclid(n.abs())],
                Some(i) => vec![i],
                None => (0..n.abs()).collect(),
            };
            let mut results = Vec::new();
            for &i in &classes {
                let res = if n == 0 {
                    zero_surgery_homology(&c, i, delta_opt).map_err(from_error)?
                } else {
                    surgery_homology(&c, n, i, delta_opt, width_opt).map_err(from_error)?
                };
                results.push(ResultEntry::from_surgery(&res));
            }
            let report = Report::new(
                source,
                "surgery",
                Params {
                    n,
                    spinc: spinc.map_or_else(|| "all".to_string(), |i| i.to_string()),
                    delta,
                    width,
                },
                results,
            );
            let mut out = String::new();
            if dump {
                out.push_str(&serialize_complex(&c));
                out.push('\n');
            }
            match format {
                Format::Text => out.push_str(&report.to_text()),
                Format::Json => {
                    out.push_str(&report.to_json());
                    out.push('\n');
                }
            }
            Ok(out)
        }
        Cmd::Dinv { input, n, format } => {
            let (c, source) = load(&input)?;
            let d = floercone::gradings::d_invariants(&c, n).map_err(from_error)?;
            match format {
                Format::Text => {
                    let line = d
                        .iter()
                        .map(|(i, towers)| {
                            let values = towers
                                .iter()
                                .map(|&t| rational_string(t))
                                .collect::<Vec<_>>()
                                .join(" ");
                            format!("{i}: {values}")
                        })
                        .collect::<Vec<_>>()
                        .join(", ");
                    Ok(format!("{source} (n = {n}): {line}\n"))
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct DinvReport {
                        input: String,
                        command: String,
                        n: i64,
                        d_invariants: std::collections::BTreeMap<i64, Vec<String>>,
                        version: String,
                    }
                    let report = DinvReport {
                        input: source,
                        command: "dinv".into(),
                        n,
                        d_invariants: d
                            .into_iter()
                            .map(|(i, ts)| (i, ts.into_iter().map(rational_string).collect()))
                            .collect(),
                        version: env!("CARGO_PKG_VERSION").into(),
                    };
                    Ok(format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))
                }
            }
        }
        Cmd::Cobordism { input, n, s, delta, width, format } => {
            let (c, source) = load(&input)?;
            let delta_opt = parse_auto_u32(&delta, "delta")?;
            let width_opt = parse_auto_i64(&width, "width")?;
            let map = cobordism_map(&c, n, s, delta_opt, width_opt).map_err(from_error)?;
            match format {
                Format::Text => {
                    let mut out = format!(
                        "{source}: B_{} -> X_{}({}) at delta {}, width {}\n\
                         source rank {}, target rank {}\n",
                        map.s,
                        map.i,
                        map.n,
                        map.delta,
                        map.width,
                        map.source_gradings.len(),
                        map.target_gradings.len(),
                    );
                    for (k, col) in map.matrix.iter().enumerate() {
                        out.push_str(&format!(
                            "class {k} (gr {}) -> {:?}\n",
                            map.source_gradings[k], col
                        ));
                    }
                    Ok(out)
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct CobordismReport {
                        input: String,
                        command: String,
                        n: i64,
                        s: i64,
                        i: i64,
                        delta: u32,
                        width: i64,
                        matrix: Vec<Vec<usize>>,
                        source_gradings: Vec<i64>,
                        target_gradings: Vec<i64>,
                        version: String,
                    }
                    let report = CobordismReport {
                        input: source,
                        command: "cobordism".into(),
                        n: map.n,
                        s: map.s,
                        i: map.i,
                        delta: map.delta,
                        width: map.width,
                        matrix: map.matrix,
                        source_gradings: map.source_gradings,
                        target_gradings: map.target_gradings,
                        version: env!("CARGO_PKG_VERSION").into(),
                    };
                    Ok(format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
