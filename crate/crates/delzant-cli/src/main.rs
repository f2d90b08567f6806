//! `delzant` — build, inspect, evaluate, and verify toric chart atlases.
//!
//! Subcommands:
//! - `validate` — parse a polytope file, run the structural checks, and
//!   print the vertex table (or the canonical file with `--emit`).
//! - `example`  — emit ready-made polytope files (simplices and twisted
//!   quadrangles) for experimentation.
//! - `atlas`    — print the base-change matrix and Laurent exponent table
//!   for every ordered vertex pair.
//! - `eval`     — apply one of the atlas maps to a point read from a file.
//! - `verify`   — run the randomized verification suite and report results.
//! - `sample`   — emit momentum images of random chart points as CSV.
//!
//! Exit codes: `0` success, `1` usage error or malformed input file,
//! `2` polytope validation failure, `3` verification failure.

use std::fs;
use std::io::Read;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use delzant::charts::{
    ambient_point_json, chart_point_json, momentum_json, mu_v, parse_chart_point, parse_momentum,
    r_f, section_s_v, stratum_of,
};
use delzant::lattice;
use delzant::polytope::{
    build, canonical_polytope_file, hirzebruch, parse_polytope_file, simplex,
};
use delzant::transitions::{
    laurent_map, mu_toric, phi, theta, theta_inverse, toric_transition,
};
use delzant::verify::run_suite_with_tolerance;
use delzant::{DelzantPolytope, SampleConfig, SolverConfig, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "delzant",
    version,
    about = "Toric chart atlases for Delzant polytopes",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a polytope file and print its vertex table.
    Validate {
        /// Polytope file path, or `-` for stdin.
        #[arg(default_value = "-")]
        file: String,
        /// Print the canonical polytope file instead of the vertex table.
        #[arg(long)]
        emit: bool,
    },
    /// Emit an example polytope file on stdout.
    Example {
        #[command(subcommand)]
        family: ExampleFamily,
    },
    /// Print base changes and Laurent exponents for every vertex pair.
    Atlas {
        /// Polytope file path, or `-` for stdin.
        #[arg(long)]
        polytope: String,
    },
    /// Evaluate one atlas map at a point read from a file.
    Eval {
        /// Which map to apply.
        #[arg(value_enum)]
        op: EvalOp,
        /// Polytope file path, or `-` for stdin.
        #[arg(long)]
        polytope: String,
        /// Chart vertex (required by every op except `r`).
        #[arg(long)]
        vertex: Option<String>,
        /// Target vertex for `phi` and `toric`.
        #[arg(long)]
        to: Option<String>,
        /// Facet id for `r`.
        #[arg(long)]
        facet: Option<String>,
        /// Point file path, or `-` for stdin. Chart-point JSON for most ops;
        /// momentum JSON (`{"xi": [...]}`) for `r`.
        #[arg(long)]
        point: String,
        /// Domain-membership tolerance; for `theta-inv` and `mu-toric`, the
        /// solver's residual tolerance instead.
        #[arg(long)]
        tol: Option<f64>,
        /// Newton iteration cap for `theta-inv` and `mu-toric`.
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Run the randomized verification suite.
    Verify {
        /// Polytope file path, or `-` for stdin.
        #[arg(long)]
        polytope: String,
        /// Samples per check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Master seed for the derived sample streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every floating tolerance with this single value.
        #[arg(long)]
        tol: Option<f64>,
        /// Sampling margin (default: 5% of the inradius proxy).
        #[arg(long)]
        margin: Option<f64>,
        /// Write the JSON-lines report here instead of stdout.
        #[arg(long)]
        report: Option<String>,
    },
    /// Emit momentum images of random chart points as CSV.
    Sample {
        /// Polytope file path, or `-` for stdin.
        #[arg(long)]
        polytope: String,
        /// Chart vertex to sample from.
        #[arg(long)]
        vertex: String,
        /// Number of rows to emit.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Seed; row `i` is drawn from the stream seeded with `seed + i`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling margin (default: 5% of the inradius proxy).
        #[arg(long)]
        margin: Option<f64>,
    },
}

#[derive(Subcommand)]
enum ExampleFamily {
    /// Scaled projective space: facets `x_i >= -lambda_i` and
    /// `-sum x_i + lambda_0 >= 0`.
    Simplex {
        /// Dimension.
        #[arg(long)]
        n: usize,
        /// Comma-separated offsets `lambda_0,...,lambda_n` (rationals like `1/4`).
        #[arg(long)]
        lambda: String,
    },
    /// Twisted quadrangle with normals `e1, e2, -e1 + m*e2, -e2`.
    Hirzebruch {
        /// Twist parameter.
        #[arg(long)]
        m: u32,
        /// Comma-separated offsets `lambda_1,lambda_2,lambda_3,lambda_4`.
        #[arg(long)]
        lambda: String,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EvalOp {
    /// Momentum map of a chart point.
    Mu,
    /// Radial coordinate `r_f(xi)` of a momentum value.
    R,
    /// Chart point to toric coordinates.
    Theta,
    /// Toric coordinates back to the chart point (Newton solve).
    ThetaInv,
    /// Symplectic transition between two charts.
    Phi,
    /// Toric (Laurent monomial) transition between two charts.
    Toric,
    /// Momentum map evaluated on toric coordinates.
    MuToric,
    /// Section from the chart into ambient coordinates.
    Section,
    /// Facet set of the stratum through a chart point.
    Stratum,
}

fn main() {
    // Die silently on a closed pipe (`delzant ... | head`) the way other
    // line-oriented tools do, instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(run(&args));
}

/// Complete CLI entry point; returns the process exit code.
fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match cli.command {
        Command::Validate { file, emit } => cmd_validate(&file, emit),
        Command::Example { family } => cmd_example(&family),
        Command::Atlas { polytope } => cmd_atlas(&polytope),
        Command::Eval {
            op,
            polytope,
            vertex,
            to,
            facet,
            point,
            tol,
            max_iter,
        } => cmd_eval(
            op,
            &polytope,
            vertex.as_deref(),
            to.as_deref(),
            facet.as_deref(),
            &point,
            tol,
            max_iter,
        ),
        Command::Verify {
            polytope,
            samples,
            seed,
            tol,
            margin,
            report,
        } => cmd_verify(&polytope, samples, seed, tol, margin, report.as_deref()),
        Command::Sample {
            polytope,
            vertex,
            count,
            seed,
            margin,
        } => cmd_sample(&polytope, &vertex, count, seed, margin),
    }
}

// ---------------------------------------------------------------------------
// Input helpers
// ---------------------------------------------------------------------------

/// Reads a file argument; `-` means stdin. Failure is a usage error (code 1).
fn read_input(path: &str) -> Result<String, i32> {
    if path == "-" {
        let mut text = String::new();
        if let Err(e) = std::io::stdin().read_to_string(&mut text) {
            eprintln!("error: failed to read stdin: {e}");
            return Err(1);
        }
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| {
            eprintln!("error: cannot read `{path}`: {e}");
            1
        })
    }
}

/// Reads, parses, and validates a polytope file. Malformed input exits 1
/// with the offending location; a well-formed file that fails the
/// structural checks exits 2 with one line per violation.
fn load_polytope(path: &str) -> Result<DelzantPolytope, i32> {
    let text = read_input(path)?;
    let (dim, facets) = parse_polytope_file(&text).map_err(|e| {
        eprintln!("error: `{path}`: {e}");
        1
    })?;
    build(dim, facets).map_err(|e| {
        eprintln!("validation failed for `{path}`:");
        for violation in e.violations() {
            eprintln!("  - {violation}");
        }
        2
    })
}

/// Parses one comma-separated list of rationals (`p` or `p/q`).
fn parse_lambda_list(s: &str) -> Result<Vec<BigRational>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let (numer, denom) = match part.split_once('/') {
                Some((n, d)) => (n.trim(), d.trim()),
                None => (part, "1"),
            };
            let n: BigInt = numer
                .parse()
                .map_err(|_| format!("`{part}` is not a rational number"))?;
            let d: BigInt = denom
                .parse()
                .map_err(|_| format!("`{part}` is not a rational number"))?;
            if d == BigInt::from(0) {
                return Err(format!("`{part}` has a zero denominator"));
            }
            Ok(BigRational::new(n, d))
        })
        .collect()
}

/// Formats a rational as `p` or `p/q` for the vertex table.
fn rational_display(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// validate / example
// ---------------------------------------------------------------------------

fn cmd_validate(file: &str, emit: bool) -> i32 {
    let p = match load_polytope(file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    if emit {
        print!("{}", canonical_polytope_file(&p));
        return 0;
    }
    println!(
        "polytope: dimension {}, {} facets, {} vertices",
        p.dim(),
        p.facets().len(),
        p.vertices().len()
    );
    for v in p.vertices() {
        let position = v
            .position()
            .iter()
            .map(rational_display)
            .collect::<Vec<_>>()
            .join(", ");
        // Basis matrix rows are the normals of the facets through the
        // vertex; its determinant is +-1 exactly when the basis is a
        // lattice basis, which validation has already enforced.
        let rows: Vec<Vec<BigInt>> = v
            .facet_set()
            .iter()
            .map(|f| p.facet(f).expect("facet of a vertex").normal().to_vec())
            .collect();
        let det = lattice::det(&rows);
        println!(
            "{}: position ({}), facets {{{}}}, basis determinant {}",
            v.id(),
            position,
            v.facet_set().join(", "),
            det
        );
    }
    0
}

fn cmd_example(family: &ExampleFamily) -> i32 {
    let built = match family {
        ExampleFamily::Simplex { n, lambda } => {
            let lambda = match parse_lambda_list(lambda) {
                Ok(l) => l,
                Err(msg) => {
                    eprintln!("error: --lambda: {msg}");
                    return 1;
                }
            };
            if *n == 0 {
                eprintln!("error: --n must be at least 1");
                return 1;
            }
            if lambda.len() != n + 1 {
                eprintln!(
                    "error: simplex of dimension {n} needs {} offsets, got {}",
                    n + 1,
                    lambda.len()
                );
                return 1;
            }
            simplex(*n, &lambda)
        }
        ExampleFamily::Hirzebruch { m, lambda } => {
            let lambda = match parse_lambda_list(lambda) {
                Ok(l) => l,
                Err(msg) => {
                    eprintln!("error: --lambda: {msg}");
                    return 1;
                }
            };
            let four: [BigRational; 4] = match <[BigRational; 4]>::try_from(lambda) {
                Ok(a) => a,
                Err(l) => {
                    eprintln!(
                        "error: the quadrangle needs exactly 4 offsets, got {}",
                        l.len()
                    );
                    return 1;
                }
            };
            hirzebruch(*m, &four)
        }
    };
    match built {
        Ok(p) => {
            print!("{}", canonical_polytope_file(&p));
            0
        }
        Err(e) => {
            eprintln!("validation failed for the requested example:");
            for violation in e.violations() {
                eprintln!("  - {violation}");
            }
            2
        }
    }
}

// ---------------------------------------------------------------------------
// atlas
// ---------------------------------------------------------------------------

fn cmd_atlas(polytope: &str) -> i32 {
    let p = match load_polytope(polytope) {
        Ok(p) => p,
        Err(code) => return code,
    };
    println!(
        "polytope: dimension {}, {} facets, {} vertices",
        p.dim(),
        p.facets().len(),
        p.vertices().len()
    );
    for v in p.vertices() {
        println!("{}: facets {{{}}}", v.id(), v.facet_set().join(", "));
    }
    for v in p.vertices() {
        for w in p.vertices() {
            if v.id() == w.id() {
                continue;
            }
            let bc = p
                .base_change(v.id(), w.id())
                .expect("base change between atlas vertices");
            let lm = laurent_map(&p, v.id(), w.id())
                .expect("Laurent map between atlas vertices");
            println!();
            println!(
                "{} -> {}: base change (rows {{{}}}, columns {{{}}})",
                v.id(),
                w.id(),
                bc.row_facets().join(", "),
                bc.col_facets().join(", ")
            );
            for (f, row) in bc.row_facets().iter().zip(bc.matrix()) {
                let entries = row.iter().map(|e| e.to_string()).collect::<Vec<_>>();
                println!("  {f}: [{}]", entries.join(", "));
            }
            println!(
                "{} -> {}: Laurent exponents (rows {{{}}}, columns {{{}}})",
                v.id(),
                w.id(),
                lm.row_facets().join(", "),
                lm.col_facets().join(", ")
            );
            for (f, row) in lm.row_facets().iter().zip(lm.exponents()) {
                let entries = row.iter().map(|e| e.to_string()).collect::<Vec<_>>();
                println!("  {f}: [{}]", entries.join(", "));
            }
        }
    }
    0
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

/// Required-flag helper: missing flags are usage errors (exit 1).
fn require<'a>(value: Option<&'a str>, flag: &str, op: &str) -> Result<&'a str, i32> {
    value.ok_or_else(|| {
        eprintln!("error: `eval {op}` requires {flag}");
        1
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    op: EvalOp,
    polytope: &str,
    vertex: Option<&str>,
    to: Option<&str>,
    facet: Option<&str>,
    point: &str,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> i32 {
    let p = match load_polytope(polytope) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let text = match read_input(point) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let membership_tol = tol.unwrap_or(DEFAULT_TOL);
    let solver = SolverConfig {
        tol: tol.unwrap_or(SolverConfig::default().tol),
        max_iter: max_iter.unwrap_or(SolverConfig::default().max_iter),
        ..SolverConfig::default()
    };

    // `r` consumes a momentum value; every other op consumes a chart point.
    if op == EvalOp::R {
        let f = match require(facet, "--facet", "r") {
            Ok(f) => f,
            Err(code) => return code,
        };
        let xi = match parse_momentum(&text, p.dim()) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: `{point}`: {e}");
                return 1;
            }
        };
        return match r_f(&p, f, &xi, membership_tol) {
            Ok(r) => {
                println!("{}", delzant::fmt_f64(r));
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        };
    }

    let z = match parse_chart_point(&p, &text) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: `{point}`: {e}");
            return 1;
        }
    };
    let op_name = match op {
        EvalOp::Mu => "mu",
        EvalOp::Theta => "theta",
        EvalOp::ThetaInv => "theta-inv",
        EvalOp::Phi => "phi",
        EvalOp::Toric => "toric",
        EvalOp::MuToric => "mu-toric",
        EvalOp::Section => "section",
        EvalOp::Stratum => "stratum",
        EvalOp::R => unreachable!("handled above"),
    };
    let v = match require(vertex, "--vertex", op_name) {
        Ok(v) => v,
        Err(code) => return code,
    };
    if z.vertex() != v {
        eprintln!(
            "error: the point file is a chart point at `{}`, but --vertex is `{v}`",
            z.vertex()
        );
        return 1;
    }

    let printed: Result<String, delzant::Error> = match op {
        EvalOp::Mu => mu_v(&p, v, &z).map(|m| momentum_json(&m)),
        EvalOp::Theta => theta(&p, v, &z, membership_tol).map(|t| chart_point_json(&p, &t)),
        EvalOp::ThetaInv => theta_inverse(&p, v, &z, &solver).map(|t| chart_point_json(&p, &t)),
        EvalOp::Phi => match require(to, "--to", "phi") {
            Ok(w) => phi(&p, v, w, &z, membership_tol).map(|t| chart_point_json(&p, &t)),
            Err(code) => return code,
        },
        EvalOp::Toric => match require(to, "--to", "toric") {
            Ok(w) => toric_transition(&p, v, w, &z).map(|t| chart_point_json(&p, &t)),
            Err(code) => return code,
        },
        EvalOp::MuToric => mu_toric(&p, v, &z, &solver).map(|m| momentum_json(&m)),
        EvalOp::Section => section_s_v(&p, v, &z, membership_tol).map(|a| ambient_point_json(&p, &a)),
        EvalOp::Stratum => stratum_of(&p, v, &z, membership_tol).map(|face| {
            let ids: Vec<String> = face
                .facet_ids()
                .iter()
                .map(|f| serde_json::Value::String(f.clone()).to_string())
                .collect();
            format!("{{\"facets\":[{}]}}", ids.join(","))
        }),
        EvalOp::R => unreachable!("handled above"),
    };
    match printed {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

// ---------------------------------------------------------------------------
// verify / sample
// ---------------------------------------------------------------------------

fn cmd_verify(
    polytope: &str,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
    margin: Option<f64>,
    report: Option<&str>,
) -> i32 {
    let p = match load_polytope(polytope) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let cfg = match margin {
        Some(m) => SampleConfig::new(samples, seed, m),
        None => SampleConfig::for_polytope(&p, samples, seed),
    };
    let reports = match run_suite_with_tolerance(&p, &cfg, tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let lines: String = reports
        .iter()
        .map(|r| format!("{}\n", r.to_json_line()))
        .collect();
    match report {
        Some(path) => {
            if let Err(e) = fs::write(path, &lines) {
                eprintln!("error: cannot write `{path}`: {e}");
                return 1;
            }
            println!("report written to {path}");
        }
        None => print!("{lines}"),
    }
    let failed: Vec<&delzant::CheckReport> = reports.iter().filter(|r| !r.pass()).collect();
    if failed.is_empty() {
        eprintln!("verification passed: {} checks", reports.len());
        0
    } else {
        eprintln!(
            "verification FAILED: {} of {} checks exceeded tolerance",
            failed.len(),
            reports.len()
        );
        for r in &failed {
            eprintln!(
                "  - {} [{}]: max error {} > tolerance {}",
                r.check(),
                r.vertices().join(", "),
                delzant::fmt_f64(r.max_error()),
                delzant::fmt_f64(r.tolerance())
            );
        }
        if let Some(path) = report {
            eprintln!("full report: {path}");
        }
        3
    }
}

fn cmd_sample(polytope: &str, vertex: &str, count: usize, seed: u64, margin: Option<f64>) -> i32 {
    let p = match load_polytope(polytope) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let margin = margin.unwrap_or(0.05 * p.inradius_proxy());
    let header: Vec<String> = (1..=p.dim()).map(|i| format!("xi{i}")).collect();
    println!("{}", header.join(","));
    for i in 0..count {
        let cfg = SampleConfig::new(1, seed.wrapping_add(i as u64), margin);
        let z = match delzant::verify::sample_chart_point(&p, vertex, &cfg, None) {
            Ok(z) => z,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        };
        let xi = match mu_v(&p, vertex, &z) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        };
        let row: Vec<String> = xi.xi().iter().map(|&x| delzant::fmt_f64(x)).collect();
        println!("{}", row.join(","));
    }
    0
}
