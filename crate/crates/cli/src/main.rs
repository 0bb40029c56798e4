use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rotstate_core::dense::{alpha_functionals, Functional, LocalState};
use rotstate_core::geometry::{
    fixed_point_set, image_under_theta, ppt_polytope, separable_polytope, simplex_s, Scalar,
};
use rotstate_core::invariant::{max_entropy_alpha, singlet_alpha, theta_matrix, werner_alpha};
use rotstate_core::separability::{criteria_report_with, Classification};
use rotstate_core::verify::{self, VFault, VerifyOptions};
use rotstate_core::{AlphaVector, Polytope, Surd};

mod alpha_input;

const SCHEMA: &str = "rotstate/1";

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_A_STATE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "rotstate",
    version,
    about = "Rotationally invariant two-particle states: Θ matrices, classification, polytopes"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Output format
    #[arg(long, global = true, value_enum, env = "ROTSTATE_FORMAT", default_value = "text")]
    format: Format,
    /// Print square-root-rational values symbolically
    #[arg(long, global = true)]
    exact: bool,
    /// Tolerance for float state and verification checks
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive_f64)]
    tolerance: f64,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("tolerance must be positive".into())
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the Θ matrix for local dimension N
    Theta {
        #[arg(long)]
        n: usize,
    },
    /// Classify an α-vector and report every criterion
    Classify(ClassifyArgs),
    /// Dump the vertices of one of the polytopes
    Vertices {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        which: Which,
    },
    /// Sample points of the range W from Haar-random product states
    SampleRange {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
    },
    /// Run the invariant suites
    Verify {
        /// Dimension or inclusive range such as 2..6
        #[arg(long, default_value = "2..6")]
        n: String,
        /// Random samples per stochastic suite
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Negate one entry of V (mutation check)
        #[arg(long, hide = true)]
        inject_v_fault: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated components; rationals and sqrt(...) are exact
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["alpha_file", "named"])]
    alpha: Option<String>,
    /// File with components or a JSON α-vector
    #[arg(long, conflicts_with = "named")]
    alpha_file: Option<PathBuf>,
    /// Named state: singlet, max-entropy or werner:<lambda>
    #[arg(long)]
    named: Option<String>,
    /// Input omits α_{2j}, which is fixed by unit trace
    #[arg(long)]
    reduced: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Which {
    #[value(name = "S")]
    S,
    #[value(name = "thetaS", alias = "theta-s")]
    ThetaS,
    Ppt,
    Separable,
    Fixed,
}

impl Which {
    fn label(self) -> &'static str {
        match self {
            Which::S => "S",
            Which::ThetaS => "thetaS",
            Which::Ppt => "ppt",
            Which::Separable => "separable",
            Which::Fixed => "fixed",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<(String, u8)> {
    let cfg = &cli.config;
    if cfg.format == Format::Off && !matches!(cli.command, Command::Vertices { .. }) {
        bail!("--format off is only available for the vertices command");
    }
    match &cli.command {
        Command::Theta { n } => cmd_theta(cfg, *n).map(|s| (s, 0)),
        Command::Classify(args) => cmd_classify(cfg, args),
        Command::Vertices { n, which } => cmd_vertices(cfg, *n, *which).map(|s| (s, 0)),
        Command::SampleRange { n, count } => cmd_sample_range(cfg, *n, *count).map(|s| (s, 0)),
        Command::Verify {
            n,
            samples,
            inject_v_fault,
        } => cmd_verify(cfg, n, *samples, *inject_v_fault),
    }
}

fn with_schema(command: &str, mut body: Value) -> String {
    let obj = body.as_object_mut().expect("json object body");
    obj.insert("schema".into(), json!(SCHEMA));
    obj.insert("command".into(), json!(command));
    let mut s = serde_json::to_string_pretty(&body).expect("json value");
    s.push('\n');
    s
}

fn float(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn cmd_theta(cfg: &Config, n: usize) -> anyhow::Result<String> {
    let t = theta_matrix(n)?;
    let cell = |j: usize, k: usize| {
        if cfg.exact {
            t.surd(j, k).to_string()
        } else {
            float(t.get(j, k))
        }
    };
    Ok(match cfg.format {
        Format::Json => {
            let mut body = serde_json::to_value(&t)?;
            let text: Vec<Vec<String>> = (0..n)
                .map(|j| (0..n).map(|k| t.surd(j, k).to_string()).collect())
                .collect();
            body["exact_text"] = json!(text);
            with_schema("theta", body)
        }
        Format::Csv | Format::Text => {
            let sep = if cfg.format == Format::Csv { "," } else { "  " };
            let mut out = String::new();
            for j in 0..n {
                let row: Vec<String> = (0..n).map(|k| cell(j, k)).collect();
                let _ = writeln!(out, "{}", row.join(sep));
            }
            out
        }
        Format::Off => unreachable!("rejected earlier"),
    })
}

fn named_alpha(name: &str, n: usize) -> anyhow::Result<AlphaVector> {
    Ok(match name {
        "singlet" => singlet_alpha(n)?,
        "max-entropy" | "maximally-mixed" => max_entropy_alpha(n)?,
        other => match other.strip_prefix("werner:") {
            Some(l) => werner_alpha(n, l.parse().with_context(|| format!("bad Werner parameter {l:?}"))?)?,
            None => bail!("unknown named state {other:?}; use singlet, max-entropy or werner:<lambda>"),
        },
    })
}

fn load_alpha(args: &ClassifyArgs) -> anyhow::Result<AlphaVector> {
    if let Some(name) = &args.named {
        let n = args.n.ok_or_else(|| anyhow!("--named needs --n"))?;
        return named_alpha(name, n);
    }
    let text = match (&args.alpha, &args.alpha_file) {
        (Some(s), None) => s.clone(),
        (None, Some(p)) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        _ => bail!("give one of --alpha, --alpha-file or --named"),
    };
    let alpha = alpha_input::parse(&text, args.n, args.reduced)?;
    if let Some(n) = args.n {
        if alpha.n() != n {
            bail!("α-vector has N = {}, but --n {n} was given", alpha.n());
        }
    }
    Ok(alpha)
}

fn value_text(exact: Option<&Surd>, approx: f64, want_exact: bool) -> String {
    match exact {
        Some(x) if want_exact => x.to_string(),
        _ => float(approx),
    }
}

fn cmd_classify(cfg: &Config, args: &ClassifyArgs) -> anyhow::Result<(String, u8)> {
    let alpha = load_alpha(args)?;
    let report = criteria_report_with(&alpha, cfg.tolerance)?;
    let code = if report.classification == Classification::NotAState {
        EXIT_NOT_A_STATE
    } else {
        0
    };
    let opt_bool = |b: Option<bool>| b.map_or_else(|| "n/a".to_string(), |x| x.to_string());
    let opt_f = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), float);
    let components: Vec<String> = alpha
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| value_text(alpha.exact().map(|e| &e[k]), *v, cfg.exact))
        .collect();
    let out = match cfg.format {
        Format::Json => {
            let mut body = json!({
                "n": alpha.n(),
                "alpha": alpha,
                "exact_input": alpha.is_exact(),
                "report": report,
            });
            body["classification"] = json!(report.classification.tag());
            with_schema("classify", body)
        }
        Format::Csv => {
            let mut out = String::from(
                "n,classification,ppt,prism_inequality,witness_value,reduction_ok,cross_norm,cross_norm_ok,negativity_trace_norm\n",
            );
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                alpha.n(),
                report.classification,
                report.ppt,
                opt_bool(report.prism_inequality),
                opt_f(report.witness_value),
                report.reduction_ok,
                float(report.cross_norm),
                report.cross_norm_ok,
                float(report.negativity_trace_norm)
            );
            out
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "{}", report.classification);
            let _ = writeln!(out, "n: {}", alpha.n());
            let _ = writeln!(out, "alpha: {}", components.join(", "));
            let _ = writeln!(out, "exact input: {}", alpha.is_exact());
            let _ = writeln!(out, "ppt: {}", report.ppt);
            let _ = writeln!(out, "prism inequality: {}", opt_bool(report.prism_inequality));
            let _ = writeln!(out, "witness tr((P2-P0)rho): {}", opt_f(report.witness_value));
            let _ = writeln!(out, "reduction criterion: {}", report.reduction_ok);
            let _ = writeln!(
                out,
                "cross norm: {} (ok: {})",
                float(report.cross_norm),
                report.cross_norm_ok
            );
            let _ = writeln!(out, "negativity trace norm: {}", float(report.negativity_trace_norm));
            out
        }
    };
    Ok((out, code))
}

fn build_polytope<T: Scalar>(n: usize, which: Which) -> rotstate_core::Result<Polytope<T>> {
    match which {
        Which::S => simplex_s(n),
        Which::ThetaS => image_under_theta(&simplex_s::<T>(n)?, n),
        Which::Ppt => ppt_polytope(n),
        Which::Separable => separable_polytope(n),
        Which::Fixed => fixed_point_set(n),
    }
}

fn render_polytope<T: Scalar>(cfg: &Config, n: usize, which: Which, p: &Polytope<T>) -> anyhow::Result<String> {
    Ok(match cfg.format {
        Format::Json => {
            let mut body = p.to_json_value();
            body["n"] = json!(n);
            body["which"] = json!(which.label());
            body["exact_arithmetic"] = json!(T::EXACT);
            with_schema("vertices", body)
        }
        Format::Csv => p.to_csv(),
        Format::Off => p.to_off()?,
        Format::Text => {
            let mut out = String::new();
            for v in p.vertices() {
                let cells: Vec<String> = v
                    .iter()
                    .map(|x| match x.exact_string() {
                        Some(s) if cfg.exact => s,
                        _ => float(x.approx()),
                    })
                    .collect();
                let _ = writeln!(out, "({})", cells.join(", "));
            }
            out
        }
    })
}

fn cmd_vertices(cfg: &Config, n: usize, which: Which) -> anyhow::Result<String> {
    if n < 2 {
        bail!("local dimension must be at least 2");
    }
    let exact_ok = n - 1 <= rotstate_core::geometry::EXACT_MAX_DIM;
    if exact_ok {
        let p = build_polytope::<Surd>(n, which)?;
        render_polytope(cfg, n, which, &p)
    } else {
        if cfg.exact {
            bail!("exact vertices are available for N ≤ 4 only");
        }
        let p = build_polytope::<f64>(n, which)?;
        render_polytope(cfg, n, which, &p)
    }
}

fn cmd_sample_range(cfg: &Config, n: usize, count: u64) -> anyhow::Result<String> {
    if n < 2 {
        bail!("local dimension must be at least 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let p1 = LocalState::random(n, &mut rng)?;
        let p2 = LocalState::random(n, &mut rng)?;
        points.push(alpha_functionals(&p1, &p2, Functional::Tensor)?.values().to_vec());
    }
    Ok(match cfg.format {
        Format::Json => with_schema(
            "sample-range",
            json!({"n": n, "seed": cfg.seed, "count": count, "points": points}),
        ),
        Format::Csv | Format::Text => {
            let mut out = String::new();
            if cfg.format == Format::Csv {
                let header: Vec<String> = (0..n).map(|k| format!("alpha{k}")).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            let sep = if cfg.format == Format::Csv { "," } else { " " };
            for p in &points {
                let row: Vec<String> = p.iter().map(|x| float(*x)).collect();
                let _ = writeln!(out, "{}", row.join(sep));
            }
            out
        }
        Format::Off => unreachable!("rejected earlier"),
    })
}

fn parse_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let bad = || anyhow!("expected N or A..B, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            )
        }
        None => {
            let v: usize = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo < 2 || hi < lo {
        bail!("dimension range {s:?} must satisfy 2 ≤ A ≤ B");
    }
    Ok((lo..=hi).collect())
}

fn cmd_verify(cfg: &Config, range: &str, samples: usize, fault: Option<usize>) -> anyhow::Result<(String, u8)> {
    let ns = parse_range(range)?;
    let opts = VerifyOptions {
        tolerance: cfg.tolerance,
        seed: cfg.seed,
        samples,
        v_fault: fault.map(VFault::FlipSign),
    };
    let report = verify::run(&ns, &opts);
    let code = if report.passed() { 0 } else { EXIT_VERIFY_FAILED };
    let out = match cfg.format {
        Format::Json => with_schema(
            "verify",
            json!({"passed": report.passed(), "tolerance": cfg.tolerance, "seed": cfg.seed, "results": report.results}),
        ),
        Format::Csv => {
            let mut out = String::from("suite,n,passed,max_error\n");
            for r in &report.results {
                let _ = writeln!(out, "{},{},{},{:e}", r.suite, r.n, r.passed, r.max_error);
            }
            out
        }
        _ => {
            let mut out = String::new();
            for r in &report.results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = write!(out, "{status} {} n={} max_error={:e}", r.suite, r.n, r.max_error);
                if let Some(d) = &r.detail {
                    let _ = write!(out, " ({d})");
                }
                out.push('\n');
            }
            let failed: Vec<String> = report.failures().map(|r| format!("{}@n={}", r.suite, r.n)).collect();
            if failed.is_empty() {
                let _ = writeln!(out, "all {} checks passed", report.results.len());
            } else {
                let _ = writeln!(out, "failed: {}", failed.join(", "));
            }
            out
        }
    };
    Ok((out, code))
}
