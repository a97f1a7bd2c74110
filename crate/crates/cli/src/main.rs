//! Command line front end for the nabla-ts engine.
//!
//! Every invocation prints one structured JSON document to standard output
//! with the top-level keys `command`, `inputs`, `result`, `diagnostics`.
//! Key order is fixed and floating-point numbers are printed with 17
//! significant digits, so identical inputs (and seed, for `verify`)
//! produce byte-identical output.
//!
//! Exit codes: 0 success; 1 domain or precondition error; 2 parse error;
//! 3 inconclusive search; 4 property-suite failure. Failures also print a
//! single `error: <class>: <reason>` line to standard error.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use nabla_ts::error::Error;
use nabla_ts::expr::{parse_function, Expr, RealFunction};
use nabla_ts::extrema::{gmvt_witnesses, mvt_witnesses, rolle_witnesses, WitnessPair};
use nabla_ts::series::BigRational;
use nabla_ts::fracdiff::{nabla, FracOrder, NablaConfig};
use nabla_ts::timescale::TimeScale;
use nabla_ts::verify::{parse_suites, run_suite, SuiteReport, DEFAULT_CASES};
use nabla_ts::{
    backward_expansion, chain_c_point, chain_integral, compose_monotone, general_product_rule,
    inverse_nabla, power_sum, power_sum_bruteforce,
};

#[derive(Parser)]
#[command(
    name = "nabla",
    version,
    about = "Nabla fractional derivatives on time scales",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the nabla derivative of a function at one point.
    Deriv(DerivArgs),
    /// Find interior witnesses with each derivative sign around zero.
    Rolle(WindowArgs),
    /// Find witnesses whose derivative sandwiches the mean slope.
    Mvt(WindowArgs),
    /// Find witnesses of the generalized mean value chain against a
    /// second, increasing function.
    Gmvt(GmvtArgs),
    /// Chain rules: integral form, intermediate-point certificate,
    /// monotone composition across the image scale, inverse derivative.
    Chain(ChainArgs),
    /// Series identities: multi-factor product rule, power sums with an
    /// exact rational path, backward telescoping expansion.
    Series(SeriesArgs),
    /// Run the seeded randomized property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DerivArgs {
    /// Time scale: Z, N, hZ:<step>, interval:<a>:<b>, finite:<v,...>,
    /// union:(point:<v>;interval:<a>:<b>;...).
    #[arg(long, allow_hyphen_values = true)]
    ts: String,
    /// Function expression in the variable t.
    #[arg(long = "fn", allow_hyphen_values = true)]
    func: String,
    /// Evaluation point.
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
    /// Derivative order p/q in (0, 1].
    #[arg(long)]
    alpha: String,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, allow_hyphen_values = true)]
    ts: String,
    #[arg(long = "fn", allow_hyphen_values = true)]
    func: String,
    /// Left end of the closed search window.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Right end of the closed search window.
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long)]
    alpha: String,
}

#[derive(Args)]
struct GmvtArgs {
    #[arg(long, allow_hyphen_values = true)]
    ts: String,
    #[arg(long = "fn", allow_hyphen_values = true)]
    func: String,
    /// Denominator function; its derivative must stay positive on the
    /// searched points.
    #[arg(long = "gn", allow_hyphen_values = true)]
    gfunc: String,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long)]
    alpha: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainMode {
    /// Integral-form chain rule value at --at.
    Integral,
    /// Intermediate-point certificate at --at.
    Cpoint,
    /// Composition through the image scale of increasing --gn at --at.
    Monotone,
    /// Derivative of the inverse function at image point --y.
    Inverse,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long, value_enum)]
    mode: ChainMode,
    #[arg(long, allow_hyphen_values = true)]
    ts: String,
    /// Outer function f (for inverse: the function to invert).
    #[arg(long = "fn", allow_hyphen_values = true)]
    func: String,
    /// Inner function g (integral, cpoint, monotone).
    #[arg(long = "gn", allow_hyphen_values = true)]
    gfunc: Option<String>,
    /// Evaluation point (integral, cpoint, monotone).
    #[arg(long, allow_negative_numbers = true)]
    at: Option<f64>,
    /// Image point y = f(x) (inverse).
    #[arg(long, allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long)]
    alpha: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesMode {
    /// Product rule over every --fn factor, against the expanded product.
    Product,
    /// Closed-form power sum of order --m, against brute force.
    Powersum,
    /// Backward telescoping expansion from --anchor up to --at.
    Expand,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    mode: SeriesMode,
    #[arg(long, allow_hyphen_values = true)]
    ts: String,
    /// Function expression; repeat the flag for product factors.
    #[arg(long = "fn", allow_hyphen_values = true)]
    func: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    at: f64,
    /// Power-sum order (powersum).
    #[arg(long)]
    m: Option<u32>,
    /// Expansion anchor point r ≤ --at on the backward orbit (expand).
    #[arg(long, allow_negative_numbers = true)]
    anchor: Option<f64>,
    #[arg(long)]
    alpha: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// all, fracdiff, mvt, chain, or series.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CASES)]
    cases: u64,
}

// ---------------------------------------------------------------------
// Structured output document.
// ---------------------------------------------------------------------

enum Json {
    Null,
    Bool(bool),
    F(f64),
    U(u64),
    Str(String),
    Map(Vec<(&'static str, Json)>),
    Arr(Vec<Json>),
}

fn render(v: &Json, indent: usize, out: &mut String) {
    match v {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        // 17 significant digits round-trip every finite double.
        Json::F(x) if x.is_finite() => {
            let _ = write!(out, "{x:.16e}");
        }
        Json::F(_) => out.push_str("null"),
        Json::U(n) => {
            let _ = write!(out, "{n}");
        }
        Json::Str(s) => escape_into(s, out),
        Json::Map(entries) if entries.is_empty() => out.push_str("{}"),
        Json::Map(entries) => {
            out.push_str("{\n");
            for (i, (key, val)) in entries.iter().enumerate() {
                pad(indent + 2, out);
                escape_into(key, out);
                out.push_str(": ");
                render(val, indent + 2, out);
                if i + 1 < entries.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push('}');
        }
        Json::Arr(items) if items.is_empty() => out.push_str("[]"),
        Json::Arr(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(indent + 2, out);
                render(item, indent + 2, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push(']');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push(' ');
    }
}

fn escape_into(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn document(
    command: &str,
    inputs: Vec<(&'static str, Json)>,
    result: Json,
    diagnostics: Vec<(&'static str, Json)>,
) -> Json {
    Json::Map(vec![
        ("command", Json::Str(command.into())),
        ("inputs", Json::Map(inputs)),
        ("result", result),
        ("diagnostics", Json::Map(diagnostics)),
    ])
}

// ---------------------------------------------------------------------
// Failure classification and exit codes.
// ---------------------------------------------------------------------

struct Failure {
    class: &'static str,
    code: u8,
    message: String,
    /// A document to print anyway (suite reports carry the counterexample).
    doc: Option<Json>,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure { class: "parse", code: 2, message: message.into(), doc: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (class, code) = match e {
            Error::Parse { .. } => ("parse", 2),
            Error::Inconclusive { .. } => ("inconclusive", 3),
            _ => ("domain", 1),
        };
        Failure { class, code, message: e.to_string(), doc: None }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            let line = line.strip_prefix("error: ").unwrap_or(line);
            eprintln!("error: parse: {line}");
            return ExitCode::from(2);
        }
    };

    let mut cfg = NablaConfig::default();
    if let Ok(text) = std::env::var("NABLA_SCALE_TOL") {
        match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => cfg.tol = v,
            _ => {
                eprintln!(
                    "error: parse: NABLA_SCALE_TOL must be a positive decimal literal, got {text:?}"
                );
                return ExitCode::from(2);
            }
        }
    }

    match run(&cli.command, &cfg) {
        Ok(doc) => {
            print_doc(&doc);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(doc) = &failure.doc {
                print_doc(doc);
            }
            eprintln!("error: {}: {}", failure.class, failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn print_doc(doc: &Json) {
    use std::io::Write;

    let mut text = String::new();
    render(doc, 0, &mut text);
    text.push('\n');
    // A closed pipe (for example `nabla ... | head`) is a normal way to
    // stop reading; stop writing without panicking and let the exit code
    // reflect the computation, not the pipe.
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn run(cmd: &Cmd, cfg: &NablaConfig) -> Result<Json, Failure> {
    match cmd {
        Cmd::Deriv(a) => run_deriv(a, cfg),
        Cmd::Rolle(a) => run_window("rolle", a, cfg),
        Cmd::Mvt(a) => run_window("mvt", a, cfg),
        Cmd::Gmvt(a) => run_gmvt(a, cfg),
        Cmd::Chain(a) => run_chain(a, cfg),
        Cmd::Series(a) => run_series(a, cfg),
        Cmd::Verify(a) => run_verify(a),
    }
}

fn run_deriv(a: &DerivArgs, cfg: &NablaConfig) -> Result<Json, Failure> {
    let ts = TimeScale::parse(&a.ts)?;
    let f = parse_function(&a.func)?;
    let alpha = FracOrder::from_str(&a.alpha)?;
    let res = nabla(&ts, &f, a.at, alpha, cfg)?;
    Ok(document(
        "deriv",
        vec![
            ("ts", Json::Str(a.ts.clone())),
            ("fn", Json::Str(a.func.clone())),
            ("at", Json::F(a.at)),
            ("alpha", Json::Str(alpha.to_string())),
            ("tol", Json::F(cfg.tol)),
        ],
        Json::Map(vec![
            ("value", Json::F(res.value)),
            ("method", Json::Str(format!("{:?}", res.method))),
        ]),
        vec![
            ("error_estimate", Json::F(res.error_estimate)),
            ("samples_used", Json::U(res.samples_used as u64)),
        ],
    ))
}

fn witness_result(pair: &WitnessPair) -> Json {
    Json::Map(vec![
        ("t1", Json::F(pair.t1)),
        ("t2", Json::F(pair.t2)),
        ("lhs", Json::F(pair.lhs)),
        ("mid", Json::F(pair.mid)),
        ("rhs", Json::F(pair.rhs)),
    ])
}

fn run_window(name: &str, a: &WindowArgs, cfg: &NablaConfig) -> Result<Json, Failure> {
    let ts = TimeScale::parse(&a.ts)?;
    let f = parse_function(&a.func)?;
    let alpha = FracOrder::from_str(&a.alpha)?;
    let pair = match name {
        "rolle" => rolle_witnesses(&ts, &f, a.a, a.b, alpha, cfg)?,
        _ => mvt_witnesses(&ts, &f, a.a, a.b, alpha, cfg)?,
    };
    Ok(document(
        name,
        vec![
            ("ts", Json::Str(a.ts.clone())),
            ("fn", Json::Str(a.func.clone())),
            ("a", Json::F(a.a)),
            ("b", Json::F(a.b)),
            ("alpha", Json::Str(alpha.to_string())),
            ("tol", Json::F(cfg.tol)),
        ],
        witness_result(&pair),
        vec![("chain_holds", Json::Bool(pair.chain_holds(1e-9)))],
    ))
}

fn run_gmvt(a: &GmvtArgs, cfg: &NablaConfig) -> Result<Json, Failure> {
    let ts = TimeScale::parse(&a.ts)?;
    let f = parse_function(&a.func)?;
    let g = parse_function(&a.gfunc)?;
    let alpha = FracOrder::from_str(&a.alpha)?;
    let pair = gmvt_witnesses(&ts, &f, &g, a.a, a.b, alpha, cfg)?;
    Ok(document(
        "gmvt",
        vec![
            ("ts", Json::Str(a.ts.clone())),
            ("fn", Json::Str(a.func.clone())),
            ("gn", Json::Str(a.gfunc.clone())),
            ("a", Json::F(a.a)),
            ("b", Json::F(a.b)),
            ("alpha", Json::Str(alpha.to_string())),
            ("tol", Json::F(cfg.tol)),
        ],
        witness_result(&pair),
        vec![("chain_holds", Json::Bool(pair.chain_holds(1e-9)))],
    ))
}

fn need<T: Copy>(v: Option<T>, flag: &str, mode: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::parse(format!("chain --mode {mode} requires {flag}")))
}

fn run_chain(a: &ChainArgs, cfg: &NablaConfig) -> Result<Json, Failure> {
    let ts = TimeScale::parse(&a.ts)?;
    let f = parse_function(&a.func)?;
    let alpha = FracOrder::from_str(&a.alpha)?;
    let mode_name = match a.mode {
        ChainMode::Integral => "integral",
        ChainMode::Cpoint => "cpoint",
        ChainMode::Monotone => "monotone",
        ChainMode::Inverse => "inverse",
    };
    let need_g = || -> Result<RealFunction, Failure> {
        match &a.gfunc {
            Some(src) => Ok(parse_function(src)?),
            None => Err(Failure::parse(format!("chain --mode {mode_name} requires --gn"))),
        }
    };

    let mut inputs = vec![
        ("mode", Json::Str(mode_name.into())),
        ("ts", Json::Str(a.ts.clone())),
        ("fn", Json::Str(a.func.clone())),
    ];
    if let Some(g) = &a.gfunc {
        inputs.push(("gn", Json::Str(g.clone())));
    }
    if let Some(at) = a.at {
        inputs.push(("at", Json::F(at)));
    }
    if let Some(y) = a.y {
        inputs.push(("y", Json::F(y)));
    }
    inputs.push(("alpha", Json::Str(alpha.to_string())));
    inputs.push(("tol", Json::F(cfg.tol)));

    let (result, diagnostics) = match a.mode {
        ChainMode::Integral => {
            let g = need_g()?;
            let t = need(a.at, "--at", mode_name)?;
            let value = chain_integral(&ts, &f, &g, t, alpha, cfg)?;
            let direct = nabla(&ts, &f.compose(&g), t, alpha, cfg)?.value;
            (
                Json::Map(vec![("value", Json::F(value))]),
                vec![
                    ("direct", Json::F(direct)),
                    ("difference", Json::F(value - direct)),
                ],
            )
        }
        ChainMode::Cpoint => {
            let g = need_g()?;
            let t = need(a.at, "--at", mode_name)?;
            let cert = chain_c_point(&ts, &f, &g, t, alpha, cfg)?;
            (
                Json::Map(vec![
                    ("c", Json::F(cert.c)),
                    ("lhs", Json::F(cert.lhs)),
                    ("rhs", Json::F(cert.rhs)),
                    ("residual", Json::F(cert.residual)),
                ]),
                Vec::new(),
            )
        }
        ChainMode::Monotone => {
            let g = need_g()?;
            let t = need(a.at, "--at", mode_name)?;
            let value = compose_monotone(&ts, &g, &f, t, alpha, cfg)?;
            let direct = nabla(&ts, &f.compose(&g), t, alpha, cfg)?.value;
            (
                Json::Map(vec![("value", Json::F(value))]),
                vec![
                    ("direct", Json::F(direct)),
                    ("difference", Json::F(value - direct)),
                ],
            )
        }
        ChainMode::Inverse => {
            let y = need(a.y, "--y", mode_name)?;
            let value = inverse_nabla(&ts, &f, y, alpha, cfg)?;
            (Json::Map(vec![("value", Json::F(value))]), Vec::new())
        }
    };
    Ok(document("chain", inputs, result, diagnostics))
}

fn run_series(a: &SeriesArgs, cfg: &NablaConfig) -> Result<Json, Failure> {
    let ts = TimeScale::parse(&a.ts)?;
    let alpha = FracOrder::from_str(&a.alpha)?;
    let fs: Vec<RealFunction> = a
        .func
        .iter()
        .map(|src| parse_function(src).map_err(Failure::from))
        .collect::<Result<_, _>>()?;
    let mode_name = match a.mode {
        SeriesMode::Product => "product",
        SeriesMode::Powersum => "powersum",
        SeriesMode::Expand => "expand",
    };
    let one = || -> Result<&RealFunction, Failure> {
        if fs.len() == 1 {
            Ok(&fs[0])
        } else {
            Err(Failure::parse(format!(
                "series --mode {mode_name} takes exactly one --fn, got {}",
                fs.len()
            )))
        }
    };

    let mut inputs = vec![
        ("mode", Json::Str(mode_name.into())),
        ("ts", Json::Str(a.ts.clone())),
        ("fn", Json::Arr(a.func.iter().map(|s| Json::Str(s.clone())).collect())),
        ("at", Json::F(a.at)),
    ];
    if let Some(m) = a.m {
        inputs.push(("m", Json::U(u64::from(m))));
    }
    if let Some(r) = a.anchor {
        inputs.push(("anchor", Json::F(r)));
    }
    inputs.push(("alpha", Json::Str(alpha.to_string())));
    inputs.push(("tol", Json::F(cfg.tol)));

    let (result, diagnostics) = match a.mode {
        SeriesMode::Product => {
            let value = general_product_rule(&ts, &fs, a.at, alpha, cfg)?;
            let product_expr = fs[1..]
                .iter()
                .fold(fs[0].body().clone(), |acc, f| {
                    Expr::Mul(Box::new(acc), Box::new(f.body().clone()))
                });
            let direct = nabla(&ts, &RealFunction::from_expr(product_expr), a.at, alpha, cfg)?.value;
            (
                Json::Map(vec![("value", Json::F(value))]),
                vec![
                    ("direct", Json::F(direct)),
                    ("difference", Json::F(value - direct)),
                ],
            )
        }
        SeriesMode::Powersum => {
            let f = one()?;
            let m = need(a.m, "--m", mode_name)?;
            let closed = power_sum(&ts, f, a.at, alpha, m, cfg)?;
            let brute = power_sum_bruteforce(&ts, f, a.at, m)?;
            let exact_str = |e: &Option<BigRational>| match e {
                Some(q) => Json::Str(q.to_string()),
                None => Json::Null,
            };
            (
                Json::Map(vec![
                    ("value", Json::F(closed.value)),
                    ("exact", exact_str(&closed.exact)),
                ]),
                vec![
                    ("bruteforce", Json::F(brute.value)),
                    ("bruteforce_exact", exact_str(&brute.exact)),
                    ("difference", Json::F(closed.value - brute.value)),
                ],
            )
        }
        SeriesMode::Expand => {
            let f = one()?;
            let r = need(a.anchor, "--anchor", mode_name)?;
            let value = backward_expansion(&ts, f, a.at, r, alpha, cfg)?;
            let direct = f.eval(a.at)?;
            (
                Json::Map(vec![("value", Json::F(value))]),
                vec![
                    ("direct", Json::F(direct)),
                    ("difference", Json::F(value - direct)),
                ],
            )
        }
    };
    Ok(document("series", inputs, result, diagnostics))
}

fn suite_json(report: &SuiteReport) -> Json {
    Json::Map(vec![
        ("suite", Json::Str(report.suite.into())),
        ("seed", Json::U(report.seed)),
        ("cases", Json::U(report.cases)),
        ("checks", Json::U(report.checks)),
        ("failures", Json::U(report.failures)),
        (
            "first_failure",
            match &report.first_failure {
                Some(text) => Json::Str(text.clone()),
                None => Json::Null,
            },
        ),
    ])
}

fn run_verify(a: &VerifyArgs) -> Result<Json, Failure> {
    let suites = parse_suites(&a.suite)
        .ok_or_else(|| Failure::parse(format!("unknown suite {:?}", a.suite)))?;
    let reports: Vec<SuiteReport> =
        suites.iter().map(|s| run_suite(*s, a.seed, a.cases)).collect();
    let passed = reports.iter().all(SuiteReport::passed);
    let doc = document(
        "verify",
        vec![
            ("suite", Json::Str(a.suite.clone())),
            ("seed", Json::U(a.seed)),
            ("cases", Json::U(a.cases)),
        ],
        Json::Map(vec![
            ("passed", Json::Bool(passed)),
            ("suites", Json::Arr(reports.iter().map(suite_json).collect())),
        ]),
        Vec::new(),
    );
    if passed {
        Ok(doc)
    } else {
        let failed: Vec<&str> =
            reports.iter().filter(|r| !r.passed()).map(|r| r.suite).collect();
        let first = reports
            .iter()
            .find_map(|r| r.first_failure.as_deref())
            .unwrap_or("see report");
        Err(Failure {
            class: "suite",
            code: 4,
            message: format!("suite(s) {} failed; first counterexample: {first}", failed.join(",")),
            doc: Some(doc),
        })
    }
}
