//! `spoq`: command-line driver for the SPO_q(2n|2m) verification engine.
//!
//! Structured output is JSON on stdout; diagnostics and timings go to stderr.
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spoq_core::frt::{self, t_alphabet, FrtAlgebra};
use spoq_core::graded::GradedIndex;
use spoq_core::qscalars::{parse_rational, rat, RationalFunction as RF, Scalar};
use spoq_core::quadalg::{quotient_dims, FreeElement, Mode, Presentation, RewriteSystem};
use spoq_core::report::{self, CheckResult};
use spoq_core::rform;
use spoq_core::rmatrix::{self, Metric, QMode, SpoData};
use spoq_core::suite::{self, Points, Suite, SuiteConfig, Timed};
use spoq_core::weyl::{self, Source};

#[derive(Parser)]
#[command(name = "spoq", version, about = "Exact verification of the quantum supergroup SPO_q(2n|2m) over Q(q)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Metric JSON file, or "derive" to run the metric derivation.
    #[arg(long)]
    metric: Option<String>,
    /// Specialization points: comma-separated rationals, "symbolic", "auto", or "random:K".
    #[arg(long, default_value = "auto")]
    q_spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_degree: usize,
    /// Include per-check timings in the JSON report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build R and write it as JSON.
    RMatrix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Metric utilities.
    Metric {
        #[command(subcommand)]
        cmd: MetricCmd,
    },
    /// Graded Yang–Baxter equation for R.
    Ybe {
        #[command(flatten)]
        common: Common,
    },
    /// Minimal polynomial of R^ and K in its span.
    Minpoly {
        #[command(flatten)]
        common: Common,
    },
    /// FRT bialgebra identities.
    #[command(alias = "frt")]
    FrtCheck {
        #[command(flatten)]
        common: Common,
        /// Also run the SPO_q identities.
        #[arg(long)]
        spo: bool,
    },
    /// SPO_q identities and the S^2 law.
    SpoCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Universal r-form axioms and well-definedness.
    RformCheck {
        #[command(flatten)]
        common: Common,
        /// Well-definedness on SPO_q (including Q - 1) instead of A(R).
        #[arg(long)]
        spo: bool,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
    },
    /// Evaluate rho(a, b) on monomials in the t(i,j).
    RformEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Quantum Weyl superalgebra: relations, checks, dimensions.
    Weyl {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weyl: WeylArgs,
        #[arg(long)]
        check: bool,
        #[arg(long)]
        hilbert: Option<usize>,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Cumulative dimensions of the filtered pieces of a quotient algebra.
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weyl: WeylArgs,
        #[arg(long, value_enum, default_value_t = Algebra::Weyl)]
        algebra: Algebra,
    },
    /// Normal form of a word in the Weyl algebra.
    Nf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weyl: WeylArgs,
        #[arg(long)]
        word: String,
    },
    /// Export R, relations, the r-form table or a Weyl presentation.
    Export {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weyl: WeylArgs,
        what: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_enum, default_value_t = Algebra::Weyl)]
        algebra: Algebra,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every suite.
    All {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        weyl: WeylArgs,
    },
}

#[derive(Subcommand)]
enum MetricCmd {
    /// Search the ansatz c_i = ±q^p, |p| <= bound.
    Derive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
}

#[derive(Args, Clone)]
struct WeylArgs {
    /// Deformation parameter c (a rational function of q).
    #[arg(long, default_value = "0")]
    c: String,
    #[arg(long, default_value = "explicit")]
    source: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Latex,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Algebra {
    Weyl,
    Frt,
    Spo,
}

/// Input errors map to exit code 2.
#[derive(Debug)]
struct InvalidInput(String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(InvalidInput(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InvalidInput>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn load_data(c: &Common) -> Result<SpoData> {
    if c.n + c.m == 0 {
        return Err(invalid("n + m must be positive"));
    }
    let mode = QMode::from_env();
    let idx = GradedIndex::new(c.n, c.m);
    let metric = match c.metric.as_deref() {
        None => return SpoData::standard_in(c.n, c.m, mode).map_err(|e| invalid(e.to_string())),
        Some("derive") => rmatrix::derive_metric(c.n, c.m, (c.n + c.m) as i64 + 1, mode)?.metric,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{path}: {e}")))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("{path}: {e}")))?;
            Metric::from_json(&v).map_err(|e| invalid(format!("{path}: {e}")))?
        }
    };
    SpoData::new(idx, metric).map_err(|e| invalid(e.to_string()))
}

fn parse_points(c: &Common) -> Result<Points> {
    let s = c.q_spec.trim();
    if s == "auto" {
        return Ok(Points::Auto);
    }
    if s == "symbolic" {
        return Ok(Points::Symbolic);
    }
    if let Some(k) = s.strip_prefix("random:") {
        let k: usize = k.parse().map_err(|_| invalid(format!("bad point count in {s}")))?;
        return Ok(Points::Specialized(suite::random_points(c.seed, k)));
    }
    let mut pts = Vec::new();
    for part in s.split(',') {
        let x = parse_rational(part.trim()).map_err(|e| invalid(format!("q-spec {part}: {e}")))?;
        if x == rat(0, 1) || x == rat(1, 1) || x == rat(-1, 1) {
            return Err(invalid(format!("q-spec value {part} must not be 0 or ±1")));
        }
        if pts.contains(&x) {
            return Err(invalid(format!("q-spec value {part} repeated")));
        }
        pts.push(x);
    }
    Ok(Points::Specialized(pts))
}

fn parse_c(w: &WeylArgs) -> Result<RF> {
    RF::parse(&w.c).map_err(|e| invalid(format!("c = {}: {e}", w.c)))
}

fn parse_source(w: &WeylArgs) -> Result<Source> {
    Source::parse(&w.source).ok_or_else(|| invalid(format!("unknown source {}", w.source)))
}

fn config(c: &Common) -> Result<SuiteConfig> {
    Ok(SuiteConfig { points: parse_points(c)?, max_degree: c.max_degree, ..SuiteConfig::default() })
}

fn config_json(c: &Common, data: &SpoData) -> Value {
    json!({
        "n": c.n,
        "m": c.m,
        "mode": data.mode().name(),
        "metric": data.metric.to_json(),
        "q_spec": c.q_spec,
        "seed": c.seed,
        "max_degree": c.max_degree,
        "metric_cache_version": rmatrix::cache_version(),
    })
}

fn emit(v: &Value) {
    print_out(&(serde_json::to_string_pretty(v).expect("serializable") + "\n"));
}

/// Write to stdout, tolerating a closed pipe.
fn print_out(s: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

/// Print a report; returns whether every check passed.
fn report(command: &str, c: &Common, data: &SpoData, checks: Vec<Timed>, extra: Option<Value>) -> bool {
    for t in &checks {
        eprintln!("[{:>8.3}s] {} {}", t.elapsed.as_secs_f64(), if t.result.passed { "ok  " } else { "FAIL" }, t.result.anchor);
    }
    let results: Vec<CheckResult> = checks.iter().map(|t| t.result.clone()).collect();
    let passed = report::all_passed(&results);
    let mut list = report::to_json(&results);
    if c.timing {
        for (v, t) in list.as_array_mut().expect("array").iter_mut().zip(&checks) {
            v["seconds"] = json!(t.elapsed.as_secs_f64());
        }
    }
    let mut out = json!({"command": command, "config": config_json(c, data), "checks": list, "passed": passed});
    if let Some(x) = extra {
        out["extra"] = x;
    }
    emit(&out);
    passed
}

fn single(result: CheckResult, t: Instant) -> Vec<Timed> {
    vec![Timed { result, elapsed: t.elapsed() }]
}

fn weyl_presentation(data: &SpoData, w: &WeylArgs) -> Result<weyl::WeylPresentation> {
    let c = parse_c(w)?;
    let source = parse_source(w)?;
    if source == Source::Explicit && data.idx.n == 0 {
        eprintln!("note: for n = 0 the explicit list uses system (I) in place of the t-relation");
    }
    Ok(weyl::build_weyl(data, &c, source))
}

fn presentation_for(data: &SpoData, w: &WeylArgs, algebra: Algebra) -> Result<Presentation<RF>> {
    Ok(match algebra {
        Algebra::Weyl => weyl_presentation(data, w)?.presentation(),
        Algebra::Frt => FrtAlgebra::new(data, false).presentation,
        Algebra::Spo => FrtAlgebra::new(data, true).presentation,
    })
}

fn hilbert_dims(p: &Presentation<RF>, max_d: usize, points: &Points, r: i32) -> Result<(Vec<usize>, String)> {
    let sym = matches!(points, Points::Symbolic) || (matches!(points, Points::Auto) && r <= 1);
    if sym {
        return Ok((quotient_dims(p, max_d), Mode::Symbolic.label()));
    }
    let q0 = match points {
        Points::Specialized(v) if !v.is_empty() => v[0].clone(),
        _ => rat(3, 1),
    };
    let ps = p.specialize(&q0)?;
    Ok((quotient_dims(&ps, max_d), Mode::Specialized(vec![q0]).label()))
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::RMatrix { common, out } => {
            let data = load_data(&common)?;
            let r = data.build_r().to_json();
            match out {
                Some(path) => {
                    write_file(&path, &(serde_json::to_string_pretty(&r)? + "\n"))?;
                    emit(&json!({"command": "r-matrix", "config": config_json(&common, &data), "out": path, "nnz": data.build_r().nnz()}));
                }
                None => emit(&r),
            }
            Ok(true)
        }
        Cmd::Metric { cmd: MetricCmd::Derive { n, m, bound } } => {
            if n + m == 0 || bound < (n + m) as i64 + 1 {
                return Err(invalid("need n + m > 0 and bound >= n + m + 1"));
            }
            let mode = QMode::from_env();
            let t = Instant::now();
            let d = rmatrix::derive_metric(n, m, bound, mode)?;
            eprintln!("metric derivation: {:.3}s", t.elapsed().as_secs_f64());
            let cached = rmatrix::cached_metric(n, m, mode);
            emit(&json!({
                "command": "metric derive",
                "n": n,
                "m": m,
                "bound": bound,
                "metric": d.metric.to_json(),
                "accepted": d.all.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
                "inspected": d.inspected,
                "gauge": d.gauge,
                "matches_cache": cached.as_ref().map(|c| *c == d.metric),
            }));
            Ok(true)
        }
        Cmd::Ybe { common } => {
            let data = load_data(&common)?;
            let t = Instant::now();
            let r = suite::check_ybe(&data.build_r())?;
            Ok(report("ybe", &common, &data, single(r, t), None))
        }
        Cmd::Minpoly { common } => {
            let data = load_data(&common)?;
            let t = Instant::now();
            let rs = suite::check_minpoly(&data)?;
            let el = t.elapsed() / rs.len() as u32;
            Ok(report("minpoly", &common, &data, rs.into_iter().map(|result| Timed { result, elapsed: el }).collect(), None))
        }
        Cmd::FrtCheck { common, spo } => {
            let data = load_data(&common)?;
            let cfg = config(&common)?;
            let mut checks = suite::run_suite(&data, Suite::Frt, &cfg)?;
            if spo {
                checks.extend(suite::run_suite(&data, Suite::Spo, &cfg)?);
            }
            Ok(report("frt-check", &common, &data, checks, None))
        }
        Cmd::SpoCheck { common } => {
            let data = load_data(&common)?;
            let checks = suite::run_suite(&data, Suite::Spo, &config(&common)?)?;
            Ok(report("spo-check", &common, &data, checks, None))
        }
        Cmd::RformCheck { common, spo, max_len } => {
            let data = load_data(&common)?;
            let cfg = SuiteConfig { spo, max_len, ..config(&common)? };
            let checks = suite::run_suite(&data, Suite::RForm, &cfg)?;
            Ok(report("rform-check", &common, &data, checks, None))
        }
        Cmd::RformEval { common, a, b, max_len } => {
            let data = load_data(&common)?;
            let alpha = t_alphabet(&data.idx);
            let wa = alpha.parse_word(&a).map_err(|e| invalid(e.to_string()))?;
            let wb = alpha.parse_word(&b).map_err(|e| invalid(e.to_string()))?;
            if wa.len() > max_len || wb.len() > max_len {
                return Err(invalid(format!("word length exceeds --max-len {max_len}")));
            }
            let mut rho = rform::rform_of(&data);
            let value = rho.eval_words(&wa, &wb);
            emit(&json!({"command": "rform-eval", "config": config_json(&common, &data), "a": a, "b": b, "value": value.to_string()}));
            Ok(true)
        }
        Cmd::Weyl { common, weyl: w, check, hilbert, export } => {
            let data = load_data(&common)?;
            let wp = weyl_presentation(&data, &w)?;
            let p = wp.presentation();
            let mut extra = json!({
                "source": wp.source.name(),
                "c": wp.c.to_string(),
                "b_tilde": "b~(e_i (x) e_j) = C_ij",
                "relations": wp.relations.iter().map(|(tag, v)| json!({"tag": tag, "relation": weyl::vec_string(v)})).collect::<Vec<_>>(),
            });
            if let Some(d) = hilbert {
                let (dims, mode) = hilbert_dims(&p, d, &parse_points(&common)?, data.idx.r())?;
                extra["hilbert"] = json!({"cumulative_dims": dims, "mode": mode,
                    "ordered_monomials": weyl::ordered_monomial_counts(data.idx.n, data.idx.m, d, true)});
            }
            if let Some(path) = export {
                write_file(&path, &(serde_json::to_string_pretty(&p.to_json())? + "\n"))?;
                extra["export"] = json!(path);
            }
            let checks = if check {
                let cfg = SuiteConfig { c: wp.c.clone(), ..config(&common)? };
                suite::run_suite(&data, Suite::Weyl, &cfg)?
            } else {
                Vec::new()
            };
            Ok(report("weyl", &common, &data, checks, Some(extra)))
        }
        Cmd::Hilbert { common, weyl: w, algebra } => {
            let data = load_data(&common)?;
            let p = presentation_for(&data, &w, algebra)?;
            let (dims, mode) = hilbert_dims(&p, common.max_degree, &parse_points(&common)?, data.idx.r())?;
            emit(&json!({"command": "hilbert", "config": config_json(&common, &data), "cumulative_dims": dims, "mode": mode}));
            Ok(true)
        }
        Cmd::Nf { common, weyl: w, word } => {
            let data = load_data(&common)?;
            let p = weyl_presentation(&data, &w)?.presentation();
            let x = p.alphabet.parse_word(&word).map_err(|e| invalid(e.to_string()))?;
            let rw = RewriteSystem::new(&p, &weyl::weyl_order(&data.idx)).map_err(|e| anyhow!(e.to_string()))?;
            let nf = rw.normal_form(&FreeElement::word(x));
            emit(&json!({"command": "nf", "config": config_json(&common, &data), "word": word, "normal_form": nf.display(&p.alphabet), "terms": nf.to_json(&p.alphabet)}));
            Ok(true)
        }
        Cmd::Export { common, weyl: w, what, format, algebra, out } => {
            let data = load_data(&common)?;
            let text = export(&data, &w, &what, format, algebra)?;
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print_out(&text),
            }
            Ok(true)
        }
        Cmd::All { common, weyl: w } => {
            let data = load_data(&common)?;
            let cfg = SuiteConfig { c: parse_c(&w)?, ..config(&common)? };
            let checks = suite::run_suite(&data, Suite::All, &cfg)?;
            Ok(report("all", &common, &data, checks, None))
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn export(data: &SpoData, w: &WeylArgs, what: &str, format: Format, algebra: Algebra) -> Result<String> {
    let idx = &data.idx;
    match (what, format) {
        ("rmatrix", Format::Json) => Ok(serde_json::to_string_pretty(&data.build_r().to_json())? + "\n"),
        ("rmatrix", Format::Latex) => {
            let mut s = String::new();
            for ((i, j, k, l), c) in data.r_table() {
                s.push_str(&format!("R_{{{i},{j}}}^{{{k},{l}}} = {} \\\\\n", latex_scalar(&c.to_string())));
            }
            Ok(s)
        }
        ("relations" | "weyl", Format::Json) => Ok(serde_json::to_string_pretty(&presentation_for(data, w, algebra)?.to_json())? + "\n"),
        ("relations" | "weyl", Format::Latex) => {
            let mut s = String::new();
            if algebra == Algebra::Weyl {
                for (_, v) in weyl_presentation(data, w)?.relations {
                    s.push_str(&latex_weyl(&v));
                    s.push_str(" \\\\\n");
                }
            } else {
                let p = presentation_for(data, w, algebra)?;
                for r in &p.relations {
                    s.push_str(&format!("{} = 0 \\\\\n", latex_terms(r.terms().iter().map(|(wd, c)| (latex_word(&p.alphabet.word_string(wd)), c.clone())))));
                }
            }
            Ok(s)
        }
        ("rform-table", f) => {
            let rho = rform::rform_of(data);
            let pairs: Vec<(i32, i32)> = idx.indices().into_iter().flat_map(|i| idx.indices().into_iter().map(move |j| (i, j))).collect();
            let mut rows = Vec::new();
            for &a in &pairs {
                for &b in &pairs {
                    let v = rho.gen_value(frt::t_gen(idx, a.0, a.1), frt::t_gen(idx, b.0, b.1));
                    if !v.is_zero() {
                        rows.push((a, b, v));
                    }
                }
            }
            Ok(match f {
                Format::Json => {
                    let v: Vec<Value> = rows.iter().map(|(a, b, v)| json!({"a": frt::t_name(a.0, a.1), "b": frt::t_name(b.0, b.1), "value": v.to_string()})).collect();
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Latex => rows
                    .iter()
                    .map(|(a, b, v)| format!("\\rho(t_{{{},{}}}, t_{{{},{}}}) = {} \\\\\n", a.0, a.1, b.0, b.1, latex_scalar(&v.to_string())))
                    .collect(),
            })
        }
        _ => Err(invalid(format!("unknown export target {what}"))),
    }
}

/// q^-2 → q^{-2}, 3*q → 3q.
fn latex_scalar(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '^' => {
                let mut e = String::new();
                if chars.peek() == Some(&'-') {
                    e.push(chars.next().unwrap());
                }
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    e.push(*d);
                    chars.next();
                }
                out.push_str(&format!("^{{{e}}}"));
            }
            '*' => {}
            _ => out.push(ch),
        }
    }
    out
}

/// "x-1 x1" → "x_{-1} x_{1}"
fn latex_word(w: &str) -> String {
    w.split_whitespace().map(|g| match g.strip_prefix('x') {
        Some(i) => format!("x_{{{i}}}"),
        None => g.replace("t(", "t_{").replace(')', "}"),
    }).collect::<Vec<_>>().join(" ")
}

fn latex_terms(terms: impl Iterator<Item = (String, RF)>) -> String {
    let mut s = String::new();
    for (w, c) in terms {
        let cs = if c.is_one() {
            String::new()
        } else if c.neg().is_one() {
            "-".into()
        } else {
            format!("\\left({}\\right) ", latex_scalar(&c.to_string()))
        };
        if !s.is_empty() {
            s.push_str(" + ");
        }
        s.push_str(&format!("{cs}{w}"));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn latex_weyl(v: &weyl::QuadVec<RF>) -> String {
    let lhs = latex_terms(v.iter().filter(|(k, _)| !k.is_empty()).map(|(k, c)| {
        (k.iter().map(|i| format!("x_{{{i}}}")).collect::<Vec<_>>().join(" "), c.clone())
    }));
    let rhs = v.get(&vec![]).map(|c| latex_scalar(&c.neg().to_string())).unwrap_or_else(|| "0".into());
    format!("{lhs} = {rhs}")
}
