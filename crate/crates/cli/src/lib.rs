//! Command-line front end for `kfree-core`.
//!
//! [`run`] parses arguments, dispatches to one subcommand and returns the
//! exit code with the text to print, so tests can drive the CLI in process.
//! Exit codes: 0 when the predicate holds, a recovery succeeds or a suite
//! passes; 1 when it fails or a witness is found; 2 on usage or input errors.

pub mod mapfile;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use kfree_core::field::fmt_rational;
use kfree_core::freeness::{
    analyze_codim_k_subspace, charp_identity_check, is_k_free, k_fold_roots, lemma32_check, SubspaceResult,
};
use kfree_core::hilbert::{analyze_codim1_subspace, lemma42_lambda_search, roots_in_q, roots_in_quadratic, Codim1Result, LambdaSearch};
use kfree_core::operators::{
    derive_catalan_coefficients, h_q, hq_identity_check, lemma35_forward_and_back, wronskian,
    wronskian_nth_derivative_binomial, wronskian_nth_derivative_catalan,
};
use kfree_core::preserver::{
    counterexample_search, default_sample_points, recover_affine, recover_sigma_y, verify_preserves_k_root,
    verify_preserves_kfree, AffineSigmaPreserver, PreserverDecomposition, Property, Recovery, TruncatedLinearMap,
    Verdict,
};
use kfree_core::realroot::{
    count_real_roots, lemma53_witness, lemma54_check, lemma55_decompose, moment_subspace_demo,
    s_boundedness_certificate, s_membership, v_contains, SturmSequence,
};
use kfree_core::text::{parse_polynomial, TextField};
use kfree_core::{
    Automorphism, Field, FieldSpec, Polynomial, PrimeField, QPoly, QuadraticField, Rational, RationalField,
};

use mapfile::{emit_map, parse_map, AnyMap, MapField};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{what}: {source}")]
    Input { what: String, source: kfree_core::Error },
    #[error(transparent)]
    Core(#[from] kfree_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

type CliResult<T> = std::result::Result<T, CliError>;

/// What a finished invocation prints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "kfree", version, about = "Exact checks for linear maps preserving k-free polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Coefficient field: Q, sqrt:<d> or Fp:<p>. Defaults to Q.
    #[arg(long, global = true, value_parser = parse_field_spec)]
    pub field: Option<FieldSpec>,
    /// Emit a JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for randomized suites; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Args, Debug)]
pub struct PolyK {
    #[arg(allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug)]
pub struct PolyAt {
    #[arg(allow_hyphen_values = true)]
    pub poly: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Args, Debug)]
pub struct Pair {
    #[arg(allow_hyphen_values = true)]
    pub p: String,
    #[arg(allow_hyphen_values = true)]
    pub q: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    KFree,
    KRoot,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    Id,
    Conj,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Whether a polynomial is k-free.
    Kfree(PolyK),
    /// The k-fold roots of a polynomial lying in the field.
    Kroots(PolyK),
    /// Recover (a, b, c) with f(P) = c·P(aX + b) from a map file.
    Recover {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Recover f(P) = c·σ(P)(Y) from a map file.
    RecoverSigma {
        #[arg(long)]
        map: PathBuf,
    },
    /// Sample polynomials and check that the map preserves the property.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PropertyArg::Both)]
        property: PropertyArg,
    },
    /// Search structured and random polynomials for a preservation failure.
    Hunt {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Either (X − x)^k divides P or some P + λ(X − x)^k is k-free.
    Lemma32 {
        #[command(flatten)]
        at: PolyAt,
        #[arg(long)]
        k: usize,
        /// Comma-separated λ values; defaults to 0, 1, …, deg P.
        #[arg(long, allow_hyphen_values = true)]
        lambdas: Option<String>,
    },
    /// Wronskian root order versus a k-fold root in the pencil λP + μQ.
    Lemma35 {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        k: usize,
    },
    /// Check the h_Q identity for f(1), Q and P.
    HqCheck {
        #[arg(allow_hyphen_values = true)]
        f_one: String,
        #[command(flatten)]
        pair: Pair,
    },
    /// PQ′ − P′Q, and its n-th derivative by both expansions.
    Wronskian {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Derive the coefficient table of the shortened Wronskian expansion.
    CatalanDerive {
        #[arg(long)]
        n: usize,
    },
    /// Count distinct real roots, optionally on a closed interval.
    Sturm {
        #[arg(allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true, requires = "hi")]
        lo: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "lo")]
        hi: Option<String>,
    },
    /// Whether λ ∈ V(P, Q), i.e. P − λQ has a real root.
    Vset {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Whether Q ∈ S(P); prints a bound on V(Q, P) when it is.
    Sset {
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
    /// Search (b, c) separating P from (X − x)² by real-root behaviour.
    Lemma53 {
        #[command(flatten)]
        at: PolyAt,
        #[arg(long, default_value_t = 60)]
        height: u64,
    },
    /// Double root at x versus image [0, ∞) of P + λ(X − x)² for large λ.
    Lemma54(PolyAt),
    /// Split P ∈ (X − x)²Q[X] as a difference of even-degree positive multiples.
    Lemma55(PolyAt),
    /// Roots in Q or Q(√d).
    Roots {
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Search λ by height with P + λQ free of rational roots.
    Lemma42 {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 50)]
        height: u64,
    },
    /// Analyze a codimension-one subspace given by a basis.
    Codim1 {
        /// Basis polynomials; write a leading minus as `0 - ...`.
        #[arg(required = true)]
        basis: Vec<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        height: u64,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Analyze a codimension-k subspace given by a basis.
    Codimk {
        /// Basis polynomials; write a leading minus as `0 - ...`.
        #[arg(required = true)]
        basis: Vec<String>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Check X^{2k} + λ(X − x)^k = (X² + r(X − x))^k over F_p, k = p^e.
    Charp {
        #[arg(long, default_value_t = 1)]
        e: u32,
        /// Single point; all of F_p when omitted.
        #[arg(long)]
        x: Option<u64>,
        #[arg(long)]
        lambda: Option<u64>,
    },
    /// Check random members of the moment subspace for real roots.
    Moment {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the map file of P ↦ c·σ(P)(aX + b) truncated at degree n.
    EmitMap {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, value_enum, default_value_t = SigmaArg::Id)]
        sigma: SigmaArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Kfree(_) => "kfree",
            Command::Kroots(_) => "kroots",
            Command::Recover { .. } => "recover",
            Command::RecoverSigma { .. } => "recover-sigma",
            Command::Verify { .. } => "verify",
            Command::Hunt { .. } => "hunt",
            Command::Lemma32 { .. } => "lemma32",
            Command::Lemma35 { .. } => "lemma35",
            Command::HqCheck { .. } => "hq-check",
            Command::Wronskian { .. } => "wronskian",
            Command::CatalanDerive { .. } => "catalan-derive",
            Command::Sturm { .. } => "sturm",
            Command::Vset { .. } => "vset",
            Command::Sset { .. } => "sset",
            Command::Lemma53 { .. } => "lemma53",
            Command::Lemma54(_) => "lemma54",
            Command::Lemma55(_) => "lemma55",
            Command::Roots { .. } => "roots",
            Command::Lemma42 { .. } => "lemma42",
            Command::Codim1 { .. } => "codim1",
            Command::Codimk { .. } => "codimk",
            Command::Charp { .. } => "charp",
            Command::Moment { .. } => "moment",
            Command::EmitMap { .. } => "emit-map",
        }
    }
}

/// Parses `Q`, `sqrt:<d>` or `Fp:<p>`.
pub fn parse_field_spec(s: &str) -> std::result::Result<FieldSpec, String> {
    if s == "Q" {
        return Ok(FieldSpec::Rational);
    }
    if let Some(d) = s.strip_prefix("sqrt:") {
        let d: i64 = d.parse().map_err(|_| format!("bad quadratic parameter {d:?}"))?;
        QuadraticField::new(d).map_err(|e| e.to_string())?;
        return Ok(FieldSpec::Quadratic(d));
    }
    if let Some(p) = s.strip_prefix("Fp:") {
        let p: u64 = p.parse().map_err(|_| format!("bad prime {p:?}"))?;
        PrimeField::new(p).map_err(|e| e.to_string())?;
        return Ok(FieldSpec::Prime(p));
    }
    Err(format!("expected Q, sqrt:<d> or Fp:<p>, got {s:?}"))
}

/// Fields the CLI can read polynomials and map files over.
pub trait CliField: TextField + MapField {}
impl<F: TextField + MapField> CliField for F {}

macro_rules! on_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            FieldSpec::Rational => {
                let $f = RationalField;
                $body
            }
            FieldSpec::Quadratic(d) => {
                let $f = QuadraticField::new(d)?;
                $body
            }
            FieldSpec::Prime(p) => {
                let $f = PrimeField::new(p)?;
                $body
            }
        }
    };
}

macro_rules! on_map {
    ($map:expr, |$m:ident| $body:expr) => {
        match $map {
            AnyMap::Rational($m) => $body,
            AnyMap::Quadratic($m) => $body,
            AnyMap::Prime($m) => $body,
        }
    };
}

/// Text lines, a JSON object and an exit code.
struct Report {
    code: i32,
    lines: Vec<String>,
    json: Map<String, Value>,
}

impl Report {
    fn new(code: i32) -> Self {
        Report {
            code,
            lines: Vec::new(),
            json: Map::new(),
        }
    }

    fn ok(holds: bool) -> Self {
        Report::new(if holds { 0 } else { 1 })
    }

    fn line(mut self, s: impl Into<String>) -> Self {
        self.lines.push(s.into());
        self
    }

    fn field(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.json.insert(key.to_string(), v.into());
        self
    }
}

fn parse_poly<F: TextField>(f: &F, text: &str, what: &str) -> CliResult<Polynomial<F>> {
    parse_polynomial(text, f).map_err(|source| CliError::Input {
        what: what.to_string(),
        source,
    })
}

fn parse_elem<F: TextField>(f: &F, text: &str, what: &str) -> CliResult<F::Elem> {
    let p = parse_poly(f, text, what)?;
    if p.degree_or_zero() > 0 {
        return Err(CliError::Usage(format!("{what}: expected a constant, got {p}")));
    }
    Ok(p.coeff(0))
}

fn q_only(spec: FieldSpec, command: &str) -> CliResult<()> {
    if spec != FieldSpec::Rational {
        return Err(CliError::Usage(format!("{command} works over Q only, got --field {spec}")));
    }
    Ok(())
}

fn read_map(path: &PathBuf, field: Option<FieldSpec>) -> CliResult<AnyMap> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let map = parse_map(&text).map_err(|source| CliError::Input {
        what: path.display().to_string(),
        source,
    })?;
    if let Some(spec) = field.filter(|&s| s != map.spec()) {
        return Err(CliError::Usage(format!(
            "--field {spec} disagrees with the map file field {}",
            map.spec()
        )));
    }
    Ok(map)
}

fn fmt_list<F: Field>(f: &F, xs: &[F::Elem]) -> String {
    if xs.is_empty() {
        return "none".into();
    }
    xs.iter().map(|x| f.format(x)).collect::<Vec<_>>().join(", ")
}

fn json_list<F: Field>(f: &F, xs: &[F::Elem]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(f.format(x))).collect())
}

fn poly_json<F: Field>(p: &Polynomial<F>) -> Value {
    Value::String(p.to_string())
}

fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("kfree")).chain(args.into_iter().map(Into::into));
    Cli::try_parse_from(argv)
}

/// Runs one invocation. `args` excludes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let name = cli.command.name();
    match dispatch(&cli) {
        Ok(report) => {
            let stdout = if cli.json {
                let mut obj = report.json;
                obj.insert("command".into(), json!(name));
                obj.insert("exit".into(), json!(report.code));
                format!("{}\n", serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable"))
            } else {
                report.lines.iter().map(|l| format!("{l}\n")).collect()
            };
            Output {
                code: report.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => {
            if cli.json {
                let obj = json!({ "command": name, "exit": 2, "error": e.to_string() });
                Output {
                    code: 2,
                    stdout: format!("{}\n", serde_json::to_string_pretty(&obj).expect("serializable")),
                    stderr: String::new(),
                }
            } else {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("error: {e}\n"),
                }
            }
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let spec = cli.field.unwrap_or(FieldSpec::Rational);
    let threads = cli.threads.max(1);
    match &cli.command {
        Command::Kfree(a) => on_field!(spec, |f| cmd_kfree(&f, a)),
        Command::Kroots(a) => on_field!(spec, |f| cmd_kroots(&f, a)),
        Command::Recover { map, k } => {
            on_map!(read_map(map, cli.field)?, |m| cmd_recover(&m, *k))
        }
        Command::RecoverSigma { map } => on_map!(read_map(map, cli.field)?, |m| cmd_recover_sigma(&m)),
        Command::Verify {
            map,
            k,
            trials,
            seed,
            property,
        } => on_map!(read_map(map, cli.field)?, |m| cmd_verify(
            &m, *k, *trials, *seed, threads, *property
        )),
        Command::Hunt { map, k, budget, seed } => {
            on_map!(read_map(map, cli.field)?, |m| cmd_hunt(&m, *k, *budget, *seed, threads))
        }
        Command::Lemma32 { at, k, lambdas } => on_field!(spec, |f| cmd_lemma32(&f, at, *k, lambdas.as_deref())),
        Command::Lemma35 { pair, x, k } => on_field!(spec, |f| cmd_lemma35(&f, pair, x, *k)),
        Command::HqCheck { f_one, pair } => on_field!(spec, |f| cmd_hq(&f, f_one, pair)),
        Command::Wronskian { pair, n } => on_field!(spec, |f| cmd_wronskian(&f, pair, *n)),
        Command::CatalanDerive { n } => cmd_catalan(*n),
        Command::Sturm { poly, lo, hi } => {
            q_only(spec, "sturm")?;
            cmd_sturm(poly, lo.as_deref().zip(hi.as_deref()))
        }
        Command::Vset { pair, lambda } => {
            q_only(spec, "vset")?;
            cmd_vset(pair, lambda)
        }
        Command::Sset { q, p } => {
            q_only(spec, "sset")?;
            cmd_sset(q, p)
        }
        Command::Lemma53 { at, height } => {
            q_only(spec, "lemma53")?;
            cmd_lemma53(at, *height)
        }
        Command::Lemma54(at) => {
            q_only(spec, "lemma54")?;
            cmd_lemma54(at)
        }
        Command::Lemma55(at) => {
            q_only(spec, "lemma55")?;
            cmd_lemma55(at)
        }
        Command::Roots { poly } => cmd_roots(spec, poly),
        Command::Lemma42 { pair, height } => {
            q_only(spec, "lemma42")?;
            cmd_lemma42(pair, *height, threads)
        }
        Command::Codim1 {
            basis,
            n,
            height,
            trials,
            seed,
        } => {
            q_only(spec, "codim1")?;
            cmd_codim1(basis, *n, *height, *trials, *seed)
        }
        Command::Codimk { basis, k, n } => {
            q_only(spec, "codimk")?;
            cmd_codimk(basis, *k, *n)
        }
        Command::Charp { e, x, lambda } => match spec {
            FieldSpec::Prime(p) => cmd_charp(p, *e, *x, *lambda),
            other => Err(CliError::Usage(format!("charp needs --field Fp:<p>, got {other}"))),
        },
        Command::Moment { n, trials, seed } => {
            q_only(spec, "moment")?;
            cmd_moment(*n, *trials, *seed, threads)
        }
        Command::EmitMap {
            a,
            b,
            c,
            sigma,
            n,
            out,
        } => on_field!(spec, |f| cmd_emit_map(&f, [a, b, c], *sigma, *n, out.as_ref())),
    }
}

fn cmd_kfree<F: CliField>(f: &F, a: &PolyK) -> CliResult<Report> {
    let p = parse_poly(f, &a.poly, "polynomial")?;
    let v = is_k_free(&p, a.k)?;
    let mut r = Report::ok(v.is_k_free)
        .line(format!("k-free: {}", v.is_k_free))
        .field("k_free", v.is_k_free)
        .field("k", a.k)
        .field("polynomial", poly_json(&p))
        .field("witness_factor", v.witness_factor.as_ref().map(poly_json));
    if let Some(w) = &v.witness_factor {
        r = r.line(format!("witness factor: {w}"));
    }
    Ok(r)
}

fn cmd_kroots<F: CliField>(f: &F, a: &PolyK) -> CliResult<Report> {
    let p = parse_poly(f, &a.poly, "polynomial")?;
    let roots = k_fold_roots(&p, a.k)?;
    Ok(Report::new(0)
        .line(format!("k-fold roots: {}", fmt_list(f, &roots)))
        .field("k", a.k)
        .field("roots", json_list(f, &roots)))
}

fn decomposition_report<F: Field>(f: &F, d: &PreserverDecomposition<F>, with_sigma: bool) -> Report {
    let mut r = Report::new(0)
        .field("recovered", true)
        .field("sigma", d.sigma.name())
        .field("c", poly_json(&d.c))
        .field("y", poly_json(&d.y))
        .field(
            "samples",
            Value::Array(
                d.samples
                    .iter()
                    .map(|(x, y)| json!([f.format(x), f.format(y)]))
                    .collect(),
            ),
        )
        .field("exceptional", json_list(f, &d.exceptional));
    let prefix = if with_sigma {
        format!("sigma={} ", d.sigma.name())
    } else {
        String::new()
    };
    let c = d.c_constant().map(|c| f.format(&c)).unwrap_or_else(|| format!("({})", d.c));
    r = match &d.affine {
        Some((a, b)) => r
            .line(format!("{prefix}a={} b={} c={c}", f.format(a), f.format(b)))
            .field("a", f.format(a))
            .field("b", f.format(b)),
        None => r
            .line(format!("{prefix}Y={} c={c}", d.y))
            .field("a", Value::Null)
            .field("b", Value::Null),
    };
    r
}

fn refutation_report(text: String) -> Report {
    Report::new(1)
        .line(format!("refuted: {text}"))
        .field("recovered", false)
        .field("refutation", text)
}

fn cmd_recover<F: CliField>(map: &TruncatedLinearMap<F>, k: usize) -> CliResult<Report> {
    let f = map.field();
    Ok(match recover_affine(map, k, &default_sample_points(f))? {
        Recovery::Recovered(d) => decomposition_report(f, &d, false),
        Recovery::Refuted(r) => refutation_report(r.describe(f)),
    })
}

fn cmd_recover_sigma<F: CliField>(map: &TruncatedLinearMap<F>) -> CliResult<Report> {
    let f = map.field();
    Ok(match recover_sigma_y(map)? {
        Recovery::Recovered(d) => decomposition_report(f, &d, true),
        Recovery::Refuted(r) => refutation_report(r.describe(f)),
    })
}

fn verdict_report<F: Field>(mut r: Report, v: &Verdict<F>) -> Report {
    match &v.witness {
        None => r.field("witness", Value::Null),
        Some(w) => {
            r.code = 1;
            let holds_p = w.holds_for_p;
            let holds_img = w.holds_for_image;
            r.line(format!("witness: trial {}, property {}", w.index, w.property))
                .line(format!("  P = {}", w.p))
                .line(format!("  f(P) = {}", w.image))
                .line(format!("  {} holds for P: {holds_p}, for f(P): {holds_img}", w.property))
                .field(
                    "witness",
                    json!({
                        "trial": w.index,
                        "property": w.property.to_string(),
                        "p": w.p.to_string(),
                        "image": w.image.to_string(),
                        "holds_for_p": holds_p,
                        "holds_for_image": holds_img,
                    }),
                )
        }
    }
}

fn cmd_verify<F: CliField>(
    map: &TruncatedLinearMap<F>,
    k: usize,
    trials: u64,
    seed: u64,
    threads: usize,
    property: PropertyArg,
) -> CliResult<Report> {
    let ch = map.field().characteristic();
    let kfree_ok = ch == 0 || ch > k as u64;
    let props: Vec<Property> = match property {
        PropertyArg::KFree => vec![Property::KFree],
        PropertyArg::KRoot => vec![Property::KRoot],
        PropertyArg::Both if kfree_ok => vec![Property::KFree, Property::KRoot],
        PropertyArg::Both => vec![Property::KRoot],
    };
    let mut r = Report::new(0).field("trials", trials).field("seed", seed).field("k", k);
    let mut results = Map::new();
    for prop in props {
        let v = match prop {
            Property::KFree => verify_preserves_kfree(map, k, trials, seed, threads)?,
            Property::KRoot => verify_preserves_k_root(map, k, trials, seed, threads)?,
        };
        results.insert(prop.to_string(), json!(v.passed()));
        r = r.line(format!("{prop} preserved on {trials} trials: {}", v.passed()));
        if !v.passed() {
            return Ok(verdict_report(r.field("preserved", Value::Object(results)), &v));
        }
    }
    Ok(r.field("preserved", Value::Object(results)).field("witness", Value::Null))
}

fn cmd_hunt<F: CliField>(map: &TruncatedLinearMap<F>, k: usize, budget: u64, seed: u64, threads: usize) -> CliResult<Report> {
    let v = counterexample_search(map, k, budget, seed, threads)?;
    let r = Report::new(0)
        .line(format!("evaluations: {}", v.evaluations))
        .field("evaluations", v.evaluations)
        .field("seed", seed)
        .field("k", k);
    let r = if v.passed() { r.line("witness: none") } else { r };
    Ok(verdict_report(r, &v))
}

fn cmd_lemma32<F: CliField>(f: &F, at: &PolyAt, k: usize, lambdas: Option<&str>) -> CliResult<Report> {
    let p = parse_poly(f, &at.poly, "polynomial")?;
    let x = parse_elem(f, &at.x, "--x")?;
    let lambdas: Vec<F::Elem> = match lambdas {
        Some(s) => s
            .split(',')
            .map(|t| parse_elem(f, t.trim(), "--lambdas"))
            .collect::<CliResult<_>>()?,
        None => (0..=p.degree_or_zero() as i64).map(|i| f.from_int(i)).collect(),
    };
    let holds = lemma32_check(&p, &x, k, &lambdas)?;
    Ok(Report::ok(holds)
        .line(format!("holds: {holds}"))
        .field("holds", holds)
        .field("lambdas", json_list(f, &lambdas)))
}

fn cmd_lemma35<F: CliField>(f: &F, pair: &Pair, x: &str, k: usize) -> CliResult<Report> {
    let p = parse_poly(f, &pair.p, "P")?;
    let q = parse_poly(f, &pair.q, "Q")?;
    let x = parse_elem(f, x, "--x")?;
    let (lhs, rhs) = lemma35_forward_and_back(&p, &q, &x, k)?;
    Ok(Report::ok(lhs == rhs)
        .line(format!("wronskian has a (k-1)-fold root at x: {lhs}"))
        .line(format!("pencil has a k-fold root at x: {rhs}"))
        .line(format!("agree: {}", lhs == rhs))
        .field("lhs", lhs)
        .field("rhs", rhs))
}

fn cmd_hq<F: CliField>(f: &F, f_one: &str, pair: &Pair) -> CliResult<Report> {
    let f1 = parse_poly(f, f_one, "f(1)")?;
    let p = parse_poly(f, &pair.p, "P")?;
    let q = parse_poly(f, &pair.q, "Q")?;
    let h = h_q(&f1, &q, &p)?;
    let holds = hq_identity_check(&f1, &q, &p)?;
    Ok(Report::ok(holds)
        .line(format!("h_Q(P) = {h}"))
        .line(format!("identity holds: {holds}"))
        .field("h", poly_json(&h))
        .field("holds", holds))
}

fn cmd_wronskian<F: CliField>(f: &F, pair: &Pair, n: Option<usize>) -> CliResult<Report> {
    let p = parse_poly(f, &pair.p, "P")?;
    let q = parse_poly(f, &pair.q, "Q")?;
    let w = wronskian(&p, &q);
    let r = Report::new(0).line(format!("W = {w}")).field("w", poly_json(&w));
    let Some(n) = n else {
        return Ok(r);
    };
    let table = derive_catalan_coefficients(n)?;
    let iterated = w.nth_derivative(n);
    let binomial = wronskian_nth_derivative_binomial(&p, &q, n);
    let catalan = wronskian_nth_derivative_catalan(&p, &q, n, &table)?;
    let agree = binomial == iterated && catalan == iterated;
    Ok(Report {
        code: if agree { 0 } else { 1 },
        ..r
    }
    .line(format!("W^({n}) = {iterated}"))
    .line(format!("binomial expansion = {binomial}"))
    .line(format!("shortened expansion = {catalan}"))
    .line(format!("agree: {agree}"))
    .field("n", n)
    .field("derivative", poly_json(&iterated))
    .field("binomial", poly_json(&binomial))
    .field("shortened", poly_json(&catalan))
    .field("agree", agree))
}

fn cmd_catalan(n: usize) -> CliResult<Report> {
    let table = derive_catalan_coefficients(n)?;
    let mut r = Report::new(0).line(format!("coefficient of det_i in W^(n), n = 0..{n}"));
    let mut rows = Vec::new();
    for (m, row) in table.rows().iter().enumerate() {
        let entries: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        r = r.line(format!("n={m}: {}", entries.join(" ")));
        rows.push(json!(entries));
    }
    Ok(r.field("n", n).field("rows", Value::Array(rows)))
}

fn qpoly(text: &str, what: &str) -> CliResult<QPoly> {
    parse_poly(&RationalField, text, what)
}

fn qelem(text: &str, what: &str) -> CliResult<Rational> {
    parse_elem(&RationalField, text, what)
}

fn cmd_sturm(poly: &str, interval: Option<(&str, &str)>) -> CliResult<Report> {
    let p = qpoly(poly, "polynomial")?;
    let bounds = match interval {
        Some((lo, hi)) => Some((qelem(lo, "--lo")?, qelem(hi, "--hi")?)),
        None => None,
    };
    if let Some((lo, hi)) = &bounds {
        if lo > hi {
            return Err(CliError::Usage(format!("empty interval [{lo}, {hi}]")));
        }
    }
    let count = count_real_roots(&p, bounds.as_ref().map(|(a, b)| (a, b)))?;
    let chain: Vec<Value> = SturmSequence::new(&p)?.chain().iter().map(poly_json).collect();
    let label = match &bounds {
        Some((lo, hi)) => format!("real roots in [{}, {}]: {count}", fmt_rational(lo), fmt_rational(hi)),
        None => format!("real roots: {count}"),
    };
    Ok(Report::new(0)
        .line(label)
        .field("count", count)
        .field("chain", Value::Array(chain))
        .field(
            "interval",
            bounds.map(|(lo, hi)| json!([fmt_rational(&lo), fmt_rational(&hi)])),
        ))
}

fn cmd_vset(pair: &Pair, lambda: &str) -> CliResult<Report> {
    let p = qpoly(&pair.p, "P")?;
    let q = qpoly(&pair.q, "Q")?;
    let l = qelem(lambda, "--lambda")?;
    let member = v_contains(&p, &q, &l);
    Ok(Report::ok(member)
        .line(format!("lambda in V(P, Q): {member}"))
        .field("member", member))
}

fn cmd_sset(q: &str, p: &str) -> CliResult<Report> {
    let q = qpoly(q, "Q")?;
    let p = qpoly(p, "P")?;
    let member = s_membership(&q, &p)?;
    let mut r = Report::ok(member).line(format!("Q in S(P): {member}")).field("member", member);
    let bound = if member { s_boundedness_certificate(&q, &p, 64)? } else { None };
    if let Some(m) = &bound {
        r = r.line(format!("V(Q, P) lies in (-{0}, {0})", fmt_rational(m)));
    }
    Ok(r.field("bound", bound.map(|m| fmt_rational(&m))))
}

fn cmd_lemma53(at: &PolyAt, height: u64) -> CliResult<Report> {
    let p = qpoly(&at.poly, "polynomial")?;
    let x = qelem(&at.x, "--x")?;
    Ok(match lemma53_witness(&p, &x, height)? {
        Some((b, c)) => Report::new(1)
            .line(format!("witness: b={} c={}", fmt_rational(&b), fmt_rational(&c)))
            .field("witness", json!({ "b": fmt_rational(&b), "c": fmt_rational(&c) })),
        None => Report::new(0)
            .line(format!("no witness up to height {height}"))
            .field("witness", Value::Null),
    })
}

fn cmd_lemma54(at: &PolyAt) -> CliResult<Report> {
    let p = qpoly(&at.poly, "polynomial")?;
    let x = qelem(&at.x, "--x")?;
    let rep = lemma54_check(&p, &x)?;
    let agree = rep.lhs == rep.rhs;
    Ok(Report::ok(agree)
        .line(format!("(X - x)^2 divides P: {}", rep.lhs))
        .line(format!("P + lambda*(X - x)^2 has image [0, inf) at every probe: {}", rep.rhs))
        .line(format!("lambda* = {}", fmt_rational(&rep.lambda_star)))
        .line(format!("agree: {agree}"))
        .field("lhs", rep.lhs)
        .field("rhs", rep.rhs)
        .field("lambda_star", fmt_rational(&rep.lambda_star))
        .field(
            "probed",
            Value::Array(rep.probed.iter().map(|l| json!(fmt_rational(l))).collect()),
        ))
}

fn cmd_lemma55(at: &PolyAt) -> CliResult<Report> {
    let p = qpoly(&at.poly, "polynomial")?;
    let x = qelem(&at.x, "--x")?;
    let (p1, p2) = lemma55_decompose(&p, &x)?;
    Ok(Report::new(0)
        .line(format!("P1 = {p1}"))
        .line(format!("P2 = {p2}"))
        .field("p1", poly_json(&p1))
        .field("p2", poly_json(&p2)))
}

fn cmd_roots(spec: FieldSpec, poly: &str) -> CliResult<Report> {
    let (roots, method) = match spec {
        FieldSpec::Rational => {
            let f = RationalField;
            let rep = roots_in_q(&parse_poly(&f, poly, "polynomial")?)?;
            (json_list(&f, &rep.roots), format!("{:?}", rep.method))
        }
        FieldSpec::Quadratic(d) => {
            let f = QuadraticField::new(d)?;
            let rep = roots_in_quadratic(&parse_poly(&f, poly, "polynomial")?)?;
            (json_list(&f, &rep.roots), format!("{:?}", rep.method))
        }
        FieldSpec::Prime(p) => {
            let f = PrimeField::new(p)?;
            let roots = f.roots_of(&parse_poly(&f, poly, "polynomial")?)?;
            (json_list(&f, &roots), "Enumeration".to_string())
        }
    };
    let list: Vec<&str> = roots.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let text = if list.is_empty() { "none".to_string() } else { list.join(", ") };
    Ok(Report::new(0)
        .line(format!("roots: {text}"))
        .field("roots", roots.clone())
        .field("method", method))
}

fn cmd_lemma42(pair: &Pair, height: u64, threads: usize) -> CliResult<Report> {
    let p = qpoly(&pair.p, "P")?;
    let q = qpoly(&pair.q, "Q")?;
    Ok(match lemma42_lambda_search(&p, &q, height, threads)? {
        LambdaSearch::Found(l) => {
            let r = &p + &q.scalar_mul(&l);
            Report::new(0)
                .line(format!("lambda = {}", fmt_rational(&l)))
                .line(format!("P + lambda*Q = {r}"))
                .field("lambda", fmt_rational(&l))
                .field("combination", poly_json(&r))
        }
        LambdaSearch::Exhausted { height } => Report::new(1)
            .line(format!("every lambda up to height {height} leaves a rational root"))
            .field("lambda", Value::Null)
            .field("height", height),
    })
}

fn basis_of(texts: &[String]) -> CliResult<Vec<QPoly>> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| qpoly(t, &format!("basis element {i}")))
        .collect()
}

fn cmd_codim1(basis: &[String], n: usize, height: u64, trials: u64, seed: u64) -> CliResult<Report> {
    let basis = basis_of(basis)?;
    let a = analyze_codim1_subspace(&basis, n, height, trials, seed)?;
    let echelon = Value::Array(a.basis.iter().map(poly_json).collect());
    let r = Report::new(0).field("echelon", echelon);
    Ok(match a.result {
        Codim1Result::Point(x) => r
            .line(format!("common root: x = {}", fmt_rational(&x)))
            .field("result", "point")
            .field("x", fmt_rational(&x)),
        Codim1Result::Witness(w) => Report { code: 1, ..r }
            .line(format!("element without rational root: {w}"))
            .field("result", "witness")
            .field("witness", poly_json(&w)),
        Codim1Result::Inconclusive => Report { code: 1, ..r }
            .line("inconclusive")
            .field("result", "inconclusive"),
    })
}

fn cmd_codimk(basis: &[String], k: usize, n: usize) -> CliResult<Report> {
    let basis = basis_of(basis)?;
    let a = analyze_codim_k_subspace(&basis, k, n)?;
    let echelon = Value::Array(a.basis.iter().map(poly_json).collect());
    let r = Report::new(0).field("echelon", echelon).field("k", k);
    Ok(match a.result {
        SubspaceResult::FoundPoint(x) => r
            .line(format!("common k-fold root: x = {}", fmt_rational(&x)))
            .field("result", "point")
            .field("x", fmt_rational(&x)),
        SubspaceResult::KFreeWitness(w) => Report { code: 1, ..r }
            .line(format!("k-free element: {w}"))
            .field("result", "witness")
            .field("witness", poly_json(&w)),
    })
}

fn cmd_charp(p: u64, e: u32, x: Option<u64>, lambda: Option<u64>) -> CliResult<Report> {
    let xs: Vec<u64> = x.map(|x| vec![x]).unwrap_or_else(|| (0..p).collect());
    let ls: Vec<u64> = lambda.map(|l| vec![l]).unwrap_or_else(|| (0..p).collect());
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for &x in &xs {
        for &l in &ls {
            checked += 1;
            if !charp_identity_check(p, e, x, l)? {
                failures.push(json!([x, l]));
            }
        }
    }
    let mut r = Report::ok(failures.is_empty())
        .line(format!("checked {checked} pairs (x, lambda) over F_{p} with k = {p}^{e}"))
        .line(format!("failures: {}", failures.len()));
    if let Some(first) = failures.first() {
        r = r.line(format!("first failure: (x, lambda) = ({}, {})", first[0], first[1]));
    }
    Ok(r.field("checked", checked).field("failures", Value::Array(failures)))
}

fn cmd_moment(n: usize, trials: u64, seed: u64, threads: usize) -> CliResult<Report> {
    let rep = moment_subspace_demo(n, trials, seed, threads)?;
    let r = Report::ok(rep.passed())
        .line(format!("every sampled member has a real root: {}", rep.passed()))
        .field("trials", rep.trials)
        .field("seed", seed);
    Ok(match &rep.witness {
        None => r.field("witness", Value::Null),
        Some((i, p)) => r
            .line(format!("witness: trial {i}, {p}"))
            .field("witness", json!({ "trial": i, "p": p.to_string() })),
    })
}

fn cmd_emit_map<F: CliField>(
    f: &F,
    abc: [&String; 3],
    sigma: SigmaArg,
    n: usize,
    out: Option<&PathBuf>,
) -> CliResult<Report> {
    let a = parse_elem(f, abc[0], "--a")?;
    let b = parse_elem(f, abc[1], "--b")?;
    let c = parse_elem(f, abc[2], "--c")?;
    let sigma = match sigma {
        SigmaArg::Id => Automorphism::Identity,
        SigmaArg::Conj => Automorphism::Conjugation,
    };
    let map = AffineSigmaPreserver::new(f.clone(), a, b, c, sigma)?.to_matrix(n)?;
    let text = emit_map(&map);
    let Some(path) = out else {
        let doc: Value = serde_json::from_str(&text).expect("emitted JSON parses");
        return Ok(Report::new(0).line(text.trim_end()).field("map", doc));
    };
    std::fs::write(path, &text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Report::new(0)
        .line(format!("wrote {}", path.display()))
        .field("path", path.display().to_string()))
}
