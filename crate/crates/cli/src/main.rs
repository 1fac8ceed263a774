//! `zgap`: batch front end for the gap engine.
//!
//! Reports go to standard output unless `--out` names a file. JSON carries
//! certificates and λ reports, CSV carries lemma tables.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zgap_core::arith::{a_r, c_r_with_cutoff, Sieve};
use zgap_core::lab::{self, ComparisonRow, CSV_HEADER};
use zgap_core::optimize::{lambda_r, optimize_poly_with, LambdaReport, SearchOptions};
use zgap_core::poly::parse_rational;
use zgap_core::series::{ct_consistency, ct_kernel, DEFAULT_PRECISION, DEFAULT_TRUNCATION};
use zgap_core::{
    certify, parse_poly_spec, verify, BigReal, Certificate, Error, GapConfig, Precision, Rational, RationalPoly, Real,
};

#[derive(Parser)]
#[command(name = "zgap", version, about = "Certified lower bounds for large gaps between zeta zeros")]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler-product constants a_{r+1} and C_r.
    Constants {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        prec: Precision,
    },
    /// Certified λ for one mollifier.
    Lambda(SeriesArgs),
    /// Search the degree-d mollifier family for a larger certified λ.
    Optimize {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "J", default_value_t = DEFAULT_TRUNCATION)]
        truncation: usize,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        prec: Precision,
        /// Upper end of the κ scan, in multiples of π.
        #[arg(long, default_value = "4", value_parser = rational_arg)]
        scan_max: Rational,
    },
    /// Run the acceptance checks and print a pass/fail table.
    VerifyPaper {
        /// Criterion numbers to run; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
    /// Tabulate one lemma sum against its main term.
    LemmaCheck(LemmaArgs),
    /// Exact constant-term cancellation residual.
    CtCheck {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value = "1", value_parser = poly_arg)]
        poly: RationalPoly,
        #[arg(long, default_value = "1/2", value_parser = rational_arg)]
        eta: Rational,
    },
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value = "1/2", value_parser = rational_arg)]
    eta: Rational,
    /// Coefficients of P, constant first.
    #[arg(long, default_value = "1", value_parser = poly_arg)]
    poly: RationalPoly,
    #[arg(long = "J", default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    prec: Precision,
    /// Upper end of the κ scan, in multiples of π.
    #[arg(long, default_value = "4", value_parser = rational_arg)]
    scan_max: Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    /// Σ d_r(nh)/h
    Sel,
    /// Σ φ(m)σ_r(m)²/m² g(log m/log x)
    Sig,
    /// Σ (log p)^w p^{iα−1} g(log p/log y)
    Prime,
    /// Σ d_r(mk) f(nk)
    F,
    /// Local factor identity for r, λ up to the given bounds
    Lemma6,
    /// Double divisor sum growth
    Growth,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scalar {
    F64,
    Big,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, value_enum)]
    lemma: Lemma,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, default_value_t = 1)]
    m: u64,
    /// Cutoffs, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000000")]
    x: Vec<u64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value = "0", value_parser = rational_arg)]
    theta: Rational,
    #[arg(long, default_value_t = 1)]
    w: u32,
    /// Weight polynomial g, constant first.
    #[arg(long, default_value = "1", value_parser = poly_arg)]
    g: RationalPoly,
    #[arg(long, default_value_t = 0)]
    j: u32,
    #[arg(long, default_value_t = 10)]
    lambda_max: u32,
    #[arg(long, default_value_t = 200)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Scalar::F64)]
    scalar: Scalar,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    prec: Precision,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn poly_arg(s: &str) -> Result<RationalPoly, String> {
    parse_poly_spec(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateMollifier | Error::InfeasibleMollifier | Error::Config(_) => {
                Failure::Infeasible(e.to_string())
            }
            Error::Parse { .. }
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::Capacity { .. }
            | Error::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Failed(e.to_string()),
        }
    }
}

type Outcome = Result<(Vec<u8>, bool), Failure>;

fn dec(x: &Rational, prec: Precision) -> String {
    BigReal::from_rational(x, prec).to_decimal()
}

fn json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable report");
    s.push(b'\n');
    s
}

#[derive(Serialize)]
struct LambdaJson {
    lambda_lower: String,
    lambda_lower_rational: String,
    c_star: String,
    scan_max: String,
    bracket: Option<[String; 2]>,
    boundary: bool,
    certified: bool,
    rounding: String,
    tail_i_part: String,
    tail_k_part: String,
    certificate: Certificate,
}

fn lambda_json(rep: &LambdaReport<BigReal>) -> LambdaJson {
    let prec = rep.config.precision;
    let ev = &rep.f_at_c_star;
    LambdaJson {
        lambda_lower: dec(&rep.lambda_lower, prec),
        lambda_lower_rational: rep.lambda_lower.to_string(),
        c_star: rep.c_star.to_decimal(),
        scan_max: rep.config.scan_max.to_string(),
        bracket: rep.bracket.as_ref().map(|(a, b)| [a.to_string(), b.to_string()]),
        boundary: rep.boundary,
        certified: rep.certified(),
        rounding: dec(&ev.rounding, prec),
        tail_i_part: dec(&ev.tail.i_part, prec),
        tail_k_part: dec(&ev.tail.k_part, prec),
        certificate: certify(rep),
    }
}

fn run_lambda(a: SeriesArgs) -> Outcome {
    let mut cfg = GapConfig::new(a.r, a.poly).with_truncation(a.truncation).with_precision(a.prec);
    cfg.eta = a.eta;
    cfg.scan_max = a.scan_max;
    cfg.validate()?;
    let rep = lambda_r(&cfg)?;
    Ok((json(&lambda_json(&rep)), true))
}

#[derive(Serialize)]
struct SearchJson {
    r: u32,
    degree: usize,
    seed: u64,
    budget: usize,
    evaluations: usize,
    coefficients: Vec<String>,
    trace: Vec<f64>,
    report: LambdaJson,
}

fn run_optimize(r: u32, degree: usize, budget: usize, seed: u64, opts: SearchOptions) -> Outcome {
    let s = optimize_poly_with(r, degree, budget, seed, &opts)?;
    let out = SearchJson {
        r: s.r,
        degree: s.degree,
        seed: s.seed,
        budget: s.budget,
        evaluations: s.evaluations,
        coefficients: s.coefficients.iter().map(|c| c.to_string()).collect(),
        trace: s.trace.clone(),
        report: lambda_json(&s.best),
    };
    Ok((json(&out), true))
}

#[derive(Serialize)]
struct ConstantsJson {
    r: u32,
    cutoff: u64,
    precision_bits: Precision,
    a_r_plus_1: String,
    a_r_plus_1_tail: String,
    c_r: String,
    c_r_tail: String,
}

fn run_constants(r: u32, cutoff: u64, prec: Precision) -> Outcome {
    let a = a_r::<BigReal>(r + 1, cutoff, prec)?;
    let c = c_r_with_cutoff::<BigReal>(r, cutoff, prec)?;
    let out = ConstantsJson {
        r,
        cutoff,
        precision_bits: prec,
        a_r_plus_1: a.value.to_decimal(),
        a_r_plus_1_tail: a.tail_bound.to_decimal(),
        c_r: c.value.to_decimal(),
        c_r_tail: c.tail_bound.to_decimal(),
    };
    Ok((json(&out), true))
}

#[derive(Serialize)]
struct CtJson {
    r: u32,
    eta: String,
    poly: Vec<String>,
    residual: String,
    kernel_residual: String,
    zero: bool,
}

fn run_ct(r: u32, poly: RationalPoly, eta: Rational) -> Outcome {
    if r == 0 {
        return Err(Failure::Usage("ct-check needs r ≥ 1".into()));
    }
    let res = ct_consistency(r, &poly, &eta);
    let ker = ct_kernel(r);
    let zero = res == Rational::from_integer(0.into()) && ker == Rational::from_integer(0.into());
    let out = CtJson {
        r,
        eta: eta.to_string(),
        poly: poly.to_rational_strings(),
        residual: res.to_string(),
        kernel_residual: ker.to_string(),
        zero,
    };
    Ok((json(&out), zero))
}

#[derive(Serialize)]
struct CriterionJson {
    id: u32,
    name: String,
    pass: bool,
    detail: String,
}

fn run_verify(only: Vec<u32>, to_file: bool) -> Outcome {
    let ids: Vec<u32> = if only.is_empty() { (1..=9).collect() } else { only };
    let mut rows = Vec::new();
    for id in ids {
        let r = verify::criterion(id).ok_or_else(|| Failure::Usage(format!("no criterion {id}")))?;
        println!("{}", r.line());
        rows.push(CriterionJson { id: r.id, name: r.name, pass: r.pass, detail: r.detail });
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria passed", rows.len());
    let ok = passed == rows.len();
    // the table is already on stdout; only a file gets the JSON copy
    Ok((if to_file { json(&rows) } else { Vec::new() }, ok))
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Failed(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::Failed(e.to_string()))
}

fn lemma_rows<S: Real>(a: &LemmaArgs, sieve: &Sieve) -> Result<Vec<Vec<String>>, Failure> {
    let prec = match a.scalar {
        Scalar::F64 => 53,
        Scalar::Big => a.prec,
    };
    let n = sieve.factorize(a.n)?;
    let m = sieve.factorize(a.m)?;
    let alpha = S::from_float(a.alpha, prec);
    let mut rows = Vec::new();
    for &x in &a.x {
        let row: ComparisonRow<S> = match a.lemma {
            Lemma::Sel => lab::check_divisor_mean(sieve, a.r, &n, x, prec)?,
            Lemma::Sig => lab::check_sigma_mean(sieve, a.r, x, &a.g, &a.theta, prec)?,
            Lemma::Prime => lab::check_prime_sum(sieve, a.w, &alpha, &a.theta, x, &a.g, prec)?,
            Lemma::F => lab::check_f_mean(sieve, a.r, &m, &n, &alpha, x, prec)?,
            Lemma::Lemma6 | Lemma::Growth => unreachable!("handled by run_lemma"),
        };
        rows.push(row.csv_record());
    }
    Ok(rows)
}

fn growth_rows<S: Real>(a: &LemmaArgs, sieve: &Sieve) -> Result<Vec<Vec<String>>, Failure> {
    let prec = match a.scalar {
        Scalar::F64 => 53,
        Scalar::Big => a.prec,
    };
    let rows = lab::growth_lemma9::<S>(sieve, a.r, a.j, &a.x, prec)?;
    Ok(rows.into_iter().map(|(x, v)| vec![x.to_string(), v.to_decimal()]).collect())
}

fn run_lemma(a: LemmaArgs) -> Outcome {
    if let Lemma::Lemma6 = a.lemma {
        let mut rows = Vec::new();
        let mut all = true;
        for lam in 1..=a.lambda_max {
            let zero = lab::check_lemma6(a.r, lam, a.order)?.is_zero();
            all &= zero;
            rows.push(vec![a.r.to_string(), lam.to_string(), a.order.to_string(), zero.to_string()]);
        }
        return Ok((csv_bytes(&["r", "lambda", "order", "residual_zero"], rows)?, all));
    }
    if a.x.is_empty() {
        return Err(Failure::Usage("--x needs at least one cutoff".into()));
    }
    let limit = a.x.iter().copied().chain([a.n, a.m]).max().unwrap_or(2).max(2);
    let sieve = Sieve::new(limit);
    let rows = match (a.lemma, a.scalar) {
        (Lemma::Growth, Scalar::F64) => {
            return Ok((csv_bytes(&["x", "normalized"], growth_rows::<f64>(&a, &sieve)?)?, true))
        }
        (Lemma::Growth, Scalar::Big) => {
            return Ok((csv_bytes(&["x", "normalized"], growth_rows::<BigReal>(&a, &sieve)?)?, true))
        }
        (_, Scalar::F64) => lemma_rows::<f64>(&a, &sieve)?,
        (_, Scalar::Big) => lemma_rows::<BigReal>(&a, &sieve)?,
    };
    Ok((csv_bytes(&CSV_HEADER, rows)?, true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let to_file = cli.out.is_some();
    let outcome = match cli.cmd {
        Cmd::Constants { r, cutoff, prec } => run_constants(r, cutoff, prec),
        Cmd::Lambda(a) => run_lambda(a),
        Cmd::Optimize { r, degree, budget, seed, truncation, prec, scan_max } => {
            let opts = SearchOptions { truncation, precision: prec, scan_max, ..SearchOptions::default() };
            run_optimize(r, degree, budget, seed, opts)
        }
        Cmd::VerifyPaper { only } => run_verify(only, to_file),
        Cmd::LemmaCheck(a) => run_lemma(a),
        Cmd::CtCheck { r, poly, eta } => run_ct(r, poly, eta),
    };
    match outcome {
        Ok((bytes, ok)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &bytes),
                None => std::io::stdout().write_all(&bytes),
            };
            if let Err(e) = written {
                eprintln!("zgap: cannot write report: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("zgap: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(m)) | Err(Failure::Failed(m)) => {
            eprintln!("zgap: {m}");
            ExitCode::from(1)
        }
    }
}
