//! Command-line front end: validation, star products, seminorms,
//! quantization, evaluation and the verification suite.
//!
//! Exit codes: 0 success, 1 validation/verification failure, 2 I/O or
//! parse error.

use clap::{Parser, Subcommand, ValueEnum};
use liestar::arith::parse_rational;
use liestar::error::LiestarError;
use liestar::estimates;
use liestar::io::{
    parse_json, to_canonical_json, LieAlgebraJson, ObservableJson, RepFunctionJson, SymPolyJson,
};
use liestar::lie::LieAlgebra;
use liestar::observable::Observable;
use liestar::repfun::{GroupElement, RepFunction};
use liestar::sym::SymPoly;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "liestar", version, about = "Exact star products on T*G")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Lie algebra file (and optionally an orbit module).
    Check {
        /// Lie algebra JSON file.
        algebra: PathBuf,
        /// Orbit module / representative function JSON to validate against
        /// the algebra.
        #[arg(long)]
        module: Option<PathBuf>,
    },
    /// Star products of two elements.
    Star {
        /// Product: std, weyl, kappa (with --kappa) or gutt.
        #[arg(long, value_enum, default_value = "std")]
        op: StarOp,
        /// Lie algebra JSON file.
        #[arg(long)]
        algebra: PathBuf,
        /// κ for --op kappa, as an exact rational.
        #[arg(long, default_value = "1/2")]
        kappa: String,
        /// Left factor (observable JSON; momentum polynomial JSON for gutt).
        f: PathBuf,
        /// Right factor.
        g: PathBuf,
        /// Output path (stdout if omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seminorms with certified enclosures.
    Seminorm {
        #[arg(long, value_enum)]
        kind: SeminormKind,
        /// Input element: momentum polynomial (p), representative function
        /// (q, finite-order) or observable (cross).
        input: PathBuf,
        /// Lie algebra JSON (required for cross).
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 1.0)]
        rp: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        cp: f64,
        /// ħ as an exact rational, evaluated for the numeric seminorm.
        #[arg(long, default_value = "1")]
        hbar: String,
        /// ε for the finite-order norm.
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Standard-ordered quantization ρ_std(F)φ, with the two computation
    /// paths cross-checked exactly.
    Quantize {
        #[arg(long)]
        algebra: PathBuf,
        /// Observable JSON.
        f: PathBuf,
        /// Representative function JSON.
        phi: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate an observable at (g, η) for numeric ħ.
    Evaluate {
        #[arg(long)]
        algebra: PathBuf,
        f: PathBuf,
        /// Exponential coordinates of g, comma separated.
        #[arg(long, value_delimiter = ',')]
        g: Vec<f64>,
        /// Momentum η, comma separated.
        #[arg(long, value_delimiter = ',')]
        eta: Vec<f64>,
        #[arg(long, default_value = "1")]
        hbar: String,
    },
    /// Run the randomized verification suite.
    Verify {
        /// all, or one estimate name (e.g. gutt_product).
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StarOp {
    Std,
    Weyl,
    Kappa,
    Gutt,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeminormKind {
    P,
    Q,
    Cross,
    FiniteOrder,
}

#[derive(Serialize)]
struct SeminormReport {
    kind: String,
    lower: f64,
    upper: f64,
    truncation: usize,
}

#[derive(Serialize)]
struct EvaluationReport {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    pass: bool,
    trials_per_point: usize,
    seed: u64,
    reports: Vec<estimates::AggregateReport>,
}

fn read_to_string(path: &Path) -> Result<String, LiestarError> {
    std::fs::read_to_string(path).map_err(LiestarError::Io)
}

fn load_algebra(path: &Path) -> Result<Arc<LieAlgebra>, LiestarError> {
    let alg = parse_json::<LieAlgebraJson>(&read_to_string(path)?)?.to_algebra()?;
    Ok(Arc::new(alg))
}

fn load_observable(path: &Path, alg: &Arc<LieAlgebra>) -> Result<Observable, LiestarError> {
    parse_json::<ObservableJson>(&read_to_string(path)?)?.to_observable(alg.clone())
}

fn load_sympoly(path: &Path) -> Result<SymPoly, LiestarError> {
    parse_json::<SymPolyJson>(&read_to_string(path)?)?.to_sympoly()
}

fn load_repfun(path: &Path) -> Result<RepFunction, LiestarError> {
    parse_json::<RepFunctionJson>(&read_to_string(path)?)?.to_repfun()
}

fn emit(output: &Option<PathBuf>, content: &str) -> Result<(), LiestarError> {
    match output {
        Some(p) => std::fs::write(p, content).map_err(LiestarError::Io),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn parse_hbar(s: &str) -> Result<Complex64, LiestarError> {
    let q = parse_rational(s)
        .ok_or_else(|| LiestarError::Parse(format!("bad rational ħ {:?}", s)))?;
    Ok(Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0))
}

fn run(cli: Cli) -> Result<u8, LiestarError> {
    match cli.command {
        Command::Check { algebra, module } => {
            let alg = load_algebra(&algebra)?;
            let report = alg.validate();
            if !report.is_pass() {
                println!("FAIL {:?}", report);
                return Ok(1);
            }
            if let Some(mpath) = module {
                let f = load_repfun(&mpath)?;
                if let Err(e) = f.module.validate(&alg) {
                    println!("FAIL module: {}", e);
                    return Ok(1);
                }
            }
            println!("PASS {} (dim {})", alg.name(), alg.dim());
            Ok(0)
        }
        Command::Star {
            op,
            algebra,
            kappa,
            f,
            g,
            output,
        } => {
            let alg = load_algebra(&algebra)?;
            match op {
                StarOp::Gutt => {
                    let p = load_sympoly(&f)?;
                    let q = load_sympoly(&g)?;
                    let prod = liestar::pbw::gutt_star(&alg, &p, &q);
                    emit(&output, &to_canonical_json(&SymPolyJson::from_sympoly(&prod)))?;
                }
                _ => {
                    let fo = load_observable(&f, &alg)?;
                    let go = load_observable(&g, &alg)?;
                    let prod = match op {
                        StarOp::Std => fo.star_std(&go)?,
                        StarOp::Weyl => fo.star_weyl(&go)?,
                        StarOp::Kappa => {
                            let k = parse_rational(&kappa).ok_or_else(|| {
                                LiestarError::Parse(format!("bad rational κ {:?}", kappa))
                            })?;
                            fo.star_kappa(&go, &k)?
                        }
                        StarOp::Gutt => unreachable!(),
                    };
                    emit(
                        &output,
                        &to_canonical_json(&ObservableJson::from_observable(&prod)),
                    )?;
                }
            }
            Ok(0)
        }
        Command::Seminorm {
            kind,
            input,
            algebra,
            r,
            rp,
            c,
            cp,
            hbar,
            eps,
        } => {
            let hb = parse_hbar(&hbar)?;
            let (name, interval) = match kind {
                SeminormKind::P => {
                    let p = load_sympoly(&input)?;
                    let v = p.seminorm_p(rp, cp, hb)?;
                    (
                        "p",
                        liestar::repfun::SeminormInterval {
                            lower: v,
                            upper: v,
                            truncation: p.degree().unwrap_or(0),
                        },
                    )
                }
                SeminormKind::Q => {
                    let f = load_repfun(&input)?;
                    ("q", f.seminorm_q(r, c, hb)?)
                }
                SeminormKind::FiniteOrder => {
                    let f = load_repfun(&input)?;
                    ("finite_order", f.norm_finite_order(r, eps, hb)?)
                }
                SeminormKind::Cross => {
                    let apath = algebra.ok_or_else(|| {
                        LiestarError::Parse("cross seminorm needs --algebra".to_string())
                    })?;
                    let alg = load_algebra(&apath)?;
                    let o = load_observable(&input, &alg)?;
                    ("cross", o.seminorm_cross(r, c, rp, cp, hb)?)
                }
            };
            let report = SeminormReport {
                kind: name.to_string(),
                lower: interval.lower,
                upper: interval.upper,
                truncation: interval.truncation,
            };
            print!("{}", to_canonical_json(&report));
            Ok(0)
        }
        Command::Quantize {
            algebra,
            f,
            phi,
            output,
        } => {
            let alg = load_algebra(&algebra)?;
            let fo = load_observable(&f, &alg)?;
            let ph = load_repfun(&phi)?;
            let via_star = fo.std_quantize_via_star(&ph)?;
            let explicit = fo.std_quantize_explicit(&ph)?;
            if !via_star.equals(&explicit) {
                println!("FAIL quantization paths disagree");
                return Ok(1);
            }
            emit(
                &output,
                &to_canonical_json(&RepFunctionJson::from_repfun(&via_star.reduce())),
            )?;
            Ok(0)
        }
        Command::Evaluate {
            algebra,
            f,
            g,
            eta,
            hbar,
        } => {
            let alg = load_algebra(&algebra)?;
            let fo = load_observable(&f, &alg)?;
            let hb = parse_hbar(&hbar)?;
            let v = fo.evaluate(&GroupElement::ExpCoords(g), &eta, hb)?;
            print!(
                "{}",
                to_canonical_json(&EvaluationReport { re: v.re, im: v.im })
            );
            Ok(0)
        }
        Command::Verify {
            suite,
            trials,
            seed,
            output,
        } => {
            let reports: Vec<estimates::AggregateReport> = if suite == "all" {
                estimates::run_suite(trials, seed)
            } else {
                let kinds: Vec<_> = estimates::EstimateKind::all()
                    .into_iter()
                    .filter(|k| k.name() == suite)
                    .collect();
                if kinds.is_empty() {
                    return Err(LiestarError::Parse(format!("unknown suite {:?}", suite)));
                }
                let mut out = Vec::new();
                for kind in kinds {
                    let mut seen = std::collections::BTreeSet::new();
                    for point in estimates::default_grid() {
                        let spec = estimates::EstimateSpec { kind, point };
                        if !spec.applicable() || !seen.insert(spec.dedupe_key()) {
                            continue;
                        }
                        out.push(estimates::verify_estimate(&spec, trials, seed));
                    }
                }
                out
            };
            let pass = reports.iter().all(|r| r.pass);
            for r in &reports {
                println!(
                    "{} {} R={} R'={} c={} c'={} hbar={} trials={} worst_margin={:.3e} median_ratio={:.3} {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.point.r,
                    r.point.rp,
                    r.point.c,
                    r.point.cp,
                    r.point.hbar,
                    r.trials,
                    r.worst_margin,
                    r.median_ratio,
                    r.constants,
                );
            }
            let report = VerifyReport {
                pass,
                trials_per_point: trials,
                seed,
                reports,
            };
            if let Some(p) = &output {
                std::fs::write(p, to_canonical_json(&report)).map_err(LiestarError::Io)?;
            }
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LIESTAR_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
