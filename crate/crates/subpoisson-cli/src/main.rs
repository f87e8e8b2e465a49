//! Command-line front end: exact moment computation, bound evaluation,
//! verification suites, and comparison sweeps with CSV/SVG output.
//!
//! Exit codes: 0 success, 1 computation/domain failure, 2 usage error.

mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use subpoisson::bounds::{self, BoundKind, BoundResult};
use subpoisson::dec::{self, format_f64_sig17};
use subpoisson::exact::Distribution;
use subpoisson::verify::{self, checks, CsvTable, GridSpec, SuiteName, VerifyConfig};
use subpoisson::{Error, HiFloat};

#[derive(Parser)]
#[command(
    name = "subpoisson",
    version,
    about = "Exact moments, moment bounds, and inequality verification for sub-Poissonian distributions",
    after_help = "Probabilities and means accept decimals or rationals (\"0.3\" or \"3/10\"); \
                  decimals are kept exact over powers of ten.\n\
                  Note: the Ostrovsky-style bound is not implemented because its mu-dependent \
                  constant is unspecified; Latala constants are user parameters."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact raw moment of a distribution (prints the exact rational and a
    /// 30-digit decimal rendering)
    Moment(MomentArgs),
    /// Evaluate one bound family on the normalized moment E (X/mu)^k
    Bound(BoundArgs),
    /// Run a verification suite and write JSON + CSV reports
    Verify(VerifyArgs),
    /// Sweep bounds (and optionally the exact moment) over a (k, mu) grid
    Sweep(SweepArgs),
}

#[derive(Args)]
struct MomentArgs {
    /// Poisson mean
    #[arg(long, value_name = "MU", conflicts_with_all = ["binomial", "bernoulli_sum"])]
    poisson: Option<String>,
    /// Binomial trials and success probability
    #[arg(long, num_args = 2, value_names = ["N", "P"], conflicts_with = "bernoulli_sum")]
    binomial: Option<Vec<String>>,
    /// Comma-separated Bernoulli success probabilities
    #[arg(long, value_name = "P1,P2,...")]
    bernoulli_sum: Option<String>,
    /// Moment order
    #[arg(short)]
    k: usize,
}

#[derive(Args)]
struct BoundArgs {
    /// theorem1 | corollary | mgf | latala | berend-tassa | poisson-lower |
    /// binomial-lower | bell-power | conjecture
    kind: String,
    /// Moment order (real unless the bound needs an integer)
    #[arg(short)]
    k: String,
    /// Mean
    #[arg(long)]
    mu: Option<String>,
    /// Latala lower constant c in (0,1)
    #[arg(short = 'c', long = "latala-c")]
    latala_c: Option<String>,
    /// Latala upper constant C > 1
    #[arg(short = 'C', long = "latala-cap-c")]
    latala_big_c: Option<String>,
    /// Binomial trials (binomial-lower)
    #[arg(long)]
    n: Option<u64>,
    /// Binomial success probability (binomial-lower)
    #[arg(long)]
    p: Option<String>,
    /// Use the Bell-number cap in the Rosenthal-type bound
    #[arg(long)]
    cap: bool,
    /// Also print the raw-moment log (adds k log mu)
    #[arg(long)]
    raw: bool,
    /// Working precision in mantissa bits (defaults to 113; passing it
    /// explicitly also lifts the k/mu cap on Dobinski-backed bounds)
    #[arg(long)]
    bits: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite to run
    #[arg(value_parser = SuiteName::ALL_NAMES.to_vec())]
    suite: String,
    /// Override the suite's primary 1-D grid: min:max:count:lin|log
    #[arg(long)]
    grid: Option<String>,
    /// Report output directory
    #[arg(long, env = "SUBPOISSON_OUT_DIR", default_value = "reports")]
    out: PathBuf,
    /// Working precision in mantissa bits
    #[arg(long, default_value_t = 113)]
    bits: usize,
    /// Worker count (recorded in reports; MC partitioning depends on it)
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Base RNG seed
    #[arg(long, default_value_t = 12345)]
    seed: u64,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// k axis: a single value or min:max:count:lin|log
    #[arg(long, value_name = "AXIS")]
    k: String,
    /// mu axis: a single value or min:max:count:lin|log
    #[arg(long, value_name = "AXIS")]
    mu: String,
    /// Comma-separated bounds: theorem1, corollary-poly, corollary-exp,
    /// mgf, latala-lower, latala-upper, berend-tassa, berend-tassa-cap,
    /// poisson-lower, bell-power, conjecture-lower, conjecture-upper
    #[arg(long)]
    bounds: String,
    /// Distribution for the exact overlay: poisson:MU | binomial:N:P |
    /// bernoulli-sum:P1,P2,...
    #[arg(long)]
    dist: Option<String>,
    /// Latala lower constant (illustrative default 1/2; no universal numeric value is established)
    #[arg(short = 'c', long = "latala-c", default_value = "1/2")]
    latala_c: String,
    /// Latala upper constant (illustrative default 2)
    #[arg(short = 'C', long = "latala-cap-c", default_value = "2")]
    latala_big_c: String,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot output path
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Working precision in mantissa bits (defaults to 113; passing it
    /// explicitly also lifts the k/mu cap on Dobinski-backed bounds)
    #[arg(long)]
    bits: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Moment(args) => cmd_moment(args),
        Cmd::Bound(args) => cmd_bound(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn parse_dist_flags(args: &MomentArgs) -> Result<Option<Distribution>, Error> {
    if let Some(mu) = &args.poisson {
        return Ok(Some(Distribution::poisson(dec::parse_rational(mu)?)?));
    }
    if let Some(np) = &args.binomial {
        let n: u64 = np[0]
            .parse()
            .map_err(|_| Error::Domain(format!("invalid trial count '{}'", np[0])))?;
        let p = dec::parse_probability(&np[1])?;
        return Ok(Some(Distribution::binomial(n, p)?));
    }
    if let Some(list) = &args.bernoulli_sum {
        let probs: Result<Vec<BigRational>, Error> =
            list.split(',').map(dec::parse_probability).collect();
        return Ok(Some(Distribution::bernoulli_sum(probs?)?));
    }
    Ok(None)
}

fn cmd_moment(args: MomentArgs) -> Result<ExitCode, Error> {
    let dist = match parse_dist_flags(&args)? {
        Some(d) => d,
        None => {
            return Ok(usage_error(
                "one of --poisson, --binomial, --bernoulli-sum is required",
            ))
        }
    };
    let moment = dist.raw_moment(args.k)?;
    println!("{moment}");
    println!("{}", dec::format_rational_sig(&moment, 30));
    Ok(ExitCode::SUCCESS)
}

fn print_bound(result: &BoundResult) {
    let value = match &result.value {
        Some(v) => v.to_decimal_sig(30),
        None => "overflow".to_string(),
    };
    let flag = match result.flag {
        Some(bounds::BoundFlag::VacuousNonPositive) => " [vacuous: expression <= 0]",
        Some(bounds::BoundFlag::MomentOrderExceedsTrials) => " [flagged: k > n]",
        None => "",
    };
    println!(
        "{}: log_value={} value={}{}",
        result.kind,
        result.log_value.to_decimal_sig(30),
        value,
        flag
    );
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode, Error> {
    let uncapped = args.bits.is_some();
    let prec = args.bits.unwrap_or(113);
    let k_rat = dec::parse_rational(&args.k)?;
    let k = HiFloat::from_rational(&k_rat, prec);
    let k_int: Option<u64> = if k_rat.is_integer() {
        k_rat.to_integer().to_u64()
    } else {
        None
    };
    let need_mu = |mu: &Option<String>| -> Result<HiFloat, Error> {
        let s = mu
            .as_ref()
            .ok_or_else(|| Error::Domain("--mu is required for this bound".into()))?;
        Ok(HiFloat::from_rational(&dec::parse_rational(s)?, prec))
    };
    let need_k_int = || -> Result<u64, Error> {
        k_int.ok_or_else(|| Error::Domain(format!("this bound requires integer k, got {}", args.k)))
    };

    let mut results: Vec<BoundResult> = Vec::new();
    match args.kind.as_str() {
        "theorem1" => results.push(bounds::theorem1_bound(&k, &need_mu(&args.mu)?)?),
        "corollary" => {
            let (poly, exp) = bounds::corollary_bounds(&k, &need_mu(&args.mu)?)?;
            results.push(poly);
            results.push(exp);
        }
        "mgf" => results.push(bounds::mgf_intermediate_bound(&k, &need_mu(&args.mu)?)?),
        "latala" => {
            let (c, big_c) = match (&args.latala_c, &args.latala_big_c) {
                (Some(c), Some(big_c)) => (c, big_c),
                _ => {
                    return Ok(usage_error(
                        "latala requires both -c and -C (the universal constants have no established numeric values)",
                    ))
                }
            };
            let c = HiFloat::from_rational(&dec::parse_rational(c)?, prec);
            let big_c = HiFloat::from_rational(&dec::parse_rational(big_c)?, prec);
            let (lo, hi) = bounds::latala_bounds(&k, &need_mu(&args.mu)?, &c, &big_c)?;
            results.push(lo);
            results.push(hi);
        }
        "berend-tassa" => results.push(bounds::berend_tassa_bound(
            need_k_int()?,
            &need_mu(&args.mu)?,
            args.cap,
        )?),
        "poisson-lower" => {
            results.push(bounds::poisson_lower(need_k_int()?, &need_mu(&args.mu)?)?)
        }
        "binomial-lower" => {
            let n = args
                .n
                .ok_or_else(|| Error::Domain("binomial-lower requires --n".into()))?;
            let p = args
                .p
                .as_ref()
                .ok_or_else(|| Error::Domain("binomial-lower requires --p".into()))?;
            results.push(bounds::binomial_lower(
                n,
                &dec::parse_probability(p)?,
                need_k_int()?,
                prec,
            )?)
        }
        "bell-power" => {
            let mu = need_mu(&args.mu)?;
            let mu_int = mu
                .to_rational()
                .filter(|r| r.is_integer())
                .and_then(|r| r.to_integer().to_u64())
                .ok_or_else(|| Error::Domain("bell-power requires integer --mu >= 1".into()))?;
            let v = if uncapped {
                subpoisson::bell_real::bell_power_lower_uncapped(&k, mu_int)?
            } else {
                subpoisson::bell_real::bell_power_lower(&k, mu_int)?
            };
            results.push(BoundResult {
                kind: BoundKind::BellPowerLower,
                log_value: v.ln(),
                value: Some(v),
                flag: None,
            });
        }
        "conjecture" => {
            let mu = need_mu(&args.mu)?;
            let (lo, hi) = if uncapped {
                bounds::conjecture_bounds_uncapped(&k, &mu)?
            } else {
                bounds::conjecture_bounds(&k, &mu)?
            };
            results.push(lo);
            results.push(hi);
        }
        other => return Ok(usage_error(&format!("unknown bound kind '{other}'"))),
    }
    for r in &results {
        print_bound(r);
        if args.raw {
            let mu = need_mu(&args.mu)?;
            let raw = bounds::raw_log_value(&r.log_value, &k, &mu);
            println!("{}: raw_log_value={}", r.kind, raw.to_decimal_sig(30));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let suite = SuiteName::parse(&args.suite)?;
    let grid = match &args.grid {
        Some(s) => Some(GridSpec::parse(s)?),
        None => None,
    };
    let cfg = VerifyConfig {
        precision_bits: args.bits,
        workers: args.workers,
        seed: args.seed,
        mc_samples: args.samples,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    let reports = pool.install(|| verify::run_suite(suite, grid, &cfg))?;
    verify::write_reports(&args.out, &reports, &cfg)
        .map_err(|e| Error::Numeric(format!("writing reports to {}: {e}", args.out.display())))?;
    let mut all_ok = true;
    for (report, _) in &reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        let findings = if report.findings.is_empty() {
            String::new()
        } else {
            format!(", {} finding(s)", report.findings.len())
        };
        println!(
            "{}: {status} (worst margin {}, {} points{findings})",
            report.check_name, report.worst_margin, report.points_checked
        );
        all_ok &= report.passed;
    }
    println!("reports written to {}", args.out.display());
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

enum Axis {
    Fixed(f64),
    Grid(GridSpec),
}

impl Axis {
    fn parse(s: &str) -> Result<Axis, Error> {
        if s.contains(':') {
            Ok(Axis::Grid(GridSpec::parse(s)?))
        } else {
            let v: f64 = s
                .parse()
                .map_err(|_| Error::Domain(format!("invalid axis value '{s}'")))?;
            Ok(Axis::Fixed(v))
        }
    }

    fn points(&self) -> Vec<f64> {
        match self {
            Axis::Fixed(v) => vec![*v],
            Axis::Grid(g) => g.points(),
        }
    }
}

fn parse_sweep_dist(s: &str) -> Result<Distribution, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["poisson", mu] => Distribution::poisson(dec::parse_rational(mu)?),
        ["binomial", n, p] => {
            let n: u64 = n
                .parse()
                .map_err(|_| Error::Domain(format!("invalid trial count '{n}'")))?;
            Distribution::binomial(n, dec::parse_probability(p)?)
        }
        ["bernoulli-sum", list] => {
            let probs: Result<Vec<BigRational>, Error> =
                list.split(',').map(dec::parse_probability).collect();
            Distribution::bernoulli_sum(probs?)
        }
        _ => Err(Error::Domain(format!(
            "invalid distribution spec '{s}' (poisson:MU | binomial:N:P | bernoulli-sum:P1,P2,...)"
        ))),
    }
}

const SWEEP_BOUND_NAMES: &[&str] = &[
    "theorem1",
    "corollary-poly",
    "corollary-exp",
    "mgf",
    "latala-lower",
    "latala-upper",
    "berend-tassa",
    "berend-tassa-cap",
    "poisson-lower",
    "binomial-lower",
    "bell-power",
    "conjecture-lower",
    "conjecture-upper",
];

type BoundEval = Box<dyn Fn(&HiFloat, &HiFloat) -> Result<BoundResult, Error>>;

struct SweepBound {
    name: String,
    lower: bool,
    eval: BoundEval,
}

fn sweep_bound_by_name(
    name: &str,
    c: HiFloat,
    big_c: HiFloat,
    uncapped: bool,
    binomial_ctx: Option<(u64, BigRational)>,
    prec: usize,
) -> Result<SweepBound, Error> {
    let (lower, eval): (bool, BoundEval) = match name {
        "theorem1" => (false, Box::new(bounds::theorem1_bound)),
        "corollary-poly" => (
            false,
            Box::new(|k, mu| Ok(bounds::corollary_bounds(k, mu)?.0)),
        ),
        "corollary-exp" => (
            false,
            Box::new(|k, mu| Ok(bounds::corollary_bounds(k, mu)?.1)),
        ),
        "mgf" => (
            false,
            Box::new(bounds::mgf_intermediate_bound),
        ),
        "latala-lower" => (
            true,
            Box::new(move |k, mu| Ok(bounds::latala_bounds(k, mu, &c, &big_c)?.0)),
        ),
        "latala-upper" => (
            false,
            Box::new(move |k, mu| Ok(bounds::latala_bounds(k, mu, &c, &big_c)?.1)),
        ),
        "berend-tassa" => (
            false,
            Box::new(|k, mu| bounds::berend_tassa_bound(hf_to_int(k)?, mu, false)),
        ),
        "berend-tassa-cap" => (
            false,
            Box::new(|k, mu| bounds::berend_tassa_bound(hf_to_int(k)?, mu, true)),
        ),
        "poisson-lower" => (
            true,
            Box::new(|k, mu| bounds::poisson_lower(hf_to_int(k)?, mu)),
        ),
        "binomial-lower" => {
            let (n, p) = binomial_ctx.ok_or_else(|| {
                Error::Domain(
                    "binomial-lower in a sweep requires --dist binomial:N:P".into(),
                )
            })?;
            (
                true,
                Box::new(move |k, _mu| bounds::binomial_lower(n, &p, hf_to_int(k)?, prec)),
            )
        }
        "bell-power" => (
            true,
            Box::new(move |k, mu| {
                let v = if uncapped {
                    subpoisson::bell_real::bell_power_lower_uncapped(k, hf_to_int(mu)?)?
                } else {
                    subpoisson::bell_real::bell_power_lower(k, hf_to_int(mu)?)?
                };
                Ok(BoundResult {
                    kind: BoundKind::BellPowerLower,
                    log_value: v.ln(),
                    value: Some(v),
                    flag: None,
                })
            }),
        ),
        "conjecture-lower" => (
            true,
            Box::new(move |k, mu| {
                Ok(if uncapped {
                    bounds::conjecture_bounds_uncapped(k, mu)?.0
                } else {
                    bounds::conjecture_bounds(k, mu)?.0
                })
            }),
        ),
        "conjecture-upper" => (
            false,
            Box::new(move |k, mu| {
                Ok(if uncapped {
                    bounds::conjecture_bounds_uncapped(k, mu)?.1
                } else {
                    bounds::conjecture_bounds(k, mu)?.1
                })
            }),
        ),
        other => {
            return Err(Error::Domain(format!(
                "unknown bound '{other}' in --bounds"
            )))
        }
    };
    Ok(SweepBound {
        name: name.to_string(),
        lower,
        eval,
    })
}

fn hf_to_int(v: &HiFloat) -> Result<u64, Error> {
    let f = v.to_f64();
    if f.fract().abs() < 1e-9 && (0.0..1e18).contains(&f) {
        Ok(f.round() as u64)
    } else {
        Err(Error::Domain(format!(
            "this bound requires an integer argument, got {f}"
        )))
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let uncapped = args.bits.is_some();
    let prec = args.bits.unwrap_or(113);
    let names: Vec<&str> = args
        .bounds
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Ok(usage_error("--bounds must list at least one bound"));
    }
    if let Some(bad) = names.iter().find(|n| !SWEEP_BOUND_NAMES.contains(n)) {
        return Ok(usage_error(&format!(
            "unknown bound '{bad}' in --bounds (known: {})",
            SWEEP_BOUND_NAMES.join(", ")
        )));
    }
    let c = HiFloat::from_rational(&dec::parse_rational(&args.latala_c)?, prec);
    let big_c = HiFloat::from_rational(&dec::parse_rational(&args.latala_big_c)?, prec);
    let dist = match &args.dist {
        Some(s) => Some(parse_sweep_dist(s)?),
        None => None,
    };
    let binomial_ctx = match &dist {
        Some(Distribution::Binomial { trials, p }) => Some((*trials, p.clone())),
        _ => None,
    };
    if names.contains(&"binomial-lower") && binomial_ctx.is_none() {
        return Ok(usage_error(
            "binomial-lower in a sweep requires --dist binomial:N:P",
        ));
    }
    let mut evals = Vec::new();
    for n in &names {
        evals.push(sweep_bound_by_name(
            n,
            c.clone(),
            big_c.clone(),
            uncapped,
            binomial_ctx.clone(),
            prec,
        )?);
    }
    let k_axis = Axis::parse(&args.k)?;
    let mu_axis = Axis::parse(&args.mu)?;

    let mut columns: Vec<String> =
        vec!["k".into(), "mu".into(), "ratio".into(), "exact_log".into()];
    for b in &evals {
        columns.push(format!("{}_log", b.name));
        columns.push(format!("{}_margin", b.name));
    }
    let col_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut csv = CsvTable::new("sweep", &col_refs);

    let mut series: Vec<svg::Series> = evals
        .iter()
        .map(|b| svg::Series {
            name: b.name.clone(),
            points: vec![],
        })
        .collect();
    let mut exact_series = svg::Series {
        name: "exact".into(),
        points: vec![],
    };

    let dist_mean = dist.as_ref().map(|d| d.mean());
    for mu_val in mu_axis.points() {
        for k_val in k_axis.points() {
            let kh = HiFloat::from_f64(k_val, prec);
            let muh = HiFloat::from_f64(mu_val, prec);
            let ratio = k_val / mu_val;
            // exact overlay when the distribution matches this mu and k is
            // a reasonable integer
            let exact_log = match (&dist, &dist_mean) {
                (Some(d), Some(mean)) => {
                    let mean_f = mean.to_f64().unwrap_or(f64::NAN);
                    let k_is_int = k_val.fract().abs() < 1e-9 && (1.0..4000.0).contains(&k_val);
                    if k_is_int && (mean_f - mu_val).abs() <= 1e-12 * mean_f.abs() {
                        Some(checks::exact_normalized_moment_log(
                            d,
                            k_val.round() as usize,
                            prec,
                        )?)
                    } else {
                        None
                    }
                }
                _ => None,
            };
            let mut row = vec![
                format_f64_sig17(k_val),
                format_f64_sig17(mu_val),
                format_f64_sig17(ratio),
                exact_log
                    .as_ref()
                    .map(|v| v.to_decimal_sig(19))
                    .unwrap_or_default(),
            ];
            if let Some(el) = &exact_log {
                exact_series.points.push((ratio, el.to_f64()));
            }
            for (b, s) in evals.iter().zip(series.iter_mut()) {
                let r = (b.eval)(&kh, &muh)?;
                let log_f = r.log_value.to_f64();
                s.points.push((ratio, log_f));
                let margin = exact_log.as_ref().map(|el| {
                    if b.lower {
                        el - &r.log_value
                    } else {
                        &r.log_value - el
                    }
                });
                row.push(r.log_value.to_decimal_sig(19));
                row.push(margin.map(|m| m.to_decimal_sig(19)).unwrap_or_default());
            }
            csv.push_row(row);
        }
    }

    let csv_text = csv.to_csv();
    match &args.out {
        Some(path) => std::fs::write(path, csv_text)
            .map_err(|e| Error::Numeric(format!("writing {}: {e}", path.display())))?,
        None => print!("{csv_text}"),
    }

    if let Some(path) = &args.svg {
        if !exact_series.points.is_empty() {
            series.insert(0, exact_series);
        }
        // series carry natural-log values; display as log10 on a linear axis
        for s in &mut series {
            for p in &mut s.points {
                p.1 *= std::f64::consts::LOG10_E;
            }
        }
        let plot = svg::Plot {
            title: "normalized moment bounds".into(),
            x_label: "k/mu".into(),
            y_label: "log10 E(X/mu)^k".into(),
            log_x: true,
            log_y: false,
            series,
        };
        std::fs::write(path, plot.to_svg())
            .map_err(|e| Error::Numeric(format!("writing {}: {e}", path.display())))?;
    }
    Ok(ExitCode::SUCCESS)
}
