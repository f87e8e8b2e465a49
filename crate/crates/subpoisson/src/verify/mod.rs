//! Numeric certification of the inequality steps behind the moment bounds:
//! grid sweeps for the Lambert-W and g-function lemmas, MGF domination
//! checks for the sub-Poissonian class, Theorem-2 and conjecture sweeps,
//! and a seeded Monte Carlo cross-validator. Reports are deterministic:
//! identical configuration (precision, workers, seed, grids) produces
//! byte-identical JSON and CSV.

pub mod checks;
pub mod grid;
pub mod mc;
pub mod report;

use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub use checks::*;
pub use grid::{GridSpec, Spacing};
pub use mc::{monte_carlo_moment, MCEstimate};
pub use report::{CheckReport, CsvTable, Finding};

use crate::error::{Error, Result};
use crate::exact::Distribution;

/// The named verification suites exposed by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    All,
    G,
    Lambert,
    Logs,
    Mgf,
    Subpoisson,
    Counterexample,
    Theorem2,
    Conjecture,
    MonteCarlo,
}

impl SuiteName {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => SuiteName::All,
            "g" => SuiteName::G,
            "lambert" => SuiteName::Lambert,
            "logs" => SuiteName::Logs,
            "mgf" => SuiteName::Mgf,
            "subpoisson" => SuiteName::Subpoisson,
            "counterexample" => SuiteName::Counterexample,
            "theorem2" => SuiteName::Theorem2,
            "conjecture" => SuiteName::Conjecture,
            "montecarlo" => SuiteName::MonteCarlo,
            other => {
                return Err(Error::Domain(format!(
                    "unknown suite '{other}' (expected all|g|lambert|logs|mgf|subpoisson|counterexample|theorem2|conjecture|montecarlo)"
                )))
            }
        })
    }

    pub const ALL_NAMES: &'static [&'static str] = &[
        "all",
        "g",
        "lambert",
        "logs",
        "mgf",
        "subpoisson",
        "counterexample",
        "theorem2",
        "conjecture",
        "montecarlo",
    ];
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Default grid for the g-function sweep (also used by the Lambert
/// inequality sweep).
pub fn default_g_grid() -> GridSpec {
    GridSpec::log(1e-6, 1e6, 10_000).expect("static grid")
}

/// Default grid for derivative-identity checks. Smaller than the 1-D sweep
/// default because every point takes two elevated-precision evaluations for
/// the centered difference; override via the CLI for denser sweeps.
pub fn default_derivative_grid() -> GridSpec {
    GridSpec::log(1e-3, 1e3, 2_000).expect("static grid")
}

/// Default grid for the Lambert residual certification.
pub fn default_residual_grid() -> GridSpec {
    GridSpec::log(1e-9, 1e9, 10_000).expect("static grid")
}

/// Default t-grid for MGF domination: (0, 5], 1000 points.
pub fn default_t_grid() -> GridSpec {
    GridSpec::linear(5e-3, 5.0, 1000).expect("static grid")
}

/// Default ratio grid for the Theorem-2 sweep: k = mu, 2mu, ..., 30mu.
pub fn default_theorem2_ratio_grid() -> GridSpec {
    GridSpec::linear(1.0, 30.0, 30).expect("static grid")
}

/// Default conjecture sweep grids: k/mu in [0.1, 40] x mu in [1, 10].
pub fn default_conjecture_ratio_grid() -> GridSpec {
    GridSpec::linear(0.1, 40.0, 50).expect("static grid")
}

pub fn default_conjecture_mu_grid() -> GridSpec {
    GridSpec::linear(1.0, 10.0, 21).expect("static grid")
}

/// Poisson/Binomial cases for the proof-chain ordering sweep: Poisson
/// mu in {1/10, 1/2, 1, 5, 10, 100} with k in 1..=50, Binomial
/// n in {5, 20, 100}, p in {1/10, 1/2, 9/10} with k <= min(n, 30).
pub fn default_chain_cases() -> Vec<(Distribution, u64)> {
    let mut cases = Vec::new();
    for mu in [rat(1, 10), rat(1, 2), rat(1, 1), rat(5, 1), rat(10, 1), rat(100, 1)] {
        for k in 1..=50u64 {
            cases.push((Distribution::Poisson { mean: mu.clone() }, k));
        }
    }
    for n in [5u64, 20, 100] {
        for p in [rat(1, 10), rat(1, 2), rat(9, 10)] {
            for k in 1..=n.min(30) {
                cases.push((
                    Distribution::Binomial {
                        trials: n,
                        p: p.clone(),
                    },
                    k,
                ));
            }
        }
    }
    cases
}

/// Representative cases for the per-call MGF chain check.
pub fn default_mgf_cases() -> Vec<(Distribution, u64)> {
    vec![
        (Distribution::Poisson { mean: rat(1, 1) }, 3),
        (Distribution::Poisson { mean: rat(1, 2) }, 7),
        (Distribution::Poisson { mean: rat(1000, 1) }, 1),
        (
            Distribution::Binomial {
                trials: 10,
                p: rat(1, 2),
            },
            2,
        ),
        (
            Distribution::Binomial {
                trials: 100,
                p: rat(3, 10),
            },
            12,
        ),
        (
            Distribution::BernoulliSum {
                probs: vec![rat(1, 3), rat(2, 3), rat(1, 4)],
            },
            4,
        ),
    ]
}

/// Seeded BernoulliSum instances for the MGF domination suite: lengths and
/// probabilities drawn from ChaCha12 on a dedicated stream, probabilities
/// exact rationals j/64 in (0, 1).
pub fn seeded_bernoulli_sums(seed: u64, count: usize) -> Vec<Distribution> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX); // never collides with MC worker streams
    (0..count)
        .map(|_| {
            let len = 1 + (rng.next_u64() % 12) as usize;
            let probs: Vec<BigRational> = (0..len)
                .map(|_| rat(1 + (rng.next_u64() % 63) as i64, 64))
                .collect();
            Distribution::BernoulliSum { probs }
        })
        .collect()
}

/// Distributions for the MGF domination suite.
pub fn default_subpoisson_dists(seed: u64) -> Vec<Distribution> {
    let mut dists = vec![
        Distribution::Poisson { mean: rat(1, 1) },
        Distribution::Poisson { mean: rat(1, 2) },
        Distribution::Poisson { mean: rat(7, 1) },
        Distribution::Binomial {
            trials: 10,
            p: rat(1, 2),
        },
        Distribution::Binomial {
            trials: 100,
            p: rat(3, 10),
        },
        Distribution::BernoulliSum {
            probs: vec![rat(1, 3), rat(2, 3)],
        },
    ];
    dists.extend(seeded_bernoulli_sums(seed, 20));
    dists
}

fn counterexample_grid(mu: f64) -> GridSpec {
    let t_max = (1.0 + 1.0 / mu).ln();
    GridSpec::linear(t_max * 1e-3, t_max * (1.0 - 1e-3), 500).expect("static grid")
}

/// Run one suite. `grid_override` replaces the primary 1-D grid of the
/// suite where that is meaningful.
pub fn run_suite(
    name: SuiteName,
    grid_override: Option<GridSpec>,
    cfg: &VerifyConfig,
) -> Result<Vec<(CheckReport, CsvTable)>> {
    let mut out = Vec::new();
    match name {
        SuiteName::All => {
            for n in [
                SuiteName::G,
                SuiteName::Lambert,
                SuiteName::Logs,
                SuiteName::Mgf,
                SuiteName::Subpoisson,
                SuiteName::Counterexample,
                SuiteName::Theorem2,
                SuiteName::Conjecture,
                SuiteName::MonteCarlo,
            ] {
                out.extend(run_suite(n, grid_override.clone(), cfg)?);
            }
        }
        SuiteName::G => {
            let grid = grid_override.clone().unwrap_or_else(default_g_grid);
            out.push(check_g_nonpositive(&grid, cfg)?);
            let dgrid = grid_override.unwrap_or_else(default_derivative_grid);
            out.push(check_gprime_form(&dgrid, cfg)?);
        }
        SuiteName::Lambert => {
            let rgrid = grid_override.clone().unwrap_or_else(default_residual_grid);
            out.push(check_lambert_residual(&rgrid, cfg)?);
            let dgrid = grid_override
                .clone()
                .unwrap_or_else(default_derivative_grid);
            out.push(check_lambert_derivative(&dgrid, cfg)?);
            let qgrid = grid_override.unwrap_or_else(default_g_grid);
            out.push(check_lambert_quadratic(&qgrid, cfg)?);
        }
        SuiteName::Logs => {
            let grid = grid_override.unwrap_or_else(default_g_grid);
            out.push(check_log_sandwich(&grid, cfg)?);
        }
        SuiteName::Mgf => {
            out.push(mgf_chain_suite(&default_mgf_cases(), cfg)?);
            out.push(proof_chain_suite(&default_chain_cases(), cfg)?);
        }
        SuiteName::Subpoisson => {
            let grid = grid_override.unwrap_or_else(default_t_grid);
            out.push(check_subpoissonian_mgf(
                &default_subpoisson_dists(cfg.seed),
                &grid,
                cfg,
            )?);
        }
        SuiteName::Counterexample => {
            for mu in [0.5, 1.0, 2.0] {
                let grid = grid_override
                    .clone()
                    .unwrap_or_else(|| counterexample_grid(mu));
                out.push(check_exponential_counterexample(mu, &grid, cfg)?);
            }
        }
        SuiteName::Theorem2 => {
            let grid = grid_override.unwrap_or_else(default_theorem2_ratio_grid);
            out.push(check_theorem2(10, &grid, cfg)?);
        }
        SuiteName::Conjecture => {
            let rgrid = grid_override.unwrap_or_else(default_conjecture_ratio_grid);
            out.push(conjecture_sweep(&rgrid, &default_conjecture_mu_grid(), cfg)?);
        }
        SuiteName::MonteCarlo => {
            let dist = Distribution::Binomial {
                trials: 100,
                p: rat(3, 10),
            };
            out.push(check_monte_carlo(&dist, 3, cfg)?);
        }
    }
    Ok(out)
}

/// True when every check passed (report-only checks always pass).
pub fn all_passed(reports: &[(CheckReport, CsvTable)]) -> bool {
    reports.iter().all(|(r, _)| r.passed)
}

/// Write `<check>.json` and `<check>.csv` per report plus a `summary.json`,
/// all byte-deterministic for a fixed configuration. When one check name
/// appears more than once (e.g. the counterexample at several means), an
/// index suffix keeps the file names unique and stable.
pub fn write_reports(
    dir: &Path,
    reports: &[(CheckReport, CsvTable)],
    cfg: &VerifyConfig,
) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut seen: Vec<String> = Vec::new();
    let mut summary_entries = Vec::new();
    for (report, csv) in reports {
        let base = {
            let n = seen.iter().filter(|s| **s == report.check_name).count();
            seen.push(report.check_name.clone());
            if n == 0 {
                report.check_name.clone()
            } else {
                format!("{}_{}", report.check_name, n + 1)
            }
        };
        let json_path = dir.join(format!("{base}.json"));
        let csv_path = dir.join(format!("{base}.csv"));
        let mut f = std::fs::File::create(&json_path)?;
        f.write_all(report.to_json().as_bytes())?;
        f.write_all(b"\n")?;
        let mut f = std::fs::File::create(&csv_path)?;
        f.write_all(csv.to_csv().as_bytes())?;
        summary_entries.push(serde_json::json!({
            "check_name": report.check_name,
            "file": base,
            "passed": report.passed,
            "worst_margin": report.worst_margin,
            "findings": report.findings.len(),
        }));
    }
    let summary = serde_json::json!({
        "schema_version": report::CSV_SCHEMA_VERSION,
        "precision_bits": cfg.precision_bits,
        "workers": cfg.workers,
        "seed": cfg.seed,
        "mc_samples": cfg.mc_samples,
        "all_passed": reports.iter().all(|(r, _)| r.passed),
        "checks": summary_entries,
    });
    let mut f = std::fs::File::create(dir.join("summary.json"))?;
    f.write_all(serde_json::to_string_pretty(&summary).expect("summary").as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
