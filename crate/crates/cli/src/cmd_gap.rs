use std::path::Path;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use kmono::gap::{
    default_tau_bar, estimate_rate, inequality_audit, refit_trial, run_trial, select_window,
    trial_seed, window_size, AuditOutcome, Exponential, GapTrialResult,
};

use crate::manifest::RunManifest;
use crate::output::{ensure_out_dir, fmt_f64, write_json, CsvWriter};
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct GapArgs {
    /// Monotonicity order
    #[arg(long)]
    pub k: usize,

    /// Estimation point
    #[arg(long)]
    pub x0: f64,

    /// Comma-separated sample sizes, e.g. 500,2000,8000
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,

    /// Trials per sample size
    #[arg(long)]
    pub trials: usize,

    /// Master seed (per-trial seeds derive from it)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Exponential rate of the truth density
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,

    /// Also run the fundamental-inequality audit per trial
    #[arg(long)]
    pub audit: bool,

    /// Worker threads (flag beats KMONO_WORKERS beats available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Serialize)]
struct QuantileRow {
    n: usize,
    q25: f64,
    q50: f64,
    q75: f64,
    q90: f64,
    finite: usize,
}

fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("KMONO_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|v| v.get())
            .unwrap_or(1)
    })
}

pub fn run(args: &GapArgs, out_dir: &Path) -> CliResult<()> {
    let out = ensure_out_dir(out_dir)?;
    let mut manifest = RunManifest::start("gap", args.seed);
    manifest.set("k", args.k);
    manifest.set("x0", args.x0);
    manifest.set(
        "n_list",
        args.n_list
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.set("trials", args.trials);
    manifest.set("rate", args.rate);
    manifest.set("audit", args.audit);

    if args.n_list.is_empty() || args.trials == 0 {
        return Err(CliError::Usage("need a nonempty --n-list and --trials >= 1".into()));
    }
    let workers = worker_count(args.workers);
    manifest.set("workers", workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;

    let density = Exponential::new(args.rate)?;
    let rate_design = args.n_list.len() >= 3 && args.trials >= 20;

    let trials: Vec<GapTrialResult> = if rate_design {
        let (estimate, trials) = pool.install(|| {
            estimate_rate(args.k, &args.n_list, args.trials, args.x0, &density, args.seed)
        })?;
        write_json(&out.join("gap_rate.json"), &estimate)?;
        println!(
            "slope {:.4} with 95% bootstrap CI [{:.4}, {:.4}] (conjectured −1/{})",
            estimate.slope,
            estimate.slope_ci.0,
            estimate.slope_ci.1,
            2 * args.k + 1
        );
        if estimate.degenerate_warning {
            println!("warning: more than half the trials were degenerate at some n");
        }
        trials
    } else {
        println!("note: rate estimate needs >= 3 sample sizes and >= 20 trials; running trials only");
        let jobs: Vec<(usize, usize)> = (0..args.n_list.len())
            .flat_map(|ni| (0..args.trials).map(move |t| (ni, t)))
            .collect();
        pool.install(|| {
            jobs.par_iter()
                .map(|&(ni, t)| {
                    let s = trial_seed(args.seed, (ni * args.trials + t) as u64);
                    run_trial(args.n_list[ni], args.k, args.x0, &density, s)
                })
                .collect::<kmono::Result<Vec<_>>>()
        })?
    };

    // per-trial table, ordered by (n, trial)
    let mut csv = CsvWriter::create(
        &out.join("gap_trials.csv"),
        &[
            "k",
            "n",
            "trial",
            "seed",
            "x0",
            "gap",
            "min_adjacent_gap",
            "noncoalescence_stat",
            "degenerate",
            "failed",
        ],
    )?;
    for (ni, &n) in args.n_list.iter().enumerate() {
        for (t, row) in trials.iter().filter(|r| r.n == n).enumerate() {
            let _ = ni;
            csv.row(&[
                row.k.to_string(),
                row.n.to_string(),
                t.to_string(),
                row.seed.to_string(),
                fmt_f64(row.x0),
                fmt_f64(row.gap),
                fmt_f64(row.min_adjacent_gap),
                fmt_f64(row.noncoalescence_stat),
                row.degenerate.to_string(),
                row.failed.to_string(),
            ])?;
        }
    }
    csv.finish()?;

    if trials.iter().all(|r| r.failed) {
        return Err(CliError::Core(kmono::Error::NonConvergence {
            iterations: 0,
            worst_violation: f64::NAN,
            best: Box::new(empty_fit(args.k)),
        }));
    }

    // non-coalescence statistic quantiles per n
    let quantiles: Vec<QuantileRow> = args
        .n_list
        .iter()
        .map(|&n| {
            let mut stats: Vec<f64> = trials
                .iter()
                .filter(|r| r.n == n && r.noncoalescence_stat.is_finite())
                .map(|r| r.noncoalescence_stat)
                .collect();
            stats.sort_by(f64::total_cmp);
            let q = |p: f64| -> f64 {
                if stats.is_empty() {
                    f64::NAN
                } else {
                    stats[((stats.len() - 1) as f64 * p).round() as usize]
                }
            };
            QuantileRow {
                n,
                q25: q(0.25),
                q50: q(0.5),
                q75: q(0.75),
                q90: q(0.9),
                finite: stats.len(),
            }
        })
        .collect();
    write_json(&out.join("gap_noncoalescence.json"), &quantiles)?;
    for q in &quantiles {
        println!(
            "n = {:>7}: noncoalescence stat quantiles 25/50/75/90 = {:.3}/{:.3}/{:.3}/{:.3} ({} finite)",
            q.n, q.q25, q.q50, q.q75, q.q90, q.finite
        );
    }

    if args.audit {
        run_audits(args, &density, &trials, &out, &pool)?;
    }
    manifest.finish(&out)
}

fn run_audits(
    args: &GapArgs,
    density: &Exponential,
    trials: &[GapTrialResult],
    out: &Path,
    pool: &rayon::ThreadPool,
) -> CliResult<()> {
    if args.k < 2 {
        return Err(CliError::Usage("--audit needs k >= 2".into()));
    }
    struct AuditRow {
        n: usize,
        seed: u64,
        outcome: Option<AuditOutcome>,
        reason: Option<String>,
    }
    let rows: Vec<AuditRow> = pool.install(|| {
        trials
            .par_iter()
            .map(|trial| {
                if trial.failed {
                    return AuditRow {
                        n: trial.n,
                        seed: trial.seed,
                        outcome: None,
                        reason: Some("solver failed".into()),
                    };
                }
                let audit = refit_trial(trial.n, args.k, density, trial.seed)
                    .and_then(|(fit, samples)| {
                        let m = window_size(args.k);
                        match select_window(fit.interior_knots(), args.x0, m) {
                            Some(w) => {
                                let tau_bar = default_tau_bar(w);
                                inequality_audit(&fit, &samples, density, tau_bar)
                            }
                            None => Ok(AuditOutcome::Skipped {
                                reason: "too few interior knots".into(),
                            }),
                        }
                    });
                match audit {
                    Ok(outcome) => AuditRow {
                        n: trial.n,
                        seed: trial.seed,
                        outcome: Some(outcome),
                        reason: None,
                    },
                    Err(e) => AuditRow {
                        n: trial.n,
                        seed: trial.seed,
                        outcome: None,
                        reason: Some(e.to_string()),
                    },
                }
            })
            .collect()
    });

    let mut csv = CsvWriter::create(
        &out.join("gap_audit.csv"),
        &[
            "n", "seed", "status", "tau_bar", "lhs", "e_n", "r_n", "slack", "identity_residual",
            "envelope_max",
        ],
    )?;
    let mut violations = 0usize;
    let mut done = 0usize;
    for row in &rows {
        match &row.outcome {
            Some(AuditOutcome::Done(a)) => {
                done += 1;
                if !a.holds {
                    violations += 1;
                }
                csv.row(&[
                    row.n.to_string(),
                    row.seed.to_string(),
                    if a.holds { "ok".into() } else { "violated".to_string() },
                    fmt_f64(a.tau_bar),
                    fmt_f64(a.lhs),
                    fmt_f64(a.e_n),
                    fmt_f64(a.r_n),
                    fmt_f64(a.slack),
                    fmt_f64(a.identity_residual),
                    fmt_f64(a.envelope_max),
                ])?;
            }
            Some(AuditOutcome::Skipped { reason }) => {
                csv.row(&[
                    row.n.to_string(),
                    row.seed.to_string(),
                    format!("skipped: {reason}"),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                ])?;
            }
            None => {
                csv.row(&[
                    row.n.to_string(),
                    row.seed.to_string(),
                    format!("error: {}", row.reason.clone().unwrap_or_default()),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                ])?;
            }
        }
    }
    csv.finish()?;
    println!("inequality audit: {done} completed, {violations} violations");
    if violations > 0 {
        return Err(CliError::Verification(format!(
            "{violations} inequality-audit violations"
        )));
    }
    Ok(())
}

fn empty_fit(k: usize) -> kmono::lse::LseFit {
    // placeholder carried by the all-trials-failed error
    let samples = kmono::lse::SampleSet::new(vec![1.0]).unwrap();
    kmono::lse::fit_lse(&samples, k.max(1), &kmono::lse::SolverConfig::default())
        .expect("single-point fit always converges")
}
