use std::path::Path;

use clap::Args;
use serde::Serialize;

use kmono::lse::{fenchel_audit, fit_lse, LseFitExport, SampleSet, SolverConfig};

use crate::manifest::RunManifest;
use crate::output::{ensure_out_dir, fmt_f64, write_json, CsvWriter};
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct LseArgs {
    /// Monotonicity order of the density class
    #[arg(long)]
    pub k: usize,

    /// Draw N observations from Exponential(RATE)
    #[arg(long, num_args = 2, value_names = ["N", "RATE"])]
    pub sample_exp: Option<Vec<f64>>,

    /// Seed for --sample-exp
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Read observations from a file (one per line)
    #[arg(long)]
    pub data: Option<std::path::PathBuf>,

    /// Fenchel tolerance factor
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,

    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,

    /// Support pad beyond max(X) as a fraction (default 1/k)
    #[arg(long)]
    pub support_pad: Option<f64>,

    /// Points in the density-curve CSV
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Serialize)]
struct FailureJson {
    error: String,
    iterations: usize,
    worst_violation: f64,
    best: LseFitExport,
}

fn load_samples(args: &LseArgs) -> CliResult<SampleSet> {
    match (&args.sample_exp, &args.data) {
        (Some(spec), None) => {
            let n = spec[0] as usize;
            if spec[0].fract() != 0.0 || n == 0 {
                return Err(CliError::Usage("--sample-exp N must be a positive integer".into()));
            }
            Ok(SampleSet::from_exponential(n, spec[1], args.seed)?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let mut obs = Vec::new();
            for (ln, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                obs.push(line.parse::<f64>().map_err(|e| {
                    CliError::Usage(format!("{}:{}: {e}", path.display(), ln + 1))
                })?);
            }
            Ok(SampleSet::new(obs)?)
        }
        _ => Err(CliError::Usage(
            "provide exactly one of --sample-exp or --data".into(),
        )),
    }
}

pub fn run(args: &LseArgs, out_dir: &Path) -> CliResult<()> {
    let out = ensure_out_dir(out_dir)?;
    let mut manifest = RunManifest::start("lse", args.seed);
    manifest.set("k", args.k);
    if let Some(spec) = &args.sample_exp {
        manifest.set("sample_exp", format!("{},{}", spec[0], spec[1]));
    }
    if let Some(path) = &args.data {
        manifest.set("data", path.display());
    }
    let config = SolverConfig {
        tolerance: args.tolerance,
        max_iterations: args.max_iterations,
        support_pad: args.support_pad,
    };
    manifest.set("solver_config", &config);

    let samples = load_samples(args)?;
    let fit = match fit_lse(&samples, args.k, &config) {
        Ok(fit) => fit,
        Err(kmono::Error::NonConvergence {
            iterations,
            worst_violation,
            best,
        }) => {
            write_json(
                &out.join("lse_fit.json"),
                &FailureJson {
                    error: "solver did not converge".into(),
                    iterations,
                    worst_violation,
                    best: best.export(),
                },
            )?;
            manifest.finish(&out)?;
            return Err(CliError::Core(kmono::Error::NonConvergence {
                iterations,
                worst_violation,
                best,
            }));
        }
        Err(e) => return Err(e.into()),
    };

    write_json(&out.join("lse_fit.json"), &fit.export())?;

    let mut csv = CsvWriter::create(&out.join("lse_density.csv"), &["x", "density"])?;
    for i in 0..=args.grid {
        let x = fit.support_upper * i as f64 / args.grid as f64;
        csv.row(&[fmt_f64(x), fmt_f64(fit.density(x))])?;
    }
    csv.finish()?;

    let audit = fenchel_audit(&fit, &samples, 10_000)?;
    println!(
        "n = {}, k = {}, knots = {}, mass = {:.6}, objective = {:.9e}",
        samples.len(),
        args.k,
        fit.knots.len(),
        fit.mass,
        fit.objective
    );
    println!(
        "fenchel audit: min gap {:.3e} at x = {:.4}; max |gap| at knots {:.3e}{}",
        audit.min_gap,
        audit.argmin,
        audit.max_knot_gap,
        match audit.max_knot_slope_gap {
            Some(s) => format!("; max |slope gap| at interior knots {s:.3e}"),
            None => String::new(),
        }
    );
    manifest.finish(&out)
}
