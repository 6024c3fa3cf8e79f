use std::path::Path;

use clap::Args;

use kmono::counterexample::{blowup_scan, BlowupRow, E5Method};

use crate::manifest::RunManifest;
use crate::output::{ensure_out_dir, fmt_f64, write_json, CsvWriter};
use crate::{CliError, CliResult};

/// Pairwise relative tolerance of the cross-method checks.
const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Args)]
pub struct CounterexampleArgs {
    /// Single τ₁ instead of the geometric default grid
    #[arg(long)]
    pub tau1: Option<f64>,

    /// Geometric grid start (used when --tau1 is absent)
    #[arg(long, default_value_t = 0.2)]
    pub grid_from: f64,

    /// Geometric grid end
    #[arg(long, default_value_t = 1e-3)]
    pub grid_to: f64,

    /// Geometric grid size
    #[arg(long, default_value_t = 12)]
    pub grid_count: usize,

    /// Link rule for τ₂: `factor=2` (default) or `offset=0.3`
    #[arg(long, default_value = "factor=2")]
    pub link: String,

    /// Comma-separated methods: determinant, closed_form, spline_numeric
    #[arg(long, default_value = "determinant,closed_form")]
    pub methods: String,
}

fn parse_link(s: &str) -> CliResult<Box<dyn Fn(f64) -> f64>> {
    if let Some(v) = s.strip_prefix("factor=") {
        let f: f64 = v
            .parse()
            .map_err(|e| CliError::Usage(format!("link factor: {e}")))?;
        return Ok(Box::new(move |t| f * t));
    }
    if let Some(v) = s.strip_prefix("offset=") {
        let o: f64 = v
            .parse()
            .map_err(|e| CliError::Usage(format!("link offset: {e}")))?;
        return Ok(Box::new(move |t| t + o));
    }
    Err(CliError::Usage(format!(
        "unknown link '{s}' (expected factor=F or offset=O)"
    )))
}

fn parse_methods(s: &str) -> CliResult<Vec<E5Method>> {
    s.split(',')
        .map(|p| p.trim().parse::<E5Method>().map_err(CliError::Usage))
        .collect()
}

pub fn run(args: &CounterexampleArgs, out_dir: &Path) -> CliResult<()> {
    let out = ensure_out_dir(out_dir)?;
    let mut manifest = RunManifest::start("counterexample", 0);
    manifest.set("link", &args.link);
    manifest.set("methods", &args.methods);

    let grid: Vec<f64> = match args.tau1 {
        Some(t) => {
            manifest.set("tau1", t);
            vec![t]
        }
        None => {
            manifest.set("grid_from", args.grid_from);
            manifest.set("grid_to", args.grid_to);
            manifest.set("grid_count", args.grid_count);
            if args.grid_count < 2 || args.grid_from <= 0.0 || args.grid_to <= 0.0 {
                return Err(CliError::Usage(
                    "geometric grid needs positive endpoints and count >= 2".into(),
                ));
            }
            let ratio = (args.grid_to / args.grid_from).powf(1.0 / (args.grid_count - 1) as f64);
            (0..args.grid_count)
                .map(|i| args.grid_from * ratio.powi(i as i32))
                .collect()
        }
    };
    let link = parse_link(&args.link)?;
    let methods = parse_methods(&args.methods)?;
    if methods.is_empty() {
        return Err(CliError::Usage("need at least one method".into()));
    }

    let rows = blowup_scan(&grid, link.as_ref(), &methods)?;

    let mut csv = CsvWriter::create(
        &out.join("blowup.csv"),
        &["tau1", "tau2", "method", "e5_at_zero", "product_21tau1"],
    )?;
    for r in &rows {
        csv.row(&[
            fmt_f64(r.tau1),
            fmt_f64(r.tau2),
            r.method.to_string(),
            fmt_f64(r.e5_at_zero),
            fmt_f64(r.product_21tau1),
        ])?;
    }
    csv.finish()?;
    write_json(&out.join("blowup.json"), &rows)?;

    println!("tau1          product_21tau1 (per method)");
    for chunk in rows.chunks(methods.len()) {
        let products: Vec<String> = chunk
            .iter()
            .map(|r| format!("{}={:.6}", r.method, r.product_21tau1))
            .collect();
        println!("{:<13.6e} {}", chunk[0].tau1, products.join("  "));
    }

    cross_check(&rows, methods.len())?;
    manifest.finish(&out)
}

fn cross_check(rows: &[BlowupRow], methods_per_point: usize) -> CliResult<()> {
    for chunk in rows.chunks(methods_per_point) {
        for pair in chunk.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let denom = 1.0f64.max(a.e5_at_zero.abs()).max(b.e5_at_zero.abs());
            if (a.e5_at_zero - b.e5_at_zero).abs() / denom > CROSS_CHECK_TOL {
                return Err(CliError::Verification(format!(
                    "methods {} and {} disagree at tau1={}: {} vs {}",
                    a.method, b.method, a.tau1, a.e5_at_zero, b.e5_at_zero
                )));
            }
        }
    }
    Ok(())
}
