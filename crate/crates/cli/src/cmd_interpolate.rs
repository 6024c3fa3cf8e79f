use std::path::Path;

use clap::Args;
use serde::Serialize;

use kmono::spline::{
    interp_error, perfect_spline, ErrorReport, InterpTarget, KnotVector, Polynomial,
    TruncatedPower,
};

use crate::manifest::RunManifest;
use crate::output::{ensure_out_dir, fmt_f64, write_json, CsvWriter};
use crate::{parse_f64_list, CliError, CliResult};

#[derive(Args)]
pub struct InterpolateArgs {
    /// Interpolation order (2k−2 nodes, spline degree 2k−1)
    #[arg(long)]
    pub k: usize,

    /// Comma-separated node list, e.g. 0,0.3,0.6,1
    #[arg(long, value_delimiter = ',', required = true)]
    pub nodes: Vec<f64>,

    /// Target: `poly:c0,c1,...` | `perfect-spline` | `trunc:t`
    #[arg(long)]
    pub target: String,

    /// Sample points per knot interval in the error-curve CSV
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

enum Target {
    Poly(Polynomial),
    Perfect(kmono::spline::PiecewisePoly),
    Trunc(TruncatedPower),
}

impl Target {
    fn as_dyn(&self) -> &dyn InterpTarget {
        match self {
            Target::Poly(p) => p,
            Target::Perfect(p) => p,
            Target::Trunc(t) => t,
        }
    }
}

fn parse_target(spec: &str, k: usize, nodes: &KnotVector) -> CliResult<Target> {
    if let Some(coeffs) = spec.strip_prefix("poly:") {
        let c = parse_f64_list(coeffs).map_err(CliError::Usage)?;
        if c.is_empty() {
            return Err(CliError::Usage("poly target needs coefficients".into()));
        }
        return Ok(Target::Poly(Polynomial::new(c)));
    }
    if spec == "perfect-spline" {
        if nodes.first() != 0.0 || nodes.last() != 1.0 {
            return Err(CliError::Usage(
                "perfect-spline target needs nodes spanning [0, 1]".into(),
            ));
        }
        let s = perfect_spline(k, nodes.interior())?;
        return Ok(Target::Perfect(s));
    }
    if let Some(t) = spec.strip_prefix("trunc:") {
        let u: f64 = t
            .parse()
            .map_err(|e| CliError::Usage(format!("trunc target: {e}")))?;
        return Ok(Target::Trunc(TruncatedPower { u, k }));
    }
    Err(CliError::Usage(format!(
        "unknown target '{spec}' (expected poly:..., perfect-spline, or trunc:t)"
    )))
}

#[derive(Serialize)]
struct ReportJson<'a> {
    k: usize,
    nodes: &'a [f64],
    target: &'a str,
    #[serde(flatten)]
    report: &'a ErrorReport,
}

pub fn run(args: &InterpolateArgs, out_dir: &Path) -> CliResult<()> {
    let out = ensure_out_dir(out_dir)?;
    let mut manifest = RunManifest::start("interpolate", 0);
    manifest.set("k", args.k);
    manifest.set(
        "nodes",
        args.nodes
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.set("target", &args.target);
    manifest.set("grid", args.grid);

    let nodes = KnotVector::new(args.nodes.clone())?;
    let target = parse_target(&args.target, args.k, &nodes)?;
    let report = interp_error(target.as_dyn(), &nodes, args.k)?;

    // error-curve CSV: x, error, error_d1..error_d{2k-1}
    let orders: Vec<usize> = report.sup.iter().map(|e| e.deriv_order).collect();
    let header: Vec<String> = std::iter::once("x".to_string())
        .chain(orders.iter().map(|&q| {
            if q == 0 {
                "error".to_string()
            } else {
                format!("error_d{q}")
            }
        }))
        .collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::create(&out.join("interpolate_error.csv"), &header_refs)?;
    let nb = nodes.as_slice();
    for (i, w) in nb.windows(2).enumerate() {
        let count = if i + 1 == nb.len() - 1 {
            args.grid + 1 // include the right endpoint on the last interval
        } else {
            args.grid
        };
        for j in 0..count {
            let x = w[0] + (w[1] - w[0]) * j as f64 / args.grid as f64;
            let mut row = vec![fmt_f64(x)];
            for &q in &orders {
                let iv = nodes.interval_index(x);
                let e = report.interpolant.eval_in_interval(iv, x, q)
                    - target.as_dyn().deriv(x, q).unwrap();
                row.push(fmt_f64(e));
            }
            csv.row(&row)?;
        }
    }
    csv.finish()?;

    write_json(
        &out.join("interpolate_report.json"),
        &ReportJson {
            k: args.k,
            nodes: nb,
            target: &args.target,
            report: &report,
        },
    )?;

    for entry in &report.sup {
        println!(
            "order {:>2}: sup {:.6e} at x = {:.6}",
            entry.deriv_order, entry.sup, entry.arg_max
        );
    }
    println!("condition estimate: {:.3e}", report.cond_estimate);
    manifest.finish(&out)
}
