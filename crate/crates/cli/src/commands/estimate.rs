use sped::selection::{search_frequency_grid, select_small_n};
use sped::{estimate_density, select_cv, ErrorModel, FrequencyGrid, PenaltyKernel};

use crate::cli::{EstimateArgs, Selector, XGrid};
use crate::error::{CliError, CliResult};
use crate::io::{exact, read_sample, write_text, CsvOut};
use crate::manifest::{QuadratureRecord, RunManifest};
use crate::svg::{Plot, Series};

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    if let Some(a) = args.alpha {
        if !(a.is_finite() && a > 0.0) {
            return Err(CliError::Usage(format!("alpha must be positive, got {a}")));
        }
    }
    let cfg = args.selection.config()?;
    let sample = read_sample(&args.input)?;
    let error = ErrorModel::gaussian(args.noise_sd)?;
    let mut manifest = RunManifest::new("estimate", super::echo(args), None);

    let alpha = match (args.alpha, args.select) {
        (Some(a), _) => a,
        (None, Some(sel)) => {
            let result = match sel {
                Selector::SmallN => select_small_n(&sample, &error, &cfg)?,
                Selector::Cv => select_cv(&sample, &error, &cfg)?,
            };
            let a = &result.curve.alphas;
            let (lo, hi) = (a[0], a[a.len() - 1]);
            let grid = search_frequency_grid(lo, hi, &error, &cfg, sample.max_abs())?;
            manifest.quadrature.push(QuadratureRecord::from_grid(
                "selection",
                cfg.quad_tolerance,
                &grid,
                (lo, hi),
            ));
            manifest.parameters["alpha_hat"] = result.alpha_hat.into();
            manifest.parameters["alpha_prime"] = result.alpha_prime.into();
            manifest.parameters["n1"] = result.curve.n1.into();
            result.alpha_hat
        }
        (None, None) => {
            return Err(CliError::Usage(
                "either --alpha or --select is required".into(),
            ))
        }
    };

    let xg = args
        .xgrid
        .unwrap_or_else(|| default_xgrid(sample.values(), args.noise_sd));
    let xs = xg.points();
    let reach = xs.iter().fold(sample.max_abs(), |r, x| r.max(x.abs()));
    let grid =
        FrequencyGrid::for_alpha_range(alpha, alpha, cfg.m, &error, cfg.quad_tolerance, reach)?;
    manifest.quadrature.push(QuadratureRecord::from_grid(
        "estimate",
        cfg.quad_tolerance,
        &grid,
        (alpha, alpha),
    ));
    let kernel = PenaltyKernel::new(alpha, cfg.m, error)?;
    let f_hat = estimate_density(&sample, &kernel, &xs, &grid)?;

    let mut out = CsvOut::create(&args.out, &["x", "f_hat"])?;
    for (x, f) in xs.iter().zip(&f_hat) {
        out.row([exact(*x), exact(*f)])?;
    }
    out.finish()?;
    manifest.parameters["alpha_used"] = alpha.into();
    manifest.output(&args.out);

    if let Some(svg) = &args.svg {
        let plot = Plot {
            title: format!("Deconvolved density estimate (alpha = {alpha:.4e})"),
            x_label: "x".into(),
            y_label: "f_hat".into(),
            log_x: false,
            series: vec![Series {
                points: xs.iter().copied().zip(f_hat.iter().copied()).collect(),
                color: "black",
                dashed: false,
                width: 1.5,
            }],
            markers: Vec::new(),
        };
        write_text(svg, &plot.render())?;
        manifest.output(svg);
    }
    manifest.write_for(&args.out)
}

fn default_xgrid(ys: &[f64], noise_sd: f64) -> XGrid {
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.25 * (hi - lo) + 3.0 * noise_sd;
    XGrid {
        min: lo - pad,
        max: hi + pad,
        count: 401,
    }
}
