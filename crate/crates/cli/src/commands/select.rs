use std::path::PathBuf;

use sped::selection::{search_frequency_grid, select_small_n_with_n1};
use sped::{select_cv, ErrorModel, SampleSpectrum};

use crate::cli::{SelectArgs, Selector};
use crate::error::CliResult;
use crate::io::{exact, fixed10, read_sample, CsvOut};
use crate::manifest::{QuadratureRecord, RunManifest};

pub fn run(args: &SelectArgs) -> CliResult<()> {
    let cfg = args.selection.config()?;
    let sample = read_sample(&args.input)?;
    let error = ErrorModel::gaussian(args.noise_sd)?;
    let mut manifest = RunManifest::new("select", super::echo(args), None);

    let result = match args.method {
        Selector::SmallN => {
            let n1 = if args.n1_equals_n {
                sample.len()
            } else {
                cfg.n1_rule.apply(sample.len())
            };
            select_small_n_with_n1(&sample, &error, &cfg, n1)?
        }
        Selector::Cv => select_cv(&sample, &error, &cfg)?,
    };
    let curve = &result.curve;
    let (lo, hi) = (curve.alphas[0], curve.alphas[curve.alphas.len() - 1]);
    let grid = search_frequency_grid(lo, hi, &error, &cfg, sample.max_abs())?;
    manifest.quadrature.push(QuadratureRecord::from_grid(
        "selection",
        cfg.quad_tolerance,
        &grid,
        (lo, hi),
    ));

    if let Some(path) = &args.curve_out {
        let mut out = CsvOut::create(path, &["alpha", "criterion"])?;
        for (a, v) in curve.alphas.iter().zip(&curve.values) {
            out.row([exact(*a), fixed10(*v)])?;
        }
        out.finish()?;
        manifest.output(path);
    }
    if let Some(path) = &args.decomposition_out {
        let spectrum = SampleSpectrum::new(&sample, &grid, &error, cfg.m)?;
        let mut out = CsvOut::create(path, &["alpha", "b_hat", "v_over_n1", "criterion"])?;
        for &a in &curve.alphas {
            let d = spectrum.decompose(a, curve.n1)?;
            out.row([
                exact(a),
                fixed10(d.b_hat),
                fixed10(d.v_over_n1),
                fixed10(d.total()),
            ])?;
        }
        out.finish()?;
        manifest.output(path);
    }

    manifest.parameters["alpha_hat"] = result.alpha_hat.into();
    manifest.parameters["alpha_prime"] = result.alpha_prime.into();
    manifest.parameters["n1"] = curve.n1.into();
    println!("alpha_hat={}", exact(result.alpha_hat));
    println!("alpha_prime={}", exact(result.alpha_prime));
    println!("n1={}", curve.n1);

    let base = args
        .out
        .clone()
        .or_else(|| args.curve_out.clone())
        .unwrap_or_else(|| {
            let mut p = args.input.clone().into_os_string();
            p.push(".select");
            PathBuf::from(p)
        });
    manifest.write_for(&base)
}
