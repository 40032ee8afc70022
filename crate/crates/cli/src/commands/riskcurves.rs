use sped::selection::{search_frequency_grid, select_small_n_with_n1};
use sped::{
    argmin_on_grid, make_alpha_grid, Method, RiskCurve, SimPlan, SimSetting, TrueRiskModel,
};

use crate::cli::RiskCurvesArgs;
use crate::error::CliResult;
use crate::io::{exact, fixed10, write_text, CsvOut};
use crate::manifest::{QuadratureRecord, RunManifest};
use crate::svg::{Plot, Series};

fn points(c: &RiskCurve) -> Vec<(f64, f64)> {
    c.alphas
        .iter()
        .copied()
        .zip(c.values.iter().copied())
        .collect()
}

pub fn run(args: &RiskCurvesArgs) -> CliResult<()> {
    let cfg = args.selection.config()?;
    let setting = SimSetting {
        density_index: args.density,
        n: args.n,
        p: args.p,
        n_sim: args.realizations.max(1),
        seed: args.seed,
        methods: vec![Method::SmallN],
        config: cfg.clone(),
    };
    let plan = SimPlan::new(&setting)?;
    let (n, n1) = (args.n, plan.n1());
    let mut manifest = RunManifest::new("riskcurves", super::echo(args), Some(args.seed));
    manifest.parameters["noise_sd"] = plan.error().sd().into();
    manifest.parameters["n1"] = n1.into();

    let full_alphas = make_alpha_grid(n, &cfg)?;
    let sqrt_alphas = make_alpha_grid(n1, &cfg)?;
    let (lo, hi) = plan.alpha_range();
    let grid = search_frequency_grid(lo, hi, plan.error(), &cfg, 0.0)?;
    manifest.quadrature.push(QuadratureRecord::from_grid(
        "true risk",
        cfg.quad_tolerance,
        &grid,
        (lo, hi),
    ));
    let model = TrueRiskModel::new(plan.target(), plan.error(), cfg.m, &grid)?;
    let true_full = model.curve(&full_alphas, n)?;
    let true_sqrt = model.curve(&sqrt_alphas, n1)?;

    let mut out = CsvOut::create(&args.out, &["realization", "n1_kind", "alpha", "value"])?;
    for (kind, curve) in [("true_full", &true_full), ("true_sqrt", &true_sqrt)] {
        for (a, v) in curve.alphas.iter().zip(&curve.values) {
            out.row([String::new(), kind.to_string(), exact(*a), fixed10(*v)])?;
        }
    }
    let mut realizations = Vec::with_capacity(args.realizations);
    for r in 0..args.realizations as u64 {
        let sample = plan.draw(r)?;
        let full = select_small_n_with_n1(&sample, plan.error(), &cfg, n)?.curve;
        let sqrt = select_small_n_with_n1(&sample, plan.error(), &cfg, n1)?.curve;
        for (kind, curve) in [("full", &full), ("sqrt", &sqrt)] {
            for (a, v) in curve.alphas.iter().zip(&curve.values) {
                out.row([r.to_string(), kind.to_string(), exact(*a), fixed10(*v)])?;
            }
        }
        realizations.push((full, sqrt));
    }
    out.finish()?;
    manifest.output(&args.out);

    if let Some(svg) = &args.svg {
        let mut series = Vec::new();
        for (full, sqrt) in &realizations {
            let a_min = argmin_on_grid(full)?;
            let on_edge = a_min == full.alphas[0] || a_min == full.alphas[full.alphas.len() - 1];
            series.push(Series {
                points: points(full),
                color: "blue",
                dashed: on_edge,
                width: 0.8,
            });
            series.push(Series {
                points: points(sqrt),
                color: "red",
                dashed: false,
                width: 0.8,
            });
        }
        for c in [&true_full, &true_sqrt] {
            series.push(Series {
                points: points(c),
                color: "black",
                dashed: false,
                width: 2.0,
            });
        }
        let plot = Plot {
            title: format!(
                "Estimated risk, density {}, n = {n}, n1 = {n1}, p = {}",
                args.density, args.p
            ),
            x_label: "alpha".into(),
            y_label: "risk (surrogate scale)".into(),
            log_x: true,
            series,
            markers: vec![
                (argmin_on_grid(&true_full)?, "blue"),
                (argmin_on_grid(&true_sqrt)?, "red"),
            ],
        };
        write_text(svg, &plot.render())?;
        manifest.output(svg);
    }
    manifest.write_for(&args.out)
}
