use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::Deserialize;
use sped::{
    metric_catastrophic, metric_mean_ratio, metric_mise_ratio, metric_quantile, Method, SimRecord,
};

use crate::cli::{Format, Metric, ReportArgs};
use crate::error::{CliError, CliResult};
use crate::io::{exact, write_text};
use crate::manifest::RunManifest;

#[derive(Debug, Deserialize)]
struct Row {
    replicate: u64,
    method: String,
    alpha_hat: f64,
    ise: f64,
    ise_oracle: f64,
    loss_ratio: f64,
}

/// Simulation setting a record file belongs to. `p` is kept as written so
/// keys compare exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Setting {
    density: u64,
    n: u64,
    p: String,
}

type Groups = BTreeMap<Setting, BTreeMap<Method, Vec<SimRecord>>>;

fn setting_of(path: &Path) -> CliResult<Setting> {
    let manifest = RunManifest::read_for(path)?;
    let p = &manifest.parameters;
    let bad = |field: &str| CliError::Data(format!("{}: manifest lacks {field}", path.display()));
    Ok(Setting {
        density: p["density"].as_u64().ok_or_else(|| bad("density"))?,
        n: p["n"].as_u64().ok_or_else(|| bad("n"))?,
        p: p["p"].as_f64().map(exact).ok_or_else(|| bad("p"))?,
    })
}

fn read_records(path: &Path) -> CliResult<Vec<SimRecord>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row =
            row.map_err(|e| CliError::Data(format!("{}: record {}: {e}", path.display(), i + 1)))?;
        let method: Method = row
            .method
            .parse()
            .map_err(|e| CliError::Data(format!("{}: record {}: {e}", path.display(), i + 1)))?;
        out.push(SimRecord {
            replicate: row.replicate,
            method,
            alpha_hat: row.alpha_hat,
            ise: row.ise,
            ise_oracle: row.ise_oracle,
            loss_ratio: row.loss_ratio,
        });
    }
    Ok(out)
}

fn load(paths: &[impl AsRef<Path>]) -> CliResult<Groups> {
    let mut groups = Groups::new();
    for path in paths {
        let path = path.as_ref();
        let setting = setting_of(path)?;
        let entry = groups.entry(setting).or_default();
        for r in read_records(path)? {
            entry.entry(r.method).or_default().push(r);
        }
    }
    Ok(groups)
}

/// One output row: `(setting, method, value, standard error)`.
type Cell = (Setting, Method, f64, Option<f64>);

fn column_order(m: Method) -> u8 {
    match m {
        Method::CrossValidation => 0,
        Method::SmallN => 1,
        Method::Oracle => 2,
    }
}

fn compute(
    groups: &Groups,
    metric: Metric,
    threshold: f64,
    baseline: Method,
) -> CliResult<Vec<Cell>> {
    let mut cells = Vec::new();
    for (setting, by_method) in groups {
        let base = by_method
            .get(&baseline)
            .or_else(|| by_method.values().next())
            .expect("groups are non-empty");
        for (&method, records) in by_method {
            let (v, se) = match metric {
                Metric::Catastrophic => (metric_catastrophic(records, threshold)?, None),
                Metric::Q99 => (metric_quantile(records, 0.99)?, None),
                Metric::MeanRatio => {
                    let (m, se) = metric_mean_ratio(records)?;
                    (m, Some(se))
                }
                Metric::MiseRatio => (metric_mise_ratio(base, records)?, None),
            };
            cells.push((setting.clone(), method, v, se));
        }
    }
    Ok(cells)
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Catastrophic => "catastrophic",
        Metric::Q99 => "q99",
        Metric::MeanRatio => "mean-ratio",
        Metric::MiseRatio => "mise-ratio",
    }
}

fn method_title(m: Method) -> &'static str {
    match m {
        Method::SmallN => "Small-n risk",
        Method::CrossValidation => "Cross-validation",
        Method::Oracle => "Optimal",
    }
}

fn markdown(metric: Metric, cells: &[Cell], threshold: f64, baseline: Method) -> String {
    let mut methods: Vec<Method> = cells.iter().map(|c| c.1).collect();
    methods.sort_by_key(|&m| column_order(m));
    methods.dedup();
    let caption = match metric {
        Metric::Catastrophic => format!("Probability (%) that the loss ratio exceeds {threshold}"),
        Metric::Q99 => "0.99 quantile of the loss ratio".to_string(),
        Metric::MeanRatio => "Mean loss ratio (standard error)".to_string(),
        Metric::MiseRatio => format!("MISE of {} divided by the MISE of each method", baseline),
    };
    let mut s = String::new();
    let _ = writeln!(s, "### {}\n\n{caption}\n", metric_name(metric));
    let _ = write!(s, "| Density | n | p |");
    for m in &methods {
        let _ = write!(s, " {} |", method_title(*m));
    }
    let _ = write!(s, "\n|---|---|---|");
    for _ in &methods {
        let _ = write!(s, "---|");
    }
    s.push('\n');
    let mut settings: Vec<&Setting> = cells.iter().map(|c| &c.0).collect();
    settings.dedup();
    for st in settings {
        let _ = write!(s, "| {} | {} | {} |", st.density, st.n, st.p);
        for m in &methods {
            let cell = cells.iter().find(|c| &c.0 == st && c.1 == *m);
            let text = match cell {
                None => String::new(),
                Some((_, _, v, se)) => match metric {
                    Metric::Catastrophic => format!("{:.1}", 100.0 * v),
                    Metric::Q99 => format!("{v:.1}"),
                    Metric::MeanRatio => format!("{v:.2} ({:.2})", se.unwrap_or(0.0)),
                    Metric::MiseRatio => format!("{v:.2}"),
                },
            };
            let _ = write!(s, " {text} |");
        }
        s.push('\n');
    }
    s
}

pub fn run(args: &ReportArgs) -> CliResult<()> {
    let groups = load(&args.inputs)?;
    let baseline = args.baseline.method();
    let mut text = String::new();
    if args.format == Format::Csv {
        text.push_str("metric,density,n,p,method,value,se\n");
    }
    for (i, &metric) in args.metrics.iter().enumerate() {
        let cells = compute(&groups, metric, args.threshold, baseline)?;
        match args.format {
            Format::Md => {
                if i > 0 {
                    text.push('\n');
                }
                text.push_str(&markdown(metric, &cells, args.threshold, baseline));
            }
            Format::Csv => {
                for (st, m, v, se) in &cells {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{},{},{}",
                        metric_name(metric),
                        st.density,
                        st.n,
                        st.p,
                        m,
                        exact(*v),
                        se.map(exact).unwrap_or_default()
                    );
                }
            }
        }
    }
    match &args.out {
        Some(path) => {
            write_text(path, &text)?;
            let mut manifest = RunManifest::new("report", super::echo(args), None);
            manifest.output(path);
            manifest.write_for(path)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
