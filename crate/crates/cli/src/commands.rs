//! The five subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{bail, Context, Result};

use modechoice::dataset::{
    encode_dataset, generate_synthetic, ingest_table, write_table, BinningScheme, EncodedDataset, SchemaRegistry,
    ShipmentRecord, FEATURE_NAMES,
};
use modechoice::derive_seed;
use modechoice::eval::{
    compute_metrics, holdout_split, read_results_jsonl, run_experiment_grid, write_accuracy_by_ratio,
    write_accuracy_by_size, write_per_mode_metrics, write_results_csv, write_results_jsonl, write_timings_csv, GridRow,
};
use modechoice::learner::{fit, Family, FittedModel};

use crate::artifacts::{sha256_hex, ArtifactWriter};
use crate::config::RunConfig;

/// Encoded input data plus the hash of its CSV form.
pub struct LoadedData {
    pub registry: SchemaRegistry,
    pub records: Vec<ShipmentRecord>,
    pub encoded: EncodedDataset,
    pub sha256: String,
}

pub fn registry(config: &RunConfig) -> Result<SchemaRegistry> {
    match &config.schema {
        Some(path) => SchemaRegistry::load(path).with_context(|| format!("loading schema {}", path.display())),
        None => Ok(SchemaRegistry::default()),
    }
}

/// Reads the configured table, or draws the configured synthetic sample.
pub fn load_data(config: &RunConfig) -> Result<LoadedData> {
    let registry = registry(config)?;
    let (records, sha256) = match &config.data.path {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            let records =
                ingest_table(&bytes[..], &registry).with_context(|| format!("ingesting {}", path.display()))?;
            (records, sha256_hex(&bytes))
        }
        None => {
            let records = generate_synthetic(&config.data.synthetic.spec(config.seed), &registry)?;
            let mut bytes = Vec::new();
            write_table(&records, &registry, &mut bytes)?;
            (records, sha256_hex(&bytes))
        }
    };
    let encoded = encode_dataset(&records, &BinningScheme::default())?;
    Ok(LoadedData {
        registry,
        records,
        encoded,
        sha256,
    })
}

pub fn generate(config: &RunConfig) -> Result<PathBuf> {
    let registry = registry(config)?;
    let spec = config.data.synthetic.spec(config.seed);
    let records = generate_synthetic(&spec, &registry)?;
    let mut out = ArtifactWriter::new(&config.out)?;
    let mut bytes = Vec::new();
    write_table(&records, &registry, &mut bytes)?;
    let path = out.write_bytes("shipments.csv", &bytes)?;
    let config_toml = config.to_toml_string();
    out.finish("generate", config.seed, &config_toml, Some(sha256_hex(&bytes)))?;
    println!("wrote {} records to {}", records.len(), path.display());
    Ok(path)
}

/// What `run` produced; `errors` counts failed cells.
pub struct RunSummary {
    pub rows: Vec<GridRow>,
    pub errors: usize,
    pub out: PathBuf,
}

fn write_tables(out: &mut ArtifactWriter, rows: &[GridRow]) -> Result<()> {
    out.write_with("accuracy_by_ratio.csv", |w| write_accuracy_by_ratio(rows, w))?;
    out.write_with("accuracy_by_size.csv", |w| write_accuracy_by_size(rows, w))?;
    out.write_with("per_mode_metrics.csv", |w| write_per_mode_metrics(rows, w))?;
    Ok(())
}

pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let data = load_data(config)?;
    let spec = config.grid_spec();
    let n_cells = spec.cells().len();
    eprintln!(
        "running {n_cells} cells on {} rows with {} worker(s)",
        data.encoded.n_samples(),
        config.workers
    );

    // Best model per family: highest CV mean, earliest cell on ties.
    let mut best: BTreeMap<Family, (f64, usize, FittedModel)> = BTreeMap::new();
    let done = AtomicUsize::new(0);
    let result = run_experiment_grid(&spec, &data.encoded, config.workers, |outcome| {
        let row = &outcome.row;
        let k = &row.key;
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        let status = match (&row.error, &row.cv) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(cv)) => format!("cv {:.4} ± {:.4}", cv.mean, cv.std),
            (None, None) => String::new(),
        };
        eprintln!(
            "[{n}/{n_cells}] {} ratio {} folds {} size {}: {status} ({:.1}s)",
            k.family, k.ratio, k.folds, k.sample_size, row.wall_time_s
        );
        if let (Some(cv), Some(model)) = (&row.cv, &outcome.model) {
            let better = best
                .get(&k.family)
                .is_none_or(|(m, i, _)| cv.mean > *m || (cv.mean == *m && k.index < *i));
            if better {
                best.insert(k.family, (cv.mean, k.index, model.clone()));
            }
        }
    })?;

    let mut out = ArtifactWriter::new(&config.out)?;
    let rows = result.rows;
    out.write_with("results.csv", |w| write_results_csv(&rows, w))?;
    out.write_with("results.jsonl", |w| write_results_jsonl(&rows, w))?;
    out.write_with("timings.csv", |w| write_timings_csv(&rows, w))?;
    write_tables(&mut out, &rows)?;
    for (family, (_, _, model)) in &best {
        let json = model.to_json()?;
        out.write_bytes(&format!("models/{family}.json"), json.as_bytes())?;
    }
    let config_toml = config.to_toml_string();
    out.write_bytes("config.toml", config_toml.as_bytes())?;
    let out_dir = out.root().to_path_buf();
    out.finish("run", config.seed, &config_toml, Some(data.sha256))?;

    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(RunSummary {
        rows,
        errors,
        out: out_dir,
    })
}

/// Fits one family on a holdout training part and scores the test part.
pub fn fit_one(config: &RunConfig, family: Family, ratio: f64) -> Result<(FittedModel, f64)> {
    let data = load_data(config)?;
    let (train, test) = holdout_split(&data.encoded, ratio, derive_seed(config.seed, "fit/holdout"))?;
    let spec = config.learner(family).with_seed(derive_seed(config.seed, "fit/model"));
    let model = fit(&spec, &train)?;
    let predicted = model.predict(test.features())?;
    let metrics = compute_metrics(test.labels(), &predicted, test.weights())?;

    let mut out = ArtifactWriter::new(&config.out)?;
    out.write_bytes(&format!("models/{family}.json"), model.to_json()?.as_bytes())?;
    let mut metrics_json = serde_json::to_string_pretty(&metrics)?;
    metrics_json.push('\n');
    out.write_bytes(&format!("metrics_{family}.json"), metrics_json.as_bytes())?;
    let config_toml = config.to_toml_string();
    out.finish("fit", config.seed, &config_toml, Some(data.sha256))?;
    Ok((model, metrics.accuracy))
}

pub fn feature_names(n: usize) -> Vec<String> {
    if n == FEATURE_NAMES.len() {
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        (0..n).map(|i| format!("x{i}")).collect()
    }
}

/// Feature indices by decreasing importance, lower index first on ties.
pub fn ranking(importance: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..importance.len()).collect();
    order.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]).then(a.cmp(&b)));
    order
}

fn model_label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned())
}

/// One ranked table per model plus a side-by-side comparison.
pub fn importance(config: &RunConfig, models: &[PathBuf]) -> Result<Vec<(String, Vec<f64>)>> {
    if models.is_empty() {
        bail!("importance needs at least one model path");
    }
    let mut tables = Vec::new();
    for path in models {
        let model = FittedModel::load(path).with_context(|| format!("loading {}", path.display()))?;
        let imp = model
            .importance()
            .with_context(|| format!("model {}", path.display()))?;
        tables.push((model_label(path), imp));
    }
    let d = tables[0].1.len();
    if let Some((label, _)) = tables.iter().find(|(_, v)| v.len() != d) {
        bail!("model {label} has a different feature count than {}", tables[0].0);
    }
    let names = feature_names(d);

    let mut out = ArtifactWriter::new(&config.out)?;
    for (label, imp) in &tables {
        let mut text = String::from("feature,importance,rank\n");
        for (rank, &f) in ranking(imp).iter().enumerate() {
            writeln!(text, "{},{},{}", names[f], imp[f], rank + 1).expect("write to string");
        }
        out.write_bytes(&format!("importance_{label}.csv"), text.as_bytes())?;
    }
    let mut text = String::from("feature");
    for (label, _) in &tables {
        write!(text, ",{label}").expect("write to string");
    }
    text.push('\n');
    for (f, name) in names.iter().enumerate() {
        text.push_str(name);
        for (_, imp) in &tables {
            write!(text, ",{}", imp[f]).expect("write to string");
        }
        text.push('\n');
    }
    out.write_bytes("importance_comparison.csv", text.as_bytes())?;
    let config_toml = config.to_toml_string();
    out.finish("importance", config.seed, &config_toml, None)?;
    Ok(tables)
}

/// Rebuilds the summary tables from a `results.jsonl`.
pub fn report(config: &RunConfig, results: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(results).with_context(|| format!("reading {}", results.display()))?;
    let rows = read_results_jsonl(&text)?;
    let mut out = ArtifactWriter::new(&config.out)?;
    write_tables(&mut out, &rows)?;
    let config_toml = config.to_toml_string();
    out.finish("report", config.seed, &config_toml, Some(sha256_hex(text.as_bytes())))?;
    Ok(rows.len())
}
