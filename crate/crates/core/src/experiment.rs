//! Config-driven experiment runs: train, eval, sample and analyze.
//!
//! Every command reads one [`ExperimentConfig`] (TOML, unknown keys rejected) and
//! writes its artifacts under a single directory. Relative dataset paths resolve
//! against `$KGALIGN_DATA_ROOT` when it is set.
//!
//! Artifacts of a training run:
//!
//! ```text
//! run-<unix>-seed<seed>/
//!   config.toml          effective config; rerunning from it reproduces the run
//!   train_links.tsv      the seed split, as entity-name pairs
//!   valid_links.tsv
//!   test_links.tsv
//!   kg1_embeddings.tsv   name<TAB>v1 v2 ...
//!   kg2_embeddings.tsv
//!   embeddings.json      method, dim, snapshot epoch, seed, metric
//!   training_log.csv     one row per epoch
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{ExportedEmbeddings, VectorTable};
use crate::gcn::{train_gcnalign, GcnConfig, GcnModel};
use crate::kg::{load_links, split_seeds, write_links, Dataset, EntityId, KnowledgeGraph, SeedAlignment, SplitRatios};
use crate::lnb::{sample_dataset, BinProvenance, SamplerConfig};
use crate::matcher::{
    csls_rescale, evaluate, similarity_matrix, write_bucket_tsv, EvalReport, EvalSettings, SimMetric,
    REPORT_SCHEMA_VERSION,
};
use crate::trans::{train, Method, TrainConfig, TrainedModel};

pub const DATA_ROOT_ENV: &str = "KGALIGN_DATA_ROOT";
pub const CONFIG_FILE: &str = "config.toml";
pub const TRAINING_LOG: &str = "training_log.csv";
pub const TRAIN_LINKS: &str = "train_links.tsv";
pub const VALID_LINKS: &str = "valid_links.tsv";
pub const TEST_LINKS: &str = "test_links.tsv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const PROVENANCE_JSON: &str = "provenance.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    #[default]
    MTransE,
    IPTransE,
    BootEA,
    GcnAlign,
}

impl MethodName {
    pub fn name(self) -> &'static str {
        match self {
            MethodName::MTransE => "mtranse",
            MethodName::IPTransE => "iptranse",
            MethodName::BootEA => "bootea",
            MethodName::GcnAlign => "gcnalign",
        }
    }

    /// The translation method, or `None` for the graph-convolution aligner.
    pub fn translation(self) -> Option<Method> {
        match self {
            MethodName::MTransE => Some(Method::MTransE),
            MethodName::IPTransE => Some(Method::IPTransE),
            MethodName::BootEA => Some(Method::BootEA),
            MethodName::GcnAlign => None,
        }
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mtranse" => Ok(MethodName::MTransE),
            "iptranse" => Ok(MethodName::IPTransE),
            "bootea" => Ok(MethodName::BootEA),
            "gcnalign" => Ok(MethodName::GcnAlign),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected mtranse, iptranse, bootea or gcnalign)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// dataset directory with rel_triples_1/2, attr_triples_1/2 and ent_links
    pub dir: PathBuf,
    pub split: SplitRatios,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            dir: PathBuf::new(),
            split: SplitRatios::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CslsMode {
    Off,
    On,
    /// report both the plain and the CSLS variant
    #[default]
    Auto,
}

impl FromStr for CslsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(CslsMode::Off),
            "on" => Ok(CslsMode::On),
            "auto" => Ok(CslsMode::Auto),
            other => Err(Error::Config(format!("unknown csls mode {other:?} (expected off, on or auto)"))),
        }
    }
}

/// Target entities each test source is ranked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Candidates {
    /// the targets of the test links
    #[default]
    Test,
    /// every KG2 entity
    All,
}

impl FromStr for Candidates {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test" => Ok(Candidates::Test),
            "all" => Ok(Candidates::All),
            other => Err(Error::Config(format!("unknown candidate set {other:?} (expected test or all)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherConfig {
    /// similarity to score with; defaults to the one recorded with the embeddings
    pub metric: Option<SimMetric>,
    pub csls: CslsMode,
    pub csls_k: usize,
    pub injective: bool,
    pub candidates: Candidates,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            metric: None,
            csls: CslsMode::Auto,
            csls_k: 10,
            injective: false,
            candidates: Candidates::Test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    /// name vectors of KG1 and KG2 entities
    pub names1: PathBuf,
    pub names2: PathBuf,
    pub num_bins: usize,
    pub target_pair_count: usize,
    pub drop_scale: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        let s = SamplerConfig::default();
        SampleConfig {
            names1: PathBuf::new(),
            names2: PathBuf::new(),
            num_bins: s.num_bins,
            target_pair_count: s.target_pair_count,
            drop_scale: s.drop_scale,
        }
    }
}

/// One experiment. `seed` drives the split and training; the `rng_seed` fields
/// of the nested sections are overwritten with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: MethodName,
    pub seed: u64,
    /// parent of timestamped run directories
    pub output_dir: PathBuf,
    pub data: DataConfig,
    pub trans: TrainConfig,
    pub gcn: GcnConfig,
    pub matcher: MatcherConfig,
    pub sample: SampleConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: MethodName::default(),
            seed: 0,
            output_dir: PathBuf::from("runs"),
            data: DataConfig::default(),
            trans: TrainConfig::default(),
            gcn: GcnConfig::default(),
            matcher: MatcherConfig::default(),
            sample: SampleConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.effective()).map_err(|e| Error::Config(e.to_string()))
    }

    /// The config with the top-level seed copied into every section.
    pub fn effective(&self) -> Self {
        let mut c = self.clone();
        c.trans.rng_seed = c.seed;
        c.gcn.rng_seed = c.seed;
        c
    }

    /// Checks the sections the chosen method uses.
    pub fn validate(&self) -> Result<()> {
        self.data.split.validate()?;
        match self.method.translation() {
            Some(_) => self.trans.validate()?,
            None => self.gcn.validate()?,
        }
        if self.matcher.csls_k == 0 {
            return Err(Error::Config("matcher.csls_k must be positive".into()));
        }
        Ok(())
    }

    /// `data.dir`, resolved against `$KGALIGN_DATA_ROOT` when relative.
    pub fn data_dir(&self) -> Result<PathBuf> {
        resolve_data_path(&self.data.dir, "data.dir")
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        SamplerConfig {
            num_bins: self.sample.num_bins,
            target_pair_count: self.sample.target_pair_count,
            drop_scale: self.sample.drop_scale,
            rng_seed: self.seed,
        }
    }
}

fn resolve_data_path(p: &Path, key: &str) -> Result<PathBuf> {
    if p.as_os_str().is_empty() {
        return Err(Error::Config(format!("{key} is not set")));
    }
    if p.is_relative() {
        if let Some(root) = std::env::var_os(DATA_ROOT_ENV) {
            return Ok(PathBuf::from(root).join(p));
        }
    }
    Ok(p.to_path_buf())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// What a training run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub run_dir: PathBuf,
    pub method: MethodName,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub best_valid_hits_at_1: Option<f64>,
}

enum Trained {
    Translation(TrainedModel),
    Gcn(GcnModel),
}

fn write_training_log(path: &Path, model: &Trained) -> Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_path(path)?;
    match model {
        Trained::Translation(m) => {
            w.write_record(["epoch", "loss", "valid_hits_at_1", "bootstrapped"])?;
            for r in &m.history {
                w.write_record([
                    r.epoch.to_string(),
                    r.loss.to_string(),
                    opt(r.valid_hits_at_1),
                    r.bootstrapped.to_string(),
                ])?;
            }
        }
        Trained::Gcn(m) => {
            w.write_record(["epoch", "structure_loss", "attribute_loss", "valid_hits_at_1"])?;
            for r in &m.history {
                w.write_record([
                    r.epoch.to_string(),
                    r.structure_loss.to_string(),
                    opt(r.attribute_loss),
                    opt(r.valid_hits_at_1),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_split(dir: &Path, seeds: &SeedAlignment, kg1: &KnowledgeGraph, kg2: &KnowledgeGraph) -> Result<()> {
    write_links(&seeds.train(), kg1, kg2, dir.join(TRAIN_LINKS))?;
    write_links(&seeds.valid(), kg1, kg2, dir.join(VALID_LINKS))?;
    write_links(&seeds.test(), kg1, kg2, dir.join(TEST_LINKS))
}

/// Trains the configured method and writes its artifacts to `run_dir`, or to
/// `output_dir/run-<unix>-seed<seed>` when none is given.
pub fn cmd_train(config: &ExperimentConfig, run_dir: Option<&Path>) -> Result<TrainSummary> {
    let mut config = config.effective();
    config.validate()?;
    let data_dir = config.data_dir()?;
    let dataset = Dataset::load(&data_dir)?;
    let seeds = split_seeds(&dataset.links, config.data.split, config.seed)?;
    let run_dir = match run_dir {
        Some(d) => d.to_path_buf(),
        None => config.output_dir.join(format!("run-{}-seed{}", unix_now(), config.seed)),
    };
    create_dir(&run_dir)?;
    config.data.dir = data_dir;
    write_text(&run_dir.join(CONFIG_FILE), &config.to_toml()?)?;
    write_split(&run_dir, &seeds, &dataset.kg1, &dataset.kg2)?;

    let (kg1, kg2) = (&dataset.kg1, &dataset.kg2);
    let model = match config.method.translation() {
        Some(method) => Trained::Translation(train(kg1, kg2, &seeds, method, &config.trans)?),
        None => Trained::Gcn(train_gcnalign(kg1, kg2, &seeds, &config.gcn)?),
    };
    let exported = match &model {
        Trained::Translation(m) => ExportedEmbeddings::from_translation(m, kg1, kg2, config.seed)?,
        Trained::Gcn(m) => ExportedEmbeddings::from_gcn(m, kg1, kg2, config.seed)?,
    };
    exported.write(&run_dir)?;
    write_training_log(&run_dir.join(TRAINING_LOG), &model)?;
    log::info!("wrote run artifacts to {}", run_dir.display());
    Ok(TrainSummary {
        run_dir,
        method: config.method,
        best_epoch: exported.meta.epoch,
        epochs_run: exported.meta.epochs_run,
        best_valid_hits_at_1: exported.meta.best_valid_hits_at_1,
    })
}

/// Where `cmd_eval` reads from.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalInputs {
    /// directory holding the two embedding tables and their sidecar
    pub embeddings_dir: PathBuf,
    pub dataset_dir: PathBuf,
    pub test_links: PathBuf,
}

impl EvalInputs {
    /// The artifacts of a training run, with the dataset its config names.
    pub fn from_run(run_dir: impl AsRef<Path>) -> Result<Self> {
        let run_dir = run_dir.as_ref();
        let path = run_dir.join(CONFIG_FILE);
        std::fs::metadata(&path).map_err(|e| Error::io(&path, e))?;
        let config = ExperimentConfig::load(path)?;
        Ok(EvalInputs {
            embeddings_dir: run_dir.to_path_buf(),
            dataset_dir: config.data_dir()?,
            test_links: run_dir.join(TEST_LINKS),
        })
    }
}

/// Reports of one evaluation, keyed by variant (`nn`, `csls`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalBundle {
    pub schema_version: u32,
    pub method: String,
    pub reports: BTreeMap<String, EvalReport>,
}

impl EvalBundle {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let bundle: EvalBundle = serde_json::from_str(&text)?;
        let versions = std::iter::once(bundle.schema_version).chain(bundle.reports.values().map(|r| r.schema_version));
        if let Some(v) = versions.into_iter().find(|&v| v != REPORT_SCHEMA_VERSION) {
            return Err(Error::InvalidData(format!(
                "{}: report schema version {v}, expected {REPORT_SCHEMA_VERSION}",
                path.display()
            )));
        }
        Ok(bundle)
    }
}

/// Scores the test links with the stored embeddings and writes `report.json`,
/// `report.csv` and per-variant bucket TSVs to `out_dir`.
pub fn cmd_eval(inputs: &EvalInputs, matcher: &MatcherConfig, out_dir: &Path) -> Result<EvalBundle> {
    if matcher.csls_k == 0 {
        return Err(Error::Config("matcher.csls_k must be positive".into()));
    }
    let emb = ExportedEmbeddings::load(&inputs.embeddings_dir)?;
    let dataset = Dataset::load(&inputs.dataset_dir)?;
    let links = load_links(&inputs.test_links, &dataset.kg1, &dataset.kg2)?;
    if links.is_empty() {
        return Err(Error::Evaluation("no test links to evaluate".into()));
    }
    let mut left = Vec::with_capacity(links.len());
    let mut d1 = Vec::with_capacity(links.len());
    for &(a, _) in &links {
        left.push(dataset.kg1.entity_name(a)?);
        d1.push(dataset.kg1.degree(a)?);
    }
    let (right_ids, gold): (Vec<EntityId>, Vec<(usize, usize)>) = match matcher.candidates {
        Candidates::Test => (links.iter().map(|p| p.1).collect(), (0..links.len()).map(|i| (i, i)).collect()),
        Candidates::All => (
            (0..dataset.kg2.entity_count() as u32).map(EntityId).collect(),
            links.iter().enumerate().map(|(i, p)| (i, p.1.index())).collect(),
        ),
    };
    let right = right_ids
        .iter()
        .map(|&b| dataset.kg2.entity_name(b))
        .collect::<Result<Vec<_>>>()?;
    let d2 = right_ids
        .iter()
        .map(|&b| dataset.kg2.degree(b))
        .collect::<Result<Vec<_>>>()?;
    let missing: Vec<String> = left
        .iter()
        .filter(|n| emb.kg1.get(n).is_none())
        .chain(right.iter().filter(|n| emb.kg2.get(n).is_none()))
        .map(|n| n.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Evaluation(format!(
            "{} test entities have no embedding: {}",
            missing.len(),
            missing.join(", ")
        )));
    }
    let metric = matcher.metric.unwrap_or(emb.meta.metric);
    let sim = similarity_matrix(emb.kg1.matrix(&left)?.view(), emb.kg2.matrix(&right)?.view(), metric)?;
    let settings = EvalSettings {
        injective: matcher.injective,
        ..EvalSettings::default()
    };

    let mut variants = Vec::new();
    if matcher.csls != CslsMode::On {
        variants.push(("nn", sim.clone()));
    }
    if matcher.csls != CslsMode::Off {
        variants.push(("csls", csls_rescale(&sim, matcher.csls_k)?));
    }
    let mut reports = BTreeMap::new();
    for (variant, s) in variants {
        let mut r = evaluate(&s, &gold, &d1, &d2, &settings)?;
        r.method = emb.meta.method.clone();
        r.variant = variant.to_owned();
        reports.insert(variant.to_owned(), r);
    }
    let bundle = EvalBundle {
        schema_version: REPORT_SCHEMA_VERSION,
        method: emb.meta.method.clone(),
        reports,
    };

    create_dir(out_dir)?;
    write_json(&out_dir.join(REPORT_JSON), &bundle)?;
    let csv_path = out_dir.join(REPORT_CSV);
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["method", "variant", "metric", "value"])?;
    for (variant, r) in &bundle.reports {
        w.write_record([&bundle.method, variant, "test_size", &r.test_size.to_string()])?;
        for (k, v) in r.flat_metrics() {
            w.write_record([&bundle.method, variant, &k, &v.to_string()])?;
        }
        write_bucket_tsv(&r.degree_buckets, &out_dir.join(format!("degree_buckets_{variant}.tsv")))?;
        write_bucket_tsv(&r.degree_diff_buckets, &out_dir.join(format!("degree_diff_{variant}.tsv")))?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    Ok(bundle)
}

/// Provenance of a sampled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleProvenance {
    pub source: PathBuf,
    pub config: SamplerConfig,
    pub source_pairs: usize,
    pub retained_pairs: usize,
    pub mean_similarity_before: f64,
    pub mean_similarity_after: f64,
    pub degree_l1_kg1: f64,
    pub degree_l1_kg2: f64,
    pub bins: Vec<BinProvenance>,
}

/// Samples a low-name-bias dataset into `out_dir` and writes `provenance.json`.
pub fn cmd_sample(config: &ExperimentConfig, out_dir: &Path) -> Result<SampleProvenance> {
    let source = config.data_dir()?;
    let names1 = resolve_data_path(&config.sample.names1, "sample.names1")?;
    let names2 = resolve_data_path(&config.sample.names2, "sample.names2")?;
    let sampler = config.sampler_config();
    let dataset = Dataset::load(&source)?;
    sampler.validate(dataset.links.len())?;
    let sampled = sample_dataset(&dataset, &VectorTable::load(names1)?, &VectorTable::load(names2)?, &sampler)?;
    sampled.dataset.write(out_dir)?;
    let provenance = SampleProvenance {
        source,
        config: sampler,
        source_pairs: dataset.links.len(),
        retained_pairs: sampled.dataset.links.len(),
        mean_similarity_before: sampled.outcome.mean_similarity_before,
        mean_similarity_after: sampled.outcome.mean_similarity_after,
        degree_l1_kg1: sampled.degree_l1_kg1,
        degree_l1_kg2: sampled.degree_l1_kg2,
        bins: sampled.outcome.bins,
    };
    write_json(&out_dir.join(PROVENANCE_JSON), &provenance)?;
    Ok(provenance)
}

pub const COMPARISON_CSV: &str = "comparison.csv";
pub const HUBNESS_TSV: &str = "hubness.tsv";
pub const CSLS_TSV: &str = "csls.tsv";
pub const DEGREE_TSV: &str = "degree.tsv";
pub const DEGREE_DIFF_TSV: &str = "degree_diff.tsv";

/// One row of the comparison table: a report variant and its flat metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub source: String,
    pub method: String,
    pub variant: String,
    pub metrics: BTreeMap<String, f64>,
}

/// Merged view of several evaluation bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub columns: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn from_bundles(bundles: &[(String, EvalBundle)]) -> Self {
        let rows: Vec<ComparisonRow> = bundles
            .iter()
            .flat_map(|(source, b)| {
                b.reports.iter().map(move |(variant, r)| {
                    let mut metrics = r.flat_metrics();
                    metrics.insert("test_size".into(), r.test_size as f64);
                    ComparisonRow {
                        source: source.clone(),
                        method: b.method.clone(),
                        variant: variant.clone(),
                        metrics,
                    }
                })
            })
            .collect();
        let columns: BTreeSet<String> = rows.iter().flat_map(|r| r.metrics.keys().cloned()).collect();
        Comparison {
            columns: columns.into_iter().collect(),
            rows,
        }
    }

    /// Methods x metrics; a metric a row lacks is written as `null`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let header = ["source", "method", "variant"]
            .into_iter()
            .map(str::to_owned)
            .chain(self.columns.iter().cloned());
        w.write_record(header)?;
        for r in &self.rows {
            let cells = [r.source.clone(), r.method.clone(), r.variant.clone()].into_iter().chain(
                self.columns
                    .iter()
                    .map(|c| r.metrics.get(c).map(|v| v.to_string()).unwrap_or_else(|| "null".into())),
            );
            w.write_record(cells)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn tsv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = header.join("\t") + "\n";
    for r in rows {
        out.push_str(&r.join("\t"));
        out.push('\n');
    }
    write_text(path, &out)
}

/// Merges evaluation bundles into `comparison.csv` plus plot-ready TSVs: Hits@1
/// against h-score, Hits@1 with and without CSLS, and Hits@1 per degree and per
/// degree-difference bucket.
pub fn cmd_analyze(report_paths: &[PathBuf], out_dir: &Path) -> Result<Comparison> {
    if report_paths.is_empty() {
        return Err(Error::Config("analyze needs at least one report".into()));
    }
    let bundles = report_paths
        .iter()
        .map(|p| Ok((p.display().to_string(), EvalBundle::load(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let comparison = Comparison::from_bundles(&bundles);
    create_dir(out_dir)?;
    comparison.write_csv(&out_dir.join(COMPARISON_CSV))?;

    let na = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
    let reports = || bundles.iter().flat_map(|(_, b)| b.reports.values());
    tsv(
        &out_dir.join(HUBNESS_TSV),
        &["method", "variant", "hits_at_1", "h_score"],
        reports().map(|r| {
            vec![
                r.method.clone(),
                r.variant.clone(),
                na(r.hits_at.get(&1).copied()),
                r.h_score.to_string(),
            ]
        }),
    )?;
    tsv(
        &out_dir.join(CSLS_TSV),
        &["method", "hits_at_1_nn", "hits_at_1_csls"],
        bundles.iter().map(|(_, b)| {
            let h = |v: &str| na(b.reports.get(v).and_then(|r| r.hits_at.get(&1).copied()));
            vec![b.method.clone(), h("nn"), h("csls")]
        }),
    )?;
    for (file, pick) in [
        (DEGREE_TSV, (|r: &EvalReport| &r.degree_buckets) as fn(&EvalReport) -> &Vec<_>),
        (DEGREE_DIFF_TSV, |r: &EvalReport| &r.degree_diff_buckets),
    ] {
        tsv(
            &out_dir.join(file),
            &["method", "variant", "bucket", "lo", "hi", "hits_at_1", "support"],
            reports().flat_map(|r| {
                pick(r).iter().map(move |b| {
                    let bound = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
                    vec![
                        r.method.clone(),
                        r.variant.clone(),
                        b.label.clone(),
                        bound(b.lo),
                        bound(b.hi),
                        na(b.hits_at_1),
                        b.support.to_string(),
                    ]
                })
            }),
        )?;
    }
    Ok(comparison)
}
