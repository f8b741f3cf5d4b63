use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kgalign::error::{Error, Result};
use kgalign::experiment::{
    cmd_analyze, cmd_eval, cmd_sample, cmd_train, Candidates, CslsMode, EvalInputs, ExperimentConfig, MatcherConfig, MethodName,
    DATA_ROOT_ENV,
};
use kgalign::matcher::SimMetric;

#[derive(Parser)]
#[command(name = "kgalign", version, about = "Entity alignment between knowledge graphs")]
struct Cli {
    /// worker threads; 1 runs every step on the calling thread
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// experiment config (TOML); defaults apply when omitted
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// mtranse, iptranse, bootea or gcnalign
    #[arg(long)]
    method: Option<String>,
    /// dataset directory, relative paths resolved against the data root
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, env = DATA_ROOT_ENV, hide_env_values = true)]
    data_root: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(m) = &self.method {
            c.method = m.parse::<MethodName>()?;
        }
        if let Some(d) = &self.data {
            c.data.dir = d.clone();
        }
        Ok(c)
    }
}

#[derive(Args)]
struct MatcherArgs {
    /// cosine, neg_l1 or neg_l2; defaults to the metric stored with the embeddings
    #[arg(long)]
    metric: Option<String>,
    /// off, on or auto (both)
    #[arg(long)]
    csls: Option<String>,
    #[arg(long)]
    csls_k: Option<usize>,
    #[arg(long)]
    injective: bool,
    /// rank against the test targets (test) or every KG2 entity (all)
    #[arg(long)]
    candidates: Option<String>,
}

impl MatcherArgs {
    fn apply(&self, mut m: MatcherConfig) -> Result<MatcherConfig> {
        if let Some(s) = &self.metric {
            m.metric = Some(s.parse::<SimMetric>()?);
        }
        if let Some(s) = &self.csls {
            m.csls = s.parse::<CslsMode>()?;
        }
        if let Some(k) = self.csls_k {
            m.csls_k = k;
        }
        m.injective |= self.injective;
        if let Some(s) = &self.candidates {
            m.candidates = s.parse::<Candidates>()?;
        }
        Ok(m)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train an aligner and write embeddings, metadata and the epoch log
    Train {
        #[command(flatten)]
        config: ConfigArgs,
        /// parent of the timestamped run directory
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// exact run directory instead of a timestamped one
        #[arg(long)]
        run_dir: Option<PathBuf>,
    },
    /// Score test links with stored embeddings
    Eval {
        /// training run directory; supplies embeddings, dataset and test links
        #[arg(long, required_unless_present_all = ["embeddings", "dataset", "test_links"])]
        run: Option<PathBuf>,
        #[arg(long, conflicts_with = "run")]
        embeddings: Option<PathBuf>,
        #[arg(long, conflicts_with = "run")]
        dataset: Option<PathBuf>,
        #[arg(long, conflicts_with = "run")]
        test_links: Option<PathBuf>,
        /// config whose [matcher] section supplies defaults
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[command(flatten)]
        matcher: MatcherArgs,
        /// report directory; defaults to <run>/eval
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a low-name-bias dataset
    Sample {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge evaluation reports into comparison tables
    Analyze {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    match cli.command {
        Command::Train {
            config,
            output_dir,
            run_dir,
        } => {
            if let Some(root) = &config.data_root {
                std::env::set_var(DATA_ROOT_ENV, root);
            }
            let mut c = config.load()?;
            if let Some(d) = output_dir {
                c.output_dir = d;
            }
            let s = cmd_train(&c, run_dir.as_deref())?;
            let valid = s.best_valid_hits_at_1.map(|v| format!("{v:.2}")).unwrap_or_else(|| "n/a".into());
            println!(
                "{}: best epoch {} of {}, validation Hits@1 {valid}",
                s.method, s.best_epoch, s.epochs_run
            );
            println!("run directory: {}", s.run_dir.display());
        }
        Command::Eval {
            run,
            embeddings,
            dataset,
            test_links,
            config,
            matcher,
            out,
        } => {
            let inputs = match run {
                Some(r) => EvalInputs::from_run(r)?,
                None => EvalInputs {
                    embeddings_dir: embeddings.expect("required by clap"),
                    dataset_dir: dataset.expect("required by clap"),
                    test_links: test_links.expect("required by clap"),
                },
            };
            let base = match config {
                Some(p) => ExperimentConfig::load(p)?.matcher,
                None => MatcherConfig::default(),
            };
            let m = matcher.apply(base)?;
            let out = out.unwrap_or_else(|| inputs.embeddings_dir.join("eval"));
            let bundle = cmd_eval(&inputs, &m, &out)?;
            for (variant, r) in &bundle.reports {
                let h = |k| r.hits_at.get(&k).copied().unwrap_or(f64::NAN);
                println!(
                    "{} [{variant}] Hits@1 {:.2} Hits@5 {:.2} Hits@10 {:.2} MRR {:.4} h-score {:.4}",
                    bundle.method,
                    h(1),
                    h(5),
                    h(10),
                    r.mrr,
                    r.h_score
                );
            }
            println!("reports written to {}", out.display());
        }
        Command::Sample { config, out } => {
            if let Some(root) = &config.data_root {
                std::env::set_var(DATA_ROOT_ENV, root);
            }
            let p = cmd_sample(&config.load()?, &out)?;
            println!(
                "retained {} of {} pairs; mean name similarity {:.4} -> {:.4}; degree L1 {:.4} / {:.4}",
                p.retained_pairs,
                p.source_pairs,
                p.mean_similarity_before,
                p.mean_similarity_after,
                p.degree_l1_kg1,
                p.degree_l1_kg2
            );
            println!("dataset written to {}", out.display());
        }
        Command::Analyze { reports, out } => {
            let c = cmd_analyze(&reports, &out)?;
            println!("{} rows x {} metrics written to {}", c.rows.len(), c.columns.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
