//! Train, evaluate and compare two methods on a synthetic twin dataset, the same
//! way the `kgalign` binary does.
//!
//! ```text
//! cargo run --release --example experiment_pipeline [-- <work dir>]
//! ```

use std::path::PathBuf;

use kgalign::experiment::{
    cmd_analyze, cmd_eval, cmd_train, EvalInputs, ExperimentConfig, MethodName, COMPARISON_CSV, REPORT_JSON,
};
use kgalign::optim::OptimizerConfig;
use kgalign::synthetic::{isomorphic_twin, TwinConfig};

fn main() -> kgalign::Result<()> {
    env_logger::init();
    let work = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("kgalign-pipeline"));
    let data = isomorphic_twin(&TwinConfig::default()).write(work.join("twin"))?;

    let mut reports = Vec::new();
    for method in [MethodName::MTransE, MethodName::GcnAlign] {
        let mut config = ExperimentConfig {
            method,
            seed: 1,
            output_dir: work.join("runs"),
            ..ExperimentConfig::default()
        };
        config.data.dir = data.clone();
        config.trans.optimizer = OptimizerConfig::sgd(0.1);

        let run = cmd_train(&config, Some(&work.join("runs").join(method.name())))?;
        println!(
            "{method}: snapshot from epoch {} of {}, validation Hits@1 {:?}",
            run.best_epoch, run.epochs_run, run.best_valid_hits_at_1
        );
        let eval_dir = run.run_dir.join("eval");
        let bundle = cmd_eval(&EvalInputs::from_run(&run.run_dir)?, &config.matcher, &eval_dir)?;
        for (variant, r) in &bundle.reports {
            println!("  {variant:>4}: Hits@1 {:6.2}  MRR {:.3}  h-score {:.3}", r.hits_at[&1], r.mrr, r.h_score);
        }
        reports.push(eval_dir.join(REPORT_JSON));
    }

    let analysis = work.join("analysis");
    let table = cmd_analyze(&reports, &analysis)?;
    println!("{} rows in {}", table.rows.len(), analysis.join(COMPARISON_CSV).display());
    Ok(())
}
