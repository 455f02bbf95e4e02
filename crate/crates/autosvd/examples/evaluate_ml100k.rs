//! Full reproduction run on the MovieLens-100K dataset: load ratings and
//! item content, then evaluate all four variants with a 90/10 random
//! split, averaged over five repetitions.
//!
//! ```sh
//! cargo run --release --example evaluate_ml100k -- /path/to/ml-100k
//! ```
//!
//! The directory must contain the stock `u.data` (tab-separated ratings)
//! and `u.item` (pipe-separated item metadata) files.

use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

use autosvd::cae::CaeTrainConfig;
use autosvd::dataset::{load_item_content, load_ratings, ContentFormat, RatingFormat, SplitSpec};
use autosvd::eval::{run_experiment, ExperimentSpec};
use autosvd::factor::{TrainConfig, Trainer, Variant};

fn run(dir: PathBuf) -> Result<(), Box<dyn Error>> {
    let ds = load_ratings(&dir.join("u.data"), RatingFormat::Ml100kTab)?;
    let content = load_item_content(&dir.join("u.item"), ContentFormat::Ml100kItem, &ds.item_ids)?;
    println!(
        "loaded {} ratings, {} users, {} items, {} content features\n",
        ds.n_ratings(),
        ds.n_users,
        ds.n_items,
        content.dim
    );

    let variants = [
        (Variant::BiasedSvd, Trainer::Naive),
        (Variant::SvdPp, Trainer::Efficient),
        (Variant::AutoSvd, Trainer::Naive),
        (Variant::AutoSvdPp, Trainer::Efficient),
    ];

    println!(
        "{:<22} {:>10} {:>10} {:>12}",
        "method", "rmse", "std", "sec/epoch"
    );
    for (variant, trainer) in variants {
        let mut spec = ExperimentSpec::new("ml-100k", variant);
        spec.trainer = trainer;
        spec.split = SplitSpec {
            train_fraction: 0.9,
            seed: 42,
            ..SplitSpec::default()
        };
        spec.cfg = TrainConfig {
            epochs: 30,
            ..TrainConfig::for_variant(variant)
        };
        spec.cae_cfg = CaeTrainConfig::default();
        spec.repetitions = 5;

        let result = run_experiment(&ds, Some(&content), &spec)?;
        println!(
            "{:<22} {:>10.4} {:>10.4} {:>12.3}",
            result.method_label(),
            result.mean_rmse,
            result.std_rmse,
            result.mean_epoch_seconds()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let Some(dir) = std::env::args().nth(1) else {
        eprintln!(
            "usage: evaluate_ml100k <path-to-ml-100k-directory>\n\
             \n\
             This example needs the MovieLens-100K dataset, which is not\n\
             bundled with the crate. Download and unpack it, then pass the\n\
             directory that contains u.data and u.item."
        );
        return ExitCode::from(1);
    };
    match run(PathBuf::from(dir)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
