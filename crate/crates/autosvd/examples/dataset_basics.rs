//! Load a ratings file, inspect its statistics, and carve a seeded
//! train/test split.
//!
//! ```sh
//! cargo run --example dataset_basics
//! ```

use std::error::Error;
use std::fs;

use autosvd::dataset::{load_ratings, split, RatingFormat, SplitSpec};

fn main() -> Result<(), Box<dyn Error>> {
    // A tiny tab-separated ratings file: user, item, rating, timestamp.
    // Raw ids can be anything; they are re-indexed densely on load.
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("ratings.tsv");
    fs::write(
        &path,
        "alice\tdune\t5\t100\n\
         alice\tsolaris\t4\t101\n\
         bob\tdune\t3\t102\n\
         bob\tstalker\t5\t103\n\
         carol\tsolaris\t2\t104\n\
         carol\tdune\t4\t105\n\
         carol\tstalker\t4\t106\n\
         dave\tdune\t1\t107\n",
    )?;

    let ds = load_ratings(&path, RatingFormat::Ml100kTab)?;
    println!(
        "loaded: {} users, {} items, {} ratings, density {:.2}%",
        ds.n_users,
        ds.n_items,
        ds.n_ratings(),
        ds.density_percent()
    );
    println!("global mean rating: {:.4}", ds.global_mean);
    println!("rating scale: [{}, {}]", ds.rating_min, ds.rating_max);

    // Dense ids are assigned in first-appearance order and kept bijective
    // with the raw ids.
    for u in 0..ds.n_users as u32 {
        let items: Vec<&str> = ds.user_items[u as usize]
            .iter()
            .map(|&i| ds.item_ids.raw(i))
            .collect();
        println!("  user {:5} rated {:?}", ds.user_ids.raw(u), items);
    }

    // A split is pinned by (fraction, seed): rerunning reproduces it.
    let spec = SplitSpec::new(0.75, 42);
    let (train, test) = split(&ds, &spec)?;
    println!(
        "split {:.0}%/{:.0}%: {} train / {} test ratings",
        spec.train_fraction * 100.0,
        (1.0 - spec.train_fraction) * 100.0,
        train.n_ratings(),
        test.n_ratings()
    );
    let (train2, _) = split(&ds, &spec)?;
    assert_eq!(train.triples, train2.triples);
    println!("same seed, same split: verified");

    // Both halves share the dense index space of the parent dataset, so a
    // model trained on one half can score the other directly.
    assert_eq!(train.n_users, ds.n_users);
    assert_eq!(test.n_items, ds.n_items);
    Ok(())
}
