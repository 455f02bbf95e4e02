//! Relative epoch cost of every variant and trainer on one dataset:
//! initialize each model identically, run one warm-up epoch, time the
//! next, and report ratios against the plain baseline.
//!
//! ```sh
//! cargo run --release --example benchmark_epoch
//! ```

use std::error::Error;

use autosvd::cae::FeatureMatrix;
use autosvd::dataset::RatingsDataset;
use autosvd::eval::benchmark_epoch;
use autosvd::factor::{Trainer, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_ratings(n_users: usize, n_items: usize, seed: u64) -> RatingsDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            if rng.gen_bool(0.5) {
                rows.push((
                    format!("u{u}"),
                    format!("i{i}"),
                    (1 + (u + 2 * i) % 5) as f64,
                    0,
                ));
            }
        }
    }
    RatingsDataset::from_triples(rows)
}

fn main() -> Result<(), Box<dyn Error>> {
    // ~50 ratings per user: the implicit-feedback work is what separates
    // the naive trainer from the batched one.
    let ds = dense_ratings(300, 100, 21);
    println!(
        "dataset: {} users, {} items, {} ratings (~{:.0}/user)\n",
        ds.n_users,
        ds.n_items,
        ds.n_ratings(),
        ds.n_ratings() as f64 / ds.n_users as f64
    );

    let k = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let features = FeatureMatrix {
        n_items: ds.n_items,
        dim: k,
        data: (0..ds.n_items * k)
            .map(|_| rng.gen_range(0.05..0.95))
            .collect(),
    };

    let entries = [
        (Variant::BiasedSvd, Trainer::Naive),
        (Variant::AutoSvd, Trainer::Naive),
        (Variant::SvdPp, Trainer::Naive),
        (Variant::SvdPp, Trainer::Efficient),
        (Variant::AutoSvdPp, Trainer::Naive),
        (Variant::AutoSvdPp, Trainer::Efficient),
    ];
    let table = benchmark_epoch(&entries, &ds, Some(&features), k, 42)?;

    println!("{:<22} {:>12} {:>10}", "method", "seconds", "ratio");
    for e in &table {
        let ratio = e
            .ratio_vs_biased_svd
            .map(|r| format!("{r:.2}x"))
            .unwrap_or_else(|| "-".into());
        println!("{:<22} {:>12.6} {:>10}", e.name, e.seconds, ratio);
    }

    let naive = table.iter().find(|e| e.name == "autosvdpp:naive").unwrap();
    let batched = table
        .iter()
        .find(|e| e.name == "autosvdpp:efficient")
        .unwrap();
    println!(
        "\nbatched implicit training is {:.1}x faster than naive here;\n\
         the gap grows with the mean number of ratings per user",
        naive.seconds / batched.seconds
    );
    Ok(())
}
