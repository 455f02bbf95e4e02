//! From raw item content to auto-encoder features: parse a pipe-delimited
//! item file, train the contractive auto-encoder, and extract the
//! per-item representations the factor models consume.
//!
//! ```sh
//! cargo run --example content_features
//! ```

use std::error::Error;
use std::fs;

use autosvd::cae::{extract_features, train, CaeTrainConfig};
use autosvd::dataset::{load_item_content, ContentFormat, IdMap};

fn main() -> Result<(), Box<dyn Error>> {
    // Pipe-delimited content rows: id, title, release date, video date,
    // url, then one 0/1 flag per genre. The year becomes a min-max
    // normalized extra column.
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("u.item");
    fs::write(
        &path,
        "1|Metropolis (1927)|01-Jan-1927||http://x/1|0|0|1|0\n\
         2|Alien (1979)|01-Jan-1979||http://x/2|1|1|1|0\n\
         3|Amelie (2001)|01-Jan-2001||http://x/3|0|0|0|1\n\
         4|Gattaca (1997)|01-Jan-1997||http://x/4|0|1|1|0\n\
         5|Heat (1995)|01-Jan-1995||http://x/5|1|1|0|0\n",
    )?;

    // Content rows are aligned to the dense item ids of a ratings dataset;
    // here we fake a dataset that rated all five items.
    let mut item_ids = IdMap::default();
    for id in ["1", "2", "3", "4", "5"] {
        item_ids.insert_or_get(id);
    }

    let content = load_item_content(&path, ContentFormat::Ml100kItem, &item_ids)?;
    println!(
        "content matrix: {} items x {} features ({:?})",
        content.n_items, content.dim, content.feature_names
    );
    for i in 0..content.n_items {
        println!("  item {}: {:?}", item_ids.raw(i as u32), content.row(i));
    }

    // Train a small auto-encoder. The contractive penalty (the squared
    // Frobenius norm of the encoder Jacobian) pushes the representation to
    // be locally insensitive to input noise.
    let cfg = CaeTrainConfig {
        epochs: 200,
        ..CaeTrainConfig::default()
    };
    let (model, losses) = train(&content, 3, &cfg)?;
    println!(
        "auto-encoder: loss {:.4} (epoch 1) -> {:.4} (epoch {})",
        losses[0],
        losses[losses.len() - 1],
        losses.len()
    );

    let features = extract_features(&model, &content)?;
    println!(
        "features: {} items x {} dims, all in (0,1)",
        features.n_items, features.dim
    );
    for i in 0..features.n_items {
        let row: Vec<String> = features.row(i).iter().map(|v| format!("{v:.3}")).collect();
        println!("  item {} -> [{}]", item_ids.raw(i as u32), row.join(", "));
    }

    // The checksum pins features to the factor models trained on them.
    println!("feature checksum: {:016x}", features.checksum());

    // Contraction in action: the penalized encoder has a smaller mean
    // Jacobian norm than an unpenalized one trained identically.
    let unpenalized = CaeTrainConfig {
        jacobian_weight: 0.0,
        ..cfg
    };
    let (free_model, _) = train(&content, 3, &unpenalized)?;
    let mean_penalty = |m: &autosvd::cae::CaeModel| -> Result<f64, autosvd::Error> {
        let mut sum = 0.0;
        for i in 0..content.n_items {
            sum += m.jacobian_penalty(content.row(i))?;
        }
        Ok(sum / content.n_items as f64)
    };
    println!(
        "mean Jacobian norm^2: {:.5} penalized vs {:.5} unpenalized",
        mean_penalty(&model)?,
        mean_penalty(&free_model)?
    );
    Ok(())
}
