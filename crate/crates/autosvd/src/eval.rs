//! Evaluation: RMSE, repeated train/test experiments, epoch timing, and
//! machine-readable reports.
//!
//! [`run_experiment`] is the end-to-end path: split, (optionally) train the
//! auto-encoder and extract features, train the factor model, score the
//! held-out half. Every repetition derives its split / encoder / factor
//! seeds from the base seeds plus the repetition index, so a spec pins the
//! whole result set.

use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::cae::{self, CaeTrainConfig};
use crate::dataset::{split, ItemContentMatrix, RatingsDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::factor::{self, EpochStats, FactorModel, TrainConfig, Trainer, Variant};

/// Root mean squared error over (predicted, actual) pairs.
pub fn rmse(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Config(
            "rmse is undefined for an empty prediction set".into(),
        ));
    }
    let sq: f64 = pairs.iter().map(|(p, a)| (p - a) * (p - a)).sum();
    Ok((sq / pairs.len() as f64).sqrt())
}

/// One repeatable experiment: a variant, its configs, and the protocol.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Free-form dataset name echoed into reports.
    pub dataset_label: String,
    pub variant: Variant,
    pub trainer: Trainer,
    pub split: SplitSpec,
    pub cfg: TrainConfig,
    /// Auto-encoder schedule; only consulted for the content-anchored
    /// variants.
    pub cae_cfg: CaeTrainConfig,
    pub repetitions: usize,
    /// Clamp predictions to the training rating scale before scoring.
    pub clip_predictions: bool,
    /// Drop test pairs whose user or item never occurs in the training
    /// half instead of scoring them with the fallback prediction.
    pub filter_cold_start: bool,
}

impl ExperimentSpec {
    pub fn new(dataset_label: impl Into<String>, variant: Variant) -> Self {
        ExperimentSpec {
            dataset_label: dataset_label.into(),
            variant,
            trainer: if variant.uses_implicit() {
                Trainer::Efficient
            } else {
                Trainer::Naive
            },
            split: SplitSpec::default(),
            cfg: TrainConfig::for_variant(variant),
            cae_cfg: CaeTrainConfig::default(),
            repetitions: 1,
            clip_predictions: true,
            filter_cold_start: false,
        }
    }
}

/// The seeds one repetition actually used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepSeeds {
    pub split: u64,
    pub cae: u64,
    pub factor: u64,
}

/// Everything a finished experiment reports.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// The spec that produced this result.
    pub spec: ExperimentSpec,
    pub rep_rmse: Vec<f64>,
    pub mean_rmse: f64,
    /// Population standard deviation over the repetitions.
    pub std_rmse: f64,
    /// Per-repetition epoch traces from the factor trainer.
    pub traces: Vec<Vec<EpochStats>>,
    pub seeds: Vec<RepSeeds>,
}

impl ExperimentResult {
    /// Mean wall-clock seconds per training epoch across all repetitions.
    pub fn mean_epoch_seconds(&self) -> f64 {
        let mut n = 0usize;
        let mut sum = 0.0;
        for t in &self.traces {
            for e in t {
                sum += e.seconds;
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// `variant` or `variant:trainer` for the implicit-feedback models.
    pub fn method_label(&self) -> String {
        method_label(self.spec.variant, self.spec.trainer)
    }
}

fn method_label(variant: Variant, trainer: Trainer) -> String {
    if variant.uses_implicit() {
        format!("{}:{}", variant.name(), trainer.name())
    } else {
        variant.name().to_string()
    }
}

/// Score a model on the test half: clipped or raw predictions, cold-start
/// pairs either scored via the fallback or filtered out.
pub fn test_rmse(
    model: &FactorModel,
    train: &RatingsDataset,
    test: &RatingsDataset,
    clip: bool,
    filter_cold_start: bool,
) -> Result<f64> {
    let mut pairs = Vec::with_capacity(test.triples.len());
    for r in &test.triples {
        let (u, i) = (r.user as usize, r.item as usize);
        if filter_cold_start && !(train.user_seen(u) && train.item_seen(i)) {
            continue;
        }
        let p = if clip {
            model.predict_clipped(train, u, i)
        } else {
            model.predict(train, u, i)
        };
        pairs.push((p, r.value));
    }
    rmse(&pairs)
}

/// Run `spec.repetitions` independent split/train/score cycles.
/// `content` must be present exactly when the variant is content-anchored.
pub fn run_experiment(
    ds: &RatingsDataset,
    content: Option<&ItemContentMatrix>,
    spec: &ExperimentSpec,
) -> Result<ExperimentResult> {
    if spec.repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    if spec.variant.uses_content() && content.is_none() {
        return Err(Error::Config(format!(
            "variant '{}' needs an item-content matrix",
            spec.variant.name()
        )));
    }
    if !spec.variant.uses_content() && content.is_some() {
        return Err(Error::Config(format!(
            "variant '{}' does not take an item-content matrix",
            spec.variant.name()
        )));
    }

    let mut rep_rmse = Vec::with_capacity(spec.repetitions);
    let mut traces = Vec::with_capacity(spec.repetitions);
    let mut seeds = Vec::with_capacity(spec.repetitions);

    for rep in 0..spec.repetitions {
        let r = rep as u64;
        let rs = RepSeeds {
            split: spec.split.seed.wrapping_add(r),
            cae: spec.cae_cfg.batch_order_seed.wrapping_add(r),
            factor: spec.cfg.seed.wrapping_add(r),
        };

        let split_spec = SplitSpec {
            seed: rs.split,
            ..spec.split
        };
        let (train_half, test_half) = split(ds, &split_spec)?;

        let features = match content {
            Some(c) => {
                let cae_cfg = CaeTrainConfig {
                    batch_order_seed: rs.cae,
                    ..spec.cae_cfg.clone()
                };
                let (model, _) = cae::train(c, spec.cfg.k, &cae_cfg)
                    .map_err(|e| e.with_context(&format!("repetition {}", rep + 1)))?;
                Some(cae::extract_features(&model, c)?)
            }
            None => None,
        };

        let cfg = TrainConfig {
            seed: rs.factor,
            ..spec.cfg
        };
        let (model, trace) = factor::train(
            spec.variant,
            &train_half,
            &cfg,
            features.as_ref(),
            spec.trainer,
        )
        .map_err(|e| e.with_context(&format!("repetition {}", rep + 1)))?;

        let score = test_rmse(
            &model,
            &train_half,
            &test_half,
            spec.clip_predictions,
            spec.filter_cold_start,
        )?;
        rep_rmse.push(score);
        traces.push(trace);
        seeds.push(rs);
    }

    let mean_rmse = rep_rmse.iter().sum::<f64>() / rep_rmse.len() as f64;
    let var = rep_rmse
        .iter()
        .map(|x| (x - mean_rmse) * (x - mean_rmse))
        .sum::<f64>()
        / rep_rmse.len() as f64;

    Ok(ExperimentResult {
        spec: spec.clone(),
        rep_rmse,
        mean_rmse,
        std_rmse: var.sqrt(),
        traces,
        seeds,
    })
}

/// One row of a [`benchmark_epoch`] table.
#[derive(Debug, Clone)]
pub struct BenchEntry {
    pub name: String,
    pub seconds: f64,
    /// Epoch time divided by the `biased_svd` entry's, when present.
    pub ratio_vs_biased_svd: Option<f64>,
}

/// Time one training epoch per (variant, trainer) entry on identical data
/// and seed: initialize, run one untimed warm-up epoch, then time the next.
pub fn benchmark_epoch(
    entries: &[(Variant, Trainer)],
    train: &RatingsDataset,
    features: Option<&crate::cae::FeatureMatrix>,
    k: usize,
    seed: u64,
) -> Result<Vec<BenchEntry>> {
    let mut out = Vec::with_capacity(entries.len());
    for &(variant, trainer) in entries {
        let cfg = TrainConfig {
            k,
            seed,
            epochs: 0,
            ..TrainConfig::for_variant(variant)
        };
        let feats = if variant.uses_content() {
            if features.is_none() {
                return Err(Error::Config(format!(
                    "benchmark entry '{}' needs content features",
                    method_label(variant, trainer)
                )));
            }
            features
        } else {
            None
        };
        let (mut model, _) = factor::train(variant, train, &cfg, feats, trainer)?;

        let run = |m: &mut FactorModel, order_seed: u64| -> Result<f64> {
            match (variant.uses_implicit(), trainer) {
                (false, _) => factor::sgd_epoch(m, train, &cfg, order_seed),
                (true, Trainer::Naive) => {
                    factor::sgd_epoch_implicit_naive(m, train, &cfg, order_seed)
                }
                (true, Trainer::Efficient) => {
                    factor::sgd_epoch_implicit_efficient(m, train, &cfg, order_seed)
                }
            }
        };
        run(&mut model, seed.wrapping_add(1))?; // warm-up
        let t0 = Instant::now();
        run(&mut model, seed.wrapping_add(2))?;
        out.push(BenchEntry {
            name: method_label(variant, trainer),
            seconds: t0.elapsed().as_secs_f64(),
            ratio_vs_biased_svd: None,
        });
    }

    let base = out
        .iter()
        .find(|e| e.name == Variant::BiasedSvd.name())
        .map(|e| e.seconds);
    if let Some(base) = base {
        for e in out.iter_mut() {
            e.ratio_vs_biased_svd = Some(e.seconds / base);
        }
    }
    Ok(out)
}

/// Write the results table and the plot-ready columnar files into `dir`:
/// `results.tsv` (one row per experiment), `accuracy.dat` (method, mean
/// RMSE, std) and `timing.dat` (method, mean epoch seconds). Empty input
/// produces header-only files.
pub fn emit_report(results: &[ExperimentResult], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut table = String::from(
        "dataset\ttrain_fraction\tvariant\ttrainer\tmean_rmse\tstd_rmse\tmean_epoch_seconds\n",
    );
    let mut accuracy = String::from("method\tmean_rmse\tstd_rmse\n");
    let mut timing = String::from("method\tmean_epoch_seconds\n");
    for r in results {
        table.push_str(&format!(
            "{}\t{:.2}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
            r.spec.dataset_label,
            r.spec.split.train_fraction,
            r.spec.variant.name(),
            r.spec.trainer.name(),
            r.mean_rmse,
            r.std_rmse,
            r.mean_epoch_seconds(),
        ));
        accuracy.push_str(&format!(
            "{}\t{:.6}\t{:.6}\n",
            r.method_label(),
            r.mean_rmse,
            r.std_rmse
        ));
        timing.push_str(&format!(
            "{}\t{:.6}\n",
            r.method_label(),
            r.mean_epoch_seconds()
        ));
    }

    for (name, body) in [
        ("results.tsv", &table),
        ("accuracy.dat", &accuracy),
        ("timing.dat", &timing),
    ] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn synthetic_ratings(n_users: usize, n_items: usize, seed: u64) -> RatingsDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for u in 0..n_users {
            for i in 0..n_items {
                if rng.gen_bool(0.7) {
                    let r = 1.0 + ((u * 7 + i * 3) % 5) as f64 + rng.gen_range(-0.3..0.3);
                    rows.push((format!("u{u}"), format!("i{i}"), r.clamp(1.0, 5.0), 0));
                }
            }
        }
        RatingsDataset::from_triples(rows)
    }

    fn synthetic_content(n_items: usize, dim: usize, seed: u64) -> ItemContentMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![0.0; n_items * dim];
        for v in rows.iter_mut() {
            *v = if rng.gen_bool(0.4) { 1.0 } else { 0.0 };
        }
        ItemContentMatrix {
            dim,
            n_items,
            rows,
            feature_names: (0..dim).map(|i| format!("f{i}")).collect(),
            unparsed_years: 0,
        }
    }

    #[test]
    fn rmse_frozen_and_degenerate_cases() {
        // errors -1 and 2: mean square 2.5
        let v = rmse(&[(3.0, 4.0), (5.0, 3.0)]).unwrap();
        assert!((v - 1.5811388300841898).abs() < 1e-15);
        assert_eq!(rmse(&[(2.0, 2.0), (4.0, 4.0)]).unwrap(), 0.0);
        assert!(rmse(&[]).is_err());
    }

    #[test]
    fn single_repetition_is_plain_composition() {
        let ds = synthetic_ratings(12, 10, 1);
        let mut spec = ExperimentSpec::new("fixture", Variant::BiasedSvd);
        spec.split = SplitSpec::new(0.8, 5);
        spec.cfg.epochs = 4;
        spec.cfg.k = 3;
        let res = run_experiment(&ds, None, &spec).unwrap();
        assert_eq!(res.rep_rmse.len(), 1);
        assert_eq!(res.mean_rmse, res.rep_rmse[0]);
        assert_eq!(res.std_rmse, 0.0);

        // replay by hand with the same derived seeds
        let (train_half, test_half) = split(&ds, &SplitSpec::new(0.8, 5)).unwrap();
        let (model, _) = factor::train(
            Variant::BiasedSvd,
            &train_half,
            &spec.cfg,
            None,
            Trainer::Naive,
        )
        .unwrap();
        let expect = test_rmse(&model, &train_half, &test_half, true, false).unwrap();
        assert_eq!(res.rep_rmse[0], expect);
    }

    #[test]
    fn repetitions_average_and_are_deterministic() {
        let ds = synthetic_ratings(12, 10, 2);
        let content = synthetic_content(ds.n_items, 6, 3);
        let mut spec = ExperimentSpec::new("fixture", Variant::AutoSvdPp);
        spec.repetitions = 3;
        spec.cfg.epochs = 3;
        spec.cfg.k = 3;
        spec.cae_cfg.epochs = 3;
        let a = run_experiment(&ds, Some(&content), &spec).unwrap();
        assert_eq!(a.rep_rmse.len(), 3);
        let mean = a.rep_rmse.iter().sum::<f64>() / 3.0;
        assert!((a.mean_rmse - mean).abs() < 1e-15);
        assert_eq!(a.seeds.len(), 3);
        assert_eq!(a.seeds[1].split, spec.split.seed + 1);

        let b = run_experiment(&ds, Some(&content), &spec).unwrap();
        assert_eq!(a.rep_rmse, b.rep_rmse);
    }

    #[test]
    fn content_presence_must_match_variant() {
        let ds = synthetic_ratings(6, 5, 4);
        let content = synthetic_content(ds.n_items, 4, 5);
        let spec = ExperimentSpec::new("fixture", Variant::AutoSvd);
        assert!(run_experiment(&ds, None, &spec).is_err());
        let spec2 = ExperimentSpec::new("fixture", Variant::BiasedSvd);
        assert!(run_experiment(&ds, Some(&content), &spec2).is_err());
    }

    #[test]
    fn cold_start_filter_changes_the_scored_set() {
        let full = RatingsDataset::from_triples(vec![
            ("u0", "i0", 4.0, 0),
            ("u0", "i1", 3.0, 0),
            ("u1", "i0", 5.0, 0),
            ("u2", "i1", 2.0, 0),
        ]);
        // train: everything but u2's rating; test: u2's (cold user) plus
        // one pair whose user and item both occur in train
        let mut train = full.clone();
        train.triples.retain(|r| r.user != 2);
        train.user_items[2].clear();
        let mut test = full.clone();
        test.triples.retain(|r| r.user == 2);
        test.triples.push(crate::dataset::Rating {
            user: 0,
            item: 0,
            value: 4.0,
            timestamp: 0,
        });

        let mut m = FactorModel::zeroed(Variant::BiasedSvd, 3, 2, 2, 3.0);
        m.b_i[1] = 0.5;
        m.b_u[0] = 0.25;
        // cold pair falls back to mu + b_i = 3.5; the seen pair scores 3.25
        let unfiltered = test_rmse(&m, &train, &test, false, false).unwrap();
        let filtered = test_rmse(&m, &train, &test, false, true).unwrap();
        assert!((filtered - 0.75).abs() < 1e-15);
        assert!((unfiltered - ((1.5f64 * 1.5 + 0.75 * 0.75) / 2.0).sqrt()).abs() < 1e-15);
        assert_ne!(unfiltered, filtered);
    }

    #[test]
    fn benchmark_reports_ratios_against_the_baseline() {
        let ds = synthetic_ratings(15, 12, 6);
        let entries = [
            (Variant::BiasedSvd, Trainer::Naive),
            (Variant::SvdPp, Trainer::Naive),
            (Variant::SvdPp, Trainer::Efficient),
        ];
        let table = benchmark_epoch(&entries, &ds, None, 3, 11).unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table[0].name, "biased_svd");
        assert_eq!(table[1].name, "svdpp:naive");
        assert_eq!(table[2].name, "svdpp:efficient");
        for e in &table {
            assert!(e.seconds >= 0.0);
            let ratio = e.ratio_vs_biased_svd.unwrap();
            assert!(ratio > 0.0);
        }
        assert!((table[0].ratio_vs_biased_svd.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn benchmark_without_baseline_has_no_ratios() {
        let ds = synthetic_ratings(8, 6, 7);
        let table =
            benchmark_epoch(&[(Variant::SvdPp, Trainer::Efficient)], &ds, None, 2, 1).unwrap();
        assert!(table[0].ratio_vs_biased_svd.is_none());
    }

    #[test]
    fn report_files_are_written() {
        let ds = synthetic_ratings(10, 8, 8);
        let mut spec = ExperimentSpec::new("fixture", Variant::BiasedSvd);
        spec.cfg.epochs = 2;
        spec.cfg.k = 2;
        let res = run_experiment(&ds, None, &spec).unwrap();

        let dir = tempfile::tempdir().unwrap();
        emit_report(std::slice::from_ref(&res), dir.path()).unwrap();
        let table = fs::read_to_string(dir.path().join("results.tsv")).unwrap();
        assert_eq!(table.lines().count(), 2);
        assert!(table
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("fixture\t0.90\tbiased_svd"));
        let acc = fs::read_to_string(dir.path().join("accuracy.dat")).unwrap();
        assert!(acc.contains("biased_svd"));
        assert!(dir.path().join("timing.dat").exists());

        // empty input -> header-only files
        emit_report(&[], dir.path()).unwrap();
        let table = fs::read_to_string(dir.path().join("results.tsv")).unwrap();
        assert_eq!(table.lines().count(), 1);
    }
}
