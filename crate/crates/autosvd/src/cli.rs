//! The `autosvd` binary: `prepare`, `train-cae`, `train`, `evaluate` and
//! `benchmark` subcommands over flat `key=value` configuration.
//!
//! Every key can come from a `--config FILE` and be overridden by a
//! `--key value` flag (flag > file > built-in default). Defaults are the
//! published hyper-parameters, resolved per variant, so a bare command
//! reproduces the reference setups. Exit codes: 0 ok, 1 usage/config,
//! 2 data, 3 numeric divergence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cae::{self, CaeTrainConfig, FeatureMatrix};
use crate::dataset::{
    load_item_content, load_ratings, ContentFormat, RatingFormat, RatingsDataset, SplitSpec,
};
use crate::error::{Error, Result};
use crate::eval::{benchmark_epoch, emit_report, run_experiment, ExperimentSpec};
use crate::factor::{self, TrainConfig, Trainer, Variant};

/// The complete key vocabulary; anything else is rejected.
const KEYS: &[&str] = &[
    "data",
    "format",
    "content",
    "content_format",
    "out",
    "variant",
    "trainer",
    "train_fraction",
    "split_seed",
    "repetitions",
    "clip",
    "filter_cold_start",
    "gamma1",
    "gamma2",
    "lambda1",
    "lambda2",
    "beta",
    "k",
    "epochs",
    "seed",
    "init_scale",
    "early_stop_delta",
    "hidden_dim",
    "cae_learning_rate",
    "cae_epochs",
    "cae_seed",
    "cae_jacobian_weight",
    "cae_init_scale",
    "entries",
];

const USAGE: &str = "\
usage: autosvd <subcommand> [--config FILE] [--key value]...

subcommands:
  prepare     parse a raw ratings (+ content) dataset into artifacts;
              prints items/users/ratings/density statistics
              keys: data format [content content_format] out
  train-cae   train the content auto-encoder on prepared artifacts
              keys: out hidden_dim cae_learning_rate cae_epochs cae_seed
                    cae_jacobian_weight cae_init_scale
  train       train a rating model on prepared artifacts
              keys: out variant trainer gamma1 gamma2 lambda1 lambda2
                    beta k epochs seed init_scale early_stop_delta
  evaluate    split/train/score repetitions and write report files
              keys: data format [content content_format] out variant trainer
                    train_fraction split_seed repetitions clip
                    filter_cold_start + all train/train-cae keys
  benchmark   time one training epoch per entry
              keys: data format [content content_format] out
                    entries (comma list of variant[:trainer]) k seed

variants: biased_svd svdpp autosvd autosvdpp    trainers: naive efficient
formats:  ml100k_tab ml1m_coloncolon movietweetings_coloncolon
          ml100k_item ml1m_movies movietweetings_movies
exit codes: 0 ok, 1 usage/config, 2 data, 3 numeric divergence";

/// Merged key=value options (file values already overridden by flags).
struct Options {
    map: BTreeMap<String, String>,
}

impl Options {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Config(format!("key '{key}' has unparseable value '{raw}'"))),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") | Some("on") => Ok(true),
            Some("false") | Some("0") | Some("no") | Some("off") => Ok(false),
            Some(raw) => Err(Error::Config(format!(
                "key '{key}' expects a boolean, got '{raw}'"
            ))),
        }
    }
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown key '{key}' (see usage for the full list)"
        )))
    }
}

/// `--key value` / `--key=value` pairs plus an optional `--config FILE`.
fn parse_flags(args: &[String]) -> Result<(BTreeMap<String, String>, Option<PathBuf>)> {
    let mut flags = BTreeMap::new();
    let mut config_path = None;
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        let Some(body) = arg.strip_prefix("--") else {
            return Err(Error::Config(format!("unexpected argument '{arg}'")));
        };
        let (key, value) = match body.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let value = args.get(i + 1).ok_or_else(|| {
                    Error::Config(format!("flag '--{body}' is missing its value"))
                })?;
                i += 1;
                (body.to_string(), value.clone())
            }
        };
        if key == "config" {
            config_path = Some(PathBuf::from(value));
        } else {
            check_key(&key)?;
            flags.insert(key, value);
        }
        i += 1;
    }
    Ok((flags, config_path))
}

/// Flat `key=value` lines; `#` comments and blank lines allowed.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            reason: "expected key=value".into(),
        })?;
        let key = key.trim();
        check_key(key).map_err(|e| e.with_context(&format!("{}:{}", path.display(), idx + 1)))?;
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve_options(args: &[String]) -> Result<Options> {
    let (flags, config_path) = parse_flags(args)?;
    let mut map = match config_path {
        Some(p) => parse_config_file(&p)?,
        None => BTreeMap::new(),
    };
    map.extend(flags); // flags override file values
    Ok(Options { map })
}

fn build_train_config(opts: &Options, variant: Variant) -> Result<TrainConfig> {
    let base = TrainConfig::for_variant(variant);
    Ok(TrainConfig {
        gamma1: opts.parsed("gamma1", base.gamma1)?,
        gamma2: opts.parsed("gamma2", base.gamma2)?,
        lambda1: opts.parsed("lambda1", base.lambda1)?,
        lambda2: opts.parsed("lambda2", base.lambda2)?,
        beta: opts.parsed("beta", base.beta)?,
        k: opts.parsed("k", base.k)?,
        epochs: opts.parsed("epochs", base.epochs)?,
        seed: opts.parsed("seed", base.seed)?,
        init_scale: opts.parsed("init_scale", base.init_scale)?,
        early_stop_delta: opts.parsed("early_stop_delta", base.early_stop_delta)?,
    })
}

fn build_cae_config(opts: &Options) -> Result<CaeTrainConfig> {
    let base = CaeTrainConfig::default();
    Ok(CaeTrainConfig {
        learning_rate: opts.parsed("cae_learning_rate", base.learning_rate)?,
        epochs: opts.parsed("cae_epochs", base.epochs)?,
        batch_order_seed: opts.parsed("cae_seed", base.batch_order_seed)?,
        jacobian_weight: opts.parsed("cae_jacobian_weight", base.jacobian_weight)?,
        init_scale: match opts.get("cae_init_scale") {
            None => None,
            Some(_) => Some(opts.parsed("cae_init_scale", 0.0)?),
        },
    })
}

fn out_dir(opts: &Options) -> PathBuf {
    PathBuf::from(opts.get("out").unwrap_or("artifacts"))
}

/// Echo the resolved options so a run can be reproduced from its artifacts.
fn write_config_echo(opts: &Options, dir: &Path, subcommand: &str) -> Result<()> {
    let mut body = String::new();
    for (k, v) in &opts.map {
        body.push_str(&format!("{k}={v}\n"));
    }
    let path = dir.join(format!("{subcommand}.config"));
    fs::write(&path, body).map_err(|e| Error::io(&path, e))
}

fn load_prepared_ratings(dir: &Path) -> Result<RatingsDataset> {
    load_ratings(&dir.join("ratings.tsv"), RatingFormat::Ml100kTab)
}

fn cmd_prepare(opts: &Options) -> Result<()> {
    let data = PathBuf::from(opts.require("data")?);
    let format = RatingFormat::parse(opts.require("format")?)?;
    let dir = out_dir(opts);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let ds = load_ratings(&data, format)?;
    if ds.duplicate_pairs > 0 {
        eprintln!(
            "warning: {} duplicate (user, item) pairs; kept the last rating of each",
            ds.duplicate_pairs
        );
    }

    ds.write_canonical(&dir.join("ratings.tsv"))?;
    for (name, map, n) in [
        ("users.tsv", &ds.user_ids, ds.n_users),
        ("items.tsv", &ds.item_ids, ds.n_items),
    ] {
        let mut body = String::new();
        for dense in 0..n as u32 {
            body.push_str(&format!("{dense}\t{}\n", map.raw(dense)));
        }
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }

    if let Some(content_path) = opts.get("content") {
        let cformat = ContentFormat::parse(opts.require("content_format")?)?;
        let content = load_item_content(Path::new(content_path), cformat, &ds.item_ids)?;
        if content.unparsed_years > 0 {
            eprintln!(
                "warning: {} content rows had an unparseable year (feature set to 0)",
                content.unparsed_years
            );
        }
        content.save(&dir.join("content.mat"))?;
    }

    write_config_echo(opts, &dir, "prepare")?;
    println!(
        "items={} users={} ratings={} density={:.2}%",
        ds.n_items,
        ds.n_users,
        ds.n_ratings(),
        ds.density_percent()
    );
    Ok(())
}

fn cmd_train_cae(opts: &Options) -> Result<()> {
    let dir = out_dir(opts);
    let content_path = dir.join("content.mat");
    if !content_path.exists() {
        return Err(Error::Config(format!(
            "{}: no content matrix; run `prepare` with --content first",
            content_path.display()
        )));
    }
    let content = crate::dataset::ItemContentMatrix::load(&content_path)?;
    let hidden_dim: usize = opts.parsed("hidden_dim", 10)?;
    let cfg = build_cae_config(opts)?;

    let (model, losses) = cae::train(&content, hidden_dim, &cfg)?;
    let features = cae::extract_features(&model, &content)?;
    model.save(&dir.join("cae.mat"))?;
    features.save(&dir.join("features.mat"))?;
    write_config_echo(opts, &dir, "train-cae")?;
    println!(
        "features={}x{} final_mean_loss={:.6}",
        features.n_items,
        features.dim,
        losses.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn cmd_train(opts: &Options) -> Result<()> {
    let dir = out_dir(opts);
    let variant = Variant::parse(opts.get("variant").unwrap_or("biased_svd"))?;
    let trainer = match opts.get("trainer") {
        Some(t) => Trainer::parse(t)?,
        None if variant.uses_implicit() => Trainer::Efficient,
        None => Trainer::Naive,
    };
    let cfg = build_train_config(opts, variant)?;
    let train_set = load_prepared_ratings(&dir)?;

    let features_path = dir.join("features.mat");
    let features = if variant.uses_content() {
        if !features_path.exists() {
            return Err(Error::Config(format!(
                "variant '{}' needs extracted features; missing artifact {} (run `train-cae` first)",
                variant.name(),
                features_path.display()
            )));
        }
        Some(FeatureMatrix::load(&features_path)?)
    } else {
        if features_path.exists() {
            eprintln!(
                "warning: variant '{}' does not use content features; ignoring {}",
                variant.name(),
                features_path.display()
            );
        }
        None
    };

    let (model, trace) = factor::train(variant, &train_set, &cfg, features.as_ref(), trainer)?;
    model.save(&dir.join("model.mat"))?;

    let mut trace_body = String::from("epoch\ttrain_rmse\tseconds\n");
    for e in &trace {
        trace_body.push_str(&format!(
            "{}\t{:.6}\t{:.6}\n",
            e.epoch, e.train_rmse, e.seconds
        ));
        println!("epoch={} train_rmse={:.6}", e.epoch, e.train_rmse);
    }
    let trace_path = dir.join("trace.tsv");
    fs::write(&trace_path, trace_body).map_err(|e| Error::io(&trace_path, e))?;
    write_config_echo(opts, &dir, "train")?;
    Ok(())
}

fn cmd_evaluate(opts: &Options) -> Result<()> {
    let data = PathBuf::from(opts.require("data")?);
    let format = RatingFormat::parse(opts.require("format")?)?;
    let variant = Variant::parse(opts.get("variant").unwrap_or("biased_svd"))?;
    let trainer = match opts.get("trainer") {
        Some(t) => Trainer::parse(t)?,
        None if variant.uses_implicit() => Trainer::Efficient,
        None => Trainer::Naive,
    };
    let dir = out_dir(opts);

    let ds = load_ratings(&data, format)?;
    let content = match opts.get("content") {
        Some(p) => {
            let cformat = ContentFormat::parse(opts.require("content_format")?)?;
            Some(load_item_content(Path::new(p), cformat, &ds.item_ids)?)
        }
        None => None,
    };
    if variant.uses_content() && content.is_none() {
        return Err(Error::Config(format!(
            "variant '{}' needs --content/--content_format",
            variant.name()
        )));
    }

    let spec = ExperimentSpec {
        dataset_label: data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into()),
        variant,
        trainer,
        split: SplitSpec::new(
            opts.parsed("train_fraction", 0.9)?,
            opts.parsed("split_seed", 42)?,
        ),
        cfg: build_train_config(opts, variant)?,
        cae_cfg: build_cae_config(opts)?,
        repetitions: opts.parsed("repetitions", 5)?,
        clip_predictions: opts.flag("clip", true)?,
        filter_cold_start: opts.flag("filter_cold_start", false)?,
    };

    let result = run_experiment(&ds, content.as_ref(), &spec)?;
    emit_report(std::slice::from_ref(&result), &dir)?;
    write_config_echo(opts, &dir, "evaluate")?;
    println!(
        "method={} mean_rmse={:.6} std_rmse={:.6} repetitions={}",
        result.method_label(),
        result.mean_rmse,
        result.std_rmse,
        result.rep_rmse.len()
    );
    Ok(())
}

fn parse_entries(raw: &str) -> Result<Vec<(Variant, Trainer)>> {
    let mut entries = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (vname, trainer) = match part.split_once(':') {
            Some((v, t)) => (v, Some(Trainer::parse(t)?)),
            None => (part, None),
        };
        let variant = Variant::parse(vname)?;
        let trainer = trainer.unwrap_or(if variant.uses_implicit() {
            Trainer::Efficient
        } else {
            Trainer::Naive
        });
        entries.push((variant, trainer));
    }
    if entries.is_empty() {
        return Err(Error::Config("entries list is empty".into()));
    }
    Ok(entries)
}

fn cmd_benchmark(opts: &Options) -> Result<()> {
    let data = PathBuf::from(opts.require("data")?);
    let format = RatingFormat::parse(opts.require("format")?)?;
    let entries = parse_entries(
        opts.get("entries")
            .unwrap_or("biased_svd,svdpp:naive,svdpp:efficient"),
    )?;
    let dir = out_dir(opts);
    let k: usize = opts.parsed("k", 10)?;
    let seed: u64 = opts.parsed("seed", 42)?;

    let ds = load_ratings(&data, format)?;
    let needs_content = entries.iter().any(|(v, _)| v.uses_content());
    let features = if needs_content {
        let content_path = opts.require("content")?;
        let cformat = ContentFormat::parse(opts.require("content_format")?)?;
        let content = load_item_content(Path::new(content_path), cformat, &ds.item_ids)?;
        let (cae_model, _) = cae::train(&content, k, &build_cae_config(opts)?)?;
        Some(cae::extract_features(&cae_model, &content)?)
    } else {
        None
    };

    let table = benchmark_epoch(&entries, &ds, features.as_ref(), k, seed)?;
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut body = String::from("method\tseconds\tratio_vs_biased_svd\n");
    for e in &table {
        let ratio = e
            .ratio_vs_biased_svd
            .map(|r| format!("{r:.3}"))
            .unwrap_or_else(|| "-".into());
        body.push_str(&format!("{}\t{:.6}\t{}\n", e.name, e.seconds, ratio));
        println!("method={} seconds={:.6} ratio={}", e.name, e.seconds, ratio);
    }
    let path = dir.join("timing.tsv");
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    write_config_echo(opts, &dir, "benchmark")?;
    Ok(())
}

/// Parse argv (without the program name) and run. Returns the process exit
/// code; errors are printed to stderr.
pub fn run(args: &[String]) -> i32 {
    match run_inner(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(args: &[String]) -> Result<i32> {
    let Some(subcommand) = args.first() else {
        eprintln!("{USAGE}");
        return Ok(1);
    };
    if subcommand == "--help" || subcommand == "-h" || subcommand == "help" {
        println!("{USAGE}");
        return Ok(0);
    }
    let opts = resolve_options(&args[1..])?;
    match subcommand.as_str() {
        "prepare" => cmd_prepare(&opts)?,
        "train-cae" => cmd_train_cae(&opts)?,
        "train" => cmd_train(&opts)?,
        "evaluate" => cmd_evaluate(&opts)?,
        "benchmark" => cmd_benchmark(&opts)?,
        other => {
            return Err(Error::Config(format!(
                "unknown subcommand '{other}' (expected prepare, train-cae, train, evaluate or benchmark)"
            )))
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn flags_accept_both_spellings() {
        let (flags, cfg) = parse_flags(&s(&["--k=12", "--seed", "7"])).unwrap();
        assert_eq!(flags.get("k").unwrap(), "12");
        assert_eq!(flags.get("seed").unwrap(), "7");
        assert!(cfg.is_none());
    }

    #[test]
    fn unknown_flags_and_keys_are_rejected() {
        assert!(parse_flags(&s(&["--bogus", "1"])).is_err());
        assert!(parse_flags(&s(&["stray"])).is_err());
        assert!(parse_flags(&s(&["--k"])).is_err());

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg");
        fs::write(&p, "k=3\nbogus=1\n").unwrap();
        assert!(parse_config_file(&p).is_err());
    }

    #[test]
    fn config_file_supports_comments_and_blanks() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg");
        fs::write(&p, "# a comment\n\nk = 3\nvariant=autosvd\n").unwrap();
        let map = parse_config_file(&p).unwrap();
        assert_eq!(map.get("k").unwrap(), "3");
        assert_eq!(map.get("variant").unwrap(), "autosvd");
    }

    #[test]
    fn precedence_is_flag_over_file_over_default() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg");
        fs::write(&p, "k=3\nepochs=9\n").unwrap();
        let cfg_flag = format!("--config={}", p.display());
        let opts = resolve_options(&s(&[&cfg_flag, "--k", "5"])).unwrap();
        let tc = build_train_config(&opts, Variant::BiasedSvd).unwrap();
        assert_eq!(tc.k, 5); // flag beats file
        assert_eq!(tc.epochs, 9); // file beats default
        assert_eq!(tc.gamma1, 0.01); // default survives
    }

    #[test]
    fn per_variant_defaults_resolve() {
        let opts = Options {
            map: BTreeMap::new(),
        };
        let plain = build_train_config(&opts, Variant::BiasedSvd).unwrap();
        assert_eq!(plain.gamma1, 0.01);
        assert_eq!(plain.lambda1, 0.1);
        let pp = build_train_config(&opts, Variant::AutoSvdPp).unwrap();
        assert_eq!(pp.gamma1, 0.007);
        assert_eq!(pp.lambda1, 0.005);
        assert_eq!(pp.lambda2, 0.015);
        assert_eq!(pp.beta, 0.1);
        assert_eq!(pp.k, 10);
    }

    #[test]
    fn entry_lists_parse_with_default_trainers() {
        let entries = parse_entries("biased_svd, svdpp:naive,autosvdpp").unwrap();
        assert_eq!(entries[0], (Variant::BiasedSvd, Trainer::Naive));
        assert_eq!(entries[1], (Variant::SvdPp, Trainer::Naive));
        assert_eq!(entries[2], (Variant::AutoSvdPp, Trainer::Efficient));
        assert!(parse_entries("warp_drive").is_err());
        assert!(parse_entries("").is_err());
    }

    #[test]
    fn bad_values_are_config_errors() {
        let opts = Options {
            map: BTreeMap::from([("k".to_string(), "many".to_string())]),
        };
        assert!(matches!(
            build_train_config(&opts, Variant::BiasedSvd),
            Err(Error::Config(_))
        ));
        let bools = Options {
            map: BTreeMap::from([("clip".to_string(), "maybe".to_string())]),
        };
        assert!(bools.flag("clip", true).is_err());
        assert!(!bools.flag("filter_cold_start", false).unwrap());
    }
}
