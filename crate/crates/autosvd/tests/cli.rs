//! End-to-end tests of the `autosvd` binary: exit codes, printed
//! statistics, artifact layout, config precedence, and the full
//! prepare -> train-cae -> train pipeline on a small fixture.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autosvd"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn autosvd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// 4 users x 5 items, every pair rated: ratings file plus a pipe-delimited
/// content file with 3 genre flags per item.
fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let ratings = dir.join("ratings.dat");
    let mut body = String::new();
    for u in 1..=4 {
        for i in 1..=5 {
            let r = 1 + (u * 2 + i * 3) % 5;
            body.push_str(&format!("{u}\t{i}\t{r}\t{}\n", 1000 + u * 10 + i));
        }
    }
    fs::write(&ratings, body).unwrap();

    let content = dir.join("u.item");
    let mut body = String::new();
    for i in 1..=5 {
        let flags = [i % 2, (i / 2) % 2, 1 - i % 2];
        body.push_str(&format!(
            "{i}|Item {i} (19{:02})|01-Jan-19{:02}||http://x/{i}|{}|{}|{}\n",
            90 + i,
            90 + i,
            flags[0],
            flags[1],
            flags[2]
        ));
    }
    fs::write(&content, body).unwrap();
    (ratings, content)
}

fn prepare_fixture(work: &Path) -> PathBuf {
    let (ratings, content) = write_fixture(work);
    let out = work.join("artifacts");
    let o = run(&[
        "prepare",
        "--data",
        ratings.to_str().unwrap(),
        "--format",
        "ml100k_tab",
        "--content",
        content.to_str().unwrap(),
        "--content_format",
        "ml100k_item",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "prepare failed: {}", stderr(&o));
    out
}

#[test]
fn help_exits_zero_and_lists_subcommands() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["prepare", "train-cae", "train", "evaluate", "benchmark"] {
        assert!(text.contains(sub), "usage lacks {sub}");
    }
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["transmogrify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown subcommand"));
}

#[test]
fn unknown_variant_names_the_valid_ones() {
    let o = run(&["train", "--variant", "svd99"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("biased_svd") && err.contains("autosvdpp"),
        "{err}"
    );
}

#[test]
fn missing_data_file_exits_two_and_names_the_path() {
    let o = run(&[
        "prepare",
        "--data",
        "/nonexistent/r.dat",
        "--format",
        "ml100k_tab",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/r.dat"));
}

#[test]
fn empty_ratings_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.dat");
    fs::write(&p, "").unwrap();
    let o = run(&[
        "prepare",
        "--data",
        p.to_str().unwrap(),
        "--format",
        "ml100k_tab",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no ratings"));
}

#[test]
fn prepare_prints_stats_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, content) = write_fixture(dir.path());
    let out = dir.path().join("artifacts");
    let args = [
        "prepare",
        "--data",
        ratings.to_str().unwrap(),
        "--format",
        "ml100k_tab",
        "--content",
        content.to_str().unwrap(),
        "--content_format",
        "ml100k_item",
        "--out",
        out.to_str().unwrap(),
    ];

    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // 4 users x 5 items fully rated: density 100%
    assert_eq!(
        stdout(&o).trim(),
        "items=5 users=4 ratings=20 density=100.00%"
    );
    for f in [
        "ratings.tsv",
        "users.tsv",
        "items.tsv",
        "content.mat",
        "prepare.config",
    ] {
        assert!(out.join(f).exists(), "missing artifact {f}");
    }

    let before: Vec<Vec<u8>> = ["ratings.tsv", "users.tsv", "items.tsv", "content.mat"]
        .iter()
        .map(|f| fs::read(out.join(f)).unwrap())
        .collect();
    let o2 = run(&args);
    assert_eq!(o2.status.code(), Some(0));
    for (i, f) in ["ratings.tsv", "users.tsv", "items.tsv", "content.mat"]
        .iter()
        .enumerate()
    {
        assert_eq!(
            fs::read(out.join(f)).unwrap(),
            before[i],
            "{f} changed on rerun"
        );
    }
}

#[test]
fn train_cae_writes_features_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let args = [
        "train-cae",
        "--out",
        out.to_str().unwrap(),
        "--hidden_dim",
        "3",
        "--cae_epochs",
        "5",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("features=5x3"));
    assert!(stdout(&o).contains("final_mean_loss="));

    let first = fs::read(out.join("cae.mat")).unwrap();
    let o2 = run(&args);
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(fs::read(out.join("cae.mat")).unwrap(), first);
}

#[test]
fn train_cae_rejects_zero_hidden_dim() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let o = run(&[
        "train-cae",
        "--out",
        out.to_str().unwrap(),
        "--hidden_dim",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn full_pipeline_trains_every_variant() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let o = run(&[
        "train-cae",
        "--out",
        out.to_str().unwrap(),
        "--hidden_dim",
        "3",
        "--cae_epochs",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    for (variant, trainer) in [
        ("biased_svd", "naive"),
        ("svdpp", "naive"),
        ("autosvd", "naive"),
        ("autosvdpp", "efficient"),
    ] {
        let o = run(&[
            "train",
            "--out",
            out.to_str().unwrap(),
            "--variant",
            variant,
            "--trainer",
            trainer,
            "--k",
            "3",
            "--epochs",
            "3",
            "--early_stop_delta",
            "0",
        ]);
        assert_eq!(o.status.code(), Some(0), "{variant}: {}", stderr(&o));
        assert!(stdout(&o).contains("epoch=3 train_rmse="), "{variant}");
        assert!(out.join("model.mat").exists());
        assert!(out.join("trace.tsv").exists());
    }

    // the plain variant warns about (and ignores) the present feature matrix
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--variant",
        "biased_svd",
        "--k",
        "3",
        "--epochs",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("ignoring"), "{}", stderr(&o));
}

#[test]
fn train_auto_variant_without_features_names_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--variant",
        "autosvd",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("features.mat"), "{}", stderr(&o));
}

#[test]
fn runaway_learning_rate_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--variant",
        "biased_svd",
        "--gamma1",
        "1e8",
        "--gamma2",
        "1e8",
        "--early_stop_delta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn config_precedence_is_flag_file_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = prepare_fixture(dir.path());
    let cfg = dir.path().join("run.config");
    fs::write(&cfg, "epochs=3\nearly_stop_delta=0\nk=2\n").unwrap();

    let epochs_printed = |o: &Output| {
        stdout(o)
            .lines()
            .filter(|l| l.starts_with("epoch="))
            .count()
    };

    // file beats default (default would be 30 epochs)
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(epochs_printed(&o), 3);

    // flag beats file
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--epochs",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(epochs_printed(&o), 2);

    // unknown key in the file is rejected
    fs::write(&cfg, "epochs=3\nwarp=9\n").unwrap();
    let o = run(&[
        "train",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("warp"));
}

#[test]
fn evaluate_writes_reports_and_prints_the_mean() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, content) = write_fixture(dir.path());
    let out = dir.path().join("report");
    let o = run(&[
        "evaluate",
        "--data",
        ratings.to_str().unwrap(),
        "--format",
        "ml100k_tab",
        "--content",
        content.to_str().unwrap(),
        "--content_format",
        "ml100k_item",
        "--variant",
        "autosvdpp",
        "--k",
        "2",
        "--epochs",
        "2",
        "--cae_epochs",
        "3",
        "--repetitions",
        "2",
        "--train_fraction",
        "0.8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("method=autosvdpp:efficient"), "{text}");
    assert!(text.contains("mean_rmse="), "{text}");
    assert!(text.contains("repetitions=2"), "{text}");
    for f in ["results.tsv", "accuracy.dat", "timing.dat"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
}

#[test]
fn benchmark_reports_one_row_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let (ratings, _) = write_fixture(dir.path());
    let out = dir.path().join("bench");
    let o = run(&[
        "benchmark",
        "--data",
        ratings.to_str().unwrap(),
        "--format",
        "ml100k_tab",
        "--entries",
        "svdpp:naive,svdpp:efficient",
        "--k",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("method=")).count(), 2);
    assert!(text.contains("method=svdpp:naive"));
    assert!(text.contains("method=svdpp:efficient"));
    let table = fs::read_to_string(out.join("timing.tsv")).unwrap();
    assert_eq!(table.lines().count(), 3); // header + 2 rows
}

#[test]
fn duplicate_ratings_warn_and_keep_last() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("dups.dat");
    fs::write(&p, "1\t1\t4\t0\n1\t1\t2\t9\n2\t1\t5\t0\n").unwrap();
    let out = dir.path().join("artifacts");
    let o = run(&[
        "prepare",
        "--data",
        p.to_str().unwrap(),
        "--format",
        "ml100k_tab",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ratings=2"));
    assert!(stderr(&o).contains("duplicate"), "{}", stderr(&o));
    let canon = fs::read_to_string(out.join("ratings.tsv")).unwrap();
    assert!(canon.contains("1\t1\t2\t9"), "{canon}");
}
