//! Rating and item-content ingestion, dense re-indexing, and seeded
//! train/test splits.
//!
//! Raw user/item ids are mapped to dense `0..n` indices in first-appearance
//! order; the mapping is kept on the dataset so artifacts can be written
//! back with the original ids. The per-user rated-item sets double as the
//! implicit-feedback sets for the implicit-factor models.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Bijection between raw string ids and dense `0..n` indices.
#[derive(Debug, Clone, Default)]
pub struct IdMap {
    index: HashMap<String, u32>,
    raw: Vec<String>,
}

impl IdMap {
    pub fn insert_or_get(&mut self, raw_id: &str) -> u32 {
        if let Some(&d) = self.index.get(raw_id) {
            return d;
        }
        let d = self.raw.len() as u32;
        self.index.insert(raw_id.to_string(), d);
        self.raw.push(raw_id.to_string());
        d
    }

    pub fn dense(&self, raw_id: &str) -> Option<u32> {
        self.index.get(raw_id).copied()
    }

    pub fn raw(&self, dense: u32) -> &str {
        &self.raw[dense as usize]
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

/// One (user, item, rating) observation with dense ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating {
    pub user: u32,
    pub item: u32,
    pub value: f64,
    /// Unix seconds; 0 when the source line carried no timestamp.
    pub timestamp: i64,
}

/// The known-ratings set plus the index structures derived from it.
#[derive(Debug, Clone)]
pub struct RatingsDataset {
    pub n_users: usize,
    pub n_items: usize,
    pub triples: Vec<Rating>,
    /// Sorted distinct rated items per user: N(u) realized as R(u).
    pub user_items: Vec<Vec<u32>>,
    /// Ratings per item, for cold-start detection at prediction time.
    pub item_counts: Vec<u32>,
    pub global_mean: f64,
    pub rating_min: f64,
    pub rating_max: f64,
    pub user_ids: IdMap,
    pub item_ids: IdMap,
    /// (user, item) pairs that appeared more than once; the last value won.
    pub duplicate_pairs: usize,
}

impl RatingsDataset {
    /// Build a dataset from raw-id triples, assigning dense ids in
    /// first-appearance order. Duplicate (user, item) pairs keep the last
    /// rating value and are counted in `duplicate_pairs`.
    pub fn from_triples<I, U, T>(rows: I) -> Self
    where
        I: IntoIterator<Item = (U, T, f64, i64)>,
        U: AsRef<str>,
        T: AsRef<str>,
    {
        let mut user_ids = IdMap::default();
        let mut item_ids = IdMap::default();
        let mut triples: Vec<Rating> = Vec::new();
        let mut seen: HashMap<(u32, u32), usize> = HashMap::new();
        let mut duplicate_pairs = 0;

        for (raw_u, raw_i, value, timestamp) in rows {
            let user = user_ids.insert_or_get(raw_u.as_ref());
            let item = item_ids.insert_or_get(raw_i.as_ref());
            match seen.get(&(user, item)) {
                Some(&at) => {
                    triples[at].value = value;
                    triples[at].timestamp = timestamp;
                    duplicate_pairs += 1;
                }
                None => {
                    seen.insert((user, item), triples.len());
                    triples.push(Rating {
                        user,
                        item,
                        value,
                        timestamp,
                    });
                }
            }
        }

        Self::assemble(user_ids, item_ids, triples, duplicate_pairs)
    }

    fn assemble(
        user_ids: IdMap,
        item_ids: IdMap,
        triples: Vec<Rating>,
        duplicate_pairs: usize,
    ) -> Self {
        let n_users = user_ids.len();
        let n_items = item_ids.len();
        let mut user_items: Vec<Vec<u32>> = vec![Vec::new(); n_users];
        let mut item_counts = vec![0u32; n_items];
        let mut sum = 0.0;
        let mut rating_min = f64::INFINITY;
        let mut rating_max = f64::NEG_INFINITY;
        for r in &triples {
            user_items[r.user as usize].push(r.item);
            item_counts[r.item as usize] += 1;
            sum += r.value;
            rating_min = rating_min.min(r.value);
            rating_max = rating_max.max(r.value);
        }
        for items in &mut user_items {
            items.sort_unstable();
            items.dedup();
        }
        let global_mean = if triples.is_empty() {
            0.0
        } else {
            sum / triples.len() as f64
        };
        if triples.is_empty() {
            rating_min = 0.0;
            rating_max = 0.0;
        }
        RatingsDataset {
            n_users,
            n_items,
            triples,
            user_items,
            item_counts,
            global_mean,
            rating_min,
            rating_max,
            user_ids,
            item_ids,
            duplicate_pairs,
        }
    }

    pub fn n_ratings(&self) -> usize {
        self.triples.len()
    }

    /// |ratings| / (n_users * n_items) in percent.
    pub fn density_percent(&self) -> f64 {
        if self.n_users == 0 || self.n_items == 0 {
            return 0.0;
        }
        100.0 * self.triples.len() as f64 / (self.n_users as f64 * self.n_items as f64)
    }

    /// True if user `u` has at least one rating in this dataset.
    pub fn user_seen(&self, u: usize) -> bool {
        u < self.n_users && !self.user_items[u].is_empty()
    }

    /// True if item `i` has at least one rating in this dataset.
    pub fn item_seen(&self, i: usize) -> bool {
        i < self.n_items && self.item_counts[i] > 0
    }

    /// Write the canonical columnar dump: one `user\titem\trating\ttimestamp`
    /// line per triple, raw ids, in triple order. Reloading with
    /// [`RatingFormat::Ml100kTab`] reproduces the dataset exactly, including
    /// the dense id assignment.
    pub fn write_canonical(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for r in &self.triples {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                self.user_ids.raw(r.user),
                self.item_ids.raw(r.item),
                r.value,
                r.timestamp
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Line layouts for the supported ratings files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatingFormat {
    /// `user\titem\trating\ttimestamp`
    Ml100kTab,
    /// `user::item::rating::timestamp`
    Ml1mColonColon,
    /// `user::item::rating::timestamp`
    MovieTweetingsColonColon,
}

impl RatingFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ml100k_tab" => Ok(RatingFormat::Ml100kTab),
            "ml1m_coloncolon" => Ok(RatingFormat::Ml1mColonColon),
            "movietweetings_coloncolon" => Ok(RatingFormat::MovieTweetingsColonColon),
            _ => Err(Error::Config(format!(
                "unknown ratings format '{name}' (expected ml100k_tab, ml1m_coloncolon or movietweetings_coloncolon)"
            ))),
        }
    }

    fn split_line<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            RatingFormat::Ml100kTab => line.split('\t').collect(),
            _ => line.split("::").collect(),
        }
    }
}

/// Parse a ratings file into a dense-indexed dataset.
pub fn load_ratings(path: &Path, format: RatingFormat) -> Result<RatingsDataset> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut rows: Vec<(String, String, f64, i64)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = format.split_line(&line);
        if fields.len() < 3 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!(
                    "expected user, item, rating[, timestamp]; got {} fields",
                    fields.len()
                ),
            });
        }
        let value: f64 = fields[2].trim().parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            reason: format!("unparseable rating '{}'", fields[2]),
        })?;
        let timestamp: i64 = match fields.get(3) {
            Some(ts) => ts.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("unparseable timestamp '{}'", fields[3]),
            })?,
            None => 0,
        };
        rows.push((
            fields[0].to_string(),
            fields[1].to_string(),
            value,
            timestamp,
        ));
    }

    if rows.is_empty() {
        return Err(Error::NoRatings {
            path: path.to_path_buf(),
        });
    }
    Ok(RatingsDataset::from_triples(rows))
}

/// Per-item raw content vectors: a one-hot genre block plus one min-max
/// normalized release-year column (always the last column).
#[derive(Debug, Clone)]
pub struct ItemContentMatrix {
    pub dim: usize,
    pub n_items: usize,
    /// Row-major, `n_items * dim`.
    pub rows: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Content rows whose year field could not be parsed (feature set to 0).
    pub unparsed_years: usize,
}

impl ItemContentMatrix {
    pub fn row(&self, item: usize) -> &[f64] {
        &self.rows[item * self.dim..(item + 1) * self.dim]
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = crate::store::Store::new();
        s.set_meta("kind", "item-content");
        s.set_meta("features", self.feature_names.join("|"));
        s.set_meta("unparsed_years", self.unparsed_years);
        s.push_block("rows", self.n_items, self.dim, self.rows.clone());
        s.write(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = crate::store::Store::read(path)?;
        if s.meta("kind") != Some("item-content") {
            return Err(Error::Config(format!(
                "{}: not an item-content matrix",
                path.display()
            )));
        }
        let feature_names: Vec<String> = s
            .meta("features")
            .unwrap_or("")
            .split('|')
            .map(str::to_string)
            .collect();
        let unparsed_years = s.meta_parsed("unparsed_years")?;
        let b = s.block("rows")?;
        Ok(ItemContentMatrix {
            dim: b.cols,
            n_items: b.rows,
            rows: b.data.clone(),
            feature_names,
            unparsed_years,
        })
    }
}

/// Content-file layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentFormat {
    /// Pipe-delimited `u.item`: id|title|release date|video date|url|flag...
    Ml100kItem,
    /// `id::title (year)::Genre|Genre|...`
    Ml1mMovies,
    /// `id::title (year)::Genre|Genre|...`
    MovieTweetingsMovies,
}

impl ContentFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ml100k_item" => Ok(ContentFormat::Ml100kItem),
            "ml1m_movies" => Ok(ContentFormat::Ml1mMovies),
            "movietweetings_movies" => Ok(ContentFormat::MovieTweetingsMovies),
            _ => Err(Error::Config(format!(
                "unknown content format '{name}' (expected ml100k_item, ml1m_movies or movietweetings_movies)"
            ))),
        }
    }
}

struct RawContent {
    item: u32,
    genres: Vec<f64>,
    year: Option<f64>,
}

/// Build the item-content matrix aligned to the dense item ids of
/// `item_ids`. Items absent from the content file keep an all-zeros row.
pub fn load_item_content(
    path: &Path,
    format: ContentFormat,
    item_ids: &IdMap,
) -> Result<ItemContentMatrix> {
    // Content files may carry non-UTF-8 titles; decode lossily.
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);

    match format {
        ContentFormat::Ml100kItem => parse_ml100k_item(path, &text, item_ids),
        ContentFormat::Ml1mMovies | ContentFormat::MovieTweetingsMovies => {
            parse_genre_list_movies(path, &text, item_ids)
        }
    }
}

fn parse_ml100k_item(path: &Path, text: &str, item_ids: &IdMap) -> Result<ItemContentMatrix> {
    let mut n_genres: Option<usize> = None;
    let mut raws: Vec<RawContent> = Vec::new();
    let mut unparsed_years = 0;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() < 6 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!(
                    "expected at least 6 pipe-delimited fields, got {}",
                    fields.len()
                ),
            });
        }
        let ng = *n_genres.get_or_insert(fields.len() - 5);
        if fields.len() - 5 != ng {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("expected {} genre flags, got {}", ng, fields.len() - 5),
            });
        }
        let Some(item) = item_ids.dense(fields[0]) else {
            continue; // item never rated; not part of the companion dataset
        };
        let mut genres = Vec::with_capacity(ng);
        for f in &fields[5..] {
            match *f {
                "0" => genres.push(0.0),
                "1" => genres.push(1.0),
                other => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno,
                        reason: format!("genre flag must be 0 or 1, got '{other}'"),
                    })
                }
            }
        }
        // release date like "01-Jan-1995"; the year is the final component
        let year = fields[1 + 1]
            .rsplit('-')
            .next()
            .and_then(|y| y.parse::<f64>().ok());
        if year.is_none() {
            unparsed_years += 1;
        }
        raws.push(RawContent { item, genres, year });
    }

    let ng = n_genres.unwrap_or(0);
    let mut feature_names: Vec<String> = (0..ng).map(|g| format!("genre_{g:02}")).collect();
    feature_names.push("year".to_string());
    Ok(assemble_content(
        item_ids.len(),
        ng,
        feature_names,
        raws,
        unparsed_years,
    ))
}

fn parse_genre_list_movies(path: &Path, text: &str, item_ids: &IdMap) -> Result<ItemContentMatrix> {
    struct Row {
        item: u32,
        genres: Vec<String>,
        year: Option<f64>,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut vocab: Vec<String> = Vec::new();
    let mut unparsed_years = 0;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split("::").collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("expected id::title[::genres], got {} fields", fields.len()),
            });
        }
        let Some(item) = item_ids.dense(fields[0]) else {
            continue;
        };
        let genres: Vec<String> = fields
            .get(2)
            .map(|g| {
                g.split('|')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            })
            .unwrap_or_default();
        for g in &genres {
            if !vocab.contains(g) {
                vocab.push(g.clone());
            }
        }
        let year = year_from_title(fields[1]);
        if year.is_none() {
            unparsed_years += 1;
        }
        rows.push(Row { item, genres, year });
    }

    vocab.sort_unstable();
    let ng = vocab.len();
    let raws = rows
        .into_iter()
        .map(|r| {
            let mut flags = vec![0.0; ng];
            for g in &r.genres {
                let pos = vocab.iter().position(|v| v == g).unwrap();
                flags[pos] = 1.0;
            }
            RawContent {
                item: r.item,
                genres: flags,
                year: r.year,
            }
        })
        .collect();
    let mut feature_names = vocab;
    feature_names.push("year".to_string());
    Ok(assemble_content(
        item_ids.len(),
        ng,
        feature_names,
        raws,
        unparsed_years,
    ))
}

/// Extract a `(YYYY)` year from the end of a title string.
fn year_from_title(title: &str) -> Option<f64> {
    let t = title.trim_end();
    let end = t.strip_suffix(')')?;
    let open = end.rfind('(')?;
    let digits = &end[open + 1..];
    if digits.len() == 4 && digits.chars().all(|c| c.is_ascii_digit()) {
        digits.parse().ok()
    } else {
        None
    }
}

fn assemble_content(
    n_items: usize,
    n_genres: usize,
    feature_names: Vec<String>,
    raws: Vec<RawContent>,
    unparsed_years: usize,
) -> ItemContentMatrix {
    let dim = n_genres + 1;
    let mut rows = vec![0.0; n_items * dim];

    let years: Vec<f64> = raws.iter().filter_map(|r| r.year).collect();
    let (ymin, ymax) = years
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    let span = ymax - ymin;

    for r in raws {
        let row = &mut rows[r.item as usize * dim..(r.item as usize + 1) * dim];
        row[..n_genres].copy_from_slice(&r.genres);
        row[n_genres] = match r.year {
            Some(y) if span > 0.0 => (y - ymin) / span,
            _ => 0.0,
        };
    }

    ItemContentMatrix {
        dim,
        n_items,
        rows,
        feature_names,
        unparsed_years,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitStrategy {
    GlobalRandom,
}

/// Seeded train/test partition parameters.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub strategy: SplitStrategy,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        SplitSpec {
            train_fraction,
            seed,
            strategy: SplitStrategy::GlobalRandom,
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::new(0.9, 42)
    }
}

/// Partition the triples uniformly at random by seed. Both halves share the
/// id maps (and so the dense index space) of the input; means and index
/// structures are recomputed per half.
pub fn split(ds: &RatingsDataset, spec: &SplitSpec) -> Result<(RatingsDataset, RatingsDataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie in (0,1), got {}",
            spec.train_fraction
        )));
    }
    let n = ds.triples.len();
    let n_train = (spec.train_fraction * n as f64).round() as usize;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);

    let mut train_triples = Vec::with_capacity(n_train);
    let mut test_triples = Vec::with_capacity(n - n_train);
    for (pos, &idx) in order.iter().enumerate() {
        if pos < n_train {
            train_triples.push(ds.triples[idx]);
        } else {
            test_triples.push(ds.triples[idx]);
        }
    }

    let carve = |triples: Vec<Rating>| {
        let mut user_items: Vec<Vec<u32>> = vec![Vec::new(); ds.n_users];
        let mut item_counts = vec![0u32; ds.n_items];
        let mut sum = 0.0;
        for r in &triples {
            user_items[r.user as usize].push(r.item);
            item_counts[r.item as usize] += 1;
            sum += r.value;
        }
        for items in &mut user_items {
            items.sort_unstable();
            items.dedup();
        }
        let global_mean = if triples.is_empty() {
            0.0
        } else {
            sum / triples.len() as f64
        };
        RatingsDataset {
            n_users: ds.n_users,
            n_items: ds.n_items,
            triples,
            user_items,
            item_counts,
            global_mean,
            rating_min: ds.rating_min,
            rating_max: ds.rating_max,
            user_ids: ds.user_ids.clone(),
            item_ids: ds.item_ids.clone(),
            duplicate_pairs: 0,
        }
    };

    Ok((carve(train_triples), carve(test_triples)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn write_tmp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fixture");
        fs::write(&path, content).unwrap();
        (dir, path)
    }

    #[test]
    fn three_line_fixture() {
        let (_d, path) = write_tmp("1\t10\t4.0\t0\n1\t20\t3.0\t0\n2\t10\t5.0\t0\n");
        let ds = load_ratings(&path, RatingFormat::Ml100kTab).unwrap();
        assert_eq!(ds.n_users, 2);
        assert_eq!(ds.n_items, 2);
        assert_eq!(ds.n_ratings(), 3);
        assert!((ds.global_mean - 4.0).abs() < 1e-12);
        assert_eq!(ds.user_items[0], vec![0, 1]);
        assert_eq!(ds.user_items[1], vec![0]);
    }

    #[test]
    fn coloncolon_format() {
        let (_d, path) = write_tmp("7::3::9::111\n7::5::10::222\n");
        let ds = load_ratings(&path, RatingFormat::MovieTweetingsColonColon).unwrap();
        assert_eq!(ds.n_users, 1);
        assert_eq!(ds.n_items, 2);
        assert_eq!(ds.rating_max, 10.0);
        assert_eq!(ds.triples[1].timestamp, 222);
    }

    #[test]
    fn empty_file_is_no_ratings() {
        let (_d, path) = write_tmp("");
        let err = load_ratings(&path, RatingFormat::Ml100kTab).unwrap_err();
        assert!(err.to_string().contains("no ratings"), "{err}");
    }

    #[test]
    fn malformed_line_reports_number() {
        let (_d, path) = write_tmp("1\t10\t4.0\t0\n1\t20\tbogus\t0\n");
        let err = load_ratings(&path, RatingFormat::Ml100kTab).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_pair_keeps_last_value() {
        let ds = RatingsDataset::from_triples(vec![
            ("1", "10", 4.0, 0),
            ("1", "10", 2.0, 5),
            ("2", "10", 5.0, 0),
        ]);
        assert_eq!(ds.duplicate_pairs, 1);
        assert_eq!(ds.n_ratings(), 2);
        assert_eq!(ds.triples[0].value, 2.0);
        assert!((ds.global_mean - 3.5).abs() < 1e-12);
    }

    #[test]
    fn reindex_is_bijective() {
        let ds = RatingsDataset::from_triples(vec![
            ("900", "x", 1.0, 0),
            ("5", "y", 2.0, 0),
            ("900", "y", 3.0, 0),
        ]);
        for d in 0..ds.n_users as u32 {
            assert_eq!(ds.user_ids.dense(ds.user_ids.raw(d)), Some(d));
        }
        for d in 0..ds.n_items as u32 {
            assert_eq!(ds.item_ids.dense(ds.item_ids.raw(d)), Some(d));
        }
    }

    #[test]
    fn canonical_dump_roundtrips() {
        let ds = RatingsDataset::from_triples(vec![
            ("42", "10", 4.5, 99),
            ("42", "20", 3.0, 0),
            ("7", "10", 1.25, 3),
        ]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("canon.tsv");
        ds.write_canonical(&path).unwrap();
        let back = load_ratings(&path, RatingFormat::Ml100kTab).unwrap();
        assert_eq!(back.triples, ds.triples);
        assert_eq!(back.n_users, ds.n_users);
        assert_eq!(back.user_ids.raw(0), "42");
    }

    fn ten_triples() -> RatingsDataset {
        RatingsDataset::from_triples((0..10).map(|i| {
            (
                format!("u{}", i % 4),
                format!("i{}", i),
                1.0 + (i % 5) as f64,
                0,
            )
        }))
    }

    #[test]
    fn split_is_disjoint_partition() {
        let ds = ten_triples();
        let (train, test) = split(&ds, &SplitSpec::new(0.5, 7)).unwrap();
        assert_eq!(train.n_ratings(), 5);
        assert_eq!(test.n_ratings(), 5);
        let key = |r: &Rating| (r.user, r.item);
        let tr: HashSet<_> = train.triples.iter().map(key).collect();
        let te: HashSet<_> = test.triples.iter().map(key).collect();
        assert!(tr.is_disjoint(&te));
        let all: HashSet<_> = ds.triples.iter().map(key).collect();
        assert_eq!(&tr | &te, all);
        // shared index space
        assert_eq!(train.n_users, ds.n_users);
        assert_eq!(test.n_items, ds.n_items);
    }

    #[test]
    fn split_is_deterministic() {
        let ds = ten_triples();
        let (a, _) = split(&ds, &SplitSpec::new(0.5, 7)).unwrap();
        let (b, _) = split(&ds, &SplitSpec::new(0.5, 7)).unwrap();
        assert_eq!(a.triples, b.triples);
        let (c, _) = split(&ds, &SplitSpec::new(0.5, 8)).unwrap();
        assert_ne!(a.triples, c.triples);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let ds = ten_triples();
        assert!(split(&ds, &SplitSpec::new(0.0, 1)).is_err());
        assert!(split(&ds, &SplitSpec::new(1.0, 1)).is_err());
    }

    const U_ITEM: &str = "\
1|Toy Story (1995)|01-Jan-1995||http://example/1|0|0|0|1|1|1|0|0|0|0|0|0|0|0|0|0|0|0|0
2|GoldenEye (1995)|01-Jan-1995||http://example/2|0|1|1|0|0|0|0|0|0|0|0|0|0|0|0|0|1|0|0
4|Get Shorty (1995)|01-Jan-2000||http://example/4|0|1|0|0|0|1|0|0|1|0|0|0|0|0|0|0|0|0|0
5|Broken (1995)|||http://example/5|0|0|0|0|0|0|0|1|0|0|0|0|0|0|0|0|0|0|0
";

    fn item_map(raw_ids: &[&str]) -> IdMap {
        let mut m = IdMap::default();
        for id in raw_ids {
            m.insert_or_get(id);
        }
        m
    }

    #[test]
    fn ml100k_item_layout() {
        let (_d, path) = write_tmp(U_ITEM);
        let ids = item_map(&["1", "2", "3", "4", "5"]);
        let m = load_item_content(&path, ContentFormat::Ml100kItem, &ids).unwrap();
        assert_eq!(m.dim, 20); // 19 genre flags + year
        assert_eq!(m.n_items, 5);
        assert_eq!(m.feature_names.len(), 20);
        // item "1": 1995 is the corpus minimum -> year feature 0.0
        assert_eq!(m.row(0)[19], 0.0);
        // item "4": 2000 is the corpus maximum -> 1.0
        assert_eq!(m.row(ids.dense("4").unwrap() as usize)[19], 1.0);
        // item "3" absent from the content file -> all zeros
        assert!(m.row(1).iter().any(|&v| v != 0.0));
        assert!(m
            .row(ids.dense("3").unwrap() as usize)
            .iter()
            .all(|&v| v == 0.0));
        // item "5" has an empty release date -> year 0, counted
        assert_eq!(m.unparsed_years, 1);
        assert_eq!(m.row(ids.dense("5").unwrap() as usize)[19], 0.0);
        // one-hot block is 0/1 only
        assert!(m.rows.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn ml100k_item_rejects_bad_flag() {
        let (_d, path) = write_tmp("1|T (1995)|01-Jan-1995||u|0|2|0\n");
        let ids = item_map(&["1"]);
        let err = load_item_content(&path, ContentFormat::Ml100kItem, &ids).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn genre_list_movies_layout() {
        let text = "\
1::Toy Story (1995)::Animation|Children's|Comedy
2::Jumanji (1995)::Adventure|Children's|Fantasy
3::Unknown Title::Drama
";
        let (_d, path) = write_tmp(text);
        let ids = item_map(&["1", "2", "3", "9"]);
        let m = load_item_content(&path, ContentFormat::Ml1mMovies, &ids).unwrap();
        // vocabulary sorted: Adventure, Animation, Children's, Comedy, Drama, Fantasy
        assert_eq!(
            m.feature_names,
            vec![
                "Adventure",
                "Animation",
                "Children's",
                "Comedy",
                "Drama",
                "Fantasy",
                "year"
            ]
        );
        assert_eq!(m.dim, 7);
        let toy = m.row(0);
        assert_eq!(&toy[..6], &[0.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
        // item 3 has no parseable year
        assert_eq!(m.unparsed_years, 1);
        assert_eq!(m.row(2)[6], 0.0);
        // unrated-but-listed items are skipped, unlisted items get zeros
        assert!(m.row(3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn year_parsing_from_titles() {
        assert_eq!(year_from_title("Toy Story (1995)"), Some(1995.0));
        assert_eq!(year_from_title("Seven (a.k.a. Se7en) (1995)"), Some(1995.0));
        assert_eq!(year_from_title("No Year Here"), None);
        assert_eq!(year_from_title("Bad (19x5)"), None);
    }

    #[test]
    fn single_year_corpus_maps_to_zero() {
        let text = "1::A (1990)::Drama\n2::B (1990)::Drama\n";
        let (_d, path) = write_tmp(text);
        let ids = item_map(&["1", "2"]);
        let m = load_item_content(&path, ContentFormat::Ml1mMovies, &ids).unwrap();
        assert_eq!(m.row(0)[m.dim - 1], 0.0);
        assert_eq!(m.row(1)[m.dim - 1], 0.0);
    }

    #[test]
    fn content_matrix_persistence() {
        let (_d, path) = write_tmp(U_ITEM);
        let ids = item_map(&["1", "2", "4", "5"]);
        let m = load_item_content(&path, ContentFormat::Ml100kItem, &ids).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("content.mat");
        m.save(&out).unwrap();
        let back = ItemContentMatrix::load(&out).unwrap();
        assert_eq!(back.dim, m.dim);
        assert_eq!(back.rows, m.rows);
        assert_eq!(back.feature_names, m.feature_names);
    }
}
