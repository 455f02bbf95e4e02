//! Self-describing text container for model and matrix persistence.
//!
//! Every `f64` is stored as its IEEE-754 bit pattern in lowercase hex
//! (`f64::to_bits`, 16 digits), which makes round-trips bitwise exact and
//! independent of machine endianness. Layout:
//!
//! ```text
//! autosvd-store v1
//! encoding f64-bits-hex
//! meta <key> <value>
//! block <name> <rows> <cols>
//! <cols hex words per row, space separated>
//! ...
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &str = "autosvd-store v1";
const ENCODING: &str = "encoding f64-bits-hex";

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rows * cols` values.
    pub data: Vec<f64>,
}

/// An ordered set of string metadata entries and named f64 blocks.
#[derive(Debug, Clone, Default)]
pub struct Store {
    meta: Vec<(String, String)>,
    blocks: Vec<(String, Block)>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn meta_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .meta(key)
            .ok_or_else(|| Error::Config(format!("store is missing meta key '{key}'")))?;
        raw.parse()
            .map_err(|_| Error::Config(format!("store meta '{key}' has unparseable value '{raw}'")))
    }

    pub fn push_block(&mut self, name: &str, rows: usize, cols: usize, data: Vec<f64>) {
        assert_eq!(
            rows * cols,
            data.len(),
            "block {name}: data length mismatch"
        );
        self.blocks
            .push((name.to_string(), Block { rows, cols, data }));
    }

    pub fn block(&self, name: &str) -> Result<&Block> {
        self.blocks
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b)
            .ok_or_else(|| Error::Config(format!("store is missing block '{name}'")))
    }

    pub fn has_block(&self, name: &str) -> bool {
        self.blocks.iter().any(|(n, _)| n == name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(ENCODING);
        out.push('\n');
        for (k, v) in &self.meta {
            out.push_str(&format!("meta {k} {v}\n"));
        }
        for (name, b) in &self.blocks {
            out.push_str(&format!("block {name} {} {}\n", b.rows, b.cols));
            for r in 0..b.rows {
                let row = &b.data[r * b.cols..(r + 1) * b.cols];
                let words: Vec<String> = row
                    .iter()
                    .map(|v| format!("{:016x}", v.to_bits()))
                    .collect();
                out.push_str(&words.join(" "));
                out.push('\n');
            }
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };

        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => return Err(parse_err(1, format!("expected header '{MAGIC}'"))),
        }
        match lines.next() {
            Some((_, l)) if l == ENCODING => {}
            _ => return Err(parse_err(2, format!("expected '{ENCODING}'"))),
        }

        let mut store = Store::new();
        while let Some((idx, line)) = lines.next() {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(2, ' ');
            match parts.next() {
                Some("meta") => {
                    let rest = parts.next().unwrap_or("");
                    let (k, v) = rest
                        .split_once(' ')
                        .ok_or_else(|| parse_err(lineno, "malformed meta line".into()))?;
                    store.set_meta(k, v);
                }
                Some("block") => {
                    let rest = parts.next().unwrap_or("");
                    let fields: Vec<&str> = rest.split(' ').collect();
                    if fields.len() != 3 {
                        return Err(parse_err(lineno, "malformed block header".into()));
                    }
                    let name = fields[0].to_string();
                    let rows: usize = fields[1]
                        .parse()
                        .map_err(|_| parse_err(lineno, "bad row count".into()))?;
                    let cols: usize = fields[2]
                        .parse()
                        .map_err(|_| parse_err(lineno, "bad col count".into()))?;
                    let mut data = Vec::with_capacity(rows * cols);
                    for _ in 0..rows {
                        let (ridx, row_line) = lines
                            .next()
                            .ok_or_else(|| parse_err(lineno, "truncated block".into()))?;
                        let mut n = 0;
                        for word in row_line.split(' ') {
                            let bits = u64::from_str_radix(word, 16).map_err(|_| {
                                parse_err(ridx + 1, format!("bad hex word '{word}'"))
                            })?;
                            data.push(f64::from_bits(bits));
                            n += 1;
                        }
                        if n != cols {
                            return Err(parse_err(
                                ridx + 1,
                                format!("expected {cols} values, found {n}"),
                            ));
                        }
                    }
                    store.blocks.push((name, Block { rows, cols, data }));
                }
                other => {
                    return Err(parse_err(
                        lineno,
                        format!("unknown directive '{}'", other.unwrap_or("")),
                    ))
                }
            }
        }
        Ok(store)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(store: &Store) -> Store {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.mat");
        store.write(&path).unwrap();
        Store::read(&path).unwrap()
    }

    #[test]
    fn meta_and_blocks_roundtrip() {
        let mut s = Store::new();
        s.set_meta("kind", "demo");
        s.set_meta("k", 10);
        s.push_block(
            "w",
            2,
            3,
            vec![1.0, -0.0, f64::MIN_POSITIVE, 3.5e300, -1e-308, 0.25],
        );
        let back = roundtrip(&s);
        assert_eq!(back.meta("kind"), Some("demo"));
        assert_eq!(back.meta_parsed::<usize>("k").unwrap(), 10);
        let b = back.block("w").unwrap();
        assert_eq!((b.rows, b.cols), (2, 3));
        for (a, e) in b.data.iter().zip(s.block("w").unwrap().data.iter()) {
            assert_eq!(a.to_bits(), e.to_bits());
        }
    }

    #[test]
    fn missing_block_is_reported() {
        let s = Store::new();
        assert!(matches!(s.block("nope"), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_foreign_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x");
        std::fs::write(&path, "not a store\n").unwrap();
        assert!(matches!(Store::read(&path), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn bitwise_roundtrip(values in proptest::collection::vec(any::<f64>(), 1..64)) {
            let cols = values.len();
            let mut s = Store::new();
            s.push_block("v", 1, cols, values.clone());
            let back = roundtrip(&s);
            let b = back.block("v").unwrap();
            for (a, e) in b.data.iter().zip(values.iter()) {
                prop_assert_eq!(a.to_bits(), e.to_bits());
            }
        }
    }
}
