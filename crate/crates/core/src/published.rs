//! Tables transcribed from print, embedded at build time and checked
//! against their SHA-256 digests before use.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::ExactRational;

const APPENDIX1: &str = include_str!("../data/appendix1.txt");
const APPENDIX2: &str = include_str!("../data/appendix2.csv");
const TABLE1: &str = include_str!("../data/table1.csv");
const EXCEPTIONS: &str = include_str!("../data/exceptions_n2.txt");
const SHA256SUMS: &str = include_str!("../data/SHA256SUMS");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{file}: digest {actual} does not match recorded {expected}")]
    Digest {
        file: String,
        expected: String,
        actual: String,
    },
    #[error("{file}: no recorded digest")]
    MissingDigest { file: String },
    #[error("{file} line {line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
}

fn files() -> [(&'static str, &'static str); 4] {
    [
        ("appendix1.txt", APPENDIX1),
        ("appendix2.csv", APPENDIX2),
        ("table1.csv", TABLE1),
        ("exceptions_n2.txt", EXCEPTIONS),
    ]
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Verifies every embedded table against `SHA256SUMS`.
pub fn verify_digests() -> Result<(), DataError> {
    let recorded: BTreeMap<&str, &str> = SHA256SUMS
        .lines()
        .filter_map(|l| l.split_once("  "))
        .map(|(h, f)| (f.trim(), h.trim()))
        .collect();
    for (file, body) in files() {
        let expected = recorded
            .get(file)
            .ok_or_else(|| DataError::MissingDigest { file: file.into() })?;
        let actual = sha256_hex(body.as_bytes());
        if actual != *expected {
            return Err(DataError::Digest {
                file: file.into(),
                expected: expected.to_string(),
                actual,
            });
        }
    }
    Ok(())
}

fn parse_err(file: &str, line: usize, msg: impl Into<String>) -> DataError {
    DataError::Parse {
        file: file.into(),
        line,
        msg: msg.into(),
    }
}

/// `m: q q ...` lines; `#` starts a comment.
fn parse_per_m(file: &str, body: &str) -> Result<BTreeMap<u32, Vec<u64>>, DataError> {
    let mut out = BTreeMap::new();
    for (i, raw) in body.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (m, qs) = line
            .split_once(':')
            .ok_or_else(|| parse_err(file, i + 1, "missing ':'"))?;
        let m: u32 = m
            .trim()
            .parse()
            .map_err(|_| parse_err(file, i + 1, "bad m"))?;
        let qs: Vec<u64> = qs
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(file, i + 1, format!("bad q {t:?}"))))
            .collect::<Result<_, _>>()?;
        out.entry(m).or_insert_with(Vec::new).extend(qs);
    }
    Ok(out)
}

/// Pairs `(q, m)` listed as failing the main condition, keyed by `m` in
/// printed order.
pub fn appendix1() -> Result<BTreeMap<u32, Vec<u64>>, DataError> {
    verify_digests()?;
    parse_per_m("appendix1.txt", APPENDIX1)
}

/// Pairs left open by the sieve, keyed by `m`.
pub fn exceptions_n2() -> Result<BTreeMap<u32, Vec<u64>>, DataError> {
    verify_digests()?;
    parse_per_m("exceptions_n2.txt", EXCEPTIONS)
}

/// One printed sieve certificate, with the decimal strings kept verbatim.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ListedCertificate {
    pub m: u32,
    pub sr_no: u32,
    pub q: u64,
    pub l: u64,
    pub s: usize,
    pub delta_gt: String,
    pub big_delta_lt: String,
}

impl ListedCertificate {
    pub fn delta(&self) -> ExactRational {
        self.delta_gt.parse().expect("validated at load")
    }

    pub fn big_delta(&self) -> ExactRational {
        self.big_delta_lt.parse().expect("validated at load")
    }
}

fn csv_rows<'a>(file: &'a str, body: &'a str, width: usize) -> impl Iterator<Item = Result<(usize, Vec<&'a str>), DataError>> + 'a {
    body.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()).map(move |(i, l)| {
        let cols: Vec<&str> = l.split(',').map(str::trim).collect();
        if cols.len() != width {
            Err(parse_err(file, i + 1, format!("expected {width} columns")))
        } else {
            Ok((i + 1, cols))
        }
    })
}

fn field<T: std::str::FromStr>(file: &str, line: usize, s: &str) -> Result<T, DataError> {
    s.parse()
        .map_err(|_| parse_err(file, line, format!("bad field {s:?}")))
}

fn decimal(file: &str, line: usize, s: &str) -> Result<String, DataError> {
    s.parse::<ExactRational>()
        .map_err(|e| parse_err(file, line, e))?;
    Ok(s.to_string())
}

pub fn appendix2() -> Result<Vec<ListedCertificate>, DataError> {
    verify_digests()?;
    const F: &str = "appendix2.csv";
    csv_rows(F, APPENDIX2, 7)
        .map(|r| {
            let (line, c) = r?;
            Ok(ListedCertificate {
                m: field(F, line, c[0])?,
                sr_no: field(F, line, c[1])?,
                q: field(F, line, c[2])?,
                l: field(F, line, c[3])?,
                s: field(F, line, c[4])?,
                delta_gt: decimal(F, line, c[5])?,
                big_delta_lt: decimal(F, line, c[6])?,
            })
        })
        .collect()
}

/// One printed worst-case window row.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ListedWindow {
    pub sr_no: u32,
    pub a: usize,
    pub b: usize,
    pub w_l: u64,
    pub delta_gt: String,
    pub big_delta_lt: String,
    pub bound_lt: u64,
}

pub fn table1() -> Result<Vec<ListedWindow>, DataError> {
    verify_digests()?;
    const F: &str = "table1.csv";
    csv_rows(F, TABLE1, 7)
        .map(|r| {
            let (line, c) = r?;
            Ok(ListedWindow {
                sr_no: field(F, line, c[0])?,
                a: field(F, line, c[1])?,
                b: field(F, line, c[2])?,
                w_l: field(F, line, c[3])?,
                delta_gt: decimal(F, line, c[4])?,
                big_delta_lt: decimal(F, line, c[5])?,
                bound_lt: field(F, line, c[6])?,
            })
        })
        .collect()
}
