//! Matrix file formats.
//!
//! `dense-text`: a header line `rows cols`, then `rows * cols` whitespace
//! separated entries written as `re`, `re+imi` or `re-imi`. A `#` starts a
//! comment that runs to the end of the line.
//!
//! `block-json`: `{"N": .., "n": .., "blocks": [[block_11, ...], ...]}` where each
//! block is an `n` by `n` array of `[re, im]` pairs.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::block::{flatten, BlockMatrix};
use crate::dense::{DenseMatrix, C64};
use crate::error::{BlockDetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixFormat {
    DenseText,
    BlockJson,
}

impl MatrixFormat {
    /// `.json` files and documents starting with `{` are block-json.
    pub fn detect(path: &Path, contents: &str) -> Self {
        let json_ext = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if json_ext || contents.trim_start().starts_with('{') {
            MatrixFormat::BlockJson
        } else {
            MatrixFormat::DenseText
        }
    }
}

/// A parsed input file. Block files keep their declared partition.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Dense(DenseMatrix),
    Blocks(BlockMatrix),
}

impl MatrixFile {
    pub fn format(&self) -> MatrixFormat {
        match self {
            MatrixFile::Dense(_) => MatrixFormat::DenseText,
            MatrixFile::Blocks(_) => MatrixFormat::BlockJson,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixFile::Dense(m) => m.rows(),
            MatrixFile::Blocks(b) => b.dim(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MatrixFile::Dense(m) => m.clone(),
            MatrixFile::Blocks(b) => flatten(b),
        }
    }

    pub fn parse(contents: &str, format: MatrixFormat) -> Result<Self> {
        match format {
            MatrixFormat::DenseText => parse_dense_text(contents).map(MatrixFile::Dense),
            MatrixFormat::BlockJson => parse_block_json(contents).map(MatrixFile::Blocks),
        }
    }

    /// Reads `path`, detecting the format unless one is given.
    pub fn read(path: &Path, format: Option<MatrixFormat>) -> Result<Self> {
        let contents = std::fs::read_to_string(path)
            .map_err(|e| BlockDetError::Parse(format!("cannot read {}: {e}", path.display())))?;
        let format = format.unwrap_or_else(|| MatrixFormat::detect(path, &contents));
        Self::parse(&contents, format)
    }
}

/// Parses `re`, `re+imi`, `re-imi`, `imi`, `i` and `-i`.
pub fn parse_complex(token: &str) -> Result<C64> {
    let bad = || BlockDetError::Parse(format!("malformed complex entry '{token}'"));
    let number = |s: &str| -> Result<f64> {
        // reject "inf"/"nan" spellings so the only non-finite input is overflow
        if s.chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
        {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    let Some(body) = token.strip_suffix('i') else {
        return Ok(C64::new(number(token)?, 0.0));
    };
    // the sign that starts the imaginary part is the last one not following an exponent marker
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (number(&body[..i])?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => number(s)?,
    };
    Ok(C64::new(re, im))
}

pub fn parse_dense_text(contents: &str) -> Result<DenseMatrix> {
    let mut tokens = contents
        .lines()
        .map(|l| l.split_once('#').map_or(l, |(before, _)| before))
        .flat_map(str::split_whitespace);
    let mut header = |what: &str| -> Result<usize> {
        let t = tokens
            .next()
            .ok_or_else(|| BlockDetError::Parse(format!("missing {what} in header")))?;
        usize::from_str(t).map_err(|_| BlockDetError::Parse(format!("bad {what} '{t}' in header")))
    };
    let rows = header("row count")?;
    let cols = header("column count")?;
    if rows != cols {
        return Err(BlockDetError::DimensionMismatch(format!(
            "matrix must be square, header says {rows}x{cols}"
        )));
    }
    if rows == 0 {
        return Err(BlockDetError::DimensionMismatch("matrix is empty".into()));
    }
    let entries = tokens.map(parse_complex).collect::<Result<Vec<_>>>()?;
    if entries.len() != rows * cols {
        return Err(BlockDetError::DimensionMismatch(format!(
            "header declares {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    DenseMatrix::new(rows, cols, entries)
}

/// Shortest round-trip decimal form, so parsing the output is bitwise exact.
fn format_complex(z: C64) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        format!("{:?}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

pub fn write_dense_text(m: &DenseMatrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&z| format_complex(z)).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    #[serde(rename = "N")]
    block_count: usize,
    n: usize,
    blocks: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
}

pub fn parse_block_json(contents: &str) -> Result<BlockMatrix> {
    let doc: BlockJson = serde_json::from_str(contents)
        .map_err(|e| BlockDetError::Parse(format!("block-json: {e}")))?;
    let (nb, n) = (doc.block_count, doc.n);
    if nb == 0 || n == 0 {
        return Err(BlockDetError::DimensionMismatch(
            "N and n must be positive".into(),
        ));
    }
    if doc.blocks.len() != nb {
        return Err(BlockDetError::DimensionMismatch(format!(
            "N = {nb} but blocks has {} block rows",
            doc.blocks.len()
        )));
    }
    let mut blocks = Vec::with_capacity(nb * nb);
    for (bi, block_row) in doc.blocks.iter().enumerate() {
        if block_row.len() != nb {
            return Err(BlockDetError::DimensionMismatch(format!(
                "block row {} has {} blocks, expected {nb}",
                bi + 1,
                block_row.len()
            )));
        }
        for (bj, block) in block_row.iter().enumerate() {
            let shape_ok = block.len() == n && block.iter().all(|r| r.len() == n);
            if !shape_ok {
                return Err(BlockDetError::DimensionMismatch(format!(
                    "block ({}, {}) is not {n}x{n}",
                    bi + 1,
                    bj + 1
                )));
            }
            let entries = block
                .iter()
                .flatten()
                .map(|&[re, im]| C64::new(re, im))
                .collect();
            blocks.push(DenseMatrix::new(n, n, entries)?);
        }
    }
    BlockMatrix::from_blocks(nb, blocks)
}

pub fn write_block_json(bm: &BlockMatrix) -> String {
    let nb = bm.block_count();
    let blocks = (1..=nb)
        .map(|i| {
            (1..=nb)
                .map(|j| {
                    let b = bm.block(i, j);
                    (0..b.rows())
                        .map(|r| b.row(r).iter().map(|z| [z.re, z.im]).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let doc = BlockJson {
        block_count: nb,
        n: bm.block_size(),
        blocks,
    };
    serde_json::to_string(&doc).expect("finite entries serialize")
}
