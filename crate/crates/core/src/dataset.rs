//! Plain-text dataset formats.
//!
//! * Sparse matrix: a header line `N d`, then one `row col value` line per
//!   nonzero, 0-based.
//! * Annotations: one line per category, `name: j1 j2 j3 …` (0-based
//!   feature indices).
//! * Ground truth: one `j value` line per nonzero of `θ*`, 0-based.
//! * Labels: one category name per matrix row.
//!
//! Blank lines are ignored everywhere.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{FeatureSet, SparseVector};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(name: &str, source: std::io::Error) -> Error {
    Error::Io {
        path: name.into(),
        source,
    }
}

fn parse_err(file: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        file: file.to_string(),
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, what: &str, file: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(file, line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(file, line, format!("invalid {what} `{tok}`")))
}

/// Numbered non-blank lines.
fn content_lines<'a, R: BufRead + 'a>(reader: R, name: &'a str) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(io_err(name, e))),
        })
}

/// Reads a sparse matrix as one [`SparseVector`] per row.
pub fn read_sparse_matrix<R: BufRead>(reader: R, name: &str) -> Result<Vec<SparseVector>> {
    let mut lines = content_lines(reader, name);
    let (hline, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| parse_err(name, 1, "missing `N d` header"))?;
    let mut toks = header.split_whitespace();
    let rows: usize = parse_field(toks.next(), "row count", name, hline)?;
    let dim: usize = parse_field(toks.next(), "dimension", name, hline)?;
    if toks.next().is_some() {
        return Err(parse_err(name, hline, "header must be exactly `N d`"));
    }

    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    for item in lines {
        let (ln, line) = item?;
        let mut toks = line.split_whitespace();
        let r: usize = parse_field(toks.next(), "row", name, ln)?;
        let c: usize = parse_field(toks.next(), "column", name, ln)?;
        let v: f64 = parse_field(toks.next(), "value", name, ln)?;
        if toks.next().is_some() {
            return Err(parse_err(name, ln, "expected `row col value`"));
        }
        if r >= rows || c >= dim {
            return Err(parse_err(name, ln, format!("entry ({r}, {c}) outside {rows}×{dim}")));
        }
        entries[r].push((c, v));
    }
    entries
        .into_iter()
        .enumerate()
        .map(|(r, e)| SparseVector::new(dim, e).map_err(|err| parse_err(name, 0, format!("row {r}: {err}"))))
        .collect()
}

pub fn read_sparse_matrix_file(path: &Path) -> Result<Vec<SparseVector>> {
    read_sparse_matrix(open(path)?, &path.display().to_string())
}

pub fn write_sparse_matrix<W: Write>(mut out: W, rows: &[SparseVector], dim: usize) -> std::io::Result<()> {
    writeln!(out, "{} {}", rows.len(), dim)?;
    for (r, x) in rows.iter().enumerate() {
        for (c, v) in x.iter() {
            writeln!(out, "{r} {c} {v:?}")?;
        }
    }
    Ok(())
}

pub fn write_sparse_matrix_file(path: &Path, rows: &[SparseVector], dim: usize) -> Result<()> {
    write_sparse_matrix(create(path)?, rows, dim).map_err(|e| io_err(&path.display().to_string(), e))
}

/// Per-category relevant feature sets, in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Annotations {
    pub categories: Vec<(String, FeatureSet)>,
}

impl Annotations {
    pub fn get(&self, name: &str) -> Option<&FeatureSet> {
        self.categories.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

/// Reads an annotation file; indices must be below `dim` and may not repeat
/// within a category.
pub fn read_annotations<R: BufRead>(reader: R, name: &str, dim: usize) -> Result<Annotations> {
    let mut categories: Vec<(String, FeatureSet)> = Vec::new();
    for item in content_lines(reader, name) {
        let (ln, line) = item?;
        let (cat, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(name, ln, "expected `name: j1 j2 …`"))?;
        let cat = cat.trim();
        if cat.is_empty() {
            return Err(parse_err(name, ln, "empty category name"));
        }
        if categories.iter().any(|(n, _)| n == cat) {
            return Err(parse_err(name, ln, format!("category `{cat}` listed twice")));
        }
        let mut set = FeatureSet::new();
        for tok in rest.split_whitespace() {
            let j: usize = parse_field(Some(tok), "feature index", name, ln)?;
            if j >= dim {
                return Err(parse_err(name, ln, format!("feature {j} out of range for dimension {dim}")));
            }
            if !set.insert(j) {
                return Err(parse_err(name, ln, format!("feature {j} repeated")));
            }
        }
        categories.push((cat.to_string(), set));
    }
    Ok(Annotations { categories })
}

pub fn read_annotations_file(path: &Path, dim: usize) -> Result<Annotations> {
    read_annotations(open(path)?, &path.display().to_string(), dim)
}

pub fn write_annotations<W: Write>(mut out: W, annotations: &Annotations) -> std::io::Result<()> {
    for (name, set) in &annotations.categories {
        write!(out, "{name}:")?;
        for j in set.iter() {
            write!(out, " {j}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a `j value` ground-truth file into a vector of dimension `dim`.
pub fn read_ground_truth<R: BufRead>(reader: R, name: &str, dim: usize) -> Result<SparseVector> {
    let mut entries = Vec::new();
    for item in content_lines(reader, name) {
        let (ln, line) = item?;
        let mut toks = line.split_whitespace();
        let j: usize = parse_field(toks.next(), "feature index", name, ln)?;
        let v: f64 = parse_field(toks.next(), "value", name, ln)?;
        if toks.next().is_some() {
            return Err(parse_err(name, ln, "expected `j value`"));
        }
        if j >= dim {
            return Err(parse_err(name, ln, format!("feature {j} out of range for dimension {dim}")));
        }
        entries.push((j, v));
    }
    SparseVector::new(dim, entries).map_err(|e| parse_err(name, 0, e.to_string()))
}

pub fn read_ground_truth_file(path: &Path, dim: usize) -> Result<SparseVector> {
    read_ground_truth(open(path)?, &path.display().to_string(), dim)
}

pub fn write_ground_truth<W: Write>(mut out: W, theta: &SparseVector) -> std::io::Result<()> {
    for (j, v) in theta.iter() {
        writeln!(out, "{j} {v:?}")?;
    }
    Ok(())
}

/// Reads one category name per line.
pub fn read_labels<R: BufRead>(reader: R, name: &str) -> Result<Vec<String>> {
    content_lines(reader, name)
        .map(|item| item.map(|(_, l)| l.trim().to_string()))
        .collect()
}

pub fn read_labels_file(path: &Path) -> Result<Vec<String>> {
    read_labels(open(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_matrix() {
        let text = "3 4\n0 1 0.5\n2 3 -1\n\n0 0 2\n";
        let rows = read_sparse_matrix(text.as_bytes(), "m").unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].indices(), &[0, 1]);
        assert_eq!(rows[1].nnz(), 0);
        assert_eq!(rows[2].get(3), -1.0);
    }

    #[test]
    fn matrix_errors_name_the_line() {
        let err = read_sparse_matrix("2 2\n0 0 1\n5 0 1\n".as_bytes(), "m").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(read_sparse_matrix("".as_bytes(), "m").is_err());
        assert!(read_sparse_matrix("2 2\n0 0 x\n".as_bytes(), "m").is_err());
        assert!(read_sparse_matrix("2 2\n0 0 1\n0 0 2\n".as_bytes(), "m").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let rows = vec![
            SparseVector::new(5, [(0, 0.1), (4, 1.0 / 3.0)]).unwrap(),
            SparseVector::new(5, [(2, -7.25)]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_sparse_matrix(&mut buf, &rows, 5).unwrap();
        assert_eq!(read_sparse_matrix(buf.as_slice(), "m").unwrap(), rows);
    }

    #[test]
    fn reads_annotations() {
        let text = "rec.autos: 3 1 7\nsci.med:\n";
        let a = read_annotations(text.as_bytes(), "a", 10).unwrap();
        assert_eq!(a.get("rec.autos").unwrap().as_slice(), &[1, 3, 7]);
        assert!(a.get("sci.med").unwrap().is_empty());
        assert!(read_annotations("x: 10\n".as_bytes(), "a", 10).is_err());
        assert!(read_annotations("x: 1 1\n".as_bytes(), "a", 10).is_err());
        assert!(read_annotations("x 1\n".as_bytes(), "a", 10).is_err());
        let mut buf = Vec::new();
        write_annotations(&mut buf, &a).unwrap();
        assert_eq!(read_annotations(buf.as_slice(), "a", 10).unwrap(), a);
    }

    #[test]
    fn reads_ground_truth_and_labels() {
        let theta = read_ground_truth("4 0.5\n1 -2\n".as_bytes(), "g", 6).unwrap();
        assert_eq!(theta.indices(), &[1, 4]);
        assert!(read_ground_truth("6 1\n".as_bytes(), "g", 6).is_err());
        let labels = read_labels("a\n b \n\nc\n".as_bytes(), "l").unwrap();
        assert_eq!(labels, vec!["a", "b", "c"]);
    }
}
