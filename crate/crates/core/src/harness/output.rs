//! CSV persistence for records, summaries and bound curves.

use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::summary::{RegretRecord, SummaryRow};
use crate::error::{Error, Result};

/// Theoretical regret bounds at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub t: u64,
    pub oful_bound: f64,
    pub ff_bound: f64,
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<csv>".into(),
        source,
    })
}

fn read_rows<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Header: `trial,algorithm,t,action_index,explored,instant_regret,cumulative_regret,discovered_count`.
pub fn write_records<W: Write>(out: W, records: &[RegretRecord]) -> Result<()> {
    write_rows(out, records)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RegretRecord>> {
    read_rows(input)
}

/// Header: `algorithm,t,mean_cum_regret,stderr,ci95_halfwidth`.
pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    read_rows(input)
}

/// Header: `t,oful_bound,ff_bound`.
pub fn write_bounds<W: Write>(out: W, rows: &[BoundRow]) -> Result<()> {
    write_rows(out, rows)
}

pub fn write_records_file(path: &Path, records: &[RegretRecord]) -> Result<()> {
    write_records(std::io::BufWriter::new(create(path)?), records)
}

pub fn read_records_file(path: &Path) -> Result<Vec<RegretRecord>> {
    read_records(std::io::BufReader::new(open(path)?))
}

pub fn write_summary_file(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_summary(std::io::BufWriter::new(create(path)?), rows)
}

pub fn read_summary_file(path: &Path) -> Result<Vec<SummaryRow>> {
    read_summary(std::io::BufReader::new(open(path)?))
}

pub fn write_bounds_file(path: &Path, rows: &[BoundRow]) -> Result<()> {
    write_bounds(std::io::BufWriter::new(create(path)?), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers_match_the_documented_schema() {
        let rec = RegretRecord {
            trial: 3,
            algorithm: "ETC(T0=64)".into(),
            t: 7,
            action_index: 12,
            explored: true,
            instant_regret: 0.1,
            cumulative_regret: 0.30000000000000004,
            discovered_count: 2,
        };
        let mut buf = Vec::new();
        write_records(&mut buf, std::slice::from_ref(&rec)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "trial,algorithm,t,action_index,explored,instant_regret,cumulative_regret,discovered_count\n"
        ));
        assert_eq!(read_records(buf.as_slice()).unwrap(), vec![rec]);

        let row = SummaryRow {
            algorithm: "OFUL".into(),
            t: 1,
            mean_cum_regret: 1.0 / 3.0,
            stderr: 0.0,
            ci95_halfwidth: 0.0,
        };
        let mut buf = Vec::new();
        write_summary(&mut buf, std::slice::from_ref(&row)).unwrap();
        assert!(buf.starts_with(b"algorithm,t,mean_cum_regret,stderr,ci95_halfwidth\n"));
        assert_eq!(read_summary(buf.as_slice()).unwrap(), vec![row]);
    }
}
