//! Time-indexed record of a run, stored row-major.

use std::io::{self, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    /// Comment lines written before the column header (without `#`).
    header: Vec<String>,
    columns: Vec<String>,
    data: Vec<f64>,
}

impl TrajectoryLog {
    /// `columns[0]` must be `t`.
    pub fn new(columns: Vec<String>) -> Self {
        debug_assert_eq!(columns.first().map(String::as_str), Some("t"));
        Self { header: Vec::new(), columns, data: Vec::new() }
    }

    /// Builds a log from columns of equal length; the first is time.
    pub fn from_columns(named: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let len = named.first().map_or(0, |c| c.1.len());
        if let Some((name, c)) = named.iter().find(|c| c.1.len() != len) {
            return Err(Error::Mismatch(format!("column `{name}` has {} samples, expected {len}", c.len())));
        }
        let mut log = Self::new(named.iter().map(|c| c.0.clone()).collect());
        for k in 0..len {
            log.push(named.iter().map(|c| c.1[k]))?;
        }
        Ok(log)
    }

    pub fn set_header(&mut self, text: &str) {
        self.header = text.lines().map(|l| l.strip_prefix('#').unwrap_or(l).to_string()).collect();
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.width().max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn push(&mut self, row: impl IntoIterator<Item = f64>) -> Result<()> {
        let before = self.data.len();
        self.data.extend(row);
        let found = self.data.len() - before;
        if found != self.width() {
            self.data.truncate(before);
            return Err(Error::DimensionMismatch { what: "log row", expected: self.width(), found });
        }
        Ok(())
    }

    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.width();
        &self.data[k * w..(k + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.width().max(1))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows().map(|r| r[j]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows().map(|r| r[0]).collect()
    }

    /// Every `every`-th row, always keeping the first.
    pub fn decimated(&self, every: usize) -> Self {
        let every = every.max(1);
        let mut out = Self { header: self.header.clone(), columns: self.columns.clone(), data: Vec::new() };
        for (k, r) in self.rows().enumerate() {
            if k % every == 0 {
                out.data.extend_from_slice(r);
            }
        }
        out
    }

    /// Header comments, a column row, then one row per sample in
    /// `{:.15e}` notation.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for h in &self.header {
            writeln!(w, "#{h}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for r in self.rows() {
            line.clear();
            for (j, v) in r.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:.15e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}
