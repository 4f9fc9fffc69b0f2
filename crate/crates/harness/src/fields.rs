//! Plot-ready CSV tables of cell values.
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a
//! table back reproduces every value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use hfvs::physics::Physics;
use hfvs::GridField;

use crate::{io_error, HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FieldTable {
    /// Cell centres followed by the physics' output columns.
    pub fn from_field<P: Physics<M>, const M: usize>(physics: &P, field: &GridField<M>) -> Self {
        let two_d = field.spec.is_2d();
        let mut columns = vec!["x".to_owned()];
        if two_d {
            columns.push("y".to_owned());
        }
        columns.extend(physics.output_columns().iter().map(|c| (*c).to_owned()));
        let rows = field
            .interior()
            .map(|(i, j, w)| {
                let mut row = vec![field.spec.x_center(i as isize)];
                if two_d {
                    row.push(field.spec.y_center(j as isize));
                }
                row.extend(physics.output_row(w));
                row
            })
            .collect();
        Self { columns, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Appends the columns of `other`, prefixed, skipping its coordinates.
    /// Both tables must describe the same cells.
    pub fn append_prefixed(&mut self, prefix: &str, other: &FieldTable) -> Result<()> {
        if other.rows.len() != self.rows.len() {
            return Err(HarnessError::Usage(format!(
                "cannot overlay {} rows onto {}",
                other.rows.len(),
                self.rows.len()
            )));
        }
        let skip = other.columns.iter().take_while(|c| *c == "x" || *c == "y").count();
        self.columns.extend(other.columns[skip..].iter().map(|c| format!("{prefix}:{c}")));
        for (row, extra) in self.rows.iter_mut().zip(&other.rows) {
            row.extend_from_slice(&extra[skip..]);
        }
        Ok(())
    }

    /// Only the coordinate columns.
    pub fn coordinates(&self) -> FieldTable {
        let k = self.columns.iter().take_while(|c| *c == "x" || *c == "y").count();
        FieldTable {
            columns: self.columns[..k].to_vec(),
            rows: self.rows.iter().map(|r| r[..k].to_vec()).collect(),
        }
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| HarnessError::Usage(format!("row {}: bad number `{s}`: {e}", line + 2)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(io_error(path))?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_error(path))?;
        Self::read_from(std::io::BufReader::new(file))
    }
}
