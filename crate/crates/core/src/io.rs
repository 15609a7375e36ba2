//! Plain CSV output with full-precision floats.

use std::io::{self, Write};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A cell of a CSV row.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

pub fn write_csv<W, R>(mut out: W, header: &[&str], rows: impl IntoIterator<Item = R>) -> io::Result<()>
where
    W: Write,
    R: AsRef<[Cell]>,
{
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row
            .as_ref()
            .iter()
            .map(|c| match *c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(x) => fmt_float(x),
                Cell::Text(t) => t.to_string(),
            })
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()
}
