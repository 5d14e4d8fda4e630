//! CSV writing with a named header row. Floats use Rust's shortest
//! round-trip formatting so identical runs produce identical bytes.

use std::fmt::Write as _;

pub struct Csv {
    header: Vec<String>,
    buf: String,
}

impl Csv {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Self {
        let header: Vec<String> = columns.into_iter().map(Into::into).collect();
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { header, buf }
    }

    pub fn row(&mut self, cells: &[CsvCell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                CsvCell::Float(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                CsvCell::Int(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                CsvCell::Str(s) => {
                    let _ = write!(self.buf, "{s}");
                }
                CsvCell::Empty => {}
            }
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub enum CsvCell {
    Float(f64),
    Int(i64),
    Str(String),
    Empty,
}

pub fn f(v: f64) -> CsvCell {
    CsvCell::Float(v)
}

pub fn i(v: i64) -> CsvCell {
    CsvCell::Int(v)
}

pub fn s(v: impl Into<String>) -> CsvCell {
    CsvCell::Str(v.into())
}
