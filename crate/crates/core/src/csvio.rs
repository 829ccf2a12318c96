//! CSV ingestion and export for quarterly frames.
//!
//! Layout: UTF-8, comma separated, one header row, a date column in
//! `YYYYQn` form and `.` as the decimal point. Rows must be strictly
//! consecutive quarters. Row numbers in errors count the header as row 1.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::{align, Frame, QuarterDate, Series};

/// Load `value_columns` (all non-date columns when empty) from a CSV file.
pub fn load_csv(path: impl AsRef<Path>, date_column: &str, value_columns: &[&str]) -> Result<Frame> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(file, date_column, value_columns)
}

pub fn read_csv<R: Read>(reader: R, date_column: &str, value_columns: &[&str]) -> Result<Frame> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Format {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Lookup(name.to_string()))
    };
    let date_idx = find(date_column)?;
    let wanted: Vec<String> = if value_columns.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != date_idx)
            .map(|(_, h)| h.to_string())
            .collect()
    } else {
        value_columns.iter().map(|s| s.to_string()).collect()
    };
    let idx: Vec<usize> = wanted.iter().map(|w| find(w)).collect::<Result<_>>()?;

    let mut start: Option<QuarterDate> = None;
    let mut prev: Option<QuarterDate> = None;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); idx.len()];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Format {
            row,
            message: e.to_string(),
        })?;
        let raw_date = rec.get(date_idx).unwrap_or("");
        let date: QuarterDate = raw_date.parse().map_err(|_| Error::Format {
            row,
            message: format!("unparseable quarter date `{raw_date}`"),
        })?;
        if let Some(p) = prev {
            if date <= p {
                return Err(Error::Format {
                    row,
                    message: format!("date {date} is not after {p} (duplicate or out of order)"),
                });
            }
            if date != p.succ() {
                return Err(Error::Format {
                    row,
                    message: format!("gap: expected {} after {p}, found {date}", p.succ()),
                });
            }
        } else {
            start = Some(date);
        }
        prev = Some(date);
        for (col, &j) in cols.iter_mut().zip(&idx) {
            let cell = rec.get(j).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| Error::Format {
                row,
                message: format!("unparseable number `{cell}` in column `{}`", &headers[j]),
            })?;
            if !v.is_finite() {
                return Err(Error::Format {
                    row,
                    message: format!("non-finite value in column `{}`", &headers[j]),
                });
            }
            col.push(v);
        }
    }
    let start = start.ok_or_else(|| Error::Format {
        row: 2,
        message: "no data rows".into(),
    })?;
    let series = wanted
        .into_iter()
        .zip(cols)
        .map(|(name, v)| Series::new(name, start, v))
        .collect::<Result<Vec<_>>>()?;
    align(series)
}

/// Write a frame with the date column first. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(frame: &Frame, date_column: &str, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![date_column.to_string()];
    header.extend(frame.names().map(str::to_string));
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..frame.len() {
        let mut rec = vec![frame.date_at(i).to_string()];
        rec.extend(frame.columns().iter().map(|c| c.values()[i].to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let f = read_csv("date,cpi\n2009Q1,100\n2009Q2,101".as_bytes(), "date", &["cpi"]).unwrap();
        let s = f.column("cpi").unwrap();
        assert_eq!(s.values(), &[100.0, 101.0]);
        assert_eq!(s.start().to_string(), "2009Q1");
    }

    #[test]
    fn gap_reports_row() {
        let e = read_csv(
            "date,cpi\n2009Q1,1\n2009Q2,2\n2009Q4,3\n".as_bytes(),
            "date",
            &[],
        )
        .unwrap_err();
        assert!(matches!(e, Error::Format { row: 4, .. }), "{e}");
    }

    #[test]
    fn duplicate_reports_row() {
        let e = read_csv("date,cpi\n2009Q1,1\n2009Q1,2\n".as_bytes(), "date", &[]).unwrap_err();
        assert!(matches!(e, Error::Format { row: 3, .. }));
    }

    #[test]
    fn bad_date_and_number() {
        let e = read_csv("date,cpi\n2009-03,1\n".as_bytes(), "date", &[]).unwrap_err();
        assert!(matches!(e, Error::Format { row: 2, .. }));
        let e = read_csv("date,cpi\n2009Q1,abc\n".as_bytes(), "date", &[]).unwrap_err();
        assert!(matches!(e, Error::Format { row: 2, .. }));
        let e = read_csv("date,cpi\n2009Q1,\n".as_bytes(), "date", &[]).unwrap_err();
        assert!(matches!(e, Error::Format { .. }));
    }

    #[test]
    fn missing_column() {
        let e = read_csv("date,cpi\n2009Q1,1\n".as_bytes(), "date", &["gdp"]).unwrap_err();
        assert_eq!(e, Error::Lookup("gdp".into()));
    }

    #[test]
    fn round_trip() {
        let text = "date,a,b\n2009Q3,0.1,-2.5\n2009Q4,1e-7,3\n2010Q1,0.30000000000000004,4\n";
        let f = read_csv(text.as_bytes(), "date", &[]).unwrap();
        let mut out = Vec::new();
        write_csv(&f, "date", &mut out).unwrap();
        let g = read_csv(out.as_slice(), "date", &[]).unwrap();
        assert_eq!(f, g);
    }
}
