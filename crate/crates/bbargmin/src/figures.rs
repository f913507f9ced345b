//! Plot data for the zoom windows and the certificate-2 samples.
//!
//! The file is a window table, header `level,k,value`, with one contiguous
//! block per level. When certificate-2 samples exist, a blank line and a
//! second table, header `level,interval_k,m`, follow. Values are written in
//! shortest round-trip decimal form; lines end in LF.

use std::io::{BufRead, Write};

use bbargmin_core::RunResult;

use crate::error::{Error, Result};

/// Header of the window table.
pub const WINDOW_HEADER: &str = "level,k,value";
/// Header of the sub-interval minimum table.
pub const M_HEADER: &str = "level,interval_k,m";

/// Writes the window arrays and any certificate-2 samples of `result`.
///
/// Returns the number of data rows written across both tables.
pub fn write_figure_csv<W: Write>(result: &RunResult, sink: W) -> Result<usize> {
    let mut out = std::io::BufWriter::new(sink);
    let mut rows = 0;
    writeln!(out, "{WINDOW_HEADER}")?;
    for (i, window) in result.level_arrays.iter().enumerate() {
        for (k, v) in window.iter().enumerate() {
            writeln!(out, "{},{k},{v:?}", i + 1)?;
            rows += 1;
        }
    }
    if result.cert2_samples.iter().any(|s| !s.is_empty()) {
        writeln!(out)?;
        writeln!(out, "{M_HEADER}")?;
        for (i, samples) in result.cert2_samples.iter().enumerate() {
            for s in samples {
                writeln!(out, "{},{},{:?}", i + 1, s.k, s.m)?;
                rows += 1;
            }
        }
    }
    out.flush()?;
    Ok(rows)
}

/// Parsed figure file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureData {
    /// `(level, k, value)` rows of the window table.
    pub windows: Vec<(u32, usize, f64)>,
    /// `(level, interval_k, m)` rows of the sub-interval table.
    pub minima: Vec<(u32, usize, f64)>,
}

impl FigureData {
    /// Number of distinct levels in the window table.
    pub fn window_levels(&self) -> usize {
        let mut levels: Vec<u32> = self.windows.iter().map(|r| r.0).collect();
        levels.dedup();
        levels.len()
    }
}

/// Reads a file produced by [`write_figure_csv`].
pub fn read_figure_csv<R: BufRead>(source: R) -> Result<FigureData> {
    let mut data = FigureData::default();
    let mut table: Option<&str> = None;
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        match line.as_str() {
            "" => table = None,
            WINDOW_HEADER if table.is_none() => table = Some(WINDOW_HEADER),
            M_HEADER if table.is_none() => table = Some(M_HEADER),
            row => {
                let bad = || Error::Invalid(format!("figure line {}: {row:?}", lineno + 1));
                let mut f = row.split(',');
                let (Some(a), Some(b), Some(c), None) = (f.next(), f.next(), f.next(), f.next())
                else {
                    return Err(bad());
                };
                let rec = (
                    a.parse().map_err(|_| bad())?,
                    b.parse().map_err(|_| bad())?,
                    c.parse().map_err(|_| bad())?,
                );
                match table {
                    Some(WINDOW_HEADER) => data.windows.push(rec),
                    Some(_) => data.minima.push(rec),
                    None => return Err(bad()),
                }
            }
        }
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bbargmin_core::{run_coupled, LazyBridgePath, RunParams};

    #[test]
    fn round_trip_is_exact() {
        let mut p = RunParams::new(7, 4);
        p.certificate2 = true;
        let r = run_coupled(&p, &mut LazyBridgePath::seeded(11)).unwrap();
        let mut buf = Vec::new();
        let rows = write_figure_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        let back = read_figure_csv(buf.as_slice()).unwrap();
        assert_eq!(back.windows.len() + back.minima.len(), rows);
        for (n, k, v) in &back.windows {
            let orig = r.level_arrays[*n as usize - 1][*k];
            assert_eq!(v.to_bits(), orig.to_bits());
        }
        let flat: Vec<f64> = r.cert2_samples.iter().flatten().map(|s| s.m).collect();
        for (row, m) in back.minima.iter().zip(&flat) {
            assert_eq!(row.2.to_bits(), m.to_bits());
        }
    }

    #[test]
    fn no_minima_table_without_samples() {
        let r = run_coupled(&RunParams::new(5, 2), &mut LazyBridgePath::seeded(3)).unwrap();
        let mut buf = Vec::new();
        write_figure_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,k,value\n"));
        assert!(!text.contains(M_HEADER));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_figure_csv("level,k,value\n1,2\n".as_bytes()).is_err());
        assert!(read_figure_csv("1,2,3\n".as_bytes()).is_err());
    }
}
