//! Sweep report output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepRow;

pub const HEADER: [&str; 7] = [
    "params", "w_before", "w_after", "delta", "bound", "pass", "ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "tsv" => Ok(Format::Tsv),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(Error::Unsupported(format!("unknown report format {s:?}"))),
        }
    }
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") => Format::Tsv,
            Some("txt") => Format::Text,
            _ => Format::Csv,
        }
    }
}

fn fields(r: &SweepRow) -> [String; 7] {
    [
        r.key(),
        r.w_before.to_string(),
        r.w_after.to_string(),
        r.delta.to_string(),
        r.bound.map_or_else(|| "-".to_string(), |b| b.to_string()),
        r.pass.to_string(),
        r.ms.to_string(),
    ]
}

fn delimited(rows: &[SweepRow], delim: u8) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delim)
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config {
        path: "<report>".into(),
        message: e.to_string(),
    };
    w.write_record(HEADER).map_err(io)?;
    for r in rows {
        w.write_record(fields(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config {
        path: "<report>".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("report is utf-8"))
}

/// Renders rows in the given format. Identical rows give identical bytes.
pub fn render_report(rows: &[SweepRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => delimited(rows, b','),
        Format::Tsv => delimited(rows, b'\t'),
        Format::Text => {
            let table: Vec<[String; 7]> = std::iter::once(HEADER.map(String::from))
                .chain(rows.iter().map(fields))
                .collect();
            let mut widths = [0usize; 7];
            for row in &table {
                for (w, f) in widths.iter_mut().zip(row) {
                    *w = (*w).max(f.chars().count());
                }
            }
            let mut out = String::new();
            for row in &table {
                let line = row
                    .iter()
                    .zip(widths)
                    .enumerate()
                    .map(|(i, (f, w))| {
                        if i == 0 {
                            format!("{f:<w$}")
                        } else {
                            format!("{f:>w$}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("  ");
                let _ = writeln!(out, "{}", line.trim_end());
            }
            Ok(out)
        }
    }
}

pub fn report_emit(rows: &[SweepRow], format: Format, path: &Path) -> Result<()> {
    let text = render_report(rows, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thinning::Hypothesis;

    fn row() -> SweepRow {
        SweepRow {
            hypothesis: Hypothesis::Lemma34,
            params: "n=3 s=3/3/3 lm=0/0/0 rM=0/0/0".into(),
            w_before: 128,
            w_after: 92,
            delta: 36,
            bound: Some(36),
            pass: true,
            ms: 0,
            error: None,
        }
    }

    #[test]
    fn csv_header_and_row() {
        let s = render_report(&[row()], Format::Csv).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "params,w_before,w_after,delta,bound,pass,ms");
        assert_eq!(
            lines[1],
            "lemma34 n=3 s=3/3/3 lm=0/0/0 rM=0/0/0,128,92,36,36,true,0"
        );
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(
            render_report(&[], Format::Csv).unwrap(),
            "params,w_before,w_after,delta,bound,pass,ms\n"
        );
        assert_eq!(render_report(&[], Format::Tsv).unwrap().lines().count(), 1);
    }

    #[test]
    fn output_is_stable() {
        let dir = std::env::temp_dir().join(format!("thinwidth-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
        report_emit(&[row(), row()], Format::Csv, &a).unwrap();
        report_emit(&[row(), row()], Format::Csv, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let text = render_report(&[row()], Format::Text).unwrap();
        assert!(text.starts_with("params"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn io_error_names_the_path() {
        let err =
            report_emit(&[row()], Format::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
