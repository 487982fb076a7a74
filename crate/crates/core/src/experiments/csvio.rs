use std::io::{Read, Write};
use std::path::Path;

use super::sweep::ResultRow;
use crate::error::{Error, Result};
use crate::infotheory::Engine;

pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "snr_db",
    "s_factor",
    "m_rx",
    "n_tx",
    "engine",
    "mi_bpcu",
    "stderr",
    "samples",
    "seed",
];

/// Decimal rendering with 9 significant digits, no exponent.
pub fn format_sig9(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    // the exponent of the correctly rounded 9-digit mantissa fixes the decimals
    let sci = format!("{v:.8e}");
    let exponent: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (8 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Shortest round-trip rendering for grid coordinates.
fn format_plain(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            format_plain(r.snr_db),
            format_plain(r.s_factor),
            r.m_rx.to_string(),
            r.n_tx.to_string(),
            r.engine.to_string(),
            format_sig9(r.mi_bpcu),
            format_sig9(r.stderr),
            r.samples.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Writes the results file, creating parent directories as needed.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = rec.get(i).unwrap_or_default();
    raw.parse().map_err(|_| {
        Error::Config(format!(
            "line {line}: cannot parse `{raw}` in column {}",
            CSV_HEADER[i]
        ))
    })
}

pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Config(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        rows.push(ResultRow {
            experiment: rec.get(0).unwrap_or_default().to_string(),
            snr_db: field(&rec, 1, line)?,
            s_factor: field(&rec, 2, line)?,
            m_rx: field(&rec, 3, line)?,
            n_tx: field(&rec, 4, line)?,
            engine: field::<Engine>(&rec, 5, line)?,
            mi_bpcu: field(&rec, 6, line)?,
            stderr: field(&rec, 7, line)?,
            samples: field(&rec, 8, line)?,
            seed: field(&rec, 9, line)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.792818322), "0.792818322");
        assert_eq!(format_sig9(7.284729123456), "7.28472912");
        assert_eq!(format_sig9(12.5), "12.5");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(0.00012345678912), "0.000123456789");
        assert_eq!(format_sig9(9.9999999996), "10");
        assert_eq!(format_sig9(-1.5), "-1.5");
        assert_eq!(format_sig9(123456789123.0), "123456789123");
    }

    #[test]
    fn header_only_for_no_rows() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", CSV_HEADER.join(","))
        );
    }

    #[test]
    fn round_trip() {
        let rows = vec![
            ResultRow {
                experiment: "a".into(),
                snr_db: -5.0,
                s_factor: 2.5,
                m_rx: 5,
                n_tx: 2,
                engine: Engine::Exact,
                mi_bpcu: 1.23456789,
                stderr: 0.0,
                samples: 0,
                seed: 42,
            },
            ResultRow {
                experiment: "a".into(),
                snr_db: f64::INFINITY,
                s_factor: 0.25,
                m_rx: 1,
                n_tx: 4,
                engine: Engine::HighSnr,
                mi_bpcu: 2.0,
                stderr: 0.0,
                samples: 0,
                seed: 42,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(parse_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
