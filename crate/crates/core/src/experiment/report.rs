//! CSV persistence. UTF-8, LF line endings, success rates with 6 decimals.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{AggregateRow, SweepRecord, ZeroFractionRow};
use crate::protocol::Message;

pub const SWEEP_HEADER: [&str; 10] = [
    "n",
    "message",
    "decimal_value",
    "encoder_gates_raw",
    "total_gates_transpiled",
    "depth_transpiled",
    "shots",
    "successes",
    "success_rate",
    "seed",
];

pub const AGGREGATE_HEADER: [&str; 6] = [
    "n",
    "group_key",
    "num_messages",
    "mean_success_rate",
    "min_success_rate",
    "max_success_rate",
];

pub const ZERO_FRACTION_HEADER: [&str; 4] = ["n", "class", "num_messages", "mean_success_rate"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("header mismatch: expected '{expected}', found '{found}'")]
    Header { expected: String, found: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn rate(x: f64) -> String {
    format!("{x:.6}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_report<W: Write>(records: &[SweepRecord], out: W) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.message.to_string(),
            r.decimal_value().to_string(),
            r.encoder_gates_raw.to_string(),
            r.total_gates_transpiled.to_string(),
            r.depth_transpiled.to_string(),
            r.shots.to_string(),
            r.successes.to_string(),
            rate(r.success_rate()),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregate rows for one message length `n`.
pub fn write_aggregates<W: Write>(
    groups: &[(usize, Vec<AggregateRow>)],
    out: W,
) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for (n, rows) in groups {
        for row in rows {
            w.write_record([
                n.to_string(),
                row.group_key.to_string(),
                row.num_messages.to_string(),
                rate(row.mean_success_rate),
                rate(row.min_success_rate),
                rate(row.max_success_rate),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_zero_fraction<W: Write>(rows: &[ZeroFractionRow], out: W) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(ZERO_FRACTION_HEADER)?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.class.label().to_string(),
            row.num_messages.to_string(),
            rate(row.mean_success_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    idx: usize,
    line: u64,
) -> Result<T, ReportError> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| ReportError::Parse {
        line,
        message: format!("invalid {} '{raw}'", SWEEP_HEADER[idx]),
    })
}

/// Reads a sweep CSV. Derived columns (`decimal_value`, `success_rate`) must
/// agree with the primary ones.
pub fn read_report<R: Read>(input: R) -> Result<Vec<SweepRecord>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(SWEEP_HEADER.iter().copied()) {
        return Err(ReportError::Header {
            expected: SWEEP_HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut records = Vec::new();
    for result in reader.records() {
        let rec = result?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| ReportError::Parse { line, message };

        let n: usize = field(&rec, 0, line)?;
        let message: Message = rec[1].parse().map_err(|e| bad(format!("{e}")))?;
        if message.len() != n {
            return Err(bad(format!("message '{}' does not have {n} bits", &rec[1])));
        }
        let decimal: u64 = field(&rec, 2, line)?;
        if decimal != message.value() {
            return Err(bad(format!(
                "decimal_value {decimal} does not match message {message}"
            )));
        }
        let record = SweepRecord {
            n,
            message,
            encoder_gates_raw: field(&rec, 3, line)?,
            total_gates_transpiled: field(&rec, 4, line)?,
            depth_transpiled: field(&rec, 5, line)?,
            shots: field(&rec, 6, line)?,
            successes: field(&rec, 7, line)?,
            seed: field(&rec, 9, line)?,
        };
        if record.shots == 0 || record.successes > record.shots {
            return Err(bad(format!(
                "successes {} / shots {} out of range",
                record.successes, record.shots
            )));
        }
        let stated: f64 = field(&rec, 8, line)?;
        if (stated - record.success_rate()).abs() > 5e-7 {
            return Err(bad(format!(
                "success_rate {stated} does not match {}/{}",
                record.successes, record.shots
            )));
        }
        records.push(record);
    }
    Ok(records)
}

/// Convenience wrappers over files.
pub fn write_report_file(
    records: &[SweepRecord],
    path: impl AsRef<Path>,
) -> Result<(), ReportError> {
    write_report(records, std::fs::File::create(path)?)
}

pub fn read_report_file(path: impl AsRef<Path>) -> Result<Vec<SweepRecord>, ReportError> {
    read_report(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::sweep_all;
    use crate::noise::NoiseModel;

    fn to_string(records: &[SweepRecord]) -> String {
        let mut buf = Vec::new();
        write_report(records, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn noiseless_formatting() {
        let recs = sweep_all(4, 64, &NoiseModel::noiseless(), 1).unwrap();
        let text = to_string(&recs);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,message,decimal_value,encoder_gates_raw,total_gates_transpiled,depth_transpiled,shots,successes,success_rate,seed"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(
            &first[..9],
            &["4", "0000", "0", "0", "48", "18", "64", "64", "1.000000"]
        );
        assert_eq!(text.lines().count(), 17);
        assert!(!text.contains('\r'));
        assert_eq!(read_report(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn round_trip_with_inexact_rates() {
        let recs = sweep_all(4, 4096, &NoiseModel::default(), 3).unwrap();
        let text = to_string(&recs);
        assert_eq!(read_report(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn malformed_files() {
        let err = read_report("n,message\n4,0000\n".as_bytes()).unwrap_err();
        assert!(matches!(err, ReportError::Header { .. }));

        let header = SWEEP_HEADER.join(",");
        let ok = "4,0011,3,3,51,35,100,90,0.900000,7";
        let text = format!("{header}\n{ok}\n4,0011,3,3,51,35,100,x,0.900000,7\n");
        match read_report(text.as_bytes()).unwrap_err() {
            ReportError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }

        let text = format!("{header}\n4,0011,4,3,51,35,100,90,0.900000,7\n");
        assert!(matches!(
            read_report(text.as_bytes()),
            Err(ReportError::Parse { line: 2, .. })
        ));

        let text = format!("{header}\n4,0011,3,3,51,35,100,90,0.800000,7\n");
        assert!(matches!(
            read_report(text.as_bytes()),
            Err(ReportError::Parse { line: 2, .. })
        ));

        let text = format!("{header}\n4,0011,3,3,51,35,100,190,1.900000,7\n");
        assert!(matches!(
            read_report(text.as_bytes()),
            Err(ReportError::Parse { .. })
        ));

        let text = format!("{header}\n4,00111,7,3,51,35,100,90,0.900000,7\n");
        assert!(matches!(
            read_report(text.as_bytes()),
            Err(ReportError::Parse { .. })
        ));
    }
}
