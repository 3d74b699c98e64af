use std::io::Write;

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::run::ResultRecord;

pub const RECORD_COLUMNS: [&str; 10] = [
    "experiment_id",
    "family",
    "method",
    "loop",
    "raw_phase",
    "canonical_phase",
    "reference",
    "deviation",
    "wall_clock_s",
    "config",
];

/// Shortest round-trip form, in exponent notation outside `[1e-4, 1e15)`.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Missing values are empty.
fn num(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

pub fn write_records<W: Write>(records: &[ResultRecord], format: OutputFormat, out: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Csv => write_records_csv(records, out),
        OutputFormat::Record => write_json(records, out),
    }
}

pub fn write_records_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(RECORD_COLUMNS).map_err(err)?;
    for r in records {
        w.write_record([
            r.experiment_id.clone(),
            r.family.clone(),
            r.method.clone(),
            r.loop_description.clone(),
            num(Some(r.raw_phase)),
            num(Some(r.canonical_phase)),
            num(r.reference),
            num(r.deviation),
            num(r.wall_clock_s),
            r.config.to_json(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}

pub fn write_json<W: Write, T: serde::Serialize + ?Sized>(value: &T, mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Output(e.to_string()))
}

/// A plain numeric table (connection or curvature tabulations).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<(), CliError> {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let err = |e: csv::Error| CliError::Output(e.to_string());
                w.write_record(&self.columns).map_err(err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|&v| format_f64(v))).map_err(err)?;
                }
                w.flush().map_err(|e| CliError::Output(e.to_string()))
            }
            OutputFormat::Record => write_json(self, out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, LoopSpec, Method};

    fn record() -> ResultRecord {
        let cfg = ExperimentConfig::new("su2-spin-1", Method::Line, LoopSpec::parse_flag("sweep=phi,theta=1").unwrap());
        ResultRecord {
            experiment_id: cfg.experiment_id(),
            family: cfg.family.clone(),
            method: "line".into(),
            loop_description: cfg.loop_spec.describe(),
            raw_phase: 0.1,
            canonical_phase: 0.1,
            reference: None,
            deviation: None,
            wall_clock_s: None,
            config: cfg,
        }
    }

    #[test]
    fn csv_embeds_config_and_leaves_missing_fields_empty() {
        let mut buf = Vec::new();
        write_records_csv(&[record()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), RECORD_COLUMNS);
        let row = rdr.records().next().unwrap().unwrap();
        assert_eq!(&row[4], "0.1");
        assert_eq!(&row[6], "");
        let cfg: ExperimentConfig = serde_json::from_str(&row[9]).unwrap();
        assert_eq!(cfg, record().config);
    }

    #[test]
    fn floats_round_trip_in_both_notations() {
        for v in [0.0, -0.0, 0.1, std::f64::consts::PI, 8.682767906082437e-11, -2.5e-300, 1e20, 123456.789] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_f64(8.682767906082437e-11), "8.682767906082437e-11");
        assert_eq!(format_f64(0.5), "0.5");
    }

    #[test]
    fn json_record_round_trips() {
        let mut buf = Vec::new();
        write_records(&[record()], OutputFormat::Record, &mut buf).unwrap();
        let back: Vec<ResultRecord> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, vec![record()]);
    }
}
