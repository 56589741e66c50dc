//! Structured result emission and the matching reader.
//!
//! CSV columns are exactly `protocol,n,trial,seed,interactions,
//! parallel_time,success,stop_reason`, followed by the union of summary
//! keys as `extra_<key>` columns. JSON mirrors the same fields under a
//! `reports` array next to a `meta` object. Optional metadata lands as
//! leading `# key=value` comment lines in CSV and as `meta` in JSON; with
//! empty metadata the CSV is exactly one header line plus one line per
//! report. Both formats round-trip through [`read_reports`].

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use popcon_core::engine::{StopReason, TrialReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}`; expected csv or json")),
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
}

impl EmitError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        EmitError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    fn parse(path: &Path, message: impl Into<String>) -> Self {
        EmitError::Parse {
            path: path.display().to_string(),
            message: message.into(),
        }
    }
}

const FIXED_COLUMNS: [&str; 8] = [
    "protocol",
    "n",
    "trial",
    "seed",
    "interactions",
    "parallel_time",
    "success",
    "stop_reason",
];

#[derive(Serialize, Deserialize)]
struct JsonReport {
    protocol: String,
    n: usize,
    trial: u32,
    seed: u64,
    interactions: u64,
    parallel_time: f64,
    success: bool,
    stop_reason: String,
    #[serde(default)]
    summary: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct JsonDoc {
    #[serde(default)]
    meta: BTreeMap<String, String>,
    reports: Vec<JsonReport>,
}

impl From<&TrialReport> for JsonReport {
    fn from(r: &TrialReport) -> Self {
        JsonReport {
            protocol: r.protocol.clone(),
            n: r.n,
            trial: r.trial,
            seed: r.seed,
            interactions: r.interactions,
            parallel_time: r.parallel_time_f64(),
            success: r.success,
            stop_reason: r.stop_reason.to_string(),
            summary: r.final_summary.clone(),
        }
    }
}

fn report_from_parts(
    path: &Path,
    protocol: String,
    n: usize,
    trial: u32,
    seed: u64,
    interactions: u64,
    success: bool,
    stop_reason: &str,
    summary: BTreeMap<String, String>,
) -> Result<TrialReport, EmitError> {
    let stop_reason: StopReason = stop_reason
        .parse()
        .map_err(|e: String| EmitError::parse(path, e))?;
    Ok(TrialReport {
        protocol,
        n,
        trial,
        seed,
        interactions,
        success,
        stop_reason,
        final_summary: summary,
    })
}

/// Writes reports to `path` in the chosen format with optional metadata.
pub fn emit_results(
    reports: &[TrialReport],
    format: OutputFormat,
    path: &Path,
    metadata: &BTreeMap<String, String>,
) -> Result<(), EmitError> {
    let bytes = match format {
        OutputFormat::Csv => render_csv(reports, metadata).into_bytes(),
        OutputFormat::Json => {
            let doc = JsonDoc {
                meta: metadata.clone(),
                reports: reports.iter().map(JsonReport::from).collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
    };
    let mut file = fs::File::create(path).map_err(|e| EmitError::io(path, e))?;
    file.write_all(&bytes).map_err(|e| EmitError::io(path, e))
}

fn extra_keys(reports: &[TrialReport]) -> Vec<String> {
    let mut keys: Vec<String> = reports
        .iter()
        .flat_map(|r| r.final_summary.keys().cloned())
        .collect();
    keys.sort();
    keys.dedup();
    keys
}

fn render_csv(reports: &[TrialReport], metadata: &BTreeMap<String, String>) -> String {
    let extras = extra_keys(reports);
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(extras.iter().map(|k| format!("extra_{k}")));
    w.write_record(&header).expect("csv write");
    for r in reports {
        let mut row = vec![
            r.protocol.clone(),
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.interactions.to_string(),
            format!("{}", r.parallel_time_f64()),
            r.success.to_string(),
            r.stop_reason.to_string(),
        ];
        for k in &extras {
            row.push(r.final_summary.get(k).cloned().unwrap_or_default());
        }
        w.write_record(&row).expect("csv write");
    }
    let body = String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8");
    let mut out = String::new();
    for (k, v) in metadata {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&body);
    out
}

/// Reads reports (and metadata) back from a CSV or JSON file; the format is
/// sniffed from the content.
pub fn read_reports(path: &Path) -> Result<(Vec<TrialReport>, BTreeMap<String, String>), EmitError> {
    let text = fs::read_to_string(path).map_err(|e| EmitError::io(path, e))?;
    let first = text.trim_start().chars().next();
    if first == Some('{') {
        let doc: JsonDoc =
            serde_json::from_str(&text).map_err(|e| EmitError::parse(path, e.to_string()))?;
        let mut reports = Vec::with_capacity(doc.reports.len());
        for r in doc.reports {
            reports.push(report_from_parts(
                path,
                r.protocol,
                r.n,
                r.trial,
                r.seed,
                r.interactions,
                r.success,
                &r.stop_reason,
                r.summary,
            )?);
        }
        return Ok((reports, doc.meta));
    }

    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| EmitError::parse(path, e.to_string()))?
        .iter()
        .map(|s| s.to_string())
        .collect();
    if headers.len() < FIXED_COLUMNS.len()
        || headers[..FIXED_COLUMNS.len()] != FIXED_COLUMNS.map(String::from)
    {
        return Err(EmitError::parse(path, "unexpected CSV header"));
    }
    let mut reports = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| EmitError::parse(path, e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let mut summary = BTreeMap::new();
        for (i, h) in headers.iter().enumerate().skip(FIXED_COLUMNS.len()) {
            let key = h.strip_prefix("extra_").unwrap_or(h);
            let v = field(i);
            if !v.is_empty() {
                summary.insert(key.to_string(), v.to_string());
            }
        }
        let parse_err = |what: &str| EmitError::parse(path, format!("bad {what} field"));
        reports.push(report_from_parts(
            path,
            field(0).to_string(),
            field(1).parse().map_err(|_| parse_err("n"))?,
            field(2).parse().map_err(|_| parse_err("trial"))?,
            field(3).parse().map_err(|_| parse_err("seed"))?,
            field(4).parse().map_err(|_| parse_err("interactions"))?,
            field(6).parse().map_err(|_| parse_err("success"))?,
            field(7),
            summary,
        )?);
    }
    Ok((reports, meta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<TrialReport> {
        let mut a = TrialReport::finished("leader-election", 8, 42, 31, true);
        a.note("overrun_held", true);
        let b = TrialReport::finished("leader-election", 8, 43, 99, false).with_trial(1);
        vec![a, b]
    }

    #[test]
    fn single_report_csv_is_header_plus_one_row() {
        let r = vec![TrialReport::finished("x", 4, 1, 10, true)];
        let text = render_csv(&r, &BTreeMap::new());
        let lines: Vec<&str> = text.trim_end().lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("protocol,n,trial,seed,interactions,parallel_time,success,stop_reason"));
        assert_eq!(lines[1], "x,4,0,1,10,2.5,true,predicate-satisfied");
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let reports = sample();
        let mut meta = BTreeMap::new();
        meta.insert("seed".to_string(), "42".to_string());
        emit_results(&reports, OutputFormat::Csv, &path, &meta).unwrap();
        let (back, meta2) = read_reports(&path).unwrap();
        assert_eq!(back, reports);
        assert_eq!(meta2, meta);
    }

    #[test]
    fn json_round_trip_and_field_agreement() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("out.csv");
        let json_path = dir.path().join("out.json");
        let reports = sample();
        emit_results(&reports, OutputFormat::Csv, &csv_path, &BTreeMap::new()).unwrap();
        emit_results(&reports, OutputFormat::Json, &json_path, &BTreeMap::new()).unwrap();
        let (from_csv, _) = read_reports(&csv_path).unwrap();
        let (from_json, _) = read_reports(&json_path).unwrap();
        assert_eq!(from_csv, from_json);
        assert_eq!(from_csv, reports);
    }

    #[test]
    fn io_failures_carry_the_path() {
        let err = read_reports(Path::new("/nonexistent/zzz.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/zzz.csv"));
    }
}
