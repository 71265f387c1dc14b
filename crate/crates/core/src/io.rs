//! Dataset ingestion and the Kaplan-Meier estimator.

use crate::error::{Error, Result};
use crate::estimation::Observation;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Csv,
    Tsv,
}

impl FileFormat {
    fn delimiter(&self) -> u8 {
        match self {
            FileFormat::Csv => b',',
            FileFormat::Tsv => b'\t',
        }
    }

    pub fn infer(path: &Path) -> FileFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("tsv") | Some("tab") => FileFormat::Tsv,
            _ => FileFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub observations: Vec<Observation>,
    pub source_path: String,
}

impl Dataset {
    pub fn times(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.time).collect()
    }

    pub fn n(&self) -> usize {
        self.observations.len()
    }

    pub fn n_censored(&self) -> usize {
        self.observations.iter().filter(|o| !o.event).count()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: usize,
    pub reason: String,
}

/// Ingestion keeps the accounting total: every input row either lands in the
/// dataset or shows up in `rejected` with its line number and reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub rejected: Vec<RejectedRow>,
}

/// Read a delimited file with a header row. `time_column` must parse as
/// positive reals; `event_column`, when given, must hold 0 (censored) or
/// 1 (event). Without an event column every row is an event.
pub fn load_dataset(
    path: &Path,
    format: FileFormat,
    time_column: &str,
    event_column: Option<&str>,
) -> Result<LoadedDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Invalid(format!("cannot open {}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Invalid(format!("cannot read header row: {e}")))?
        .clone();
    if headers.is_empty() {
        return Err(Error::Invalid("empty file: no header row".into()));
    }
    let time_idx = headers
        .iter()
        .position(|h| h == time_column)
        .ok_or_else(|| Error::Invalid(format!(
            "time column `{time_column}` not in header [{}]",
            headers.iter().collect::<Vec<_>>().join(", ")
        )))?;
    let event_idx = match event_column {
        Some(name) => Some(headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Invalid(format!(
                "event column `{name}` not in header [{}]",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })?),
        None => None,
    };

    let mut observations = Vec::new();
    let mut rejected = Vec::new();
    // header is line 1; first record is line 2
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RejectedRow { line, reason: format!("unreadable row: {e}") });
                continue;
            }
        };
        let raw_time = match record.get(time_idx) {
            Some(v) if !v.is_empty() => v,
            _ => {
                rejected.push(RejectedRow { line, reason: "missing time value".into() });
                continue;
            }
        };
        let time: f64 = match raw_time.parse() {
            Ok(v) => v,
            Err(_) => {
                rejected.push(RejectedRow {
                    line,
                    reason: format!("time `{raw_time}` is not a number"),
                });
                continue;
            }
        };
        if !(time > 0.0) || !time.is_finite() {
            rejected.push(RejectedRow { line, reason: format!("non-positive time {time}") });
            continue;
        }
        let event = match event_idx {
            None => true,
            Some(idx) => match record.get(idx) {
                Some("1") => true,
                Some("0") => false,
                Some(other) => {
                    rejected.push(RejectedRow {
                        line,
                        reason: format!("event flag `{other}` is not 0 or 1"),
                    });
                    continue;
                }
                None => {
                    rejected.push(RejectedRow { line, reason: "missing event flag".into() });
                    continue;
                }
            },
        };
        observations.push(Observation { time, event });
    }

    if observations.is_empty() {
        return Err(Error::Invalid(format!(
            "no usable rows in {} ({} rejected)",
            path.display(),
            rejected.len()
        )));
    }
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string();
    Ok(LoadedDataset {
        dataset: Dataset {
            name,
            observations,
            source_path: path.display().to_string(),
        },
        rejected,
    })
}

// ---- Kaplan-Meier ----

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KmPoint {
    pub time: f64,
    pub survival: f64,
    pub at_risk: usize,
    pub events: usize,
}

/// Product-limit curve: survival starts at 1 and steps down only at event
/// times.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KmCurve {
    pub points: Vec<KmPoint>,
}

impl KmCurve {
    /// Right-continuous step lookup.
    pub fn survival_at(&self, t: f64) -> f64 {
        let mut s = 1.0;
        for p in &self.points {
            if p.time <= t {
                s = p.survival;
            } else {
                break;
            }
        }
        s
    }
}

pub fn km_estimate(data: &[Observation]) -> KmCurve {
    let mut sorted: Vec<Observation> = data.to_vec();
    sorted.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());

    let n = sorted.len();
    let mut points = Vec::new();
    let mut survival = 1.0;
    let mut i = 0;
    while i < n {
        let t = sorted[i].time;
        let at_risk = n - i;
        let mut events = 0;
        let mut j = i;
        // ties: censored records at t stay at risk for events at t
        while j < n && sorted[j].time == t {
            if sorted[j].event {
                events += 1;
            }
            j += 1;
        }
        if events > 0 {
            survival *= 1.0 - events as f64 / at_risk as f64;
            points.push(KmPoint { time: t, survival, at_risk, events });
        }
        i = j;
    }
    KmCurve { points }
}
