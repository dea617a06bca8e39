//! CSV generation traces and consumer request logs.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names::{make_data_name, next_data_name, RadarDataName};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: row {row}: {message}")]
    Invalid {
        path: String,
        row: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One generated file: when, by which radar, and how large.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub epoch_seconds: f64,
    pub radar_id: String,
    pub round: u64,
    pub seq: u64,
    pub size_bytes: u64,
}

impl TraceEntry {
    pub fn file_name(&self) -> RadarDataName {
        make_data_name(&self.radar_id, self.round, self.seq, None)
    }
}

/// Reads a generation trace and checks that, per radar, entries are in time
/// order and follow the round/sequence progression for that radar.
pub fn load_trace(
    path: &Path,
    seqs_per_round: &BTreeMap<String, u64>,
) -> Result<Vec<TraceEntry>, TraceError> {
    let shown = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|source| TraceError::Csv {
        path: shown.clone(),
        source,
    })?;
    let mut entries = Vec::new();
    for row in reader.deserialize() {
        let entry: TraceEntry = row.map_err(|source| TraceError::Csv {
            path: shown.clone(),
            source,
        })?;
        entries.push(entry);
    }
    validate_trace(&entries, seqs_per_round).map_err(|(row, message)| TraceError::Invalid {
        path: shown,
        row,
        message,
    })?;
    Ok(entries)
}

pub fn validate_trace(
    entries: &[TraceEntry],
    seqs_per_round: &BTreeMap<String, u64>,
) -> Result<(), (usize, String)> {
    let mut last: BTreeMap<&str, &TraceEntry> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        let row = i + 1;
        let Some(&spr) = seqs_per_round.get(&e.radar_id) else {
            return Err((row, format!("unknown radar {:?}", e.radar_id)));
        };
        if !(e.epoch_seconds.is_finite() && e.epoch_seconds >= 0.0) {
            return Err((row, "epoch_seconds must be a non-negative number".into()));
        }
        if e.seq < 1 || e.seq > spr {
            return Err((row, format!("seq {} outside 1..={spr}", e.seq)));
        }
        if let Some(prev) = last.get(e.radar_id.as_str()) {
            if e.epoch_seconds < prev.epoch_seconds {
                return Err((row, "generation times go backwards".into()));
            }
            let expected = next_data_name(&prev.file_name(), spr);
            if (e.round, e.seq) != (expected.round, expected.seq) {
                return Err((
                    row,
                    format!(
                        "expected round {} seq {} after round {} seq {}",
                        expected.round, expected.seq, prev.round, prev.seq
                    ),
                ));
            }
        }
        last.insert(&e.radar_id, e);
    }
    Ok(())
}

pub fn write_trace<W: io::Write>(out: W, entries: &[TraceEntry]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for e in entries {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

/// A recorded consumer request, replayed at the same offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestLogEntry {
    pub epoch_seconds: f64,
    pub radar_id: String,
    pub name: RadarDataName,
}

pub fn load_request_log(path: &Path) -> Result<Vec<RequestLogEntry>, TraceError> {
    let shown = path.display().to_string();
    let mut reader = csv::Reader::from_path(path).map_err(|source| TraceError::Csv {
        path: shown.clone(),
        source,
    })?;
    let mut entries: Vec<RequestLogEntry> = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let entry: RequestLogEntry = row.map_err(|source| TraceError::Csv {
            path: shown.clone(),
            source,
        })?;
        if entry.name.radar_id != entry.radar_id {
            return Err(TraceError::Invalid {
                path: shown,
                row: i + 1,
                message: format!(
                    "name {} does not belong to radar {}",
                    entry.name, entry.radar_id
                ),
            });
        }
        if entries
            .last()
            .is_some_and(|p| p.epoch_seconds > entry.epoch_seconds)
        {
            return Err(TraceError::Invalid {
                path: shown,
                row: i + 1,
                message: "request times go backwards".into(),
            });
        }
        entries.push(entry);
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn spr() -> BTreeMap<String, u64> {
        BTreeMap::from([("radar1".to_string(), 3), ("radar2".to_string(), 1)])
    }

    #[test]
    fn load_valid_trace() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "epoch_seconds,radar_id,round,seq,size_bytes").unwrap();
        writeln!(f, "0.0,radar1,0,1,1000").unwrap();
        writeln!(f, "0.5,radar2,0,1,500").unwrap();
        writeln!(f, "23.3,radar1,0,2,1000").unwrap();
        writeln!(f, "46.7,radar1,0,3,1000").unwrap();
        writeln!(f, "70.0,radar1,1,1,1200").unwrap();
        writeln!(f, "70.5,radar2,1,1,500").unwrap();
        let entries = load_trace(f.path(), &spr()).unwrap();
        assert_eq!(entries.len(), 6);
        assert_eq!(
            entries[4].file_name().to_string(),
            "/data/radar1/_round=1/_seq=1"
        );

        let mut buf = Vec::new();
        write_trace(&mut buf, &entries).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("epoch_seconds,radar_id,round,seq,size_bytes\n"));
    }

    #[test]
    fn rejects_skipped_sequence() {
        let entries = vec![
            TraceEntry {
                epoch_seconds: 0.0,
                radar_id: "radar1".into(),
                round: 0,
                seq: 1,
                size_bytes: 1,
            },
            TraceEntry {
                epoch_seconds: 1.0,
                radar_id: "radar1".into(),
                round: 0,
                seq: 3,
                size_bytes: 1,
            },
        ];
        let (row, msg) = validate_trace(&entries, &spr()).unwrap_err();
        assert_eq!(row, 2);
        assert!(msg.contains("expected round 0 seq 2"), "{msg}");
    }

    #[test]
    fn rejects_unknown_columns_and_radars() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "epoch_seconds,radar_id,round,seq,size_bytes,extra").unwrap();
        writeln!(f, "0.0,radar1,0,1,1000,x").unwrap();
        assert!(load_trace(f.path(), &spr()).is_err());

        let entries = vec![TraceEntry {
            epoch_seconds: 0.0,
            radar_id: "radar9".into(),
            round: 0,
            seq: 1,
            size_bytes: 1,
        }];
        assert!(validate_trace(&entries, &spr()).is_err());
    }

    #[test]
    fn request_log() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "epoch_seconds,radar_id,name").unwrap();
        writeln!(f, "1.0,radar1,/data/radar1/_round=0/_seq=1").unwrap();
        writeln!(f, "2.5,radar2,/data/radar2/_round=0/_seq=1").unwrap();
        let log = load_request_log(f.path()).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log[1].name.radar_id, "radar2");

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "epoch_seconds,radar_id,name").unwrap();
        writeln!(bad, "1.0,radar2,/data/radar1/_round=0/_seq=1").unwrap();
        assert!(load_request_log(bad.path()).is_err());
    }
}
