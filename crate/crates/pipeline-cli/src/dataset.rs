//! Line-delimited JSON dataset persistence.
//!
//! One record per line:
//!
//! ```json
//! {"ts_us":..., "motion":"walking",
//!  "r1":{"points":[[depth,lateral,velocity,intensity], ...]},
//!  "r2":{"points":[...]},
//!  "truth":[[x,y,z], ...25]}
//! ```
//!
//! Reading rebuilds both radar frames with the record timestamp and their
//! module tags. Serialization is deterministic (fixed key order, shortest
//! round-tripping floats), so identical records produce identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use scene_sim::{
    DatasetRecord, MotionClass, RadarFrame, RadarModule, ReflectionPoint, SkeletonFrame,
};

/// Points per radar frame the schema accepts.
pub const MAX_POINTS: usize = 256;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct WirePoints {
    points: Vec<[f64; 4]>,
}

#[derive(Serialize, Deserialize)]
struct WireRecord {
    ts_us: i64,
    motion: String,
    r1: WirePoints,
    r2: WirePoints,
    truth: Vec<[f64; 3]>,
}

fn frame_to_wire(frame: &RadarFrame) -> WirePoints {
    WirePoints {
        points: frame
            .points
            .iter()
            .map(|p| [p.depth, p.lateral, p.velocity, p.intensity])
            .collect(),
    }
}

fn wire_to_frame(wire: &WirePoints, ts_us: i64, module: RadarModule) -> RadarFrame {
    RadarFrame {
        timestamp_us: ts_us,
        module,
        points: wire
            .points
            .iter()
            .map(|p| ReflectionPoint {
                depth: p[0],
                lateral: p[1],
                velocity: p[2],
                intensity: p[3],
            })
            .collect(),
    }
}

fn record_to_wire(record: &DatasetRecord) -> WireRecord {
    WireRecord {
        ts_us: record.truth.timestamp_us,
        motion: record.motion.as_str().to_string(),
        r1: frame_to_wire(&record.radar_xy),
        r2: frame_to_wire(&record.radar_xz),
        truth: record.truth.joints.to_vec(),
    }
}

fn wire_to_record(wire: WireRecord, line: usize) -> Result<DatasetRecord, DatasetError> {
    let motion = MotionClass::parse(&wire.motion).ok_or_else(|| DatasetError::Line {
        line,
        message: format!("unknown motion class `{}`", wire.motion),
    })?;
    if wire.truth.len() != 25 {
        return Err(DatasetError::Line {
            line,
            message: format!("truth has {} joints, expected 25", wire.truth.len()),
        });
    }
    for (name, w) in [("r1", &wire.r1), ("r2", &wire.r2)] {
        if w.points.len() > MAX_POINTS {
            return Err(DatasetError::Line {
                line,
                message: format!("{name} holds {} points, the cap is {MAX_POINTS}", w.points.len()),
            });
        }
    }
    let mut joints = [[0.0; 3]; 25];
    joints.copy_from_slice(&wire.truth);
    Ok(DatasetRecord {
        radar_xy: wire_to_frame(&wire.r1, wire.ts_us, RadarModule::R1),
        radar_xz: wire_to_frame(&wire.r2, wire.ts_us, RadarModule::R2),
        truth: SkeletonFrame {
            timestamp_us: wire.ts_us,
            joints,
        },
        motion,
    })
}

/// Serialize one record to its JSON line (no trailing newline).
pub fn record_to_line(record: &DatasetRecord) -> String {
    serde_json::to_string(&record_to_wire(record)).expect("record serializes")
}

/// Write records as one JSON object per line.
pub fn dataset_write(records: &[DatasetRecord], path: &Path) -> Result<(), DatasetError> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        out.write_all(record_to_line(r).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parse records from text; errors carry 1-based line numbers.
pub fn dataset_from_str(text: &str) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let wire: WireRecord = serde_json::from_str(raw).map_err(|e| DatasetError::Line {
            line,
            message: e.to_string(),
        })?;
        records.push(wire_to_record(wire, line)?);
    }
    Ok(records)
}

/// Read a dataset file written by [`dataset_write`].
pub fn dataset_read(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut buf = String::new();
    let mut line = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line += 1;
        if buf.trim().is_empty() {
            continue;
        }
        let wire: WireRecord = serde_json::from_str(&buf).map_err(|e| DatasetError::Line {
            line,
            message: e.to_string(),
        })?;
        records.push(wire_to_record(wire, line)?);
    }
    Ok(records)
}
