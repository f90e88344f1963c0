//! Timestamp-based association of radar frames with ground truth.

use crate::motion::MotionClass;
use crate::types::{DatasetRecord, RadarFrame, RadarModule, SimError, SkeletonFrame};

/// Result of associating two radar streams with a truth stream.
#[derive(Debug, Clone)]
pub struct Association {
    pub records: Vec<DatasetRecord>,
    /// Truth frames with no radar pair inside the tolerance.
    pub skipped: usize,
}

fn check_sorted<T, F: Fn(&T) -> i64>(
    items: &[T],
    ts: F,
    stream: &'static str,
) -> Result<(), SimError> {
    for (i, w) in items.windows(2).enumerate() {
        if ts(&w[1]) < ts(&w[0]) {
            return Err(SimError::UnsortedStream {
                stream,
                index: i + 1,
            });
        }
    }
    Ok(())
}

/// Pair every truth frame with the nearest-in-time frame from each radar
/// stream within `tolerance_us`. Truth frames that cannot be paired on both
/// streams are skipped and counted; no radar frame is used twice.
pub fn associate(
    r1: &[RadarFrame],
    r2: &[RadarFrame],
    truth: &[SkeletonFrame],
    motion: MotionClass,
    tolerance_us: i64,
) -> Result<Association, SimError> {
    if tolerance_us < 0 {
        return Err(SimError::InvalidArg {
            name: "tolerance_us",
            reason: "must be non-negative",
        });
    }
    check_sorted(r1, |f| f.timestamp_us, "R1")?;
    check_sorted(r2, |f| f.timestamp_us, "R2")?;
    check_sorted(truth, |f| f.timestamp_us, "truth")?;
    if r1.iter().any(|f| f.module != RadarModule::R1) {
        return Err(SimError::WrongModule { stream: "R1" });
    }
    if r2.iter().any(|f| f.module != RadarModule::R2) {
        return Err(SimError::WrongModule { stream: "R2" });
    }

    // Nearest unused frame at or after the cursor; streams are sorted, so
    // the cursor only ever moves forward.
    fn pick(frames: &[RadarFrame], cursor: &mut usize, t: i64, tol: i64) -> Option<usize> {
        let mut i = *cursor;
        while i + 1 < frames.len()
            && (frames[i + 1].timestamp_us - t).abs() < (frames[i].timestamp_us - t).abs()
        {
            i += 1;
        }
        *cursor = i;
        if i < frames.len() && (frames[i].timestamp_us - t).abs() <= tol {
            Some(i)
        } else {
            None
        }
    }

    let mut records = Vec::new();
    let mut skipped = 0usize;
    let (mut c1, mut c2) = (0usize, 0usize);
    for frame in truth {
        let t = frame.timestamp_us;
        let m1 = pick(r1, &mut c1, t, tolerance_us);
        let m2 = pick(r2, &mut c2, t, tolerance_us);
        match (m1, m2) {
            (Some(i1), Some(i2)) => {
                records.push(DatasetRecord {
                    radar_xy: r1[i1].clone(),
                    radar_xz: r2[i2].clone(),
                    truth: frame.clone(),
                    motion,
                });
                c1 = i1 + 1;
                c2 = i2 + 1;
            }
            _ => skipped += 1,
        }
    }
    Ok(Association { records, skipped })
}
