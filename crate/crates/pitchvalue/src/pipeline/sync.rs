//! Event-to-frame synchronization.
//!
//! Event and tracking clocks drift against each other, so each event is
//! matched to the frame inside a small time window whose ball position best
//! agrees with the event location. Events with no acceptable frame are
//! excluded rather than force-matched.

use serde::{Deserialize, Serialize};

use crate::pipeline::events::EventRecord;
use crate::pipeline::tracking::TrackingFrame;

/// Matching thresholds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SyncParams {
    /// Half-width of the time window around the event (s).
    pub window: f64,
    /// Largest acceptable ball-to-event distance (m).
    pub max_dist: f64,
}

impl Default for SyncParams {
    fn default() -> Self {
        SyncParams {
            window: 0.5,
            max_dist: 5.0,
        }
    }
}

/// An event matched to a tracking frame.
#[derive(Debug, Clone)]
pub struct SyncedEvent {
    pub event: EventRecord,
    /// Index into the frame slice passed to `synchronize`.
    pub frame_idx: usize,
    pub sync_error: f64,
}

/// Match each event to the frame within `window` seconds minimizing the
/// ball-location error; events beyond `max_dist` (or with no frame in the
/// window) are dropped. Returns the matches and the excluded count.
pub fn synchronize(
    events: &[EventRecord],
    frames: &[TrackingFrame],
    params: SyncParams,
) -> (Vec<SyncedEvent>, usize) {
    let mut synced = Vec::new();
    let mut excluded = 0usize;
    for event in events {
        match best_frame(event, frames, params) {
            Some((idx, err)) => synced.push(SyncedEvent {
                event: event.clone(),
                frame_idx: idx,
                sync_error: err,
            }),
            None => excluded += 1,
        }
    }
    (synced, excluded)
}

fn best_frame(
    event: &EventRecord,
    frames: &[TrackingFrame],
    params: SyncParams,
) -> Option<(usize, f64)> {
    // Frames are sorted by time; find the window by bisection.
    let lo = frames.partition_point(|f| f.t < event.t - params.window);
    let hi = frames.partition_point(|f| f.t <= event.t + params.window);
    let mut best: Option<(usize, f64)> = None;
    for (idx, frame) in frames[lo..hi].iter().enumerate() {
        let err = frame.ball.distance(event.location);
        if best.is_none_or(|(_, b)| err < b) {
            best = Some((lo + idx, err));
        }
    }
    best.filter(|(_, err)| *err <= params.max_dist)
}
