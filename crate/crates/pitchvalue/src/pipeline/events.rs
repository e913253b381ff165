//! Event file ingestion.
//!
//! Events arrive as JSON lines: one object per event, interleaved with meta
//! lines that declare each team's attack direction for the following events.
//! Coordinates are meters from the pitch center.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AttackDir, Vec2};
use crate::transition::PassSample;

/// On-ball event categories. Unknown strings map to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventType {
    Pass,
    Shot,
    Carry,
    Duel,
    Clearance,
    Interception,
    ThrowIn,
    GoalKick,
    FreeKick,
    KickOff,
    #[serde(other)]
    Other,
}

impl EventType {
    /// Restart types excluded from open-play transition analysis.
    pub fn is_set_piece(&self) -> bool {
        matches!(
            self,
            EventType::ThrowIn | EventType::GoalKick | EventType::FreeKick | EventType::KickOff
        )
    }
}

/// One parsed event with its team's attack direction resolved from the most
/// recent meta line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: u64,
    pub match_id: String,
    pub event_type: EventType,
    pub team_id: String,
    pub player_id: String,
    pub t: f64,
    pub location: Vec2,
    pub pass_end: Option<Vec2>,
    pub play_pattern: Option<String>,
    pub possession_id: Option<i64>,
    pub attack_dir: Option<AttackDir>,
}

impl EventRecord {
    /// Location in attack-normalized coordinates (+x toward the opponent
    /// goal). Events without a resolved direction are assumed +x.
    pub fn normalized_location(&self) -> Vec2 {
        match self.attack_dir {
            Some(AttackDir::MinusX) => self.location.rotated(),
            _ => self.location,
        }
    }

    pub fn normalized_pass_end(&self) -> Option<Vec2> {
        self.pass_end.map(|p| match self.attack_dir {
            Some(AttackDir::MinusX) => p.rotated(),
            _ => p,
        })
    }
}

/// Result of loading an event file: records sorted by timestamp plus
/// malformed-line accounting.
#[derive(Debug, Clone)]
pub struct EventLog {
    pub events: Vec<EventRecord>,
    pub malformed: usize,
    pub total_lines: usize,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct EventLine {
    pub event_id: u64,
    pub match_id: String,
    #[serde(rename = "type")]
    pub event_type: EventType,
    pub team_id: String,
    pub player_id: String,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_end_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass_end_y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub play_pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub possession_id: Option<i64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MetaLine {
    pub meta: MetaBody,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MetaBody {
    pub attack_direction: BTreeMap<String, AttackDir>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<u32>,
}

/// Load an event file. Malformed lines are skipped and counted; more than
/// 10% malformed fails the whole file.
pub fn load_events(path: &Path) -> Result<EventLog> {
    let text = std::fs::read_to_string(path)?;
    let mut events = Vec::new();
    let mut malformed = 0usize;
    let mut total_lines = 0usize;
    let mut directions: BTreeMap<String, AttackDir> = BTreeMap::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        total_lines += 1;
        if let Ok(meta) = serde_json::from_str::<MetaLine>(line) {
            directions.extend(meta.meta.attack_direction);
            continue;
        }
        match serde_json::from_str::<EventLine>(line) {
            Ok(ev) if event_line_is_sound(&ev) => {
                let pass_end = match (ev.pass_end_x, ev.pass_end_y) {
                    (Some(x), Some(y)) => Some(Vec2::new(x, y)),
                    _ => None,
                };
                if ev.event_type == EventType::Pass && pass_end.is_none() {
                    malformed += 1;
                    continue;
                }
                events.push(EventRecord {
                    event_id: ev.event_id,
                    attack_dir: directions.get(&ev.team_id).copied(),
                    match_id: ev.match_id,
                    event_type: ev.event_type,
                    team_id: ev.team_id,
                    player_id: ev.player_id,
                    t: ev.t,
                    location: Vec2::new(ev.x, ev.y),
                    pass_end,
                    play_pattern: ev.play_pattern,
                    possession_id: ev.possession_id,
                });
            }
            _ => malformed += 1,
        }
    }
    if total_lines > 0 && malformed * 10 > total_lines {
        return Err(Error::invalid_format(format!(
            "{malformed} of {total_lines} lines malformed"
        )));
    }
    events.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.event_id.cmp(&b.event_id)));
    Ok(EventLog {
        events,
        malformed,
        total_lines,
    })
}

fn event_line_is_sound(ev: &EventLine) -> bool {
    ev.t.is_finite() && ev.t >= 0.0 && ev.x.is_finite() && ev.y.is_finite()
}

/// Attack-normalized pass samples from the pass events of a log.
pub fn extract_pass_samples(log: &EventLog) -> Vec<PassSample> {
    log.events
        .iter()
        .filter(|e| e.event_type == EventType::Pass)
        .filter_map(|e| {
            let end = e.normalized_pass_end()?;
            Some(PassSample {
                start: e.normalized_location(),
                end,
            })
        })
        .collect()
}

/// Write an event file: one meta line per direction block, then event lines.
pub(crate) fn write_events(path: &Path, blocks: &[(MetaBody, Vec<EventLine>)]) -> Result<()> {
    use std::io::Write;
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    for (meta, lines) in blocks {
        let meta_json = serde_json::to_string(&MetaLine {
            meta: MetaBody {
                attack_direction: meta.attack_direction.clone(),
                period: meta.period,
            },
        })
        .map_err(|e| Error::invalid_format(format!("meta encode: {e}")))?;
        writeln!(out, "{meta_json}")?;
        for line in lines {
            let json = serde_json::to_string(line)
                .map_err(|e| Error::invalid_format(format!("event encode: {e}")))?;
            writeln!(out, "{json}")?;
        }
    }
    out.flush()?;
    Ok(())
}
