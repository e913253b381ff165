//! Tracking file ingestion and snapshot construction.
//!
//! Frames arrive as JSON lines holding the ball position and every tracked
//! player. Velocities are not part of the schema; they are derived by central
//! differences over neighbouring frames.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AttackDir, PlayerState, Snapshot, Team, Vec2};

/// Hard cap on derived player speed; tracking glitches can imply teleports.
pub const MAX_PLAYER_SPEED: f64 = 13.0;

/// One tracked player within a frame.
#[derive(Debug, Clone)]
pub struct TrackedPlayer {
    pub player_id: String,
    pub team_id: String,
    pub position: Vec2,
    pub velocity: Vec2,
}

/// One frame of tracking data.
#[derive(Debug, Clone)]
pub struct TrackingFrame {
    pub frame_id: u64,
    pub t: f64,
    pub ball: Vec2,
    pub players: Vec<TrackedPlayer>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FrameLine {
    pub frame: u64,
    pub t: f64,
    pub ball: [f64; 2],
    pub players: Vec<(String, String, f64, f64)>,
}

/// Load a tracking file: frames sorted by time, velocities derived by central
/// difference (one-sided at either end of a player's observations).
pub fn load_tracking(path: &Path) -> Result<Vec<TrackingFrame>> {
    let text = std::fs::read_to_string(path)?;
    let mut frames: Vec<TrackingFrame> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: FrameLine = serde_json::from_str(line).map_err(|e| {
            Error::invalid_format(format!("tracking line {}: {e}", lineno + 1))
        })?;
        if !parsed.t.is_finite() || !parsed.ball.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid_format(format!(
                "tracking line {}: non-finite values",
                lineno + 1
            )));
        }
        frames.push(TrackingFrame {
            frame_id: parsed.frame,
            t: parsed.t,
            ball: Vec2::new(parsed.ball[0], parsed.ball[1]),
            players: parsed
                .players
                .into_iter()
                .map(|(player_id, team_id, x, y)| TrackedPlayer {
                    player_id,
                    team_id,
                    position: Vec2::new(x, y),
                    velocity: Vec2::ZERO,
                })
                .collect(),
        });
    }
    frames.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.frame_id.cmp(&b.frame_id)));
    derive_velocities(&mut frames);
    Ok(frames)
}

/// Fill in player velocities across a sorted frame sequence.
fn derive_velocities(frames: &mut [TrackingFrame]) {
    // Observation list per player: (frame index, slot within frame).
    let mut tracks: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
    for (fi, frame) in frames.iter().enumerate() {
        for (slot, player) in frame.players.iter().enumerate() {
            tracks
                .entry(player.player_id.clone())
                .or_default()
                .push((fi, slot));
        }
    }
    for obs in tracks.values() {
        for (k, &(fi, slot)) in obs.iter().enumerate() {
            let before = if k > 0 { Some(obs[k - 1]) } else { None };
            let after = if k + 1 < obs.len() {
                Some(obs[k + 1])
            } else {
                None
            };
            let (pa, ta, pb, tb) = match (before, after) {
                (Some((bi, bs)), Some((ai, as_))) => (
                    frames[bi].players[bs].position,
                    frames[bi].t,
                    frames[ai].players[as_].position,
                    frames[ai].t,
                ),
                (None, Some((ai, as_))) => (
                    frames[fi].players[slot].position,
                    frames[fi].t,
                    frames[ai].players[as_].position,
                    frames[ai].t,
                ),
                (Some((bi, bs)), None) => (
                    frames[bi].players[bs].position,
                    frames[bi].t,
                    frames[fi].players[slot].position,
                    frames[fi].t,
                ),
                (None, None) => {
                    continue;
                }
            };
            let dt = tb - ta;
            if dt <= 0.0 {
                continue;
            }
            let mut v = (pb - pa) * (1.0 / dt);
            let speed = v.norm();
            if speed > MAX_PLAYER_SPEED {
                v = v * (MAX_PLAYER_SPEED / speed);
            }
            frames[fi].players[slot].velocity = v;
        }
    }
}

/// Build an evaluation snapshot from a frame: players of `attacking_team` are
/// the attackers, everyone else defends.
pub fn snapshot_from_frame(
    frame: &TrackingFrame,
    attacking_team: &str,
    dir: AttackDir,
) -> Result<Snapshot> {
    let players: Vec<PlayerState> = frame
        .players
        .iter()
        .map(|p| PlayerState {
            player_id: p.player_id.clone(),
            team: if p.team_id == attacking_team {
                Team::Attacking
            } else {
                Team::Defending
            },
            position: p.position,
            velocity: p.velocity,
        })
        .collect();
    if !players.iter().any(|p| p.team == Team::Attacking) {
        return Err(Error::invalid_argument(format!(
            "no players of team {attacking_team} in frame {}",
            frame.frame_id
        )));
    }
    Ok(Snapshot {
        timestamp: frame.t,
        ball: frame.ball,
        ball_velocity: None,
        players,
        attack_direction: dir,
    })
}

/// Incremental tracking-file writer used by the generator.
pub(crate) struct TrackingWriter {
    out: std::io::BufWriter<std::fs::File>,
}

impl TrackingWriter {
    pub(crate) fn create(path: &Path) -> Result<TrackingWriter> {
        Ok(TrackingWriter {
            out: std::io::BufWriter::new(std::fs::File::create(path)?),
        })
    }

    pub(crate) fn append(&mut self, line: &FrameLine) -> Result<()> {
        use std::io::Write;
        let json = serde_json::to_string(line)
            .map_err(|e| Error::invalid_format(format!("frame encode: {e}")))?;
        writeln!(self.out, "{json}")?;
        Ok(())
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        use std::io::Write;
        self.out.flush()?;
        Ok(())
    }
}
