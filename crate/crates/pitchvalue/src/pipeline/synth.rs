//! Seeded synthetic league generator.
//!
//! Produces event and tracking files that parse through the normal loaders,
//! plus a ground-truth file recording what was injected: per-area pass
//! destination mixtures, per-team aggressiveness and counter-attack counts.
//! Matches are built from alternating possession episodes; a team's
//! aggressiveness controls how far its episodes advance per event and how
//! much open space its runners find, so downstream sequence metrics have a
//! known signal to recover. Everything is a pure function of the seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{area_of, AreaPartition, AttackDir, PitchSpec, Vec2, N_AREAS};
use crate::pipeline::events::{EventLine, EventType, MetaBody};
use crate::pipeline::tracking::FrameLine;

/// One Gaussian component of a pass-destination mixture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: [f64; 2],
    pub sigma: f64,
}

/// Per-area destination mixture in attack-normalized coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PassEndMixture {
    pub components: Vec<MixtureComponent>,
}

impl PassEndMixture {
    /// Built-in default: destinations ahead of the area, pulled toward the
    /// central corridor.
    pub fn default_for_area(area: usize, pitch: &PitchSpec) -> PassEndMixture {
        let col = (area - 1) / 3;
        let row = (area - 1) % 3;
        let xc = -pitch.length / 2.0 + (col as f64 + 0.5) * pitch.length / 6.0;
        let yc = -pitch.width / 2.0 + (row as f64 + 0.5) * pitch.width / 3.0;
        let cap = pitch.length / 2.0 - 4.0;
        PassEndMixture {
            components: vec![
                MixtureComponent {
                    weight: 0.6,
                    mean: [(xc + 12.0).min(cap), yc * 0.45],
                    sigma: 5.5,
                },
                MixtureComponent {
                    weight: 0.4,
                    mean: [(xc + 26.0).min(cap), yc * 0.2],
                    sigma: 8.0,
                },
            ],
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng, pitch: &PitchSpec) -> Vec2 {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        let mut pick = rng.gen_range(0.0..total);
        let mut chosen = &self.components[self.components.len() - 1];
        for c in &self.components {
            if pick < c.weight {
                chosen = c;
                break;
            }
            pick -= c.weight;
        }
        let p = Vec2::new(
            chosen.mean[0] + gauss(rng) * chosen.sigma,
            chosen.mean[1] + gauss(rng) * chosen.sigma,
        );
        pitch.clamp(p)
    }

    /// True mixture density (ignoring the boundary clamp).
    pub fn density(&self, p: Vec2) -> f64 {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        self.components
            .iter()
            .map(|c| {
                let dx = p.x - c.mean[0];
                let dy = p.y - c.mean[1];
                let s2 = c.sigma * c.sigma;
                (c.weight / total) * (-(dx * dx + dy * dy) / (2.0 * s2)).exp()
                    / (2.0 * std::f64::consts::PI * s2)
            })
            .sum()
    }
}

/// Standard normal draw (Box-Muller).
pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u1.ln()).sqrt() * u2.cos()
}

/// Injected counter-attack counts per match.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CounterCounts {
    pub success: usize,
    pub fail: usize,
}

impl Default for CounterCounts {
    fn default() -> Self {
        CounterCounts {
            success: 4,
            fail: 3,
        }
    }
}

/// Generator configuration, loadable from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub teams: usize,
    pub matches: usize,
    #[serde(default = "default_episodes")]
    pub episodes_per_match: usize,
    #[serde(default)]
    pub counters_per_match: CounterCounts,
    #[serde(default = "default_spacing")]
    pub event_spacing: f64,
    #[serde(default = "default_pass_probability")]
    pub pass_probability: f64,
    /// Per-team aggressiveness in [0, 1]; defaults to an even spread.
    #[serde(default)]
    pub aggressiveness: Option<BTreeMap<String, f64>>,
    /// Per-area destination mixtures keyed by area id; defaults built in.
    #[serde(default)]
    pub mixtures: Option<BTreeMap<String, PassEndMixture>>,
}

fn default_episodes() -> usize {
    60
}

fn default_spacing() -> f64 {
    2.0
}

fn default_pass_probability() -> f64 {
    0.55
}

impl GeneratorSpec {
    pub fn from_json(path: &Path) -> Result<GeneratorSpec> {
        let text = std::fs::read_to_string(path)?;
        let spec: GeneratorSpec = serde_json::from_str(&text)
            .map_err(|e| Error::invalid_format(format!("generator spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.teams < 2 {
            return Err(Error::invalid_argument("need at least 2 teams"));
        }
        if self.matches == 0 {
            return Err(Error::invalid_argument("need at least 1 match"));
        }
        if self.episodes_per_match < 2 {
            return Err(Error::invalid_argument("need at least 2 episodes per match"));
        }
        if self.event_spacing <= 0.0 {
            return Err(Error::invalid_argument("event spacing must be positive"));
        }
        if !(0.0..=1.0).contains(&self.pass_probability) {
            return Err(Error::invalid_argument("pass probability must be in [0, 1]"));
        }
        if let Some(aggr) = &self.aggressiveness {
            if let Some((team, a)) = aggr.iter().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
                return Err(Error::invalid_argument(format!(
                    "aggressiveness for {team} out of [0, 1]: {a}"
                )));
            }
        }
        if let Some(mixtures) = &self.mixtures {
            for (area, mix) in mixtures {
                let id: usize = area.parse().map_err(|_| {
                    Error::invalid_argument(format!("mixture key {area:?} is not an area id"))
                })?;
                if !(1..=N_AREAS).contains(&id) {
                    return Err(Error::invalid_argument(format!(
                        "mixture area {id} outside 1..={N_AREAS}"
                    )));
                }
                if mix.components.is_empty()
                    || mix.components.iter().any(|c| c.weight <= 0.0 || c.sigma <= 0.0)
                {
                    return Err(Error::invalid_argument(format!(
                        "mixture for area {id} needs positive weights and sigmas"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn team_ids(&self) -> Vec<String> {
        (0..self.teams).map(|i| format!("T{:02}", i + 1)).collect()
    }

    pub fn aggressiveness_of(&self, idx: usize, team: &str) -> f64 {
        if let Some(map) = &self.aggressiveness {
            if let Some(a) = map.get(team) {
                return *a;
            }
        }
        if self.teams == 1 {
            0.5
        } else {
            idx as f64 / (self.teams - 1) as f64
        }
    }

    pub fn mixture_for(&self, area: usize, pitch: &PitchSpec) -> PassEndMixture {
        if let Some(map) = &self.mixtures {
            if let Some(m) = map.get(&area.to_string()) {
                return m.clone();
            }
        }
        PassEndMixture::default_for_area(area, pitch)
    }
}

/// What the generator injected, for downstream verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub team_aggressiveness: BTreeMap<String, f64>,
    /// Passes emitted per start area (before any mirroring).
    pub area_counts: BTreeMap<String, usize>,
    pub mixtures: BTreeMap<String, PassEndMixture>,
    pub counters: CounterTotals,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CounterTotals {
    pub success: usize,
    pub fail: usize,
}

/// Paths written by the generator.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub events_path: PathBuf,
    pub tracking_path: PathBuf,
    pub ground_truth_path: PathBuf,
}

const FRAME_DT: f64 = 0.1;
const MATCH_TIME_GAP: f64 = 10_000.0;

/// Generate a synthetic league into `out_dir`: `events.jsonl`,
/// `tracking.jsonl` and `ground_truth.json`. Deterministic per seed.
pub fn generate_synthetic(spec: &GeneratorSpec, seed: u64, out_dir: &Path) -> Result<SynthOutput> {
    spec.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let pitch = PitchSpec::default();
    let part = AreaPartition::new();
    let teams = spec.team_ids();

    let events_path = out_dir.join("events.jsonl");
    let tracking_path = out_dir.join("tracking.jsonl");
    let ground_truth_path = out_dir.join("ground_truth.json");

    let mut blocks = Vec::new();
    let mut tracking = crate::pipeline::tracking::TrackingWriter::create(&tracking_path)?;
    let mut area_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut counters = CounterTotals {
        success: 0,
        fail: 0,
    };
    let mut event_id = 1u64;
    let mut frame_id = 0u64;

    for m in 0..spec.matches {
        let home_idx = (2 * m) % spec.teams;
        let away_idx = (2 * m + 1) % spec.teams;
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let match_ctx = MatchContext {
            match_id: format!("M{:03}", m + 1),
            home: teams[home_idx].clone(),
            away: teams[away_idx].clone(),
            home_aggr: spec.aggressiveness_of(home_idx, &teams[home_idx]),
            away_aggr: spec.aggressiveness_of(away_idx, &teams[away_idx]),
            t0: m as f64 * MATCH_TIME_GAP,
        };
        let (block, match_frames, stats) = generate_match(
            spec,
            &match_ctx,
            &pitch,
            &part,
            &mut rng,
            &mut event_id,
            &mut frame_id,
        );
        for (area, n) in stats.area_counts {
            *area_counts.entry(area).or_insert(0) += n;
        }
        counters.success += stats.success_counters;
        counters.fail += stats.fail_counters;
        blocks.push(block);
        for frame in &match_frames {
            tracking.append(frame)?;
        }
    }

    crate::pipeline::events::write_events(&events_path, &blocks)?;
    tracking.finish()?;

    let mut mixtures = BTreeMap::new();
    for area in 1..=N_AREAS {
        mixtures.insert(area.to_string(), spec.mixture_for(area, &pitch));
    }
    let truth = GroundTruth {
        team_aggressiveness: teams
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), spec.aggressiveness_of(i, t)))
            .collect(),
        area_counts,
        mixtures,
        counters,
        seed,
    };
    let json = serde_json::to_string_pretty(&truth)
        .map_err(|e| Error::invalid_format(format!("ground truth encode: {e}")))?;
    std::fs::write(&ground_truth_path, json)?;

    Ok(SynthOutput {
        events_path,
        tracking_path,
        ground_truth_path,
    })
}

struct MatchContext {
    match_id: String,
    home: String,
    away: String,
    home_aggr: f64,
    away_aggr: f64,
    t0: f64,
}

struct MatchStats {
    area_counts: BTreeMap<String, usize>,
    success_counters: usize,
    fail_counters: usize,
}

/// Episode flavor decides pacing and how much space the defense concedes.
#[derive(Clone, Copy, PartialEq)]
enum EpisodeKind {
    Normal,
    CounterSuccess,
    CounterFail,
    SetPieceStart,
}

struct PlannedEvent {
    line: EventLine,
    /// Ball location in pitch coordinates at the event.
    ball: Vec2,
    /// Possession team and its attack sign at this instant.
    possession_home: bool,
    shape: SpaceShape,
}

/// How much forward space the defense concedes at one instant.
#[derive(Clone, Copy)]
struct SpaceShape {
    /// Defensive line distance ahead of the ball.
    defense_gap: f64,
    /// Offset of the remaining defenders relative to the ball; positive
    /// values park a block in the forward space, negative ones trail it.
    trailer_offset: f64,
    /// How far ahead of the ball the runners position.
    runner_ahead: f64,
}

impl SpaceShape {
    /// The scramble right at the regain looks the same for everyone.
    fn neutral() -> SpaceShape {
        SpaceShape {
            defense_gap: 8.0,
            trailer_offset: 6.0,
            runner_ahead: 8.0,
        }
    }

    fn for_aggressiveness(a: f64) -> SpaceShape {
        SpaceShape {
            defense_gap: 4.0 + 24.0 * a,
            trailer_offset: 12.0 - 22.0 * a,
            runner_ahead: 6.0 + 10.0 * a,
        }
    }

    fn open_counter() -> SpaceShape {
        SpaceShape {
            defense_gap: 28.0,
            trailer_offset: -10.0,
            runner_ahead: 12.0,
        }
    }

    fn crowded_counter() -> SpaceShape {
        SpaceShape {
            defense_gap: 8.0,
            trailer_offset: 14.0,
            runner_ahead: 8.0,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn generate_match(
    spec: &GeneratorSpec,
    ctx: &MatchContext,
    pitch: &PitchSpec,
    part: &AreaPartition,
    rng: &mut ChaCha8Rng,
    event_id: &mut u64,
    frame_id: &mut u64,
) -> ((MetaBody, Vec<EventLine>), Vec<FrameLine>, MatchStats) {
    let mut stats = MatchStats {
        area_counts: BTreeMap::new(),
        success_counters: 0,
        fail_counters: 0,
    };

    // Plan which episodes carry injected counters, spread through the match.
    let n_ep = spec.episodes_per_match;
    let mut kinds = vec![EpisodeKind::Normal; n_ep];
    let injected = spec.counters_per_match.success + spec.counters_per_match.fail;
    if injected > 0 && n_ep > 1 {
        let stride = (n_ep - 1).max(1) as f64 / injected.max(1) as f64;
        for k in 0..injected {
            let slot = ((k as f64 + 0.5) * stride) as usize;
            let slot = slot.min(n_ep - 1).max(1);
            kinds[slot] = if k < spec.counters_per_match.success {
                EpisodeKind::CounterSuccess
            } else {
                EpisodeKind::CounterFail
            };
        }
    }
    // A few restart-opened episodes exercise the set-piece exclusion.
    for k in (7..n_ep).step_by(13) {
        if kinds[k] == EpisodeKind::Normal {
            kinds[k] = EpisodeKind::SetPieceStart;
        }
    }

    let mut planned: Vec<PlannedEvent> = Vec::new();
    let mut t = ctx.t0 + 1.0;
    let mut home_possession = true;

    for kind in kinds {
        let aggr = if home_possession {
            ctx.home_aggr
        } else {
            ctx.away_aggr
        };
        let team = if home_possession { &ctx.home } else { &ctx.away };
        let (n_events, step_adv, shape, label, shot_at_end) = match kind {
            EpisodeKind::Normal | EpisodeKind::SetPieceStart => {
                let n = rng.gen_range(3..=6);
                let step = 4.0 + 16.0 * aggr + rng.gen_range(-1.0..1.0);
                (n, step, SpaceShape::for_aggressiveness(aggr), None, false)
            }
            EpisodeKind::CounterSuccess => {
                stats.success_counters += 1;
                (
                    4,
                    14.0 + rng.gen_range(0.0..2.0),
                    SpaceShape::open_counter(),
                    Some("From Counter"),
                    true,
                )
            }
            EpisodeKind::CounterFail => {
                stats.fail_counters += 1;
                (
                    4,
                    7.0 + rng.gen_range(0.0..1.0),
                    SpaceShape::crowded_counter(),
                    Some("From Counter"),
                    false,
                )
            }
        };

        // Regain deep in the gaining team's half, in its attack frame.
        let mut pos = Vec2::new(
            rng.gen_range(-45.0..-25.0),
            rng.gen_range(-18.0..18.0),
        );
        for i in 0..n_events {
            let first = i == 0;
            let last = i == n_events - 1;
            let event_type = if first {
                match kind {
                    EpisodeKind::SetPieceStart => EventType::ThrowIn,
                    _ => EventType::Interception,
                }
            } else if last {
                if shot_at_end {
                    EventType::Shot
                } else if rng.gen_bool(0.3) {
                    EventType::Clearance
                } else {
                    EventType::Carry
                }
            } else if rng.gen_bool(spec.pass_probability) {
                EventType::Pass
            } else {
                EventType::Carry
            };

            let pass_end = if event_type == EventType::Pass {
                let area = area_of(pos, part, pitch);
                *stats.area_counts.entry(area.to_string()).or_insert(0) += 1;
                Some(spec.mixture_for(area, pitch).sample(rng, pitch))
            } else {
                None
            };

            // Pitch-frame location: the away side attacks -x.
            let sign = if home_possession { 1.0 } else { -1.0 };
            let ball_pitch = Vec2::new(pos.x * sign, pos.y * sign);
            planned.push(PlannedEvent {
                line: EventLine {
                    event_id: *event_id,
                    match_id: ctx.match_id.clone(),
                    event_type,
                    team_id: team.clone(),
                    player_id: format!("{team}_P{:02}", rng.gen_range(2..=11)),
                    t,
                    x: ball_pitch.x,
                    y: ball_pitch.y,
                    pass_end_x: pass_end.map(|p| p.x * sign),
                    pass_end_y: pass_end.map(|p| p.y * sign),
                    play_pattern: label.map(|s| s.to_string()),
                    possession_id: None,
                },
                ball: ball_pitch,
                possession_home: home_possession,
                shape: if first { SpaceShape::neutral() } else { shape },
            });
            *event_id += 1;
            t += spec.event_spacing;

            if !last {
                let drift = (0.0 - pos.y) * 0.15 + rng.gen_range(-3.0..3.0);
                pos = pitch.clamp(Vec2::new(
                    (pos.x + step_adv).min(pitch.length / 2.0 - 4.0),
                    pos.y + drift,
                ));
            }
        }
        home_possession = !home_possession;
    }

    let frames = lay_out_tracking(ctx, &planned, pitch, rng, frame_id);
    let mut directions = BTreeMap::new();
    directions.insert(ctx.home.clone(), AttackDir::PlusX);
    directions.insert(ctx.away.clone(), AttackDir::MinusX);
    let meta = MetaBody {
        attack_direction: directions,
        period: Some(1),
    };
    let lines = planned.into_iter().map(|p| p.line).collect();
    ((meta, lines), frames, stats)
}

/// Emit 10 fps frames: ball interpolates between event locations, players
/// interpolate between per-event waypoints.
fn lay_out_tracking(
    ctx: &MatchContext,
    planned: &[PlannedEvent],
    pitch: &PitchSpec,
    rng: &mut ChaCha8Rng,
    frame_id: &mut u64,
) -> Vec<FrameLine> {
    if planned.is_empty() {
        return Vec::new();
    }
    // Waypoints per event for all 22 players.
    let waypoints: Vec<Vec<(String, String, Vec2)>> = planned
        .iter()
        .map(|ev| place_players(ctx, ev, pitch, rng))
        .collect();

    let t_start = planned[0].line.t - 0.5;
    let t_end = planned[planned.len() - 1].line.t + 0.5;
    let n_frames = ((t_end - t_start) / FRAME_DT).round() as usize + 1;
    let mut frames = Vec::with_capacity(n_frames);
    let mut seg = 0usize;
    for k in 0..n_frames {
        // Round to the frame grid to keep event and frame clocks aligned.
        let t = ((t_start + k as f64 * FRAME_DT) / FRAME_DT).round() * FRAME_DT;
        while seg + 1 < planned.len() && planned[seg + 1].line.t <= t {
            seg += 1;
        }
        let (ball, blend) = if seg + 1 < planned.len() && t >= planned[seg].line.t {
            let a = &planned[seg];
            let b = &planned[seg + 1];
            let u = ((t - a.line.t) / (b.line.t - a.line.t)).clamp(0.0, 1.0);
            (a.ball + (b.ball - a.ball) * u, u)
        } else {
            (planned[seg].ball, 0.0)
        };
        let players: Vec<(String, String, f64, f64)> = if seg + 1 < waypoints.len() {
            waypoints[seg]
                .iter()
                .zip(&waypoints[seg + 1])
                .map(|((id, team, p0), (_, _, p1))| {
                    let p = *p0 + (*p1 - *p0) * blend;
                    (id.clone(), team.clone(), p.x, p.y)
                })
                .collect()
        } else {
            waypoints[seg]
                .iter()
                .map(|(id, team, p)| (id.clone(), team.clone(), p.x, p.y))
                .collect()
        };
        frames.push(FrameLine {
            frame: *frame_id,
            t,
            ball: [ball.x, ball.y],
            players,
        });
        *frame_id += 1;
    }
    frames
}

/// Player waypoints for one event, in pitch coordinates. Output order is
/// fixed (home 1..11, then away 1..11) so consecutive waypoint sets pair the
/// same player regardless of who has the ball.
fn place_players(
    ctx: &MatchContext,
    ev: &PlannedEvent,
    pitch: &PitchSpec,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, String, Vec2)> {
    let sign = if ev.possession_home { 1.0 } else { -1.0 };
    // Work in the possession team's attack frame.
    let ball = Vec2::new(ev.ball.x * sign, ev.ball.y * sign);
    let jitter = |scale: f64, rng: &mut ChaCha8Rng| rng.gen_range(-scale..scale);

    // Possession team: keeper, back line, support, runners ahead.
    let mut possession: Vec<Vec2> = Vec::with_capacity(11);
    possession.push(Vec2::new(-pitch.length / 2.0 + 4.0, jitter(2.0, rng)));
    for y in [-18.0, -6.0, 6.0, 18.0] {
        possession.push(Vec2::new(
            (ball.x - 15.0).max(-46.0) + jitter(1.5, rng),
            y + jitter(1.5, rng),
        ));
    }
    for y in [-11.0, 0.0, 11.0] {
        possession.push(Vec2::new(ball.x - 4.0 + jitter(1.5, rng), y + jitter(1.5, rng)));
    }
    for y in [-9.0, 0.5, 9.0] {
        possession.push(Vec2::new(
            ball.x + ev.shape.runner_ahead + jitter(1.0, rng),
            y + jitter(1.0, rng),
        ));
    }

    // Defending team: keeper, a line at the conceded gap, a presser on the
    // ball, and the rest either blocking the forward space or trailing it.
    let mut defending: Vec<Vec2> = Vec::with_capacity(11);
    defending.push(Vec2::new(pitch.length / 2.0 - 4.0, jitter(2.0, rng)));
    for y in [-14.0, -5.0, 4.0, 13.0] {
        defending.push(Vec2::new(
            (ball.x + ev.shape.defense_gap).min(pitch.length / 2.0 - 8.0) + jitter(1.0, rng),
            y + jitter(1.0, rng),
        ));
    }
    defending.push(ball + Vec2::new(-2.0 + jitter(0.5, rng), 1.5 + jitter(0.5, rng)));
    for y in [-16.0, -8.0, 0.0, 8.0, 16.0] {
        defending.push(Vec2::new(
            ball.x + ev.shape.trailer_offset + jitter(2.0, rng),
            y + jitter(2.0, rng),
        ));
    }

    let (home_spots, away_spots) = if ev.possession_home {
        (possession, defending)
    } else {
        (defending, possession)
    };
    let mut out = Vec::with_capacity(22);
    for (team, spots) in [(&ctx.home, home_spots), (&ctx.away, away_spots)] {
        for (k, p) in spots.into_iter().enumerate() {
            let pitch_frame = Vec2::new(p.x * sign, p.y * sign);
            out.push((
                format!("{team}_P{:02}", k + 1),
                team.clone(),
                pitch.clamp(pitch_frame),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::events::load_events;
    use crate::pipeline::tracking::load_tracking;

    fn small_spec() -> GeneratorSpec {
        GeneratorSpec {
            teams: 2,
            matches: 1,
            episodes_per_match: 12,
            counters_per_match: CounterCounts {
                success: 2,
                fail: 1,
            },
            event_spacing: 2.0,
            pass_probability: 0.55,
            aggressiveness: None,
            mixtures: None,
        }
    }

    fn out_dir(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("pitchvalue-synth-test").join(name);
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = small_spec();
        let d1 = out_dir("a");
        let d2 = out_dir("b");
        generate_synthetic(&spec, 7, &d1).unwrap();
        generate_synthetic(&spec, 7, &d2).unwrap();
        for name in ["events.jsonl", "tracking.jsonl", "ground_truth.json"] {
            let a = std::fs::read(d1.join(name)).unwrap();
            let b = std::fs::read(d2.join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
        let d3 = out_dir("c");
        generate_synthetic(&spec, 8, &d3).unwrap();
        let a = std::fs::read(d1.join("events.jsonl")).unwrap();
        let c = std::fs::read(d3.join("events.jsonl")).unwrap();
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn output_round_trips_through_loaders() {
        let spec = small_spec();
        let dir = out_dir("roundtrip");
        let paths = generate_synthetic(&spec, 3, &dir).unwrap();
        let log = load_events(&paths.events_path).unwrap();
        assert_eq!(log.malformed, 0);
        assert!(!log.events.is_empty());
        let frames = load_tracking(&paths.tracking_path).unwrap();
        assert!(!frames.is_empty());
        assert!(frames.windows(2).all(|w| w[0].t <= w[1].t));
        assert_eq!(frames[0].players.len(), 22);
    }

    #[test]
    fn ground_truth_counts_match_emitted_passes() {
        let spec = small_spec();
        let dir = out_dir("counts");
        let paths = generate_synthetic(&spec, 5, &dir).unwrap();
        let log = load_events(&paths.events_path).unwrap();
        let truth: GroundTruth =
            serde_json::from_str(&std::fs::read_to_string(&paths.ground_truth_path).unwrap())
                .unwrap();
        let total_truth: usize = truth.area_counts.values().sum();
        let total_passes = log
            .events
            .iter()
            .filter(|e| e.event_type == EventType::Pass)
            .count();
        assert_eq!(total_truth, total_passes);
        assert_eq!(
            truth.counters.success + truth.counters.fail,
            spec.counters_per_match.success + spec.counters_per_match.fail
        );
    }

    #[test]
    fn fitted_counts_are_mirror_sums_of_ground_truth() {
        use crate::geometry::{AreaPartition, N_AREAS};
        use crate::pipeline::events::extract_pass_samples;
        use crate::transition::{fit_transition_kernel, FitOptions};

        let spec = GeneratorSpec {
            episodes_per_match: 40,
            ..small_spec()
        };
        let dir = out_dir("mirrorsum");
        let paths = generate_synthetic(&spec, 9, &dir).unwrap();
        let log = load_events(&paths.events_path).unwrap();
        let truth: GroundTruth =
            serde_json::from_str(&std::fs::read_to_string(&paths.ground_truth_path).unwrap())
                .unwrap();
        let samples = extract_pass_samples(&log);
        let part = AreaPartition::new();
        let pitch = crate::geometry::PitchSpec::default();
        let model = fit_transition_kernel(
            &samples,
            &part,
            &pitch,
            FitOptions {
                mirror: true,
                min_samples: 1,
            },
        )
        .unwrap();
        let count = |area: usize| {
            truth
                .area_counts
                .get(&area.to_string())
                .copied()
                .unwrap_or(0)
        };
        let mut covered = 0;
        for area in 1..=N_AREAS {
            let expected = count(area) + count(part.mirror_area(area));
            if model.is_fitted(area) {
                assert_eq!(model.kernel_for(area).unwrap().n(), expected, "area {area}");
            } else {
                // A bandwidth needs at least two spread samples.
                assert!(expected < 2, "area {area}: {expected} samples unfitted");
            }
            covered += expected;
        }
        let total_truth: usize = truth.area_counts.values().sum();
        assert_eq!(covered, 2 * total_truth);
        assert_eq!(model.fallback().n(), 2 * total_truth);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = small_spec();
        spec.teams = 1;
        assert!(matches!(
            spec.validate(),
            Err(Error::InvalidArgument(_))
        ));
        let mut spec = small_spec();
        spec.event_spacing = 0.0;
        assert!(spec.validate().is_err());
        let mut spec = small_spec();
        spec.mixtures = Some(
            [(
                "99".to_string(),
                PassEndMixture {
                    components: vec![MixtureComponent {
                        weight: 1.0,
                        mean: [0.0, 0.0],
                        sigma: 5.0,
                    }],
                },
            )]
            .into_iter()
            .collect(),
        );
        assert!(spec.validate().is_err());
    }
}
