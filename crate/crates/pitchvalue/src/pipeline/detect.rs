//! Possession transition and counter-attack detection.
//!
//! A transition is a possession change followed by three consecutive events
//! from the gaining team, none of them a restart. Every detection is recorded
//! twice: as a positive transition for the gaining team and a negative one
//! for the losing team. Counter-attacks come either from provider labels or
//! from a rule on turnover location, directness and distance gained.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AttackDir, PitchSpec, Vec2};
use crate::pipeline::events::{EventRecord, EventType};

/// 18 yards, the minimum goal-ward gain for a rule-mode counter.
pub const COUNTER_MIN_GAIN_M: f64 = 16.46;

/// Minimum share of the path that must point at the goal.
pub const COUNTER_MIN_DIRECTNESS: f64 = 0.75;

/// Perspective of a possession change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    Positive,
    Negative,
}

/// A possession change with the gaining team's first three events.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionEvent {
    pub kind: TransitionKind,
    pub events: [EventRecord; 3],
    pub start_location: Vec2,
    pub gaining_team: String,
    pub losing_team: String,
    pub match_id: String,
    /// Index of the first gaining event within its match's event list.
    pub index: usize,
}

impl TransitionEvent {
    /// The team this transition is attributed to.
    pub fn subject_team(&self) -> &str {
        match self.kind {
            TransitionKind::Positive => &self.gaining_team,
            TransitionKind::Negative => &self.losing_team,
        }
    }

    fn gaining_dir(&self) -> AttackDir {
        self.events[0].attack_dir.unwrap_or(AttackDir::PlusX)
    }
}

/// Detect transitions per match: a team change followed by a three-event run
/// of the gaining team with no restarts inside the run. Each instant yields a
/// positive/negative pair.
pub fn detect_transitions(events: &[EventRecord]) -> Vec<TransitionEvent> {
    let mut out = Vec::new();
    for (match_events, _) in split_by_match(events) {
        for k in 0..match_events.len().saturating_sub(3) {
            let prev = &match_events[k];
            let run = &match_events[k + 1..k + 4];
            let gaining = &run[0].team_id;
            if &prev.team_id == gaining {
                continue;
            }
            if run.iter().any(|e| &e.team_id != gaining) {
                continue;
            }
            if run.iter().any(|e| e.event_type.is_set_piece()) {
                continue;
            }
            let events3: [EventRecord; 3] = [run[0].clone(), run[1].clone(), run[2].clone()];
            let base = TransitionEvent {
                kind: TransitionKind::Positive,
                start_location: run[0].location,
                gaining_team: gaining.clone(),
                losing_team: prev.team_id.clone(),
                match_id: run[0].match_id.clone(),
                index: k + 1,
                events: events3,
            };
            let mut negative = base.clone();
            negative.kind = TransitionKind::Negative;
            out.push(base);
            out.push(negative);
        }
    }
    out
}

/// Which goal the distance filter measures from, relative to the subject
/// team (gaining for positive transitions, losing for negative ones).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalReference {
    OwnGoal,
    OppGoal,
}

/// Distance definition for the goal-radius filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Euclidean,
    XOnly,
}

/// Keep transitions starting within `radius` (inclusive) of the reference
/// goal of the subject team.
pub fn filter_transitions_by_distance(
    transitions: &[TransitionEvent],
    radius: f64,
    reference: GoalReference,
    metric: DistanceMetric,
    pitch: &PitchSpec,
) -> Vec<TransitionEvent> {
    transitions
        .iter()
        .filter(|t| {
            let gaining_sign = match t.gaining_dir() {
                AttackDir::PlusX => 1.0,
                AttackDir::MinusX => -1.0,
            };
            let subject_sign = match t.kind {
                TransitionKind::Positive => gaining_sign,
                TransitionKind::Negative => -gaining_sign,
            };
            let goal_x = match reference {
                GoalReference::OwnGoal => -subject_sign * pitch.length / 2.0,
                GoalReference::OppGoal => subject_sign * pitch.length / 2.0,
            };
            let goal = Vec2::new(goal_x, 0.0);
            let d = match metric {
                DistanceMetric::Euclidean => t.start_location.distance(goal),
                DistanceMetric::XOnly => (t.start_location.x - goal.x).abs(),
            };
            d <= radius
        })
        .cloned()
        .collect()
}

/// The standard deep-transition selection: positive transitions near the
/// gaining team's own goal, negative ones near the losing team's opponent
/// goal (the same end of the pitch, seen from both sides).
pub fn filter_deep_transitions(
    transitions: &[TransitionEvent],
    radius: f64,
    metric: DistanceMetric,
    pitch: &PitchSpec,
) -> Vec<TransitionEvent> {
    let mut kept = Vec::new();
    let positives: Vec<TransitionEvent> = transitions
        .iter()
        .filter(|t| t.kind == TransitionKind::Positive)
        .cloned()
        .collect();
    let negatives: Vec<TransitionEvent> = transitions
        .iter()
        .filter(|t| t.kind == TransitionKind::Negative)
        .cloned()
        .collect();
    kept.extend(filter_transitions_by_distance(
        &positives,
        radius,
        GoalReference::OwnGoal,
        metric,
        pitch,
    ));
    kept.extend(filter_transitions_by_distance(
        &negatives,
        radius,
        GoalReference::OppGoal,
        metric,
        pitch,
    ));
    kept
}

/// Counter-attack detection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterMode {
    /// Trust provider play-pattern labels.
    Label,
    /// Apply the turnover/directness/gain rule.
    Rule,
}

/// Which third counts as "final" for the rule-mode turnover condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalThird {
    Attacking,
    Defending,
}

/// Rule-mode thresholds.
#[derive(Debug, Clone, Copy)]
pub struct CounterRuleParams {
    pub min_gain: f64,
    pub min_directness: f64,
    pub final_third: FinalThird,
}

impl Default for CounterRuleParams {
    fn default() -> Self {
        CounterRuleParams {
            min_gain: COUNTER_MIN_GAIN_M,
            min_directness: COUNTER_MIN_DIRECTNESS,
            final_third: FinalThird::Attacking,
        }
    }
}

/// A detected counter-attack: a same-team possession run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterAttack {
    pub events: Vec<EventRecord>,
    pub success: bool,
    pub origin: Vec2,
    pub team_id: String,
    pub match_id: String,
}

pub const COUNTER_LABEL: &str = "From Counter";

/// Detect counter-attacks. Label mode requires play-pattern annotations;
/// rule mode checks the turnover position, path directness and goal-ward
/// gain of each possession run. A counter succeeds when its last event is a
/// shot.
pub fn detect_counters(
    events: &[EventRecord],
    mode: CounterMode,
    params: &CounterRuleParams,
    pitch: &PitchSpec,
) -> Result<Vec<CounterAttack>> {
    if mode == CounterMode::Label && events.iter().all(|e| e.play_pattern.is_none()) {
        return Err(Error::invalid_argument(
            "label mode needs play_pattern annotations",
        ));
    }
    let mut out = Vec::new();
    for (match_events, _) in split_by_match(events) {
        match mode {
            CounterMode::Label => {
                let labeled = |e: &EventRecord| {
                    e.play_pattern.as_deref() == Some(COUNTER_LABEL)
                };
                let mut start = 0usize;
                while start < match_events.len() {
                    if !labeled(match_events[start]) {
                        start += 1;
                        continue;
                    }
                    let team = &match_events[start].team_id;
                    let mut end = start + 1;
                    while end < match_events.len()
                        && labeled(match_events[end])
                        && &match_events[end].team_id == team
                    {
                        end += 1;
                    }
                    if end - start >= 3 {
                        out.push(counter_from_run(&match_events[start..end]));
                    }
                    start = end;
                }
            }
            CounterMode::Rule => {
                for (run_start, run) in possession_runs(&match_events) {
                    if run.len() < 3 {
                        continue;
                    }
                    // Open-play turnover: a preceding opposition event and a
                    // non-restart first touch.
                    if run_start == 0 || run[0].event_type.is_set_piece() {
                        continue;
                    }
                    if !passes_rule(&run, params, pitch) {
                        continue;
                    }
                    out.push(counter_from_run(&run));
                }
            }
        }
    }
    Ok(out)
}

fn passes_rule(run: &[&EventRecord], params: &CounterRuleParams, pitch: &PitchSpec) -> bool {
    let first = run[0].normalized_location();
    let last = run[run.len() - 1].normalized_location();
    let third_edge = pitch.length / 6.0;
    let outside_final_third = match params.final_third {
        FinalThird::Attacking => first.x <= third_edge,
        FinalThird::Defending => first.x >= -third_edge,
    };
    if !outside_final_third {
        return false;
    }
    let gain = last.x - first.x;
    if gain < params.min_gain {
        return false;
    }
    let mut path = 0.0;
    for pair in run.windows(2) {
        path += pair[0]
            .normalized_location()
            .distance(pair[1].normalized_location());
    }
    path > 0.0 && gain / path >= params.min_directness
}

fn counter_from_run(run: &[&EventRecord]) -> CounterAttack {
    CounterAttack {
        success: run.last().map(|e| e.event_type) == Some(EventType::Shot),
        origin: run[0].location,
        team_id: run[0].team_id.clone(),
        match_id: run[0].match_id.clone(),
        events: run.iter().map(|e| (*e).clone()).collect(),
    }
}

/// Maximal same-team runs with their start index in the match's event list.
pub fn possession_runs<'a>(events: &[&'a EventRecord]) -> Vec<(usize, Vec<&'a EventRecord>)> {
    let mut runs = Vec::new();
    let mut start = 0usize;
    while start < events.len() {
        let team = &events[start].team_id;
        let mut end = start + 1;
        while end < events.len() && &events[end].team_id == team {
            end += 1;
        }
        runs.push((start, events[start..end].to_vec()));
        start = end;
    }
    runs
}

/// Group events by match, preserving order within each match.
fn split_by_match(events: &[EventRecord]) -> Vec<(Vec<&EventRecord>, String)> {
    let mut groups: Vec<(Vec<&EventRecord>, String)> = Vec::new();
    for e in events {
        match groups.iter_mut().find(|(_, id)| id == &e.match_id) {
            Some((list, _)) => list.push(e),
            None => groups.push((vec![e], e.match_id.clone())),
        }
    }
    groups
}
