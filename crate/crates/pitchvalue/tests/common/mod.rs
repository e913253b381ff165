//! Shared fixtures and independent oracles for the integration suites.
//!
//! Oracles here deliberately re-derive results from first principles (fine
//! step simulation, brute-force enumeration, direct quadrature) instead of
//! calling the code paths they check.

#![allow(dead_code)]

use pitchvalue::geometry::{AttackDir, PlayerState, Snapshot, Team, Vec2};
use pitchvalue::pipeline::events::{EventRecord, EventType};
use pitchvalue::ppcf::{ControlParams, MotionParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn temp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("pitchvalue-acceptance").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub fn player(id: &str, team: Team, pos: (f64, f64), vel: (f64, f64)) -> PlayerState {
    PlayerState {
        player_id: id.to_string(),
        team,
        position: Vec2::new(pos.0, pos.1),
        velocity: Vec2::new(vel.0, vel.1),
    }
}

pub fn snapshot(ball: (f64, f64), players: Vec<PlayerState>) -> Snapshot {
    Snapshot {
        timestamp: 0.0,
        ball: Vec2::new(ball.0, ball.1),
        ball_velocity: None,
        players,
        attack_direction: AttackDir::PlusX,
    }
}

/// Random 11v11 snapshot with bounded velocities.
pub fn random_snapshot(rng: &mut ChaCha8Rng) -> Snapshot {
    let mut players = Vec::with_capacity(22);
    for i in 0..11 {
        players.push(player(
            &format!("a{i}"),
            Team::Attacking,
            (rng.gen_range(-52.0..52.0), rng.gen_range(-33.5..33.5)),
            (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
        ));
    }
    for i in 0..11 {
        players.push(player(
            &format!("d{i}"),
            Team::Defending,
            (rng.gen_range(-52.0..52.0), rng.gen_range(-33.5..33.5)),
            (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
        ));
    }
    snapshot((rng.gen_range(-50.0..50.0), rng.gen_range(-30.0..30.0)), players)
}

/// Rotate a snapshot 180 degrees in place (still labelled +x).
pub fn rotated_snapshot(s: &Snapshot) -> Snapshot {
    Snapshot {
        timestamp: s.timestamp,
        ball: s.ball.rotated(),
        ball_velocity: s.ball_velocity.map(|v| v.rotated()),
        players: s
            .players
            .iter()
            .map(|p| PlayerState {
                player_id: p.player_id.clone(),
                team: p.team,
                position: p.position.rotated(),
                velocity: p.velocity.rotated(),
            })
            .collect(),
        attack_direction: s.attack_direction,
    }
}

/// Independent arrival-time model: project the velocity on the line to the
/// target, accelerate to the cap, cruise. Written from the motion rules, not
/// from the library implementation.
pub fn oracle_arrival_time(pos: Vec2, vel: Vec2, target: Vec2, motion: &MotionParams) -> f64 {
    let dx = target.x - pos.x;
    let dy = target.y - pos.y;
    let dist = (dx * dx + dy * dy).sqrt();
    if dist == 0.0 {
        return 0.0;
    }
    let along = (vel.x * dx + vel.y * dy) / dist;
    let v0 = along.clamp(-motion.v_max, motion.v_max);
    let t_to_cap = (motion.v_max - v0) / motion.accel;
    let d_during = v0 * t_to_cap + 0.5 * motion.accel * t_to_cap * t_to_cap;
    if d_during >= dist {
        ((v0 * v0 + 2.0 * motion.accel * dist).sqrt() - v0) / motion.accel
    } else {
        t_to_cap + (dist - d_during) / motion.v_max
    }
}

/// Reference control integration at an arbitrary step: the same published
/// scheme (logistic arrival, team rates, early exit, converged stop),
/// re-implemented independently for step-refinement checks.
pub fn oracle_control_probabilities(
    s: &Snapshot,
    target: Vec2,
    motion: &MotionParams,
    cp: &ControlParams,
    dt: f64,
) -> (f64, f64) {
    let scale = 3.0f64.sqrt() * cp.s_uncertainty / std::f64::consts::PI;
    let rate = |team: Team| match team {
        Team::Attacking => cp.lambda,
        Team::Defending => cp.kappa * cp.lambda,
    };
    let arrivals: Vec<(Team, f64)> = s
        .players
        .iter()
        .map(|p| (p.team, oracle_arrival_time(p.position, p.velocity, target, motion)))
        .collect();
    let min_tau = |team: Team| {
        arrivals
            .iter()
            .filter(|(t, _)| *t == team)
            .map(|(_, tau)| *tau)
            .fold(f64::INFINITY, f64::min)
    };
    let t_control = |team: Team| cp.tcontrol_factor * (scale + 1.0 / rate(team));
    let tau_att = min_tau(Team::Attacking);
    let tau_def = min_tau(Team::Defending);
    if tau_def - tau_att >= t_control(Team::Attacking) {
        return (1.0, 0.0);
    }
    if tau_att - tau_def >= t_control(Team::Defending) {
        return (0.0, 1.0);
    }
    let mut attack = 0.0f64;
    let mut defend = 0.0f64;
    let steps = (cp.t_max / dt).ceil() as usize;
    for k in 0..steps {
        let total = attack + defend;
        if total >= 0.999 {
            break;
        }
        let t = k as f64 * dt;
        let mut d_att = 0.0;
        let mut d_def = 0.0;
        for (team, tau) in &arrivals {
            let f = 1.0 / (1.0 + (-(t - tau) / scale).exp());
            let d = (1.0 - total) * f * rate(*team) * dt;
            match team {
                Team::Attacking => d_att += d,
                Team::Defending => d_def += d,
            }
        }
        let d_total = d_att + d_def;
        if d_total > 1.0 - total {
            let k = (1.0 - total) / d_total;
            d_att *= k;
            d_def *= k;
        }
        attack += d_att;
        defend += d_def;
    }
    (attack, defend)
}

/// Brute-force two-sided Mann-Whitney p by enumerating every assignment of
/// the pooled values to the first group.
pub fn oracle_exact_mwu_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b.iter()).cloned().collect();
    let n = pooled.len();
    let k = a.len();
    let u_of = |xs: &[f64], ys: &[f64]| {
        let mut u = 0.0f64;
        for x in xs {
            for y in ys {
                if x > y {
                    u += 1.0;
                } else if x == y {
                    u += 0.5;
                }
            }
        }
        u
    };
    let observed = {
        let ua = u_of(a, b);
        ua.min(k as f64 * b.len() as f64 - ua)
    };
    let mut total = 0usize;
    let mut at_or_below = 0usize;
    let mut indices: Vec<usize> = (0..k).collect();
    loop {
        let xs: Vec<f64> = indices.iter().map(|&i| pooled[i]).collect();
        let ys: Vec<f64> = (0..n)
            .filter(|i| !indices.contains(i))
            .map(|i| pooled[i])
            .collect();
        let ua = u_of(&xs, &ys);
        let u = ua.min(k as f64 * ys.len() as f64 - ua);
        total += 1;
        if u <= observed + 1e-12 {
            at_or_below += 1;
        }
        // Next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return at_or_below as f64 / total as f64;
            }
            i -= 1;
            if indices[i] != i + n - k {
                break;
            }
        }
        indices[i] += 1;
        for j in i + 1..k {
            indices[j] = indices[j - 1] + 1;
        }
    }
}

/// The hand-built 40-event log: volleys of possession with known transition
/// indices, restart-suppressed windows, an alternation stretch, and
/// counter-attack runs that straddle the gain and directness thresholds.
pub fn forty_event_log() -> Vec<EventRecord> {
    let a = "A";
    let b = "B";
    let c = EventType::Carry;
    let i = EventType::Interception;
    let rows: Vec<(&str, EventType, f64, f64)> = vec![
        (a, c, -10.0, 0.0),                 // 0
        (a, c, -8.0, 1.0),                  // 1
        (b, i, 30.0, 5.0),                  // 2  transition: B gains
        (b, c, 32.0, 4.0),                  // 3
        (b, c, 33.0, 3.0),                  // 4
        (b, c, 34.0, 2.0),                  // 5
        (a, c, -10.0, -5.0),                // 6  transition: A gains (mid-pitch)
        (a, c, -9.0, -4.0),                 // 7
        (a, c, -8.0, -3.0),                 // 8
        (b, EventType::ThrowIn, 33.0, 15.0), // 9  suppressed by the restart
        (b, c, 30.0, 12.0),                 // 10
        (b, c, 27.0, 10.0),                 // 11
        (a, c, -5.0, 0.0),                  // 12 alternation: no 3-run
        (b, c, 5.0, 0.0),                   // 13
        (a, c, -6.0, 1.0),                  // 14
        (b, c, 6.0, -1.0),                  // 15
        (a, i, -40.0, 0.0),                 // 16 counter: 16.5 m straight
        (a, c, -30.0, 0.0),                 // 17
        (a, c, -23.5, 0.0),                 // 18
        (b, i, 25.0, -8.0),                 // 19 rejected: 16.0 m gain
        (b, c, 15.0, -8.0),                 // 20
        (b, c, 9.0, -8.0),                  // 21
        (a, i, -35.0, 8.0),                 // 22 counter: directness 0.8
        (a, c, -23.0, 17.0),                // 23
        (a, c, -11.0, 8.0),                 // 24
        (b, i, 28.0, 0.0),                  // 25 rejected: directness 0.743
        (b, c, 18.0, 9.0),                  // 26
        (b, c, 8.0, 18.0),                  // 27
        (a, i, -30.0, -10.0),               // 28 counter ending in a shot
        (a, c, -20.0, -10.0),               // 29
        (a, EventType::Shot, -10.0, -10.0), // 30
        (b, i, 40.0, 0.0),                  // 31 counter: 28 m straight
        (b, c, 25.0, 0.0),                  // 32
        (b, c, 12.0, 0.0),                  // 33
        (a, EventType::GoalKick, -50.0, 0.0), // 34 suppressed; not open play
        (a, c, -30.0, 0.0),                 // 35
        (a, c, -10.0, 0.0),                 // 36
        (b, c, 20.0, 5.0),                  // 37 transition, but only 10 m
        (b, c, 15.0, 4.0),                  // 38
        (b, EventType::Shot, 10.0, 3.0),    // 39
    ];
    rows.into_iter()
        .enumerate()
        .map(|(idx, (team, event_type, x, y))| EventRecord {
            event_id: idx as u64,
            match_id: "m1".into(),
            event_type,
            team_id: team.into(),
            player_id: format!("{team}-p"),
            t: idx as f64,
            location: Vec2::new(x, y),
            pass_end: None,
            play_pattern: None,
            possession_id: None,
            attack_dir: Some(if team == "A" {
                AttackDir::PlusX
            } else {
                AttackDir::MinusX
            }),
        })
        .collect()
}
