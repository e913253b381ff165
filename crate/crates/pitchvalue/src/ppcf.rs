//! Potential pitch control field.
//!
//! For a target location, each player's chance of controlling a ball played
//! there is modeled in two stages: a logistic arrival-time distribution around
//! a kinematic expected arrival, and an exponential control rate once in
//! range. Per-player control accumulates through a coupled ODE integrated
//! forward in time; team probabilities are the per-team sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, PlayerState, Snapshot, Team, Vec2};

/// Player motion model: accelerate at `accel` up to `v_max`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MotionParams {
    pub v_max: f64,
    pub accel: f64,
}

impl Default for MotionParams {
    fn default() -> Self {
        MotionParams {
            v_max: 5.0,
            accel: 7.0,
        }
    }
}

/// Control-model parameters and integration settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ControlParams {
    /// Ball control rate (1/s) for the attacking team.
    pub lambda: f64,
    /// Defending-team rate multiplier.
    pub kappa: f64,
    /// Arrival-time uncertainty (s) of the logistic distribution.
    pub s_uncertainty: f64,
    /// Integration step (s).
    pub dt: f64,
    /// Integration horizon (s).
    pub t_max: f64,
    /// Early-exit margin factor; the uncontested threshold is
    /// `factor * (sqrt(3) * s / pi + 1 / rate)`.
    pub tcontrol_factor: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams {
            lambda: 4.3,
            kappa: 1.0,
            s_uncertainty: 0.45,
            dt: 0.04,
            t_max: 10.0,
            tcontrol_factor: 3.0 * std::f64::consts::LN_10,
        }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 || self.kappa <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "control rates must be positive: lambda={} kappa={}",
                self.lambda, self.kappa
            )));
        }
        if self.s_uncertainty <= 0.0 {
            return Err(Error::invalid_argument(
                "arrival uncertainty must be positive",
            ));
        }
        if self.dt <= 0.0 || self.dt >= self.t_max {
            return Err(Error::invalid_argument(format!(
                "need 0 < dt < t_max, got dt={} t_max={}",
                self.dt, self.t_max
            )));
        }
        Ok(())
    }

    fn logistic_scale(&self) -> f64 {
        3.0f64.sqrt() * self.s_uncertainty / std::f64::consts::PI
    }

    /// Time a lone arriver needs before the opposition shows up to be
    /// considered uncontested.
    pub fn t_control(&self, team: Team) -> f64 {
        self.tcontrol_factor * (self.logistic_scale() + 1.0 / control_rate_unchecked(team, self))
    }
}

/// Stop integrating once this much probability mass is assigned. Tight
/// enough that evenly contested targets still split within 1e-3.
const TOTAL_CONVERGED: f64 = 0.999;

/// Per-cell control probabilities for both teams over a grid.
#[derive(Debug, Clone)]
pub struct PitchControlField {
    pub grid: GridSpec,
    pub attack: Vec<f64>,
    pub defend: Vec<f64>,
}

/// Expected time for a player to reach `target`: initial speed is the
/// velocity component along the line (clamped to ±v_max), then constant
/// acceleration up to v_max, then cruise.
pub fn expected_arrival_time(player: &PlayerState, target: Vec2, motion: &MotionParams) -> f64 {
    let to_target = target - player.position;
    let dist = to_target.norm();
    if dist == 0.0 {
        return 0.0;
    }
    let v0 = (player.velocity.dot(to_target) / dist).clamp(-motion.v_max, motion.v_max);
    let t_acc = (motion.v_max - v0) / motion.accel;
    let d_acc = v0 * t_acc + 0.5 * motion.accel * t_acc * t_acc;
    if d_acc >= dist {
        // Target reached during the acceleration phase.
        ((v0 * v0 + 2.0 * motion.accel * dist).sqrt() - v0) / motion.accel
    } else {
        t_acc + (dist - d_acc) / motion.v_max
    }
}

/// Probability that a player with expected arrival `tau` is at the target by
/// time `t`: logistic CDF with scale `sqrt(3) * s / pi`.
pub fn interception_probability(t: f64, tau: f64, s_uncertainty: f64) -> f64 {
    let scale = 3.0f64.sqrt() * s_uncertainty / std::f64::consts::PI;
    1.0 / (1.0 + (-(t - tau) / scale).exp())
}

/// Ball control rate for a team.
pub fn control_rate(team: Team, cp: &ControlParams) -> Result<f64> {
    if cp.lambda <= 0.0 || cp.kappa <= 0.0 {
        return Err(Error::invalid_argument(format!(
            "control rates must be positive: lambda={} kappa={}",
            cp.lambda, cp.kappa
        )));
    }
    Ok(control_rate_unchecked(team, cp))
}

fn control_rate_unchecked(team: Team, cp: &ControlParams) -> f64 {
    match team {
        Team::Attacking => cp.lambda,
        Team::Defending => cp.kappa * cp.lambda,
    }
}

/// Control probabilities (attack, defend) for a ball arriving at `target`.
pub fn ppcf_at(
    s: &Snapshot,
    target: Vec2,
    motion: &MotionParams,
    cp: &ControlParams,
) -> Result<(f64, f64)> {
    cp.validate()?;
    if s.players.is_empty() {
        return Err(Error::invalid_argument("snapshot has no players"));
    }
    let arrivals: Vec<(Team, f64, f64)> = s
        .players
        .iter()
        .map(|p| {
            (
                p.team,
                expected_arrival_time(p, target, motion),
                control_rate_unchecked(p.team, cp),
            )
        })
        .collect();
    Ok(ppcf_from_arrivals(&arrivals, cp))
}

/// The integration core, shared by `ppcf_at` and `ppcf_field` once arrival
/// times are known.
fn ppcf_from_arrivals(arrivals: &[(Team, f64, f64)], cp: &ControlParams) -> (f64, f64) {
    let tau_att = arrivals
        .iter()
        .filter(|(team, _, _)| *team == Team::Attacking)
        .map(|(_, tau, _)| *tau)
        .fold(f64::INFINITY, f64::min);
    let tau_def = arrivals
        .iter()
        .filter(|(team, _, _)| *team == Team::Defending)
        .map(|(_, tau, _)| *tau)
        .fold(f64::INFINITY, f64::min);

    // One team arriving far ahead of the other controls outright.
    if tau_def - tau_att >= cp.t_control(Team::Attacking) {
        return (1.0, 0.0);
    }
    if tau_att - tau_def >= cp.t_control(Team::Defending) {
        return (0.0, 1.0);
    }

    let scale = cp.logistic_scale();
    let mut attack = 0.0f64;
    let mut defend = 0.0f64;
    let steps = (cp.t_max / cp.dt).ceil() as usize;
    for step in 0..steps {
        let total = attack + defend;
        if total >= TOTAL_CONVERGED {
            break;
        }
        let t = step as f64 * cp.dt;
        let mut d_att = 0.0;
        let mut d_def = 0.0;
        for (team, tau, rate) in arrivals {
            let f = 1.0 / (1.0 + (-(t - tau) / scale).exp());
            let d = (1.0 - total) * f * rate * cp.dt;
            match team {
                Team::Attacking => d_att += d,
                Team::Defending => d_def += d,
            }
        }
        // Forward Euler can overstep the unit total when many players crowd
        // the target; scale the step back onto the simplex.
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

/// Evaluate `ppcf_at` at every grid cell center.
pub fn ppcf_field(
    s: &Snapshot,
    grid: &GridSpec,
    motion: &MotionParams,
    cp: &ControlParams,
) -> Result<PitchControlField> {
    cp.validate()?;
    if s.players.is_empty() {
        return Err(Error::invalid_argument("snapshot has no players"));
    }
    let pairs: Vec<(f64, f64)> = grid
        .centers()
        .par_iter()
        .map(|&target| {
            let arrivals: Vec<(Team, f64, f64)> = s
                .players
                .iter()
                .map(|p| {
                    (
                        p.team,
                        expected_arrival_time(p, target, motion),
                        control_rate_unchecked(p.team, cp),
                    )
                })
                .collect();
            ppcf_from_arrivals(&arrivals, cp)
        })
        .collect();
    let attack = pairs.iter().map(|p| p.0).collect();
    let defend = pairs.iter().map(|p| p.1).collect();
    Ok(PitchControlField {
        grid: grid.clone(),
        attack,
        defend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, AttackDir, PitchSpec};

    fn player(team: Team, pos: (f64, f64), vel: (f64, f64)) -> PlayerState {
        PlayerState {
            player_id: format!("{team:?}-{}-{}", pos.0, pos.1),
            team,
            position: Vec2::new(pos.0, pos.1),
            velocity: Vec2::new(vel.0, vel.1),
        }
    }

    fn snap(players: Vec<PlayerState>) -> Snapshot {
        Snapshot {
            timestamp: 0.0,
            ball: Vec2::ZERO,
            ball_velocity: None,
            players,
            attack_direction: AttackDir::PlusX,
        }
    }

    /// Fine-step simulation of the 1-D motion model, independent of the
    /// closed form it checks.
    fn simulated_arrival(d: f64, v0: f64, motion: &MotionParams) -> f64 {
        let dt = 1e-5;
        let mut x = 0.0;
        let mut v = v0;
        let mut t = 0.0;
        while x < d {
            v = (v + motion.accel * dt).min(motion.v_max);
            x += v * dt;
            t += dt;
        }
        t
    }

    #[test]
    fn arrival_time_zero_distance() {
        let p = player(Team::Attacking, (3.0, 4.0), (1.0, 1.0));
        let m = MotionParams::default();
        assert_eq!(expected_arrival_time(&p, Vec2::new(3.0, 4.0), &m), 0.0);
    }

    #[test]
    fn arrival_time_from_rest_matches_simulation() {
        let m = MotionParams::default();
        let p = player(Team::Attacking, (0.0, 0.0), (0.0, 0.0));
        let tau = expected_arrival_time(&p, Vec2::new(5.0, 0.0), &m);
        assert!((tau - 1.3571428571428572).abs() < 1e-12);
        assert!((tau - simulated_arrival(5.0, 0.0, &m)).abs() < 1e-3);
    }

    #[test]
    fn arrival_time_cruise_only() {
        let m = MotionParams::default();
        let p = player(Team::Attacking, (0.0, 0.0), (5.0, 0.0));
        let tau = expected_arrival_time(&p, Vec2::new(10.0, 0.0), &m);
        assert!((tau - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arrival_time_moving_away_matches_simulation() {
        let m = MotionParams::default();
        let p = player(Team::Attacking, (0.0, 0.0), (-3.0, 0.0));
        let tau = expected_arrival_time(&p, Vec2::new(4.0, 0.0), &m);
        assert!((tau - simulated_arrival(4.0, -3.0, &m)).abs() < 1e-3);
    }

    #[test]
    fn faster_players_arrive_no_later() {
        let p = player(Team::Attacking, (0.0, 0.0), (0.0, 2.0));
        let slow = MotionParams {
            v_max: 4.0,
            accel: 7.0,
        };
        let fast = MotionParams {
            v_max: 6.0,
            accel: 7.0,
        };
        for d in [1.0, 5.0, 20.0, 60.0] {
            let target = Vec2::new(d, 0.0);
            assert!(
                expected_arrival_time(&p, target, &fast)
                    <= expected_arrival_time(&p, target, &slow)
            );
        }
    }

    #[test]
    fn interception_probability_examples() {
        assert!((interception_probability(2.0, 2.0, 0.45) - 0.5).abs() < 1e-12);
        assert!(interception_probability(1e6, 0.0, 0.45) > 1.0 - 1e-9);
        let scale = 3.0f64.sqrt() * 0.45 / std::f64::consts::PI;
        let p = interception_probability(scale, 0.0, 0.45);
        assert!((p - 0.7310585786300049).abs() < 1e-12);
    }

    #[test]
    fn interception_probability_increasing_in_t() {
        let mut last = 0.0;
        for i in 0..100 {
            let t = -2.0 + 0.1 * i as f64;
            let p = interception_probability(t, 1.0, 0.45);
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn control_rate_examples() {
        let cp = ControlParams::default();
        assert_eq!(control_rate(Team::Attacking, &cp).unwrap(), 4.3);
        assert_eq!(control_rate(Team::Defending, &cp).unwrap(), 4.3);
        let cp2 = ControlParams {
            kappa: 2.0,
            ..ControlParams::default()
        };
        assert_eq!(control_rate(Team::Defending, &cp2).unwrap(), 8.6);
        let bad = ControlParams {
            lambda: -1.0,
            ..ControlParams::default()
        };
        assert!(matches!(
            control_rate(Team::Attacking, &bad),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn uncontested_attacker_controls() {
        let s = snap(vec![player(Team::Attacking, (0.0, 0.0), (0.0, 0.0))]);
        let (att, def) = ppcf_at(
            &s,
            Vec2::new(5.0, 0.0),
            &MotionParams::default(),
            &ControlParams::default(),
        )
        .unwrap();
        assert!((att - 1.0).abs() < 1e-3);
        assert!(def.abs() < 1e-3);
    }

    #[test]
    fn mirror_symmetric_duel_splits_evenly() {
        let s = snap(vec![
            player(Team::Attacking, (-8.0, 0.0), (2.0, 0.0)),
            player(Team::Defending, (8.0, 0.0), (-2.0, 0.0)),
        ]);
        let (att, def) = ppcf_at(
            &s,
            Vec2::ZERO,
            &MotionParams::default(),
            &ControlParams::default(),
        )
        .unwrap();
        assert!((att - 0.5).abs() < 1e-3, "att={att}");
        assert!((def - 0.5).abs() < 1e-3, "def={def}");
    }

    #[test]
    fn empty_snapshot_rejected() {
        let s = snap(vec![]);
        assert!(matches!(
            ppcf_at(
                &s,
                Vec2::ZERO,
                &MotionParams::default(),
                &ControlParams::default()
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn field_matches_pointwise_evaluation() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 10, 8).unwrap();
        let s = snap(vec![
            player(Team::Attacking, (-10.0, 3.0), (1.0, 0.0)),
            player(Team::Attacking, (15.0, -8.0), (0.0, 2.0)),
            player(Team::Defending, (5.0, 5.0), (-1.0, -1.0)),
            player(Team::Defending, (-20.0, -15.0), (3.0, 0.0)),
        ]);
        let m = MotionParams::default();
        let cp = ControlParams::default();
        let field = ppcf_field(&s, &grid, &m, &cp).unwrap();
        for idx in [0usize, 7, 19, 33, 54, 61, 70, 79, 42, 11] {
            let (att, def) = ppcf_at(&s, grid.center(idx), &m, &cp).unwrap();
            assert_eq!(field.attack[idx], att);
            assert_eq!(field.defend[idx], def);
        }
    }

    #[test]
    fn field_conserves_probability() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 20, 12).unwrap();
        let s = snap(vec![
            player(Team::Attacking, (-10.0, 3.0), (1.0, 0.0)),
            player(Team::Defending, (5.0, 5.0), (-1.0, -1.0)),
        ]);
        let field = ppcf_field(&s, &grid, &MotionParams::default(), &ControlParams::default())
            .unwrap();
        for i in 0..grid.n_cells() {
            let total = field.attack[i] + field.defend[i];
            assert!((0.0..=1.0 + 1e-6).contains(&total), "cell {i}: {total}");
        }
    }

    #[test]
    fn rotated_snapshot_reverses_field() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 14, 10).unwrap();
        let s = snap(vec![
            player(Team::Attacking, (-10.0, 3.0), (1.0, 0.5)),
            player(Team::Attacking, (22.0, -13.0), (-0.5, 2.0)),
            player(Team::Defending, (5.0, 5.0), (-1.0, -1.0)),
        ]);
        let rotated = snap(s
            .players
            .iter()
            .map(|p| PlayerState {
                player_id: p.player_id.clone(),
                team: p.team,
                position: p.position.rotated(),
                velocity: p.velocity.rotated(),
            })
            .collect());
        let m = MotionParams::default();
        let cp = ControlParams::default();
        let f = ppcf_field(&s, &grid, &m, &cp).unwrap();
        let g = ppcf_field(&rotated, &grid, &m, &cp).unwrap();
        for i in 0..grid.n_cells() {
            let j = grid.rotated_index(i);
            assert!((f.attack[i] - g.attack[j]).abs() < 1e-9);
            assert!((f.defend[i] - g.defend[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn defender_on_cell_limits_attack() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 50, 32).unwrap();
        // Keeper alone at the own goal, defender standing on the far corner cell.
        let corner = grid.center(grid.n_cells() - 1);
        let s = snap(vec![
            player(Team::Attacking, (-52.0, 0.0), (0.0, 0.0)),
            player(Team::Defending, (corner.x, corner.y), (0.0, 0.0)),
        ]);
        let (att, _) = ppcf_at(&s, corner, &MotionParams::default(), &ControlParams::default())
            .unwrap();
        assert!(att < 0.5);
    }
}
