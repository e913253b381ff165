//! Pitch coordinate system, evaluation grid and the 18-area partition.
//!
//! Coordinates are in meters with the origin at the center of the pitch.
//! The x-axis runs goal to goal; all evaluation assumes the attacking team
//! plays toward +x, and [`normalize_attack_direction`] rotates snapshots
//! into that frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2D point or vector in pitch coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn distance(&self, other: Vec2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dot(&self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 180° rotation about the origin.
    pub fn rotated(&self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Pitch dimensions. Goals sit at (±length/2, 0).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PitchSpec {
    pub length: f64,
    pub width: f64,
}

impl Default for PitchSpec {
    fn default() -> Self {
        PitchSpec {
            length: 105.0,
            width: 68.0,
        }
    }
}

impl PitchSpec {
    pub fn new(length: f64, width: f64) -> Result<Self> {
        if length <= 0.0 || width <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "pitch dimensions must be positive, got {length} x {width}"
            )));
        }
        Ok(PitchSpec { length, width })
    }

    /// Center of the goal the attacking team defends (attack toward +x).
    pub fn own_goal(&self) -> Vec2 {
        Vec2::new(-self.length / 2.0, 0.0)
    }

    /// Center of the goal the attacking team shoots at.
    pub fn opp_goal(&self) -> Vec2 {
        Vec2::new(self.length / 2.0, 0.0)
    }

    pub fn half_width(&self) -> f64 {
        self.width / 2.0
    }

    /// Clamp a point onto the pitch rectangle. Tracking noise routinely
    /// places points slightly outside the lines.
    pub fn clamp(&self, p: Vec2) -> Vec2 {
        Vec2::new(
            p.x.clamp(-self.length / 2.0, self.length / 2.0),
            p.y.clamp(-self.width / 2.0, self.width / 2.0),
        )
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x.abs() <= self.length / 2.0 && p.y.abs() <= self.width / 2.0
    }
}

/// Rectangular evaluation grid over the pitch. Cells are indexed row-major:
/// `index = row * nx + col`, row 0 at minimum y, col 0 at minimum x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub cell_dx: f64,
    pub cell_dy: f64,
    centers: Vec<Vec2>,
}

impl GridSpec {
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn centers(&self) -> &[Vec2] {
        &self.centers
    }

    pub fn center(&self, index: usize) -> Vec2 {
        self.centers[index]
    }

    /// Index of the cell whose rectangle contains `p` (clamped to the grid).
    pub fn cell_of(&self, p: Vec2, pitch: &PitchSpec) -> usize {
        let p = pitch.clamp(p);
        let col = (((p.x + pitch.length / 2.0) / self.cell_dx) as usize).min(self.nx - 1);
        let row = (((p.y + pitch.width / 2.0) / self.cell_dy) as usize).min(self.ny - 1);
        row * self.nx + col
    }

    /// Index of the cell `index` maps to under a 180° rotation of the pitch.
    pub fn rotated_index(&self, index: usize) -> usize {
        self.n_cells() - 1 - index
    }
}

/// Build an evaluation grid with `nx * ny` cell centers tiling the pitch.
pub fn build_grid(pitch: &PitchSpec, nx: usize, ny: usize) -> Result<GridSpec> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid_argument(format!(
            "grid must be at least 2x2, got {nx}x{ny}"
        )));
    }
    let cell_dx = pitch.length / nx as f64;
    let cell_dy = pitch.width / ny as f64;
    let mut centers = Vec::with_capacity(nx * ny);
    for row in 0..ny {
        // (2k+1-n)/2 * cell keeps centers exactly symmetric under negation.
        let y = (2.0 * row as f64 + 1.0 - ny as f64) / 2.0 * cell_dy;
        for col in 0..nx {
            let x = (2.0 * col as f64 + 1.0 - nx as f64) / 2.0 * cell_dx;
            centers.push(Vec2::new(x, y));
        }
    }
    Ok(GridSpec {
        nx,
        ny,
        cell_dx,
        cell_dy,
        centers,
    })
}

/// Team membership relative to the evaluated attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Team {
    Attacking,
    Defending,
}

/// Direction of attack along the x-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackDir {
    #[serde(rename = "+x")]
    PlusX,
    #[serde(rename = "-x")]
    MinusX,
}

/// One tracked player at a single instant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerState {
    pub player_id: String,
    pub team: Team,
    pub position: Vec2,
    pub velocity: Vec2,
}

/// One tracked instant: ball, players and the attack direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub timestamp: f64,
    pub ball: Vec2,
    pub ball_velocity: Option<Vec2>,
    pub players: Vec<PlayerState>,
    pub attack_direction: AttackDir,
}

impl Snapshot {
    pub fn attackers(&self) -> impl Iterator<Item = &PlayerState> {
        self.players.iter().filter(|p| p.team == Team::Attacking)
    }

    pub fn defenders(&self) -> impl Iterator<Item = &PlayerState> {
        self.players.iter().filter(|p| p.team == Team::Defending)
    }
}

/// Rotate a snapshot 180° about the origin so the attack runs toward +x.
/// Idempotent: snapshots already attacking +x are returned unchanged.
pub fn normalize_attack_direction(s: &Snapshot) -> Snapshot {
    match s.attack_direction {
        AttackDir::PlusX => s.clone(),
        AttackDir::MinusX => Snapshot {
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
            attack_direction: AttackDir::PlusX,
        },
    }
}

/// 6 x-bands by 3 y-bands; area ids 1..=18 with
/// `area = 3 * col + row + 1`, col 0 at the own-goal end, row 0 at minimum y.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct AreaPartition {
    _marker: (),
}

pub const N_AREAS: usize = 18;
const N_COLS: usize = 6;
const N_ROWS: usize = 3;

impl AreaPartition {
    pub fn new() -> Self {
        AreaPartition::default()
    }

    /// Mirror image of an area under y-negation (rows 0 and 2 swap).
    pub fn mirror_area(&self, area: usize) -> usize {
        let col = (area - 1) / N_ROWS;
        let row = (area - 1) % N_ROWS;
        3 * col + (N_ROWS - 1 - row) + 1
    }
}

/// Area id in 1..=18 for a point. Out-of-bounds points are clamped to the
/// boundary; points exactly on an interior band edge take the lower index.
pub fn area_of(p: Vec2, _part: &AreaPartition, pitch: &PitchSpec) -> usize {
    let p = pitch.clamp(p);
    let col = band_index(p.x + pitch.length / 2.0, pitch.length / N_COLS as f64, N_COLS);
    let row = band_index(p.y + pitch.width / 2.0, pitch.width / N_ROWS as f64, N_ROWS);
    3 * col + row + 1
}

fn band_index(offset: f64, band: f64, n: usize) -> usize {
    let raw = offset / band;
    let mut idx = raw.floor() as isize;
    // Interior edge points belong to the lower band.
    if raw == idx as f64 && idx > 0 {
        idx -= 1;
    }
    idx.clamp(0, n as isize - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn player(id: &str, team: Team, pos: (f64, f64), vel: (f64, f64)) -> PlayerState {
        PlayerState {
            player_id: id.to_string(),
            team,
            position: Vec2::new(pos.0, pos.1),
            velocity: Vec2::new(vel.0, vel.1),
        }
    }

    fn snapshot(dir: AttackDir) -> Snapshot {
        Snapshot {
            timestamp: 1.0,
            ball: Vec2::new(3.0, -2.0),
            ball_velocity: None,
            players: vec![
                player("a1", Team::Attacking, (10.0, 5.0), (1.0, -2.0)),
                player("d1", Team::Defending, (-4.0, 8.0), (0.0, 3.0)),
            ],
            attack_direction: dir,
        }
    }

    #[test]
    fn default_grid_has_expected_cells() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 50, 32).unwrap();
        assert_eq!(grid.n_cells(), 1600);
        assert!((grid.cell_dx - 2.1).abs() < 1e-12);
        assert!((grid.cell_dy - 2.125).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_grid_centers() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 2, 2).unwrap();
        let centers = grid.centers();
        assert_eq!(centers.len(), 4);
        assert_eq!(centers[0], Vec2::new(-26.25, -17.0));
        assert_eq!(centers[1], Vec2::new(26.25, -17.0));
        assert_eq!(centers[2], Vec2::new(-26.25, 17.0));
        assert_eq!(centers[3], Vec2::new(26.25, 17.0));
    }

    #[test]
    fn degenerate_grid_rejected() {
        let pitch = PitchSpec::default();
        assert!(matches!(
            build_grid(&pitch, 0, 32),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_grid(&pitch, 50, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn centers_closed_under_rotation() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 50, 32).unwrap();
        for i in 0..grid.n_cells() {
            let rot = grid.center(grid.rotated_index(i));
            let neg = grid.center(i).rotated();
            assert_eq!(rot.x, neg.x);
            assert_eq!(rot.y, neg.y);
        }
    }

    #[test]
    fn normalize_plus_x_is_identity() {
        let s = snapshot(AttackDir::PlusX);
        let n = normalize_attack_direction(&s);
        assert_eq!(n.players[0].position, s.players[0].position);
        assert_eq!(n.ball, s.ball);
    }

    #[test]
    fn normalize_minus_x_rotates() {
        let s = snapshot(AttackDir::MinusX);
        let n = normalize_attack_direction(&s);
        assert_eq!(n.attack_direction, AttackDir::PlusX);
        assert_eq!(n.players[0].position, Vec2::new(-10.0, -5.0));
        assert_eq!(n.players[0].velocity, Vec2::new(-1.0, 2.0));
        assert_eq!(n.ball, Vec2::new(-3.0, 2.0));
    }

    #[test]
    fn normalize_is_idempotent() {
        let s = snapshot(AttackDir::MinusX);
        let once = normalize_attack_direction(&s);
        let twice = normalize_attack_direction(&once);
        assert_eq!(once.players[0].position, twice.players[0].position);
        assert_eq!(once.attack_direction, twice.attack_direction);
    }

    #[test]
    fn area_numbering_examples() {
        let pitch = PitchSpec::default();
        let part = AreaPartition::new();
        assert_eq!(area_of(Vec2::new(52.0, 0.0), &part, &pitch), 17);
        assert_eq!(area_of(Vec2::new(-52.0, -33.0), &part, &pitch), 1);
    }

    #[test]
    fn band_edges_take_lower_index() {
        let pitch = PitchSpec::default();
        let part = AreaPartition::new();
        // x = -35 is exactly the col 0 / col 1 edge.
        let a_edge = area_of(Vec2::new(-35.0, 0.0), &part, &pitch);
        let a_below = area_of(Vec2::new(-35.01, 0.0), &part, &pitch);
        assert_eq!(a_edge, a_below);
        // Width 51 puts an exactly representable row edge at y = -8.5.
        let narrow = PitchSpec::new(105.0, 51.0).unwrap();
        let b_edge = area_of(Vec2::new(0.0, -8.5), &part, &narrow);
        let b_below = area_of(Vec2::new(0.0, -8.51), &part, &narrow);
        assert_eq!(b_edge, b_below);
    }

    #[test]
    fn out_of_bounds_points_clamp() {
        let pitch = PitchSpec::default();
        let part = AreaPartition::new();
        assert_eq!(area_of(Vec2::new(60.0, 0.0), &part, &pitch), 17);
        assert_eq!(area_of(Vec2::new(-60.0, -40.0), &part, &pitch), 1);
    }

    #[test]
    fn mirror_area_swaps_outer_rows() {
        let part = AreaPartition::new();
        assert_eq!(part.mirror_area(1), 3);
        assert_eq!(part.mirror_area(2), 2);
        assert_eq!(part.mirror_area(17), 17);
        assert_eq!(part.mirror_area(16), 18);
        for area in 1..=N_AREAS {
            assert_eq!(part.mirror_area(part.mirror_area(area)), area);
        }
    }

    proptest! {
        #[test]
        fn area_of_total_on_pitch(x in -52.5f64..52.5, y in -34.0f64..34.0) {
            let pitch = PitchSpec::default();
            let part = AreaPartition::new();
            let area = area_of(Vec2::new(x, y), &part, &pitch);
            prop_assert!((1..=18).contains(&area));
        }

        #[test]
        fn normalize_preserves_distances(
            ax in -52.5f64..52.5, ay in -34.0f64..34.0,
            bx in -52.5f64..52.5, by in -34.0f64..34.0,
        ) {
            let s = Snapshot {
                timestamp: 0.0,
                ball: Vec2::ZERO,
                ball_velocity: None,
                players: vec![
                    player("a", Team::Attacking, (ax, ay), (0.0, 0.0)),
                    player("b", Team::Defending, (bx, by), (0.0, 0.0)),
                ],
                attack_direction: AttackDir::MinusX,
            };
            let n = normalize_attack_direction(&s);
            let before = s.players[0].position.distance(s.players[1].position);
            let after = n.players[0].position.distance(n.players[1].position);
            prop_assert_eq!(before, after);
        }
    }
}
