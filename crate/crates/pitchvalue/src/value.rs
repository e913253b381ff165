//! Location-importance weights.
//!
//! Two families: a pitch-wide field value weight (sigmoid along the length of
//! the pitch times a Gaussian across it whose spread widens toward the goal),
//! and a goal-distance score model used by the scoring-opportunity baseline.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GridSpec, PitchSpec, Vec2};

/// Parameters of the field value weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FieldValueParams {
    /// x where the longitudinal weight crosses 0.5 (m).
    pub midpoint_x: f64,
    /// Longitudinal sigmoid scale (m).
    pub scale_x: f64,
    /// Distance from the pitch center to the sideline (m).
    pub half_width: f64,
}

impl Default for FieldValueParams {
    fn default() -> Self {
        FieldValueParams {
            midpoint_x: -15.0,
            scale_x: 30.0,
            half_width: 34.0,
        }
    }
}

/// Longitudinal weight: logistic in x, 0.5 at `midpoint_x`, increasing toward
/// the opponent goal.
pub fn weight_x(x: f64, p: &FieldValueParams) -> f64 {
    1.0 / (1.0 + (-(x - p.midpoint_x) / p.scale_x).exp())
}

/// Lateral spread of the field value weight; widens as the weight grows.
pub fn sigma_x(x: f64, p: &FieldValueParams) -> f64 {
    p.half_width * (1.0 + weight_x(x, p))
}

/// Field value weight at (x, y): Gaussian falloff in y scaled by the
/// longitudinal weight.
pub fn field_value_at(x: f64, y: f64, p: &FieldValueParams) -> f64 {
    let sigma = sigma_x(x, p);
    (-(y * y) / (2.0 * sigma * sigma)).exp() * weight_x(x, p)
}

/// Scoring-probability model: either a grid of per-cell values loaded from a
/// file or an analytic decay with distance to the opponent goal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScoreModel {
    Grid {
        nx: usize,
        ny: usize,
        /// Row-major, row 0 at minimum y.
        values: Vec<f64>,
    },
    Analytic {
        /// Exponent applied to the base decay.
        beta: f64,
        /// Decay length (m).
        gamma: f64,
    },
}

impl Default for ScoreModel {
    fn default() -> Self {
        ScoreModel::Analytic {
            beta: 1.0,
            gamma: 15.0,
        }
    }
}

impl ScoreModel {
    /// Load the grid variant from a CSV of ny rows by nx columns, row 0 at
    /// minimum y.
    pub fn from_grid_csv(path: &Path, grid: &GridSpec) -> Result<ScoreModel> {
        let text = std::fs::read_to_string(path)?;
        let mut values = Vec::with_capacity(grid.n_cells());
        let mut rows = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|_| {
                        Error::invalid_format(format!(
                            "score grid line {}: bad value {tok:?}",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            if row.len() != grid.nx {
                return Err(Error::invalid_format(format!(
                    "score grid line {}: expected {} columns, got {}",
                    lineno + 1,
                    grid.nx,
                    row.len()
                )));
            }
            values.extend(row);
            rows += 1;
        }
        if rows != grid.ny {
            return Err(Error::invalid_format(format!(
                "score grid: expected {} rows, got {rows}",
                grid.ny
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid_format(format!(
                "score grid value {bad} outside [0, 1]"
            )));
        }
        Ok(ScoreModel::Grid {
            nx: grid.nx,
            ny: grid.ny,
            values,
        })
    }
}

/// Scoring probability at a point. Grid variant interpolates bilinearly
/// between cell centers; analytic variant decays with goal distance.
pub fn score_at(r: Vec2, model: &ScoreModel, pitch: &PitchSpec, grid: &GridSpec) -> Result<f64> {
    match model {
        ScoreModel::Analytic { beta, gamma } => {
            if *gamma <= 0.0 {
                return Err(Error::invalid_argument("score decay length must be > 0"));
            }
            let d = r.distance(pitch.opp_goal());
            Ok((-d / gamma).exp().powf(*beta))
        }
        ScoreModel::Grid { nx, ny, values } => {
            if *nx != grid.nx || *ny != grid.ny {
                return Err(Error::invalid_format(format!(
                    "score grid is {nx}x{ny} but evaluation grid is {}x{}",
                    grid.nx, grid.ny
                )));
            }
            Ok(bilinear(r, values, pitch, grid))
        }
    }
}

fn bilinear(r: Vec2, values: &[f64], pitch: &PitchSpec, grid: &GridSpec) -> f64 {
    let r = pitch.clamp(r);
    // Continuous cell coordinates with 0 at the center of cell 0.
    let fx = (r.x + pitch.length / 2.0) / grid.cell_dx - 0.5;
    let fy = (r.y + pitch.width / 2.0) / grid.cell_dy - 0.5;
    let x0 = fx.floor().clamp(0.0, (grid.nx - 1) as f64);
    let y0 = fy.floor().clamp(0.0, (grid.ny - 1) as f64);
    let x1 = (x0 + 1.0).min((grid.nx - 1) as f64);
    let y1 = (y0 + 1.0).min((grid.ny - 1) as f64);
    let tx = (fx - x0).clamp(0.0, 1.0);
    let ty = (fy - y0).clamp(0.0, 1.0);
    let at = |cx: f64, cy: f64| values[cy as usize * grid.nx + cx as usize];
    let top = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
    let bottom = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
    bottom * (1.0 - ty) + top * ty
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_grid;

    #[test]
    fn weight_midpoint_is_half() {
        let p = FieldValueParams::default();
        assert!((weight_x(-15.0, &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weight_at_plus_fifteen() {
        let p = FieldValueParams::default();
        assert!((weight_x(15.0, &p) - 0.7310585786300049).abs() < 1e-12);
    }

    #[test]
    fn weight_strictly_increasing_toward_goal() {
        let p = FieldValueParams::default();
        let mut last = 0.0;
        for i in 0..=100 {
            let x = -52.5 + 1.05 * i as f64;
            let w = weight_x(x, &p);
            assert!(w > last && w < 1.0);
            last = w;
        }
    }

    #[test]
    fn sigma_limits() {
        let p = FieldValueParams::default();
        assert!((sigma_x(-15.0, &p) - 51.0).abs() < 1e-12);
        assert!((sigma_x(1e9, &p) - 68.0).abs() < 1e-6);
        assert!((sigma_x(-1e9, &p) - 34.0).abs() < 1e-6);
    }

    #[test]
    fn field_value_examples() {
        let p = FieldValueParams::default();
        for x in [-40.0, -15.0, 0.0, 30.0] {
            assert!((field_value_at(x, 0.0, &p) - weight_x(x, &p)).abs() < 1e-12);
        }
        assert!((field_value_at(-15.0, 51.0, &p) - 0.3032653298563167).abs() < 1e-12);
    }

    #[test]
    fn field_value_symmetric_in_y() {
        let p = FieldValueParams::default();
        for (x, y) in [(10.0, 20.0), (-30.0, 5.0), (45.0, 33.0)] {
            assert_eq!(field_value_at(x, y, &p), field_value_at(x, -y, &p));
        }
    }

    #[test]
    fn field_value_increases_along_every_vertical_line() {
        let p = FieldValueParams::default();
        let grid = build_grid(&PitchSpec::default(), 50, 32).unwrap();
        for row in 0..32 {
            let mut last = f64::NEG_INFINITY;
            for col in 0..50 {
                let c = grid.center(row * 50 + col);
                let v = field_value_at(c.x, c.y, &p);
                assert!(v > last + 1e-9 || last == f64::NEG_INFINITY, "row {row} col {col}");
                assert!(v > 0.0 && v < 1.0);
                last = v;
            }
        }
    }

    #[test]
    fn central_lane_beats_flank_up_the_pitch() {
        let p = FieldValueParams::default();
        for x in [30.0, 40.0, 50.0] {
            assert!(field_value_at(x, 0.0, &p) > field_value_at(x, 30.0, &p));
        }
    }

    #[test]
    fn analytic_score_peaks_at_goal() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 10, 8).unwrap();
        let model = ScoreModel::default();
        let at_goal = score_at(pitch.opp_goal(), &model, &pitch, &grid).unwrap();
        assert!((at_goal - 1.0).abs() < 1e-12);
        let mut last = at_goal;
        for d in [5.0, 15.0, 40.0, 90.0] {
            let s = score_at(Vec2::new(52.5 - d, 0.0), &model, &pitch, &grid).unwrap();
            assert!(s < last);
            last = s;
        }
    }

    #[test]
    fn analytic_score_symmetric_about_goal_axis() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 10, 8).unwrap();
        let model = ScoreModel::default();
        let a = score_at(Vec2::new(30.0, 12.0), &model, &pitch, &grid).unwrap();
        let b = score_at(Vec2::new(30.0, -12.0), &model, &pitch, &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_score_round_trips_through_csv() {
        let pitch = PitchSpec::default();
        let grid = build_grid(&pitch, 5, 4).unwrap();
        let dir = std::env::temp_dir().join("pitchvalue-score-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("score.csv");
        let mut rows = Vec::new();
        for row in 0..4 {
            let cols: Vec<String> = (0..5)
                .map(|col| format!("{}", (row * 5 + col) as f64 / 100.0))
                .collect();
            rows.push(cols.join(","));
        }
        std::fs::write(&path, rows.join("\n")).unwrap();
        let model = ScoreModel::from_grid_csv(&path, &grid).unwrap();
        for k in 0..grid.n_cells() {
            let v = score_at(grid.center(k), &model, &pitch, &grid).unwrap();
            assert!((v - k as f64 / 100.0).abs() < 1e-12, "cell {k}: {v}");
        }
    }

    #[test]
    fn grid_dimension_mismatch_rejected() {
        let pitch = PitchSpec::default();
        let other = build_grid(&pitch, 6, 4).unwrap();
        let model = ScoreModel::Grid {
            nx: 5,
            ny: 4,
            values: vec![0.0; 20],
        };
        assert!(matches!(
            score_at(Vec2::ZERO, &model, &pitch, &other),
            Err(Error::InvalidFormat(_))
        ));
    }
}
