//! Surface assembly: combine a location-importance weight, the pitch control
//! field and a transition model into per-cell value surfaces and per-event
//! scalars.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    area_of, normalize_attack_direction, AreaPartition, GridSpec, PitchSpec, Snapshot, Vec2,
    N_AREAS,
};
use crate::ppcf::{ppcf_field, ControlParams, MotionParams};
use crate::transition::{
    transition_field, GaussianTransitionParams, KernelModel, Normalization, TransitionSource,
};
use crate::value::{field_value_at, score_at, FieldValueParams, ScoreModel};

/// Which value surface a set of cells represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Obso,
    Obpv,
}

/// How a surface is reduced to a single per-event scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarMode {
    /// Maximum over all grid cells.
    GridMax,
    /// Maximum over cells occupied by an attacking player.
    PlayerMax,
}

/// Transition model selection for the positioning surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionSourceKind {
    Kernel,
    Gaussian,
}

/// Everything needed to turn a snapshot into a surface.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub motion: MotionParams,
    pub control: ControlParams,
    pub field_value: FieldValueParams,
    pub score: ScoreModel,
    pub gaussian: GaussianTransitionParams,
    /// Transition source for the positioning surface; the scoring baseline
    /// always uses the ball-centered Gaussian.
    pub transition_source: TransitionSourceKind,
    /// Normalization override; by default the scoring surface uses `Sum` and
    /// the positioning surface uses `Max`.
    pub transition_norm: Option<Normalization>,
    pub scalar_mode: ScalarMode,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            motion: MotionParams::default(),
            control: ControlParams::default(),
            field_value: FieldValueParams::default(),
            score: ScoreModel::default(),
            gaussian: GaussianTransitionParams::default(),
            transition_source: TransitionSourceKind::Kernel,
            transition_norm: None,
            scalar_mode: ScalarMode::GridMax,
        }
    }
}

impl EvaluationConfig {
    pub fn obso_norm(&self) -> Normalization {
        self.transition_norm.unwrap_or(Normalization::Sum)
    }

    pub fn obpv_norm(&self) -> Normalization {
        self.transition_norm.unwrap_or(Normalization::Max)
    }
}

/// A per-cell value surface plus the provenance needed to interpret it.
#[derive(Debug, Clone)]
pub struct ValueSurface {
    pub kind: SurfaceKind,
    pub timestamp: f64,
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub transition_norm: Normalization,
    pub transition_source: TransitionSourceKind,
}

/// Evaluates snapshots against a fixed pitch, grid and configuration.
pub struct Evaluator {
    pitch: PitchSpec,
    grid: GridSpec,
    part: AreaPartition,
    config: EvaluationConfig,
    kernel: Option<KernelModel>,
    // Kernel transition fields depend only on the ball's area; there are
    // eighteen of them, so they are computed once and reused.
    kernel_fields: Vec<OnceLock<Vec<f64>>>,
}

impl Evaluator {
    /// The kernel model may be omitted when only Gaussian-transition
    /// surfaces will be evaluated; requesting a kernel surface without one
    /// fails at that point.
    pub fn new(
        pitch: PitchSpec,
        grid: GridSpec,
        config: EvaluationConfig,
        kernel: Option<KernelModel>,
    ) -> Result<Evaluator> {
        config.control.validate()?;
        Ok(Evaluator {
            pitch,
            grid,
            part: AreaPartition::new(),
            config,
            kernel,
            kernel_fields: (0..N_AREAS).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn pitch(&self) -> &PitchSpec {
        &self.pitch
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn config(&self) -> &EvaluationConfig {
        &self.config
    }

    fn kernel_field(&self, ball: Vec2, norm: Normalization) -> Result<Vec<f64>> {
        let model = self.kernel.as_ref().ok_or_else(|| {
            Error::invalid_argument("kernel transition source requires a fitted kernel model")
        })?;
        let area = area_of(ball, &self.part, &self.pitch);
        if norm == self.config.obpv_norm() {
            let cached = &self.kernel_fields[area - 1];
            if let Some(field) = cached.get() {
                return Ok(field.clone());
            }
            let field = transition_field(
                TransitionSource::Kernel(model),
                ball,
                &self.grid,
                &self.part,
                &self.pitch,
                norm,
            )?;
            Ok(cached.get_or_init(|| field).clone())
        } else {
            transition_field(
                TransitionSource::Kernel(model),
                ball,
                &self.grid,
                &self.part,
                &self.pitch,
                norm,
            )
        }
    }

    /// Scoring-opportunity surface: score weight x control x Gaussian
    /// transition, per cell.
    pub fn obso_surface(&self, s: &Snapshot) -> Result<ValueSurface> {
        let s = normalize_attack_direction(s);
        let norm = self.config.obso_norm();
        let control = ppcf_field(&s, &self.grid, &self.config.motion, &self.config.control)?;
        let transition = transition_field(
            TransitionSource::Gaussian(self.config.gaussian),
            s.ball,
            &self.grid,
            &self.part,
            &self.pitch,
            norm,
        )?;
        let score: Vec<f64> = self
            .grid
            .centers()
            .iter()
            .map(|&c| score_at(c, &self.config.score, &self.pitch, &self.grid))
            .collect::<Result<_>>()?;
        Ok(ValueSurface {
            kind: SurfaceKind::Obso,
            timestamp: s.timestamp,
            grid: self.grid.clone(),
            values: compose(&score, &control.attack, &transition),
            transition_norm: norm,
            transition_source: TransitionSourceKind::Gaussian,
        })
    }

    /// Positioning-value surface: field value weight x control x transition
    /// (kernel by default), per cell.
    pub fn obpv_surface(&self, s: &Snapshot) -> Result<ValueSurface> {
        let s = normalize_attack_direction(s);
        let norm = self.config.obpv_norm();
        let control = ppcf_field(&s, &self.grid, &self.config.motion, &self.config.control)?;
        let transition = match self.config.transition_source {
            TransitionSourceKind::Kernel => self.kernel_field(s.ball, norm)?,
            TransitionSourceKind::Gaussian => transition_field(
                TransitionSource::Gaussian(self.config.gaussian),
                s.ball,
                &self.grid,
                &self.part,
                &self.pitch,
                norm,
            )?,
        };
        let weight: Vec<f64> = self
            .grid
            .centers()
            .iter()
            .map(|&c| field_value_at(c.x, c.y, &self.config.field_value))
            .collect();
        Ok(ValueSurface {
            kind: SurfaceKind::Obpv,
            timestamp: s.timestamp,
            grid: self.grid.clone(),
            values: compose(&weight, &control.attack, &transition),
            transition_norm: norm,
            transition_source: self.config.transition_source,
        })
    }

    /// Reduce a surface to the per-event scalar.
    pub fn event_scalar(
        &self,
        surface: &ValueSurface,
        s: &Snapshot,
        mode: ScalarMode,
    ) -> Result<f64> {
        if surface.timestamp != s.timestamp {
            return Err(Error::invalid_argument(format!(
                "surface at t={} does not match snapshot at t={}",
                surface.timestamp, s.timestamp
            )));
        }
        match mode {
            ScalarMode::GridMax => Ok(surface.values.iter().cloned().fold(0.0, f64::max)),
            ScalarMode::PlayerMax => {
                let s = normalize_attack_direction(s);
                let mut best: Option<f64> = None;
                for p in s.attackers() {
                    let cell = self.grid.cell_of(p.position, &self.pitch);
                    let v = surface.values[cell];
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
                best.ok_or_else(|| {
                    Error::invalid_argument("player_max scalar needs at least one attacker")
                })
            }
        }
    }
}

/// Total scoring opportunity: sum over cells of a sum-normalized scoring
/// surface.
pub fn obso_total(surface: &ValueSurface) -> Result<f64> {
    if surface.kind != SurfaceKind::Obso || surface.transition_norm != Normalization::Sum {
        return Err(Error::invalid_argument(
            "totals are defined for sum-normalized scoring surfaces only",
        ));
    }
    Ok(surface.values.iter().sum())
}

fn compose(weight: &[f64], control: &[f64], transition: &[f64]) -> Vec<f64> {
    weight
        .iter()
        .zip(control)
        .zip(transition)
        .map(|((w, c), t)| w * c * t)
        .collect()
}
