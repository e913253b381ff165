//! Flat `section.key = value` configuration with typed accessors.
//!
//! Every knob has a default; a config file and command-line overrides only
//! replace values for keys that exist. Unknown keys are rejected so typos
//! fail loudly, and the fully resolved table is echoed into every report.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evaluator::{EvaluationConfig, ScalarMode, TransitionSourceKind};
use crate::geometry::{build_grid, GridSpec, PitchSpec};
use crate::pipeline::detect::{CounterRuleParams, DistanceMetric, FinalThird};
use crate::pipeline::sync::SyncParams;
use crate::ppcf::{ControlParams, MotionParams};
use crate::transition::{FitOptions, GaussianTransitionParams, Normalization};
use crate::value::{FieldValueParams, ScoreModel};

/// Environment variable naming a default config file.
pub const CONFIG_ENV_VAR: &str = "PITCHVALUE_CONFIG";

/// Resolved configuration: defaults, then file values, then overrides.
#[derive(Debug, Clone)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut values = BTreeMap::new();
        let pitch = PitchSpec::default();
        let motion = MotionParams::default();
        let control = ControlParams::default();
        let fv = FieldValueParams::default();
        let gaussian = GaussianTransitionParams::default();
        let fit = FitOptions::default();
        let sync = SyncParams::default();
        let counter = CounterRuleParams::default();
        let mut set = |k: &str, v: String| {
            values.insert(k.to_string(), v);
        };
        set("pitch.length", pitch.length.to_string());
        set("pitch.width", pitch.width.to_string());
        set("grid.nx", "50".into());
        set("grid.ny", "32".into());
        set("motion.vmax", motion.v_max.to_string());
        set("motion.accel", motion.accel.to_string());
        set("ppcf.lambda", control.lambda.to_string());
        set("ppcf.kappa", control.kappa.to_string());
        set("ppcf.s", control.s_uncertainty.to_string());
        set("ppcf.dt", control.dt.to_string());
        set("ppcf.tmax", control.t_max.to_string());
        set("ppcf.tcontrol_factor", control.tcontrol_factor.to_string());
        set("score.variant", "analytic".into());
        set("score.grid_path", String::new());
        set("score.beta", "1".into());
        set("score.gamma", "15".into());
        set("fieldvalue.midpoint_x", fv.midpoint_x.to_string());
        set("fieldvalue.scale_x", fv.scale_x.to_string());
        set("fieldvalue.half_width", fv.half_width.to_string());
        set("transition.sigma", gaussian.sigma.to_string());
        set("transition.min_samples", fit.min_samples.to_string());
        set("transition.mirror", fit.mirror.to_string());
        set("transition.radius", "35".into());
        set("transition.distance_metric", "euclidean".into());
        set("eval.scalar_mode", "grid_max".into());
        set("eval.transition_norm", "default".into());
        set("eval.transition_source", "kernel".into());
        set("sync.window", sync.window.to_string());
        set("sync.max_dist", sync.max_dist.to_string());
        set("counter.mode", "label".into());
        set("counter.final_third", "attacking".into());
        set("counter.min_gain", counter.min_gain.to_string());
        set("counter.min_directness", counter.min_directness.to_string());
        RunConfig { values }
    }
}

impl RunConfig {
    /// Defaults, optionally overlaid with a config file: the explicit path,
    /// or the file named by `PITCHVALUE_CONFIG` when set.
    pub fn load(explicit: Option<&Path>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let env_path = std::env::var(CONFIG_ENV_VAR).ok().map(PathBuf::from);
        let path = explicit.map(Path::to_path_buf).or(env_path);
        if let Some(path) = path {
            let text = std::fs::read_to_string(&path)?;
            cfg.apply_text(&text)?;
        }
        Ok(cfg)
    }

    /// Apply `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::invalid_format(format!("config line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Set one key, rejecting unknown names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(Error::invalid_argument(format!("unknown config key {key:?}"))),
        }
    }

    /// Apply `key=value` overrides from the command line.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                Error::invalid_argument(format!("override {item:?} must be key=value"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// The fully resolved table, for report echoing.
    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn raw(&self, key: &str) -> &str {
        &self.values[key]
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.raw(key)
            .parse()
            .map_err(|_| Error::invalid_argument(format!("{key}: {:?} is not a number", self.raw(key))))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.raw(key)
            .parse()
            .map_err(|_| Error::invalid_argument(format!("{key}: {:?} is not a count", self.raw(key))))
    }

    fn bool(&self, key: &str) -> Result<bool> {
        match self.raw(key) {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(Error::invalid_argument(format!(
                "{key}: {other:?} is not true/false"
            ))),
        }
    }

    pub fn pitch(&self) -> Result<PitchSpec> {
        PitchSpec::new(self.f64("pitch.length")?, self.f64("pitch.width")?)
    }

    pub fn grid(&self, pitch: &PitchSpec) -> Result<GridSpec> {
        build_grid(pitch, self.usize("grid.nx")?, self.usize("grid.ny")?)
    }

    pub fn motion(&self) -> Result<MotionParams> {
        let m = MotionParams {
            v_max: self.f64("motion.vmax")?,
            accel: self.f64("motion.accel")?,
        };
        if m.v_max <= 0.0 || m.accel <= 0.0 {
            return Err(Error::invalid_argument("motion parameters must be positive"));
        }
        Ok(m)
    }

    pub fn control(&self) -> Result<ControlParams> {
        let cp = ControlParams {
            lambda: self.f64("ppcf.lambda")?,
            kappa: self.f64("ppcf.kappa")?,
            s_uncertainty: self.f64("ppcf.s")?,
            dt: self.f64("ppcf.dt")?,
            t_max: self.f64("ppcf.tmax")?,
            tcontrol_factor: self.f64("ppcf.tcontrol_factor")?,
        };
        cp.validate()?;
        Ok(cp)
    }

    pub fn field_value(&self) -> Result<FieldValueParams> {
        let fv = FieldValueParams {
            midpoint_x: self.f64("fieldvalue.midpoint_x")?,
            scale_x: self.f64("fieldvalue.scale_x")?,
            half_width: self.f64("fieldvalue.half_width")?,
        };
        if fv.scale_x <= 0.0 || fv.half_width <= 0.0 {
            return Err(Error::invalid_argument(
                "field value scale and half width must be positive",
            ));
        }
        Ok(fv)
    }

    pub fn score(&self, grid: &GridSpec) -> Result<ScoreModel> {
        match self.raw("score.variant") {
            "analytic" => {
                let beta = self.f64("score.beta")?;
                let gamma = self.f64("score.gamma")?;
                if gamma <= 0.0 {
                    return Err(Error::invalid_argument("score.gamma must be positive"));
                }
                Ok(ScoreModel::Analytic { beta, gamma })
            }
            "grid" => {
                let path = self.raw("score.grid_path");
                if path.is_empty() {
                    return Err(Error::invalid_argument(
                        "score.variant = grid needs score.grid_path",
                    ));
                }
                ScoreModel::from_grid_csv(Path::new(path), grid)
            }
            other => Err(Error::invalid_argument(format!(
                "score.variant must be analytic or grid, got {other:?}"
            ))),
        }
    }

    pub fn gaussian(&self) -> Result<GaussianTransitionParams> {
        let sigma = self.f64("transition.sigma")?;
        if sigma <= 0.0 {
            return Err(Error::invalid_argument("transition.sigma must be positive"));
        }
        Ok(GaussianTransitionParams { sigma })
    }

    pub fn fit_options(&self) -> Result<FitOptions> {
        Ok(FitOptions {
            mirror: self.bool("transition.mirror")?,
            min_samples: self.usize("transition.min_samples")?,
        })
    }

    pub fn sync(&self) -> Result<SyncParams> {
        Ok(SyncParams {
            window: self.f64("sync.window")?,
            max_dist: self.f64("sync.max_dist")?,
        })
    }

    pub fn transition_radius(&self) -> Result<f64> {
        self.f64("transition.radius")
    }

    pub fn distance_metric(&self) -> Result<DistanceMetric> {
        match self.raw("transition.distance_metric") {
            "euclidean" => Ok(DistanceMetric::Euclidean),
            "x_only" => Ok(DistanceMetric::XOnly),
            other => Err(Error::invalid_argument(format!(
                "transition.distance_metric must be euclidean or x_only, got {other:?}"
            ))),
        }
    }

    pub fn scalar_mode(&self) -> Result<ScalarMode> {
        match self.raw("eval.scalar_mode") {
            "grid_max" => Ok(ScalarMode::GridMax),
            "player_max" => Ok(ScalarMode::PlayerMax),
            other => Err(Error::invalid_argument(format!(
                "eval.scalar_mode must be grid_max or player_max, got {other:?}"
            ))),
        }
    }

    pub fn transition_norm(&self) -> Result<Option<Normalization>> {
        match self.raw("eval.transition_norm") {
            "default" => Ok(None),
            "max" => Ok(Some(Normalization::Max)),
            "sum" => Ok(Some(Normalization::Sum)),
            other => Err(Error::invalid_argument(format!(
                "eval.transition_norm must be default, max or sum, got {other:?}"
            ))),
        }
    }

    pub fn transition_source(&self) -> Result<TransitionSourceKind> {
        match self.raw("eval.transition_source") {
            "kernel" => Ok(TransitionSourceKind::Kernel),
            "gaussian" => Ok(TransitionSourceKind::Gaussian),
            other => Err(Error::invalid_argument(format!(
                "eval.transition_source must be kernel or gaussian, got {other:?}"
            ))),
        }
    }

    pub fn counter_rule(&self) -> Result<CounterRuleParams> {
        Ok(CounterRuleParams {
            min_gain: self.f64("counter.min_gain")?,
            min_directness: self.f64("counter.min_directness")?,
            final_third: match self.raw("counter.final_third") {
                "attacking" => FinalThird::Attacking,
                "defending" => FinalThird::Defending,
                other => {
                    return Err(Error::invalid_argument(format!(
                        "counter.final_third must be attacking or defending, got {other:?}"
                    )))
                }
            },
        })
    }

    /// Assemble the evaluation config from the resolved values.
    pub fn evaluation(&self, grid: &GridSpec) -> Result<EvaluationConfig> {
        Ok(EvaluationConfig {
            motion: self.motion()?,
            control: self.control()?,
            field_value: self.field_value()?,
            score: self.score(grid)?,
            gaussian: self.gaussian()?,
            transition_source: self.transition_source()?,
            transition_norm: self.transition_norm()?,
            scalar_mode: self.scalar_mode()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        let cfg = RunConfig::default();
        let pitch = cfg.pitch().unwrap();
        assert_eq!(pitch.length, 105.0);
        let grid = cfg.grid(&pitch).unwrap();
        assert_eq!(grid.n_cells(), 1600);
        let control = cfg.control().unwrap();
        assert_eq!(control.lambda, 4.3);
        assert_eq!(control.dt, 0.04);
        assert!(matches!(cfg.score(&grid).unwrap(), ScoreModel::Analytic { .. }));
    }

    #[test]
    fn file_values_and_overrides_apply() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("# comment\nppcf.lambda = 3.5\ngrid.nx = 20 # inline\n")
            .unwrap();
        assert_eq!(cfg.control().unwrap().lambda, 3.5);
        cfg.apply_overrides(&["ppcf.lambda=4.0".to_string()]).unwrap();
        assert_eq!(cfg.control().unwrap().lambda, 4.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut cfg = RunConfig::default();
        assert!(matches!(
            cfg.set("ppcf.typo", "1"),
            Err(Error::InvalidArgument(_))
        ));
        assert!(cfg.apply_text("nonsense.key = 3\n").is_err());
    }

    #[test]
    fn malformed_lines_rejected() {
        let mut cfg = RunConfig::default();
        assert!(matches!(
            cfg.apply_text("just some words\n"),
            Err(Error::InvalidFormat(_))
        ));
    }

    #[test]
    fn echo_reflects_overrides() {
        let mut cfg = RunConfig::default();
        cfg.set("eval.scalar_mode", "player_max").unwrap();
        assert_eq!(cfg.echo()["eval.scalar_mode"], "player_max");
        assert!(cfg.echo().contains_key("ppcf.lambda"));
    }

    #[test]
    fn enum_values_validated() {
        let mut cfg = RunConfig::default();
        cfg.set("eval.transition_norm", "sideways").unwrap();
        assert!(cfg.transition_norm().is_err());
        cfg.set("eval.transition_norm", "sum").unwrap();
        assert_eq!(cfg.transition_norm().unwrap(), Some(Normalization::Sum));
    }
}
