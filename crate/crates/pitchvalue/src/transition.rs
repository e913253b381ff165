//! Models of where the next on-ball event occurs.
//!
//! Two interchangeable sources: an isotropic Gaussian centered on the ball,
//! and a per-area kernel density estimate fitted to observed pass end points.
//! Pass data is mirrored across the pitch centerline before fitting, and each
//! area's bandwidth comes from a normal-reference rule doubled for smoothness.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{area_of, AreaPartition, GridSpec, PitchSpec, Vec2, N_AREAS};

/// One pass in attack-normalized coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PassSample {
    pub start: Vec2,
    pub end: Vec2,
}

impl PassSample {
    /// Reflection across the pitch centerline (y negated at both ends).
    pub fn mirrored(&self) -> PassSample {
        PassSample {
            start: Vec2::new(self.start.x, -self.start.y),
            end: Vec2::new(self.end.x, -self.end.y),
        }
    }
}

/// Bandwidth from the normal-reference rule, doubled:
/// `h = (3n/4)^(-1/5) * sqrt(sigma_hat) * 2` with `sigma_hat` the mean of the
/// unbiased per-axis variances.
pub fn silverman_bandwidth(samples: &[Vec2]) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::insufficient_data(format!(
            "bandwidth needs at least 2 samples, got {n}"
        )));
    }
    let nf = n as f64;
    let mean_x = samples.iter().map(|p| p.x).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|p| p.y).sum::<f64>() / nf;
    let var_x = samples.iter().map(|p| (p.x - mean_x).powi(2)).sum::<f64>() / (nf - 1.0);
    let var_y = samples.iter().map(|p| (p.y - mean_y).powi(2)).sum::<f64>() / (nf - 1.0);
    let sigma_hat = (var_x + var_y) / 2.0;
    if sigma_hat <= 0.0 {
        return Err(Error::degenerate_data(
            "bandwidth undefined for zero-variance samples",
        ));
    }
    Ok((0.75 * nf).powf(-0.2) * sigma_hat.sqrt() * 2.0)
}

/// A fitted kernel: sample points and a positive bandwidth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AreaKernel {
    pub samples: Vec<Vec2>,
    pub h: f64,
}

impl AreaKernel {
    pub fn fit(samples: Vec<Vec2>) -> Result<AreaKernel> {
        let h = silverman_bandwidth(&samples)?;
        Ok(AreaKernel { samples, h })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Gaussian product-kernel density: `1/(n h^2) * sum K((p - p_i)/h)` with
    /// `K(u) = exp(-|u|^2 / 2) / (2 pi)`.
    pub fn density_at(&self, p: Vec2) -> f64 {
        let inv_h2 = 1.0 / (self.h * self.h);
        let sum: f64 = self
            .samples
            .iter()
            .map(|s| {
                let dx = p.x - s.x;
                let dy = p.y - s.y;
                (-(dx * dx + dy * dy) * inv_h2 / 2.0).exp()
            })
            .sum();
        sum * inv_h2 / (self.samples.len() as f64 * 2.0 * std::f64::consts::PI)
    }
}

/// Per-area pass-destination kernels with a pooled fallback for sparse areas.
#[derive(Debug, Clone)]
pub struct KernelModel {
    areas: Vec<Option<AreaKernel>>,
    fallback: AreaKernel,
    pub min_samples: usize,
    pub mirrored: bool,
}

/// Fitting options; mirroring is on unless the caller disables it.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub mirror: bool,
    pub min_samples: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            mirror: true,
            min_samples: 50,
        }
    }
}

/// Fit per-area destination kernels from pass samples. With mirroring, every
/// pass also contributes its centerline reflection. Areas with fewer than
/// `min_samples` end points fall back to the pooled kernel.
pub fn fit_transition_kernel(
    passes: &[PassSample],
    part: &AreaPartition,
    pitch: &PitchSpec,
    opts: FitOptions,
) -> Result<KernelModel> {
    if passes.is_empty() {
        return Err(Error::insufficient_data("no passes to fit"));
    }
    let mut augmented: Vec<PassSample> = Vec::with_capacity(passes.len() * 2);
    augmented.extend_from_slice(passes);
    if opts.mirror {
        augmented.extend(passes.iter().map(|p| p.mirrored()));
    }

    let mut by_area: Vec<Vec<Vec2>> = vec![Vec::new(); N_AREAS];
    let mut pooled: Vec<Vec2> = Vec::with_capacity(augmented.len());
    for pass in &augmented {
        let area = area_of(pass.start, part, pitch);
        by_area[area - 1].push(pass.end);
        pooled.push(pass.end);
    }

    let fallback = AreaKernel::fit(pooled)?;
    let areas = by_area
        .into_iter()
        .map(|samples| {
            if samples.len() < opts.min_samples {
                return None;
            }
            AreaKernel::fit(samples).ok()
        })
        .collect();
    Ok(KernelModel {
        areas,
        fallback,
        min_samples: opts.min_samples,
        mirrored: opts.mirror,
    })
}

impl KernelModel {
    /// The kernel used for a given area: the fitted one, or the pooled
    /// fallback where data was too sparse.
    pub fn kernel_for(&self, area: usize) -> Result<&AreaKernel> {
        if !(1..=N_AREAS).contains(&area) {
            return Err(Error::invalid_argument(format!(
                "area id {area} outside 1..={N_AREAS}"
            )));
        }
        Ok(self.areas[area - 1].as_ref().unwrap_or(&self.fallback))
    }

    pub fn is_fitted(&self, area: usize) -> bool {
        (1..=N_AREAS).contains(&area) && self.areas[area - 1].is_some()
    }

    pub fn fallback(&self) -> &AreaKernel {
        &self.fallback
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = KernelModelFile {
            kernel_model_version: KERNEL_MODEL_VERSION,
            min_samples: self.min_samples,
            mirrored: self.mirrored,
            areas: self
                .areas
                .iter()
                .enumerate()
                .map(|(i, k)| AreaFile {
                    area: i + 1,
                    fitted: k.is_some(),
                    n: k.as_ref().map(|k| k.n()).unwrap_or(0),
                    h: k.as_ref().map(|k| k.h),
                    samples: k
                        .as_ref()
                        .map(|k| k.samples.iter().map(|p| [p.x, p.y]).collect())
                        .unwrap_or_default(),
                })
                .collect(),
            fallback: KernelFile {
                n: self.fallback.n(),
                h: self.fallback.h,
                samples: self.fallback.samples.iter().map(|p| [p.x, p.y]).collect(),
            },
        };
        let json = serde_json::to_string(&file)
            .map_err(|e| Error::invalid_format(format!("kernel model encode: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<KernelModel> {
        let text = std::fs::read_to_string(path)?;
        let file: KernelModelFile = serde_json::from_str(&text)
            .map_err(|e| Error::invalid_format(format!("kernel model parse: {e}")))?;
        if file.kernel_model_version != KERNEL_MODEL_VERSION {
            return Err(Error::invalid_format(format!(
                "unsupported kernel model version {}",
                file.kernel_model_version
            )));
        }
        if file.areas.len() != N_AREAS {
            return Err(Error::invalid_format(format!(
                "kernel model has {} areas, expected {N_AREAS}",
                file.areas.len()
            )));
        }
        let mut areas: Vec<Option<AreaKernel>> = vec![None; N_AREAS];
        for entry in file.areas {
            if !(1..=N_AREAS).contains(&entry.area) {
                return Err(Error::invalid_format(format!(
                    "kernel model area id {}",
                    entry.area
                )));
            }
            if entry.fitted {
                let h = entry.h.filter(|h| *h > 0.0).ok_or_else(|| {
                    Error::invalid_format(format!("area {}: missing bandwidth", entry.area))
                })?;
                areas[entry.area - 1] = Some(AreaKernel {
                    samples: entry.samples.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
                    h,
                });
            }
        }
        if file.fallback.h <= 0.0 {
            return Err(Error::invalid_format("fallback kernel bandwidth must be > 0"));
        }
        Ok(KernelModel {
            areas,
            fallback: AreaKernel {
                samples: file
                    .fallback
                    .samples
                    .iter()
                    .map(|p| Vec2::new(p[0], p[1]))
                    .collect(),
                h: file.fallback.h,
            },
            min_samples: file.min_samples,
            mirrored: file.mirrored,
        })
    }
}

const KERNEL_MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct KernelModelFile {
    kernel_model_version: u32,
    min_samples: usize,
    mirrored: bool,
    areas: Vec<AreaFile>,
    fallback: KernelFile,
}

#[derive(Serialize, Deserialize)]
struct AreaFile {
    area: usize,
    fitted: bool,
    n: usize,
    h: Option<f64>,
    samples: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct KernelFile {
    n: usize,
    h: f64,
    samples: Vec<[f64; 2]>,
}

/// Destination density for the ball's area at a point.
pub fn kde_at(model: &KernelModel, area: usize, p: Vec2) -> Result<f64> {
    Ok(model.kernel_for(area)?.density_at(p))
}

/// Ball-centered Gaussian transition weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianTransitionParams {
    pub sigma: f64,
}

impl Default for GaussianTransitionParams {
    fn default() -> Self {
        GaussianTransitionParams { sigma: 14.0 }
    }
}

/// Unnormalized Gaussian weight around the ball; 1 at the ball itself.
pub fn gaussian_transition_at(ball: Vec2, r: Vec2, p: &GaussianTransitionParams) -> f64 {
    let d2 = (r.x - ball.x).powi(2) + (r.y - ball.y).powi(2);
    (-d2 / (2.0 * p.sigma * p.sigma)).exp()
}

/// Which transition model feeds a surface.
#[derive(Debug, Clone, Copy)]
pub enum TransitionSource<'a> {
    Kernel(&'a KernelModel),
    Gaussian(GaussianTransitionParams),
}

/// How a transition field is rescaled over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Maximum cell equals 1.
    Max,
    /// Cells sum to 1.
    Sum,
}

/// Per-cell transition weights for a ball position, rescaled per `norm`.
pub fn transition_field(
    source: TransitionSource<'_>,
    ball: Vec2,
    grid: &GridSpec,
    part: &AreaPartition,
    pitch: &PitchSpec,
    norm: Normalization,
) -> Result<Vec<f64>> {
    let mut weights: Vec<f64> = match source {
        TransitionSource::Gaussian(params) => grid
            .centers()
            .iter()
            .map(|&c| gaussian_transition_at(ball, c, &params))
            .collect(),
        TransitionSource::Kernel(model) => {
            let area = area_of(ball, part, pitch);
            let kernel = model.kernel_for(area)?;
            grid.centers()
                .par_iter()
                .map(|&c| kernel.density_at(c))
                .collect()
        }
    };
    let scale = match norm {
        Normalization::Max => weights.iter().cloned().fold(0.0f64, f64::max),
        Normalization::Sum => weights.iter().sum::<f64>(),
    };
    if scale <= 0.0 {
        return Err(Error::DegenerateField(
            "transition weights are zero everywhere on the grid".into(),
        ));
    }
    for w in &mut weights {
        *w /= scale;
    }
    Ok(weights)
}
