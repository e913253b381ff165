//! Sequence metrics and nonparametric statistics.
//!
//! The comparison battery: Mann-Whitney U (exact by enumeration for small
//! samples without ties, normal approximation with tie and continuity
//! corrections otherwise), Cohen's d on pooled unbiased variances, and
//! Spearman rank correlation with average ranks for ties. On top of those,
//! counter-attack outcome comparisons and per-team transition profiles.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::geometry::AttackDir;
use crate::pipeline::detect::{CounterAttack, TransitionEvent, TransitionKind};
use crate::pipeline::events::EventRecord;
use crate::pipeline::sync::{synchronize, SyncParams};
use crate::pipeline::tracking::{snapshot_from_frame, TrackingFrame};

/// Largest pooled sample size enumerated exactly.
pub const EXACT_ENUMERATION_LIMIT: usize = 30;

/// How a Mann-Whitney p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

/// Mann-Whitney test result: `u` is the smaller of the two statistics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MannWhitney {
    pub u: f64,
    pub p: f64,
    pub method: MwuMethod,
}

/// Two-sided Mann-Whitney U test. Ties contribute half wins to the
/// statistic.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid_argument("both samples must be non-empty"));
    }
    let na = a.len();
    let nb = b.len();
    let mut u_a = 0.0f64;
    for &x in a {
        for &y in b {
            if x > y {
                u_a += 1.0;
            } else if x == y {
                u_a += 0.5;
            }
        }
    }
    let u_b = (na * nb) as f64 - u_a;
    let u = u_a.min(u_b);

    let has_ties = {
        let mut pooled: Vec<f64> = a.iter().chain(b.iter()).cloned().collect();
        pooled.sort_by(f64::total_cmp);
        pooled.windows(2).any(|w| w[0] == w[1])
    };

    if u_a == u_b {
        // Dead-even split carries no evidence either way.
        return Ok(MannWhitney {
            u,
            p: 1.0,
            method: if !has_ties && na + nb <= EXACT_ENUMERATION_LIMIT {
                MwuMethod::Exact
            } else {
                MwuMethod::NormalApprox
            },
        });
    }

    if !has_ties && na + nb <= EXACT_ENUMERATION_LIMIT {
        let p = exact_two_sided_p(u as usize, na, nb);
        Ok(MannWhitney {
            u,
            p,
            method: MwuMethod::Exact,
        })
    } else {
        let p = normal_approx_two_sided_p(u, a, b);
        Ok(MannWhitney {
            u,
            p,
            method: MwuMethod::NormalApprox,
        })
    }
}

/// Exact two-sided p-value: twice the lower tail of the U distribution,
/// from the standard count recurrence.
pub fn exact_two_sided_p(u_min: usize, na: usize, nb: usize) -> f64 {
    let mut table: HashMap<(usize, usize), Vec<f64>> = HashMap::new();
    let dist = u_distribution(na, nb, &mut table).clone();
    let total: f64 = dist.iter().sum();
    let tail: f64 = dist.iter().take(u_min + 1).sum();
    (2.0 * tail / total).min(1.0)
}

/// Number of arrangements with each U value, via
/// `c(n, m, u) = c(n-1, m, u-m) + c(n, m-1, u)`.
fn u_distribution(
    n: usize,
    m: usize,
    table: &mut HashMap<(usize, usize), Vec<f64>>,
) -> &Vec<f64> {
    if !table.contains_key(&(n, m)) {
        let dist = if n == 0 || m == 0 {
            vec![1.0]
        } else {
            let left = u_distribution(n - 1, m, table).clone();
            let right = u_distribution(n, m - 1, table).clone();
            let mut dist = vec![0.0; n * m + 1];
            for (u, c) in left.iter().enumerate() {
                dist[u + m] += c;
            }
            for (u, c) in right.iter().enumerate() {
                dist[u] += c;
            }
            dist
        };
        table.insert((n, m), dist);
    }
    &table[&(n, m)]
}

/// Normal approximation with tie and continuity corrections.
pub fn normal_approx_two_sided_p(u_min: f64, a: &[f64], b: &[f64]) -> f64 {
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;
    let mean = na * nb / 2.0;

    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).cloned().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = (u_min - mean + 0.5) / var.sqrt();
    (2.0 * normal_cdf(z)).min(1.0)
}

/// Standard normal CDF via a rational erfc approximation (absolute error
/// below 1.5e-7).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let t = 1.0 / (1.0 + 0.5 * ax);
    let tau = t * (-ax * ax - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587
                                    + t * (-0.82215223 + t * 0.17087277)))))))))
    .exp();
    if x >= 0.0 {
        tau
    } else {
        2.0 - tau
    }
}

/// Cohen's d with the pooled unbiased variance convention.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid_argument(
            "effect size needs at least 2 values per group",
        ));
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let mean_a = a.iter().sum::<f64>() / na;
    let mean_b = b.iter().sum::<f64>() / nb;
    let var_a = a.iter().map(|x| (x - mean_a).powi(2)).sum::<f64>() / (na - 1.0);
    let var_b = b.iter().map(|x| (x - mean_b).powi(2)).sum::<f64>() / (nb - 1.0);
    let pooled = ((na - 1.0) * var_a + (nb - 1.0) * var_b) / (na + nb - 2.0);
    if pooled <= 0.0 {
        return Err(Error::degenerate_data("pooled variance is zero"));
    }
    Ok((mean_a - mean_b) / pooled.sqrt())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid_argument(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::invalid_argument("need at least 3 pairs"));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx).powi(2);
        syy += (yi - my).powi(2);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::degenerate_data("zero rank variance"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Per-sequence scalars: one value per event, their max, and the first-to-
/// third change.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceMetric {
    pub sequence_id: String,
    pub scalars: [f64; 3],
    pub max_value: f64,
    pub increase: f64,
}

impl SequenceMetric {
    pub fn new(sequence_id: String, scalars: [f64; 3]) -> SequenceMetric {
        SequenceMetric {
            sequence_id,
            max_value: scalars.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            increase: scalars[2] - scalars[0],
            scalars,
        }
    }
}

/// Everything needed to score events: a configured evaluator, the tracking
/// frames and the synchronization gates.
pub struct EvalContext<'a> {
    pub evaluator: &'a Evaluator,
    pub frames: &'a [TrackingFrame],
    pub sync: SyncParams,
}

impl<'a> EvalContext<'a> {
    /// Positioning-value scalar for one event, evaluated from the
    /// perspective of the event's team. Fails when the event cannot be
    /// synchronized to a frame.
    pub fn obpv_scalar(&self, event: &EventRecord) -> Result<f64> {
        let (synced, _) = synchronize(std::slice::from_ref(event), self.frames, self.sync);
        let synced = synced.into_iter().next().ok_or_else(|| {
            Error::insufficient_data(format!("event {} failed to synchronize", event.event_id))
        })?;
        let frame = &self.frames[synced.frame_idx];
        let dir = event.attack_dir.unwrap_or(AttackDir::PlusX);
        let snapshot = snapshot_from_frame(frame, &event.team_id, dir)?;
        let surface = self.evaluator.obpv_surface(&snapshot)?;
        self.evaluator
            .event_scalar(&surface, &snapshot, self.evaluator.config().scalar_mode)
    }

    /// Scalars for the first three events of a sequence; None when any event
    /// fails to synchronize.
    fn sequence_scalars(&self, id: String, events: &[EventRecord]) -> Option<SequenceMetric> {
        let scalars: Vec<f64> = events
            .iter()
            .take(3)
            .filter_map(|e| self.obpv_scalar(e).ok())
            .collect();
        if scalars.len() < 3 {
            return None;
        }
        Some(SequenceMetric::new(id, [scalars[0], scalars[1], scalars[2]]))
    }
}

/// Group summary in a counter comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    pub mean: f64,
}

/// Per-outcome groups of a counter comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterGroups {
    pub success: GroupStats,
    pub fail: GroupStats,
}

/// Outcome comparison between successful and failed counter-attacks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterReport {
    pub groups: CounterGroups,
    #[serde(rename = "U")]
    pub u: f64,
    pub p: f64,
    pub d: f64,
    pub method: MwuMethod,
    pub sequences: Vec<SequenceMetric>,
    pub skipped_sync: usize,
}

/// Compare successful and failed counters by their sequence-max scalar.
pub fn counter_comparison(counters: &[CounterAttack], ctx: &EvalContext) -> Result<CounterReport> {
    let metrics: Vec<(bool, Option<SequenceMetric>)> = counters
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            (
                c.success,
                ctx.sequence_scalars(format!("{}#{}", c.match_id, i), &c.events),
            )
        })
        .collect();
    let skipped_sync = metrics.iter().filter(|(_, m)| m.is_none()).count();
    let mut success_vals = Vec::new();
    let mut fail_vals = Vec::new();
    let mut sequences = Vec::new();
    for (success, metric) in metrics.into_iter() {
        if let Some(m) = metric {
            if success {
                success_vals.push(m.max_value);
            } else {
                fail_vals.push(m.max_value);
            }
            sequences.push(m);
        }
    }
    if success_vals.len() < 2 || fail_vals.len() < 2 {
        return Err(Error::insufficient_data(format!(
            "need >= 2 counters per outcome, got {} successful / {} failed",
            success_vals.len(),
            fail_vals.len()
        )));
    }
    let test = mann_whitney_u(&success_vals, &fail_vals)?;
    let d = cohens_d(&success_vals, &fail_vals)?;
    Ok(CounterReport {
        groups: CounterGroups {
            success: GroupStats {
                n: success_vals.len(),
                mean: mean(&success_vals),
            },
            fail: GroupStats {
                n: fail_vals.len(),
                mean: mean(&fail_vals),
            },
        },
        u: test.u,
        p: test.p,
        d,
        method: test.method,
        sequences,
        skipped_sync,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Per-team transition summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TeamProfile {
    pub team_id: String,
    pub positive_count: usize,
    pub negative_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive_mean_increase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative_mean_increase: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covariate: Option<f64>,
}

/// Transition profile report, with rank correlations against a covariate
/// when one is supplied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfilesReport {
    pub teams: Vec<TeamProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_positive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_negative: Option<f64>,
    pub excluded_teams: Vec<String>,
    pub skipped_sync: usize,
}

/// Per-team mean first-to-third scalar increase over transitions. Positive
/// transitions are scored from the gaining team's perspective; negative ones
/// use the same gaining-team scalars, attributed to the team that lost the
/// ball. A covariate table adds Spearman correlations, optionally excluding
/// listed teams from the correlation.
pub fn transition_profiles(
    transitions: &[TransitionEvent],
    ctx: &EvalContext,
    covariates: Option<&BTreeMap<String, f64>>,
    exclude: &[String],
) -> Result<ProfilesReport> {
    // Positive and negative records of the same instant share the gaining
    // team's scalars; evaluate each instant once.
    let mut instants: Vec<(&str, usize, &TransitionEvent)> = Vec::new();
    for t in transitions {
        let key = (t.match_id.as_str(), t.index);
        if !instants.iter().any(|(m, i, _)| (*m, *i) == key) {
            instants.push((key.0, key.1, t));
        }
    }
    let scored: Vec<((String, usize), Option<SequenceMetric>)> = instants
        .par_iter()
        .map(|(m, i, t)| {
            (
                (m.to_string(), *i),
                ctx.sequence_scalars(format!("{m}#{i}"), &t.events),
            )
        })
        .collect();
    let by_instant: HashMap<(String, usize), Option<SequenceMetric>> =
        scored.into_iter().collect();

    let mut positive: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut negative: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut skipped_sync = 0usize;
    for t in transitions {
        let metric = match by_instant.get(&(t.match_id.clone(), t.index)) {
            Some(Some(m)) => m,
            _ => {
                skipped_sync += 1;
                continue;
            }
        };
        match t.kind {
            TransitionKind::Positive => positive
                .entry(t.gaining_team.clone())
                .or_default()
                .push(metric.increase),
            TransitionKind::Negative => negative
                .entry(t.losing_team.clone())
                .or_default()
                .push(metric.increase),
        }
    }

    let mut team_ids: Vec<String> = positive.keys().chain(negative.keys()).cloned().collect();
    team_ids.sort();
    team_ids.dedup();

    if let Some(table) = covariates {
        let missing: Vec<String> = team_ids
            .iter()
            .filter(|t| !table.contains_key(*t))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::invalid_argument(format!(
                "covariate table is missing teams: {}",
                missing.join(", ")
            )));
        }
    }

    let teams: Vec<TeamProfile> = team_ids
        .iter()
        .map(|team| {
            let pos = positive.get(team);
            let neg = negative.get(team);
            TeamProfile {
                team_id: team.clone(),
                positive_count: pos.map_or(0, Vec::len),
                negative_count: neg.map_or(0, Vec::len),
                positive_mean_increase: pos.filter(|v| !v.is_empty()).map(|v| mean(v)),
                negative_mean_increase: neg.filter(|v| !v.is_empty()).map(|v| mean(v)),
                covariate: covariates.and_then(|t| t.get(team).copied()),
            }
        })
        .collect();

    let (rho_positive, rho_negative) = match covariates {
        None => (None, None),
        Some(table) => {
            let correlate = |select: &dyn Fn(&TeamProfile) -> Option<f64>| -> Option<f64> {
                let pairs: Vec<(f64, f64)> = teams
                    .iter()
                    .filter(|p| !exclude.contains(&p.team_id))
                    .filter_map(|p| select(p).map(|v| (v, table[&p.team_id])))
                    .collect();
                let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                spearman_rho(&xs, &ys).ok()
            };
            (
                correlate(&|p| p.positive_mean_increase),
                correlate(&|p| p.negative_mean_increase),
            )
        }
    };

    Ok(ProfilesReport {
        teams,
        rho_positive,
        rho_negative,
        excluded_teams: exclude.to_vec(),
        skipped_sync,
    })
}
