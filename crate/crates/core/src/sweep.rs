//! θ sweeps with equal settings on both photons, optionally with sampled
//! counts, and their reduction to fit points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::bitflip::{pbflip_with_rates, FlipRates};
use crate::analysis::fit::FitPoint;
use crate::error::{Error, Result};
use crate::quantum::state::TwoQubitState;
use crate::sim::counts::{probabilities_from_counts, sample_counts};
use crate::sim::joint::joint_distribution;
use crate::sim::outcome::{b_value, minimal_outcomes, Outcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub outcome: Outcome,
    pub b: i32,
    /// Exact probability for the simulated state.
    pub probability: f64,
    pub p_bflip: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_obs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub mean_total: f64,
    pub seed: u64,
}

/// Seed for the i-th θ of a sweep (θ sorted ascending).
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// One row per (θ, outcome), ordered by θ then canonical outcome order.
/// θ values must lie in [0°, 90°].
pub fn sweep(state: &TwoQubitState, thetas: &[f64], sampling: Option<Sampling>) -> Result<Vec<SweepRow>> {
    if thetas.is_empty() {
        return Err(Error::Domain { what: "number of θ values", value: 0.0 });
    }
    let mut thetas = thetas.to_vec();
    if let Some(bad) = thetas.iter().find(|t| !(0.0..=90.0).contains(*t)) {
        return Err(Error::Domain { what: "θ (degrees)", value: *bad });
    }
    thetas.sort_by(f64::total_cmp);

    let blocks: Vec<Result<Vec<SweepRow>>> = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let dist = joint_distribution(state, theta, theta);
            let rates = FlipRates::from_theta(theta, theta)?;
            let sampled = match sampling {
                Some(s) => {
                    let table = sample_counts(&dist, s.mean_total, point_seed(s.seed, i))?;
                    Some((probabilities_from_counts(&table)?, table))
                }
                None => None,
            };
            Ok(Outcome::all()
                .map(|o| {
                    let (counts, p_obs, std_err) = match &sampled {
                        Some((est, table)) => {
                            let n = table.get(o);
                            // a zero count still carries one count's worth of uncertainty
                            let se = (n.max(1) as f64).sqrt() / est.total as f64;
                            (Some(n), Some(est.dist.p(o)), Some(se))
                        }
                        None => (None, None, None),
                    };
                    SweepRow {
                        theta,
                        outcome: o,
                        b: b_value(o),
                        probability: dist.p(o),
                        p_bflip: pbflip_with_rates(o, &rates),
                        counts,
                        p_obs,
                        std_err,
                    }
                })
                .collect())
        })
        .collect();

    let mut rows = Vec::with_capacity(16 * thetas.len());
    for block in blocks {
        rows.extend(block?);
    }
    Ok(rows)
}

/// Points for the line fit from the rows of the given outcomes. Sampled rows
/// use observed frequencies with their errors; exact rows are unweighted.
pub fn fit_points(rows: &[SweepRow], outcomes: &[Outcome]) -> Vec<FitPoint> {
    rows.iter()
        .filter(|r| outcomes.contains(&r.outcome))
        .map(|r| FitPoint {
            theta: Some(r.theta),
            outcome: Some(r.outcome),
            p_bflip: r.p_bflip,
            p_obs: r.p_obs.unwrap_or(r.probability),
            std_err: r.std_err,
        })
        .collect()
}

/// Fit points from the four outcomes that reach the Cirel'son floor.
pub fn minimal_fit_points(rows: &[SweepRow]) -> Vec<FitPoint> {
    fit_points(rows, &minimal_outcomes())
}

/// 0°, 10°, …, 90°.
pub fn default_thetas() -> Vec<f64> {
    (0..=9).map(|i| 10.0 * i as f64).collect()
}
