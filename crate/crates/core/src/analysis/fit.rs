//! Straight-line fit of observed low-outcome probabilities against their flip
//! probabilities. Slope·16 estimates |⟨B̂⟩|; the intercept is the
//! zero-error extrapolation, the intrinsic probability p_int(low).

use serde::{Deserialize, Serialize};

use super::bitflip::CIRELSON_BOUND;
use crate::error::{Error, Result};
use crate::sim::outcome::Outcome;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    pub p_bflip: f64,
    pub p_obs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
}

impl FitPoint {
    pub fn new(p_bflip: f64, p_obs: f64) -> Self {
        FitPoint { theta: None, outcome: None, p_bflip, p_obs, std_err: None }
    }

    pub fn with_std_err(mut self, std_err: f64) -> Self {
        self.std_err = Some(std_err);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_err: f64,
    pub intercept_std_err: f64,
    /// Covariance of (slope, intercept).
    pub covariance: f64,
    /// 16 · slope.
    pub bell_magnitude: f64,
    pub bell_magnitude_std_err: f64,
    /// The intercept.
    pub p_int_low: f64,
    pub p_int_low_std_err: f64,
    /// bell_magnitude / 2√2.
    pub cirelson_ratio: f64,
    pub cirelson_ratio_std_err: f64,
    /// Weighted sum of squared residuals (plain RSS when unweighted).
    pub chi2: f64,
    pub dof: usize,
    pub weighted: bool,
    pub n_points: usize,
}

/// Least squares of `p_obs` on `p_bflip`.
///
/// When every point carries a standard error the fit is weighted by 1/σ² and
/// parameter errors come from (XᵀWX)⁻¹ as is. Without errors the fit is
/// unweighted and the covariance is scaled by RSS/(n − 2). Mixing the two is
/// rejected.
pub fn fit_bell_magnitude(points: &[FitPoint]) -> Result<FitResult> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {n}")));
    }
    let with_err = points.iter().filter(|p| p.std_err.is_some()).count();
    let weighted = match with_err {
        0 => false,
        k if k == n => true,
        k => return Err(Error::DegenerateFit(format!("{k} of {n} points carry standard errors; need all or none"))),
    };
    for (i, p) in points.iter().enumerate() {
        if !(p.p_bflip.is_finite() && p.p_obs.is_finite()) {
            return Err(Error::DegenerateFit(format!("point {i} is not finite")));
        }
    }

    let weights: Vec<f64> = if weighted {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let s = p.std_err.expect("checked above");
                if s.is_finite() && s > 0.0 {
                    Ok(1.0 / (s * s))
                } else {
                    Err(Error::DegenerateFit(format!("point {i} has standard error {s}")))
                }
            })
            .collect::<Result<_>>()?
    } else {
        vec![1.0; n]
    };

    let sw: f64 = weights.iter().sum();
    if sw <= 0.0 {
        return Err(Error::DegenerateFit("all weights are zero".into()));
    }
    let xm = points.iter().zip(&weights).map(|(p, w)| w * p.p_bflip).sum::<f64>() / sw;
    let ym = points.iter().zip(&weights).map(|(p, w)| w * p.p_obs).sum::<f64>() / sw;
    let sxx: f64 = points.iter().zip(&weights).map(|(p, w)| w * (p.p_bflip - xm).powi(2)).sum();
    let sxy: f64 = points.iter().zip(&weights).map(|(p, w)| w * (p.p_bflip - xm) * (p.p_obs - ym)).sum();

    let spread = points.iter().map(|p| (p.p_bflip - xm).abs()).fold(0.0, f64::max);
    if spread <= 1e-14 * xm.abs().max(1.0) || sxx <= 0.0 {
        return Err(Error::DegenerateFit("fewer than 2 distinct p_bflip values".into()));
    }

    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let chi2: f64 =
        points.iter().zip(&weights).map(|(p, w)| w * (p.p_obs - intercept - slope * p.p_bflip).powi(2)).sum();
    let dof = n - 2;

    let scale = if weighted {
        1.0
    } else if dof > 0 {
        chi2 / dof as f64
    } else {
        0.0
    };
    let var_slope = scale / sxx;
    let var_intercept = scale * (1.0 / sw + xm * xm / sxx);
    let covariance = -scale * xm / sxx;

    let slope_std_err = var_slope.sqrt();
    Ok(FitResult {
        slope,
        intercept,
        slope_std_err,
        intercept_std_err: var_intercept.sqrt(),
        covariance,
        bell_magnitude: 16.0 * slope,
        bell_magnitude_std_err: 16.0 * slope_std_err,
        p_int_low: intercept,
        p_int_low_std_err: var_intercept.sqrt(),
        cirelson_ratio: 16.0 * slope / CIRELSON_BOUND,
        cirelson_ratio_std_err: 16.0 * slope_std_err / CIRELSON_BOUND,
        chi2,
        dof,
        weighted,
        n_points: n,
    })
}

/// Fit input and result as exchanged on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub points: Vec<FitPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<FitResult>,
}
