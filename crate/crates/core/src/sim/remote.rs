//! Remote state preparation, measurement visibilities and the two-photon
//! interference visibility of the source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::linalg::Op2;
use crate::quantum::observable::{observables, Side};
use crate::quantum::povm::{build_joint_povm, LocalOutcome, MeasurementSetting};
use crate::quantum::state::{QubitState, TwoQubitState};

/// Projections below this probability are treated as impossible.
pub const MIN_PROJECTION_PROB: f64 = 1e-12;
/// Precise expectations below this magnitude make V_ξ undefined.
pub const MIN_PRECISE_EXPECTATION: f64 = 1e-12;

/// State of the partner photon after `side` passes a polarizer at `angle_deg`.
pub fn conditional_state(state: &TwoQubitState, side: Side, angle_deg: f64) -> Result<QubitState> {
    let proj = Op2::polarization_projector(angle_deg);
    let full = match side {
        Side::A => proj.kron(&Op2::identity()),
        Side::B => Op2::identity().kron(&proj),
    };
    let p = state.expectation(&full);
    if p <= MIN_PROJECTION_PROB {
        return Err(Error::ZeroProbability(p));
    }
    let post = full * *state.rho() * full;
    let reduced = match side {
        Side::A => post.partial_trace_a(),
        Side::B => post.partial_trace_b(),
    };
    Ok(QubitState { rho: reduced.scale(1.0 / p) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityEstimate {
    pub vx: f64,
    pub vy: f64,
    pub radius: f64,
}

impl VisibilityEstimate {
    pub fn new(vx: f64, vy: f64) -> Self {
        VisibilityEstimate { vx, vy, radius: vx.hypot(vy) }
    }
}

/// `V_ξ = ⟨ξ⟩_joint / ⟨ξ⟩_precise` for ξ ∈ {x, y} on `side`.
///
/// The input for each ξ is prepared remotely by selecting the polarization
/// orthogonal to ξ's +1 eigenstate on the partner photon; for anti-correlated
/// pairs this approximates the +1 eigenstate.
pub fn joint_visibilities(state: &TwoQubitState, theta_deg: f64, side: Side) -> Result<VisibilityEstimate> {
    let obs = observables(side);
    let povm = build_joint_povm(MeasurementSetting::new(theta_deg, side));
    let ratio = |observable: &Op2, plus_angle: f64, pick: fn(LocalOutcome) -> f64| -> Result<f64> {
        let cond = conditional_state(state, side.other(), plus_angle + 90.0)?;
        let precise = cond.expectation(observable);
        if precise.abs() < MIN_PRECISE_EXPECTATION {
            return Err(Error::VanishingExpectation(precise));
        }
        let joint: f64 = LocalOutcome::ALL.iter().map(|&o| pick(o) * cond.expectation(povm.element(o))).sum();
        Ok(joint / precise)
    };
    let vx = ratio(&obs.x.operator, obs.x.plus_angle, |o| o.x.as_f64())?;
    let vy = ratio(&obs.y.operator, obs.y.plus_angle, |o| o.y.as_f64())?;
    Ok(VisibilityEstimate::new(vx, vy))
}

/// Coincidences for parallel polarizer settings φ / φ+90° on both photons;
/// `+` is the φ setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelCounts {
    pub plus_plus: f64,
    pub plus_minus: f64,
    pub minus_plus: f64,
    pub minus_minus: f64,
}

/// Expected coincidences at `phi_deg` for `total` detected pairs.
pub fn parallel_counts(state: &TwoQubitState, phi_deg: f64, total: f64) -> ParallelCounts {
    let p = Op2::polarization_projector(phi_deg);
    let m = Op2::polarization_projector(phi_deg + 90.0);
    let e = |a: &Op2, b: &Op2| total * state.expectation(&a.kron(b));
    ParallelCounts { plus_plus: e(&p, &p), plus_minus: e(&p, &m), minus_plus: e(&m, &p), minus_minus: e(&m, &m) }
}

/// `(N₊₋ + N₋₊ − N₊₊ − N₋₋) / (N₊₋ + N₋₊ + N₊₊ + N₋₋)`.
pub fn interferometer_visibility(n_pm: f64, n_mp: f64, n_pp: f64, n_mm: f64) -> Result<f64> {
    for n in [n_pm, n_mp, n_pp, n_mm] {
        if !(n.is_finite() && n >= 0.0) {
            return Err(Error::Domain { what: "coincidence count", value: n });
        }
    }
    let total = n_pm + n_mp + n_pp + n_mm;
    if total <= 0.0 {
        return Err(Error::EmptyCounts);
    }
    Ok((n_pm + n_mp - n_pp - n_mm) / total)
}

impl ParallelCounts {
    pub fn visibility(&self) -> Result<f64> {
        interferometer_visibility(self.plus_minus, self.minus_plus, self.plus_plus, self.minus_minus)
    }
}
