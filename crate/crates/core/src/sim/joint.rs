//! Joint statistics of two local joint measurements.

use serde::{Deserialize, Serialize};

use super::outcome::{b_value, Outcome};
use crate::quantum::linalg::Op4;
use crate::quantum::observable::Side;
use crate::quantum::povm::{povm_elements, VisibilityPair};
use crate::quantum::state::TwoQubitState;

/// Probabilities of the sixteen outcomes, indexed by `Outcome::index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub probs: [f64; 16],
    /// (θ_A, θ_B) in degrees when known.
    pub settings: Option<(f64, f64)>,
}

impl JointDistribution {
    pub fn uniform() -> Self {
        JointDistribution { probs: [1.0 / 16.0; 16], settings: None }
    }

    pub fn p(&self, o: Outcome) -> f64 {
        self.probs[o.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        Outcome::all().map(|o| (o, self.p(o)))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn min(&self) -> (Outcome, f64) {
        self.iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("sixteen outcomes")
    }

    /// Marginal over the other side's outcomes, indexed by `LocalOutcome::index`.
    pub fn marginal(&self, side: Side) -> [f64; 4] {
        let mut m = [0.0; 4];
        for (o, p) in self.iter() {
            let local = match side {
                Side::A => o.a,
                Side::B => o.b,
            };
            m[local.index()] += p;
        }
        m
    }

    /// Mean of the product of two of the four signs, e.g. ⟨x_A x_B⟩.
    pub fn correlation(&self, pick: impl Fn(Outcome) -> i32) -> f64 {
        self.iter().map(|(o, p)| f64::from(pick(o)) * p).sum()
    }
}

/// Signed values of the same trace formula at visibilities where the operator
/// measure is no longer positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiDistribution {
    pub values: [f64; 16],
}

impl QuasiDistribution {
    pub fn q(&self, o: Outcome) -> f64 {
        self.values[o.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, f64)> + '_ {
        Outcome::all().map(|o| (o, self.q(o)))
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of the negative entries.
    pub fn negativity(&self) -> f64 {
        self.values.iter().filter(|&&v| v < 0.0).sum()
    }
}

/// Probability split between b = +2 and b = −2, with ⟨b⟩ = 2P(+2) − 2P(−2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BAggregate {
    pub p_plus: f64,
    pub p_minus: f64,
    pub mean_b: f64,
}

/// `Tr[(Ê_{m_A} ⊗ Ê_{m_B}) ρ]` for arbitrary (possibly unphysical) visibilities.
pub fn trace_formula(state: &TwoQubitState, vis_a: VisibilityPair, vis_b: VisibilityPair) -> [f64; 16] {
    let ea = povm_elements(vis_a, Side::A);
    let eb = povm_elements(vis_b, Side::B);
    let mut out = [0.0; 16];
    for o in Outcome::all() {
        let op: Op4 = ea[o.a.index()].kron(&eb[o.b.index()]);
        out[o.index()] = state.expectation(&op);
    }
    out
}

pub fn joint_distribution(state: &TwoQubitState, theta_a: f64, theta_b: f64) -> JointDistribution {
    let probs = trace_formula(state, VisibilityPair::from_theta(theta_a), VisibilityPair::from_theta(theta_b));
    JointDistribution { probs, settings: Some((theta_a, theta_b)) }
}

/// Joint distribution for arbitrary visibilities inside the disk.
pub fn joint_distribution_with(
    state: &TwoQubitState,
    vis_a: VisibilityPair,
    vis_b: VisibilityPair,
) -> crate::Result<JointDistribution> {
    let vis_a = VisibilityPair::new(vis_a.vx, vis_a.vy)?;
    let vis_b = VisibilityPair::new(vis_b.vx, vis_b.vy)?;
    Ok(JointDistribution { probs: trace_formula(state, vis_a, vis_b), settings: None })
}

/// The V_X = V_Y = 1 limit on both sides: intrinsic quasi-probabilities.
pub fn quasi_distribution(state: &TwoQubitState) -> QuasiDistribution {
    QuasiDistribution { values: trace_formula(state, VisibilityPair::sharp(), VisibilityPair::sharp()) }
}

pub fn aggregate_b(dist: &JointDistribution) -> BAggregate {
    let (mut p_plus, mut p_minus) = (0.0, 0.0);
    for (o, p) in dist.iter() {
        if b_value(o) > 0 {
            p_plus += p;
        } else {
            p_minus += p;
        }
    }
    BAggregate { p_plus, p_minus, mean_b: 2.0 * p_plus - 2.0 * p_minus }
}
