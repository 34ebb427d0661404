//! Bit-flip picture of measurement unsharpness.
//!
//! A joint measurement with visibilities (V_X, V_Y) behaves like a sharp
//! readout of intrinsic values followed by independent sign flips of x and y
//! with probabilities (1 − V)/2. An outcome's b-value is wrong whenever the
//! flip pattern changes it; for states whose intrinsic statistics depend only
//! on b, this turns every observed probability into a straight line in the
//! flip probability with coefficients fixed by |⟨B̂⟩|.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::povm::VisibilityPair;
use crate::sim::joint::{JointDistribution, QuasiDistribution};
use crate::sim::outcome::{b_value, Outcome};

/// 2√2, the largest |⟨B̂⟩| any quantum state reaches.
pub const CIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

const MAGNITUDE_TOL: f64 = 1e-12;

/// Flip probabilities of the four local signs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipRates {
    pub x_a: f64,
    pub y_a: f64,
    pub x_b: f64,
    pub y_b: f64,
}

impl FlipRates {
    /// Each visibility must lie in [0, 1]; the uncertainty relation is not
    /// enforced here so that the sharp limit (1, 1) stays expressible.
    pub fn new(vis_a: VisibilityPair, vis_b: VisibilityPair) -> Result<Self> {
        for c in [vis_a.vx, vis_a.vy, vis_b.vx, vis_b.vy] {
            if !(-MAGNITUDE_TOL..=1.0 + MAGNITUDE_TOL).contains(&c) {
                return Err(Error::Domain { what: "visibility", value: c });
            }
        }
        Ok(Self::from_visibilities_unchecked(vis_a, vis_b))
    }

    pub fn from_theta(theta_a: f64, theta_b: f64) -> Result<Self> {
        Self::new(VisibilityPair::from_theta(theta_a), VisibilityPair::from_theta(theta_b))
    }

    fn from_visibilities_unchecked(vis_a: VisibilityPair, vis_b: VisibilityPair) -> Self {
        let e = |v: f64| ((1.0 - v) / 2.0).clamp(0.0, 1.0);
        FlipRates { x_a: e(vis_a.vx), y_a: e(vis_a.vy), x_b: e(vis_b.vx), y_b: e(vis_b.vy) }
    }

    /// Probability of the flip pattern `mask` (bit 3 = x_A … bit 0 = y_B).
    pub fn pattern_probability(&self, mask: u8) -> f64 {
        [(8, self.x_a), (4, self.y_a), (2, self.x_b), (1, self.y_b)]
            .iter()
            .map(|&(bit, e)| if mask & bit != 0 { e } else { 1.0 - e })
            .product()
    }
}

/// Probability that independent flips change b(`outcome`), by enumeration of
/// all sixteen flip patterns.
pub fn pbflip_outcome(outcome: Outcome, vis_a: VisibilityPair, vis_b: VisibilityPair) -> Result<f64> {
    VisibilityPair::new(vis_a.vx, vis_a.vy)?;
    VisibilityPair::new(vis_b.vx, vis_b.vy)?;
    let rates = FlipRates::new(vis_a, vis_b)?;
    Ok(pbflip_with_rates(outcome, &rates))
}

pub fn pbflip_with_rates(outcome: Outcome, rates: &FlipRates) -> f64 {
    let b = b_value(outcome);
    (0u8..16).filter(|&mask| b_value(outcome.flipped(mask)) != b).map(|mask| rates.pattern_probability(mask)).sum()
}

/// Outcome-independent flip probability `½(1 − ⟨b⟩/⟨B̂⟩)` for equal visibilities.
pub fn pbflip_uniform(mean_b: f64, bell_expectation: f64) -> Result<f64> {
    if bell_expectation == 0.0 || !bell_expectation.is_finite() {
        return Err(Error::Domain { what: "Bell expectation", value: bell_expectation });
    }
    Ok(0.5 * (1.0 - mean_b / bell_expectation))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicProbs {
    /// Intrinsic probability of each outcome on the favored side of b.
    pub high: f64,
    /// Intrinsic probability of each disfavored outcome; negative past |⟨B̂⟩| = 2.
    pub low: f64,
}

/// `(1 ± |⟨B̂⟩|/2) / 16`.
pub fn intrinsic_probs(bell_magnitude: f64) -> Result<IntrinsicProbs> {
    if !(0.0..=CIRELSON_BOUND + MAGNITUDE_TOL).contains(&bell_magnitude) {
        return Err(Error::Domain { what: "Bell magnitude", value: bell_magnitude });
    }
    Ok(IntrinsicProbs { high: (1.0 + bell_magnitude / 2.0) / 16.0, low: (1.0 - bell_magnitude / 2.0) / 16.0 })
}

/// Smallest flip probability a low outcome can have without its observed
/// probability going negative: `max(0, (|B| − 2) / (2|B|))`.
pub fn cirelson_floor(bell_magnitude: f64) -> Result<f64> {
    if !(bell_magnitude.is_finite() && bell_magnitude > 0.0) {
        return Err(Error::Domain { what: "Bell magnitude", value: bell_magnitude });
    }
    Ok(((bell_magnitude - 2.0) / (2.0 * bell_magnitude)).max(0.0))
}

/// Observed probability of a low outcome on the line
/// `(|B|·p_bflip − (|B| − 2)/2) / 16`.
pub fn predicted_probability(bell_magnitude: f64, p_bflip: f64) -> f64 {
    (bell_magnitude * p_bflip - (bell_magnitude - 2.0) / 2.0) / 16.0
}

/// Intrinsic probabilities together with the outcome-wise flip
/// probabilities of one pair of settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitFlipModel {
    pub p_int_high: f64,
    pub p_int_low: f64,
    pub p_bflip: [f64; 16],
}

impl BitFlipModel {
    pub fn new(bell_magnitude: f64, vis_a: VisibilityPair, vis_b: VisibilityPair) -> Result<Self> {
        let ip = intrinsic_probs(bell_magnitude)?;
        let rates = FlipRates::new(vis_a, vis_b)?;
        let mut p_bflip = [0.0; 16];
        for o in Outcome::all() {
            p_bflip[o.index()] = pbflip_with_rates(o, &rates);
        }
        Ok(BitFlipModel { p_int_high: ip.high, p_int_low: ip.low, p_bflip })
    }

    /// Observed probability of `o`, taking b = +2 as the disfavored value
    /// (⟨B̂⟩ < 0, as for the singlet).
    pub fn probability(&self, o: Outcome) -> f64 {
        let f = self.p_bflip[o.index()];
        if b_value(o) > 0 {
            (1.0 - f) * self.p_int_low + f * self.p_int_high
        } else {
            (1.0 - f) * self.p_int_high + f * self.p_int_low
        }
    }

    pub fn distribution(&self) -> JointDistribution {
        let mut probs = [0.0; 16];
        for o in Outcome::all() {
            probs[o.index()] = self.probability(o);
        }
        JointDistribution { probs, settings: None }
    }
}

/// Applies independent flips with rates (1 − V)/2 to an intrinsic
/// quasi-distribution: `p(m) = Σ_f P(f) q(m ⊕ f)`.
pub fn flip_convolve(
    quasi: &QuasiDistribution,
    vis_a: VisibilityPair,
    vis_b: VisibilityPair,
) -> Result<JointDistribution> {
    let rates = FlipRates::new(vis_a, vis_b)?;
    let weights: [f64; 16] = std::array::from_fn(|mask| rates.pattern_probability(mask as u8));
    let mut probs = [0.0; 16];
    for o in Outcome::all() {
        probs[o.index()] = (0u8..16).map(|mask| weights[mask as usize] * quasi.q(o.flipped(mask))).sum();
    }
    Ok(JointDistribution { probs, settings: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::povm::Sign::{Minus as M, Plus as P};
    use crate::quantum::state::singlet_state;
    use crate::sim::joint::{joint_distribution, quasi_distribution};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn th(t: f64) -> VisibilityPair {
        VisibilityPair::from_theta(t)
    }

    #[test]
    fn quoted_flip_probabilities() {
        let m = Outcome::new(P, P, P, M);
        assert!((pbflip_outcome(m, th(20.0), th(20.0)).unwrap() - 0.1478).abs() < 5e-5);
        assert!((pbflip_outcome(m, th(22.5), th(22.5)).unwrap() - (2.0 - SQRT2) / 4.0).abs() < 1e-12);
        for o in Outcome::all() {
            assert!((pbflip_outcome(o, th(45.0), th(45.0)).unwrap() - 0.25).abs() < 1e-12, "{o}");
        }
    }

    #[test]
    fn closed_forms_for_minimal_outcomes() {
        for step in 0..=180 {
            let t = step as f64 * 0.5;
            let (s, c) = t.to_radians().sin_cos();
            let eq16 = 0.25 * (2.0 - c * c - 2.0 * c * s + s * s);
            let eq17 = 0.25 * (2.0 + c * c - 2.0 * c * s - s * s);
            for (o, want) in [
                (Outcome::new(P, P, P, M), eq16),
                (Outcome::new(M, M, M, P), eq16),
                (Outcome::new(M, P, P, P), eq17),
                (Outcome::new(P, M, M, M), eq17),
            ] {
                assert!((pbflip_outcome(o, th(t), th(t)).unwrap() - want).abs() < 1e-12, "{o} θ={t}");
            }
        }
    }

    #[test]
    fn rejects_bad_visibilities() {
        let m = Outcome::new(P, P, P, M);
        assert!(pbflip_outcome(m, VisibilityPair::new_unchecked(0.9, 0.9), th(10.0)).is_err());
        assert!(pbflip_outcome(m, VisibilityPair::new_unchecked(-0.5, 0.5), th(10.0)).is_err());
    }

    #[test]
    fn uniform_flip_probability() {
        let p = pbflip_uniform(-1.3784, -CIRELSON_BOUND).unwrap();
        assert!((p - 0.2563).abs() < 1e-4);
        assert!((p - 0.2565).abs() < 3e-4);
        assert_eq!(pbflip_uniform(-2.5, -2.5).unwrap(), 0.0);
        assert_eq!(pbflip_uniform(0.0, -2.5).unwrap(), 0.5);
        assert!(pbflip_uniform(1.0, 0.0).is_err());
    }

    #[test]
    fn intrinsic_values() {
        let ip = intrinsic_probs(CIRELSON_BOUND).unwrap();
        assert!((ip.high - 0.150888).abs() < 1e-6 && (ip.low + 0.025888).abs() < 1e-6);
        let ip = intrinsic_probs(2.0).unwrap();
        assert_eq!((ip.high, ip.low), (0.125, 0.0));
        assert!((intrinsic_probs(2.7476).unwrap().low + 0.02336).abs() < 5e-6);
        assert!(intrinsic_probs(3.0).is_err());
        assert!(intrinsic_probs(-0.1).is_err());
        for m in [0.0, 1.3, 2.0, 2.7] {
            let ip = intrinsic_probs(m).unwrap();
            assert!((ip.high + ip.low - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn floor_values() {
        let f = cirelson_floor(CIRELSON_BOUND).unwrap();
        assert!((f - (2.0 - SQRT2) / 4.0).abs() < 1e-15);
        assert_eq!(cirelson_floor(2.0).unwrap(), 0.0);
        assert_eq!(cirelson_floor(1.5).unwrap(), 0.0);
        // 0.7476 / 5.4952
        assert!((cirelson_floor(2.7476).unwrap() - 0.136046).abs() < 1e-6);
        assert!(cirelson_floor(0.0).is_err());
    }

    #[test]
    fn predicted_line() {
        assert!((predicted_probability(CIRELSON_BOUND, 0.25) - (2.0 - SQRT2) / 32.0).abs() < 1e-15);
        let floor = cirelson_floor(CIRELSON_BOUND).unwrap();
        assert!(predicted_probability(CIRELSON_BOUND, floor).abs() < 1e-15);
        assert!((predicted_probability(CIRELSON_BOUND, 0.0) - (1.0 - SQRT2) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn no_flips_is_identity() {
        let values: [f64; 16] = std::array::from_fn(|i| (i as f64 - 6.0) / 40.0);
        let q = QuasiDistribution { values };
        let d = flip_convolve(&q, VisibilityPair::sharp(), VisibilityPair::sharp()).unwrap();
        assert_eq!(d.probs, values);
    }

    #[test]
    fn sharp_limit_is_allowed_only_for_convolution() {
        assert!(FlipRates::new(VisibilityPair::sharp(), VisibilityPair::sharp()).is_ok());
        let o = Outcome::new(P, P, P, P);
        assert!(pbflip_outcome(o, VisibilityPair::sharp(), th(0.0)).is_err());
    }

    #[test]
    fn convolution_matches_trace_oracle_for_singlet() {
        let s = singlet_state();
        let q = quasi_distribution(&s);
        for t in [0.0, 20.0, 40.0, 45.0, 50.0, 70.0, 90.0] {
            let conv = flip_convolve(&q, th(t), th(t)).unwrap();
            let direct = joint_distribution(&s, t, t);
            for o in Outcome::all() {
                assert!((conv.p(o) - direct.p(o)).abs() < 1e-10, "θ={t} {o}");
            }
        }
        let conv = flip_convolve(&q, th(45.0), th(45.0)).unwrap();
        assert!((conv.p(Outcome::new(P, P, P, P)) - 0.018306).abs() < 1e-6);
    }

    #[test]
    fn model_distribution_matches_trace_for_singlet() {
        for t in [0.0, 22.5, 33.0, 67.5, 90.0] {
            let model = BitFlipModel::new(CIRELSON_BOUND, th(t), th(t)).unwrap();
            let direct = joint_distribution(&singlet_state(), t, t);
            for o in Outcome::all() {
                assert!((model.probability(o) - direct.p(o)).abs() < 1e-12);
            }
            assert!((model.distribution().total() - 1.0).abs() < 1e-12);
        }
    }
}
