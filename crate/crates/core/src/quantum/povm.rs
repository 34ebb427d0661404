//! Uncertainty-limited joint measurement of X̂ and Ŷ on one photon.
//!
//! Each of the four outcomes (x, y) is represented by the positive operator
//! `¼(I + x·V_X·X̂ + y·V_Y·Ŷ)`. Positivity of these elements is equivalent to
//! `V_X² + V_Y² ≤ 1`, and the trade-off angle θ puts the measurement on that
//! circle with `V_X = cos θ`, `V_Y = sin θ`.

use serde::{Deserialize, Serialize};

use super::linalg::Op2;
use super::observable::{observables, Side};
use crate::error::{Error, Result};

/// Slack allowed on `vx² + vy² ≤ 1`.
pub const UNCERTAINTY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_value(v: i32) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Outcome (x, y) of one local joint measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalOutcome {
    pub x: Sign,
    pub y: Sign,
}

impl LocalOutcome {
    /// (+,+), (+,−), (−,+), (−,−).
    pub const ALL: [LocalOutcome; 4] = [
        LocalOutcome { x: Sign::Plus, y: Sign::Plus },
        LocalOutcome { x: Sign::Plus, y: Sign::Minus },
        LocalOutcome { x: Sign::Minus, y: Sign::Plus },
        LocalOutcome { x: Sign::Minus, y: Sign::Minus },
    ];

    pub fn new(x: Sign, y: Sign) -> Self {
        LocalOutcome { x, y }
    }

    pub fn index(self) -> usize {
        2 * usize::from(self.x == Sign::Minus) + usize::from(self.y == Sign::Minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityPair {
    pub vx: f64,
    pub vy: f64,
}

impl VisibilityPair {
    /// Rejects pairs outside the unit disk.
    pub fn new(vx: f64, vy: f64) -> Result<Self> {
        let vis = VisibilityPair { vx, vy };
        if !(vx.is_finite() && vy.is_finite()) {
            return Err(Error::Domain { what: "visibility", value: if vx.is_finite() { vy } else { vx } });
        }
        if vis.radius_squared() > 1.0 + UNCERTAINTY_TOL {
            return Err(Error::UncertaintyViolation(vis.radius_squared()));
        }
        Ok(vis)
    }

    /// No range check; for probing what happens outside the disk.
    pub fn new_unchecked(vx: f64, vy: f64) -> Self {
        VisibilityPair { vx, vy }
    }

    pub fn from_theta(theta_deg: f64) -> Self {
        let (s, c) = theta_deg.to_radians().sin_cos();
        VisibilityPair { vx: c, vy: s }
    }

    /// Perfect resolution of both observables; outside the disk and only
    /// meaningful as the zero-uncertainty extrapolation.
    pub fn sharp() -> Self {
        VisibilityPair { vx: 1.0, vy: 1.0 }
    }

    pub fn radius_squared(&self) -> f64 {
        self.vx * self.vx + self.vy * self.vy
    }

    pub fn radius(&self) -> f64 {
        self.radius_squared().sqrt()
    }

    pub fn is_physical(&self) -> bool {
        self.radius_squared() <= 1.0 + UNCERTAINTY_TOL
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    /// Trade-off angle in degrees; 0° is a sharp X̂, 90° a sharp Ŷ.
    pub theta: f64,
    pub side: Side,
}

impl MeasurementSetting {
    pub fn new(theta: f64, side: Side) -> Self {
        MeasurementSetting { theta, side }
    }

    pub fn visibilities(&self) -> VisibilityPair {
        VisibilityPair::from_theta(self.theta)
    }
}

/// Four POVM elements indexed by `LocalOutcome::index`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPovm {
    pub side: Side,
    pub visibilities: VisibilityPair,
    pub elements: [Op2; 4],
}

impl JointPovm {
    pub fn from_visibilities(vis: VisibilityPair, side: Side) -> Result<Self> {
        let vis = VisibilityPair::new(vis.vx, vis.vy)?;
        Ok(JointPovm { side, visibilities: vis, elements: povm_elements(vis, side) })
    }

    pub fn element(&self, outcome: LocalOutcome) -> &Op2 {
        &self.elements[outcome.index()]
    }

    pub fn sum(&self) -> Op2 {
        self.elements.iter().fold(Op2::zero(), |acc, e| acc + *e)
    }

    /// Smallest eigenvalue over all four elements.
    pub fn min_eigenvalue(&self) -> f64 {
        self.elements.iter().map(Op2::min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise deviation of Σ Ê_m from the identity.
    pub fn completeness_error(&self) -> f64 {
        self.sum().max_abs_diff(&Op2::identity())
    }
}

pub fn build_joint_povm(setting: MeasurementSetting) -> JointPovm {
    let vis = setting.visibilities();
    JointPovm { side: setting.side, visibilities: vis, elements: povm_elements(vis, setting.side) }
}

/// `¼(I ± vx X̂ ± vy Ŷ)` without checking the uncertainty relation.
pub fn povm_elements(vis: VisibilityPair, side: Side) -> [Op2; 4] {
    let obs = observables(side);
    LocalOutcome::ALL.map(|o| {
        let x = obs.x.operator.scale(o.x.as_f64() * vis.vx);
        let y = obs.y.operator.scale(o.y.as_f64() * vis.vy);
        (Op2::identity() + x + y).scale(0.25)
    })
}

/// Optical filter settings realizing one outcome of a joint measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSetting {
    /// Transmitted polarization orientation, degrees in [0, 180).
    pub polarizer: f64,
    /// Half-wave-plate rotation relative to the position that transmits the
    /// X̂ eigenstate; a wave plate turns polarization by twice its angle.
    pub hwp_offset: f64,
}

/// The polarizer is the X̂ eigenstate of outcome `x` rotated by θ/2 along the
/// shorter arc toward the Ŷ eigenstate of outcome `y`.
pub fn polarizer_angles(setting: MeasurementSetting, outcome: LocalOutcome) -> FilterSetting {
    let obs = observables(setting.side);
    let x_angle = match outcome.x {
        Sign::Plus => obs.x.plus_angle,
        Sign::Minus => obs.x.minus_angle(),
    };
    let y_angle = match outcome.y {
        Sign::Plus => obs.y.plus_angle,
        Sign::Minus => obs.y.minus_angle(),
    };
    // signed separation folded into (−90, 90]
    let mut d = (y_angle - x_angle).rem_euclid(180.0);
    if d > 90.0 {
        d -= 180.0;
    }
    let dir = if d < 0.0 { -1.0 } else { 1.0 };
    FilterSetting {
        polarizer: (x_angle + dir * setting.theta / 2.0).rem_euclid(180.0),
        hwp_offset: dir * setting.theta / 4.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn theta_zero_y_carries_no_information() {
        let povm = build_joint_povm(MeasurementSetting::new(0.0, Side::A));
        let x = observables(Side::A).x.operator;
        let plus = (Op2::identity() + x).scale(0.25);
        let minus = (Op2::identity() - x).scale(0.25);
        for o in LocalOutcome::ALL {
            let want = if o.x == Sign::Plus { plus } else { minus };
            assert!(povm.element(o).max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn theta_45_plus_plus() {
        let povm = build_joint_povm(MeasurementSetting::new(45.0, Side::A));
        let obs = observables(Side::A);
        let want =
            (Op2::identity() + obs.x.operator.scale(FRAC_1_SQRT_2) + obs.y.operator.scale(FRAC_1_SQRT_2)).scale(0.25);
        assert!(povm.element(LocalOutcome::new(Sign::Plus, Sign::Plus)).max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn theta_20_side_b_minus_plus() {
        let povm = build_joint_povm(MeasurementSetting::new(20.0, Side::B));
        let obs = observables(Side::B);
        let want = (Op2::identity() - obs.x.operator.scale(0.9397) + obs.y.operator.scale(0.3420)).scale(0.25);
        let got = povm.element(LocalOutcome::new(Sign::Minus, Sign::Plus));
        // 4-decimal constants
        assert!(got.max_abs_diff(&want) < 5e-5);
    }

    #[test]
    fn rejects_pairs_outside_disk() {
        assert!(matches!(VisibilityPair::new(0.8, 0.7), Err(Error::UncertaintyViolation(_))));
        assert!(JointPovm::from_visibilities(VisibilityPair::new_unchecked(1.0, 0.2), Side::A).is_err());
        assert!(VisibilityPair::new(0.6, 0.8).is_ok());
        assert!(VisibilityPair::new(0.3, 0.4).is_ok());
    }

    #[test]
    fn setting_lies_on_circle() {
        for t in [0.0, 12.5, 45.0, 90.0, 200.0, -33.0] {
            let v = MeasurementSetting::new(t, Side::B).visibilities();
            assert!((v.radius_squared() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_angles() {
        let pp = LocalOutcome::new(Sign::Plus, Sign::Plus);
        let a = polarizer_angles(MeasurementSetting::new(20.0, Side::A), pp);
        assert!((a.polarizer - 10.0).abs() < 1e-12);
        assert!((a.hwp_offset - 5.0).abs() < 1e-12);
        let b = polarizer_angles(MeasurementSetting::new(20.0, Side::B), pp);
        assert!((b.polarizer - 32.5).abs() < 1e-12);
        for o in LocalOutcome::ALL {
            let f = polarizer_angles(MeasurementSetting::new(0.0, Side::A), o);
            let want = if o.x == Sign::Plus { 0.0 } else { 90.0 };
            assert!((f.polarizer - want).abs() < 1e-12);
        }
        let pm = polarizer_angles(MeasurementSetting::new(20.0, Side::A), LocalOutcome::new(Sign::Plus, Sign::Minus));
        assert!((pm.polarizer - 170.0).abs() < 1e-12);
        assert!((pm.hwp_offset + 5.0).abs() < 1e-12);
    }

    #[test]
    fn filter_projector_is_twice_the_povm_element() {
        for side in [Side::A, Side::B] {
            for t in [0.0, 10.0, 22.5, 45.0, 63.0, 90.0] {
                let setting = MeasurementSetting::new(t, side);
                let povm = build_joint_povm(setting);
                for o in LocalOutcome::ALL {
                    let f = polarizer_angles(setting, o);
                    let proj = Op2::polarization_projector(f.polarizer).scale(0.5);
                    assert!(proj.max_abs_diff(povm.element(o)) < 1e-14, "{side} θ={t} {o:?}");
                }
            }
        }
    }
}
