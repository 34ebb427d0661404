//! Linear-polarization observables with eigenvalues ±1.

use serde::{Deserialize, Serialize};

use super::linalg::Op2;

/// Which photon of the pair a local operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// `|α⟩⟨α| − |α+90°⟩⟨α+90°|` for the +1 polarization orientation α.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationObservable {
    /// Orientation of the +1 eigenstate in real space, degrees in [0, 180).
    pub plus_angle: f64,
    pub operator: Op2,
}

impl PolarizationObservable {
    pub fn minus_angle(&self) -> f64 {
        (self.plus_angle + 90.0).rem_euclid(180.0)
    }
}

/// Builds the observable whose +1 eigenstate is `cos α |H⟩ + sin α |V⟩`.
pub fn observable_from_angle(plus_angle_deg: f64) -> PolarizationObservable {
    let alpha = plus_angle_deg.rem_euclid(180.0);
    let (s, c) = (2.0 * alpha).to_radians().sin_cos();
    PolarizationObservable { plus_angle: alpha, operator: Op2::from_real([[c, s], [s, -c]]) }
}

// +1 eigenstate orientations. B is rotated by 22.5° relative to A.
pub const X_A_ANGLE: f64 = 0.0;
pub const Y_A_ANGLE: f64 = 45.0;
pub const X_B_ANGLE: f64 = 22.5;
pub const Y_B_ANGLE: f64 = 67.5;

/// The (X̂, Ŷ) pair measured on one side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservablePair {
    pub x: PolarizationObservable,
    pub y: PolarizationObservable,
}

pub fn observables(side: Side) -> ObservablePair {
    let (x, y) = match side {
        Side::A => (X_A_ANGLE, Y_A_ANGLE),
        Side::B => (X_B_ANGLE, Y_B_ANGLE),
    };
    ObservablePair { x: observable_from_angle(x), y: observable_from_angle(y) }
}
