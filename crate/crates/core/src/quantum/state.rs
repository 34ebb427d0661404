//! Density operators for one photon and for the pair, plus the CHSH operator.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{Op2, Op4};
use super::observable::{observables, Side};
use crate::error::{Error, Result};

/// Hermiticity, trace and positivity tolerance for supplied density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Two-photon density operator, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Op4", into = "Op4")]
pub struct TwoQubitState {
    rho: Op4,
}

impl TwoQubitState {
    pub fn new(rho: Op4) -> Result<Self> {
        let herm = rho.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (max |ρ−ρ†| = {herm:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min = rho.min_eigenvalue();
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(TwoQubitState { rho })
    }

    pub fn rho(&self) -> &Op4 {
        &self.rho
    }

    pub fn maximally_mixed() -> Self {
        TwoQubitState { rho: Op4::identity().scale(0.25) }
    }

    /// Tr(ρ O).
    pub fn expectation(&self, op: &Op4) -> f64 {
        self.rho.trace_product(op)
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho)
    }

    /// Reduced state of one photon.
    pub fn reduced(&self, side: Side) -> QubitState {
        let rho = match side {
            Side::A => self.rho.partial_trace_b(),
            Side::B => self.rho.partial_trace_a(),
        };
        QubitState { rho }
    }
}

impl TryFrom<Op4> for TwoQubitState {
    type Error = Error;
    fn try_from(rho: Op4) -> Result<Self> {
        TwoQubitState::new(rho)
    }
}

impl From<TwoQubitState> for Op4 {
    fn from(s: TwoQubitState) -> Op4 {
        s.rho
    }
}

/// Single-photon polarization state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub rho: Op2,
}

impl QubitState {
    pub fn expectation(&self, op: &Op2) -> f64 {
        self.rho.trace_product(op)
    }

    pub fn purity(&self) -> f64 {
        self.rho.trace_product(&self.rho)
    }
}

/// `(|HV⟩ − |VH⟩)/√2`, anti-correlated in every linear polarization basis.
pub fn singlet_state() -> TwoQubitState {
    // basis |HH⟩, |HV⟩, |VH⟩, |VV⟩
    let rho =
        Op4::from_real([[0.0, 0.0, 0.0, 0.0], [0.0, 0.5, -0.5, 0.0], [0.0, -0.5, 0.5, 0.0], [0.0, 0.0, 0.0, 0.0]]);
    TwoQubitState { rho }
}

/// `v·singlet + (1 − v)·I/4`.
pub fn werner_state(v: f64) -> Result<TwoQubitState> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain { what: "werner visibility", value: v });
    }
    let rho = singlet_state().rho.scale(v) + Op4::identity().scale((1.0 - v) / 4.0);
    Ok(TwoQubitState { rho })
}

/// `X̂_A X̂_B − X̂_A Ŷ_B + Ŷ_A X̂_B + Ŷ_A Ŷ_B`.
pub fn bell_operator() -> Op4 {
    let a = observables(Side::A);
    let b = observables(Side::B);
    let (xa, ya, xb, yb) = (a.x.operator, a.y.operator, b.x.operator, b.y.operator);
    xa.kron(&xb) - xa.kron(&yb) + ya.kron(&xb) + ya.kron(&yb)
}

pub fn bell_expectation(state: &TwoQubitState) -> f64 {
    state.expectation(&bell_operator())
}

/// Random full-rank state `G G† / Tr(G G†)` from a complex Gaussian matrix G.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let mut g = Op4::zero();
    for z in g.0.iter_mut().flatten() {
        *z = Complex64::new(standard_normal(rng), standard_normal(rng));
    }
    let gg = g * g.adjoint();
    let tr = gg.trace().re;
    let mut rho = gg.scale(1.0 / tr);
    // exact Hermitian symmetrization against rounding
    rho = (rho + rho.adjoint()).scale(0.5);
    TwoQubitState { rho }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller; 1 − u keeps the log argument in (0, 1]
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}
