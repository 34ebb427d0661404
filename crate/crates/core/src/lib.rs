//! Simulation and analysis of uncertainty-limited joint measurements of two
//! non-commuting polarization observables on each photon of an entangled pair.
//!
//! * [`quantum`] builds the observables, the joint POVMs on the circle
//!   V_X² + V_Y² = 1, the two-photon states and the CHSH operator B̂.
//! * [`sim`] turns a state and two trade-off angles into the sixteen-outcome
//!   distribution, b-value aggregates, Poisson count tables and visibilities.
//! * [`analysis`] holds the bit-flip error model and the straight-line fit
//!   that recovers |⟨B̂⟩| from the low-probability outcomes.

pub mod analysis;
mod error;
pub mod quantum;
pub mod sim;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};

pub use analysis::bitflip::{
    cirelson_floor, flip_convolve, intrinsic_probs, pbflip_outcome, pbflip_uniform, predicted_probability,
    BitFlipModel, FlipRates, IntrinsicProbs, CIRELSON_BOUND,
};
pub use analysis::fit::{fit_bell_magnitude, FitDocument, FitPoint, FitResult};
pub use quantum::observable::{observable_from_angle, observables, PolarizationObservable, Side};
pub use quantum::povm::{
    build_joint_povm, polarizer_angles, FilterSetting, JointPovm, LocalOutcome, MeasurementSetting, Sign,
    VisibilityPair,
};
pub use quantum::state::{bell_expectation, bell_operator, singlet_state, werner_state, QubitState, TwoQubitState};
pub use sim::counts::{probabilities_from_counts, sample_counts, CountTable, EstimatedDistribution};
pub use sim::joint::{
    aggregate_b, joint_distribution, quasi_distribution, BAggregate, JointDistribution, QuasiDistribution,
};
pub use sim::outcome::{b_value, minimal_outcomes, Outcome};
pub use sim::remote::{conditional_state, interferometer_visibility, joint_visibilities, VisibilityEstimate};
