//! Operator algebra, polarization observables, joint POVMs and states.

pub mod linalg;
pub mod observable;
pub mod povm;
pub mod state;
