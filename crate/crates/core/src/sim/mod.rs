//! Sixteen-outcome statistics, coincidence counts and visibilities.

pub mod counts;
pub mod joint;
pub mod outcome;
pub mod poisson;
pub mod remote;
