pub mod bitflip;
pub mod fit;
