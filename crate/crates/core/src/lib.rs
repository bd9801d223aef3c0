//! Qubit Lindblad generators and the constraints complete positivity places
//! on their inverse relaxation times.

pub mod cli;
pub mod dynamics;
pub mod estimation;
pub mod generator;
pub mod numerics;
pub mod report;
pub mod scan;
pub mod spectrum;
pub mod tolerance;

pub use tolerance::Tolerances;
