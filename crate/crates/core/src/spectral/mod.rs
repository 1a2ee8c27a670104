//! The spectral pipeline for the nofreepolar model: exact series and curves,
//! then floating-point branch tracking and Stieltjes inversion.

pub mod appendix;
pub mod poly;
pub mod density;
pub mod stieltjes;
