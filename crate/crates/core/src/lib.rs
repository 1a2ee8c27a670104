pub mod algebra;
pub mod error;
pub mod ncpart;
pub mod tensor;
pub mod cumulants;
pub mod circular;
pub mod rdiag;
pub mod series;
pub mod multiseries;
pub mod spectral;
pub mod io;
