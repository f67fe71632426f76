pub mod cli;
pub mod entropy;
pub mod error;
pub mod fmt;
pub mod games;
pub mod keyrate;
pub mod linalg;
pub mod noise;
mod par;
pub mod protocol;
