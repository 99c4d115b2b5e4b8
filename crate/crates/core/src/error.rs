use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parameter assumption violated: {0}")]
    Assumption(String),

    #[error("degree sum N*z = {n}*{z} is odd; no simple z-regular graph exists")]
    Parity { n: usize, z: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("integration failed at t = {t}: step size underflow (worst component {component})")]
    Integration { t: f64, component: usize },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
