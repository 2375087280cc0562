use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("covariance matrix is not physical (smallest symplectic eigenvalue {nu_minus})")]
    NonPhysical { nu_minus: f64 },

    #[error("state is not symmetric (I1 = {i1}, I2 = {i2}); use log_negativity instead")]
    Asymmetric { i1: f64, i2: f64 },

    #[error("state outside the real symmetric family: {0}")]
    OutsideFamily(&'static str),

    #[error("degenerate drive: |tan θ| = 1 gives μ = 1 and a vanishing effective coupling")]
    DegenerateDrive,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial state not entangled (Simon S = {0})")]
    NotEntangled(f64),

    #[error("state left the physical set at t = {time} (ν₋ = {nu_minus})")]
    PhysicalityLost { time: f64, nu_minus: f64 },

    #[error(
        "truncation leak at t = {time}: top Fock level population {population} exceeds {limit}"
    )]
    TruncationLeak {
        time: f64,
        population: f64,
        limit: f64,
    },

    #[error("trace drift {drift} at t = {time} exceeds tolerance")]
    TraceDrift { time: f64, drift: f64 },
}
