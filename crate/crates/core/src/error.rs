use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a geometric precondition (non-tangent vector, non-unit anchor, λ ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("stereographic pole: the north pole (0, 0, 1) has no chart coordinate")]
    Pole,

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Chart points left the region where the metric density is usable.
    #[error("range error: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite state encountered; last valid time t = {last_valid_time}")]
    BlowUp { last_valid_time: f64 },

    #[error("Frenet frame undefined: curvature at or below {threshold:e} at {points} grid points")]
    FrameUndefined { threshold: f64, points: usize },

    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },
}
