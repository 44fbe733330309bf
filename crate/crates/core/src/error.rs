use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point that should lie in the domain does not.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Voronoi generators are degenerate (duplicated means).
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("sampling error: rejection sampler gave up after {attempts} attempts (envelope constant {envelope})")]
    Sampling { attempts: u64, envelope: f64 },

    /// Density evaluated to a non-positive value at a drawn point.
    #[error("density error: f({point:?}) = {value} is not strictly positive")]
    Density { point: Vec<f64>, value: f64 },

    /// An operation was called on a configuration it is not defined for.
    #[error("contract error: {0}")]
    Contract(String),
}
