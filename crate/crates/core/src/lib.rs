//! Unit-disk graph toolkit: additive-error diameter approximation, a
//! constant-time distance oracle, separators and r-clusterings built from
//! cliques, and the distance-pattern encoding they share.

pub mod clustering;
pub mod diameter;
pub mod encoding;
pub mod error;
pub mod generate;
mod kernels;
pub mod geometry;
pub mod oracle;
pub mod par;
mod pipeline;
pub mod scaling;
pub mod separator;
pub mod shortest_paths;
pub mod verification;

pub use error::{Error, Result};
pub use geometry::{GridIndex, Point, PointSet};
pub use shortest_paths::{DistanceField, HalfDist};

/// Which additive guarantee a pipeline targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Distances to clique representatives; error at most +2.
    Plus2,
    /// Distances to dummy vertices hanging off each clique; error at most +1.
    Plus1,
}

impl Mode {
    pub fn additive_error(self) -> u32 {
        match self {
            Mode::Plus1 => 1,
            Mode::Plus2 => 2,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Plus1 => "plus1",
            Mode::Plus2 => "plus2",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus1" | "+1" => Ok(Mode::Plus1),
            "plus2" | "+2" => Ok(Mode::Plus2),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}
