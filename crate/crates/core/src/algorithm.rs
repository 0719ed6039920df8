//! Uniform entry point over every simplifier.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::baselines::{dp_simplify, fbqs_simplify, opw_simplify};
use crate::error::{Error, Result};
use crate::fitting::FitConfig;
use crate::geometry::Point;
use crate::onepass::{simplify, Mode};
use crate::repr::PiecewiseRepresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Dp,
    Opw,
    Fbqs,
    Operb,
    OperbA,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Dp,
        Algorithm::Opw,
        Algorithm::Fbqs,
        Algorithm::Operb,
        Algorithm::OperbA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dp => "dp",
            Algorithm::Opw => "opw",
            Algorithm::Fbqs => "fbqs",
            Algorithm::Operb => "operb",
            Algorithm::OperbA => "operb-a",
        }
    }

    /// Baselines use only `cfg.zeta`.
    pub fn run(self, traj: &[Point], cfg: &FitConfig) -> Result<PiecewiseRepresentation> {
        match self {
            Algorithm::Dp => dp_simplify(traj, cfg.zeta),
            Algorithm::Opw => opw_simplify(traj, cfg.zeta),
            Algorithm::Fbqs => fbqs_simplify(traj, cfg.zeta),
            Algorithm::Operb => simplify(traj, cfg, Mode::Operb),
            Algorithm::OperbA => simplify(traj, cfg, Mode::OperbA),
        }
    }

    /// Parses a comma-separated list such as `dp,operb-a`.
    pub fn parse_list(s: &str) -> Result<Vec<Algorithm>> {
        s.split(',').map(|a| a.trim().parse()).collect()
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!(
            Algorithm::parse_list("dp, OPERB-A").unwrap(),
            vec![Algorithm::Dp, Algorithm::OperbA]
        );
        assert!(matches!("bqs".parse::<Algorithm>(), Err(Error::UnknownAlgorithm(_))));
    }
}
