use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{delta_oct, fcc_density, FEJES_TOTH_T};
use crate::error::{Error, Result};

/// A partition together with its weight rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum ScoreScheme {
    /// Hybrid decomposition into quasi-regular tetrahedra, quarters and V-cells.
    Hf,
    /// Each Voronoi cell scored for its own center.
    Voronoi { b: f64 },
    /// Voronoi cells averaged over the neighbors within 2 + t.
    FejesToth { t: f64 },
    /// Voronoi cells averaged over the neighbors within 2.18.
    Hsiang,
    /// Delaunay simplices, each weighted by its compression at all four vertices.
    HalesDelaunay,
}

impl ScoreScheme {
    pub fn all_default() -> [ScoreScheme; 5] {
        [
            ScoreScheme::Hf,
            ScoreScheme::Voronoi { b: fcc_density() },
            ScoreScheme::FejesToth { t: FEJES_TOTH_T },
            ScoreScheme::Hsiang,
            ScoreScheme::HalesDelaunay,
        ]
    }

    /// Score constants (A, B).
    pub fn constants(&self) -> (f64, f64) {
        match *self {
            ScoreScheme::Hf | ScoreScheme::HalesDelaunay => (4.0, 4.0 * delta_oct()),
            ScoreScheme::Voronoi { b } => (1.0, b),
            ScoreScheme::FejesToth { .. } | ScoreScheme::Hsiang => (1.0, fcc_density()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoreScheme::Voronoi { b } if !(b > 0.0 && b.is_finite()) => {
                Err(Error::InvalidInput(format!("Voronoi constant B must be positive, got {b}")))
            }
            ScoreScheme::FejesToth { t } if !(t >= 0.0 && t.is_finite()) => {
                Err(Error::InvalidInput(format!("Fejes-Tóth width t must be non-negative, got {t}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ScoreScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreScheme::Hf => write!(f, "hf"),
            ScoreScheme::Voronoi { b } => write!(f, "voronoi:{b}"),
            ScoreScheme::FejesToth { t } => write!(f, "fejes-toth:{t}"),
            ScoreScheme::Hsiang => write!(f, "hsiang"),
            ScoreScheme::HalesDelaunay => write!(f, "hales-delaunay"),
        }
    }
}

impl FromStr for ScoreScheme {
    type Err = Error;

    /// Accepts `hf`, `voronoi[:B]`, `fejes-toth[:t]`, `hsiang`, `hales-delaunay`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        let num = |a: &str| {
            a.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad scheme parameter {a:?}")))
        };
        let scheme = match (name, arg) {
            ("hf", None) => ScoreScheme::Hf,
            ("voronoi", None) => ScoreScheme::Voronoi { b: fcc_density() },
            ("voronoi", Some(a)) => ScoreScheme::Voronoi { b: num(a)? },
            ("fejes-toth", None) => ScoreScheme::FejesToth { t: FEJES_TOTH_T },
            ("fejes-toth", Some(a)) => ScoreScheme::FejesToth { t: num(a)? },
            ("hsiang", None) => ScoreScheme::Hsiang,
            ("hales-delaunay", None) => ScoreScheme::HalesDelaunay,
            _ => return Err(Error::InvalidInput(format!("unknown scheme {s:?}"))),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for s in ScoreScheme::all_default() {
            assert_eq!(s.to_string().parse::<ScoreScheme>().unwrap(), s);
        }
        assert_eq!("voronoi:0.7".parse::<ScoreScheme>().unwrap(), ScoreScheme::Voronoi { b: 0.7 });
        assert!("voronoi:-1".parse::<ScoreScheme>().is_err());
        assert!("fejes-toth:-0.1".parse::<ScoreScheme>().is_err());
        assert!("hsiang:2".parse::<ScoreScheme>().is_err());
        assert!("delaunay".parse::<ScoreScheme>().is_err());
    }

    #[test]
    fn constants_are_positive() {
        for s in ScoreScheme::all_default() {
            let (a, b) = s.constants();
            assert!(a > 0.0 && b > 0.0);
        }
    }
}
