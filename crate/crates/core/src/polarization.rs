//! Polarization axes and their Jones vectors.
//!
//! Jones vectors are always expressed in (H, V) components. The circular
//! states follow `|R> = (|H> + i|V>)/sqrt2` and `|L> = (|H> - i|V>)/sqrt2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub(crate) const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which pair of orthogonal polarization states labels the columns of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolBasis {
    /// (|L>, |R>)
    Circular,
    /// (|H>, |V>)
    Linear,
}

impl PolBasis {
    pub fn axes(self) -> [PolAxis; 2] {
        match self {
            PolBasis::Circular => [PolAxis::L, PolAxis::R],
            PolBasis::Linear => [PolAxis::H, PolAxis::V],
        }
    }
}

impl fmt::Display for PolBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolBasis::Circular => "circular",
            PolBasis::Linear => "linear",
        })
    }
}

impl FromStr for PolBasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "circular" => Ok(PolBasis::Circular),
            "linear" => Ok(PolBasis::Linear),
            other => Err(format!("unknown polarization basis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolAxis {
    H,
    V,
    L,
    R,
}

impl PolAxis {
    pub const ALL: [PolAxis; 4] = [PolAxis::H, PolAxis::V, PolAxis::L, PolAxis::R];

    /// Jones vector `(h, v)` of this state.
    pub fn jones(self) -> [Complex64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            PolAxis::H => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            PolAxis::V => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            PolAxis::L => [Complex64::new(s, 0.0), Complex64::new(0.0, -s)],
            PolAxis::R => [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        }
    }

    pub fn basis(self) -> PolBasis {
        match self {
            PolAxis::H | PolAxis::V => PolBasis::Linear,
            PolAxis::L | PolAxis::R => PolBasis::Circular,
        }
    }

    /// Column index of this axis within its own basis.
    pub fn index(self) -> usize {
        match self {
            PolAxis::H | PolAxis::L => 0,
            PolAxis::V | PolAxis::R => 1,
        }
    }

    pub fn orthogonal(self) -> PolAxis {
        match self {
            PolAxis::H => PolAxis::V,
            PolAxis::V => PolAxis::H,
            PolAxis::L => PolAxis::R,
            PolAxis::R => PolAxis::L,
        }
    }

    /// `<self|(h, v)>`: amplitude of a Jones vector along this axis.
    pub fn project(self, h: Complex64, v: Complex64) -> Complex64 {
        let [jh, jv] = self.jones();
        jh.conj() * h + jv.conj() * v
    }
}

impl fmt::Display for PolAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolAxis::H => "H",
            PolAxis::V => "V",
            PolAxis::L => "L",
            PolAxis::R => "R",
        })
    }
}

impl FromStr for PolAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "H" | "h" => Ok(PolAxis::H),
            "V" | "v" => Ok(PolAxis::V),
            "L" | "l" => Ok(PolAxis::L),
            "R" | "r" => Ok(PolAxis::R),
            other => Err(format!("unknown polarization axis `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_are_orthonormal_within_basis() {
        for basis in [PolBasis::Circular, PolBasis::Linear] {
            let [a, b] = basis.axes();
            let [ah, av] = a.jones();
            assert!((a.project(ah, av).re - 1.0).abs() < 1e-15);
            assert!(b.project(ah, av).norm() < 1e-15);
        }
    }

    #[test]
    fn circular_from_linear() {
        // |R> = (|H> + i|V>)/sqrt2
        let [rh, rv] = PolAxis::R.jones();
        assert!((PolAxis::H.project(rh, rv).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((PolAxis::V.project(rh, rv).im - FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
