//! Exact state algebra on the 4-dimensional path ⊗ polarization space.
//!
//! A state is a 2×2 amplitude matrix: rows index the two path states, columns
//! the two polarization states. Both axes carry an explicit basis tag, and
//! every change of basis goes through a named operation so the tags always
//! match the transformation history.
//!
//! Path bases:
//! - [`PathBasis::SlitAB`]: `(|ψ_A>, |ψ_B>)`, the photon having left hole A or B.
//! - [`PathBasis::PlusMinus`]: `(|φ+>, |φ->)` with `|ψ_A> = (|φ+> + |φ->)/√2`,
//!   `|ψ_B> = (|φ+> - |φ->)/√2`; `|φ+>` carries the bright fringes and `|φ->`
//!   fills the dark ones.
//! - [`PathBasis::Detector`]: `(|D_A>, |D_B>)`, reachable only through the lens.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::{PolAxis, PolBasis, FRAC_1_SQRT_2};

/// Below this norm² a projected state is not renormalized.
pub const ZERO_PROBABILITY: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathBasis {
    SlitAB,
    PlusMinus,
    Detector,
}

impl PathBasis {
    pub fn labels(self) -> [&'static str; 2] {
        match self {
            PathBasis::SlitAB => ["psi_A", "psi_B"],
            PathBasis::PlusMinus => ["phi+", "phi-"],
            PathBasis::Detector => ["D_A", "D_B"],
        }
    }
}

impl fmt::Display for PathBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathBasis::SlitAB => "slit",
            PathBasis::PlusMinus => "plus-minus",
            PathBasis::Detector => "detector",
        })
    }
}

type Amplitudes = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pure state on path ⊗ polarization with basis tags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPolState {
    amplitudes: Amplitudes,
    path_basis: PathBasis,
    pol_basis: PolBasis,
}

/// Outcome of a polarization projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedState {
    pub axis: PolAxis,
    /// Squared norm of the projected component, i.e. the outcome probability.
    pub norm_sqr: f64,
    /// Projected state; renormalized to unit norm unless `renormalized` is false.
    pub collapsed: PathPolState,
    pub renormalized: bool,
}

impl ProjectedState {
    pub fn probability(&self) -> f64 {
        self.norm_sqr
    }

    /// Path amplitudes of the collapsed state (its only non-zero column).
    pub fn path_amplitudes(&self) -> [Complex64; 2] {
        let c = self.axis.index();
        let a = self.collapsed.amplitudes;
        [a[0][c], a[1][c]]
    }
}

/// Joint distribution over {D_A, D_B} × {two polarization outcomes}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub pol_basis: PolBasis,
    /// `probs[detector][outcome]`, detector 0 = D_A, outcome order from [`PolBasis::axes`].
    pub probs: [[f64; 2]; 2],
}

impl JointDistribution {
    pub fn get(&self, detector: usize, axis: PolAxis) -> Option<f64> {
        (axis.basis() == self.pol_basis).then(|| self.probs[detector][axis.index()])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    /// Marginal detector probabilities `[P(D_A), P(D_B)]`.
    pub fn detector_marginals(&self) -> [f64; 2] {
        [
            self.probs[0][0] + self.probs[0][1],
            self.probs[1][0] + self.probs[1][1],
        ]
    }

    /// `[P(D_A | axis), P(D_B | axis)]`, or `None` if the axis never occurs.
    pub fn conditional_on(&self, axis: PolAxis) -> Option<[f64; 2]> {
        if axis.basis() != self.pol_basis {
            return None;
        }
        let c = axis.index();
        let p = self.probs[0][c] + self.probs[1][c];
        (p > ZERO_PROBABILITY).then(|| [self.probs[0][c] / p, self.probs[1][c] / p])
    }
}

/// Path distinguishability and fringe visibility of a lens-plane state.
///
/// `V = 2|ρ_AB|` with ρ the path-reduced density matrix, and
/// `D = sqrt(1 - |<m_A|m_B>|²)` with `m_A`, `m_B` the normalized polarization
/// markers attached to the two paths. For pure states `D² + V² ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub distinguishability: f64,
    pub visibility: f64,
    pub path_reduced_matrix: [[Complex64; 2]; 2],
}

impl PathPolState {
    /// Wraps raw amplitudes. No normalization is imposed.
    pub fn new(amplitudes: Amplitudes, path_basis: PathBasis, pol_basis: PolBasis) -> Self {
        Self {
            amplitudes,
            path_basis,
            pol_basis,
        }
    }

    /// Product state `(c_A|ψ_A> + c_B|ψ_B>) ⊗ |axis>` in the axis' own basis.
    pub fn product(path: [Complex64; 2], path_basis: PathBasis, axis: PolAxis) -> Self {
        let mut amplitudes = [[ZERO; 2]; 2];
        for (row, amp) in path.iter().enumerate() {
            amplitudes[row][axis.index()] = *amp;
        }
        Self::new(amplitudes, path_basis, axis.basis())
    }

    /// State right behind the holes.
    ///
    /// With markers the quarter-wave plates tag hole A with |L> and hole B with
    /// |R>: `(|A>|L> + |B>|R>)/√2`. Without them the photon keeps its linear
    /// input polarization, fixed to |H>: `(|A> + |B>)/√2 ⊗ |H>`.
    pub fn initial(markers: bool) -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        if markers {
            Self::new(
                [[s, ZERO], [ZERO, s]],
                PathBasis::SlitAB,
                PolBasis::Circular,
            )
        } else {
            Self::product([s, s], PathBasis::SlitAB, PolAxis::H)
        }
    }

    pub fn amplitudes(&self) -> &Amplitudes {
        &self.amplitudes
    }

    pub fn amplitude(&self, path: usize, pol: usize) -> Complex64 {
        self.amplitudes[path][pol]
    }

    /// Amplitude for a path row and a named polarization axis in the current basis.
    pub fn amplitude_along(&self, path: usize, axis: PolAxis) -> Option<Complex64> {
        (axis.basis() == self.pol_basis).then(|| self.amplitudes[path][axis.index()])
    }

    pub fn path_basis(&self) -> PathBasis {
        self.path_basis
    }

    pub fn pol_basis(&self) -> PolBasis {
        self.pol_basis
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    /// Rewrites the path axis between `SlitAB` and `PlusMinus`.
    pub fn in_path_basis(&self, target: PathBasis) -> Result<Self> {
        if target == PathBasis::Detector {
            return Err(Error::InvalidTarget(
                "the detector basis is reached only by applying the lens".into(),
            ));
        }
        if self.path_basis == PathBasis::Detector {
            return Err(Error::InvalidState(
                "state is already in the detector basis".into(),
            ));
        }
        if target == self.path_basis {
            return Ok(*self);
        }
        // The SlitAB <-> PlusMinus map is a Hadamard and its own inverse.
        Ok(Self::new(
            hadamard_rows(&self.amplitudes),
            target,
            self.pol_basis,
        ))
    }

    /// Rewrites the polarization axis, columnwise, in the target basis.
    pub fn in_pol_basis(&self, target: PolBasis) -> Self {
        if target == self.pol_basis {
            return *self;
        }
        // new_k = sum_j <new_k|old_j> old_j
        let old = self.pol_basis.axes();
        let new = target.axes();
        let mut change = [[ZERO; 2]; 2];
        for (k, n) in new.iter().enumerate() {
            for (j, o) in old.iter().enumerate() {
                let [oh, ov] = o.jones();
                change[k][j] = n.project(oh, ov);
            }
        }
        let mut amplitudes = [[ZERO; 2]; 2];
        for (row, out) in amplitudes.iter_mut().enumerate() {
            for (k, slot) in out.iter_mut().enumerate() {
                *slot =
                    change[k][0] * self.amplitudes[row][0] + change[k][1] * self.amplitudes[row][1];
            }
        }
        Self::new(amplitudes, self.path_basis, target)
    }

    /// Lens unitary: `|ψ_A> → |D_A>`, `|ψ_B> → |D_B>`, equivalently
    /// `|φ±> → (|D_A> ± |D_B>)/√2`. Polarization is untouched.
    pub fn apply_lens(&self) -> Result<Self> {
        let amplitudes = match self.path_basis {
            PathBasis::SlitAB => self.amplitudes,
            PathBasis::PlusMinus => hadamard_rows(&self.amplitudes),
            PathBasis::Detector => {
                return Err(Error::InvalidState(
                    "the lens has already been applied".into(),
                ))
            }
        };
        Ok(Self::new(amplitudes, PathBasis::Detector, self.pol_basis))
    }

    /// Projects onto a polarization axis (an ideal polarizer).
    pub fn project(&self, axis: PolAxis) -> ProjectedState {
        let in_basis = self.in_pol_basis(axis.basis());
        let c = axis.index();
        let mut amplitudes = [[ZERO; 2]; 2];
        amplitudes[0][c] = in_basis.amplitudes[0][c];
        amplitudes[1][c] = in_basis.amplitudes[1][c];
        let norm_sqr = amplitudes[0][c].norm_sqr() + amplitudes[1][c].norm_sqr();
        let renormalized = norm_sqr >= ZERO_PROBABILITY;
        if renormalized {
            let scale = norm_sqr.sqrt().recip();
            amplitudes[0][c] *= scale;
            amplitudes[1][c] *= scale;
        }
        ProjectedState {
            axis,
            norm_sqr,
            collapsed: Self::new(amplitudes, self.path_basis, axis.basis()),
            renormalized,
        }
    }

    /// Joint detector × polarization statistics in the requested basis.
    pub fn detector_statistics(&self, basis: PolBasis) -> Result<JointDistribution> {
        if self.path_basis != PathBasis::Detector {
            return Err(Error::InvalidState(format!(
                "detector statistics need the detector basis, state is in the {} basis",
                self.path_basis
            )));
        }
        let s = self.in_pol_basis(basis);
        let mut probs = [[0.0; 2]; 2];
        for (row, out) in probs.iter_mut().enumerate() {
            for (col, p) in out.iter_mut().enumerate() {
                *p = s.amplitudes[row][col].norm_sqr();
            }
        }
        Ok(JointDistribution {
            pol_basis: basis,
            probs,
        })
    }

    /// Distinguishability/visibility diagnostic at the lens plane.
    pub fn duality(&self) -> Result<DualityReport> {
        if self.path_basis != PathBasis::SlitAB {
            return Err(Error::InvalidState(
                "duality report needs the slit path basis".into(),
            ));
        }
        let m = &self.amplitudes;
        let norm = self.norm_sqr();
        let mut rho = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] = (m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj()) / norm;
            }
        }
        let visibility = (2.0 * rho[0][1].norm()).min(1.0);

        let weight_a = m[0][0].norm_sqr() + m[0][1].norm_sqr();
        let weight_b = m[1][0].norm_sqr() + m[1][1].norm_sqr();
        let distinguishability = if weight_a < ZERO_PROBABILITY || weight_b < ZERO_PROBABILITY {
            // Only one path is populated; the marker question is moot.
            1.0
        } else {
            let overlap = (m[0][0].conj() * m[1][0] + m[0][1].conj() * m[1][1]).norm_sqr()
                / (weight_a * weight_b);
            (1.0 - overlap).max(0.0).sqrt()
        };
        Ok(DualityReport {
            distinguishability,
            visibility,
            path_reduced_matrix: rho,
        })
    }

    /// `<self|other>`; both states must carry the same basis tags.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.path_basis != other.path_basis {
            return Err(Error::InvalidState(format!(
                "path bases differ ({} vs {})",
                self.path_basis, other.path_basis
            )));
        }
        let other = other.in_pol_basis(self.pol_basis);
        Ok(self
            .amplitudes
            .iter()
            .flatten()
            .zip(other.amplitudes.iter().flatten())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// True when both states are normalized and `|<self|other>| = 1` within `tol`.
    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        match self.inner(other) {
            Ok(overlap) => {
                (self.norm_sqr() - 1.0).abs() <= tol
                    && (other.norm_sqr() - 1.0).abs() <= tol
                    && (overlap.norm() - 1.0).abs() <= tol
            }
            Err(_) => false,
        }
    }

    /// Largest amplitude difference against another state in the same bases.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        (self.path_basis == other.path_basis && self.pol_basis == other.pol_basis).then(|| {
            self.amplitudes
                .iter()
                .flatten()
                .zip(other.amplitudes.iter().flatten())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
    }
}

fn hadamard_rows(m: &Amplitudes) -> Amplitudes {
    let s = FRAC_1_SQRT_2;
    let mut out = [[ZERO; 2]; 2];
    for col in 0..2 {
        out[0][col] = (m[0][col] + m[1][col]) * s;
        out[1][col] = (m[0][col] - m[1][col]) * s;
    }
    out
}
