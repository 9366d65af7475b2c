//! Free-space propagation with a band-limited paraxial transfer function.
//!
//! Each polarization component is transformed independently by
//! `H(fx) = w(fx)·exp(-iπ·λ·z·fx²)`. The window `w` is 1 up to
//! [`TAPER_START`] of the band limit `f_lim = halfwidth/(λ|z|)` and rolls off
//! with a raised cosine to 0 at `f_lim`. Spatial frequencies beyond `f_lim`
//! would carry light out of the grid within `z` and wrap around; they are
//! removed and their power is booked in the field's ledger.
//! Inside the pass band the transform is unitary.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::optics::config::check_sampling;
use crate::optics::field::{Plane, PolarizedField};

/// Fraction of the band limit below which the transfer window is flat.
pub const TAPER_START: f64 = 0.8;

/// Transfer-function window at `|fx|/f_lim = r`.
pub fn band_window(r: f64) -> f64 {
    if r <= TAPER_START {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (PI * (r - TAPER_START) / (1.0 - TAPER_START)).cos())
    }
}

/// Spatial frequency of FFT bin `k` for `n` samples at spacing `dx`.
pub fn frequency(k: usize, n: usize, dx: f64) -> f64 {
    let k = if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    };
    k / (n as f64 * dx)
}

struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    transfer: Vec<Complex64>,
    /// `1 - |H|²` per bin, for loss bookkeeping.
    rejection: Vec<f64>,
}

impl Plan {
    fn new(n: usize, dx: f64, wavelength: f64, distance: f64, halfwidth: f64) -> Self {
        let mut planner = FftPlanner::new();
        let f_lim = halfwidth / (wavelength * distance.abs());
        let (transfer, rejection) = (0..n)
            .map(|k| {
                let fx = frequency(k, n, dx);
                let w = band_window(fx.abs() / f_lim);
                let phase = -PI * wavelength * distance * fx * fx;
                (Complex64::from_polar(w, phase), 1.0 - w * w)
            })
            .unzip();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            transfer,
            rejection,
        }
    }

    /// Propagates one component in place; returns the rejected power (Σ|F|² units).
    fn apply(&self, data: &mut [Complex64]) -> f64 {
        self.forward.process(data);
        let mut rejected = 0.0;
        for ((a, h), r) in data.iter_mut().zip(&self.transfer).zip(&self.rejection) {
            rejected += a.norm_sqr() * r;
            *a *= h;
        }
        self.inverse.process(data);
        let scale = 1.0 / data.len() as f64;
        for a in data.iter_mut() {
            *a *= scale;
        }
        rejected
    }
}

/// Propagates a field over `distance` meters (negative for backwards).
///
/// Fails if the grid is too coarse for this distance,
/// `dx ≤ λ·|z|/(2·halfwidth·2)`, which keeps the band limit inside half the
/// Nyquist band so intensities are sampled without aliasing.
pub fn propagate(field: &PolarizedField, distance: f64) -> Result<PolarizedField> {
    propagate_to(field, distance, Plane::Intermediate)
}

pub fn propagate_to(field: &PolarizedField, distance: f64, plane: Plane) -> Result<PolarizedField> {
    let mut out = field.clone();
    out.plane = plane;
    if distance == 0.0 {
        return Ok(out);
    }
    let grid = field.grid;
    let dx = grid.dx();
    check_sampling(dx, field.wavelength, distance, grid.halfwidth)?;

    let plan = Plan::new(grid.points, dx, field.wavelength, distance, grid.halfwidth);
    let (mut e_h, mut e_v) = (std::mem::take(&mut out.e_h), std::mem::take(&mut out.e_v));
    let (lost_h, lost_v) = rayon::join(|| plan.apply(&mut e_h), || plan.apply(&mut e_v));
    out.e_h = e_h;
    out.e_v = e_v;
    // Parseval: Σ|e|²·dx = (dx/n)·Σ|F|²
    out.ledger.band_limited += (lost_h + lost_v) * dx / grid.points as f64;
    Ok(out)
}
