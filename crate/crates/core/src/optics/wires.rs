use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::field::{Grid, PolarizedField};

/// Fully absorbing wires of a common width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireSpec {
    /// Sorted ascending.
    pub centers: Vec<f64>,
    pub width: f64,
}

impl WireSpec {
    pub fn new(mut centers: Vec<f64>, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "wire width must be positive, got {width}"
            )));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidGeometry("wire centers must be finite".into()));
        }
        centers.sort_by(f64::total_cmp);
        if let Some(pair) = centers.windows(2).find(|p| p[1] - p[0] < width) {
            return Err(Error::InvalidGeometry(format!(
                "wires at {} m and {} m overlap (width {width} m)",
                pair[0], pair[1]
            )));
        }
        Ok(Self { centers, width })
    }

    pub fn empty() -> Self {
        Self {
            centers: Vec::new(),
            width: 1.0,
        }
    }

    pub fn count(&self) -> usize {
        self.centers.len()
    }

    /// Covered width over the width of the illuminated envelope.
    pub fn fill_factor(&self, envelope_width: f64) -> f64 {
        self.count() as f64 * self.width / envelope_width
    }

    pub fn check_within(&self, grid: &Grid) -> Result<()> {
        for c in &self.centers {
            let (lo, hi) = (c - 0.5 * self.width, c + 0.5 * self.width);
            if !grid.contains(lo) || !grid.contains(hi) {
                return Err(Error::InvalidGeometry(format!(
                    "wire [{lo}, {hi}] m extends past the grid"
                )));
            }
        }
        Ok(())
    }
}

/// Zeroes both components on the wire supports. Partially covered cells keep
/// the uncovered fraction of their amplitude. Returns the field and the
/// fraction of incident power absorbed.
pub fn apply_wire_mask(field: &PolarizedField, wires: &WireSpec) -> Result<(PolarizedField, f64)> {
    wires.check_within(&field.grid)?;
    let mut out = field.clone();
    let incident = field.power();
    for c in &wires.centers {
        let (lo, hi) = (c - 0.5 * wires.width, c + 0.5 * wires.width);
        for (j, cover) in field.grid.covered_cells(lo, hi) {
            let t = 1.0 - cover;
            out.e_h[j] *= t;
            out.e_v[j] *= t;
        }
    }
    let absorbed = (incident - out.power()).max(0.0);
    out.ledger.absorbed += absorbed;
    let fraction = if incident > 0.0 {
        absorbed / incident
    } else {
        0.0
    };
    Ok((out, fraction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::field::Plane;
    use num_complex::Complex64;

    fn flat(points: usize) -> PolarizedField {
        let grid = Grid::new(1e-3, points).unwrap();
        let mut f = PolarizedField::zeros(grid, 600e-9, Plane::LensEntry).unwrap();
        f.e_h.iter_mut().for_each(|a| *a = Complex64::new(1.0, 0.0));
        f
    }

    #[test]
    fn empty_spec_changes_nothing() {
        let f = flat(128);
        let (g, absorbed) = apply_wire_mask(&f, &WireSpec::empty()).unwrap();
        assert_eq!(absorbed, 0.0);
        assert_eq!(g.e_h, f.e_h);
    }

    #[test]
    fn flat_field_loses_covered_fraction() {
        let f = flat(1024);
        let wires = WireSpec::new(vec![-2e-4, 1e-4, 3.3e-4], 1.7e-5).unwrap();
        let (g, absorbed) = apply_wire_mask(&f, &wires).unwrap();
        assert!((absorbed - wires.fill_factor(2e-3)).abs() < 2e-3);
        assert!((g.ledger.absorbed - absorbed * f.power()).abs() < 1e-15);
    }

    #[test]
    fn overlapping_wires_are_rejected() {
        assert!(WireSpec::new(vec![0.0, 1e-6], 5e-6).is_err());
    }

    #[test]
    fn wires_outside_grid_are_rejected() {
        let f = flat(64);
        let wires = WireSpec::new(vec![2e-3], 1e-5).unwrap();
        assert!(apply_wire_mask(&f, &wires).is_err());
    }
}
