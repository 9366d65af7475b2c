use std::fmt;
use std::io::{self, Write};
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarization::PolAxis;

/// Uniform transverse grid `x_j = -halfwidth + j·dx`, `dx = 2·halfwidth/points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub halfwidth: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(halfwidth: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Config(format!(
                "grid needs at least 2 points, got {points}"
            )));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::Config(format!(
                "grid halfwidth must be positive, got {halfwidth}"
            )));
        }
        Ok(Self { halfwidth, points })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.halfwidth / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.halfwidth + j as f64 * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Index of the sample nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.halfwidth) / self.dx()).round();
        j.clamp(0.0, (self.points - 1) as f64) as usize
    }

    /// Indices whose samples fall inside `[lo, hi]`.
    pub fn index_range(&self, lo: f64, hi: f64) -> Range<usize> {
        let dx = self.dx();
        let start = ((lo + self.halfwidth) / dx).ceil().max(0.0) as usize;
        let end = (((hi + self.halfwidth) / dx).floor() + 1.0).max(0.0) as usize;
        start.min(self.points)..end.min(self.points)
    }

    /// Fraction of cell `j` (width dx, centered on its sample) covered by `[lo, hi]`.
    pub fn coverage(&self, j: usize, lo: f64, hi: f64) -> f64 {
        let dx = self.dx();
        let x = self.x(j);
        let overlap = (x + 0.5 * dx).min(hi) - (x - 0.5 * dx).max(lo);
        (overlap / dx).clamp(0.0, 1.0)
    }

    /// Cells touched by `[lo, hi]` with their coverage fractions.
    pub fn covered_cells(&self, lo: f64, hi: f64) -> Vec<(usize, f64)> {
        let r = self.index_range(lo - self.dx(), hi + self.dx());
        r.filter_map(|j| {
            let c = self.coverage(j, lo, hi);
            (c > 0.0).then_some((j, c))
        })
        .collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= -self.halfwidth && x < self.halfwidth
    }
}

/// Named transverse planes of the apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plane {
    Aperture,
    LensEntry,
    Image,
    Intermediate,
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::Aperture => "aperture",
            Plane::LensEntry => "lens-entry",
            Plane::Image => "image",
            Plane::Intermediate => "intermediate",
        })
    }
}

impl FromStr for Plane {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "aperture" => Ok(Plane::Aperture),
            "lens-entry" => Ok(Plane::LensEntry),
            "image" => Ok(Plane::Image),
            "intermediate" => Ok(Plane::Intermediate),
            other => Err(format!(
                "unknown plane `{other}` (expected aperture, lens-entry or image)"
            )),
        }
    }
}

/// Power removed from a field so far, in the field's own units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerLedger {
    /// Taken out by absorbing masks.
    pub absorbed: f64,
    /// Removed by the propagation band limit (light leaving the window).
    pub band_limited: f64,
}

impl PowerLedger {
    pub fn total(&self) -> f64 {
        self.absorbed + self.band_limited
    }
}

/// Two-component (H, V) complex field on a uniform 1-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedField {
    pub grid: Grid,
    pub e_h: Vec<Complex64>,
    pub e_v: Vec<Complex64>,
    pub wavelength: f64,
    pub plane: Plane,
    pub ledger: PowerLedger,
}

/// Which intensity to read off a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    Axis(PolAxis),
    Total,
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Projection::Axis(a) => a.fmt(f),
            Projection::Total => f.write_str("total"),
        }
    }
}

impl FromStr for Projection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("total") {
            Ok(Projection::Total)
        } else {
            s.parse::<PolAxis>()
                .map(Projection::Axis)
                .map_err(|_| format!("unknown projection `{s}` (expected H, V, L, R or total)"))
        }
    }
}

impl PolarizedField {
    pub fn new(
        grid: Grid,
        e_h: Vec<Complex64>,
        e_v: Vec<Complex64>,
        wavelength: f64,
        plane: Plane,
    ) -> Result<Self> {
        if e_h.len() != grid.points || e_v.len() != grid.points {
            return Err(Error::Config(format!(
                "field components have lengths {} and {}, grid has {} points",
                e_h.len(),
                e_v.len(),
                grid.points
            )));
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::Config(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self {
            grid,
            e_h,
            e_v,
            wavelength,
            plane,
            ledger: PowerLedger::default(),
        })
    }

    pub fn zeros(grid: Grid, wavelength: f64, plane: Plane) -> Result<Self> {
        let z = vec![Complex64::new(0.0, 0.0); grid.points];
        Self::new(grid, z.clone(), z, wavelength, plane)
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx()
    }

    pub fn len(&self) -> usize {
        self.grid.points
    }

    pub fn is_empty(&self) -> bool {
        self.grid.points == 0
    }

    /// `Σ(|e_h|² + |e_v|²)·dx`
    pub fn power(&self) -> f64 {
        self.e_h
            .iter()
            .zip(&self.e_v)
            .map(|(h, v)| h.norm_sqr() + v.norm_sqr())
            .sum::<f64>()
            * self.dx()
    }

    /// Power still in the field plus everything the ledger says was removed.
    pub fn accounted_power(&self) -> f64 {
        self.power() + self.ledger.total()
    }

    pub fn scale(&mut self, factor: f64) {
        for a in self.e_h.iter_mut().chain(self.e_v.iter_mut()) {
            *a *= factor;
        }
        self.ledger.absorbed *= factor * factor;
        self.ledger.band_limited *= factor * factor;
    }

    /// Complex amplitude along a polarization axis at every sample.
    pub fn projected_amplitude(&self, axis: PolAxis) -> Vec<Complex64> {
        self.e_h
            .iter()
            .zip(&self.e_v)
            .map(|(h, v)| axis.project(*h, *v))
            .collect()
    }

    pub fn intensity(&self, projection: Projection) -> Vec<f64> {
        match projection {
            Projection::Total => self
                .e_h
                .iter()
                .zip(&self.e_v)
                .map(|(h, v)| h.norm_sqr() + v.norm_sqr())
                .collect(),
            Projection::Axis(PolAxis::H) => self.e_h.iter().map(|h| h.norm_sqr()).collect(),
            Projection::Axis(PolAxis::V) => self.e_v.iter().map(|v| v.norm_sqr()).collect(),
            Projection::Axis(axis) => self
                .e_h
                .iter()
                .zip(&self.e_v)
                .map(|(h, v)| axis.project(*h, *v).norm_sqr())
                .collect(),
        }
    }

    /// `Σ conj(self)·other·dx` over both components.
    pub fn inner(&self, other: &PolarizedField) -> Complex64 {
        let h: Complex64 = self
            .e_h
            .iter()
            .zip(&other.e_h)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let v: Complex64 = self
            .e_v
            .iter()
            .zip(&other.e_v)
            .map(|(a, b)| a.conj() * b)
            .sum();
        (h + v) * self.dx()
    }

    /// Writes `x_m,I_H,I_V,I_total` rows (plus `I_<axis>` for a circular
    /// projection) preceded by `# key: value` metadata lines.
    pub fn write_intensity_csv<W: Write>(
        &self,
        mut out: W,
        rows: Range<usize>,
        metadata: &[(String, String)],
        extra: Option<PolAxis>,
    ) -> io::Result<()> {
        writeln!(out, "# plane: {}", self.plane)?;
        writeln!(out, "# wavelength_m: {:e}", self.wavelength)?;
        writeln!(out, "# dx_m: {:e}", self.dx())?;
        for (k, v) in metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let extra = extra.filter(|a| matches!(a, PolAxis::L | PolAxis::R));
        match extra {
            Some(axis) => writeln!(out, "x_m,I_H,I_V,I_total,I_{axis}")?,
            None => writeln!(out, "x_m,I_H,I_V,I_total")?,
        }
        let rows = rows.start.min(self.len())..rows.end.min(self.len());
        for j in rows {
            let ih = self.e_h[j].norm_sqr();
            let iv = self.e_v[j].norm_sqr();
            write!(out, "{:e},{:e},{:e},{:e}", self.grid.x(j), ih, iv, ih + iv)?;
            if let Some(axis) = extra {
                write!(
                    out,
                    ",{:e}",
                    axis.project(self.e_h[j], self.e_v[j]).norm_sqr()
                )?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_centered() {
        let g = Grid::new(1.0, 8).unwrap();
        assert_eq!(g.x(0), -1.0);
        assert_eq!(g.x(4), 0.0);
        assert_eq!(g.nearest_index(0.01), 4);
    }

    #[test]
    fn coverage_of_partial_cells() {
        let g = Grid::new(1.0, 8).unwrap(); // dx = 0.25
        assert!((g.coverage(4, -0.0625, 1.0) - 0.75).abs() < 1e-12);
        let cells = g.covered_cells(-0.125, 0.125);
        let total: f64 = cells.iter().map(|(_, c)| c).sum();
        assert!((total * g.dx() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn mismatched_component_lengths_are_rejected() {
        let g = Grid::new(1.0, 4).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 3];
        assert!(PolarizedField::new(g, z.clone(), z, 1e-6, Plane::Aperture).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let g = Grid::new(1.0, 4).unwrap();
        let mut f = PolarizedField::zeros(g, 5e-7, Plane::LensEntry).unwrap();
        f.e_h[1] = Complex64::new(1.0, 0.0);
        let mut buf = Vec::new();
        f.write_intensity_csv(
            &mut buf,
            0..4,
            &[("config_hash".into(), "abc".into())],
            None,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# plane: lens-entry\n"));
        assert!(text.contains("# config_hash: abc\n"));
        assert!(text.contains("x_m,I_H,I_V,I_total\n"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }
}
