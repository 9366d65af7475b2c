//! Apparatus description. All lengths in meters.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::field::Grid;
use crate::polarization::PolAxis;

pub const DEFAULT_WAVELENGTH: f64 = 650e-9;
pub const DEFAULT_SLIT_WIDTH: f64 = 30e-6;
pub const DEFAULT_SLIT_SEPARATION: f64 = 1e-3;
pub const DEFAULT_Z_LENS: f64 = 1.0;
pub const DEFAULT_FOCAL_LENGTH: f64 = 0.25;
pub const DEFAULT_GRID_HALFWIDTH: f64 = 0.08;
pub const DEFAULT_GRID_POINTS: usize = 1 << 18;
pub const DEFAULT_DETECTOR_WINDOW_FACTOR: f64 = 3.0;
pub const DEFAULT_WIRE_COUNT: usize = 6;
pub const DEFAULT_WIRE_WIDTH_FRACTION: f64 = 1.0 / 12.0;

const IMAGING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpenSlits {
    A,
    B,
    #[serde(rename = "both")]
    Both,
}

impl OpenSlits {
    pub fn a_open(self) -> bool {
        matches!(self, OpenSlits::A | OpenSlits::Both)
    }

    pub fn b_open(self) -> bool {
        matches!(self, OpenSlits::B | OpenSlits::Both)
    }
}

impl fmt::Display for OpenSlits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpenSlits::A => "A",
            OpenSlits::B => "B",
            OpenSlits::Both => "both",
        })
    }
}

/// Polarizer in front of the detectors. An analyzer along an axis fixes the
/// measurement basis; the orthogonal outcome is still tallied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Analyzer {
    #[default]
    #[serde(rename = "none")]
    None,
    H,
    V,
    L,
    R,
}

impl Analyzer {
    pub fn pass_axis(self) -> Option<PolAxis> {
        match self {
            Analyzer::None => None,
            Analyzer::H => Some(PolAxis::H),
            Analyzer::V => Some(PolAxis::V),
            Analyzer::L => Some(PolAxis::L),
            Analyzer::R => Some(PolAxis::R),
        }
    }

    /// Outcome columns of a detection table; `None` means "not analyzed".
    pub fn outcomes(self) -> Vec<Option<PolAxis>> {
        match self.pass_axis() {
            None => vec![None],
            Some(axis) => axis.basis().axes().into_iter().map(Some).collect(),
        }
    }
}

/// Where absorbing wires go in the lens-entry plane.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum WireSetting {
    #[default]
    None,
    /// Fixed positions.
    Explicit { centers: Vec<f64>, width: f64 },
    /// At the `count` dark fringes nearest the axis of the unmarked both-slit
    /// pattern, each `width_fraction` of the nominal fringe spacing wide.
    DarkFringes { count: usize, width_fraction: f64 },
}

impl WireSetting {
    pub fn standard() -> Self {
        WireSetting::DarkFringes {
            count: DEFAULT_WIRE_COUNT,
            width_fraction: DEFAULT_WIRE_WIDTH_FRACTION,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, WireSetting::None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub wavelength: f64,
    pub slit_width: f64,
    /// Center-to-center.
    pub slit_separation: f64,
    /// Slits to lens.
    pub z_lens: f64,
    pub focal_length: f64,
    /// Lens to detectors. `None` selects the thin-lens conjugate of `z_lens`.
    pub z_image: Option<f64>,
    /// Accept a `z_image` that violates the imaging condition.
    pub allow_defocus: bool,
    pub grid_halfwidth: f64,
    pub grid_points: usize,
    pub markers: bool,
    pub analyzer: Analyzer,
    pub open_slits: OpenSlits,
    pub wires: WireSetting,
    /// Detector window width in units of the magnified slit width.
    pub detector_window_factor: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            wavelength: DEFAULT_WAVELENGTH,
            slit_width: DEFAULT_SLIT_WIDTH,
            slit_separation: DEFAULT_SLIT_SEPARATION,
            z_lens: DEFAULT_Z_LENS,
            focal_length: DEFAULT_FOCAL_LENGTH,
            z_image: None,
            allow_defocus: false,
            grid_halfwidth: DEFAULT_GRID_HALFWIDTH,
            grid_points: DEFAULT_GRID_POINTS,
            markers: false,
            analyzer: Analyzer::None,
            open_slits: OpenSlits::Both,
            wires: WireSetting::None,
            detector_window_factor: DEFAULT_DETECTOR_WINDOW_FACTOR,
        }
    }
}

impl ExperimentConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_halfwidth, self.grid_points)
    }

    /// Thin-lens conjugate distance `1/(1/f - 1/z_lens)`.
    pub fn conjugate_distance(&self) -> f64 {
        1.0 / (1.0 / self.focal_length - 1.0 / self.z_lens)
    }

    pub fn image_distance(&self) -> f64 {
        self.z_image.unwrap_or_else(|| self.conjugate_distance())
    }

    /// Lateral magnification `-z_image/z_lens`.
    pub fn magnification(&self) -> f64 {
        -self.image_distance() / self.z_lens
    }

    /// Slit centers `[x_A, x_B] = [-d/2, +d/2]`.
    pub fn slit_centers(&self) -> [f64; 2] {
        [-0.5 * self.slit_separation, 0.5 * self.slit_separation]
    }

    /// Geometric images of the slits, `[D_A, D_B]`.
    pub fn detector_centers(&self) -> [f64; 2] {
        let m = self.magnification();
        let [a, b] = self.slit_centers();
        [m * a, m * b]
    }

    pub fn detector_window_width(&self) -> f64 {
        self.magnification().abs() * self.slit_width * self.detector_window_factor
    }

    /// Nominal two-slit fringe spacing at the lens, `λ·z_lens/d`.
    pub fn fringe_spacing(&self) -> f64 {
        self.wavelength * self.z_lens / self.slit_separation
    }

    /// Equivalent width of one slit's far-field envelope at the lens,
    /// `λ·z_lens/a` (the integral of the normalized sinc² lobe).
    pub fn envelope_width(&self) -> f64 {
        self.wavelength * self.z_lens / self.slit_width
    }

    /// The same apparatus with both slits open, no markers and no wires:
    /// the setting in which dark fringes are located.
    pub fn calibration(&self) -> Self {
        Self {
            markers: false,
            analyzer: Analyzer::None,
            open_slits: OpenSlits::Both,
            wires: WireSetting::None,
            ..self.clone()
        }
    }

    /// Largest grid spacing allowed for a propagation over `distance`:
    /// `dx ≤ λ·|z|/(2·halfwidth·2)`.
    pub fn max_dx_for(&self, distance: f64) -> f64 {
        max_dx(self.wavelength, distance, self.grid_halfwidth)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("slit_width", self.slit_width),
            ("slit_separation", self.slit_separation),
            ("z_lens", self.z_lens),
            ("focal_length", self.focal_length),
            ("grid_halfwidth", self.grid_halfwidth),
            ("detector_window_factor", self.detector_window_factor),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.slit_separation < self.slit_width {
            return Err(Error::InvalidGeometry(format!(
                "slits overlap: separation {} m < width {} m",
                self.slit_separation, self.slit_width
            )));
        }
        if !self.grid_points.is_power_of_two() || self.grid_points < 2048 {
            return Err(Error::Config(format!(
                "grid_points must be a power of two >= 2048, got {}",
                self.grid_points
            )));
        }
        let min_halfwidth = 4.0 * (self.slit_separation + self.slit_width);
        if self.grid_halfwidth < min_halfwidth {
            return Err(Error::Config(format!(
                "grid_halfwidth {} m < 4·(d + a) = {} m",
                self.grid_halfwidth, min_halfwidth
            )));
        }
        if self.z_lens <= self.focal_length {
            return Err(Error::InvalidGeometry(format!(
                "z_lens {} m must exceed the focal length {} m for a real image",
                self.z_lens, self.focal_length
            )));
        }
        let z_image = self.image_distance();
        if !(z_image.is_finite() && z_image > 0.0) {
            return Err(Error::Config(format!(
                "z_image must be positive, got {z_image}"
            )));
        }
        if !self.allow_defocus {
            let lhs = 1.0 / self.z_lens + 1.0 / z_image;
            let rhs = 1.0 / self.focal_length;
            if ((lhs - rhs) / rhs).abs() > IMAGING_TOLERANCE {
                return Err(Error::Config(format!(
                    "imaging condition 1/z_lens + 1/z_image = 1/f violated ({lhs} vs {rhs}); \
                     set allow_defocus to override"
                )));
            }
        }
        let dx = self.grid()?.dx();
        for (name, z) in [("z_lens", self.z_lens), ("z_image", z_image)] {
            check_sampling(dx, self.wavelength, z, self.grid_halfwidth).map_err(|e| match e {
                Error::Sampling(msg) => Error::Sampling(format!("{name}: {msg}")),
                other => other,
            })?;
        }
        let grid = self.grid()?;
        for x in self.slit_centers() {
            if !grid.contains(x - self.slit_width) || !grid.contains(x + self.slit_width) {
                return Err(Error::InvalidGeometry(format!(
                    "slit at {x} m lies outside the grid"
                )));
            }
        }
        match &self.wires {
            WireSetting::DarkFringes {
                count,
                width_fraction,
            } => {
                if *count == 0 || !(*width_fraction > 0.0 && *width_fraction < 0.5) {
                    return Err(Error::Config(format!(
                        "dark-fringe wires need count >= 1 and 0 < width_fraction < 0.5, \
                         got {count} and {width_fraction}"
                    )));
                }
            }
            WireSetting::Explicit { width, .. } => {
                if !width.is_finite() || *width <= 0.0 {
                    return Err(Error::Config(format!(
                        "wire width must be positive and finite, got {width}"
                    )));
                }
            }
            WireSetting::None => {}
        }
        Ok(())
    }
}

pub(crate) fn max_dx(wavelength: f64, distance: f64, halfwidth: f64) -> f64 {
    wavelength * distance.abs() / (2.0 * halfwidth * 2.0)
}

pub(crate) fn check_sampling(
    dx: f64,
    wavelength: f64,
    distance: f64,
    halfwidth: f64,
) -> Result<()> {
    let limit = max_dx(wavelength, distance, halfwidth);
    // Allow for the rounding in dx itself.
    if dx > limit * (1.0 + 1e-12) {
        return Err(Error::Sampling(format!(
            "dx = {dx:e} m exceeds λ·z/(2·halfwidth·2) = {limit:e} m \
             (λ = {wavelength:e} m, z = {distance:e} m, halfwidth = {halfwidth:e} m)"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_in_focus() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert!((c.image_distance() - 1.0 / 3.0).abs() < 1e-12);
        assert!((c.magnification() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_slits() {
        let c = ExperimentConfig {
            slit_separation: 20e-6,
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::InvalidGeometry(_))));
    }

    #[test]
    fn defocus_needs_override() {
        let mut c = ExperimentConfig {
            z_image: Some(0.35),
            ..Default::default()
        };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.allow_defocus = true;
        c.validate().unwrap();
    }

    #[test]
    fn coarse_grid_is_rejected_by_sampling_check() {
        let c = ExperimentConfig {
            grid_points: 1 << 14,
            ..Default::default()
        };
        let err = c.validate().unwrap_err();
        assert!(matches!(err, Error::Sampling(_)), "{err}");
        assert!(err.to_string().contains("λ·z/(2·halfwidth·2)"));
    }

    #[test]
    fn grid_points_must_be_power_of_two() {
        let c = ExperimentConfig {
            grid_points: 300_000,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn analyzer_outcomes() {
        assert_eq!(Analyzer::None.outcomes(), vec![None]);
        assert_eq!(
            Analyzer::V.outcomes(),
            vec![Some(PolAxis::H), Some(PolAxis::V)]
        );
        assert_eq!(
            Analyzer::L.outcomes(),
            vec![Some(PolAxis::L), Some(PolAxis::R)]
        );
    }

    #[test]
    fn config_reads_from_toml_with_defaults() {
        let c: ExperimentConfig = toml::from_str(
            r#"
            markers = true
            analyzer = "H"
            open_slits = "A"
            wires = { mode = "dark_fringes", count = 4, width_fraction = 0.1 }
            "#,
        )
        .unwrap();
        assert!(c.markers);
        assert_eq!(c.analyzer, Analyzer::H);
        assert_eq!(c.open_slits, OpenSlits::A);
        assert_eq!(
            c.wires,
            WireSetting::DarkFringes {
                count: 4,
                width_fraction: 0.1
            }
        );
        assert_eq!(c.grid_points, DEFAULT_GRID_POINTS);
    }
}
