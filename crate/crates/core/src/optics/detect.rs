use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::config::{Analyzer, ExperimentConfig};
use crate::optics::field::{PolarizedField, Projection};
use crate::polarization::PolAxis;

/// Detector index: 0 is D_A, 1 is D_B.
pub const D_A: usize = 0;
pub const D_B: usize = 1;

/// Fringe visibilities of the field arriving at the lens, over `|x| ≤ window_halfwidth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensVisibility {
    pub h: f64,
    pub v: f64,
    pub l: f64,
    pub r: f64,
    pub total: f64,
    pub window_halfwidth: f64,
}

impl LensVisibility {
    pub fn get(&self, projection: Projection) -> f64 {
        match projection {
            Projection::Axis(PolAxis::H) => self.h,
            Projection::Axis(PolAxis::V) => self.v,
            Projection::Axis(PolAxis::L) => self.l,
            Projection::Axis(PolAxis::R) => self.r,
            Projection::Total => self.total,
        }
    }
}

/// Outcome probabilities of one run, as fractions of the power leaving the slits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSummary {
    pub analyzer: Analyzer,
    /// Column labels of `p_detector_pol`; `None` when no analyzer is fitted.
    pub outcomes: Vec<Option<PolAxis>>,
    /// `p_detector_pol[detector][outcome]`.
    pub p_detector_pol: [Vec<f64>; 2],
    pub absorbed_fraction: f64,
    /// Lost out of the simulation window during propagation.
    pub vignetted_fraction: f64,
    /// Everything not detected and not absorbed, vignetting included.
    pub spill_fraction: f64,
    pub lens_visibility: Option<LensVisibility>,
    pub fill_factor: Option<f64>,
    pub detector_centers: [f64; 2],
    pub detector_window_width: f64,
}

impl DetectionSummary {
    pub fn p(&self, detector: usize, outcome: usize) -> f64 {
        self.p_detector_pol[detector][outcome]
    }

    /// Column index of `axis`, if it is one of the outcomes.
    pub fn outcome_index(&self, axis: Option<PolAxis>) -> Option<usize> {
        self.outcomes.iter().position(|&o| o == axis)
    }

    /// Column of the analyzer's pass axis (0 without analyzer).
    pub fn pass_index(&self) -> usize {
        self.outcome_index(self.analyzer.pass_axis()).unwrap_or(0)
    }

    pub fn detector_total(&self, detector: usize) -> f64 {
        self.p_detector_pol[detector].iter().sum()
    }

    pub fn detected(&self) -> f64 {
        self.detector_total(D_A) + self.detector_total(D_B)
    }

    /// Share of the analyzer-passing detected light that lands in `detector`.
    pub fn pass_share(&self, detector: usize) -> f64 {
        let k = self.pass_index();
        let sum = self.p(D_A, k) + self.p(D_B, k);
        if sum > 0.0 {
            self.p(detector, k) / sum
        } else {
            0.0
        }
    }

    /// `|P(D_A, pass) - P(D_B, pass)|`.
    pub fn imbalance(&self) -> f64 {
        let k = self.pass_index();
        (self.p(D_A, k) - self.p(D_B, k)).abs()
    }

    /// `1 - (detected + absorbed + spill)`.
    pub fn accounting_residual(&self) -> f64 {
        1.0 - (self.detected() + self.absorbed_fraction + self.spill_fraction)
    }
}

/// Integrates the image-plane intensity over the two detector windows.
///
/// Windows are centered on the geometric images of the slits and are
/// `|m|·a·window_factor` wide; cells straddling a window edge count with the
/// covered fraction. With an analyzer the intensity is split into the two
/// outcomes of its basis before integration. Fractions refer to the unit
/// power launched at the aperture.
pub fn detect(image: &PolarizedField, cfg: &ExperimentConfig) -> Result<DetectionSummary> {
    let centers = cfg.detector_centers();
    let width = cfg.detector_window_width();
    if (centers[1] - centers[0]).abs() < width {
        return Err(Error::InvalidGeometry(format!(
            "detector windows of width {width:e} m centered at {:e} m and {:e} m overlap",
            centers[0], centers[1]
        )));
    }
    let grid = image.grid;
    for c in centers {
        if !grid.contains(c - 0.5 * width) || !grid.contains(c + 0.5 * width) {
            return Err(Error::InvalidGeometry(format!(
                "detector window at {c:e} m extends past the grid"
            )));
        }
    }

    let outcomes = cfg.analyzer.outcomes();
    let intensities: Vec<Vec<f64>> = outcomes
        .iter()
        .map(|o| image.intensity(o.map_or(Projection::Total, Projection::Axis)))
        .collect();
    let dx = grid.dx();
    let window = |c: f64, i: &[f64]| -> f64 {
        grid.covered_cells(c - 0.5 * width, c + 0.5 * width)
            .into_iter()
            .map(|(j, cover)| i[j] * cover)
            .sum::<f64>()
            * dx
    };
    let p_detector_pol = [
        intensities
            .iter()
            .map(|i| window(centers[0], i))
            .collect::<Vec<_>>(),
        intensities
            .iter()
            .map(|i| window(centers[1], i))
            .collect::<Vec<_>>(),
    ];
    let detected: f64 = p_detector_pol.iter().flatten().sum();
    let spill = (image.power() - detected).max(0.0) + image.ledger.band_limited;

    Ok(DetectionSummary {
        analyzer: cfg.analyzer,
        outcomes,
        p_detector_pol,
        absorbed_fraction: image.ledger.absorbed,
        vignetted_fraction: image.ledger.band_limited,
        spill_fraction: spill,
        lens_visibility: None,
        fill_factor: None,
        detector_centers: centers,
        detector_window_width: width,
    })
}
