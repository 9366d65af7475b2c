use crate::error::Result;
use crate::optics::aperture::make_aperture_field;
use crate::optics::config::{ExperimentConfig, WireSetting};
use crate::optics::detect::{detect, DetectionSummary, LensVisibility};
use crate::optics::field::{Plane, PolarizedField, Projection};
use crate::optics::fringes::{find_dark_fringes, fringe_visibility};
use crate::optics::lens::apply_thin_lens;
use crate::optics::propagate::propagate_to;
use crate::optics::wires::{apply_wire_mask, WireSpec};
use crate::polarization::PolAxis;

/// Every intermediate plane of one pass through the apparatus.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub aperture: PolarizedField,
    /// Just before the wires and the lens.
    pub lens_entry: PolarizedField,
    pub image: PolarizedField,
    pub wires: WireSpec,
    pub summary: DetectionSummary,
}

impl ExperimentRun {
    pub fn plane(&self, plane: Plane) -> Option<&PolarizedField> {
        match plane {
            Plane::Aperture => Some(&self.aperture),
            Plane::LensEntry => Some(&self.lens_entry),
            Plane::Image => Some(&self.image),
            Plane::Intermediate => None,
        }
    }
}

pub fn lens_visibility(field: &PolarizedField, halfwidth: f64) -> LensVisibility {
    let vis = |p| fringe_visibility(&field.intensity(p), &field.grid, 0.0, halfwidth);
    LensVisibility {
        h: vis(Projection::Axis(PolAxis::H)),
        v: vis(Projection::Axis(PolAxis::V)),
        l: vis(Projection::Axis(PolAxis::L)),
        r: vis(Projection::Axis(PolAxis::R)),
        total: vis(Projection::Total),
        window_halfwidth: halfwidth,
    }
}

/// Turns the wire setting into concrete positions.
///
/// Dark-fringe wires are placed on the minima of the calibration pattern
/// (both slits, no markers). `lens_entry` is reused when it already is that
/// pattern.
pub fn resolve_wires(
    cfg: &ExperimentConfig,
    lens_entry: Option<&PolarizedField>,
) -> Result<WireSpec> {
    match &cfg.wires {
        WireSetting::None => Ok(WireSpec::empty()),
        WireSetting::Explicit { centers, width } => WireSpec::new(centers.clone(), *width),
        WireSetting::DarkFringes {
            count,
            width_fraction,
        } => {
            let calibration = cfg.calibration();
            let same = ExperimentConfig {
                wires: WireSetting::None,
                ..cfg.clone()
            } == calibration;
            let centers = match lens_entry {
                Some(field) if same => find_dark_fringes(field, *count)?,
                _ => {
                    let aperture = make_aperture_field(&calibration)?;
                    let field = propagate_to(&aperture, calibration.z_lens, Plane::LensEntry)?;
                    find_dark_fringes(&field, *count)?
                }
            };
            WireSpec::new(centers, width_fraction * cfg.fringe_spacing())
        }
    }
}

/// Slits, free space to the lens, wires, lens, free space to the detectors.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    let aperture = make_aperture_field(cfg)?;
    let lens_entry = propagate_to(&aperture, cfg.z_lens, Plane::LensEntry)?;
    let wires = resolve_wires(cfg, Some(&lens_entry))?;
    let (masked, _) = apply_wire_mask(&lens_entry, &wires)?;
    let after_lens = apply_thin_lens(&masked, cfg.focal_length);
    let image = propagate_to(&after_lens, cfg.image_distance(), Plane::Image)?;

    let mut summary = detect(&image, cfg)?;
    summary.lens_visibility = Some(lens_visibility(&lens_entry, cfg.fringe_spacing()));
    if !cfg.wires.is_none() {
        summary.fill_factor = Some(wires.fill_factor(cfg.envelope_width()));
    }
    Ok(ExperimentRun {
        config: cfg.clone(),
        aperture,
        lens_entry,
        image,
        wires,
        summary,
    })
}
