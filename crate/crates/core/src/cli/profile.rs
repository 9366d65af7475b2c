use std::fs::File;
use std::io::{self, Write};
use std::ops::Range;

use crate::cli::{sha256_hex, ProfileArgs, EXIT_OK, EXIT_USAGE};
use crate::error::{Error, Result};
use crate::optics::field::{Plane, PolarizedField, Projection};
use crate::optics::fringes::fringe_visibility;
use crate::optics::{run_experiment, ExperimentConfig};

/// Rows worth writing for a plane: both slits at the aperture, eight fringe
/// spacings either side of the axis at the lens, both detector windows in
/// the image.
pub(crate) fn region_of_interest(field: &PolarizedField, cfg: &ExperimentConfig) -> Range<usize> {
    let half = match field.plane {
        Plane::Aperture => cfg.slit_separation,
        Plane::LensEntry => 8.0 * cfg.fringe_spacing(),
        Plane::Image => {
            cfg.magnification().abs() * cfg.slit_separation + cfg.detector_window_width()
        }
        Plane::Intermediate => field.grid.halfwidth,
    };
    field.grid.index_range(-half, half)
}

pub(crate) fn config_hash(cfg: &ExperimentConfig) -> String {
    sha256_hex(&serde_json::to_vec(cfg).expect("config serializes"))
}

fn write_profile(args: &ProfileArgs) -> Result<f64> {
    let (catalog, _) = args.catalog.load()?;
    let scenario = catalog
        .get(&args.scenario)
        .ok_or_else(|| Error::Config(format!("no scenario named `{}`", args.scenario)))?;
    let run = run_experiment(&scenario.config).map_err(|e| e.in_scenario(&scenario.name))?;
    let field = run.plane(args.plane).expect("plane was validated");
    let cfg = &scenario.config;
    let visibility = fringe_visibility(
        &field.intensity(args.projection),
        &field.grid,
        0.0,
        cfg.fringe_spacing(),
    );
    let rows = if args.full {
        0..field.len()
    } else {
        region_of_interest(field, cfg)
    };
    let extra = match args.projection {
        Projection::Axis(a) => Some(a),
        Projection::Total => None,
    };
    let meta = vec![
        ("scenario".to_string(), scenario.name.clone()),
        ("config_hash".to_string(), config_hash(cfg)),
        ("projection".to_string(), args.projection.to_string()),
        ("visibility".to_string(), format!("{visibility:e}")),
        (
            "visibility_halfwidth_m".to_string(),
            format!("{:e}", cfg.fringe_spacing()),
        ),
    ];
    match &args.out {
        Some(path) => {
            let mut f = io::BufWriter::new(File::create(path)?);
            field.write_intensity_csv(&mut f, rows, &meta, extra)?;
            f.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = io::BufWriter::new(stdout.lock());
            field.write_intensity_csv(&mut lock, rows, &meta, extra)?;
            lock.flush()?;
        }
    }
    Ok(visibility)
}

pub fn cmd_profile(args: &ProfileArgs) -> i32 {
    match write_profile(args) {
        Ok(v) => {
            eprintln!("visibility({}) at {} = {v:.6}", args.projection, args.plane);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
