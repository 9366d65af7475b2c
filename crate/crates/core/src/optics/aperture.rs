use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::optics::config::ExperimentConfig;
use crate::optics::field::{Grid, Plane, PolarizedField};
use crate::polarization::PolAxis;

/// Field just behind the slits, normalized to unit power.
///
/// Each open slit is a top-hat of width `a` centered at `∓d/2` (A left, B
/// right). Cells straddling a slit edge get the covered fraction of the
/// amplitude so the effective width and center are exact. With markers the
/// quarter-wave plates give slit A the Jones vector of |L> and slit B that of
/// |R>; without them both slits carry |H>.
pub fn make_aperture_field(cfg: &ExperimentConfig) -> Result<PolarizedField> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let [xa, xb] = cfg.slit_centers();
    let (jones_a, jones_b) = if cfg.markers {
        (PolAxis::L.jones(), PolAxis::R.jones())
    } else {
        (PolAxis::H.jones(), PolAxis::H.jones())
    };

    let mut field = PolarizedField::zeros(grid, cfg.wavelength, Plane::Aperture)?;
    let mut open = Vec::with_capacity(2);
    if cfg.open_slits.a_open() {
        open.push((xa, jones_a));
    }
    if cfg.open_slits.b_open() {
        open.push((xb, jones_b));
    }
    for (center, jones) in open {
        add_slit(&mut field, &grid, center, cfg.slit_width, jones)?;
    }

    let power = field.power();
    if power <= 0.0 {
        return Err(Error::InvalidGeometry(
            "slits do not cover any grid cell".into(),
        ));
    }
    field.scale(power.sqrt().recip());
    Ok(field)
}

fn add_slit(
    field: &mut PolarizedField,
    grid: &Grid,
    center: f64,
    width: f64,
    jones: [Complex64; 2],
) -> Result<()> {
    let (lo, hi) = (center - 0.5 * width, center + 0.5 * width);
    if !grid.contains(lo) || !grid.contains(hi) {
        return Err(Error::InvalidGeometry(format!(
            "slit [{lo}, {hi}] m extends past the grid"
        )));
    }
    for (j, c) in grid.covered_cells(lo, hi) {
        field.e_h[j] += jones[0] * c;
        field.e_v[j] += jones[1] * c;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::config::OpenSlits;

    fn small(open_slits: OpenSlits, markers: bool) -> ExperimentConfig {
        ExperimentConfig {
            open_slits,
            markers,
            ..Default::default()
        }
    }

    fn power_in(v: &[Complex64], grid: &Grid, lo: f64, hi: f64) -> f64 {
        grid.index_range(lo, hi)
            .map(|j| v[j].norm_sqr())
            .sum::<f64>()
            * grid.dx()
    }

    #[test]
    fn unit_power() {
        for open in [OpenSlits::A, OpenSlits::B, OpenSlits::Both] {
            for markers in [false, true] {
                let f = make_aperture_field(&small(open, markers)).unwrap();
                assert!((f.power() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn marked_slits_split_power_and_carry_opposite_handedness() {
        let cfg = small(OpenSlits::Both, true);
        let f = make_aperture_field(&cfg).unwrap();
        let g = f.grid;
        let [xa, xb] = cfg.slit_centers();
        let w = cfg.slit_width;
        for x in [xa, xb] {
            assert!((power_in(&f.e_h, &g, x - w, x + w) - 0.25).abs() < 1e-12);
            assert!((power_in(&f.e_v, &g, x - w, x + w) - 0.25).abs() < 1e-12);
        }
        let ja = g.nearest_index(xa);
        let jb = g.nearest_index(xb);
        let phase_a = (f.e_v[ja] / f.e_h[ja]).arg();
        let phase_b = (f.e_v[jb] / f.e_h[jb]).arg();
        assert!((phase_a + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((phase_b - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn single_marked_slit_is_circular_everywhere() {
        let f = make_aperture_field(&small(OpenSlits::A, true)).unwrap();
        for (h, v) in f.e_h.iter().zip(&f.e_v) {
            assert!((h.norm_sqr() - v.norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_width_is_exact() {
        let cfg = small(OpenSlits::A, false);
        let f = make_aperture_field(&cfg).unwrap();
        let peak = f.e_h.iter().map(|a| a.re).fold(0.0, f64::max);
        let area: f64 = f.e_h.iter().map(|a| a.re).sum::<f64>() * f.dx();
        assert!((area / peak - cfg.slit_width).abs() < 1e-12);
    }
}
