use std::f64::consts::PI;

use num_complex::Complex64;

use crate::optics::field::PolarizedField;

/// Thin lens: multiplies both components by `exp(-iπx²/(λf))`.
/// An infinite focal length leaves the field untouched.
pub fn apply_thin_lens(field: &PolarizedField, focal_length: f64) -> PolarizedField {
    let mut out = field.clone();
    if !focal_length.is_finite() {
        return out;
    }
    let k = PI / (field.wavelength * focal_length);
    for (j, (h, v)) in out.e_h.iter_mut().zip(out.e_v.iter_mut()).enumerate() {
        let x = field.grid.x(j);
        let phase = Complex64::from_polar(1.0, -k * x * x);
        *h *= phase;
        *v *= phase;
    }
    out
}
