//! Fringe analysis on sampled intensity profiles.
//!
//! Extrema are ranked by contrast against their topographic saddle: for a
//! minimum, walk outwards on each side until the profile drops below it,
//! keep the highest value seen on each side, and take the lower of the two.
//! Shallow ripples on a fringe flank then score close to zero while genuine
//! dark fringes score close to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::field::{Grid, PolarizedField, Projection};

/// Below this contrast a minimum does not count as a fringe.
pub const MIN_FRINGE_CONTRAST: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub index: usize,
    /// Position refined by a parabola through the three samples around `index`.
    pub position: f64,
    pub value: f64,
    /// `|I - saddle| / (I + saddle)`.
    pub contrast: f64,
}

/// `(max - min)/(max + min)` over `|x - center| ≤ halfwidth`.
pub fn fringe_visibility(intensity: &[f64], grid: &Grid, center: f64, halfwidth: f64) -> f64 {
    let r = grid.index_range(center - halfwidth, center + halfwidth);
    let (lo, hi) = intensity[r]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi + lo <= 0.0 || !hi.is_finite() {
        0.0
    } else {
        (hi - lo) / (hi + lo)
    }
}

/// Span `[x_first, x_last]` of samples at or above half the peak intensity.
pub fn illuminated_core(intensity: &[f64], grid: &Grid) -> (f64, f64) {
    let peak = intensity.iter().copied().fold(0.0, f64::max);
    let half = 0.5 * peak;
    let first = intensity.iter().position(|&v| v >= half).unwrap_or(0);
    let last = intensity.iter().rposition(|&v| v >= half).unwrap_or(0);
    (grid.x(first), grid.x(last))
}

fn is_candidate(i: &[f64], j: usize, kind: ExtremumKind) -> bool {
    match kind {
        ExtremumKind::Min => i[j] < i[j - 1] && i[j] <= i[j + 1],
        ExtremumKind::Max => i[j] > i[j - 1] && i[j] >= i[j + 1],
    }
}

fn saddle(i: &[f64], j: usize, kind: ExtremumKind) -> f64 {
    let v = i[j];
    let beyond = |x: f64| match kind {
        ExtremumKind::Min => x < v,
        ExtremumKind::Max => x > v,
    };
    let pick = |a: f64, b: f64| match kind {
        ExtremumKind::Min => a.max(b),
        ExtremumKind::Max => a.min(b),
    };
    let mut left = v;
    for &x in i[..j].iter().rev() {
        if beyond(x) {
            break;
        }
        left = pick(left, x);
    }
    let mut right = v;
    for &x in &i[j + 1..] {
        if beyond(x) {
            break;
        }
        right = pick(right, x);
    }
    match kind {
        ExtremumKind::Min => left.min(right),
        ExtremumKind::Max => left.max(right),
    }
}

fn refine(i: &[f64], j: usize, grid: &Grid) -> f64 {
    let (a, b, c) = (i[j - 1], i[j], i[j + 1]);
    let den = a - 2.0 * b + c;
    let shift = if den.abs() > 0.0 {
        0.5 * (a - c) / den
    } else {
        0.0
    };
    grid.x(j) + shift.clamp(-0.5, 0.5) * grid.dx()
}

/// Extrema of `kind` inside `[lo, hi]` whose contrast reaches `min_contrast`,
/// ordered by distance from the axis.
pub fn find_extrema(
    intensity: &[f64],
    grid: &Grid,
    kind: ExtremumKind,
    (lo, hi): (f64, f64),
    min_contrast: f64,
) -> Vec<Extremum> {
    let n = intensity.len();
    let r = grid.index_range(lo, hi);
    let mut candidates: Vec<usize> = (r.start.max(1)..r.end.min(n - 1))
        .filter(|&j| is_candidate(intensity, j, kind))
        .collect();
    candidates.sort_by(|&a, &b| grid.x(a).abs().total_cmp(&grid.x(b).abs()).then(a.cmp(&b)));
    candidates
        .into_iter()
        .filter_map(|j| {
            let v = intensity[j];
            let s = saddle(intensity, j, kind);
            let contrast = if s + v > 0.0 {
                (s - v).abs() / (s + v)
            } else {
                0.0
            };
            (contrast >= min_contrast).then(|| Extremum {
                index: j,
                position: refine(intensity, j, grid),
                value: v,
                contrast,
            })
        })
        .collect()
}

/// The `count` dark fringes of the total intensity nearest the axis, sorted
/// by position.
///
/// Only minima inside the illuminated core (where the profile reaches half its
/// peak) are considered, so the zeros of the diffraction envelope are not
/// mistaken for fringes.
pub fn find_dark_fringes(field: &PolarizedField, count: usize) -> Result<Vec<f64>> {
    let intensity = field.intensity(Projection::Total);
    let core = illuminated_core(&intensity, &field.grid);
    let minima = find_extrema(
        &intensity,
        &field.grid,
        ExtremumKind::Min,
        core,
        MIN_FRINGE_CONTRAST,
    );
    if minima.len() < count {
        let best = find_extrema(&intensity, &field.grid, ExtremumKind::Min, core, 0.0)
            .iter()
            .map(|e| e.contrast)
            .fold(0.0, f64::max);
        return Err(Error::NoFringes(format!(
            "found {} minima with visibility >= {MIN_FRINGE_CONTRAST} (best {best:.3e}), need {count}",
            minima.len()
        )));
    }
    let mut centers: Vec<f64> = minima[..count].iter().map(|e| e.position).collect();
    centers.sort_by(f64::total_cmp);
    Ok(centers)
}

/// For each of the `count` minima of `a` nearest the axis, the distance in
/// grid cells to the nearest maximum of `b`.
pub fn minimum_to_maximum_offsets(
    a: &[f64],
    b: &[f64],
    grid: &Grid,
    count: usize,
) -> Result<Vec<f64>> {
    let core = illuminated_core(a, grid);
    let minima = find_extrema(a, grid, ExtremumKind::Min, core, MIN_FRINGE_CONTRAST);
    let maxima = find_extrema(b, grid, ExtremumKind::Max, core, MIN_FRINGE_CONTRAST);
    if minima.len() < count || maxima.is_empty() {
        return Err(Error::NoFringes(format!(
            "need {count} minima and at least one maximum, found {} and {}",
            minima.len(),
            maxima.len()
        )));
    }
    Ok(minima[..count]
        .iter()
        .map(|m| {
            maxima
                .iter()
                .map(|x| (x.position - m.position).abs())
                .fold(f64::INFINITY, f64::min)
                / grid.dx()
        })
        .collect())
}
