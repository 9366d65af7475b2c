use serde::Serialize;

use crate::algebra::PathPolState;
use crate::error::{Error, Result};
use crate::harness::photons::OutcomeTable;
use crate::harness::scenario::{Bound, Provenance, Quantity, SamplingModel, Scenario};
use crate::optics::config::{ExperimentConfig, WireSetting};
use crate::optics::field::Projection;
use crate::optics::fringes::minimum_to_maximum_offsets;
use crate::optics::{run_experiment, DetectionSummary, ExperimentRun, D_A, D_B};
use crate::polarization::{PolAxis, PolBasis};

/// H minima checked against V maxima by `hv_offset_cells`.
pub const HV_OFFSET_MINIMA: usize = 6;

/// Agreement required between the exact and the wave-optics tables.
pub const CROSS_VALIDATION_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub quantity: Quantity,
    pub bound: Bound,
    pub provenance: Provenance,
    /// `None` when the quantity could not be evaluated for this run.
    pub measured: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BoundResult {
    pub fn describe(&self) -> String {
        match (self.measured, &self.error) {
            (Some(v), _) => format!("{} {} (measured {v:.6e})", self.quantity, self.bound),
            (None, Some(e)) => format!("{} {} (not evaluated: {e})", self.quantity, self.bound),
            (None, None) => format!("{} {}", self.quantity, self.bound),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub run: ExperimentRun,
    /// The same scenario with the wires taken out, when a bound needed it.
    pub baseline: Option<DetectionSummary>,
    pub results: Vec<BoundResult>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

/// Detector share among photons with polarization outcome `axis`.
fn conditional(s: &DetectionSummary, detector: usize, axis: PolAxis) -> Result<f64> {
    let k = s.outcome_index(Some(axis)).ok_or_else(|| {
        Error::Config(format!(
            "outcome {axis} is not measured by analyzer {:?}",
            s.analyzer
        ))
    })?;
    let sum = s.p(D_A, k) + s.p(D_B, k);
    Ok(if sum > 0.0 {
        s.p(detector, k) / sum
    } else {
        0.0
    })
}

fn fill_factor(s: &DetectionSummary) -> Result<f64> {
    s.fill_factor
        .filter(|f| *f > 0.0)
        .ok_or_else(|| Error::Config("scenario has no wires".into()))
}

/// Evaluates one quantity on a finished run.
pub fn evaluate(
    quantity: Quantity,
    run: &ExperimentRun,
    baseline: Option<&DetectionSummary>,
) -> Result<f64> {
    let s = &run.summary;
    let drop = || -> Result<f64> {
        let b = baseline.ok_or_else(|| Error::Config("no baseline run".into()))?;
        Ok(b.detected() - s.detected())
    };
    match quantity {
        Quantity::Detector(d) => Ok(s.detector_total(d)),
        Quantity::Cell(d, axis) => {
            s.outcome_index(Some(axis))
                .map(|k| s.p(d, k))
                .ok_or_else(|| {
                    Error::Config(format!(
                        "outcome {axis} is not measured by analyzer {:?}",
                        s.analyzer
                    ))
                })
        }
        Quantity::Conditional(d, axis) => conditional(s, d, axis),
        Quantity::Detected => Ok(s.detected()),
        Quantity::Absorbed => Ok(s.absorbed_fraction),
        Quantity::Spill => Ok(s.spill_fraction),
        Quantity::Vignetted => Ok(s.vignetted_fraction),
        Quantity::Accounting => Ok(s.accounting_residual().abs()),
        Quantity::PassShare(d) => Ok(s.pass_share(d)),
        Quantity::Imbalance => Ok(s.imbalance()),
        Quantity::Visibility(p) => s
            .lens_visibility
            .map(|v| v.get(p))
            .ok_or_else(|| Error::Config("no lens-plane visibilities".into())),
        Quantity::FillFactor => fill_factor(s),
        Quantity::AbsorbedOverFill => Ok(s.absorbed_fraction / fill_factor(s)?),
        Quantity::WireDrop => drop(),
        Quantity::WireDropAbs => Ok(drop()?.abs()),
        Quantity::WireDropOverFill => Ok(drop()? / fill_factor(s)?),
        Quantity::HvOffsetCells => {
            let f = &run.lens_entry;
            let h = f.intensity(Projection::Axis(PolAxis::H));
            let v = f.intensity(Projection::Axis(PolAxis::V));
            let offsets = minimum_to_maximum_offsets(&h, &v, &f.grid, HV_OFFSET_MINIMA)?;
            Ok(offsets.into_iter().fold(0.0, f64::max))
        }
    }
}

/// Runs the wave-optics pipeline for a scenario and checks every bound.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    let run = run_experiment(&s.config).map_err(|e| e.in_scenario(&s.name))?;
    let baseline = if s.expect.iter().any(|e| e.quantity.needs_baseline()) {
        let cfg = ExperimentConfig {
            wires: WireSetting::None,
            ..s.config.clone()
        };
        Some(
            run_experiment(&cfg)
                .map_err(|e| e.in_scenario(&s.name))?
                .summary,
        )
    } else {
        None
    };
    let results = s
        .expect
        .iter()
        .map(|e| match evaluate(e.quantity, &run, baseline.as_ref()) {
            Ok(v) => BoundResult {
                quantity: e.quantity,
                bound: e.bound,
                provenance: e.provenance,
                measured: Some(v),
                passed: e.bound.holds(v),
                error: None,
            },
            Err(err) => BoundResult {
                quantity: e.quantity,
                bound: e.bound,
                provenance: e.provenance,
                measured: None,
                passed: false,
                error: Some(err.to_string()),
            },
        })
        .collect();
    Ok(ScenarioOutcome {
        run,
        baseline,
        results,
    })
}

/// One cell of the exact-versus-wave comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossRow {
    pub detector: &'static str,
    pub outcome: Option<PolAxis>,
    pub exact: f64,
    pub wave: f64,
    pub delta: f64,
}

/// Detector probabilities of the exact state algebra, laid out like the
/// wave-optics table for `cfg`'s analyzer: `[detector][outcome]`.
pub fn exact_table(cfg: &ExperimentConfig) -> Result<[Vec<f64>; 2]> {
    let state = PathPolState::initial(cfg.markers).apply_lens()?;
    let outcomes = cfg.analyzer.outcomes();
    let basis = cfg
        .analyzer
        .pass_axis()
        .map_or(PolBasis::Linear, PolAxis::basis);
    let joint = state.detector_statistics(basis)?;
    let cell = |d: usize, o: Option<PolAxis>| match o {
        None => joint.detector_marginals()[d],
        Some(axis) => joint.get(d, axis).unwrap_or(0.0),
    };
    Ok([
        outcomes.iter().map(|&o| cell(D_A, o)).collect(),
        outcomes.iter().map(|&o| cell(D_B, o)).collect(),
    ])
}

/// Compares the exact detector table with the wave-optics one, cell by cell.
///
/// Only defined for both slits open, since the exact algebra always
/// launches the photon through both.
pub fn cross_validate(cfg: &ExperimentConfig, wave: &DetectionSummary) -> Result<Vec<CrossRow>> {
    if !(cfg.open_slits.a_open() && cfg.open_slits.b_open()) {
        return Err(Error::Config(
            "cross-validation needs both slits open".into(),
        ));
    }
    let exact = exact_table(cfg)?;
    let mut rows = Vec::new();
    for (d, name) in [(D_A, "D_A"), (D_B, "D_B")] {
        for (k, &o) in wave.outcomes.iter().enumerate() {
            let (e, w) = (exact[d][k], wave.p(d, k));
            rows.push(CrossRow {
                detector: name,
                outcome: o,
                exact: e,
                wave: w,
                delta: (e - w).abs(),
            });
        }
    }
    Ok(rows)
}

pub fn max_delta(rows: &[CrossRow]) -> f64 {
    rows.iter().map(|r| r.delta).fold(0.0, f64::max)
}

/// One level of a grid-refinement study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub grid_points: usize,
    pub grid_halfwidth: f64,
    pub max_delta: f64,
}

/// Largest grid halfwidth, up to a 5% margin, that keeps `points` samples
/// within the sampling limit for both propagation distances.
pub fn halfwidth_for(cfg: &ExperimentConfig, points: usize) -> f64 {
    let z = cfg.z_lens.min(cfg.image_distance());
    0.95 * (cfg.wavelength * z * points as f64 / 8.0).sqrt()
}

/// Cross-validates `cfg` at each grid size, widening the window with the
/// resolution so every level satisfies the sampling criterion.
pub fn convergence_study(
    cfg: &ExperimentConfig,
    levels: &[usize],
) -> Result<Vec<ConvergenceLevel>> {
    levels
        .iter()
        .map(|&n| {
            let c = ExperimentConfig {
                grid_points: n,
                grid_halfwidth: halfwidth_for(cfg, n),
                ..cfg.clone()
            };
            let run = run_experiment(&c)?;
            Ok(ConvergenceLevel {
                grid_points: n,
                grid_halfwidth: c.grid_halfwidth,
                max_delta: max_delta(&cross_validate(&c, &run.summary)?),
            })
        })
        .collect()
}

/// Table the photon sampler draws from for this scenario.
pub fn outcome_table(s: &Scenario, summary: &DetectionSummary) -> Result<OutcomeTable> {
    match s.sampling {
        SamplingModel::Wave => OutcomeTable::from_summary(summary),
        SamplingModel::Exact => {
            if !s.is_both_slits() {
                return Err(Error::Config(format!(
                    "scenario `{}`: exact sampling needs both slits open",
                    s.name
                )));
            }
            OutcomeTable::from_detector_table(&summary.outcomes, &exact_table(&s.config)?)
        }
    }
}
