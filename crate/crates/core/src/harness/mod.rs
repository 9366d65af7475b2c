//! Named scenarios, bound checking, exact-versus-wave comparison and photon
//! sampling.

pub mod photons;
pub mod run;
pub mod scenario;

pub use photons::{
    chi_square, photon_at, sample_photons, ChiSquare, DetectorOutcome, Outcome, OutcomeTable,
    PhotonEvent, PhotonSample,
};
pub use run::{
    convergence_study, cross_validate, evaluate, exact_table, max_delta, outcome_table,
    run_scenario, BoundResult, ConvergenceLevel, CrossRow, ScenarioOutcome,
    CROSS_VALIDATION_TOLERANCE,
};
pub use scenario::{
    parse_override, Bound, Catalog, Expectation, Provenance, Quantity, SamplingModel, Scenario,
    CATALOG_ENV, DEFAULT_CATALOG,
};
