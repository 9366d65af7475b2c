//! Monte Carlo photon streams.
//!
//! Event `i` of a stream is decided by the 64-bit word at position `2·i` of
//! a ChaCha8 keystream keyed by the seed, so any event can be regenerated
//! from `(seed, i)` alone and the stream does not depend on how the work is
//! split across threads.

use std::fmt;
use std::io::{self, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::optics::{DetectionSummary, D_A, D_B};
use crate::polarization::PolAxis;

/// Expected counts below this are pooled before the chi-square test.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DetectorOutcome {
    #[serde(rename = "D_A")]
    DA,
    #[serde(rename = "D_B")]
    DB,
    #[serde(rename = "absorbed")]
    Absorbed,
    #[serde(rename = "spilled")]
    Spilled,
}

impl fmt::Display for DetectorOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorOutcome::DA => "D_A",
            DetectorOutcome::DB => "D_B",
            DetectorOutcome::Absorbed => "absorbed",
            DetectorOutcome::Spilled => "spilled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Outcome {
    pub detector: DetectorOutcome,
    pub pol: Option<PolAxis>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pol {
            Some(p) => write!(f, "({},{p})", self.detector),
            None => write!(f, "({})", self.detector),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhotonEvent {
    pub sequence_index: u64,
    pub detector: DetectorOutcome,
    pub pol_outcome: Option<PolAxis>,
}

/// A discrete distribution over outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeTable {
    pub cells: Vec<(Outcome, f64)>,
}

impl OutcomeTable {
    /// Normalizes the weights; fails on negative or all-zero weights.
    pub fn new(cells: Vec<(Outcome, f64)>) -> Result<Self> {
        if cells.iter().any(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidState(
                "outcome weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = cells.iter().map(|(_, p)| p).sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("outcome weights sum to zero".into()));
        }
        Ok(Self {
            cells: cells.into_iter().map(|(o, p)| (o, p / total)).collect(),
        })
    }

    /// Detector cells from the wave-optics table plus absorbed and spilled.
    pub fn from_summary(s: &DetectionSummary) -> Result<Self> {
        let mut cells = Vec::new();
        for (d, det) in [(D_A, DetectorOutcome::DA), (D_B, DetectorOutcome::DB)] {
            for (k, &pol) in s.outcomes.iter().enumerate() {
                cells.push((Outcome { detector: det, pol }, s.p(d, k)));
            }
        }
        cells.push((
            Outcome {
                detector: DetectorOutcome::Absorbed,
                pol: None,
            },
            s.absorbed_fraction,
        ));
        cells.push((
            Outcome {
                detector: DetectorOutcome::Spilled,
                pol: None,
            },
            s.spill_fraction,
        ));
        Self::new(cells)
    }

    /// Detector cells only, from an exact `[detector][outcome]` table.
    pub fn from_detector_table(
        outcomes: &[Option<PolAxis>],
        table: &[Vec<f64>; 2],
    ) -> Result<Self> {
        let mut cells = Vec::new();
        for (d, det) in [(D_A, DetectorOutcome::DA), (D_B, DetectorOutcome::DB)] {
            for (k, &pol) in outcomes.iter().enumerate() {
                cells.push((Outcome { detector: det, pol }, table[d][k]));
            }
        }
        Self::new(cells)
    }

    pub fn probability(&self, outcome: Outcome) -> f64 {
        self.cells
            .iter()
            .find(|(o, _)| *o == outcome)
            .map_or(0.0, |(_, p)| *p)
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cum: Vec<f64> = self
            .cells
            .iter()
            .map(|(_, p)| {
                acc += p;
                acc
            })
            .collect();
        // Close the last non-empty cell so rounding cannot leave a gap below 1.
        if let Some(k) = self.cells.iter().rposition(|(_, p)| *p > 0.0) {
            for c in &mut cum[k..] {
                *c = f64::INFINITY;
            }
        }
        cum
    }
}

/// Uniform in [0, 1) from the top 53 bits.
fn unit(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// First cell whose cumulative weight exceeds `u`; empty cells are never chosen.
fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u)
}

fn cell_indices(table: &OutcomeTable, seed: u64, start: u64, end: u64) -> Vec<u8> {
    let cum = table.cumulative();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * start as u128);
    (start..end)
        .map(|_| pick(&cum, unit(rng.next_u64())) as u8)
        .collect()
}

/// Pearson chi-square of observed counts against a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Cells with expected count below [`MIN_EXPECTED_COUNT`] were merged
    /// into one before the test.
    pub pooled_cells: usize,
}

pub fn chi_square(table: &OutcomeTable, counts: &[u64]) -> ChiSquare {
    let n: u64 = counts.iter().sum();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_e, mut pooled_o, mut pooled_cells) = (0.0, 0.0, 0);
    for ((_, p), &c) in table.cells.iter().zip(counts) {
        let e = p * n as f64;
        if e < MIN_EXPECTED_COUNT {
            pooled_e += e;
            pooled_o += c as f64;
            pooled_cells += 1;
        } else {
            bins.push((e, c as f64));
        }
    }
    if pooled_cells > 0 && pooled_e > 0.0 {
        bins.push((pooled_e, pooled_o));
    }
    let statistic: f64 = bins.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        pooled_cells,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonSample {
    pub seed: u64,
    pub table: OutcomeTable,
    #[serde(skip)]
    cells: Vec<u8>,
    pub counts: Vec<u64>,
    pub chi_square: ChiSquare,
}

impl PhotonSample {
    pub fn len(&self) -> u64 {
        self.cells.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count(&self, outcome: Outcome) -> u64 {
        self.table
            .cells
            .iter()
            .position(|(o, _)| *o == outcome)
            .map_or(0, |k| self.counts[k])
    }

    pub fn frequency(&self, outcome: Outcome) -> f64 {
        self.count(outcome) as f64 / self.len() as f64
    }

    pub fn events(&self) -> impl Iterator<Item = PhotonEvent> + '_ {
        self.cells.iter().enumerate().map(|(i, &k)| {
            let o = self.table.cells[k as usize].0;
            PhotonEvent {
                sequence_index: i as u64,
                detector: o.detector,
                pol_outcome: o.pol,
            }
        })
    }

    /// `sequence_index,detector,pol_outcome` rows; `none` when unanalyzed.
    pub fn write_events_csv<W: Write>(
        &self,
        out: W,
        header: &[(String, String)],
    ) -> io::Result<()> {
        let mut out = io::BufWriter::new(out);
        for (k, v) in header {
            writeln!(out, "# {k}: {v}")?;
        }
        writeln!(out, "sequence_index,detector,pol_outcome")?;
        for e in self.events() {
            match e.pol_outcome {
                Some(p) => writeln!(out, "{},{},{p}", e.sequence_index, e.detector)?,
                None => writeln!(out, "{},{},none", e.sequence_index, e.detector)?,
            }
        }
        out.flush()
    }
}

/// The single event at `index` of the stream for `seed`.
pub fn photon_at(table: &OutcomeTable, seed: u64, index: u64) -> PhotonEvent {
    let k = cell_indices(table, seed, index, index + 1)[0];
    let o = table.cells[k as usize].0;
    PhotonEvent {
        sequence_index: index,
        detector: o.detector,
        pol_outcome: o.pol,
    }
}

/// Draws `n` independent events from `table`.
pub fn sample_photons(table: &OutcomeTable, n: u64, seed: u64) -> Result<PhotonSample> {
    if n == 0 {
        return Err(Error::Config("photon count must be at least 1".into()));
    }
    if table.cells.len() > u8::MAX as usize {
        return Err(Error::Config("too many outcome cells".into()));
    }
    let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
    let cells: Vec<u8> = chunks
        .par_iter()
        .map(|&c| cell_indices(table, seed, c * CHUNK, ((c + 1) * CHUNK).min(n)))
        .collect::<Vec<_>>()
        .concat();
    let mut counts = vec![0u64; table.cells.len()];
    for &k in &cells {
        counts[k as usize] += 1;
    }
    let chi_square = chi_square(table, &counts);
    Ok(PhotonSample {
        seed,
        table: table.clone(),
        cells,
        counts,
        chi_square,
    })
}
