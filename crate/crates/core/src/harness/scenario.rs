//! Scenario catalogs: named configurations with expected bounds.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::optics::config::ExperimentConfig;
use crate::optics::field::Projection;
use crate::optics::{D_A, D_B};
use crate::polarization::PolAxis;

/// Built-in catalog, used when no other is given.
pub const DEFAULT_CATALOG: &str = include_str!("../../catalog/default.toml");

/// Environment variable naming a catalog to use instead of the built-in one.
pub const CATALOG_ENV: &str = "PATHMARKER_CATALOG";

/// Where an expected bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated as an experimental outcome; the numeric threshold may be ours.
    Reported,
    /// Follows from an independent closed-form calculation.
    Derived,
    /// Normalization, symmetry or a similar bookkeeping identity.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Above(f64),
    Below(f64),
    Within { target: f64, tolerance: f64 },
}

impl Bound {
    pub fn holds(&self, value: f64) -> bool {
        match *self {
            Bound::Above(t) => value > t,
            Bound::Below(t) => value < t,
            Bound::Within { target, tolerance } => (value - target).abs() <= tolerance,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Above(t) => write!(f, "> {t}"),
            Bound::Below(t) => write!(f, "< {t}"),
            Bound::Within { target, tolerance } => write!(f, "= {target} ± {tolerance}"),
        }
    }
}

/// A number read off a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `p(D_A)`: detector total over all outcomes.
    Detector(usize),
    /// `p(D_A,H)`: one table cell.
    Cell(usize, PolAxis),
    /// `p(D_A|H)`: detector share among photons with outcome H.
    Conditional(usize, PolAxis),
    /// `detected`
    Detected,
    /// `absorbed`
    Absorbed,
    /// `spill`
    Spill,
    /// `vignetted`
    Vignetted,
    /// `accounting`: |1 - detected - absorbed - spill|.
    Accounting,
    /// `pass_share(D_A)`
    PassShare(usize),
    /// `imbalance`
    Imbalance,
    /// `visibility(H)`: fringe visibility at the lens entry.
    Visibility(Projection),
    /// `fill_factor`
    FillFactor,
    /// `absorbed_over_fill`
    AbsorbedOverFill,
    /// `wire_drop`: detected without wires minus detected with them.
    WireDrop,
    /// `wire_drop_abs`
    WireDropAbs,
    /// `wire_drop_over_fill`
    WireDropOverFill,
    /// `hv_offset_cells`: worst distance in cells from an H minimum to the
    /// nearest V maximum at the lens entry, over the six minima nearest the axis.
    HvOffsetCells,
}

impl Quantity {
    /// Needs a second run of the same scenario with the wires removed.
    pub fn needs_baseline(self) -> bool {
        matches!(
            self,
            Quantity::WireDrop | Quantity::WireDropAbs | Quantity::WireDropOverFill
        )
    }
}

fn parse_detector(s: &str) -> std::result::Result<usize, String> {
    match s.trim() {
        "D_A" | "DA" => Ok(D_A),
        "D_B" | "DB" => Ok(D_B),
        other => Err(format!("unknown detector `{other}` (expected D_A or D_B)")),
    }
}

fn parse_axis(s: &str) -> std::result::Result<PolAxis, String> {
    s.trim()
        .parse::<PolAxis>()
        .map_err(|_| format!("unknown polarization `{}`", s.trim()))
}

fn detector_name(d: usize) -> &'static str {
    if d == D_A {
        "D_A"
    } else {
        "D_B"
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let call = s
            .strip_suffix(')')
            .and_then(|body| body.split_once('('))
            .map(|(name, args)| (name.trim(), args));
        match (s, call) {
            ("detected", _) => Ok(Quantity::Detected),
            ("absorbed", _) => Ok(Quantity::Absorbed),
            ("spill", _) => Ok(Quantity::Spill),
            ("vignetted", _) => Ok(Quantity::Vignetted),
            ("accounting", _) => Ok(Quantity::Accounting),
            ("imbalance", _) => Ok(Quantity::Imbalance),
            ("fill_factor", _) => Ok(Quantity::FillFactor),
            ("absorbed_over_fill", _) => Ok(Quantity::AbsorbedOverFill),
            ("wire_drop", _) => Ok(Quantity::WireDrop),
            ("wire_drop_abs", _) => Ok(Quantity::WireDropAbs),
            ("wire_drop_over_fill", _) => Ok(Quantity::WireDropOverFill),
            ("hv_offset_cells", _) => Ok(Quantity::HvOffsetCells),
            (_, Some(("p", args))) => {
                if let Some((d, a)) = args.split_once('|') {
                    Ok(Quantity::Conditional(parse_detector(d)?, parse_axis(a)?))
                } else if let Some((d, a)) = args.split_once(',') {
                    Ok(Quantity::Cell(parse_detector(d)?, parse_axis(a)?))
                } else {
                    Ok(Quantity::Detector(parse_detector(args)?))
                }
            }
            (_, Some(("pass_share", args))) => Ok(Quantity::PassShare(parse_detector(args)?)),
            (_, Some(("visibility", args))) => {
                args.trim().parse::<Projection>().map(Quantity::Visibility)
            }
            _ => Err(format!("unknown quantity `{s}`")),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Detector(d) => write!(f, "p({})", detector_name(*d)),
            Quantity::Cell(d, a) => write!(f, "p({},{a})", detector_name(*d)),
            Quantity::Conditional(d, a) => write!(f, "p({}|{a})", detector_name(*d)),
            Quantity::Detected => f.write_str("detected"),
            Quantity::Absorbed => f.write_str("absorbed"),
            Quantity::Spill => f.write_str("spill"),
            Quantity::Vignetted => f.write_str("vignetted"),
            Quantity::Accounting => f.write_str("accounting"),
            Quantity::PassShare(d) => write!(f, "pass_share({})", detector_name(*d)),
            Quantity::Imbalance => f.write_str("imbalance"),
            Quantity::Visibility(p) => write!(f, "visibility({p})"),
            Quantity::FillFactor => f.write_str("fill_factor"),
            Quantity::AbsorbedOverFill => f.write_str("absorbed_over_fill"),
            Quantity::WireDrop => f.write_str("wire_drop"),
            Quantity::WireDropAbs => f.write_str("wire_drop_abs"),
            Quantity::WireDropOverFill => f.write_str("wire_drop_over_fill"),
            Quantity::HvOffsetCells => f.write_str("hv_offset_cells"),
        }
    }
}

impl Serialize for Quantity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expectation {
    pub quantity: Quantity,
    pub bound: Bound,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Probability table the photon sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingModel {
    /// The wave-optics detection table, losses included.
    #[default]
    Wave,
    /// The exact state-algebra table.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub summary: String,
    pub config: ExperimentConfig,
    pub expect: Vec<Expectation>,
    /// Photon events to sample, if any.
    pub photons: Option<u64>,
    pub sampling: SamplingModel,
}

impl Scenario {
    pub fn is_both_slits(&self) -> bool {
        self.config.open_slits.a_open() && self.config.open_slits.b_open()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub scenarios: Vec<Scenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    #[serde(default)]
    scenario: Vec<RawScenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Spanned<String>,
    #[serde(default)]
    summary: String,
    #[serde(default)]
    config: Option<Spanned<toml::Table>>,
    #[serde(default)]
    expect: Vec<Spanned<RawExpectation>>,
    photons: Option<u64>,
    #[serde(default)]
    sampling: SamplingModel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpectation {
    quantity: Spanned<String>,
    above: Option<f64>,
    below: Option<f64>,
    target: Option<f64>,
    tolerance: Option<f64>,
    provenance: Provenance,
    note: Option<String>,
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, column)
}

fn parse_error(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = line_column(text, offset);
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Deep-merges `overrides` into `base`.
pub(crate) fn merge_tables(base: &mut toml::Table, overrides: &toml::Table) {
    for (k, v) in overrides {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Parses one `key=value` override into a table. Values that are not valid
/// TOML are taken as bare strings, so `analyzer=H` works unquoted.
pub fn parse_override(spec: &str) -> Result<toml::Table> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not of the form key=value")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() {
        return Err(Error::Config(format!("override `{spec}` has an empty key")));
    }
    toml::from_str::<toml::Table>(&format!("{key} = {value}"))
        .or_else(|_| {
            toml::from_str::<toml::Table>(&format!("{key} = {}", toml::Value::from(value)))
        })
        .map_err(|e| Error::Config(format!("override `{spec}`: {}", e.message())))
}

impl Catalog {
    /// Parses a catalog. `overrides` are merged into every scenario's config
    /// before it is checked.
    pub fn parse(text: &str, overrides: &[toml::Table]) -> Result<Self> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            parse_error(text, offset, e.message())
        })?;
        let mut scenarios = Vec::with_capacity(raw.scenario.len());
        for rs in raw.scenario {
            let name_span = rs.name.span();
            let name = rs.name.into_inner();
            if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
                return Err(parse_error(
                    text,
                    name_span.start,
                    format!("scenario name `{name}` is not usable as a file name"),
                ));
            }
            if scenarios.iter().any(|s: &Scenario| s.name == name) {
                return Err(parse_error(
                    text,
                    name_span.start,
                    format!("duplicate scenario `{name}`"),
                ));
            }
            let config_at = rs
                .config
                .as_ref()
                .map_or(name_span.start, |c| c.span().start);
            let mut table = rs.config.map(Spanned::into_inner).unwrap_or_default();
            for o in overrides {
                merge_tables(&mut table, o);
            }
            let config: ExperimentConfig =
                toml::Value::Table(table)
                    .try_into()
                    .map_err(|e: toml::de::Error| {
                        parse_error(
                            text,
                            config_at,
                            format!("scenario `{name}` config: {}", e.message()),
                        )
                    })?;
            let mut expect = Vec::with_capacity(rs.expect.len());
            for re in rs.expect {
                let span = re.span();
                let re = re.into_inner();
                let qspan = re.quantity.span();
                let quantity: Quantity = re
                    .quantity
                    .get_ref()
                    .parse()
                    .map_err(|m: String| parse_error(text, qspan.start, m))?;
                let bound = match (re.above, re.below, re.target, re.tolerance) {
                    (Some(t), None, None, None) => Bound::Above(t),
                    (None, Some(t), None, None) => Bound::Below(t),
                    (None, None, Some(target), Some(tolerance)) if tolerance >= 0.0 => {
                        Bound::Within { target, tolerance }
                    }
                    _ => {
                        return Err(parse_error(
                            text,
                            span.start,
                            "an expectation needs exactly one of `above`, `below`, or \
                             `target` with a non-negative `tolerance`",
                        ))
                    }
                };
                expect.push(Expectation {
                    quantity,
                    bound,
                    provenance: re.provenance,
                    note: re.note,
                });
            }
            scenarios.push(Scenario {
                name,
                summary: rs.summary,
                config,
                expect,
                photons: rs.photons,
                sampling: rs.sampling,
            });
        }
        Ok(Self { scenarios })
    }

    pub fn load(path: &Path, overrides: &[toml::Table]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, overrides)
    }

    /// The built-in catalog.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_CATALOG, &[]).expect("built-in catalog parses")
    }

    pub fn get(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }
}
