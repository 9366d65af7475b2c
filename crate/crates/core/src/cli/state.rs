use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;

use crate::algebra::{PathBasis, PathPolState};
use crate::cli::{Stage, StateArgs, EXIT_OK, EXIT_USAGE};
use crate::error::{Error, Result};
use crate::polarization::PolBasis;

fn complex(c: Complex64) -> String {
    format!("{:+.11e} {:+.11e}i", c.re, c.im)
}

fn check_stages(stages: &[Stage]) -> Result<()> {
    if let Some(k) = stages.iter().position(|s| *s == Stage::Lens) {
        if k + 1 != stages.len() {
            return Err(Error::InvalidState(
                "the lens must be the last stage and may appear only once".into(),
            ));
        }
    }
    Ok(())
}

/// Applies the stages to the initial state.
pub fn evolve(markers: bool, stages: &[Stage]) -> Result<PathPolState> {
    check_stages(stages)?;
    stages
        .iter()
        .try_fold(PathPolState::initial(markers), |s, stage| match stage {
            Stage::PlusMinus => s.in_path_basis(PathBasis::PlusMinus),
            Stage::Slit => s.in_path_basis(PathBasis::SlitAB),
            Stage::Lens => s.apply_lens(),
        })
}

fn amplitude_table(out: &mut String, s: &PathPolState) {
    let paths = s.path_basis().labels();
    let _ = writeln!(
        out,
        "amplitudes ({} path basis, {} polarization basis):",
        s.path_basis(),
        s.pol_basis()
    );
    for (i, p) in paths.iter().enumerate() {
        for (j, axis) in s.pol_basis().axes().iter().enumerate() {
            let a = s.amplitude(i, j);
            let _ = writeln!(
                out,
                "  {p:<5} {axis}  {}  |a|^2 = {:.11e}",
                complex(a),
                a.norm_sqr()
            );
        }
    }
}

/// Renders the full report printed by `state`.
pub fn render(args: &StateArgs) -> Result<String> {
    let basis: PolBasis = match args.basis {
        Some(b) => b.into(),
        None if args.markers => PolBasis::Circular,
        None => PolBasis::Linear,
    };
    let state = evolve(args.markers, &args.stages)?.in_pol_basis(basis);
    let mut out = String::new();
    let stages: Vec<String> = args
        .stages
        .iter()
        .map(|s| {
            s.to_possible_value()
                .map_or_else(String::new, |v| v.get_name().to_string())
        })
        .collect();
    let _ = writeln!(
        out,
        "markers: {}  stages: [{}]",
        if args.markers { "on" } else { "off" },
        stages.join(", ")
    );
    amplitude_table(&mut out, &state);
    let _ = writeln!(out, "norm^2 = {:.11e}", state.norm_sqr());

    if state.path_basis() == PathBasis::Detector {
        let joint = state.detector_statistics(basis)?;
        let _ = writeln!(out, "detector statistics:");
        for (d, name) in ["D_A", "D_B"].iter().enumerate() {
            for axis in basis.axes() {
                let p = joint.get(d, axis).unwrap_or(0.0);
                let _ = writeln!(out, "  P({name},{axis}) = {p:.11e}");
            }
        }
        let [pa, pb] = joint.detector_marginals();
        let _ = writeln!(out, "  P(D_A) = {pa:.11e}\n  P(D_B) = {pb:.11e}");
    } else {
        let slit = state.in_path_basis(PathBasis::SlitAB)?;
        let d = slit.duality()?;
        let _ = writeln!(
            out,
            "duality: D = {:.11e}  V = {:.11e}  D^2 + V^2 = {:.11e}",
            d.distinguishability,
            d.visibility,
            d.distinguishability.powi(2) + d.visibility.powi(2)
        );
    }

    if let Some(axis) = args.project {
        let p = state.project(axis);
        let _ = writeln!(
            out,
            "projection onto {axis}: probability = {:.11e}",
            p.probability()
        );
        if p.renormalized {
            amplitude_table(&mut out, &p.collapsed);
        } else {
            let _ = writeln!(out, "  outcome has zero probability; no collapsed state");
        }
    }
    Ok(out)
}

pub fn cmd_state(args: &StateArgs) -> i32 {
    match render(args) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
