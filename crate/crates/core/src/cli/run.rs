use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde_json::json;

use crate::cli::profile::{config_hash, region_of_interest};
use crate::cli::{sha256_hex, RunArgs, RunManifest, EXIT_BOUND_FAILED, EXIT_OK, EXIT_USAGE};
use crate::error::Result;
use crate::harness::{
    cross_validate, max_delta, outcome_table, run_scenario, sample_photons, Catalog, Scenario,
    ScenarioOutcome, CROSS_VALIDATION_TOLERANCE,
};
use crate::optics::field::{Plane, PolarizedField};

fn outputs_for(s: &Scenario) -> Vec<String> {
    let mut v = vec![
        format!("{}.json", s.name),
        format!("{}.lens-entry.csv", s.name),
        format!("{}.image.csv", s.name),
    ];
    if s.photons.is_some() {
        v.push(format!("{}.events.csv", s.name));
    }
    v
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("summary serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_profile(
    dir: &Path,
    s: &Scenario,
    field: &PolarizedField,
    manifest_hash: &str,
    full: bool,
) -> Result<()> {
    let rows = if full {
        0..field.len()
    } else {
        region_of_interest(field, &s.config)
    };
    let meta = vec![
        ("scenario".to_string(), s.name.clone()),
        ("manifest_hash".to_string(), manifest_hash.to_string()),
        ("config_hash".to_string(), config_hash(&s.config)),
    ];
    let mut f = BufWriter::new(File::create(
        dir.join(format!("{}.{}.csv", s.name, field.plane)),
    )?);
    field.write_intensity_csv(&mut f, rows, &meta, None)?;
    f.flush()?;
    Ok(())
}

fn write_scenario(
    dir: &Path,
    s: &Scenario,
    o: &ScenarioOutcome,
    manifest_hash: &str,
    seed: u64,
    full: bool,
) -> Result<()> {
    let cross = if s.is_both_slits() {
        let rows = cross_validate(&s.config, &o.run.summary)?;
        let worst = max_delta(&rows);
        Some(json!({
            "rows": rows,
            "max_delta": worst,
            "tolerance": CROSS_VALIDATION_TOLERANCE,
            "within_tolerance": worst <= CROSS_VALIDATION_TOLERANCE,
        }))
    } else {
        None
    };
    let photons = match s.photons {
        Some(n) => {
            let table = outcome_table(s, &o.run.summary)?;
            let sample = sample_photons(&table, n, seed)?;
            let file = format!("{}.events.csv", s.name);
            let header = vec![
                ("scenario".to_string(), s.name.clone()),
                ("manifest_hash".to_string(), manifest_hash.to_string()),
                ("seed".to_string(), seed.to_string()),
            ];
            sample.write_events_csv(BufWriter::new(File::create(dir.join(&file))?), &header)?;
            Some(json!({
                "n": n,
                "seed": seed,
                "model": s.sampling,
                "table": sample.table,
                "counts": sample.counts,
                "chi_square": sample.chi_square,
                "events_file": file,
            }))
        }
        None => None,
    };
    let value = json!({
        "scenario": s.name,
        "description": s.summary,
        "manifest_hash": manifest_hash,
        "config_hash": config_hash(&s.config),
        "config": s.config,
        "passed": o.passed(),
        "bounds": o.results,
        "detection": o.run.summary,
        "wires": o.run.wires,
        "baseline_without_wires": o.baseline,
        "cross_validation": cross,
        "photons": photons,
    });
    write_json(&dir.join(format!("{}.json", s.name)), &value)?;
    write_profile(dir, s, &o.run.lens_entry, manifest_hash, full)?;
    write_profile(dir, s, &o.run.image, manifest_hash, full)?;
    debug_assert_eq!(o.run.image.plane, Plane::Image);
    Ok(())
}

fn execute(args: &RunArgs, catalog: &Catalog, source: String) -> Result<i32> {
    fs::create_dir_all(&args.out)?;
    let config_hash = sha256_hex(&serde_json::to_vec(catalog).expect("catalog serializes"));
    let names: Vec<String> = catalog.scenarios.iter().map(|s| s.name.clone()).collect();
    let mut outputs: Vec<String> = catalog.scenarios.iter().flat_map(outputs_for).collect();
    outputs.push("manifest.json".into());
    let manifest = RunManifest::new(
        config_hash,
        source,
        args.catalog.overrides.clone(),
        args.seed,
        names,
        outputs,
    );

    let results: Vec<Result<ScenarioOutcome>> =
        catalog.scenarios.par_iter().map(run_scenario).collect();
    let mut failed = false;
    for (s, r) in catalog.scenarios.iter().zip(results) {
        let o = r?;
        write_scenario(
            &args.out,
            s,
            &o,
            &manifest.manifest_hash,
            args.seed,
            args.full,
        )?;
        if o.passed() {
            println!("PASS {}", s.name);
        } else {
            failed = true;
            println!("FAIL {}", s.name);
            for b in o.failures() {
                println!("     {}", b.describe());
                eprintln!("{}: bound failed: {}", s.name, b.describe());
            }
        }
    }
    write_json(
        &args.out.join("manifest.json"),
        &serde_json::to_value(&manifest).expect("manifest serializes"),
    )?;
    Ok(if failed { EXIT_BOUND_FAILED } else { EXIT_OK })
}

pub fn cmd_run(args: &RunArgs) -> i32 {
    let outcome = args
        .catalog
        .load()
        .and_then(|(catalog, source)| execute(args, &catalog, source));
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
