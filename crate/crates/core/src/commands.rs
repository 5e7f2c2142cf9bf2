//! The `validate`, `cover`, `pair`, `gram` and `selfcheck` commands, as
//! functions from file paths to run reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::io::{parse_track, parse_weights, write_track, AnyTrack, IoError};
use crate::rational::format_rational;
use crate::report::{sha256_hex, RunReport};
use crate::selfcheck::{run_selfcheck, twisted_dimension_formula, SelfCheckOptions};
use crate::symplectic::{evaluate_pairing, gram_matrix, track_warnings, SymplecticError};
use crate::track::{
    check_maximal_carrying, is_orientable, orientation_cover, quotient_euler_characteristic,
    region_analysis, OrientedTrack, Track, TrackError,
};
use crate::weights::{twisted_subspace_basis, WeightError};

/// Failures that map to the input-error exit code.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: IoError },
    #[error("{0}")]
    Input(String),
}

impl From<TrackError> for CommandError {
    fn from(e: TrackError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<WeightError> for CommandError {
    fn from(e: WeightError) -> Self {
        CommandError::Input(e.to_string())
    }
}

impl From<SymplecticError> for CommandError {
    fn from(e: SymplecticError) -> Self {
        CommandError::Input(e.to_string())
    }
}

/// Input files read so far, with their hashes.
#[derive(Default)]
struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, CommandError> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|source| CommandError::Read {
            path: shown.clone(),
            source,
        })?;
        self.0.insert(shown.clone(), sha256_hex(&bytes));
        String::from_utf8(bytes).map_err(|_| CommandError::Input(format!("{shown}: not UTF-8")))
    }

    fn track(&mut self, path: &Path) -> Result<AnyTrack, CommandError> {
        let text = self.read(path)?;
        parse_track(&text).map_err(|source| CommandError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    fn oriented(&mut self, path: &Path) -> Result<OrientedTrack, CommandError> {
        match self.track(path)? {
            AnyTrack::Oriented(o) => {
                o.ensure_valid()?;
                Ok(o)
            }
            AnyTrack::Base(_) => Err(CommandError::Input(format!(
                "{}: expected an oriented track with divergence flags",
                path.display()
            ))),
        }
    }
}

fn regions_json(t: &dyn Track) -> Result<Value, TrackError> {
    let r = region_analysis(t)?;
    Ok(json!({
        "regions": r.regions.iter().map(|x| json!({"length": x.length(), "cusps": x.cusps})).collect::<Vec<_>>(),
        "total_cusps": r.total_cusps(),
        "euler_characteristic": r.euler_characteristic,
        "genus": r.genus,
        "maximal": check_maximal_carrying(t)?,
    }))
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

pub fn cmd_validate(path: &Path) -> Result<RunReport, CommandError> {
    let mut inputs = Inputs::default();
    let track = inputs.track(path)?;
    let t = track.as_track();
    let report = t.validate();
    let g = t.graph();
    let kind = match &track {
        AnyTrack::Base(_) => "base",
        AnyTrack::Oriented(_) => "oriented",
    };
    let mut outputs = json!({
        "kind": kind,
        "valid": report.is_valid(),
        "violations": report.messages(),
        "switches": g.num_switches(),
        "edges": g.num_edges(),
    });
    let mut warnings = Vec::new();
    if report.is_valid() {
        merge(&mut outputs, regions_json(t)?);
        match &track {
            AnyTrack::Base(b) => merge(&mut outputs, json!({"orientable": is_orientable(b)?})),
            AnyTrack::Oriented(o) => {
                let conflicts = crate::homology::direction_conflicts(o)?;
                if !conflicts.is_empty() {
                    warnings.push(format!(
                        "divergence flags are not coherent along edges {}",
                        conflicts.join(", ")
                    ));
                }
            }
        }
    }
    Ok(RunReport {
        command: format!("validate {}", path.display()),
        inputs: inputs.0,
        outputs,
        warnings,
        seed: None,
        passed: report.is_valid(),
    })
}

/// Builds the orientation cover; writes it to `out` when given, otherwise
/// embeds it in the report.
pub fn cmd_cover(path: &Path, out: Option<&Path>) -> Result<RunReport, CommandError> {
    let mut inputs = Inputs::default();
    let base = match inputs.track(path)? {
        AnyTrack::Base(b) => b,
        AnyTrack::Oriented(_) => return Err(TrackError::AlreadyOriented.into()),
    };
    let cover = orientation_cover(&base)?;
    let text = write_track(&AnyTrack::Oriented(cover.clone()));
    let mut outputs = json!({
        "orientable": is_orientable(&base)?,
        "switches": cover.graph().num_switches(),
        "edges": cover.graph().num_edges(),
        "components": cover.graph().num_components(),
    });
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|source| CommandError::Write {
                path: p.display().to_string(),
                source,
            })?;
            merge(&mut outputs, json!({"cover_file": p.display().to_string()}));
        }
        None => {
            let v: Value = serde_json::from_str(&text).expect("writer emits JSON");
            merge(&mut outputs, json!({"cover": v}));
        }
    }
    let mut warnings = Vec::new();
    if !crate::homology::direction_conflicts(&cover)?.is_empty() {
        warnings.push(
            "transport signs disagree with the ribbon structure; cover divergence flags are not coherent"
                .to_string(),
        );
    }
    Ok(RunReport {
        command: format!("cover {}", path.display()),
        inputs: inputs.0,
        outputs,
        warnings,
        seed: None,
        passed: true,
    })
}

pub fn cmd_pair(cover: &Path, w1: &Path, w2: &Path, n: usize) -> Result<RunReport, CommandError> {
    let mut inputs = Inputs::default();
    let track = inputs.oriented(cover)?;
    let mut weights = Vec::new();
    for p in [w1, w2] {
        let text = inputs.read(p)?;
        let w = parse_weights(&text, track.graph()).map_err(|source| CommandError::Parse {
            path: p.display().to_string(),
            source,
        })?;
        weights.push(w);
    }
    let report = evaluate_pairing(&weights[0], &weights[1], &track, n)?;
    let outputs = json!({
        "n": n,
        "omega": format_rational(&report.thm2),
        "thm1": format_rational(&report.thm1),
        "thm2": format_rational(&report.thm2),
        "difference": format_rational(&report.difference()),
    });
    Ok(RunReport {
        command: format!(
            "pair {} {} {} --n {n}",
            cover.display(),
            w1.display(),
            w2.display()
        ),
        inputs: inputs.0,
        outputs,
        warnings: report.warnings.clone(),
        seed: None,
        passed: report.agree(),
    })
}

pub fn cmd_gram(cover: &Path, n: usize) -> Result<RunReport, CommandError> {
    let mut inputs = Inputs::default();
    let track = inputs.oriented(cover)?;
    if n < 2 {
        return Err(CommandError::Input(format!(
            "n must be at least 2, got {n}"
        )));
    }
    let basis = twisted_subspace_basis(&track, n)?;
    let gram = gram_matrix(&basis, &track, n)?;
    let mut warnings = track_warnings(&track)?;
    // Closed-surface count for the genus of the base surface.
    let expected = quotient_euler_characteristic(&track)?
        .filter(|chi| chi % 2 == 0)
        .map(|chi| twisted_dimension_formula((2 - chi) / 2, n));
    if expected != Some(gram.dimension as i64) {
        warnings.push(format!(
            "twisted dimension {} differs from the closed-surface count {expected:?}",
            gram.dimension
        ));
    }
    let antisymmetric = gram.is_antisymmetric();
    let even = gram.rank % 2 == 0;
    let outputs = json!({
        "n": n,
        "gram": gram.matrix.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "rank": gram.rank,
        "dimension": gram.dimension,
        "expected_dimension": expected,
        "antisymmetric": antisymmetric,
    });
    Ok(RunReport {
        command: format!("gram {} --n {n}", cover.display()),
        inputs: inputs.0,
        outputs,
        warnings,
        seed: None,
        passed: antisymmetric && even,
    })
}

pub fn cmd_selfcheck(n_max: usize, seed: u64) -> Result<RunReport, CommandError> {
    if n_max < 2 {
        return Err(CommandError::Input(format!(
            "--n-max must be at least 2, got {n_max}"
        )));
    }
    let checks = run_selfcheck(&SelfCheckOptions::new(n_max, seed));
    let passed = checks.iter().all(|c| c.passed);
    Ok(RunReport {
        command: format!("selfcheck --n-max {n_max} --seed {seed}"),
        inputs: BTreeMap::new(),
        outputs: json!({ "checks": checks }),
        warnings: Vec::new(),
        seed: Some(seed),
        passed,
    })
}
