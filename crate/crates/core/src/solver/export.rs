//! Trajectory directories: `manifest.json` plus one field file per snapshot
//! and component.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::evolve::{FlowState, Trajectory};
use crate::error::{Error, Result};
use crate::output::to_json;
use crate::spectral::{read_field, write_field, MAX_POINTS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub length: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub equation: String,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_end: f64,
    pub parameters: serde_json::Value,
    /// `sha256("blob <len>\0" + text)` over the initial field files, in order.
    pub initial_hash: String,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Git-style object hash of a text blob.
pub fn content_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

const COMPONENT_NAMES: [&str; 2] = ["u", "v"];

pub fn write_trajectory<S: FlowState>(
    dir: &Path,
    traj: &Trajectory<S>,
    parameters: serde_json::Value,
) -> Result<TrajectoryManifest> {
    fs::create_dir_all(dir)?;
    let grid = traj.states[0].grid();
    let mut snapshots = Vec::with_capacity(traj.len());
    let mut initial = String::new();
    for (i, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut files = Vec::new();
        for (c, field) in s.components().into_iter().enumerate() {
            let name = format!("snap_{i:05}_{}.txt", COMPONENT_NAMES[c]);
            let text = write_field(field);
            if i == 0 {
                initial.push_str(&text);
            }
            fs::write(dir.join(&name), text)?;
            files.push(name);
        }
        snapshots.push(SnapshotEntry { t: *t, files });
    }
    let manifest = TrajectoryManifest {
        equation: S::EQUATION.to_string(),
        grid: GridSpec { length: grid.length(), points: grid.points() },
        dt: traj.dt,
        t_end: *traj.times.last().expect("nonempty"),
        parameters,
        initial_hash: content_hash(&initial),
        snapshots,
    };
    fs::write(dir.join("manifest.json"), to_json(&manifest)?)?;
    Ok(manifest)
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Parse { line: 0, msg: msg.into() }
}

/// Parse and structurally validate a manifest (no file access).
pub fn parse_manifest(text: &str) -> Result<TrajectoryManifest> {
    let m: TrajectoryManifest = serde_json::from_str(text)?;
    let arity = match m.equation.as_str() {
        "mkdv" => 1,
        "system" => 2,
        other => return Err(invalid(format!("unknown equation {other:?}"))),
    };
    if !(m.grid.length.is_finite() && m.grid.length > 0.0) {
        return Err(invalid("grid length must be positive"));
    }
    if m.grid.points < 8 || m.grid.points > MAX_POINTS || !m.grid.points.is_power_of_two() {
        return Err(invalid(format!("bad grid point count {}", m.grid.points)));
    }
    if !(m.dt.is_finite() && m.dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    match m.snapshots.first() {
        None => return Err(invalid("no snapshots")),
        Some(s) if s.t != 0.0 => return Err(invalid("first snapshot must be at t = 0")),
        _ => {}
    }
    if m.snapshots.windows(2).any(|w| !(w[0].t < w[1].t)) {
        return Err(invalid("snapshot times must increase strictly"));
    }
    for s in &m.snapshots {
        if s.files.len() != arity {
            return Err(invalid(format!("expected {arity} files per snapshot")));
        }
        if s.files.iter().any(|f| f.is_empty() || f.contains('/') || f.contains('\\') || f.starts_with('.')) {
            return Err(invalid("snapshot file names must be plain names inside the directory"));
        }
    }
    Ok(m)
}

pub fn load_trajectory<S: FlowState>(dir: &Path) -> Result<(TrajectoryManifest, Trajectory<S>)> {
    let manifest = parse_manifest(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.equation != S::EQUATION {
        return Err(invalid(format!("manifest holds a {:?} trajectory", manifest.equation)));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut initial = String::new();
    for (i, snap) in manifest.snapshots.iter().enumerate() {
        let mut fields = Vec::new();
        for name in &snap.files {
            let text = fs::read_to_string(dir.join(name))?;
            let field = read_field(&text)?;
            if field.grid().points() != manifest.grid.points
                || field.grid().length().to_bits() != manifest.grid.length.to_bits()
            {
                return Err(Error::GridMismatch);
            }
            if i == 0 {
                initial.push_str(&text);
            }
            fields.push(field);
        }
        times.push(snap.t);
        states.push(S::from_components(fields)?);
    }
    if content_hash(&initial) != manifest.initial_hash {
        return Err(invalid("initial data does not match the recorded content hash"));
    }
    let dt = manifest.dt;
    Ok((manifest, Trajectory { times, states, dt }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::evolve;
    use crate::spectral::{Field, FieldPair, SpectralGrid};
    use std::f64::consts::PI;

    #[test]
    fn hash_matches_git_object_layout() {
        // printf 'blob 0\0' | sha256sum
        assert_eq!(
            content_hash(""),
            "473a0f4c3be8a93681a267e3b1e9a7dcda1185436fe141f7749120a303721813"
        );
    }

    #[test]
    fn round_trip_trajectory() {
        let dir = tempfile::tempdir().unwrap();
        let g = SpectralGrid::new(2.0 * PI, 16).unwrap();
        let u = Field::from_fn(&g, |x| 0.2 * x.cos()).dealias();
        let traj = evolve::evolve(&u, 0.01, 1e-3, 5).unwrap();
        let m = write_trajectory(dir.path(), &traj, serde_json::json!({"c": 1.0})).unwrap();
        assert_eq!(m.snapshots.len(), 3);
        let (m2, back) = load_trajectory::<Field>(dir.path()).unwrap();
        assert_eq!(m, m2);
        assert_eq!(back, traj);
        assert!(load_trajectory::<FieldPair>(dir.path()).is_err());
        fs::write(dir.path().join("snap_00000_u.txt"), write_field(&u.scale(2.0))).unwrap();
        assert!(load_trajectory::<Field>(dir.path()).is_err());
    }

    #[test]
    fn manifest_validation() {
        assert!(parse_manifest("{}").is_err());
        let good = r#"{"equation":"mkdv","grid":{"length":1.0,"points":8},"dt":0.1,"t_end":0.1,
            "parameters":null,"initial_hash":"x","snapshots":[{"t":0.0,"files":["a"]},{"t":0.1,"files":["b"]}]}"#;
        assert!(parse_manifest(good).is_ok());
        assert!(parse_manifest(&good.replace("\"b\"", "\"../b\"")).is_err());
        assert!(parse_manifest(&good.replace("\"t\":0.1", "\"t\":0.0")).is_err());
        assert!(parse_manifest(&good.replace("mkdv", "kdv")).is_err());
        assert!(parse_manifest(&good.replace("\"points\":8", "\"points\":12")).is_err());
    }
}
