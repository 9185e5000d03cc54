//! Deterministic file export.
//!
//! Floats are written in Rust's shortest round-trip form, columns are in a
//! fixed order, and no timestamps or environment data enter the artifacts, so
//! identical configurations produce byte-identical files.

use crate::asymptotics::AsymptoticEnvelope;
use crate::error::{Error, Result};
use crate::painleve::PainleveSolution;
use crate::pde::{EvolveOutcome, FieldSnapshot};
use crate::phase::SignSample;
use crate::pipeline::run::ComparisonRecord;
use crate::scattering::ReflectionData;
use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    write_file(path, &(text + "\n"))
}

/// `k,re_a,im_a,re_b,im_b,re_r,im_r`
pub fn write_scattering_csv(path: &Path, data: &ReflectionData) -> Result<PathBuf> {
    let mut s = String::from("k,re_a,im_a,re_b,im_b,re_r,im_r\n");
    for (i, &k) in data.k_grid().iter().enumerate() {
        let (a, b, r) = (data.a()[i], data.b()[i], data.r()[i]);
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(k),
            fmt(a.re),
            fmt(a.im),
            fmt(b.re),
            fmt(b.im),
            fmt(r.re),
            fmt(r.im)
        ));
    }
    write_file(path, &s)
}

/// Rebuild reflection data from a previously exported table.
pub fn read_scattering_csv(
    path: &str,
    truncation: f64,
    tols: crate::scattering::ScatteringTols,
) -> Result<ReflectionData> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let mut k = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Io(format!("bad scattering row '{line}': {e}")))?;
        if cols.len() < 5 {
            return Err(Error::Io(format!("bad scattering row '{line}'")));
        }
        k.push(cols[0]);
        a.push(Complex64::new(cols[1], cols[2]));
        b.push(Complex64::new(cols[3], cols[4]));
    }
    ReflectionData::from_samples(k, a, b, truncation, tols)
}

/// `re_k,im_k,sign`
pub fn write_signature_csv(path: &Path, table: &[SignSample]) -> Result<PathBuf> {
    let mut s = String::from("re_k,im_k,sign\n");
    for row in table {
        s.push_str(&format!("{},{},{}\n", fmt(row.re_k), fmt(row.im_k), row.sign));
    }
    write_file(path, &s)
}

/// `x,t,u_asymptotic,amp1,amp2,phase1,phase2`
pub fn write_asymptote_csv(path: &Path, rows: &[(f64, f64, f64, Option<AsymptoticEnvelope>)]) -> Result<PathBuf> {
    if rows.is_empty() {
        return Err(Error::Io("refusing to export an empty table".into()));
    }
    let mut s = String::from("x,t,u_asymptotic,amp1,amp2,phase1,phase2\n");
    for (x, t, u, env) in rows {
        match env {
            Some(e) => s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt(*x),
                fmt(*t),
                fmt(*u),
                fmt(e.amp1),
                fmt(e.amp2),
                fmt(e.theta1),
                fmt(e.theta2)
            )),
            None => s.push_str(&format!("{},{},{},0,0,0,0\n", fmt(*x), fmt(*t), fmt(*u))),
        }
    }
    write_file(path, &s)
}

/// `y,u_p,residual`
pub fn write_painleve_csv(
    path: &Path,
    sol: &PainleveSolution,
    residual: &[(f64, f64)],
) -> Result<PathBuf> {
    let mut s = String::from("y,u_p,residual\n");
    for (i, &y) in sol.y_grid.iter().enumerate() {
        let res = residual
            .iter()
            .find(|(ry, _)| (ry - y).abs() < 1e-12)
            .map(|(_, v)| fmt(v.abs()))
            .unwrap_or_else(|| "nan".into());
        s.push_str(&format!("{},{},{}\n", fmt(y), fmt(sol.u_p[i]), res));
    }
    write_file(path, &s)
}

/// `x,u` for one output time.
pub fn write_snapshot_csv(path: &Path, snap: &FieldSnapshot) -> Result<PathBuf> {
    let mut s = String::from("x,u\n");
    for (x, u) in snap.x.iter().zip(&snap.u) {
        s.push_str(&format!("{},{}\n", fmt(*x), fmt(*u)));
    }
    write_file(path, &s)
}

#[derive(Serialize)]
pub struct PdeManifest<'a> {
    pub l_domain: f64,
    pub n: usize,
    pub dt_effective: &'a [f64],
    pub conservation: &'a [crate::pde::ConservationSample],
    pub energy_drift: f64,
    pub mass_drift: f64,
    pub boundary_amplitudes: Vec<f64>,
}

pub fn write_pde_manifest(path: &Path, outcome: &EvolveOutcome, l_domain: f64, n: usize) -> Result<PathBuf> {
    let manifest = PdeManifest {
        l_domain,
        n,
        dt_effective: &outcome.dt_effective,
        conservation: &outcome.conservation,
        energy_drift: outcome.energy_drift,
        mass_drift: outcome.mass_drift,
        boundary_amplitudes: outcome.snapshots.iter().map(|s| s.boundary_amplitude).collect(),
    };
    write_json(path, &manifest)
}

/// `x,t,u_direct,u_asymptotic,abs_err,scaled_err,region`
pub fn write_comparison_csv(path: &Path, records: &[ComparisonRecord]) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(Error::Io("refusing to export an empty table".into()));
    }
    let mut s = String::from("x,t,u_direct,u_asymptotic,abs_err,scaled_err,region\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(r.x),
            fmt(r.t),
            fmt(r.u_direct),
            fmt(r.u_asymptotic),
            fmt(r.abs_err),
            fmt(r.scaled_err),
            r.region
        ));
    }
    write_file(path, &s)
}

pub fn write_comparison_json(path: &Path, records: &[ComparisonRecord]) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(Error::Io("refusing to export an empty table".into()));
    }
    write_json(path, &records)
}

/// Name snapshots deterministically from the literal time value.
pub fn snapshot_filename(t: f64) -> String {
    format!("pde_t{}.csv", fmt(t).replace('.', "_").replace('-', "m"))
}
