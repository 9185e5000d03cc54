//! Orchestration: scatter -> certify -> classify -> asymptote -> simulate ->
//! compare, with per-verb entry points so each stage runs standalone.

use crate::asymptotics::{decay_region_bound, leading_order, AsymptoticEnvelope};
use crate::error::{Error, Result};
use crate::painleve::{self, RhContour};
use crate::pde::{self, PdeSettings, SpectralGrid};
use crate::phase::{classify_region, signature_table, stationary_points, Region, Window};
use crate::pipeline::config::ExperimentConfig;
use crate::pipeline::export;
use crate::scattering::{compute_scattering, count_zeros_of_a, ReflectionData};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// One row of the direct-vs-asymptotic comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRecord {
    pub x: f64,
    pub t: f64,
    pub u_direct: f64,
    pub u_asymptotic: f64,
    pub abs_err: f64,
    /// abs_err * t / ln t in the oscillatory region, abs_err * t^{2/5} in the
    /// Painlevé sector, abs_err * sqrt(t) in the fast-decay region.
    pub scaled_err: f64,
    pub region: &'static str,
}

#[derive(Debug, Default, Serialize)]
pub struct PipelineReport {
    pub config_sha256: String,
    pub zero_count: Option<usize>,
    pub records: Vec<ComparisonRecord>,
    pub files: Vec<String>,
    pub energy_drift: Option<f64>,
    pub mass_drift: Option<f64>,
}

fn push_file(report: &mut PipelineReport, p: PathBuf) {
    report.files.push(p.to_string_lossy().into_owned());
}

/// Scattering data either computed from the datum or loaded from a prior
/// export, per `input.scattering_csv`.
fn obtain_scattering(cfg: &ExperimentConfig) -> Result<ReflectionData> {
    match &cfg.input.scattering_csv {
        Some(path) => {
            let truncation = cfg.profile()?.support_radius();
            export::read_scattering_csv(path, truncation, cfg.scattering_tols())
        }
        None => {
            let profile = cfg.profile()?;
            compute_scattering(&profile, &cfg.kgrid_spec(), cfg.scattering_tols())
        }
    }
}

/// `scatter`: spectral functions plus the zero-count certificate.
pub fn run_scatter(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let data = obtain_scattering(cfg)?;
    let profile = cfg.profile()?;
    let zeros = count_zeros_of_a(&profile, &cfg.zero_rect(), cfg.tolerances.ode_tol)?;
    report.zero_count = Some(zeros);
    push_file(&mut report, export::write_scattering_csv(&out_dir.join("scattering.csv"), &data)?);

    #[derive(Serialize)]
    struct Meta {
        truncation: f64,
        ode_tol: f64,
        unitarity_tol: f64,
        sym_tol: f64,
        max_unitarity_defect: f64,
        max_symmetry_defect: f64,
        a_tail_decreasing: bool,
        zero_count: usize,
        zero_rect: crate::scattering::ZeroSearchRect,
        k_hull: (f64, f64),
    }
    let meta = Meta {
        truncation: data.truncation(),
        ode_tol: data.tols().ode_tol,
        unitarity_tol: data.tols().unitarity_tol,
        sym_tol: data.tols().sym_tol,
        max_unitarity_defect: data.max_unitarity_defect(),
        max_symmetry_defect: data.max_symmetry_defect(),
        a_tail_decreasing: data.a_tail_decreasing(),
        zero_count: zeros,
        zero_rect: cfg.zero_rect(),
        k_hull: data.hull(),
    };
    push_file(&mut report, export::write_json(&out_dir.join("scattering_meta.json"), &meta)?);
    Ok(report)
}

/// `phase`: stationary points for the configured xi plus the sign table.
pub fn run_phase(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let p = cfg.model_params()?;
    let sp = stationary_points(cfg.phase.xi, &p);
    let window = Window {
        re_min: cfg.phase.window.re_min,
        re_max: cfg.phase.window.re_max,
        im_min: cfg.phase.window.im_min,
        im_max: cfg.phase.window.im_max,
    };
    let table = signature_table(cfg.phase.xi, &p, &window, cfg.phase.grid_n);
    push_file(&mut report, export::write_signature_csv(&out_dir.join("signature.csv"), &table)?);
    push_file(&mut report, export::write_json(&out_dir.join("stationary.json"), &sp)?);
    Ok(report)
}

fn evaluate_query(
    x: f64,
    t: f64,
    cfg: &ExperimentConfig,
    data: &ReflectionData,
    contour: &RhContour,
    s_datum: f64,
) -> Result<(f64, &'static str, Option<AsymptoticEnvelope>)> {
    let p = cfg.model_params()?;
    let region = classify_region(x, t, &p, cfg.painleve.m_const);
    match region {
        Region::Oscillatory => {
            let (u, env) = leading_order(x, t, data, &p, cfg.tolerances.quad_tol)?;
            Ok((u, region.as_str(), Some(env)))
        }
        Region::FastDecay => {
            let (u, _flag) = decay_region_bound(x, t, &p)?;
            Ok((u, region.as_str(), None))
        }
        Region::PainleveSector => {
            let u = painleve::painleve_asymptote(x, t, s_datum, &p, cfg.painleve.m_const, contour)?;
            Ok((u, region.as_str(), None))
        }
        Region::Merged | Region::PositiveXi => Err(Error::Config(format!(
            "no asymptotic evaluator for region '{}' at (x, t) = ({x}, {t})",
            region.as_str()
        ))),
    }
}

fn stokes_datum(cfg: &ExperimentConfig, data: &ReflectionData) -> Result<f64> {
    if let Some(s) = cfg.painleve.s_override {
        return Ok(s);
    }
    let r0 = data.reflection_at(0.0)?;
    if r0.im.abs() > 100.0 * cfg.tolerances.sym_tol {
        return Err(Error::SymmetryViolation {
            defect: r0.im.abs(),
            tol: 100.0 * cfg.tolerances.sym_tol,
            at_k: 0.0,
        });
    }
    Ok(r0.re)
}

fn contour_from(cfg: &ExperimentConfig) -> Result<RhContour> {
    RhContour::new(
        cfg.painleve.contour_radius,
        cfg.painleve.panels,
        cfg.painleve.nodes_per_panel,
    )
}

/// `asymptote`: evaluate every query without running the reference solver.
pub fn run_asymptote(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let data = obtain_scattering(cfg)?;
    let contour = contour_from(cfg)?;
    let s_datum = stokes_datum(cfg, &data)?;
    let queries = cfg.expanded_queries()?;
    if queries.is_empty() {
        return Err(Error::Config("asymptote requires at least one query".into()));
    }
    let mut rows = Vec::new();
    for (x, t) in queries {
        let (u, _region, env) = evaluate_query(x, t, cfg, &data, &contour, s_datum)?;
        rows.push((x, t, u, env));
    }
    push_file(&mut report, export::write_asymptote_csv(&out_dir.join("asymptote.csv"), &rows)?);
    Ok(report)
}

/// `painleve`: u_p on the configured y-grid with the ODE-residual diagnostic.
pub fn run_painleve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let s = match cfg.painleve.s_override {
        Some(s) => s,
        None => stokes_datum(cfg, &obtain_scattering(cfg)?)?,
    };
    let contour = contour_from(cfg)?;
    let pc = &cfg.painleve;
    let steps = ((pc.y_max - pc.y_min) / pc.y_step).round() as usize;
    let y_grid: Vec<f64> = (0..=steps).map(|i| pc.y_min + i as f64 * pc.y_step).collect();
    let sol = painleve::solve_grid(s, &y_grid, &contour)?;
    let residual = painleve::residual_profile(&sol.y_grid, &sol.u_p, pc.residual_half_width)?;
    push_file(&mut report, export::write_painleve_csv(&out_dir.join("painleve.csv"), &sol, &residual)?);

    #[derive(Serialize)]
    struct Meta {
        s: f64,
        contour_radius: f64,
        panels: usize,
        nodes_per_panel: usize,
        solver_tol: f64,
        max_imag_defect: f64,
        max_structure_defect: f64,
        max_ode_residual: f64,
    }
    let meta = Meta {
        s,
        contour_radius: pc.contour_radius,
        panels: pc.panels,
        nodes_per_panel: pc.nodes_per_panel,
        solver_tol: cfg.tolerances.solver_tol,
        max_imag_defect: sol.max_imag_defect,
        max_structure_defect: sol.max_structure_defect,
        max_ode_residual: residual.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max),
    };
    push_file(&mut report, export::write_json(&out_dir.join("painleve_meta.json"), &meta)?);
    Ok(report)
}

/// `simulate`: reference run only.
pub fn run_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let t_out: Vec<f64> = if cfg.pde.t_out.is_empty() {
        let mut ts: Vec<f64> = cfg.expanded_queries()?.iter().map(|&(_, t)| t).collect();
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup();
        ts
    } else {
        cfg.pde.t_out.clone()
    };
    if t_out.is_empty() {
        return Err(Error::Config("simulate requires pde.t_out or queries".into()));
    }
    let outcome = run_reference(cfg, &t_out)?;
    for snap in &outcome.snapshots {
        push_file(
            &mut report,
            export::write_snapshot_csv(&out_dir.join(export::snapshot_filename(snap.t)), snap)?,
        );
    }
    push_file(
        &mut report,
        export::write_pde_manifest(&out_dir.join("pde_manifest.json"), &outcome, cfg.pde.l_domain, cfg.pde.n)?,
    );
    report.energy_drift = Some(outcome.energy_drift);
    report.mass_drift = Some(outcome.mass_drift);
    Ok(report)
}

fn run_reference(cfg: &ExperimentConfig, t_out: &[f64]) -> Result<pde::EvolveOutcome> {
    let p = cfg.model_params()?;
    let profile = cfg.profile()?;
    let grid = SpectralGrid::new(cfg.pde.l_domain, cfg.pde.n)?;
    let settings = PdeSettings {
        l_domain: cfg.pde.l_domain,
        n: cfg.pde.n,
        dt: cfg.pde.dt,
        boundary_tol: cfg.tolerances.boundary_tol,
    };
    pde::evolve(&profile, &p, &grid, &settings, t_out)
}

/// `compare`: the full pipeline.
///
/// Aborts with `DiscreteSpectrumPresent` unless the zero-count certificate is
/// 0; otherwise evaluates every query against the reference solution and
/// exports all artifacts plus a manifest with the configuration hash.
pub fn run_compare(cfg: &ExperimentConfig, out_dir: &Path) -> Result<PipelineReport> {
    cfg.validate()?;
    let mut report = PipelineReport {
        config_sha256: cfg.sha256(),
        ..Default::default()
    };
    let profile = cfg.profile()?;
    let data = obtain_scattering(cfg)?;
    push_file(&mut report, export::write_scattering_csv(&out_dir.join("scattering.csv"), &data)?);

    let zeros = count_zeros_of_a(&profile, &cfg.zero_rect(), cfg.tolerances.ode_tol)?;
    report.zero_count = Some(zeros);
    if zeros > 0 {
        return Err(Error::DiscreteSpectrumPresent { count: zeros });
    }

    let queries = cfg.expanded_queries()?;
    if queries.is_empty() {
        return Err(Error::Config("compare requires at least one query".into()));
    }
    let contour = contour_from(cfg)?;
    let s_datum = stokes_datum(cfg, &data)?;

    let mut t_out: Vec<f64> = queries.iter().map(|&(_, t)| t).collect();
    t_out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t_out.dedup();
    let outcome = run_reference(cfg, &t_out)?;
    report.energy_drift = Some(outcome.energy_drift);
    report.mass_drift = Some(outcome.mass_drift);

    let mut rows = Vec::new();
    for &(x, t) in &queries {
        let (u_asym, region, env) = evaluate_query(x, t, cfg, &data, &contour, s_datum)?;
        let snap = outcome
            .snapshots
            .iter()
            .find(|s| (s.t - t).abs() < 1e-9)
            .expect("snapshot exists for every query time");
        let u_direct = snap.eval_at(x);
        let abs_err = (u_direct - u_asym).abs();
        let scaled_err = match region {
            "oscillatory" => abs_err * t / t.ln(),
            "painleve_sector" => abs_err * t.powf(0.4),
            _ => abs_err * t.sqrt(),
        };
        rows.push((x, t, u_asym, env));
        report.records.push(ComparisonRecord {
            x,
            t,
            u_direct,
            u_asymptotic: u_asym,
            abs_err,
            scaled_err,
            region,
        });
    }

    for snap in &outcome.snapshots {
        push_file(
            &mut report,
            export::write_snapshot_csv(&out_dir.join(export::snapshot_filename(snap.t)), snap)?,
        );
    }
    push_file(
        &mut report,
        export::write_pde_manifest(&out_dir.join("pde_manifest.json"), &outcome, cfg.pde.l_domain, cfg.pde.n)?,
    );
    push_file(&mut report, export::write_asymptote_csv(&out_dir.join("asymptote.csv"), &rows)?);
    let formats = &cfg.output.formats;
    if formats.iter().any(|f| f == "csv") {
        let written = export::write_comparison_csv(&out_dir.join("comparison.csv"), &report.records)?;
        push_file(&mut report, written);
    }
    if formats.iter().any(|f| f == "json") {
        let written = export::write_comparison_json(&out_dir.join("comparison.json"), &report.records)?;
        push_file(&mut report, written);
    }

    #[derive(Serialize)]
    struct Manifest {
        config_sha256: String,
        zero_count: usize,
        record_count: usize,
        energy_drift: f64,
        mass_drift: f64,
        files: Vec<String>,
    }
    // basenames only, so the manifest stays byte-identical across output roots
    let mut files: Vec<String> = report
        .files
        .iter()
        .map(|f| {
            Path::new(f)
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| f.clone())
        })
        .collect();
    files.sort();
    let manifest = Manifest {
        config_sha256: report.config_sha256.clone(),
        zero_count: zeros,
        record_count: report.records.len(),
        energy_drift: outcome.energy_drift,
        mass_drift: outcome.mass_drift,
        files,
    };
    let written = export::write_json(&out_dir.join("manifest.json"), &manifest)?;
    push_file(&mut report, written);
    Ok(report)
}
