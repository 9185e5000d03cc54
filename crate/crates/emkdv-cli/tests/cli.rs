//! End-to-end checks of the binary: exit codes, error reports, determinism.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_emkdv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn base_overrides(dir: &Path) -> Vec<String> {
    [
        "kgrid.k_max=1.0",
        "kgrid.step=0.05",
        "kgrid.tail_tol=1.0",
        "kgrid.k_cap=1.0",
        "zero_count.k_max=2.0",
        "pde.l_domain=50.0",
        "pde.n=512",
        "pde.dt=0.01",
        "tolerances.boundary_tol=1.0",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([format!("output.dir={}", dir.display())])
    .collect()
}

fn with_overrides(verb: &str, dir: &Path, extra: &[&str]) -> std::process::Output {
    let mut args: Vec<String> = vec!["--verb".into(), verb.into()];
    for ov in base_overrides(dir) {
        args.push("--override".into());
        args.push(ov);
    }
    for ov in extra {
        args.push("--override".into());
        args.push(ov.to_string());
    }
    run(&args.iter().map(|s| s.as_str()).collect::<Vec<_>>())
}

#[test]
fn compare_zero_datum_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_overrides(
        "compare",
        dir.path(),
        &["datum.amplitude=0.0", "queries=[{xi=-0.2,ts=[5.0]}]"],
    );
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("comparison.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn discrete_spectrum_exits_three_with_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_overrides(
        "compare",
        dir.path(),
        &["datum.amplitude=3.0", "queries=[{xi=-0.2,ts=[5.0]}]"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("error.json")).unwrap()).unwrap();
    assert_eq!(report["exit_code"], 3);
    assert!(report["error"].as_str().unwrap().contains("discrete spectrum"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_overrides("compare", dir.path(), &["params.beta=0.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = with_overrides("compare", dir.path(), &["queries=[{xi=-0.2}]"]);
    assert_eq!(out.status.code(), Some(2), "query missing ts");
}

#[test]
fn scatter_verb_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_overrides("scatter", dir.path(), &["datum.amplitude=0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scattering_meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["zero_count"], 0);
    let csv = std::fs::read_to_string(dir.path().join("scattering.csv")).unwrap();
    assert!(csv.starts_with("k,re_a,im_a,re_b,im_b,re_r,im_r\n"));
}

#[test]
fn phase_and_painleve_verbs_run_standalone() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_overrides("phase", dir.path(), &["phase.grid_n=9"]);
    assert!(out.status.success());
    let sig = std::fs::read_to_string(dir.path().join("signature.csv")).unwrap();
    assert_eq!(sig.lines().count(), 82, "9x9 grid plus header");

    let out = with_overrides(
        "painleve",
        dir.path(),
        &[
            "painleve.s_override=0.1",
            "painleve.y_min=-1.0",
            "painleve.y_max=1.0",
            "painleve.y_step=0.1",
            "painleve.nodes_per_panel=12",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("painleve.csv").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    // identical configs except for the output dir, which the manifest ignores
    let o1 = with_overrides(
        "compare",
        dir1.path(),
        &["datum.amplitude=0.2", "queries=[{xi=-0.2,ts=[5.0]}]"],
    );
    let o2 = with_overrides(
        "compare",
        dir2.path(),
        &["datum.amplitude=0.2", "queries=[{xi=-0.2,ts=[5.0]}]"],
    );
    assert!(o1.status.success() && o2.status.success());
    for name in ["comparison.csv", "comparison.json", "scattering.csv"] {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}
