use std::f64::consts::{E, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tns_cli::commands::verify::{cmd_verify, Suite, VerifyOptions};
use tns_cli::config::parse_partial_config;
use tns_cli::snapshot::{decode_snapshot, encode_snapshot, load_snapshot_for, MAGIC};
use tns_cli::tensor_spec::parse_tensor_spec;
use tns_cli::{cmd_constants, cmd_heat, cmd_run, cmd_threshold, parse_config, parse_config_with_overrides, CliError};
use tns_core::galerkin::scenarios::random_smooth;
use tns_core::spectral::FrequencyLattice;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn config_in(dir: &Path, body: &str) -> tns_cli::RunConfig {
    let out = dir.join("diag.csv");
    let snaps = dir.join("snaps");
    let text = format!("{body}\noutput = {}\nsnapshot_dir = {}\n", out.display(), snaps.display());
    parse_config(&text).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let u = random_smooth(&FrequencyLattice::new(3, 2), 11, 1.0, 0.7).unwrap();
    let bytes = encode_snapshot(&u, 0.125);
    assert_eq!(&bytes[..4], MAGIC);
    let (back, t) = decode_snapshot(&bytes, Path::new("mem")).unwrap();
    assert_eq!(t, 0.125);
    assert_eq!(back, u);
    assert_eq!(encode_snapshot(&back, t), bytes);
}

#[test]
fn snapshot_corruption_is_rejected() {
    let u = random_smooth(&FrequencyLattice::new(2, 3), 1, 2.0, 1.0).unwrap();
    let good = encode_snapshot(&u, 1.0);
    let p = Path::new("mem");
    let mut magic = good.clone();
    magic[0] = b'X';
    assert!(decode_snapshot(&magic, p).unwrap_err().to_string().contains("magic"));
    let mut version = good.clone();
    version[4] = 9;
    assert!(decode_snapshot(&version, p).unwrap_err().to_string().contains("version"));
    assert!(decode_snapshot(&good[..good.len() - 8], p).is_err());
    assert!(decode_snapshot(&good[..10], p).is_err());
    // break Hermitian symmetry in one coefficient of component 0
    let mut skew = good.clone();
    let lat = u.lattice();
    let slot = lat.present_slot(&[1, 0]).unwrap();
    let at = 24 + slot * 16 + 8;
    let im = f64::from_le_bytes(skew[at..at + 8].try_into().unwrap()) + 0.25;
    skew[at..at + 8].copy_from_slice(&im.to_le_bytes());
    assert!(decode_snapshot(&skew, p).unwrap_err().to_string().contains("Hermitian"));
}

#[test]
fn snapshot_dimension_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.tns");
    let u = random_smooth(&FrequencyLattice::new(2, 2), 1, 2.0, 1.0).unwrap();
    tns_cli::save_snapshot(&u, 0.0, &path).unwrap();
    assert!(load_snapshot_for(&path, 2).is_ok());
    assert!(load_snapshot_for(&path, 3).unwrap_err().to_string().contains("n = 2"));
    let cfg = config_in(
        dir.path(),
        &format!("scenario = zero\nn = 3\nm = 2\ndt = 1e-3\nt_final = 1e-2\ninitial_snapshot = {}", path.display()),
    );
    assert!(matches!(cmd_run(&cfg), Err(CliError::Snapshot { .. })));
}

#[test]
fn taylor_green_run_follows_analytic_decay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_in(dir.path(), "scenario = taylor_green\nm = 4\ndt = 1e-3\nt_final = 0.2\nsnapshot_every = 50");
    let out = cmd_run(&cfg).unwrap();
    assert_eq!(out.rows, 201);
    assert_eq!(out.snapshots.len(), 5);
    let text = fs::read_to_string(&cfg.output).unwrap();
    assert_eq!(text.lines().next().unwrap(), tns_cli::CSV_HEADER);
    let rows = csv_rows(&cfg.output);
    assert_eq!(rows.len(), 201);
    let nu = 0.01;
    for w in rows.windows(2) {
        assert!(w[1][1] < w[0][1]);
    }
    for r in &rows {
        // ||u||^2 = 1/2 exp(-16 pi^2 nu t) for the unit vortex
        let exact = 0.5 * (-16.0 * PI * PI * nu * r[0]).exp();
        assert!((r[1] - exact).abs() <= 1e-6 * exact);
    }
    let (last, t) = load_snapshot_for(out.snapshots.last().unwrap(), 2).unwrap();
    assert!((t - 0.2).abs() < 1e-12);
    assert!(last.is_divergence_free());
}

#[test]
fn zero_scenario_rows_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_in(dir.path(), "scenario = zero\nm = 3\ndt = 1e-3\nt_final = 0.01");
    cmd_run(&cfg).unwrap();
    let rows = csv_rows(&cfg.output);
    assert_eq!(rows.len(), 11);
    for (i, r) in rows.iter().enumerate() {
        assert!((r[0] - i as f64 * 1e-3).abs() < 1e-15);
        assert!(r[1..].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn snapshot_restart_matches_continuous_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_in(
        dir.path(),
        "scenario = random_smooth:5:2\nm = 3\ndt = 1e-3\nt_final = 0.02\nsnapshot_every = 10\namplitude = 0.5",
    );
    let out = cmd_run(&cfg).unwrap();
    let rows = csv_rows(&cfg.output);
    let mid = &out.snapshots[1];
    let restart_dir = dir.path().join("restart");
    fs::create_dir_all(&restart_dir).unwrap();
    let cfg2 = config_in(
        &restart_dir,
        &format!(
            "scenario = zero\nm = 3\ndt = 1e-3\nt_final = 0.01\ninitial_snapshot = {}",
            mid.display()
        ),
    );
    cmd_run(&cfg2).unwrap();
    let rows2 = csv_rows(&cfg2.output);
    for (a, b) in rows[10..].iter().zip(&rows2) {
        assert!((a[1] - b[1]).abs() <= 1e-14 * a[1]);
    }
}

#[test]
fn tensor_file_and_time_factor() {
    let dir = tempfile::tempdir().unwrap();
    let tpath = dir.path().join("a.tensor");
    fs::write(&tpath, "isotropic nu=0.02\ntime 0 1\ntime 0.01 0.5\n").unwrap();
    let cfg = config_in(
        dir.path(),
        &format!("scenario = taylor_green\nm = 2\ndt = 1e-3\nt_final = 0.01\ntensor_file = {}", tpath.display()),
    );
    cmd_run(&cfg).unwrap();
    let rows = csv_rows(&cfg.output);
    // theta(t) = 1 - 50 t, so ||u||^2 = 1/2 exp(-16 pi^2 nu (t - 25 t^2))
    let r = rows.last().unwrap();
    let exact = 0.5 * (-16.0 * PI * PI * 0.02 * (0.01 - 25.0 * 1e-4)).exp();
    assert!((r[1] - exact).abs() < 1e-8 * exact);
}

#[test]
fn unstable_rk4_step_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config_in(dir.path(), "scenario = taylor_green\nm = 4\ndt = 0.01\nt_final = 0.1\ntensor = isotropic nu=1");
    let err = cmd_run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

fn tns() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tns"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let base = ["--set", &format!("output={}", d.join("o.csv").display())];

    let ok = tns()
        .args(["run", "-c"])
        .arg(fixture("taylor_green.cfg"))
        .args(base)
        .args(["--set", "t_final=0.01"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let bad = tns()
        .args(["run", "-c"])
        .arg(fixture("taylor_green.cfg"))
        .args(["--set", "dt=-1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("dt"));

    let snaps = d.join("blow");
    let blow = tns()
        .arg("run")
        .args(["--set", "scenario=random_smooth:3:0", "--set", "amplitude=1e4", "--set", "m=4"])
        .args(["--set", "dt=0.05", "--set", "t_final=5", "--set", "scheme=ifrk4"])
        .args(["--set", "tensor=isotropic nu=1e-4"])
        .args(["--set", &format!("snapshot_dir={}", snaps.display())])
        .args(base)
        .output()
        .unwrap();
    assert_eq!(blow.status.code(), Some(3), "{}", String::from_utf8_lossy(&blow.stderr));
    assert!(String::from_utf8_lossy(&blow.stderr).contains("last_good.tns"));
    let (last, _) = load_snapshot_for(&snaps.join("last_good.tns"), 2).unwrap();
    assert!(last.max_abs().is_finite());
}

#[test]
fn broken_tensor_fails_coercivity() {
    let cfg = parse_partial_config(&format!("tensor_file = {}", fixture("broken_symmetry.tensor").display()), &[]).unwrap();
    let opts = VerifyOptions {
        tensor: Some(tns_cli::commands::load_tensor(&cfg).unwrap()),
        ..Default::default()
    };
    let report = cmd_verify(Suite::Inequalities, 0, 10, &opts);
    assert!(!report.passed());
    assert!(!report.property("coercivity_lower").unwrap().passed());
    assert!(report.property("korn_factor_two").unwrap().passed());

    let out = tns()
        .args(["verify", "--suite", "inequalities", "--trials", "5", "--set"])
        .arg(format!("tensor_file={}", fixture("broken_symmetry.tensor").display()))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL  coercivity_lower"));
}

#[test]
fn zero_trials_pass_vacuously_with_warning() {
    for suite in Suite::ALL {
        let r = cmd_verify(suite, 0, 0, &VerifyOptions::default());
        assert!(r.passed());
        assert!(r.properties.iter().all(|p| p.cases == 0 && p.worst.is_none()));
        assert!(r.warnings.iter().any(|w| w.contains("vacuous")));
    }
    let out = tns().args(["verify", "--trials", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("warning"));
}

#[test]
fn seeded_suites_pass() {
    for suite in [Suite::Spectral, Suite::Calculus, Suite::Inequalities] {
        let r = cmd_verify(suite, 3, 40, &VerifyOptions::default());
        assert!(r.passed(), "{r}");
    }
    let r = cmd_verify(Suite::Solver, 3, 2, &VerifyOptions::default());
    assert!(r.passed(), "{r}");
}

#[test]
fn threshold_zero_data_and_unit_constants() {
    let cfg = parse_config_with_overrides(
        "scenario = zero\nm = 3\ndt = 1e-3\nt_final = 1\n",
        &["c_star=1".into(), "c_a=1".into(), "tensor_norm=1".into()],
    )
    .unwrap();
    let out = cmd_threshold(&cfg).unwrap();
    let r = out.base();
    assert!((r.a3 - 1.0 / (512.0 * E)).abs() < 1e-12);
    assert_eq!(r.margin, r.a3);
    assert_eq!(r.t_star_max, 1.0);
    assert!(out.passed());
    assert!(out.to_string().contains("heuristic up to C*"));
}

#[test]
fn threshold_sweep_is_nonincreasing() {
    let cfg = parse_config_with_overrides(
        "scenario = random_smooth:2:2\nm = 3\ndt = 1e-3\nt_final = 1\namplitude = 1e-3\ntensor = isotropic nu=0.5\n",
        &["sweep=8".into(), "force=random_smooth:4:2".into(), "force_amplitude=1e-3".into()],
    )
    .unwrap();
    let out = cmd_threshold(&cfg).unwrap();
    assert_eq!(out.reports.len(), 9);
    assert!(out.sweep_nonincreasing());
    let first = out.reports[0].1.t_star_max;
    let last = out.reports[8].1.t_star_max;
    assert!(last < first, "{first} {last}");
}

#[test]
fn heat_command_single_mode_closed_form() {
    let cfg = parse_config_with_overrides(
        "scenario = single_stokes_mode\nm = 2\ndt = 1e-2\nt_final = 0.1\namplitude = 2\nheat_s = 0,1\n",
        &[],
    )
    .unwrap();
    let out = cmd_heat(&cfg).unwrap();
    let k = 4.0 * PI * PI;
    let energy = 0.5 * 4.0;
    for (p, (s, defect)) in out.profiles.iter().zip(&out.identity) {
        // one mode |xi| = 1: rho^{2s} |u0|^2 (1 - e^{-2 k T}) / (2 k)
        let w = (2.0 * PI * 2f64.sqrt()).powf(2.0 * s);
        let exact = w * energy * (1.0 - (-2.0 * k * 0.1).exp()) / (2.0 * k);
        assert!((p.value - exact).abs() < 1e-13 * exact);
        assert!(*defect < 1e-12 * w * energy);
    }
}

#[test]
fn constants_command_converges() {
    let cfg = parse_partial_config("seed = 1\nc_star_trials = 5\n", &[]).unwrap();
    let out = cmd_constants(&cfg).unwrap();
    assert_eq!(out.commutator.radius, 128);
    assert!(out.commutator.relative_change < 1e-6);
    assert!(out.c_star_lower_bound > 0.0);
    assert!(cmd_constants(&parse_partial_config("commutator_sigma = 1\n", &[]).unwrap()).is_err());
}

#[test]
fn inline_tensor_spec_directives() {
    let a = parse_tensor_spec("anisotropic_demo; isotropic nu=0.001", 2).unwrap();
    let demo = tns_core::viscosity::ViscosityTensor::anisotropic_demo(2);
    let (x, y) = (a.entry(0, 1, 1, 0).mean(), demo.entry(0, 1, 1, 0).mean());
    assert!((x - y - 0.001).abs() < 1e-15);
    assert!(a.validate(2000, 0).is_ok());
}
