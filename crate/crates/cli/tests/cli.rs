//! End-to-end tests of the `shearfront` binary: exit codes, artifact
//! contents, configuration handling, and rerun determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shearfront"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parse a CSV artifact into (header, numeric rows); `nodal_ok`-style
/// boolean columns are mapped to 1.0 / 0.0 so every cell is a number.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| match cell {
                    "true" => 1.0,
                    "false" => 0.0,
                    num => num.parse::<f64>().unwrap_or_else(|_| panic!("bad cell {num:?}")),
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k]).collect()
}

// ---- exit codes -----------------------------------------------------------

#[test]
fn material_check_demands_a_named_material() {
    let out = run(&["material", "check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("w1"));
}

#[test]
fn material_check_passes_the_reference_material() {
    let dir = scratch("mat-pass");
    let out = run(&["material", "check", "--w1", "1", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report = fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"all_passed\": true"));
    assert!(report.contains("\"config_hash\""));
}

#[test]
fn material_check_names_the_ellipticity_failure() {
    let dir = scratch("mat-fail");
    let out = run(&["material", "check", "--w1", "0", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ellipticity"), "stderr: {}", stderr(&out));
    let report = fs::read_to_string(dir.join("report.json")).unwrap();
    assert!(report.contains("\"all_passed\": false"));
    assert!(report.contains("ellipticity_enhanced"));
}

#[test]
fn unknown_flags_and_subcommands_are_usage_errors() {
    assert_eq!(run(&["material", "check", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

// ---- configuration ----------------------------------------------------------

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = scratch("cfg-unknown");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "[model]\nbogus = 1\n").unwrap();
    let out = run(&["conjugate", "table", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("model.bogus"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = run(&["conjugate", "table", "--config", "/nonexistent/run.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file_values() {
    let dir = scratch("cfg-override");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "[front]\nepsilon = 0.35\n\n[numeric]\nn_y = 17\n").unwrap();
    let out = run(&[
        "front", "solve",
        "--config", cfg.to_str().unwrap(),
        "--epsilon", "0.2",
        "--n-y", "33",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let meta = fs::read_to_string(dir.join("meta.json")).unwrap();
    assert!(meta.contains("\"epsilon\": 2.0000000000000001e-1"), "flag epsilon wins");
    assert!(meta.contains("\"n_y\": 33"), "flag n_y wins");
}

// ---- conjugate table ---------------------------------------------------------

#[test]
fn conjugate_table_ranks_the_oracle_triple() {
    let dir = scratch("conj-triple");
    let out = run(&[
        "conjugate", "table",
        "--lambda", "0.25,1,4",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let (header, rows) = read_csv(&dir.join("conjugate.csv"));
    assert_eq!(
        header,
        ["lambda", "c1", "U_plus_at_0", "Vmax", "S_plus", "phi_dot_end", "sigma0"]
    );
    assert_eq!(rows.len(), 3);
    let s_plus = column(&header, &rows, "S_plus");
    assert!(s_plus[0] > s_plus[1] && s_plus[1] > s_plus[2], "flow force strictly decreasing: {s_plus:?}");
    assert!(column(&header, &rows, "sigma0").iter().all(|&s| s < 0.0));
    assert!(column(&header, &rows, "phi_dot_end").iter().all(|&p| p > 0.0));
    assert!(rows.iter().flatten().all(|x| x.is_finite()));
}

#[test]
fn empty_load_list_writes_a_bare_header() {
    let dir = scratch("conj-empty");
    let out = run(&["conjugate", "table", "--lambda", "", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.join("conjugate.csv")).unwrap();
    assert_eq!(text, "lambda,c1,U_plus_at_0,Vmax,S_plus,phi_dot_end,sigma0\n");
}

#[test]
fn nonpositive_loads_are_domain_failures_with_json_errors() {
    let dir = scratch("conj-bad");
    let out = run(&["conjugate", "table", "--lambda", "-1", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("{\"error\""), "machine-readable error: {err}");
    assert!(err.contains("\"kind\": \"domain\""));
}

// ---- period map and spectrum ----------------------------------------------------

#[test]
fn period_map_rows_increase_with_the_level() {
    let dir = scratch("pm");
    let out = run(&[
        "period-map",
        "--lambda", "1",
        "--c", "1e-4,1e-2,1",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let (header, rows) = read_csv(&dir.join("period_map.csv"));
    let p = column(&header, &rows, "period");
    assert!(p[0] < p[1] && p[1] < p[2], "monotone in c: {p:?}");
    // The sidecar's small-amplitude limit anchors the c -> 0 end.
    let meta = fs::read_to_string(dir.join("period_map.meta.json")).unwrap();
    let limit = std::f64::consts::PI / 2f64.sqrt();
    assert!(meta.contains("\"small_amplitude_limit\""));
    assert!((p[0] - limit).abs() < 1e-3, "P(1e-4) ~ pi/sqrt(2), got {}", p[0]);
}

#[test]
fn spectrum_tracks_the_quadratic_eigenvalue_law() {
    let dir = scratch("spec");
    let out = run(&[
        "spectrum",
        "--eps", "0.0,0.1",
        "--nodes", "257",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let (header, rows) = read_csv(&dir.join("spectrum.csv"));
    assert_eq!(header, ["eps", "lambda", "sigma0"]);
    let sigma0 = column(&header, &rows, "sigma0");
    assert!(sigma0[0].abs() < 1e-3, "trivial state near zero: {}", sigma0[0]);
    assert!((sigma0[1] / 0.01 + 2.0).abs() < 0.1, "sigma0 ~ -2 eps^2: {}", sigma0[1]);
}

// ---- front solve -----------------------------------------------------------------

#[test]
fn front_solve_writes_a_certified_field() {
    let dir = scratch("front");
    let out = run(&[
        "front", "solve",
        "--epsilon", "0.2",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let meta = fs::read_to_string(dir.join("meta.json")).unwrap();
    assert!(meta.contains("\"nodal_ok\": true"));
    assert!(meta.contains("\"max_principle_ok\": true"));
    assert!(meta.contains("\"config_hash\""));

    let (header, rows) = read_csv(&dir.join("u.csv"));
    assert_eq!(header, ["x", "y", "u"]);
    // 2D front, odd in x: positive ahead of the interface, zero walls.
    let us = column(&header, &rows, "u");
    let xs = column(&header, &rows, "x");
    let n = rows.len();
    assert!(us.iter().zip(&xs).all(|(&u, &x)| u == 0.0 || (u > 0.0) == (x > 0.0)));
    let max_u = us.iter().fold(0f64, |a, &b| a.max(b.abs()));
    assert!(max_u > 0.1 && max_u < 0.3, "amplitude ~ a1 eps: {max_u}");
    assert!(n > 1000, "full grid dumped, got {n} rows");
}

// ---- branch continue ----------------------------------------------------------------

#[test]
fn branch_continue_traces_and_logs_the_run() {
    let dir = scratch("branch");
    let out = run(&[
        "branch", "continue",
        "--epsilon", "0.2",
        "--n-y", "33",
        "--ds", "0.05",
        "--steps", "3",
        "--out-dir", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let (header, rows) = read_csv(&dir.join("branch.csv"));
    assert_eq!(
        header,
        ["s", "lambda", "max_u", "max_uy", "sigma0", "S_plus", "N_proxy", "nodal_ok"]
    );
    assert_eq!(rows.len(), 4, "start plus three accepted steps");
    let lambda = column(&header, &rows, "lambda");
    assert!(lambda.iter().all(|&l| l > 0.0), "loads stay positive: {lambda:?}");
    assert!(lambda.windows(2).all(|w| w[0] < w[1]), "loads climb from onset: {lambda:?}");
    assert!(column(&header, &rows, "nodal_ok").iter().all(|&ok| ok == 1.0));
    assert!(column(&header, &rows, "sigma0").iter().all(|&s| s < 0.0));

    let summary = fs::read_to_string(dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"tag\""));
    assert!(summary.contains("\"points_accepted\": 4"));
}

// ---- determinism -----------------------------------------------------------------------

#[test]
fn reruns_reproduce_artifacts_byte_for_byte() {
    let cfg_dir = scratch("det-cfg");
    let cfg = cfg_dir.join("run.cfg");
    fs::write(&cfg, "[model]\nfamily = linear\nw1 = 1.0\n\n[conjugate]\nlambda = 0.5, 2\n").unwrap();

    let mut artifacts: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for name in ["det-a", "det-b"] {
        let dir = scratch(name);
        let out = run(&[
            "conjugate", "table",
            "--config", cfg.to_str().unwrap(),
            "--out-dir", dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        artifacts.push(files);
    }
    assert_eq!(artifacts[0].len(), 2, "table plus sidecar");
    assert_eq!(artifacts[0], artifacts[1], "same config, same bytes");
}

#[test]
fn spelled_out_defaults_share_the_hash_with_implicit_ones() {
    let dir_a = scratch("hash-a");
    let dir_b = scratch("hash-b");
    let cfg = dir_a.join("run.cfg");
    fs::write(&cfg, "[numeric]\nnodes = 513\n").unwrap();
    let out_a = run(&["spectrum", "--eps", "0.1", "--out-dir", dir_a.to_str().unwrap(),
        "--config", cfg.to_str().unwrap()]);
    let out_b = run(&["spectrum", "--eps", "0.1", "--out-dir", dir_b.to_str().unwrap()]);
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_b.status.code(), Some(0));
    let meta_a = fs::read(dir_a.join("spectrum.meta.json")).unwrap();
    let meta_b = fs::read(dir_b.join("spectrum.meta.json")).unwrap();
    assert_eq!(meta_a, meta_b);
}

// ---- stdout reporting --------------------------------------------------------------------

#[test]
fn commands_narrate_their_artifacts() {
    let dir = scratch("narrate");
    let out = run(&["conjugate", "table", "--lambda", "1", "--out-dir", dir.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("wrote conjugate.csv (1 rows)"));
    assert!(text.contains("wrote conjugate.meta.json"));
}
