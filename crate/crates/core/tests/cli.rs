//! End-to-end tests of the command-line interface: configuration layering,
//! sweep outputs, the rate-fit pipeline and exit codes.

use std::ffi::OsStr;
use std::path::Path;
use std::process::Output;

fn blowup<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    std::process::Command::new(env!("CARGO_BIN_EXE_blowup"))
        .args(args)
        .output()
        .expect("spawn blowup")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed (exit {:?}):\n{}{}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

/// The configuration dump precedes the subcommand output and ends with the
/// output-directory line.
fn dump_prefix(stdout: &str) -> String {
    let mut prefix = String::new();
    for line in stdout.lines() {
        prefix.push_str(line);
        prefix.push('\n');
        if line.starts_with("dir = ") {
            return prefix;
        }
    }
    panic!("no configuration dump in output:\n{stdout}");
}

#[test]
fn constants_reports_the_dimension_ten_ratio() {
    let out = stdout_of(&blowup(["constants", "--n", "10"]));
    assert!(out.contains("weyl_ratio"), "missing ratio line:\n{out}");
    assert!(out.contains("5/567"), "missing ratio label:\n{out}");
    assert!(out.contains("sobolev_mass"), "missing mass line:\n{out}");
}

#[test]
fn constants_json_is_machine_readable() {
    let out = stdout_of(&blowup([
        "constants", "--kind", "product", "--n", "6", "--r", "0.9", "--json",
    ]));
    let value: serde_json::Value = serde_json::from_str(&out).expect("valid JSON");
    let factor = value["coupling_correction_factor"]
        .as_f64()
        .expect("bracket factor present");
    assert!(
        (factor - 0.5).abs() < 1e-12,
        "dimension-6 bracket factor should collapse to one half, got {factor}"
    );
    assert!(value["interaction_coefficient"].as_f64().unwrap() > 0.0);
}

#[test]
fn spectrum_flags_the_degenerate_product_radius() {
    let out = stdout_of(&blowup([
        "spectrum", "--kind", "product", "--n", "6", "--r", "0.5",
    ]));
    assert!(
        out.contains("verdict: degenerate (i=1)"),
        "radius 1/sqrt(n-2) must be flagged via the circle mode:\n{out}"
    );
}

#[test]
fn spectrum_clears_a_nondegenerate_radius() {
    let out = stdout_of(&blowup([
        "spectrum", "--kind", "product", "--n", "6", "--r", "0.7",
    ]));
    assert!(
        out.contains("verdict: nondegenerate"),
        "radius 0.7 sits between the degenerate radii:\n{out}"
    );
}

#[test]
fn dump_config_round_trips_through_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let first = stdout_of(&blowup([
        "--dump-config",
        "constants",
        "--kind",
        "product",
        "--n",
        "7",
        "--r",
        "0.9",
        "--t-grid",
        "0.5,1",
        "--regime",
        "geometric39",
    ]));
    let dump = dump_prefix(&first);
    let path = dir.path().join("run.conf");
    std::fs::write(&path, &dump).expect("write config");
    let second = stdout_of(&blowup([
        OsStr::new("--config"),
        path.as_os_str(),
        OsStr::new("--dump-config"),
        OsStr::new("constants"),
    ]));
    assert_eq!(
        dump,
        dump_prefix(&second),
        "feeding the dump back through --config must reproduce it"
    );
}

#[test]
fn energy_sweep_writes_a_deterministic_csv() {
    let run = |dir: &Path| {
        stdout_of(&blowup([
            OsStr::new("energy"),
            OsStr::new("--kind"),
            OsStr::new("product"),
            OsStr::new("--n"),
            OsStr::new("5"),
            OsStr::new("--r"),
            OsStr::new("0.7"),
            OsStr::new("--t-grid"),
            OsStr::new("1"),
            OsStr::new("--epsilon-grid"),
            OsStr::new("1e-3,1e-2"),
            OsStr::new("--out-dir"),
            dir.as_os_str(),
        ]));
        std::fs::read(dir.join("energy.csv")).expect("energy.csv written")
    };
    let dir_a = tempfile::tempdir().expect("tempdir");
    let dir_b = tempfile::tempdir().expect("tempdir");
    let bytes = run(dir_a.path());
    let text = String::from_utf8(bytes.clone()).expect("utf-8 csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon,t,value,error_estimate");
    assert_eq!(lines.len(), 3, "header plus one row per epsilon:\n{text}");
    assert_eq!(bytes, run(dir_b.path()), "identical runs must agree byte-for-byte");
}

#[test]
fn shim_rates_pipeline_gates_on_the_slope() {
    let dir = tempfile::tempdir().expect("tempdir");
    stdout_of(&blowup([
        OsStr::new("residual"),
        OsStr::new("--kind"),
        OsStr::new("product"),
        OsStr::new("--n"),
        OsStr::new("5"),
        OsStr::new("--r"),
        OsStr::new("0.7"),
        OsStr::new("--route"),
        OsStr::new("shim"),
        OsStr::new("--t-grid"),
        OsStr::new("1"),
        OsStr::new("--epsilon-grid"),
        OsStr::new("default"),
        OsStr::new("--out-dir"),
        dir.path().as_os_str(),
    ]));
    let sweep = dir.path().join("residual.csv");
    let gated = stdout_of(&blowup([
        OsStr::new("rates"),
        OsStr::new("--input"),
        sweep.as_os_str(),
        OsStr::new("--model"),
        OsStr::new("power"),
        OsStr::new("--target"),
        OsStr::new("1"),
        OsStr::new("--tolerance"),
        OsStr::new("0.05"),
        OsStr::new("--out-dir"),
        dir.path().as_os_str(),
    ]));
    assert!(gated.contains("slope within"), "gate should pass:\n{gated}");
    let failed = blowup([
        OsStr::new("rates"),
        OsStr::new("--input"),
        sweep.as_os_str(),
        OsStr::new("--target"),
        OsStr::new("2"),
        OsStr::new("--tolerance"),
        OsStr::new("0.05"),
        OsStr::new("--out-dir"),
        dir.path().as_os_str(),
    ]);
    assert_eq!(
        failed.status.code(),
        Some(3),
        "a violated slope gate must exit with the tolerance code"
    );
}

#[test]
fn usage_errors_exit_with_code_two() {
    let bad_kind = blowup(["constants", "--kind", "torus"]);
    assert_eq!(bad_kind.status.code(), Some(2));
    let missing_input = blowup(["rates", "--input", "/nonexistent/sweep.csv"]);
    assert_eq!(missing_input.status.code(), Some(2));
}

#[test]
fn out_dir_environment_variable_is_the_default_sink() {
    let dir = tempfile::tempdir().expect("tempdir");
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_blowup"))
        .args(["expand", "--n", "4", "--t-grid", "1", "--epsilon-grid", "1e-3"])
        .env("BLOWUP_OUT_DIR", dir.path())
        .output()
        .expect("spawn blowup");
    stdout_of(&output);
    assert!(
        dir.path().join("expand.csv").exists(),
        "expand.csv should land in $BLOWUP_OUT_DIR"
    );
}

#[test]
fn reduce_certifies_an_interior_minimum_from_a_centers_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    // Background dips at the middle row; coupling and curvature match the
    // geometric product so only u0 varies across centers.
    let centers = "coordinate,u0,h,scal,weyl2\n\
                   0,1.30,2.25,12,0\n\
                   1,1.10,2.25,12,0\n\
                   2,0.90,2.25,12,0\n\
                   3,1.15,2.25,12,0\n\
                   4,1.35,2.25,12,0\n";
    let path = dir.path().join("centers.csv");
    std::fs::write(&path, centers).expect("write centers");
    let out = stdout_of(&blowup([
        OsStr::new("reduce"),
        OsStr::new("--kind"),
        OsStr::new("product"),
        OsStr::new("--n"),
        OsStr::new("5"),
        OsStr::new("--r"),
        OsStr::new("0.7"),
        OsStr::new("--centers"),
        path.as_os_str(),
        OsStr::new("--out-dir"),
        dir.path().as_os_str(),
    ]));
    assert!(
        out.contains("blow-up point: index 2"),
        "the background minimum should be certified:\n{out}"
    );
    assert!(
        out.contains("strict local minimum: true"),
        "interior dip has strictly larger neighbors:\n{out}"
    );
    assert!(out.contains("t_star closed ="), "constant-data landscape:\n{out}");
}
