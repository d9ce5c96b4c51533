use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rodfiter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rodfiter")).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let mut all = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let out = rodfiter(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(path).unwrap()
}

#[test]
fn reconstruct_writes_schema_and_window_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let text = run_to(dir.path(), "r.csv", &["reconstruct", "--horizon-s", "0.16"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t_s,method,iteration,window,error_rad"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 7 * 20);
    assert!(rows.iter().all(|r| r.len() == 5 && r[1] == "rodfiter"));
    assert!(!text.contains('\r'));

    let windows = fs::read_to_string(dir.path().join("r.csv.windows.csv")).unwrap();
    let mut wl = windows.lines();
    assert!(wl.next().unwrap().starts_with("method,window,t_start_s,t_end_s,precondition,precondition_exceeded"));
    assert_eq!(wl.count(), 2);
}

#[test]
fn identical_specs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "noise-run", "--samples", "5", "--horizon-s", "0.4", "--bias-deg-h", "5e-3,-3e-3,4e-3", "--arw-deg-sqrt-h", "0.002", "--seed", "9",
    ];
    let a = run_to(dir.path(), "a.csv", &args);
    let b = run_to(dir.path(), "b.csv", &args);
    assert_eq!(a, b);
    assert!(a.contains(",bound-rodfiter,"));
    assert!(a.contains(",mainstream,0,"));
}

#[test]
fn compare_emits_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let text = run_to(dir.path(), "c.csv", &["compare", "--horizon-s", "0.16"]);
    for m in ["rodfiter", "rotfiter-t3", "rotfiter-t2", "mainstream"] {
        assert!(text.contains(&format!(",{m},")), "{m}");
    }
}

#[test]
fn sweep_schema() {
    let out = rodfiter(&["sweep-convergence", "--rate-hz", "100"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,sup_omega_practical,sup_omega_theoretical");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("2,"));
    assert!(lines[1].ends_with(",100"));
}

#[test]
fn flagged_windows_are_kept() {
    let out = rodfiter(&["reconstruct", "--coning-freq-pi", "100", "--horizon-s", "0.16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 7 * 20);
    assert!(String::from_utf8_lossy(&out.stderr).contains("convergence not guaranteed"));
}

#[test]
fn exit_codes() {
    let cases: [(&[&str], i32); 6] = [
        (&["reconstruct", "--samples", "1"], 2),
        (&["reconstruct", "--alpha-deg", "120"], 2),
        (&["reconstruct", "--bias-deg-h", "1,2"], 2),
        (&["reconstruct", "--method", "mainstream"], 2),
        (&["reconstruct", "--horizon-s", "0.01"], 2),
        (&["reconstruct", "--coning-freq-pi", "34", "--iterations", "14", "--horizon-s", "0.08"], 3),
    ];
    for (args, code) in cases {
        let out = rodfiter(args);
        assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let ok = rodfiter(&["reconstruct", "--samples", "2", "--method", "mainstream", "--horizon-s", "0.04"]);
    assert_eq!(ok.status.code(), Some(0));
}
