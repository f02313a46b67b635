use std::path::Path;
use std::process::{Command, Output};

use longitude_lab::experiment::RunReport;

fn longlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_longlab"))
        .args(args)
        .output()
        .expect("failed to spawn longlab")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn svg_count(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count()
}

#[test]
fn run_writes_report_csv_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "kind = shrink-chain, bernstein-audit\nseed = 4\n");
    let out = tmp.path().join("out");
    let result = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("PASS shrink-chain/ratio"));
    assert!(!stdout.contains("FAIL"));

    let report = RunReport::from_json(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.seed, 4);
    let csv = RunReport::records_from_csv(&std::fs::read_to_string(out.join("report.csv")).unwrap()).unwrap();
    assert_eq!(csv.len(), report.records.len());
    assert!(svg_count(&out) >= 1);
}

#[test]
fn plot_regenerates_svgs_from_a_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "kind = shrink-chain\n");
    let out = tmp.path().join("out");
    assert_eq!(longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let before = svg_count(&out);
    for entry in std::fs::read_dir(&out).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|x| x == "svg") {
            std::fs::remove_file(p).unwrap();
        }
    }
    let result = longlab(&["plot", "--report", out.join("report.json").to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0));
    assert_eq!(svg_count(&out), before);
    let svg = std::fs::read_to_string(std::fs::read_dir(&out).unwrap().find_map(|e| {
        let p = e.unwrap().path();
        p.extension().is_some_and(|x| x == "svg").then_some(p)
    }).unwrap())
    .unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn seed_flag_overrides_config_and_same_seed_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "kind = appendix-geodesics, hessians\nseed = 1\nappendix.samples = 500\nhessians.samples = 20\nhessians.cap_samples = 10\n",
    );
    let run = |name: &str, seed: &str| {
        let out = tmp.path().join(name);
        let r = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed]);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
        std::fs::read(out.join("report.json")).unwrap()
    };
    let a = run("a", "99");
    let b = run("b", "99");
    let c = run("c", "100");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let report = RunReport::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(report.seed, 99);
}

#[test]
fn failing_check_exits_one_and_tolerance_scale_can_loosen_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "kind = shrink-chain\nshrink.expected_ratio = 0.0635\n");
    let out = tmp.path().join("out");
    let strict = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8(strict.stdout).unwrap().contains("FAIL shrink-chain/ratio"));
    assert!(out.join("report.json").exists());

    let loose = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--tolerance-scale", "10"]);
    assert_eq!(loose.status.code(), Some(0));
    let report = RunReport::from_json(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.tolerance_scale, 10.0);
}

#[test]
fn bad_input_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "kind = shrink-chain\nshrink.nonsense = 3\n");
    let r = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8(r.stderr).unwrap().contains("nonsense"));

    let cfg = write_config(tmp.path(), "kind = shrink-chain\n");
    let r = longlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--tolerance-scale", "-1"]);
    assert_eq!(r.status.code(), Some(2));

    let missing = tmp.path().join("missing.cfg");
    assert_eq!(longlab(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
    let garbage = tmp.path().join("garbage.json");
    std::fs::write(&garbage, "not json").unwrap();
    assert_eq!(longlab(&["plot", "--report", garbage.to_str().unwrap()]).status.code(), Some(2));
}
