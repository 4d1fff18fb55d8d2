use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stochmatch"))
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn gen_is_deterministic() {
    let out = tempfile::tempdir().unwrap();
    let a = out.path().join("a.json");
    let b = out.path().join("b.json");
    for path in [&a, &b] {
        let status = bin()
            .args(["gen", "random-qc", "--left", "3", "--right", "3", "--edges", "5"])
            .args(["--seed", "7", "--out", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pipeline_same_seed_same_bytes() {
    let out = tempfile::tempdir().unwrap();
    let instance = out.path().join("inst.json");
    assert!(bin()
        .args(["gen", "random-qc", "--left", "3", "--right", "3", "--edges", "5"])
        .args(["--seed", "11", "--out", instance.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let d1 = out.path().join("run1");
    let d2 = out.path().join("run2");
    for dir in [&d1, &d2] {
        let status = bin()
            .args(["pipeline", instance.to_str().unwrap()])
            .args(["--seed", "5", "--trials", "2000", "--out", dir.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["solution.json", "decomposition.json", "results.csv", "verify.json"] {
        assert_eq!(read(&d1, name), read(&d2, name), "{name} differs between runs");
    }
}

#[test]
fn unreadable_instance_is_a_usage_error() {
    let status = bin().args(["solve", "/nonexistent/file.json"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn cap_exceeded_exit_code() {
    let out = tempfile::tempdir().unwrap();
    let instance = out.path().join("inst.json");
    assert!(bin()
        .args(["gen", "random-qc", "--left", "1", "--right", "4", "--edges", "4"])
        .args(["--seed", "3", "--out", instance.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let status = bin()
        .args(["solve", instance.to_str().unwrap(), "--cap-degree", "2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn certain_edge_triggers_scaling_notice() {
    let out = tempfile::tempdir().unwrap();
    let instance = out.path().join("certain.json");
    std::fs::write(
        &instance,
        r#"{"model":"qc","left":["a"],"right":["b"],
            "edges":[{"id":"e","a":"a","b":"b","p":"1","w":"1"}]}"#,
    )
    .unwrap();
    let output = bin().args(["solve", instance.to_str().unwrap()]).output().unwrap();
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("gamma"), "stderr: {stderr}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("999999/1000000"), "stdout: {stdout}");
}

#[test]
fn compare_rejects_poi_instances() {
    let out = tempfile::tempdir().unwrap();
    let instance = out.path().join("poi.json");
    assert!(bin()
        .args(["gen", "random-poi", "--left", "2", "--right", "2", "--edges", "2"])
        .args(["--seed", "3", "--out", instance.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let status = bin().args(["compare", instance.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
