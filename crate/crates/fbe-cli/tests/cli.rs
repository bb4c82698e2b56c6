use std::path::PathBuf;
use std::process::{Command, Output};

fn fbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbe"))
        .args(args)
        .env_remove("FBE_CACHE_DIR")
        .output()
        .expect("run fbe")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fbe-cli-{}-{name}", std::process::id()))
}

#[test]
fn sigma_prepends_a_digit() {
    let o = fbe(&["code", "sigma", "-1", "(2)*"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-1.(2)*");
    let o = fbe(&["code", "sigma", "1", "-1.(2)*"]);
    assert_eq!(stdout(&o).trim(), "(2)*");
}

#[test]
fn metric_and_coding_map() {
    let o = fbe(&["code", "metric", "(1)*", "1.(2)*"]);
    assert_eq!(stdout(&o).trim(), "2^-2");
    let o = fbe(&["code", "pi", "--ifs", "interval", "-1.(2)*"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-9);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(fbe(&["code", "sigma", "-1", "(2"]).status.code(), Some(2));
    assert_eq!(fbe(&["verify", "--ifs", "no-such-system"]).status.code(), Some(2));
    assert_eq!(fbe(&["frobnicate"]).status.code(), Some(2));
    let spec = scratch("bad.json");
    std::fs::write(&spec, "{\"space\": \"R1\",\n \"maps\": [}").unwrap();
    let o = fbe(&["attractor", "--ifs", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    std::fs::remove_file(spec).unwrap();
}

#[test]
fn manifold_distance_of_the_branch_pair() {
    let o = fbe(&[
        "manifold",
        "dist",
        "--ifs",
        "interval",
        "--a",
        "-1:0.75",
        "--b",
        "-2.-1:0.625",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["d_L"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(v["d_X"].as_f64().unwrap(), 0.0);
    let o = fbe(&["manifold", "dist", "--ifs", "interval", "--a", "-1:0.25", "--b", ":0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fastbasin_writes_a_pgm() {
    let out = scratch("cantor.pgm");
    let o = fbe(&[
        "fastbasin",
        "--ifs",
        "cantor",
        "--region",
        "-3,3",
        "--grid",
        "600",
        "--depth",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&out).unwrap();
    let header = b"P5\n600 1\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 600);
    std::fs::remove_file(out).unwrap();
}

#[test]
fn output_does_not_depend_on_threads() {
    let run = |t: &str| {
        stdout(&fbe(&[
            "--threads",
            t,
            "fastbasin",
            "--ifs",
            "interval",
            "--region",
            "-4,5",
            "--grid",
            "512",
            "--depth",
            "3",
        ]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn verify_passes_on_the_interval_spec() {
    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/interval.json");
    let o = fbe(&["verify", "--ifs", spec, "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["checks"].as_array().unwrap().len() >= 9);
}

#[test]
fn attractor_output_reloads_as_a_cache() {
    let out = scratch("interval.cloud");
    let o = fbe(&[
        "attractor",
        "--ifs",
        "interval",
        "--cell",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("FBE-CLOUD v1 "));
    assert!(text.lines().count() > 50);
    std::fs::remove_file(out).unwrap();
}
