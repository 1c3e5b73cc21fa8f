use std::path::Path;
use std::process::Command;

const FILE: &str = r#"{
  "version": 1,
  "units": { "hbar": 1.0, "mass": 1.0 },
  "method": "tt",
  "omega0": 1.0,
  "omegaf": 0.25,
  "t_f": 1.0,
  "grid": { "n_points": 512 },
  "propagation": { "n_steps": 2000, "observers": 21, "n_max": 4 },
  "initial_states": [0, 1, 3]
}"#;

fn sta(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sta")).args(args).env("STA_THREADS", threads).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn bytes_of_csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn reruns_produce_identical_csv_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "p.json", FILE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let first = sta(&["propagate", "--input", &input, "--out-dir", a.to_str().unwrap(), "--quiet"], "1");
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(first.stdout.is_empty());
    let second = sta(&["propagate", "--input", &input, "--out-dir", b.to_str().unwrap()], "3");
    assert!(second.status.success());
    assert!(!second.stdout.is_empty());
    let (ca, cb) = (bytes_of_csvs(&a), bytes_of_csvs(&b));
    assert_eq!(ca.len(), 3);
    assert_eq!(ca, cb);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();

    let good = write(tmp.path(), "good.json", FILE);
    let bad = write(tmp.path(), "bad.json", &FILE.replace("\"omega0\": 1.0", "\"omega0\": -1.0"));
    let typo = write(tmp.path(), "typo.json", &FILE.replace("\"grid\"", "\"grd\""));
    let narrow = write(tmp.path(), "narrow.json", &FILE.replace("\"n_points\": 512", "\"x_max\": 3.0, \"n_points\": 512"));

    assert_eq!(sta(&["raman", "--input", &good, "--out-dir", out], "1").status.code(), Some(3));
    assert_eq!(sta(&["propagate", "--input", &bad, "--out-dir", out], "1").status.code(), Some(1));
    let r = sta(&["propagate", "--input", &typo, "--out-dir", out], "1");
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("line"));
    assert_eq!(sta(&["propagate", "--input", &narrow, "--out-dir", out], "1").status.code(), Some(2));
    assert_eq!(sta(&["design", "--input", &good, "--out-dir", out], "1").status.code(), Some(1));
    assert_eq!(sta(&["compare", "--input", &good, "--out-dir", out, "--methods", "tt"], "1").status.code(), Some(1));
    assert_eq!(sta(&["propagate", "--input", &good, "--out-dir", out], "zero").status.code(), Some(1));
    let missing = tmp.path().join("nope.json");
    assert_eq!(sta(&["propagate", "--input", missing.to_str().unwrap(), "--out-dir", out], "1").status.code(), Some(1));
}

#[test]
fn compare_through_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "p.json", FILE);
    let out = tmp.path().join("cmp");
    let r = sta(&["compare", "--input", &input, "--out-dir", out.to_str().unwrap(), "--methods", "tt,tt-bare,plain", "--quiet"], "2");
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("compare.json")).unwrap()).unwrap();
    assert_eq!(json["methods"].as_array().unwrap().len(), 3);
}

#[test]
fn shipped_protocol_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/protocols/expansion.json");
    for cmd in ["design", "raman"] {
        let r = sta(&[cmd, "--input", input, "--out-dir", tmp.path().to_str().unwrap(), "--quiet"], "1");
        assert!(r.status.success(), "{cmd}: {}", String::from_utf8_lossy(&r.stderr));
    }
}
