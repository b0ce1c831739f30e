use std::path::PathBuf;
use std::process::{Command, Output};

fn veering(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veering")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture_file(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("veering-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn matrix_of_the_loop() {
    let o = veering(&["matrix", "--fixture", "torus", "--word", "c,b,c,a"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "[[1,2,0],[2,5,0],[2,6,1]]");
}

#[test]
fn flow_is_deterministic() {
    let args = ["flow", "--fixture", "torus", "--returns", "3", "--seed", "7"];
    let (a, b) = (veering(&args), veering(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 4);
    assert!(stdout(&a).starts_with("event_index\troof\tflipped_labels\tsymbol_key\n"));
}

#[test]
fn torus_volume_reports_the_closed_form() {
    let o = veering(&["torus-volume", "--quad-tol", "1e-10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("I1 0.582240526465"), "{text}");
    assert!(text.contains("I2 0.240226506959"), "{text}");
    assert!(text.contains("volume 1.644934066848"), "{text}");
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(veering(&["flow", "--fixture", "torus", "--returns", "3"]).status.code(), Some(2));
    assert_eq!(veering(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(veering(&["matrix", "--fixture", "torus", "--word", "a"]).status.code(), Some(1));
    let o = veering(&["validate", "--input", "/nonexistent/file.tri"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bundled_files_validate() {
    for f in ["torus.tri", "pillowcase.tri"] {
        let o = veering(&["validate", "--input", &fixture_file(f)]);
        assert!(o.status.success(), "{f}");
        assert!(stdout(&o).contains("veering true"));
    }
}

#[test]
fn csv_output_embeds_config() {
    let path = temp("returns.csv");
    let p = path.display().to_string();
    let o = veering(&["flow", "--fixture", "torus", "--returns", "5", "--seed", "1", "--out", &p]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let config = lines.next().unwrap().strip_prefix("# config: ").unwrap();
    let v: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(v["command"], "flow");
    assert_eq!(v["params"]["flow"]["seed"], 1);
    assert_eq!(lines.next(), Some("event_index,roof,flipped_labels,symbol_key"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn json_output_for_tails() {
    let path = temp("tails.json");
    let p = path.display().to_string();
    let o = veering(&[
        "tails", "--fixture", "torus", "--runs", "2", "--returns", "5000", "--seed", "3", "--threads", "2", "--out", &p,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["result"]["h_hat"].as_f64().unwrap() > 0.0);
    assert_eq!(v["result"]["n"], 10_000);
    assert_eq!(v["config"]["params"]["tails"]["runs"], 2);
}

#[test]
fn flip_then_flip_back() {
    let once = veering(&["flip", "--fixture", "torus", "--edge", "c", "--colour", "B"]);
    assert!(once.status.success());
    let path = temp("flipped.tri");
    std::fs::write(&path, &once.stdout).unwrap();
    let p = path.display().to_string();
    let back = veering(&["flip", "--input", &p, "--edge", "c", "--backward", "--colour", "R"]);
    assert!(back.status.success(), "{}", String::from_utf8_lossy(&back.stderr));
    let text = stdout(&back);
    assert!(text.contains("colours a=B b=R c=R"), "{text}");
}

#[test]
fn kerckhoff_csv_schema() {
    let path = temp("kerckhoff.csv");
    let p = path.display().to_string();
    let o = veering(&["kerckhoff", "--fixture", "torus", "--edge", "a", "--samples", "500", "--seed", "2", "--out", &p]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().nth(1), Some("M,r,fraction,n"));
    assert_eq!(text.lines().count(), 5);
}
