use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnus-bound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coeffs_table_golden() {
    let o = bin(&["--format", "csv", "coeffs", "10", "recursion"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
n,exact,decimal,method
1,1,1.00000000×10⁰,recursion
2,1/4,2.50000000×10⁻¹,recursion
3,5/72,6.94444444×10⁻²,recursion
4,11/576,1.90972222×10⁻²,recursion
5,479/86400,5.54398148×10⁻³,recursion
6,1769/1036800,1.70621142×10⁻³,recursion
7,34091/60963840,5.59200339×10⁻⁴,recursion
8,943633/4877107200,1.93482112×10⁻⁴,recursion
9,92107357/1316818944000,6.99468651×10⁻⁵,recursion
10,688988827/26336378880000,2.61611070×10⁻⁵,recursion
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["verify", "coefficients"]).status.code(), Some(0));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(bin(&["coeffs", "0"]).status.code(), Some(2));
    assert_eq!(bin(&["trees", "13"]).status.code(), Some(2));
    assert_eq!(
        bin(&["simulate", "/nonexistent.cfg"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bin(&["--format", "yaml", "coeffs", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("magnus-bound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trees.json");
    let o = bin(&[
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
        "trees",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["trees"].as_array().unwrap().len(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_bundled_configs() {
    let o = bin(&["--format", "json", "simulate", &config("example.cfg")]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["status"], "pass");
    assert_eq!(v["report"]["per_term"].as_array().unwrap().len(), 4);
    assert!((v["report"]["x"].as_f64().unwrap() - 0.3).abs() < 1e-9);

    let o = bin(&["--format", "json", "simulate", &config("constant.cfg")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in v["report"]["per_term"].as_array().unwrap().iter().skip(1) {
        assert!(row["measured"].as_f64().unwrap() < 1e-10);
    }

    let o = bin(&["--format", "csv", "simulate", &config("beyond_radius.cfg")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("term,")).count(), 3);
    assert!(text
        .lines()
        .filter(|l| l.starts_with("truncation,"))
        .all(|l| l.contains("diverged") && l.ends_with("n/a")));
}

#[test]
fn config_errors_name_the_line() {
    let dir = std::env::temp_dir().join(format!("magnus-bound-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.cfg");
    std::fs::write(
        &path,
        "family = random\nx = 0.3\nn_max = 3\ncolour = blue\n",
    )
    .unwrap();
    let o = bin(&["simulate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn byte_identical_reruns() {
    for args in [
        &["--format", "csv", "series", "--phi", "24"][..],
        &[
            "--format",
            "json",
            "bounds",
            "1.2",
            "0.5",
            "4",
            "--tight",
            "--compare",
        ][..],
        &["--format", "csv", "trees", "6", "--with-coefficients"][..],
    ] {
        assert_eq!(bin(args).stdout, bin(args).stdout);
    }
}
