use std::process::{Command, Output};

use serde_json::Value;

fn rotstate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotstate"))
        .args(args)
        .env_remove("ROTSTATE_FORMAT")
        .output()
        .expect("spawn rotstate")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = rotstate(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "rotstate/1");
    v
}

#[test]
fn theta_exact_and_float() {
    let o = rotstate(&["theta", "--n", "3", "--exact"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap().split_whitespace().collect::<Vec<_>>(),
        ["1/3", "-1/3*sqrt(3)", "1/3*sqrt(5)"]
    );

    let v = json(&["theta", "--n", "2"]);
    let e = v["entries"].as_array().unwrap();
    assert!((e[0][0].as_f64().unwrap() + 0.5).abs() < 1e-15);
    assert_eq!(v["exact_text"][0][1], "1/2*sqrt(3)");

    let csv = stdout(&rotstate(&["theta", "--n", "4", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn classify_named_and_listed_states() {
    let v = json(&["classify", "--n", "4", "--named", "singlet"]);
    assert_eq!(v["classification"], "NPTEntangled");
    assert!((v["report"]["negativity_trace_norm"].as_f64().unwrap() - 4.0).abs() < 1e-12);

    let v = json(&["classify", "--n", "3", "--named", "max-entropy"]);
    assert_eq!(v["classification"], "Separable");

    // the point E of the N = 4 PPT cube
    let v = json(&["classify", "--n", "4", "--alpha", "2/3,0,0", "--reduced"]);
    assert_eq!(v["classification"], "BoundEntangledPPT");
    assert_eq!(v["exact_input"], true);
    assert_eq!(v["report"]["ppt"], true);

    let o = rotstate(&["classify", "--alpha", "2/3,0,0,10/3*sqrt(1/7)"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("BoundEntangledPPT"));

    let v = json(&["classify", "--alpha", "0.5,0.8660254037844386"]);
    assert_eq!(v["exact_input"], false);
}

#[test]
fn classify_from_file() {
    let dir = std::env::temp_dir().join(format!("rotstate-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let plain = dir.join("alpha.txt");
    std::fs::write(&plain, "0 0\n0\n").unwrap();
    let o = rotstate(&["classify", "--alpha-file", plain.to_str().unwrap(), "--reduced"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("Separable"));

    let j = dir.join("alpha.json");
    std::fs::write(&j, r#"{"n": 2, "alpha": [0, 1.1547005383792515]}"#).unwrap();
    let v = json(&["classify", "--alpha-file", j.to_str().unwrap()]);
    assert_eq!(v["classification"], "Separable");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(rotstate(&["classify", "--alpha", "5,0"]).status.code(), Some(3));
    assert_eq!(rotstate(&["classify", "--alpha", "x,y"]).status.code(), Some(2));
    assert_eq!(
        rotstate(&["classify", "--n", "3", "--alpha", "1,2,3,4"]).status.code(),
        Some(2)
    );
    assert_eq!(rotstate(&["theta", "--n", "1"]).status.code(), Some(2));
    assert_eq!(
        rotstate(&["vertices", "--n", "5", "--which", "separable"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rotstate(&["theta", "--n", "3", "--tolerance", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        rotstate(&["theta", "--n", "3", "--format", "off"]).status.code(),
        Some(2)
    );
    assert_eq!(rotstate(&["bogus"]).status.code(), Some(2));
}

#[test]
fn vertices_all_formats() {
    let text = stdout(&rotstate(&["vertices", "--n", "4", "--which", "ppt", "--exact"]));
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("(2/3, 2/3*sqrt(3), 0)"));

    let v = json(&["vertices", "--n", "4", "--which", "separable"]);
    assert_eq!(v["which"], "separable");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(v["exact_arithmetic"], true);

    let off = stdout(&rotstate(&[
        "vertices", "--n", "4", "--which", "ppt", "--format", "off",
    ]));
    assert!(off.starts_with("OFF\n8 6 0\n"));
    assert!(!off.contains("-0 "));

    let theta_s = json(&["vertices", "--n", "3", "--which", "theta-s"]);
    assert_eq!(theta_s["vertices"].as_array().unwrap().len(), 3);
    let fixed = json(&["vertices", "--n", "3", "--which", "fixed"]);
    assert_eq!(fixed["vertices"].as_array().unwrap().len(), 2);

    let v5 = json(&["vertices", "--n", "5", "--which", "ppt"]);
    assert_eq!(v5["exact_arithmetic"], false);
    assert!(!v5["vertices"].as_array().unwrap().is_empty());
    assert_eq!(
        rotstate(&["vertices", "--n", "5", "--which", "ppt", "--exact"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn env_selects_format() {
    let o = Command::new(env!("CARGO_BIN_EXE_rotstate"))
        .args(["theta", "--n", "2"])
        .env("ROTSTATE_FORMAT", "json")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "theta");
}

#[test]
fn sample_range_is_seeded() {
    let a = stdout(&rotstate(&["sample-range", "--n", "3", "--count", "20", "--seed", "9"]));
    let b = stdout(&rotstate(&["sample-range", "--n", "3", "--count", "20", "--seed", "9"]));
    let c = stdout(&rotstate(&[
        "sample-range",
        "--n",
        "3",
        "--count",
        "20",
        "--seed",
        "10",
    ]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().count(), 20);
    // product states sit inside the separable region, which for N = 3 is the PPT rectangle
    for line in a.lines() {
        let x: Vec<f64> = line.split(' ').map(|s| s.parse().unwrap()).collect();
        let w = [1.0 / 3.0, 3f64.sqrt() / 3.0, 5f64.sqrt() / 3.0];
        let trace: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
        assert!((trace - 1.0).abs() < 1e-12);
        assert!(x[0] > -1e-12 && x[0] < 1.0 + 1e-12);
        assert!(x[1] > -1e-12 && x[1] < 3f64.sqrt() / 2.0 + 1e-12);
    }
}

#[test]
fn verify_passes_and_detects_fault() {
    let o = rotstate(&["verify", "--n", "2..4", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all "));

    let v = json(&["verify", "--n", "3", "--samples", "5"]);
    assert_eq!(v["passed"], true);

    let o = rotstate(&["verify", "--n", "3", "--samples", "5", "--inject-v-fault", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL appendix-a-identity"));
    assert_eq!(rotstate(&["verify", "--n", "6..2"]).status.code(), Some(2));
}

#[test]
fn documented_examples() {
    let v = json(&["theta", "--n", "4"]);
    assert!((v["entries"][1][1].as_f64().unwrap() + 11.0 / 20.0).abs() < 1e-15);

    let v = json(&["classify", "--n", "4", "--alpha", "4,0,0,0"]);
    assert_eq!(v["classification"], "NPTEntangled");
    let v = json(&[
        "classify",
        "--n",
        "4",
        "--alpha",
        "0.6666666666666666,0,0,1.259881576697424",
    ]);
    assert_eq!(v["classification"], "BoundEntangledPPT");

    let cloud = stdout(&rotstate(&[
        "sample-range",
        "--n",
        "4",
        "--count",
        "200",
        "--seed",
        "3",
    ]));
    for line in cloud.lines() {
        let x: Vec<f64> = line.split(' ').map(|s| s.parse().unwrap()).collect();
        assert!(x[2] >= x[0] / 5f64.sqrt() - 1e-12);
    }

    let text = stdout(&rotstate(&["vertices", "--n", "2", "--which", "separable", "--exact"]));
    assert_eq!(text, "(0)\n(1)\n");

    let o = rotstate(&["verify", "--n", "2..6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&["verify", "--n", "2..4"]);
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}
