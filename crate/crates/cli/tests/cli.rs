use std::process::{Command, Output};

fn wallach(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wallach"))
        .args(args)
        .output()
        .expect("spawn wallach")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("wallach-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_reports_class_and_signature() {
    let o = wallach(&["classify", "--space", "su3", "--x1", "1", "--x2", "1", "--x3", "1.2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("sectional StrictlyPositive"), "{text}");
    assert!(text.contains("ricci_sig 6/0/0"), "{text}");

    let o = wallach(&["classify", "--d", "8", "--x1", "1", "--x2", "1", "--x3", "2"]);
    let text = stdout(&o);
    assert!(
        text.contains("sectional Mixed") && text.contains("witness t=1.0"),
        "{text}"
    );
}

#[test]
fn space_and_d_are_aliases() {
    let a = wallach(&["classify", "--space", "sp3", "--x1", "1", "--x2", "2", "--x3", "0.5"]);
    let b = wallach(&["classify", "--d", "4", "--x1", "1", "--x2", "2", "--x3", "0.5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_arguments_exit_2() {
    let cases: &[&[&str]] = &[
        &["classify", "--space", "g2", "--x1", "1", "--x2", "1", "--x3", "1"],
        &["classify", "--d", "3", "--x1", "1", "--x2", "1", "--x3", "1"],
        &["classify", "--x1", "1", "--x2", "1", "--x3", "1"],
        &["classify", "--space", "su3", "--x1", "-1", "--x2", "1", "--x3", "1"],
        &[
            "classify", "--space", "su3", "--d", "2", "--x1", "1", "--x2", "1", "--x3", "1",
        ],
        &[
            "flow", "--space", "su3", "--x1", "1", "--x2", "1", "--x3", "1", "--rtol", "0",
        ],
        &["regions", "--grid", "0.5:0.1:10,0:1:10"],
        &["regions", "--format", "xml"],
        &["roots", "--s-range", "0:1:10"],
        &["probe-plane", "--t", "0.1"],
        &["no-such-command"],
    ];
    for args in cases {
        let o = wallach(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn step_underflow_exits_3() {
    let o = wallach(&[
        "flow", "--d", "8", "--x1", "1", "--x2", "2", "--x3", "0.3", "--rtol", "1e-30", "--atol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("underflow"));
}

#[test]
fn probe_plane_accepts_negative_parameters() {
    let o = wallach(&["probe-plane", "--t", "-0.5", "--x", "0"]);
    assert!(o.status.success());
    let k: f64 = stdout(&o).trim().parse().unwrap();
    assert!((k - 2.0 * 2.5).abs() < 1e-12);
}

#[test]
fn flow_writes_trajectory_and_routes_events() {
    let args = [
        "flow", "--space", "su3", "--x1", "1", "--x2", "1", "--x3", "1.3", "--t-end", "0.08",
    ];
    let o = wallach(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("t,x1,x2,x3,rho1,rho2,rho3,sectional,ricci_sig\n"));
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 9));
    let events = String::from_utf8(o.stderr).unwrap();
    assert!(events.contains("event RatioCrossesFourThirds"), "{events}");

    let path = scratch("traj.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--format", "json", "--out", path.to_str().unwrap()]);
    let o = wallach(&with_out);
    assert!(o.status.success());
    assert!(stdout(&o).contains("event RatioCrossesFourThirds"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows[0]["x3"].as_f64(), Some(1.3));
}

#[test]
fn backward_flow_runs_to_negative_time() {
    let o = wallach(&[
        "flow", "--d", "2", "--x1", "1", "--x2", "1", "--x3", "1.4", "--t-end", "-0.01",
    ]);
    assert!(o.status.success());
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.starts_with("-0.01,"), "{last}");
}

#[test]
fn roots_emits_all_curves_or_one_space() {
    let all: serde_json::Value = serde_json::from_slice(&wallach(&["roots", "--format", "json"]).stdout).unwrap();
    let keys: Vec<&String> = all.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["ricci_d2", "ricci_d4", "ricci_d8", "valiev"]);

    let o = wallach(&["roots", "--space", "f4", "--s-range", "0.1:0.9:5"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,s,r"));
    let ids: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids.len(), 10);
    assert!(ids.iter().all(|id| *id == "valiev" || *id == "ricci_d8"));
}

#[test]
fn thresholds_lists_bisection_and_closed_form() {
    let text = stdout(&wallach(&["thresholds"]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let s: f64 = row[2].parse().unwrap();
        let c: f64 = row[3].parse().unwrap();
        assert!((s - c).abs() < 1e-10);
    }
}

#[test]
fn regions_csv_and_json_agree() {
    let csv = stdout(&wallach(&["regions", "--grid", "0.1:0.9:4,0:0.2:3"]));
    let json: serde_json::Value =
        serde_json::from_slice(&wallach(&["regions", "--grid", "0.1:0.9:4,0:0.2:3", "--format", "json"]).stdout)
            .unwrap();
    let cells = json["cells"].as_array().unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(cells.len(), 12);
    for (row, cell) in rows.iter().zip(cells) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), cell["s"].as_f64().unwrap());
        assert_eq!(f[1].parse::<f64>().unwrap(), cell["r"].as_f64().unwrap());
        assert_eq!(f[2], cell["sectional"].as_str().unwrap());
    }
}

#[test]
fn output_is_deterministic() {
    let a = wallach(&[
        "flow", "--d", "4", "--x1", "0.7", "--x2", "1.1", "--x3", "0.9", "--t-end", "0.01",
    ]);
    let b = wallach(&[
        "flow", "--d", "4", "--x1", "0.7", "--x2", "1.1", "--x3", "0.9", "--t-end", "0.01",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
