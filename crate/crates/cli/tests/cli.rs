use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn tidy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tidy")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn check(user: &str, object: &str, room: &str, rec: &str) -> Output {
    let model = fixture("preferences.model");
    tidy(&[
        "check", "--model", &model, "--user", user, "--object", object, "--room", room, "--receptacle", rec, "--k", "2",
    ])
}

#[test]
fn check_verdicts() {
    let ok = check("U1", "mug", "kitchen", "counter");
    assert!(ok.status.success());
    let text = stdout(&ok);
    assert_eq!(text.lines().next(), Some("OK"));
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().contains("kitchen/counter"));

    let bad = check("U2", "mug", "kitchen", "sink");
    assert!(bad.status.success());
    assert_eq!(stdout(&bad).lines().next(), Some("MISPLACED"));
}

#[test]
fn check_unknown_tokens() {
    let o = check("U1", "anvil", "kitchen", "counter");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("anvil"));
    let o = check("U1", "mug", "kitchen", "bathtub");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bathtub"));
}

#[test]
fn run_exit_codes_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("two_objects.jsonl");
    let o = tidy(&["run", "--scenario", &fixture("two_objects.scenario"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log = std::fs::read_to_string(&out).unwrap();
    assert!(log.lines().last().unwrap().contains("\"terminal_reason\":\"AllPlaced\""));

    let again = tidy(&["run", "--scenario", &fixture("two_objects.scenario")]);
    assert_eq!(stdout(&again), log, "stdout and --out differ or the run is not deterministic");

    let o = tidy(&["run", "--scenario", &fixture("retry_all.scenario")]);
    assert_eq!(o.status.code(), Some(2));
    let o = tidy(&["run", "--scenario", &fixture("two_objects.scenario"), "--max-ticks", "5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_user_override() {
    let u1 = tidy(&["run", "--scenario", &fixture("divergence_u1.scenario")]);
    let u2 = tidy(&["run", "--scenario", &fixture("divergence_u1.scenario"), "--user", "U2"]);
    assert!(u1.status.success() && u2.status.success());
    assert_ne!(stdout(&u1), stdout(&u2));
    assert_eq!(
        stdout(&u2),
        stdout(&tidy(&["run", "--scenario", &fixture("divergence_u2.scenario")]))
    );
}

#[test]
fn config_and_usage_errors_exit_1() {
    for args in [
        vec!["run", "--scenario", "/no/such.scenario"],
        vec!["run", "--scenario", &fixture("two_objects.scenario"), "--k", "0"],
        vec!["run", "--scenario", &fixture("two_objects.scenario"), "--user", "nobody"],
        vec!["train", "--corpus", "/no/such.csv"],
        vec!["frobnicate"],
        vec!["check", "--model", "x"],
        vec!["--log-level", "[[[", "plan", "--map", "m", "--from", "0,0", "--to", "1,1"],
    ] {
        let o = tidy(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert_eq!(tidy(&["--help"]).status.code(), Some(0));
}

#[test]
fn train_writes_model_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("preferences.csv");
    let m1 = dir.path().join("a.model");
    let m2 = dir.path().join("b.model");
    let train = |out: &PathBuf| {
        tidy(&[
            "train", "--corpus", &corpus, "--holdout", "0.2", "--seed", "7", "--epochs", "300", "--out",
            out.to_str().unwrap(),
        ])
    };
    let (a, b) = (train(&m1), train(&m2));
    assert!(a.status.success(), "{}", stderr(&a));
    let report = stdout(&a);
    assert!(report.contains("held-out RMSE"), "{report}");
    assert_eq!(report, stdout(&b));
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());
    let loss: f64 = report
        .split_whitespace()
        .skip_while(|t| *t != "->")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(loss.is_finite());

    // the written model is usable
    let o = tidy(&[
        "check", "--model", m1.to_str().unwrap(), "--user", "U1", "--object", "mug", "--room", "kitchen",
        "--receptacle", "counter",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn train_defaults_reproduce_bundled_model() {
    let o = tidy(&["train", "--corpus", &fixture("preferences.csv")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("preferences.model")).unwrap());
    assert!(stderr(&o).contains("loss"));
}

#[test]
fn plan_prints_cells_and_cost() {
    let map = fixture("apartment.map");
    let o = tidy(&["plan", "--map", &map, "--from", "3,6", "--to", "27,3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("cost "));
    let n: usize = lines.next().unwrap().strip_prefix("cells ").unwrap().parse().unwrap();
    assert_eq!(lines.count(), n);
    assert!(text.trim_end().ends_with("27,3"));

    let carrot = tidy(&["plan", "--map", &map, "--from", "3,6", "--to", "5,2", "--carrot"]);
    assert!(carrot.status.success());
    assert!(!stdout(&carrot).contains("\n5,2\n"), "carrot path entered the table cell");

    let wall = tidy(&["plan", "--map", &map, "--from", "3,6", "--to", "0,0"]);
    assert_eq!(wall.status.code(), Some(1));
    let bad = tidy(&["plan", "--map", &map, "--from", "3;6", "--to", "1,1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("--from"));
}

#[test]
fn render_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let map = fixture("apartment.map");
    let plain = std::fs::read_to_string(fixture("apartment.map")).unwrap();
    let height: usize = plain
        .lines()
        .find_map(|l| l.strip_prefix("height "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();

    // no misplaced objects: nothing is drawn
    let o = tidy(&["render", "--scenario", &fixture("none_misplaced.scenario")]);
    assert!(o.status.success(), "{}", stderr(&o));
    let empty = stdout(&o);
    assert_eq!(empty.lines().count(), height);
    assert!(!empty.contains('*'));

    // three-step log: three marked cells
    let log = dir.path().join("three.jsonl");
    let events: String = [(4, 6), (5, 6), (6, 6)]
        .iter()
        .map(|(x, y)| format!("{{\"tick\":1,\"kind\":\"move\",\"pose\":{{\"x\":{x},\"y\":{y},\"heading\":\"E\"}}}}\n"))
        .collect();
    let summary = "{\"summary\":{\"objects_rearranged\":0,\"successes\":0,\"failures\":0,\"total_path_cells\":3,\"total_ticks\":3,\"terminal_reason\":\"AllPlaced\"}}\n";
    std::fs::write(&log, format!("{events}{summary}")).unwrap();
    let o = tidy(&["render", "--log", log.to_str().unwrap(), "--map", &map]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches('*').count(), 3);

    let ppm = dir.path().join("two_objects.ppm");
    let o = tidy(&["render", "--scenario", &fixture("two_objects.scenario"), "--out", ppm.to_str().unwrap(), "--scale", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = std::fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n62 26\n255\n"));

    let o = tidy(&["render", "--log", "/no/such.jsonl", "--map", &map]);
    assert_eq!(o.status.code(), Some(1));
    let o = tidy(&["render", "--log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
