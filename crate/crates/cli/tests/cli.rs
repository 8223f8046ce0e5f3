use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn followspam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_followspam"))
        .args(args)
        .env_remove("FOLLOWSPAM_SEED")
        .env("FOLLOWSPAM_WORKERS", "2")
        .output()
        .expect("spawn followspam")
}

fn ok(args: &[&str]) -> String {
    let out = followspam(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const EGO_EDGES: &str = "\
# center 0
0 1
0 2
0 3
4 0
5 0
6 0
1 2
2 1
4 1
6 5
7 1
3 8
8 7
";

#[test]
fn census_of_small_ego_network_sums_to_all_triples() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    fs::write(&edges, EGO_EDGES).unwrap();
    let out = ok(&["census", "--graph", p(&edges), "--user", "0"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 17);
    let total: u64 = lines[..16]
        .iter()
        .map(|l| l.split_whitespace().nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 35);
    assert!(lines[16].starts_with("sum 35 nodes 7 edges 10 expected 35 ok"), "{}", lines[16]);
    let g = followspam::load_edge_list(&edges).unwrap();
    let ego = followspam::ego::ego_network(&g.graph, g.ids.dense(0).unwrap(), None).unwrap();
    let brute = followspam::census_bruteforce(&ego.graph).unwrap();
    for (line, class) in lines.iter().zip(followspam::TriadClass::ALL) {
        let f: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(f, [class.label(), &brute.get(class).to_string()]);
    }
}

#[test]
fn ingest_drops_loops_and_duplicates() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.txt");
    let clean = dir.path().join("clean.txt");
    fs::write(&raw, "10 20\n10 20\n20 20\n20 10\n").unwrap();
    let report = ok(&["ingest", "--edges", p(&raw), "--out", p(&clean)]);
    assert!(!report.is_empty());
    let kept: Vec<String> = fs::read_to_string(&clean)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect();
    assert_eq!(kept, ["10 20", "20 10"]);
}

#[test]
fn bad_inputs_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    let out = followspam(&["census", "--graph", p(&missing), "--user", "0"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error: "), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    let garbage = dir.path().join("bad.txt");
    fs::write(&garbage, "1 2\nthree four\n").unwrap();
    let out = followspam(&["ingest", "--edges", p(&garbage), "--out", p(&dir.path().join("o"))]);
    assert!(!out.status.success());

    fs::write(&garbage, EGO_EDGES).unwrap();
    let out = followspam(&["census", "--graph", p(&garbage), "--user", "99"]);
    assert!(!out.status.success());
}

struct Run {
    features: String,
    report: String,
    roc: String,
    model: String,
    score: f64,
}

fn pipeline(dir: &Path) -> Run {
    let edges = dir.join("edges.txt");
    let labels = dir.join("labels.txt");
    let clean = dir.join("clean.txt");
    let baseline = dir.join("baseline.txt");
    let features = dir.join("features.csv");
    let report = dir.join("report.txt");
    let model = dir.join("model.json");
    ok(&[
        "synth", "--legit", "120", "--spam", "40", "--scale", "0.05", "--seed", "3",
        "--out-edges", p(&edges), "--out-labels", p(&labels),
    ]);
    assert!(dir.join("edges.txt.config.json").is_file());
    ok(&["ingest", "--edges", p(&edges), "--out", p(&clean)]);
    ok(&[
        "baseline", "--graph", p(&clean), "--labels", p(&labels), "--sample", "50", "--seed", "4",
        "--out", p(&baseline),
    ]);
    ok(&[
        "features", "--graph", p(&clean), "--labels", p(&labels), "--baseline", p(&baseline),
        "--mode", "cascaded", "--out", p(&features),
    ]);
    ok(&[
        "evaluate", "--features", p(&features), "--algo", "forest", "--folds", "5", "--seed", "5",
        "--trees", "20", "--report", p(&report),
    ]);
    ok(&[
        "train", "--features", p(&features), "--algo", "forest", "--seed", "6", "--trees", "20",
        "--out", p(&model),
    ]);
    let ranking = ok(&["infogain", "--features", p(&features)]);
    assert_eq!(ranking.lines().count(), 19);
    let score = ok(&[
        "score", "--model", p(&model), "--graph", p(&clean), "--baseline", p(&baseline), "--user", "130",
    ]);
    Run {
        features: fs::read_to_string(&features).unwrap(),
        report: fs::read_to_string(&report).unwrap(),
        roc: fs::read_to_string(dir.join("report.txt.roc.csv")).unwrap(),
        model: fs::read_to_string(&model).unwrap(),
        score: score.trim().parse().unwrap(),
    }
}

#[test]
fn pipeline_is_deterministic_and_scores_are_probabilities() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = pipeline(a.path());
    let rb = pipeline(b.path());
    assert_eq!(ra.features, rb.features);
    assert_eq!(ra.report, rb.report);
    assert_eq!(ra.roc, rb.roc);
    assert_eq!(ra.model, rb.model);
    assert_eq!(ra.score, rb.score);
    assert!((0.0..=1.0).contains(&ra.score));
    assert_eq!(ra.features.lines().filter(|l| !l.starts_with('#')).count(), 161);
    assert!(ra.roc.starts_with("fpr,tpr\n0,0\n"));
}

#[test]
fn tsp_features_need_a_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("g.txt");
    let labels = dir.path().join("l.txt");
    fs::write(&edges, EGO_EDGES).unwrap();
    fs::write(&labels, "0 spam\n1 legit\n").unwrap();
    let out = followspam(&[
        "features", "--graph", p(&edges), "--labels", p(&labels), "--mode", "tsp", "--out",
        p(&dir.path().join("f")),
    ]);
    assert!(!out.status.success());
    ok(&[
        "features", "--graph", p(&edges), "--labels", p(&labels), "--mode", "ss+deg", "--out",
        p(&dir.path().join("f")),
    ]);
}
