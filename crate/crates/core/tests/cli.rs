//! End-to-end runs of the `cal` binary against the bundled problems, compared with
//! frozen outputs under `tests/golden`. Set `CAL_BLESS=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cal_core::problem::Problem;
use serde_json::Value;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn cal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cal"))
        .args(args)
        .current_dir(repo())
        .env_remove("CAL_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("CAL_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden {name}; run with CAL_BLESS=1"));
    assert_eq!(actual, expected, "output differs from golden {name}");
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn dims_on_the_dirac_problem() {
    let text = stdout(&cal(&[
        "dims",
        "problems/thresholds_dirac.json",
        "--eps",
        "1/4,1/2",
    ]));
    golden("dims_dirac.json", &text);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["littlestone"], v["eps"]["1/4"]["k"]);
    assert_eq!(v["eps"]["1/4"]["plain"]["exact"], true);
}

#[test]
fn kcurve_grows_as_eps_shrinks() {
    let text = stdout(&cal(&[
        "kcurve",
        "problems/thresholds_uniform8.json",
        "--grid",
        "1/2,1/4,1/8",
    ]));
    golden("kcurve.csv", &text);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["eps", "k"]);
    assert_eq!(rows.len(), 4);
    let ks: Vec<i64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn tdim_on_chain_and_tree() {
    let chain = stdout(&cal(&[
        "tdim",
        "problems/thresholds_uniform8.json",
        "--grid",
        "1/2,1/4,1/8",
    ]));
    golden("tdim_chain.csv", &chain);
    assert!(chain.contains("\n1/4,4,3\n"));
    let tree = stdout(&cal(&[
        "tdim",
        "problems/star_tree.json",
        "--grid",
        "1/2,1/4",
    ]));
    golden("tdim_tree.csv", &tree);
    assert_eq!(
        cal(&["tdim", "problems/thresholds_dirac.json", "--grid", "1/2"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn game_and_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let transcript = dir.path().join("t.csv");
    let args = [
        "game",
        "problems/thresholds_uniform8.json",
        "--learner",
        "level:eps=1/8",
        "--adversary",
        "critical:realizable,eps=1/8",
        "--T",
        "32",
        "--reps",
        "20",
        "--seed",
        "3",
    ];
    let mut with_transcript: Vec<&str> = args.to_vec();
    with_transcript.extend(["--transcript", transcript.to_str().unwrap()]);
    let text = stdout(&cal(&with_transcript));
    golden("game.csv", &text);
    assert_eq!(text, stdout(&cal(&args)));
    let t = std::fs::read_to_string(&transcript).unwrap();
    golden("transcript.csv", &t);
    let rows = csv_rows(&t);
    assert_eq!(rows[0], ["t", "x", "y_hat", "y", "member", "loss"]);
    assert_eq!(rows.len(), 33);
}

#[test]
fn euclidean_game() {
    let text = stdout(&cal(&[
        "game",
        "problems/halfplane_box.json",
        "--learner",
        "linear",
        "--adversary",
        "iid",
        "--T",
        "40",
        "--reps",
        "4",
        "--seed",
        "2",
    ]));
    golden("game_linear.csv", &text);
}

#[test]
fn sweeps_in_csv_and_json() {
    let csv = stdout(&cal(&[
        "sweep",
        "problems/thresholds_uniform8.json",
        "--learner",
        "hedge",
        "--adversary",
        "iid:f=3,noise=1/4",
        "--T",
        "8,16,32",
        "--reps",
        "10",
        "--seed",
        "4",
    ]));
    golden("sweep_T.csv", &csv);
    assert_eq!(
        csv_rows(&csv)[0],
        [
            "axis",
            "mean_regret",
            "stderr",
            "normalized_mean",
            "T",
            "R",
            "seed"
        ]
    );
    assert_eq!(csv.lines().count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.json");
    stdout(&cal(&[
        "sweep",
        "problems/thresholds_uniform8.json",
        "--learner",
        "level:eps=1/2",
        "--adversary",
        "critical:agnostic,eps=1/2",
        "--T",
        "16",
        "--grid",
        "1/2,1/4",
        "--reps",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    golden("sweep_eps.json", &text);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["axis"], "eps");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn seed_variable_overrides_the_flag() {
    let base = [
        "sweep",
        "problems/thresholds_uniform8.json",
        "--learner",
        "hedge:adaptive",
        "--adversary",
        "iid:f=2,noise=1/2",
        "--T",
        "12",
        "--reps",
        "5",
    ];
    let mut seeded = base.to_vec();
    seeded.extend(["--seed", "9"]);
    let expected = stdout(&cal(&seeded));
    let mut overridden = base.to_vec();
    overridden.extend(["--seed", "1"]);
    let out = Command::new(env!("CARGO_BIN_EXE_cal"))
        .args(&overridden)
        .current_dir(repo())
        .env("CAL_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(stdout(&out), expected);
}

#[test]
fn certificates_round_trip_through_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    stdout(&cal(&[
        "dims",
        "problems/thresholds_uniform8.json",
        "--eps",
        "1/4",
        "--certificate",
        c,
    ]));
    golden("certificate.json", &std::fs::read_to_string(&cert).unwrap());
    let ok = cal(&["validate", c, "--kind", "plain", "--eps", "1/4"]);
    assert_eq!(stdout(&ok), "valid plain eps=1/4 depth=1\n");
    let bad = cal(&["validate", c, "--kind", "plain", "--eps", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).starts_with("invalid"));
    let relaxed = dir.path().join("relaxed.json");
    let r = relaxed.to_str().unwrap();
    stdout(&cal(&[
        "dims",
        "problems/thresholds_uniform8.json",
        "--eps",
        "1/4",
        "--certificate",
        r,
        "--kind",
        "relaxed",
    ]));
    assert!(cal(&["validate", r]).status.success());
}

#[test]
fn reports_merge_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(
        &a,
        "axis,mean_regret,stderr,normalized_mean,T,R,seed\n8,1.5,0.25,0.1875,8,4,0\n",
    )
    .unwrap();
    std::fs::write(
        &b,
        "axis,mean_regret,stderr,normalized_mean,T,R,seed\n1/4,2,0,0.125,16,4,0\n",
    )
    .unwrap();
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    let json = stdout(&cal(&["report", a, b]));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["total_rows"], 2);
    assert_eq!(v["inputs"][0]["rows"][0]["mean_regret"], 1.5);
    assert_eq!(v["inputs"][1]["rows"][0]["axis"], "1/4");
    let plot = stdout(&cal(&["report", a, b, "--plot-data"]));
    let blocks: Vec<&str> = plot.split("\n\n\n").collect();
    assert_eq!(blocks.len(), 2);
    assert!(blocks[0].ends_with("8 1.5 0.25 0.1875 8 4 0"));
}

#[test]
fn exit_codes() {
    let out = cal(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(cal(&["--help"]).status.code(), Some(0));
    assert_eq!(
        cal(&["dims", "problems/missing.json", "--eps", "1/2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        cal(&[
            "kcurve",
            "problems/thresholds_uniform8.json",
            "--grid",
            "1/0"
        ])
        .status
        .code(),
        Some(1)
    );
    let budget = cal(&[
        "dims",
        "problems/thresholds_smoothed16.json",
        "--eps",
        "1/8",
        "--budget",
        "2",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&budget.stdout).unwrap();
    assert_eq!(v["eps"]["1/8"]["plain"]["budget_exhausted"], true);
}

#[test]
fn problem_files_round_trip_canonically() {
    let mut seen = 0;
    for entry in std::fs::read_dir(repo().join("problems")).unwrap() {
        let path = entry.unwrap().path();
        let once = Problem::load(&path).unwrap().to_canonical_string();
        let twice = Problem::from_str(&once).unwrap().to_canonical_string();
        assert_eq!(once, twice, "{}", path.display());
        let v: Value = serde_json::from_str(&once).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        seen += 1;
    }
    assert!(seen >= 5);
}
