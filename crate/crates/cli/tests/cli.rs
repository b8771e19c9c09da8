use std::process::{Command, Output};

use serde::Deserialize;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ergm-extremal"));
    cmd.env_remove("ERGM_EXTREMAL_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyJson {
    kind: String,
    members: Vec<Member>,
    oracle_e: f64,
    certified: bool,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
enum Member {
    Empty,
    Complete,
    Turan { k: u64, scale: f64 },
    Box { side: f64 },
    Interior { segment: u64, e_star: f64, t_star: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimJson {
    n: usize,
    mean_edge_density: f64,
    mean_triangle_density: f64,
    acceptance_rate: f64,
    sweeps: u64,
    burnin: u64,
    seed: u64,
}

fn classify(args: &[&str]) -> (ClassifyJson, Option<i32>) {
    let mut full = vec!["classify"];
    full.extend_from_slice(args);
    let out = run(&full);
    let parsed = serde_json::from_str(&stdout(&out)).expect("classify output matches schema");
    (parsed, out.status.code())
}

#[test]
fn classify_interior_on_second_segment() {
    let (c, code) = classify(&["--gamma", "2", "--a", "-0.2962962962962963"]);
    assert_eq!(code, Some(0));
    assert_eq!(c.kind, "interior");
    assert!(c.certified);
    match c.members.as_slice() {
        [Member::Interior { segment: 2, e_star, t_star }] => {
            assert!((e_star - 0.575).abs() < 5e-4, "{e_star}");
            assert!(*t_star > 0.0);
        }
        other => panic!("{other:?}"),
    }
    assert!((c.oracle_e - 0.575).abs() < 5e-4);
}

#[test]
fn classify_bipartite_below_slopes_boundary() {
    let (c, code) = classify(&["--gamma", "0.5", "--a", "-1"]);
    assert_eq!(code, Some(0));
    assert_eq!(c.kind, "turan");
    assert!(matches!(c.members.as_slice(), [Member::Turan { k: 2, scale }] if *scale == 1.0));
}

#[test]
fn classify_positive_direction_tie() {
    let (c, code) = classify(&["--gamma", "1", "--a", "-1", "--direction", "pos"]);
    assert_eq!(code, Some(0));
    assert_eq!(c.kind, "tie");
    assert!(matches!(c.members.as_slice(), [Member::Empty, Member::Complete]));
}

#[test]
fn classify_positive_direction_box() {
    let (c, _) = classify(&["--gamma", "0.5", "--a", "-1", "--direction", "pos"]);
    assert_eq!(c.kind, "box");
    // s * gamma = 3/2 < 2: the box side is 9/16
    assert!(matches!(c.members.as_slice(), [Member::Box { side }] if (side - 0.5625).abs() < 1e-12));
    assert!((c.oracle_e - 81.0 / 256.0).abs() < 1e-4);
}

#[test]
fn classify_horizontal_and_vertical() {
    let (c, _) = classify(&["--gamma", "1", "--direction", "hplus"]);
    assert!(matches!(c.members.as_slice(), [Member::Complete]));
    assert!(!c.certified);
    let (c, _) = classify(&["--gamma", "1", "--direction", "hminus"]);
    assert!(matches!(c.members.as_slice(), [Member::Empty]));
    let (c, code) = classify(&["--gamma", "1", "--direction", "vertical", "--beta1", "0.3", "--chromatic", "4"]);
    assert_eq!(code, Some(0));
    match c.members.as_slice() {
        [Member::Turan { k: 3, scale }] => assert!((c.oracle_e - 2.0 / 3.0 * scale).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn classify_gap_band_exits_two() {
    let (c, code) = classify(&["--gamma", "1.1096", "--a", "-1.55587"]);
    assert_eq!(code, Some(2));
    assert_eq!(c.kind, "unclassified");
    assert!(c.members.is_empty());
    assert!((c.oracle_e - 2.0 / 3.0).abs() < 1e-3);
}

#[test]
fn classify_rejects_bad_gamma() {
    let out = run(&["classify", "--gamma", "-1", "--a", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn table1_reports_within_tolerance() {
    let out = run(&["table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for v in ["0.575", "0.599", "0.625", "0.658", "0.703"] {
        assert!(text.contains(v), "missing {v}");
    }
    assert!(text.contains("max |computed - reference|"));

    let out = run(&["table1", "--format", "csv"]);
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("gamma,a,segment,computed,reference,deviation"));
    for line in lines {
        let dev: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(dev <= 5e-4, "{line}");
    }
}

#[test]
fn curves_are_ordered_and_hit_turan_points() {
    let out = run(&["curves", "--gamma", "1", "--resolution", "30"]);
    assert!(out.status.success());
    let body = stdout(&out);
    assert!(!body.contains('\r'));
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("e,lower,upper,goodman"));
    let mut saw_two_thirds = false;
    let mut prev = -1.0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let [e, lower, upper, goodman] = v[..] else { panic!("{line}") };
        assert!(e > prev, "rows not increasing at {line}");
        prev = e;
        assert!(goodman <= lower + 1e-12 && lower <= upper + 1e-12, "{line}");
        if (e - 2.0 / 3.0).abs() < 1e-12 {
            saw_two_thirds = true;
            assert!((lower - 2.0 / 9.0).abs() < 1e-12);
        }
    }
    assert!(saw_two_thirds);
}

#[test]
fn curves_rejects_coarse_resolution() {
    let out = run(&["curves", "--gamma", "1", "--resolution", "5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn phase_has_single_tie_at_minus_two() {
    let out = run(&["phase", "--gamma", "0.5", "--a-min", "-3", "--a-max", "-1", "--steps", "21"]);
    assert!(out.status.success());
    let body = stdout(&out);
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("a,kind,e_star,segment"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21);
    let ties: Vec<&Vec<&str>> = rows.iter().filter(|r| r[1] == "tie").collect();
    assert_eq!(ties.len(), 1);
    assert_eq!(ties[0][0].parse::<f64>().unwrap(), -2.0);
    assert_eq!(ties[0][2], "0.5;1");
    for r in &rows {
        let a: f64 = r[0].parse().unwrap();
        if a < -2.0 {
            assert_eq!(r[1], "complete");
        } else if a > -2.0 {
            assert_eq!(r[1], "turan");
        }
    }
}

#[test]
fn phase_marks_gap_band_unclassified() {
    let out = run(&["phase", "--gamma", "1.1096", "--a-min", "-1.56", "--a-max", "-1.55", "--steps", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(",unclassified,"));
}

#[test]
fn criticals_slopes_and_sequences() {
    let out = run(&["criticals", "--gamma", "2", "--k-max", "3", "--format", "csv"]);
    assert!(out.status.success());
    let body = stdout(&out);
    let row: Vec<f64> = body.lines().nth(1).unwrap().split(',').take(4).map(|x| x.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[3] - 8.0 / 27.0).abs() < 1e-15);

    let out = run(&["criticals", "--sequence", "gamma-n-star", "--n-max", "4", "--format", "csv"]);
    let body = stdout(&out);
    let first: Vec<&str> = body.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "3");
    assert!((first[1].parse::<f64>().unwrap() - 0.7749).abs() < 1e-4);

    let out = run(&["criticals", "--sequence", "gamma-n", "--n-max", "3", "--format", "json"]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let g3 = rows[0]["value"].as_f64().unwrap();
    assert!((g3 - 1.30).abs() < 0.01, "{g3}");
}

#[test]
fn simulate_is_deterministic_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let args = ["simulate", "--n", "6", "--a", "-0.5", "--beta2", "-1", "--sweeps", "200", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let mut with_trace = args.to_vec();
    with_trace.extend(["--trace", trace.to_str().unwrap()]);
    let third = run(&with_trace);
    assert_eq!(third.stdout, first.stdout);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(csv.lines().next(), Some("sweep,edge_density,triangle_density"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn simulate_uniform_three_vertices() {
    let out = run(&["simulate", "--n", "3", "--sweeps", "200000", "--burnin", "100", "--seed", "11"]);
    assert!(out.status.success());
    let s: SimJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((s.n, s.sweeps, s.burnin, s.seed), (3, 200000, 100, 11));
    // 2|E|/n^2 with E ~ Bin(3, 1/2): mean 2 * 1.5 / 9
    assert!((s.mean_edge_density - 1.0 / 3.0).abs() < 0.02, "{}", s.mean_edge_density);
    // one triangle with probability 1/8, density 6/27
    assert!((s.mean_triangle_density - 6.0 / 27.0 / 8.0).abs() < 0.01);
    assert!((s.acceptance_rate - 0.5).abs() < 0.02);
}

#[test]
fn simulate_unwritable_trace_exits_one() {
    let out = run(&["simulate", "--n", "3", "--sweeps", "10", "--trace", "/nonexistent-dir/trace.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trace"));
}

#[test]
fn usage_and_environment_errors() {
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--direction", "sideways"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    let out = bin().env("ERGM_EXTREMAL_THREADS", "zero").arg("table1").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().env("ERGM_EXTREMAL_THREADS", "2").arg("table1").output().unwrap();
    assert!(out.status.success());
}
