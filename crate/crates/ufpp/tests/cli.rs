//! End-to-end runs of the installed binary: exit codes, file formats, and
//! determinism of everything a scripted caller would depend on.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ufpp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ufpp"))
        .args(args)
        .current_dir(dir)
        .env_remove("UFPP_STATE_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SAMPLE: &str = "\
ufpp v1
m 5
cap 9 7 12 7 9
task 0 2 3 14
task 1 4 5 11
task 2 5 4 9
task 0 5 2 6
task 3 4 6 10
";

fn write_sample(dir: &Path) -> String {
    let path = dir.join("sample.ufpp");
    fs::write(&path, SAMPLE).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn solve_output_round_trips_through_check() {
    let tmp = TempDir::new().unwrap();
    let input = write_sample(tmp.path());
    for algo in ["main", "fast", "large", "small", "ra"] {
        let sol = tmp.path().join(format!("{algo}.json"));
        let sol = sol.to_str().unwrap();
        let run = ufpp(tmp.path(), &["solve", "--algo", algo, "-i", &input, "-o", sol]);
        assert!(run.status.success(), "{algo}: {}", stderr_of(&run));
        let doc = fs::read_to_string(sol).unwrap();
        assert!(doc.contains("\"schema\": \"ufpp.solution.v1\""), "{algo}: {doc}");

        let check = ufpp(tmp.path(), &["check", "-i", &input, "-s", sol]);
        assert_eq!(check.status.code(), Some(0), "{algo}: {}", stdout_of(&check));
        assert!(stdout_of(&check).starts_with("ok:"), "{algo}: {}", stdout_of(&check));
    }
}

#[test]
fn check_rejects_tampered_solutions() {
    let tmp = TempDir::new().unwrap();
    let input = write_sample(tmp.path());
    let sol = tmp.path().join("sol.json");
    let sol = sol.to_str().unwrap();
    let run = ufpp(tmp.path(), &["solve", "--algo", "main", "-i", &input, "-o", sol]);
    assert!(run.status.success());

    let doc = fs::read_to_string(sol).unwrap();
    let profit_field = doc
        .lines()
        .find(|l| l.contains("\"profit\""))
        .expect("document carries a profit")
        .trim()
        .to_owned();
    let tampered = doc.replace(&profit_field, "\"profit\": 999999,");
    fs::write(sol, tampered).unwrap();

    let check = ufpp(tmp.path(), &["check", "-i", &input, "-s", sol]);
    assert_eq!(check.status.code(), Some(2));
    assert!(stdout_of(&check).contains("profit mismatch"), "{}", stdout_of(&check));
}

#[test]
fn exit_codes_distinguish_usage_data_and_budget_failures() {
    let tmp = TempDir::new().unwrap();
    let input = write_sample(tmp.path());

    let usage = ufpp(tmp.path(), &["solve", "--algo", "bogus", "-i", &input]);
    assert_eq!(usage.status.code(), Some(1), "unknown algorithm is a usage error");

    let help = ufpp(tmp.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout_of(&help).contains("solve"));

    let broken = tmp.path().join("broken.ufpp");
    fs::write(&broken, "ufpp v1\nm 2\ncap 5\n").unwrap();
    let data = ufpp(tmp.path(), &["solve", "--algo", "main", "-i", broken.to_str().unwrap()]);
    assert_eq!(data.status.code(), Some(2), "{}", stderr_of(&data));

    let starved = Command::new(env!("CARGO_BIN_EXE_ufpp"))
        .args(["solve", "--algo", "main", "-i", &input])
        .current_dir(tmp.path())
        .env("UFPP_STATE_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(starved.status.code(), Some(3), "{}", stderr_of(&starved));

    let bad_budget = Command::new(env!("CARGO_BIN_EXE_ufpp"))
        .args(["solve", "--algo", "main", "-i", &input])
        .current_dir(tmp.path())
        .env("UFPP_STATE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(bad_budget.status.code(), Some(2), "{}", stderr_of(&bad_budget));
}

#[test]
fn generated_instances_are_byte_identical_per_seed() {
    let tmp = TempDir::new().unwrap();
    let mut outs: Vec<String> = Vec::new();
    for name in ["a.ufpp", "b.ufpp"] {
        let path = tmp.path().join(name);
        let run = ufpp(tmp.path(), &[
            "gen", "random", "--n", "9", "--m", "6", "--maxcap", "30", "--maxdemand", "12",
            "--seed", "7", "-o", path.to_str().unwrap(),
        ]);
        assert!(run.status.success(), "{}", stderr_of(&run));
        outs.push(fs::read_to_string(&path).unwrap());
    }
    assert_eq!(outs[0], outs[1], "same seed, same bytes");
    assert!(outs[0].starts_with("ufpp v1\n"));

    let other = ufpp(tmp.path(), &["gen", "random", "--n", "9", "--m", "6", "--maxcap", "30",
        "--maxdemand", "12", "--seed", "8"]);
    assert!(other.status.success());
    assert_ne!(stdout_of(&other), outs[0], "different seed, different instance");
}

#[test]
fn hardness_generation_writes_instance_and_certificate() {
    let tmp = TempDir::new().unwrap();
    let graph = tmp.path().join("pair.graph");
    fs::write(&graph, "graph v1\nn 2\nedge 1 2\n").unwrap();
    let out = tmp.path().join("pair.ufpp");

    let run = ufpp(tmp.path(), &[
        "gen", "hardness", "--graph", graph.to_str().unwrap(), "-o", out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr_of(&run));
    let cert = fs::read_to_string(tmp.path().join("pair.ufpp.cert")).unwrap();
    assert_eq!(cert, "expected_opt = 17\n");

    // the certified value is what the exact solver finds
    let exact = ufpp(tmp.path(), &["exact", "--method", "sweep", "-i", out.to_str().unwrap()]);
    assert!(exact.status.success(), "{}", stderr_of(&exact));
    assert!(stdout_of(&exact).contains("\"profit\": 17"), "{}", stdout_of(&exact));

    // levelled capacities keep a certificate too, shifted by the dummies
    let flat = tmp.path().join("flat.ufpp");
    let run = ufpp(tmp.path(), &[
        "gen", "hardness", "--graph", graph.to_str().unwrap(), "--uniform",
        "-o", flat.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr_of(&run));
    let cert = fs::read_to_string(tmp.path().join("flat.ufpp.cert")).unwrap();
    assert_eq!(cert, "expected_opt = 122\n");
    let exact = ufpp(tmp.path(), &["exact", "--method", "sweep", "-i", flat.to_str().unwrap()]);
    assert!(stdout_of(&exact).contains("\"profit\": 122"), "{}", stdout_of(&exact));
}

#[test]
fn exact_methods_agree_and_the_its_method_lower_bounds_them() {
    let tmp = TempDir::new().unwrap();
    let input = write_sample(tmp.path());
    let profit = |method: &str| -> i64 {
        let run = ufpp(tmp.path(), &["exact", "--method", method, "-i", &input]);
        assert!(run.status.success(), "{method}: {}", stderr_of(&run));
        let doc = stdout_of(&run);
        let line = doc.lines().find(|l| l.contains("\"profit\"")).unwrap();
        line.trim().trim_start_matches("\"profit\":").trim_end_matches(',').trim().parse().unwrap()
    };
    let brute = profit("brute");
    let sweep = profit("sweep");
    let its = profit("its");
    assert_eq!(brute, sweep);
    assert!(its <= brute, "independent sets are a restriction of feasible sets");
    assert!(its > 0);
}

#[test]
fn rect_dumps_cover_every_task_and_the_capacity_profile() {
    let tmp = TempDir::new().unwrap();
    let input = write_sample(tmp.path());
    let rects = tmp.path().join("sample.rects");
    let run = ufpp(tmp.path(), &[
        "solve", "--algo", "main", "-i", &input, "--dump-rects", rects.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr_of(&run));
    let dump = fs::read_to_string(&rects).unwrap();
    let rect_lines = dump.lines().filter(|l| l.starts_with("rect ")).count();
    assert_eq!(rect_lines, 5, "one rectangle per task:\n{dump}");
    let profile_lines = dump.lines().filter(|l| l.starts_with("profile ")).count();
    assert_eq!(profile_lines, 10, "two polyline points per edge:\n{dump}");
}

#[test]
fn bench_writes_versioned_rows_and_refuses_augmented_runs() {
    let tmp = TempDir::new().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    for seed in [3u64, 4] {
        let path = corpus.join(format!("inst{seed}.ufpp"));
        let run = ufpp(tmp.path(), &[
            "gen", "random", "--n", "8", "--m", "5", "--maxcap", "25", "--maxdemand", "10",
            "--seed", &seed.to_string(), "-o", path.to_str().unwrap(),
        ]);
        assert!(run.status.success());
    }

    let csv = tmp.path().join("out.csv");
    let run = ufpp(tmp.path(), &[
        "bench", "--dir", corpus.to_str().unwrap(), "--algos", "main,fast,large",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", stderr_of(&run));
    let table = fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "version,instance,n,m,algorithm,profit,opt,ratio,wall_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6, "two instances times three algorithms:\n{table}");
    for row in &rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 9, "row shape: {row}");
        assert_eq!(cols[0], "1", "schema version column");
        let ratio: f64 = cols[7].parse().unwrap();
        assert!((0.0..=1.0).contains(&ratio), "ratio out of range: {row}");
    }
    // deterministic ordering: instances alphabetically, algorithms as given
    let keys: Vec<String> = rows
        .iter()
        .map(|r| {
            let c: Vec<&str> = r.split(',').collect();
            format!("{}/{}", c[1], c[4])
        })
        .collect();
    assert_eq!(
        keys,
        ["inst3/main", "inst3/fast", "inst3/large", "inst4/main", "inst4/fast", "inst4/large"],
    );

    let refused = ufpp(tmp.path(), &[
        "bench", "--dir", corpus.to_str().unwrap(), "--algos", "main,ra",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(refused.status.code(), Some(2), "{}", stderr_of(&refused));
    assert!(stderr_of(&refused).contains("ra"), "{}", stderr_of(&refused));
}
