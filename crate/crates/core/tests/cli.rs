// Copyright 2026 The chsh-concepts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chsh_concepts::io::{bundled, read_experiment, read_solution};
use chsh_concepts::{solve_suite, Execution, SolverKind};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chsh-concepts"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn chsh_text_and_json() {
    let o = run(&["chsh", p(&data("google_books.json"))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("|S| = 3.41"), "{text}");
    assert!(text.contains("ExceedsTsirelson"));

    let o = run(&["chsh", p(&data("collocates.json")), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["s"].as_f64().unwrap() - 2.8).abs() < 1e-12);
    assert_eq!(v["classification"], "ViolatedWithinTsirelson");
    assert!((v["expectations"]["ApB"].as_f64().unwrap() + 0.2).abs() < 1e-12);
}

#[test]
fn count_is_deterministic_and_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gb.json");
    let corpus = data("corpus/google_books");
    let query = data("animal_acts_query.json");

    let a = run(&["count", p(&corpus), p(&query), "--name", "gb"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let b = run(&["count", p(&corpus), p(&query), "--name", "gb", "--out", p(&out)]);
    assert_eq!(b.status.code(), Some(0));
    assert!(stdout(&b).contains("horse whinnies 464"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&a));

    let suite = read_experiment(&out).unwrap();
    assert_eq!(suite.name, "gb");
    let counts = suite.table(chsh_concepts::Setting::ApB).unwrap().counts();
    assert_eq!(counts, Some([97, 0, 41, 0]));
}

#[test]
fn empty_corpus_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["count", p(dir.path()), p(&data("animal_acts_query.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty coincidence operation"), "{}", stderr(&o));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"name\": \"x\"").unwrap();
    assert_eq!(run(&["chsh", p(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["chsh", p(&dir.path().join("missing.json"))]).status.code(), Some(2));

    // probabilities summing to 0.9
    std::fs::write(
        &bad,
        std::fs::read_to_string(data("collocates.json"))
            .unwrap()
            .replacen("0.8", "0.7", 1),
    )
    .unwrap();
    let o = run(&["chsh", p(&bad)]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn solve_writes_a_solution_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    for solver in ["auto", "constructive", "ansatz"] {
        let out = dir.path().join(format!("{solver}.json"));
        let o = run(&[
            "solve",
            p(&data("google_books.json")),
            "--solver",
            solver,
            "--out",
            p(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).contains("verification at strict profile: PASS"));

        let v = run(&["verify", p(&out), p(&data("google_books.json"))]);
        assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

        let kind: SolverKind = solver.parse().unwrap();
        let direct = solve_suite(
            &chsh_concepts::singlet_state(),
            &bundled::google_books(),
            kind,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(read_solution(&out).unwrap(), direct);
    }
}

#[test]
fn solve_json_summary_reports_schmidt_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&[
        "solve",
        p(&data("collocates.json")),
        "--format",
        "json",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let fams = v["families"].as_array().unwrap();
    assert_eq!(fams.len(), 4);
    for f in fams {
        assert_eq!(f["product_eigenstates"], 2);
        let e = &f["eigenvectors"][0]["schmidt"];
        assert!(e["entropy_bits"].is_number() && e["det_abs"].is_number());
    }
}

#[test]
fn ansatz_with_non_singlet_state_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    std::fs::write(&state, "[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]").unwrap();
    let o = run(&[
        "solve",
        p(&data("google_books.json")),
        "--solver",
        "ansatz",
        "--state",
        p(&state),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("solve_constructive"), "{}", stderr(&o));

    let o = run(&["roundtrip", p(&data("google_books.json")), "--state", p(&state)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_profiles() {
    let gb = data("google_books.json");
    let quoted = run(&["verify", p(&data("google_books_solution.json")), p(&gb), "--profile", "quoted"]);
    assert_eq!(quoted.status.code(), Some(0));
    let strict = run(&["verify", p(&data("google_books_solution.json")), p(&gb)]);
    assert_eq!(strict.status.code(), Some(1));

    let printed = run(&[
        "verify",
        p(&data("google_books_solution_printed.json")),
        p(&gb),
        "--profile",
        "quoted",
        "--format",
        "json",
    ]);
    assert_eq!(printed.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&printed)).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["checks_per_family"], 14);
}

#[test]
fn roundtrip_reproduces_data_chsh() {
    for file in ["google_books.json", "collocates.json"] {
        let o = run(&["roundtrip", p(&data(file)), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v["s_difference"].as_f64().unwrap() <= 1e-9);
        assert_eq!(v["pass"], true);
    }
}
