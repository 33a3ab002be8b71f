//! End-to-end tests of the command-line surface: exit codes, file formats,
//! stdin input, and byte-reproducible output.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treegroups"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary finishes")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_main1_depth3() {
    let out = run(&["verify", "--theorem", "main-1", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("count=8"), "{text}");
    assert!(text.contains("summary=pass"));
}

#[test]
fn verify_rejects_unknown_theorem() {
    let out = run(&["verify", "--theorem", "nope", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn height_example() {
    let out = run(&[
        "height", "--depth", "3", "--vector", "1000", "--mode", "recursive",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("height=4"));
    let oracle = run(&["height", "--depth", "3", "--vector", "1000", "--mode", "oracle"]);
    assert!(stdout(&oracle).contains("height=4"));
}

#[test]
fn grigorchuk_quotient_pipes_into_hdim() {
    let q = run(&["automaton", "--name", "grigorchuk", "--quotient", "4"]);
    assert_eq!(q.status.code(), Some(0));
    let group_file = stdout(&q);
    assert!(group_file.starts_with("depth=4"));
    let h = run_stdin(&["hdim", "--pattern-file", "-"], &group_file);
    assert_eq!(h.status.code(), Some(0));
    let text = stdout(&h);
    assert!(text.contains("hdim=5/8"), "{text}");
}

#[test]
fn enumerate_exhaustive_depth2() {
    let out = run(&["enumerate", "--depth", "2", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("count=2"));
    assert!(text.contains("exhaustive_count=2"));
    assert!(text.contains("match=true"));
}

#[test]
fn additivity_counterexample_exits_one() {
    let q = run(&["automaton", "--name", "grigorchuk", "--quotient", "4"]);
    let group_file = stdout(&q);
    let out = run_stdin(
        &["additivity", "--pattern-file", "-", "--level", "4"],
        &group_file,
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("additive=false"));
    assert!(text.contains("witness_g="));
}

#[test]
fn additivity_certificate_exits_zero() {
    let pattern = "depth=3\nconstraint=00,01\nconstraint=10,11\n";
    let out = run_stdin(
        &["additivity", "--pattern-file", "-", "--level", "5"],
        pattern,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("additive=true"));
    assert!(text.contains("order=131072"));
}

#[test]
fn tfg_split_on_pattern_with_split_structure() {
    // the order-32 split extension at d=3: lower generators plus the
    // second-layer stabilizer, as an explicit element list
    let pattern = "depth=3\nconstraint=00,01\nconstraint=10,11\n";
    let out = run_stdin(
        &["tfg", "--pattern-file", "-", "--strategy", "bs", "--level", "4"],
        pattern,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict=proved-not-tfg"));
    assert!(text.contains("revalidated=true"));
}

#[test]
fn tfg_bs_inconclusive_on_family_group() {
    // the family k=1 depth-5 pattern group as constraints: the level union
    // {2,3,4} and the half-level functional set
    let mut words_j = Vec::new();
    for n in [2usize, 3, 4] {
        for v in 0..1usize << n {
            words_j.push(format!("{v:0width$b}", width = n));
        }
    }
    let mut s = vec!["00".to_string(), "01".to_string()];
    for v in 4..8usize {
        s.push(format!("{v:03b}"));
    }
    for v in 8..16usize {
        s.push(format!("{v:04b}"));
    }
    let pattern = format!(
        "depth=5\nconstraint={}\nconstraint={}\n",
        words_j.join(","),
        s.join(",")
    );
    let h = run_stdin(&["hdim", "--pattern-file", "-"], &pattern);
    assert!(stdout(&h).contains("reduced=7/8"));
    let out = run_stdin(
        &["tfg", "--pattern-file", "-", "--strategy", "bs", "--level", "5"],
        &pattern,
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict=inconclusive"));
    assert!(text.contains("level=5"));
}

#[test]
fn tfg_hom_on_quarter_group() {
    // d=4, J={3}: S is the 0-half of the top level
    let pattern = "depth=4\nconstraint=000,001,010,011\nconstraint=100,101,110,111\n";
    let out = run_stdin(
        &["tfg", "--pattern-file", "-", "--strategy", "hom"],
        pattern,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("verdict=proved-not-tfg"));
    assert!(text.contains("functional:"));
}

#[test]
fn filtration_output() {
    let group = "depth=3\ngenerators:\n1|00|0000\n0|10|0000\n0|00|1000\n";
    let out = run_stdin(&["filtration", "--depth", "3", "--group-file", "-"], group);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("dims=4,3,2,1,0"));
    assert!(text.contains("uniserial=true"));
}

#[test]
fn hdim_rejects_non_essential_with_exit_one() {
    // ker of the level-1 parity at depth 3 is not essential
    let pattern = "depth=3\nconstraint=0,1\n";
    let out = run_stdin(&["hdim", "--pattern-file", "-"], pattern);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn resource_cap_exits_three() {
    let out = run(&["enumerate", "--depth", "11"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["automaton", "--name", "grigorchuk", "--quotient", "13"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_error_exits_two() {
    let out = run(&["enumerate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["height", "--depth", "3", "--vector", "10", "--mode", "recursive"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["enumerate", "--depth", "3"],
        vec!["verify", "--theorem", "heights", "--depth", "3"],
        vec!["automaton", "--name", "family", "--k", "1", "--report"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.stdout, b.stdout, "args {args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn json_mode_carries_the_same_values() {
    let text = run(&["height", "--depth", "4", "--vector", "10000000", "--mode", "recursive"]);
    let json = run(&[
        "--json", "height", "--depth", "4", "--vector", "10000000", "--mode", "recursive",
    ]);
    assert_eq!(json.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let h_text = stdout(&text)
        .lines()
        .find_map(|l| l.strip_prefix("height=").map(str::to_owned))
        .unwrap();
    assert_eq!(doc["height"], serde_json::Value::String(h_text));
}

#[test]
fn enumerate_output_rebuilds_pattern_files() {
    // each enumerated group's canonical constraints feed back through the
    // pattern-file surface
    let out = run(&["enumerate", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let mut seen = 0;
    for line in stdout(&out).lines() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        if !key.starts_with("group.") {
            continue;
        }
        seen += 1;
        let mut pattern = String::from("depth=3\n");
        for words in value.split(';') {
            pattern.push_str(&format!("constraint={words}\n"));
        }
        let h = run_stdin(&["hdim", "--pattern-file", "-"], &pattern);
        assert_eq!(h.status.code(), Some(0), "{pattern}");
        assert!(stdout(&h).contains("reduced=1/2"), "{pattern}");
    }
    assert_eq!(seen, 8);
}

#[test]
fn automaton_export_reloads() {
    let out = run(&["automaton", "--name", "family", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("state r0 1 e e"));
    assert!(text.contains("state b2 0 e b0"));
    assert_eq!(text.lines().count(), 7);
}
