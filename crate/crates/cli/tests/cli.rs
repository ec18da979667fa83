//! End-to-end checks of the binary: exit codes, format consistency, and
//! byte-identical output across thread counts.

use std::process::{Command, Output};

fn hlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlc"))
        .args(args)
        .env_remove("HLC_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn constant_twin_pattern() {
    let out = hlc(&["constant", "--pattern", "0,2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"value\": 1.32032363169e0"), "{text}");
    assert!(text.contains("\"admissible\": true"));
}

#[test]
fn constant_pair_240() {
    let out = hlc(&["constant", "--pattern", "0,240", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value,3.52086301785e0"), "{text}");
}

#[test]
fn inadmissible_pattern_exits_2_with_witness() {
    let out = hlc(&["constant", "--pattern", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("inadmissible: covers residues mod 2"));
}

#[test]
fn parse_error_exits_1_with_position() {
    let out = hlc(&["constant", "--pattern", "0,2,x"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("byte 4"), "{err}");
}

#[test]
fn usage_error_exits_1() {
    let out = hlc(&["constant"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hlc(&["asymptotics", "--mode", "assertion1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--q-points"));
}

#[test]
fn help_exits_0() {
    let out = hlc(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn h_stats_ceiling_exits_1() {
    let out = hlc(&["h-stats", "--n-max", "10000001"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ceiling"));
}

#[test]
fn census_capacity_exits_3() {
    let out = hlc(&["census", "--pattern", "0,2", "--x", "100000001"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_removal_step_exits_1_naming_the_step() {
    let out = hlc(&[
        "symmetric-table",
        "--pattern",
        "0,2,6,8",
        "--removal-order",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("removal step 1"), "{}", stderr(&out));
}

#[test]
fn asymmetric_start_pattern_exits_2() {
    let out = hlc(&["symmetric-table", "--pattern", "0,2,6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let args = ["census", "--pattern", "0,2", "--x", "10000", "--checkpoints", "1000"];
    let json = stdout(&hlc(&args));
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv = stdout(&hlc(&csv_args));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["x", "observed", "cramer", "parity", "hl_ratio", "hl_integral"]);
    for line in lines {
        for field in line.split(',') {
            assert!(json.contains(field), "CSV field {field} missing from JSON:\n{json}");
        }
    }
}

#[test]
fn json_output_is_deterministic() {
    let args = ["h-stats", "--n-max", "5000", "--moments", "1"];
    let a = stdout(&hlc(&args));
    let b = stdout(&hlc(&args));
    assert_eq!(a, b);
    assert!(a.contains("\"command\": \"h-stats\""));
}

#[test]
fn thread_count_does_not_change_census_bytes() {
    let base = stdout(&hlc(&[
        "census", "--pattern", "0,2,6,8", "--x", "3000000", "--checkpoints", "1000000",
        "--threads", "1",
    ]));
    for threads in ["4", "8"] {
        let other = stdout(&hlc(&[
            "census", "--pattern", "0,2,6,8", "--x", "3000000", "--checkpoints", "1000000",
            "--threads", threads,
        ]));
        assert_eq!(base, other, "threads = {threads}");
    }
}

#[test]
fn thread_env_var_matches_flag() {
    let flag = stdout(&hlc(&["h-stats", "--n-max", "2000000", "--threads", "4"]));
    let env = Command::new(env!("CARGO_BIN_EXE_hlc"))
        .args(["h-stats", "--n-max", "2000000"])
        .env("HLC_THREADS", "4")
        .output()
        .expect("binary runs");
    assert_eq!(flag, String::from_utf8(env.stdout).unwrap());
}

#[test]
fn h_stats_ten_reports_the_tiny_max() {
    let out = hlc(&["h-stats", "--n-max", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"argmax\": 3"), "{text}");
    assert!(text.contains("\"numerator\": 2"));
    assert!(text.contains("\"denominator\": 1"));
    // moment scans need more mass and are omitted below 1000
    assert!(text.contains("\"moments\": []"));
}

#[test]
fn census_ten_counts_two_twin_starts() {
    let out = hlc(&["census", "--pattern", "0,2", "--x", "10", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().nth(1).unwrap().starts_with("10,2,"), "{text}");
}

#[test]
fn constant_accepts_custom_truncation() {
    let out = hlc(&["constant", "--pattern", "0,2", "--truncation", "10000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"truncation_prime\": 10000"), "{text}");
    // a truncation below the diameter is rejected as a domain error
    let bad = hlc(&["constant", "--pattern", "0,240", "--truncation", "100"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn distribution_file_has_expected_columns() {
    let dir = std::env::temp_dir().join("hlc-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dist.csv");
    let out = hlc(&[
        "h-stats",
        "--n-max",
        "1000",
        "--distribution",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let content = std::fs::read_to_string(&path).unwrap();
    let mut lines = content.lines();
    assert_eq!(lines.next().unwrap(), "numerator,denominator,frequency");
    // first value is h = 1 with frequency 1 + floor(log2(1000)) = 10
    assert_eq!(lines.next().unwrap(), "1,1,10");
}

#[test]
fn sequence_scan_csv_shape() {
    let out = hlc(&[
        "asymptotics", "--mode", "sequence", "--sequence", "power_of_two", "--n-max", "5",
        "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,d_description,c_value");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("1,2,"));
    // constant column: all five points identical
    let c: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect();
    assert!(c.iter().all(|&v| v == c[0]));
}

#[test]
fn assertion1_mode_emits_the_constant_warning() {
    let out = hlc(&["asymptotics", "--mode", "assertion1", "--q-points", "10000,100000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1.348966"), "{text}");
    assert!(text.contains("warnings"));
    assert!(text.contains("2 percent"));
}
