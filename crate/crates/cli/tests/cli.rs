use std::process::{Command, Output};

use sepbound::separating::{group_report, GroupReport};
use sepbound::verify::CSV_HEADER;
use sepbound::{AbelianGroup, BetaSepOptions};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepbound"))
        .args(args)
        .env_remove("SEPBOUND_MAX_ORDER")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn betasep_json_matches_library() {
    for f in [&[2u64, 2][..], &[4, 2], &[3, 3], &[7]] {
        let arg = f.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        let out = run(&["betasep", "--group", &arg]);
        assert_eq!(out.status.code(), Some(0));
        let parsed: GroupReport = serde_json::from_str(&stdout(&out)).unwrap();
        let group = AbelianGroup::new(f).unwrap();
        assert_eq!(
            parsed,
            group_report(&group, &BetaSepOptions::default(), Some(32)).unwrap()
        );
    }
}

#[test]
fn worker_count_does_not_change_output() {
    for args in [
        &["betasep", "--group", "6,2", "--per-subset"][..],
        &["--aut-reduction", "betasep", "--group", "2,2,2"],
        &["--format", "csv", "verify-main", "--max-order", "12"],
        &["--max-order", "8", "cross-validate", "--random", "30"],
    ] {
        let one = run(&[&["--workers", "1"][..], args].concat());
        let many = run(&[&["--workers", "4"][..], args].concat());
        assert_eq!(one.status.code(), Some(0), "{args:?}");
        assert_eq!(one.stdout, many.stdout, "{args:?}");
    }
}

#[test]
fn csv_header_and_rows() {
    let out = run(&["--format", "csv", "verify-main", "--max-order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines.contains(&"2,2;4;2;2;3;3;true;false"));
    assert_eq!(lines.len(), 6);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["betasep", "--group", "2,x"]).status.code(), Some(2));
    assert_eq!(run(&["betasep"]).status.code(), Some(2));
    assert_eq!(
        run(&["--format", "csv", "betasep", "--group", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["decompose", "--group", "3", "--chars", "1;1", "--vector=1,0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cap_errors_exit_3() {
    assert_eq!(run(&["betasep", "--group", "6,6"]).status.code(), Some(3));
    assert_eq!(
        run(&["--max-rank", "2", "betasep", "--group", "2,2,2"]).status.code(),
        Some(3)
    );
}

#[test]
fn max_order_from_environment() {
    let capped = Command::new(env!("CARGO_BIN_EXE_sepbound"))
        .args(["betasep", "--group", "3,2"])
        .env("SEPBOUND_MAX_ORDER", "4")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_sepbound"))
        .args(["--max-order", "8", "betasep", "--group", "3,2"])
        .env("SEPBOUND_MAX_ORDER", "4")
        .output()
        .unwrap();
    assert_eq!(flag_wins.status.code(), Some(0));
}

#[test]
fn decompose_at_dstar_in_equality_case_is_expected_failure() {
    let out = run(&[
        "decompose",
        "--group",
        "2,2",
        "--chars",
        "1,0;1,1;0,1",
        "--vector=1,1,1",
        "--bound",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no bounded relation"));
}

#[test]
fn decompose_reconstructs() {
    let out = run(&[
        "decompose",
        "--group",
        "3,3",
        "--chars",
        "1,0;0,1;1,1",
        "--vector=2,2,1",
        "--bound",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mut acc = [0i64; 3];
    for term in v["terms"].as_array().unwrap() {
        let c = term["coefficient"].as_i64().unwrap();
        let m: Vec<i64> = term["vector"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_i64().unwrap())
            .collect();
        assert!(m.iter().sum::<i64>() <= 4);
        for (a, x) in acc.iter_mut().zip(m) {
            *a += c * x;
        }
    }
    assert_eq!(acc, [2, 2, 1]);
}
