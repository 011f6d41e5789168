use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convbound")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("convbound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn help_lists_exit_codes() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("exponent"));
    assert!(text.contains("Exit codes"), "{text}");
}

#[test]
fn exponent_csv_has_growth_and_summary_blocks() {
    let o = run(&["--format", "csv", "exponent", "--space", "f2", "--nmax", "14"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    let growth: Vec<&str> = blocks[0].lines().collect();
    assert_eq!(growth[0], "schema,record,n,count,quotient");
    assert_eq!(growth.len(), 16);
    // |S(14)| = 4·3^13
    let last: Vec<&str> = growth[15].split(',').collect();
    assert_eq!(last[3], (4u128 * 3u128.pow(13)).to_string());

    let mut summary = blocks[1].lines();
    let header: Vec<&str> = summary.next().unwrap().split(',').collect();
    let row: Vec<&str> = summary.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "omega_hat").unwrap();
    let omega: f64 = row[col].parse().unwrap();
    assert!((omega - (4.0 * 3f64.powi(13)).ln() / 14.0).abs() < 1e-12);
}

#[test]
fn jsonl_records_carry_the_schema() {
    let o = run(&["exponent", "--nmax", "4"]);
    assert!(o.status.success());
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["schema"], "convbound/1");
        assert!(v["record"].is_string());
    }
}

#[test]
fn malformed_config_names_the_field() {
    let p = temp_file("bad.toml", "schema = \"convbound/1\"\n[command]\nname = \"exponent\"\nnmaxx = 3\n");
    let o = run(&["--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nmaxx"));

    let p = temp_file("schema.toml", "schema = \"convbound/9\"\n[command]\nname = \"exponent\"\n");
    assert_eq!(run(&["--config", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn emitted_config_round_trips() {
    let direct = run(&["exponent", "--space", "z2", "--nmax", "9"]);
    let emitted = run(&["--emit-config", "exponent", "--space", "z2", "--nmax", "9"]);
    assert!(emitted.status.success());
    let p = temp_file("round.toml", &stdout(&emitted));
    let replay = run(&["--config", p.to_str().unwrap()]);
    assert!(replay.status.success());
    assert_eq!(stdout(&direct), stdout(&replay));
}

#[test]
fn failed_verdict_exits_one() {
    let o = run(&["certify", "--space", "z2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["certify", "--space", "f2"]);
    assert!(o.status.success());
}

#[test]
fn bad_space_is_a_usage_error() {
    let o = run(&["exponent", "--space", "nowhere"]);
    assert_eq!(o.status.code(), Some(2));
}
