use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn zerogap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerogap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn sample_matches_frozen_fixture() {
    let o = zerogap(&["sample", "--q", "3", "--eps", "0.25", "--seed", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "Q 8");
    let erased: Vec<&str> = body.iter().copied().filter(|l| l.starts_with("ERASE")).collect();
    assert_eq!(&erased[..4], &["ERASE 0 0", "ERASE 0 4", "ERASE 2 6", "ERASE 3 3"]);
    let ch: zerogap_core::Channel = text.parse().unwrap();
    assert_eq!(ch, zerogap_core::channel::sample_erasure_identity(8, 0.25, 7).unwrap());
}

#[test]
fn sample_edge_cases() {
    let o = zerogap(&["sample", "--q", "2", "--eps", "0", "--seed", "3"]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains("ERASE"));
    let o = zerogap(&["sample", "--eps", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn exact_campaign_rows() {
    let o = zerogap(&["exact", "--n", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.ends_with("true,true")));
    assert!(rows[0].starts_with("mask0,0,1,2,4,"));
    assert!(rows[15].starts_with("mask15,4,1,0,0,"));
    let o = zerogap(&["exact", "--n", "5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bpis_of_identity() {
    let o = zerogap(&["bpis", "--channel", "identity(3)", "--n", "2"]);
    assert!(o.status.success());
    assert!(data_rows(&stdout(&o))[0].starts_with("2,81,"));
}

#[test]
fn random_bpis_sweep_rate_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    for out in [&a, &b] {
        let o = zerogap(&[
            "prop5-sweep",
            "--q",
            "3",
            "--eps",
            "0.25",
            "--trials",
            "200",
            "--seed",
            "1",
            "--out",
            out,
        ]);
        assert!(o.status.success());
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let footer = text.lines().last().unwrap();
    let rate: f64 = footer.rsplit(',').next().unwrap().parse().unwrap();
    assert!(footer.starts_with("rate,") && rate >= 0.75);

    let o = zerogap(&["prop5-sweep", "--q", "2", "--eps", "1", "--trials", "1"]);
    let text = stdout(&o);
    assert!(data_rows(&text)[0].ends_with(",true"));
}

#[test]
fn upper_bound_sweep_at_two() {
    let o = zerogap(&["theorem3-sweep", "--q", "4", "--n", "3", "--gamma", "0.5,1"]);
    assert!(o.status.success());
    for row in data_rows(&stdout(&o)) {
        let f: Vec<&str> = row.split(',').collect();
        if f[1] == "2" {
            let (q, g, v): (f64, f64, f64) = (f[0].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap());
            assert_eq!(v, q * (1.0 + g));
        }
    }
}

#[test]
fn uniform_construct_verdicts() {
    let o = zerogap(&["uniform-construct", "--n", "8", "--gamma", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(data_rows(&text)[0].contains(",74,36,"));
    assert!(data_rows(&text)[0].contains(",proved,"));
    let o = zerogap(&[
        "uniform-construct",
        "--alphabet",
        "3",
        "--n",
        "27",
        "--gamma",
        "1",
        "--budget",
        "2000",
    ]);
    assert!(o.status.success());
    assert!(data_rows(&stdout(&o))[0].contains(",24859,"));
    assert!(stdout(&o).contains(",audited,2000,"));
}

#[test]
fn pipeline_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let code = path(dir.path(), "code.txt");
    let o = zerogap(&[
        "pipeline",
        "--q",
        "2",
        "--n",
        "64",
        "--eps",
        "0.05",
        "--gamma",
        "1",
        "--slack",
        "0.01",
        "--trials",
        "3",
        "--seed",
        "4",
        "--code-out",
        &code,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",true,ok,")));

    let channel = path(dir.path(), "channel.txt");
    let o = zerogap(&["sample", "--q", "2", "--eps", "0.05", "--seed", "11", "--out", &channel]);
    assert!(o.status.success());
    let o = zerogap(&["verify", "--channel", &channel, "--code", &code]);
    assert!(o.status.success());
    assert!(data_rows(&stdout(&o))[0].contains(",ok,"));
    let o = zerogap(&["verify", "--channel", "identity(4)", "--code", &code]);
    assert!(o.status.success());
}

#[test]
fn pipeline_eps_zero_is_trivially_ok() {
    let o = zerogap(&[
        "pipeline", "--q", "1", "--n", "8", "--eps", "0", "--slack", "0.000001", "--trials", "2",
    ]);
    assert!(o.status.success());
    assert!(data_rows(&stdout(&o)).iter().all(|r| r.contains(",74,36,")));
}

#[test]
fn adversarial_override_reports_collision() {
    let o = zerogap(&[
        "pipeline", "--q", "1", "--n", "4", "--eps", "0.5", "--raw-d", "0", "--trials", "8", "--budget", "64",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("collision"));
    assert!(stdout(&o).contains("give the same output"));
}

#[test]
fn bounds_eval_and_exit_codes() {
    let o = zerogap(&["bounds", "eval", "upper_bound", "--params", "q=20,n=4,gamma=0.5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("upper_bound,q=20;n=4;gamma=0.5,45,true,"));
    let o = zerogap(&["bounds", "eval", "time_share_delta", "--params", "eps=1,n=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains(",inf,false,"));
    let o = zerogap(&["bounds", "eval", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = zerogap(&["bounds", "list"]);
    assert!(stdout(&o).lines().any(|l| l == "biclique_rate"));
}
