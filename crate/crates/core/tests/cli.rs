use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_randcomp"));
    cmd.env_remove("RANDCOMP_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn sample_is_seeded_and_sized() {
    let a = run(&["sample", "--uniform", "n=12", "m=30", "--count", "5", "--seed", "9"]);
    assert!(a.status.success());
    let b = run(&["sample", "--uniform", "n=12", "m=30", "--count", "5", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        let terms: Vec<u64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!((terms.len(), terms.iter().sum::<u64>()), (12, 30));
    }
    let env = bin()
        .args(["sample", "--uniform", "n=12", "m=30", "--count", "5"])
        .env("RANDCOMP_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn stats_and_match_on_figure_one() {
    let fig = randcomp::figures::figure1().to_string();
    let o = run(&["stats", &fig]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["components"].as_u64(), v["cmax"].as_u64()), (Some(10), Some(7)));
    assert_eq!((v["gaps"].as_u64(), v["gmax"].as_u64()), (Some(10), Some(4)));
    assert_eq!((v["size"].as_u64(), v["largest_square"].as_u64()), (Some(80), Some(4)));
    assert_eq!(v["square_counts"], serde_json::json!({"2": 2, "4": 1}));
    let m = run(&["match", "0211013", "o:[0,2,1,1]"]);
    let v: serde_json::Value = serde_json::from_slice(&m.stdout).unwrap();
    assert_eq!(v["count"], 1);
    assert_eq!(v["exists"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["match", "0211", "o:[0,2"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let unsupported = run(&["oracle", "geometric", "n=10", "p=0.3", "--statistic", "all_distinct"]);
    assert_eq!(unsupported.status.code(), Some(2), "{}", String::from_utf8_lossy(&unsupported.stderr));
}

#[test]
fn theory_and_oracle_print_json() {
    let t = run(&["theory", "expected-components", "n=100", "p=0.5"]);
    assert!(t.status.success(), "{}", String::from_utf8_lossy(&t.stderr));
    let v: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - (0.5 + 99.0 * 0.25)).abs() < 1e-9, "{v}");
    let o = run(&["oracle", "uniform", "n=4", "m=3", "--pattern", "u:[1,1]"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.to_string().contains("/"), "{v}");
}

#[test]
fn render_ascii() {
    let o = run(&["render", "012"]);
    assert_eq!(stdout(&o), "  #\n ##\n---\n");
}

#[test]
fn sweep_output_is_independent_of_workers() {
    let path = data("sweep_small.json");
    let outs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|w| {
            let o = run(&["sweep", &path, "--workers", w]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            o.stdout
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.starts_with("n,m_or_p,trials,p_hat,ci_low,ci_high,theory,abs_diff,seconds\n"));
    assert_eq!(text.lines().count(), 7);

    let mut child = bin().args(["sweep", "-", "--workers", "2"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(std::fs::read_to_string(&path).unwrap().as_bytes()).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert_eq!(piped.stdout, outs[0]);
}
