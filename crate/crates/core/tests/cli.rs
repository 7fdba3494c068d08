use std::path::Path;
use std::process::Command;

fn linq(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_linq"))
        .args(args)
        .current_dir(dir)
        .env("LINQ_THREADS", "1")
        .output()
        .expect("spawn linq");
    assert!(
        out.status.success(),
        "linq {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn pipeline(dir: &Path) {
    linq(
        dir,
        &[
            "gen",
            "--n",
            "12",
            "--count",
            "6",
            "--seed",
            "4",
            "--out",
            "lay.jsonl",
        ],
    );
    linq(
        dir,
        &[
            "gen",
            "--n",
            "12",
            "--count",
            "3",
            "--seed",
            "5",
            "--channel",
            "realistic",
            "--out",
            "real.jsonl",
        ],
    );
    linq(
        dir,
        &[
            "schedule",
            "--method",
            "itlinq+",
            "--layouts",
            "lay.jsonl",
            "--out",
            "itp.csv",
        ],
    );
    linq(
        dir,
        &[
            "power",
            "--method",
            "wmmse",
            "--layouts",
            "real.jsonl",
            "--out",
            "wm.csv",
        ],
    );
    let small = [
        "--updates",
        "3",
        "--layers",
        "2",
        "--hidden",
        "8",
        "--episodes",
        "4",
        "--quiet",
    ];
    let mut ls = vec!["train", "--layouts", "lay.jsonl", "--out", "ls.json"];
    ls.extend(small);
    linq(dir, &ls);
    let mut pc = vec![
        "train",
        "--task",
        "pc",
        "--layouts",
        "lay.jsonl",
        "--out",
        "pc.json",
    ];
    pc.extend(small);
    linq(dir, &pc);
    linq(
        dir,
        &[
            "schedule",
            "--method",
            "grlinq",
            "--model",
            "ls.json",
            "--layouts",
            "lay.jsonl",
            "--out",
            "gr.csv",
        ],
    );
    linq(
        dir,
        &[
            "eval",
            "--methods",
            "all,greedy,fplinq,wmmse,grlinq,joint",
            "--model",
            "ls.json",
            "--pc-model",
            "pc.json",
            "--layouts",
            "lay.jsonl",
            "--out",
            "report",
        ],
    );
}

#[test]
fn missing_required_flag_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_linq"))
        .args(["gen", "--n", "5"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn every_command_reruns_byte_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        pipeline(d);
    }
    let files = [
        "lay.jsonl",
        "real.jsonl",
        "itp.csv",
        "wm.csv",
        "ls.json",
        "ls.log.csv",
        "pc.json",
        "pc.log.csv",
        "gr.csv",
        "report/summary.csv",
        "report/per_layout.csv",
        "report/cdf.csv",
    ];
    for f in files {
        let x = std::fs::read(a.path().join(f)).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn config_file_feeds_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.toml"),
        "seed = 9\n[gen]\nn = 7\ncount = 2\n",
    )
    .unwrap();
    linq(
        dir.path(),
        &["--config", "c.toml", "gen", "--out", "x.jsonl"],
    );
    linq(
        dir.path(),
        &[
            "--config", "c.toml", "gen", "--count", "3", "--out", "y.jsonl",
        ],
    );
    let x = std::fs::read_to_string(dir.path().join("x.jsonl")).unwrap();
    let y = std::fs::read_to_string(dir.path().join("y.jsonl")).unwrap();
    assert_eq!(x.lines().count(), 2);
    assert_eq!(y.lines().count(), 3);
    assert!(y.starts_with(&x));
}
