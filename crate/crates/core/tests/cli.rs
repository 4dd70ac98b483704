use std::path::Path;
use std::process::{Command, Output};

use dramcam::cam::{CamArray, Mode, Query, SearchKind};
use dramcam::dram::Trace;
use dramcam::DeviceConfig;

fn dramcam(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dramcam"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = dramcam(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_line(out: &Output) -> String {
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    err
}

const CFG: &str = "rows_per_subarray = 512\ncols_per_subarray = 1024\n";

fn kmer_db(dir: &Path, seed: &str, name: &str) {
    std::fs::write(dir.join("g.cfg"), CFG).unwrap();
    ok(
        dir,
        &[
            "--seed",
            seed,
            "gen-reference",
            "--taxa",
            "3",
            "--length",
            "200",
            "--out",
            &format!("{name}.fa"),
        ],
    );
    ok(
        dir,
        &[
            "--config",
            "g.cfg",
            "build-db",
            "--reference",
            &format!("{name}.fa"),
            "--k",
            "32",
            "--db",
            &format!("{name}.img"),
        ],
    );
}

#[test]
fn same_seed_gives_identical_images() {
    let d = tempfile::tempdir().unwrap();
    kmer_db(d.path(), "5", "a");
    kmer_db(d.path(), "5", "b");
    kmer_db(d.path(), "6", "c");
    let read = |n: &str| std::fs::read(d.path().join(n)).unwrap();
    assert_eq!(read("a.fa"), read("b.fa"));
    assert_eq!(read("a.img"), read("b.img"));
    assert_eq!(read("a.img.manifest"), read("b.img.manifest"));
    assert_ne!(read("a.img"), read("c.img"));
}

#[test]
fn classify_output_is_deterministic_and_order_preserving() {
    let d = tempfile::tempdir().unwrap();
    kmer_db(d.path(), "2", "db");
    let fa = std::fs::read_to_string(d.path().join("db.fa")).unwrap();
    let seqs: Vec<String> = fa.split('>').skip(1).map(|r| r.lines().skip(1).collect()).collect();
    let queries: Vec<&str> = vec![
        &seqs[2][10..42],
        &seqs[0][0..32],
        "ACGTACGTACGTACGTACGTACGTACGTACGT",
        &seqs[1][100..132],
    ];
    std::fs::write(d.path().join("q.txt"), queries.join("\n")).unwrap();
    let serial = ok(
        d.path(),
        &["--config", "g.cfg", "classify", "--db", "db.img", "--queries", "q.txt"],
    );
    let parallel = ok(
        d.path(),
        &[
            "--config",
            "g.cfg",
            "--parallel",
            "3",
            "classify",
            "--db",
            "db.img",
            "--queries",
            "q.txt",
        ],
    );
    assert_eq!(serial, parallel);
    let rows: Vec<&str> = serial.lines().skip(1).take(4).collect();
    assert!(
        rows[0].starts_with(queries[0]) && rows[0].ends_with(",taxon2"),
        "{rows:?}"
    );
    assert!(rows[1].ends_with(",taxon0"));
    assert!(rows[2].ends_with(",,"));
    assert!(rows[3].ends_with(",taxon1"));

    ok(
        d.path(),
        &[
            "--config",
            "g.cfg",
            "classify",
            "--db",
            "db.img",
            "--queries",
            "q.txt",
            "--mode",
            "hd1",
            "--report",
            "r.json",
        ],
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(v["queries"], 4);
    assert!(v["latency_ns"].as_f64().unwrap() > 0.0);
}

#[test]
fn emitted_trace_reparses_to_the_compiled_compare() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("w.txt"), "0101\n1X00\n0000\n").unwrap();
    std::fs::write(d.path().join("q.txt"), "1100\n").unwrap();
    ok(d.path(), &["build-db", "--words", "w.txt", "--db", "w.img"]);
    let out = ok(
        d.path(),
        &[
            "search",
            "--db",
            "w.img",
            "--queries",
            "q.txt",
            "--mode",
            "tcam",
            "--emit-trace",
            "t.txt",
        ],
    );
    assert_eq!(out, "0 010 match_is_1\n");
    let emitted = Trace::parse(&std::fs::read_to_string(d.path().join("t.txt")).unwrap()).unwrap();

    let mut cam = CamArray::new(&DeviceConfig::default(), 4, Mode::Nand).unwrap();
    cam.store(&[
        "0101".parse().unwrap(),
        "1X00".parse().unwrap(),
        "0000".parse().unwrap(),
    ])
    .unwrap();
    let q: Query = "1100".parse().unwrap();
    assert_eq!(emitted, cam.compile(&q, SearchKind::Tcam).unwrap().trace);
}

#[test]
fn faults_exit_nonzero_with_one_coded_line() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("w.txt"), "0101\n1X00\n").unwrap();
    std::fs::write(d.path().join("q.txt"), "11\n").unwrap();
    ok(d.path(), &["build-db", "--words", "w.txt", "--db", "w.img"]);

    let e = error_line(&dramcam(d.path(), &["search", "--db", "w.img", "--queries", "q.txt"]));
    assert!(e.starts_with("error[E_LENGTH]"), "{e}");
    std::fs::write(d.path().join("q.txt"), "1100\n").unwrap();
    let e = error_line(&dramcam(
        d.path(),
        &["search", "--db", "w.img", "--queries", "q.txt", "--mode", "nor"],
    ));
    assert!(e.starts_with("error[E_MODE]"), "{e}");
    let e = error_line(&dramcam(
        d.path(),
        &["search", "--db", "missing.img", "--queries", "q.txt"],
    ));
    assert!(e.starts_with("error[E_IO]"), "{e}");
    std::fs::write(d.path().join("bad.img"), b"not an image").unwrap();
    let e = error_line(&dramcam(d.path(), &["search", "--db", "bad.img", "--queries", "q.txt"]));
    assert!(e.starts_with("error[E_"), "{e}");
    std::fs::write(d.path().join("bad.cfg"), "rows_per_subarray = 7\n").unwrap();
    let e = error_line(&dramcam(d.path(), &["--config", "bad.cfg", "bench"]));
    assert!(e.starts_with("error[E_CONFIG]"), "{e}");
    std::fs::write(d.path().join("bad.cfg"), "no_such_key = 1\n").unwrap();
    let e = error_line(&dramcam(d.path(), &["--config", "bad.cfg", "bench"]));
    assert!(e.starts_with("error[E_PARSE]"), "{e}");

    let usage = dramcam(
        d.path(),
        &["search", "--db", "w.img", "--queries", "q.txt", "--mode", "xor"],
    );
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn bench_prints_assumptions_and_writes_report() {
    let d = tempfile::tempdir().unwrap();
    let out = ok(d.path(), &["bench", "--report", "b.json"]);
    assert!(out.contains("estimated throughput"));
    assert!(out.contains("assumptions:"));
    assert!(out.contains("search share of latency"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("b.json")).unwrap()).unwrap();
    let g = v["throughput"]["kmers_per_sec"].as_f64().unwrap() / 1e9;
    assert!((14.9..=1490.0).contains(&g), "{g}");
    let narrow = ok(d.path(), &["bench", "--geometry", "narrow"]);
    assert!(narrow.contains("each compare covers 64 k-mers"), "{narrow}");
}

#[test]
fn printed_config_loads_back() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(
        d.path().join("in.cfg"),
        "rows_per_subarray = 256\ninclude_refresh = true\n",
    )
    .unwrap();
    let text = ok(d.path(), &["--config", "in.cfg", "print-config"]);
    std::fs::write(d.path().join("out.cfg"), &text).unwrap();
    assert_eq!(ok(d.path(), &["--config", "out.cfg", "print-config"]), text);
    assert!(text.contains("rows_per_subarray = 256"));
}
