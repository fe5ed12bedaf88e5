use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use subclust::data::{encode_idx_images, encode_idx_labels, load_dataset};
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subclust"))
        .current_dir(dir)
        .env_remove("SUBCLUST_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn manifest_outputs(path: PathBuf) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    v["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_owned())
        .collect()
}

fn noiseless(dir: &Path) {
    let out = run(
        dir,
        &[
            "generate",
            "--prototypes",
            "5",
            "--per-group",
            "10",
            "--dim",
            "10",
            "--ambient",
            "25",
            "--seed",
            "1",
            "--out",
            "s.subds",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_is_reproducible_and_documented() {
    let dir = TempDir::new().unwrap();
    noiseless(dir.path());
    let first = fs::read(dir.path().join("s.subds")).unwrap();
    assert_eq!(load_dataset(&dir.path().join("s.subds")).unwrap().len(), 50);
    noiseless(dir.path());
    assert_eq!(first, fs::read(dir.path().join("s.subds")).unwrap());
    assert_eq!(
        manifest_outputs(dir.path().join("s.subds.manifest.json")),
        ["s.subds"]
    );
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    noiseless(dir.path());
    let cases: &[&[&str]] = &[
        &[
            "generate",
            "--dim",
            "30",
            "--ambient",
            "25",
            "--out",
            "x.subds",
        ],
        &[
            "cluster",
            "--data",
            "s.subds",
            "--method",
            "svbf",
            "--centers",
            "0",
            "--out-prefix",
            "c",
        ],
        &[
            "cluster",
            "--data",
            "s.subds",
            "--method",
            "kmeans",
            "--centers",
            "2",
            "--out-prefix",
            "c",
        ],
        &[
            "sweep",
            "--data",
            "s.subds",
            "--centers",
            "3,,4",
            "--out-prefix",
            "w",
        ],
        &[
            "sweep",
            "--data",
            "s.subds",
            "--centers",
            "7..3",
            "--out-prefix",
            "w",
        ],
        &[
            "ingest", "csv", "--in", "m.csv", "--group", "0", "--out", "m.subds",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(dir.path(), cases[0]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample dim must be < ambient"));
    assert!(!dir.path().join("x.subds").exists());
}

#[test]
fn pipeline_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    noiseless(dir.path());
    fs::write(dir.path().join("junk.subds"), b"not a dataset").unwrap();
    let cases: &[&[&str]] = &[
        &[
            "cluster",
            "--data",
            "missing.subds",
            "--method",
            "svbf",
            "--centers",
            "2",
            "--out-prefix",
            "c",
        ],
        &[
            "cluster",
            "--data",
            "junk.subds",
            "--method",
            "svbf",
            "--centers",
            "2",
            "--out-prefix",
            "c",
        ],
        &[
            "cluster",
            "--data",
            "s.subds",
            "--method",
            "svbf",
            "--centers",
            "51",
            "--out-prefix",
            "c",
        ],
        &[
            "cluster",
            "--data",
            "s.subds",
            "--method",
            "svbf",
            "--centers",
            "2",
            "--proto-dim",
            "26",
            "--out-prefix",
            "c",
        ],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn cluster_recovers_noiseless_groups() {
    let dir = TempDir::new().unwrap();
    noiseless(dir.path());
    let out = run(
        dir.path(),
        &[
            "cluster",
            "--data",
            "s.subds",
            "--method",
            "svbf",
            "--centers",
            "5",
            "--proto-dim",
            "1",
            "--seed",
            "3",
            "--out-prefix",
            "c",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(
        stdout(&out).lines().any(|l| l == "purity: 1"),
        "{}",
        stdout(&out)
    );

    let labels = fs::read_to_string(dir.path().join("c_labels.csv")).unwrap();
    let mut lines = labels.lines();
    assert_eq!(lines.next(), Some("sample_index,label,class,distance"));
    assert_eq!(lines.count(), 50);
    let protos = load_dataset(&dir.path().join("c_prototypes.subds")).unwrap();
    assert_eq!(protos.len(), 5);
    assert!(protos.samples().iter().all(|p| p.dim() == 1));
    let outputs = manifest_outputs(dir.path().join("c.manifest.json"));
    assert_eq!(
        outputs,
        ["c_labels.csv", "c_prototypes.subds", "c_distortion.csv"]
    );
}

#[test]
fn flag_mean_distortion_never_rises() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate", "--noise", "0.3", "--seed", "4", "--out", "n.subds",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = run(
        dir.path(),
        &[
            "cluster",
            "--data",
            "n.subds",
            "--method",
            "flagmean",
            "--centers",
            "5",
            "--proto-dim",
            "2",
            "--out-prefix",
            "f",
        ],
    );
    assert_eq!(code(&out), 0);
    let history: Vec<f64> = fs::read_to_string(dir.path().join("f_distortion.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!history.is_empty());
    assert!(
        history.windows(2).all(|w| w[1] <= w[0] + 1e-8),
        "{history:?}"
    );
}

#[test]
fn sweep_writes_both_reports() {
    let dir = TempDir::new().unwrap();
    noiseless(dir.path());
    let out = run(
        dir.path(),
        &[
            "sweep",
            "--data",
            "s.subds",
            "--methods",
            "svbf",
            "--centers",
            "5",
            "--trials",
            "5",
            "--iters",
            "5",
            "--seed",
            "2",
            "--out-prefix",
            "w",
        ],
    );
    assert_eq!(code(&out), 0);
    let medians = fs::read_to_string(dir.path().join("w_medians.csv")).unwrap();
    assert_eq!(
        medians.lines().collect::<Vec<_>>(),
        [
            "method,num_centers,median_purity,median_distortion",
            medians.lines().nth(1).unwrap()
        ]
    );
    assert!(medians.lines().nth(1).unwrap().starts_with("svbf,5,1,"));
    let runs = fs::read_to_string(dir.path().join("w_runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 6);
    assert_eq!(
        manifest_outputs(dir.path().join("w.manifest.json")),
        ["w_runs.csv", "w_medians.csv"]
    );
}

#[test]
fn failed_sweeps_keep_partial_results() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate",
            "--prototypes",
            "2",
            "--per-group",
            "4",
            "--ambient",
            "6",
            "--dim",
            "2",
            "--out",
            "t.subds",
        ],
    );
    assert_eq!(code(&out), 0);
    let out = run(
        dir.path(),
        &[
            "sweep",
            "--data",
            "t.subds",
            "--methods",
            "flagmean",
            "--centers",
            "2,20",
            "--trials",
            "2",
            "--out-prefix",
            "p",
        ],
    );
    assert_eq!(code(&out), 1);
    assert!(!dir.path().join("p_runs.csv").exists());
    let runs = fs::read_to_string(dir.path().join("p_runs.csv.partial")).unwrap();
    assert_eq!(runs.lines().count(), 3);
    assert!(dir.path().join("p_medians.csv.partial").exists());
    assert_eq!(
        manifest_outputs(dir.path().join("p.manifest.json")),
        ["p_runs.csv.partial", "p_medians.csv.partial"]
    );
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let out = run(
        dir.path(),
        &[
            "generate", "--noise", "0.3", "--seed", "9", "--out", "n.subds",
        ],
    );
    assert_eq!(code(&out), 0);
    let mut files = Vec::new();
    for threads in ["1", "3"] {
        let prefix = format!("t{threads}");
        let out = run(
            dir.path(),
            &[
                "--threads",
                threads,
                "sweep",
                "--data",
                "n.subds",
                "--centers",
                "3..4",
                "--trials",
                "2",
                "--out-prefix",
                &prefix,
            ],
        );
        assert_eq!(code(&out), 0);
        files.push((
            fs::read(dir.path().join(format!("{prefix}_runs.csv"))).unwrap(),
            fs::read(dir.path().join(format!("{prefix}_medians.csv"))).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);

    let out = Command::new(env!("CARGO_BIN_EXE_subclust"))
        .current_dir(dir.path())
        .env("SUBCLUST_THREADS", "2")
        .args([
            "sweep",
            "--data",
            "n.subds",
            "--centers",
            "3..4",
            "--trials",
            "2",
            "--out-prefix",
            "e",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(dir.path().join("e_runs.csv")).unwrap(), files[0].0);
}

#[test]
fn ingest_groups_idx_and_csv_inputs() {
    let dir = TempDir::new().unwrap();
    // 24 images of 3x3 pixels, classes cycling 0..3.
    let count = 24u32;
    let pixels: Vec<u8> = (0..count * 9)
        .map(|i| ((i * 37 + i / 9 * 11) % 256) as u8)
        .collect();
    let labels: Vec<u8> = (0..count).map(|i| (i % 4) as u8).collect();
    fs::write(
        dir.path().join("img.idx"),
        encode_idx_images(count, 3, 3, &pixels),
    )
    .unwrap();
    fs::write(dir.path().join("lab.idx"), encode_idx_labels(&labels)).unwrap();
    let out = run(
        dir.path(),
        &[
            "ingest",
            "mnist",
            "--images",
            "img.idx",
            "--labels",
            "lab.idx",
            "--classes",
            "0,2",
            "--group",
            "3",
            "--seed",
            "1",
            "--out",
            "d.subds",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ds = load_dataset(&dir.path().join("d.subds")).unwrap();
    assert_eq!(ds.ambient_dim(), Some(9));
    assert!(ds
        .class_labels()
        .unwrap()
        .iter()
        .all(|c| [0, 2].contains(c)));
    assert!(ds.samples().iter().all(|s| s.dim() == 3));
    assert!(dir.path().join("d.subds.manifest.json").exists());

    let mut csv = String::from("class,f0,f1,f2,f3,f4\n");
    for i in 0..12u32 {
        let row: Vec<String> = (0..5).map(|j| ((i * 7 + j * 3) % 11).to_string()).collect();
        csv.push_str(&format!("{},{}\n", i % 2, row.join(",")));
    }
    fs::write(dir.path().join("m.csv"), csv).unwrap();
    let out = run(
        dir.path(),
        &[
            "ingest", "csv", "--in", "m.csv", "--group", "2", "--out", "m.subds",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ds = load_dataset(&dir.path().join("m.subds")).unwrap();
    assert_eq!(ds.ambient_dim(), Some(5));

    let out = run(
        dir.path(),
        &[
            "ingest",
            "mnist",
            "--images",
            "img.idx",
            "--labels",
            "m.csv",
            "--classes",
            "0",
            "--out",
            "z.subds",
        ],
    );
    assert_eq!(code(&out), 1);
}
