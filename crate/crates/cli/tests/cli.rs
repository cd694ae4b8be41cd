use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bwmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bwmd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = bwmd(args);
    assert!(
        out.status.success(),
        "bwmd {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_dir(root: &Path, name: &str, files: &[(&str, &[u8])]) -> PathBuf {
    let dir = root.join(name);
    fs::create_dir_all(&dir).unwrap();
    for (f, body) in files {
        fs::write(dir.join(f), body).unwrap();
    }
    dir
}

fn read_matrix(path: &Path) -> HashMap<(String, String), f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mut out = HashMap::new();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        for (j, cell) in cells.iter().enumerate().skip(1) {
            out.insert(
                (cells[0].to_string(), header[j].to_string()),
                cell.parse().unwrap(),
            );
        }
    }
    out
}

/// Two classes of byte files with different internal structure.
fn labeled_corpus(root: &Path, per_class: usize) -> (PathBuf, PathBuf) {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut labels = String::from("filename,label\n");
    let mut state = 12345u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 33) as u8
    };
    for i in 0..per_class {
        let a: Vec<u8> = (0..400)
            .map(|j| {
                if j % 3 == 0 {
                    next() % 4
                } else {
                    b'a' + (j % 5) as u8
                }
            })
            .collect();
        let b: Vec<u8> = (0..400).map(|_| 200 + next() % 50).collect();
        files.push((format!("a{i:02}.bin"), a));
        files.push((format!("b{i:02}.bin"), b));
        labels.push_str(&format!("a{i:02}.bin,alpha\nb{i:02}.bin,beta\n"));
    }
    let refs: Vec<(&str, &[u8])> = files
        .iter()
        .map(|(n, b)| (n.as_str(), b.as_slice()))
        .collect();
    let dir = write_dir(root, "labeled", &refs);
    let label_path = root.join("labels.csv");
    fs::write(&label_path, labels).unwrap();
    (dir, label_path)
}

#[test]
fn embed_fasta_has_dimension_16_and_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let fasta = tmp.path().join("seqs.fa");
    fs::write(&fasta, ">one\nACGTACGGT\nTTAC\n>two\nGGGGACCA\n").unwrap();
    let (out1, out2) = (tmp.path().join("e1"), tmp.path().join("e2"));
    ok(&["embed", p(&fasta), "--out", p(&out1)]);
    ok(&["--threads", "1", "embed", p(&fasta), "--out", p(&out2)]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out1.join("embeddings.json")).unwrap()).unwrap();
    assert_eq!(manifest["alphabet_size"], 4);
    assert_eq!(manifest["dimension"], 16);
    assert_eq!(manifest["records"].as_array().unwrap().len(), 2);
    assert_eq!(
        fs::read(out1.join("embeddings.bin")).unwrap(),
        fs::read(out2.join("embeddings.bin")).unwrap()
    );
}

#[test]
fn embed_bytes_dir_and_degenerate_inputs() {
    let tmp = TempDir::new().unwrap();
    let dir = write_dir(
        tmp.path(),
        "d",
        &[("x", b"hello world"), ("y", b"\x00\xff\x10\x10")],
    );
    let out = tmp.path().join("e");
    ok(&["embed", p(&dir), "--out", p(&out)]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("embeddings.json")).unwrap()).unwrap();
    assert_eq!(manifest["alphabet_size"], 256);
    assert_eq!(manifest["dimension"], 65536);

    fs::write(dir.join("z"), b"q").unwrap();
    let fail = bwmd(&["embed", p(&dir), "--out", p(&out)]);
    assert_eq!(fail.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&fail.stderr).contains('z'));
    ok(&["embed", p(&dir), "--out", p(&out), "--skip-degenerate"]);
}

#[test]
fn dist_matches_known_values() {
    let tmp = TempDir::new().unwrap();
    let same = write_dir(
        tmp.path(),
        "same",
        &[("a", b"abracadabra"), ("b", b"abracadabra")],
    );
    let out = tmp.path().join("m.csv");
    ok(&["dist", p(&same), "--metric", "bwmd", "--out", p(&out)]);
    assert_eq!(read_matrix(&out)[&("a".into(), "b".into())], 0.0);

    let table = write_dir(tmp.path(), "table", &[("u", b"bcaa"), ("v", b"ccbab")]);
    ok(&["dist", p(&table), "--metric", "ebwt", "--out", p(&out)]);
    assert_eq!(read_matrix(&out)[&("u".into(), "v".into())], 3.0);

    let disjoint = write_dir(
        tmp.path(),
        "disjoint",
        &[("a", b"aabbabab"), ("b", b"xyzzyx")],
    );
    ok(&["dist", p(&disjoint), "--metric", "lzjd", "--out", p(&out)]);
    assert_eq!(read_matrix(&out)[&("a".into(), "b".into())], 1.0);
    ok(&["dist", p(&disjoint), "--metric", "bwmd", "--out", p(&out)]);
    assert!((read_matrix(&out)[&("a".into(), "b".into())] - 1.0).abs() < 1e-9);
}

#[test]
fn dist_reads_embedding_cache() {
    let tmp = TempDir::new().unwrap();
    let dir = write_dir(
        tmp.path(),
        "d",
        &[("a", b"mississippi"), ("b", b"missouri river")],
    );
    let cache = tmp.path().join("cache");
    ok(&["embed", p(&dir), "--out", p(&cache)]);
    let (m1, m2) = (tmp.path().join("1.csv"), tmp.path().join("2.csv"));
    ok(&["dist", p(&dir), "--out", p(&m1)]);
    ok(&["dist", p(&cache), "--out", p(&m2)]);
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    assert_eq!(
        bwmd(&["dist", p(&cache), "--metric", "lzjd", "--out", p(&m2)])
            .status
            .code(),
        Some(2)
    );
}

fn assignment(path: &Path) -> Vec<(String, usize)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (id, c) = l.split_once(',').unwrap();
            (id.to_string(), c.parse().unwrap())
        })
        .collect()
}

#[test]
fn cluster_separates_labeled_corpus() {
    let tmp = TempDir::new().unwrap();
    let (dir, labels) = labeled_corpus(tmp.path(), 12);
    for method in [
        &["--method", "kmeans"][..],
        &["--method", "hierarchical", "--linkage", "average"],
    ] {
        let out = tmp.path().join(format!("c-{}", method.len()));
        let mut args = vec![
            "cluster",
            p(&dir),
            "--labels",
            p(&labels),
            "--k",
            "2",
            "--out",
            p(&out),
        ];
        args.extend_from_slice(method);
        ok(&args);
        let metrics: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
        assert_eq!(metrics["v_measure"], 1.0, "{method:?}");
        let csv = fs::read_to_string(out.join("metrics.csv")).unwrap();
        assert!(csv
            .starts_with("dataset,metric,method,k_regime,k,homogeneity,completeness,v_measure\n"));
    }
    let out = tmp.path().join("h");
    ok(&["cluster", p(&dir), "--out", p(&out)]);
    assert!(fs::read_to_string(out.join("dendrogram.nwk"))
        .unwrap()
        .ends_with(";\n"));
    assert!(fs::read_to_string(out.join("dendrogram.dot"))
        .unwrap()
        .starts_with("digraph"));
}

#[test]
fn cluster_k_per_class_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let (dir, labels) = labeled_corpus(tmp.path(), 12);
    let run = |name: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "cluster",
            p(&dir),
            "--labels",
            p(&labels),
            "--method",
            "kmeans",
            "--k-per-class",
            "10",
            "--seed",
            "5",
            "--out",
            p(&out),
        ]);
        out
    };
    let (a, b) = (run("a"), run("b"));
    let clusters: BTreeSet<usize> = assignment(&a.join("assignment.csv"))
        .into_iter()
        .map(|x| x.1)
        .collect();
    assert_eq!(clusters.len(), 20);
    for f in ["assignment.csv", "metrics.json", "metrics.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let metrics = fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert!(metrics
        .lines()
        .nth(1)
        .unwrap()
        .contains(",bwmd,kmeans,k=10C,20,"));
}

#[test]
fn cluster_rejects_kmeans_with_other_metrics() {
    let tmp = TempDir::new().unwrap();
    let (dir, _) = labeled_corpus(tmp.path(), 3);
    let out = tmp.path().join("o");
    let res = bwmd(&[
        "cluster",
        p(&dir),
        "--metric",
        "lzjd",
        "--method",
        "kmeans",
        "--k",
        "2",
        "--out",
        p(&out),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

fn neighbor_sets(path: &Path) -> HashMap<String, BTreeSet<String>> {
    let mut out: HashMap<String, BTreeSet<String>> = HashMap::new();
    for line in fs::read_to_string(path).unwrap().lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        out.entry(cells[0].to_string())
            .or_default()
            .insert(cells[2].to_string());
    }
    out
}

#[test]
fn knn_indices_agree_and_scores_are_written() {
    let tmp = TempDir::new().unwrap();
    let (dir, labels) = labeled_corpus(tmp.path(), 10);
    let mut sets = Vec::new();
    for (metric, index) in [("bwmd", "brute"), ("bwmd", "vp"), ("bwmd", "proj")] {
        let out = tmp.path().join(format!("{metric}-{index}"));
        let mut args = vec![
            "knn",
            p(&dir),
            "--labels",
            p(&labels),
            "--metric",
            metric,
            "--index",
            index,
            "--k",
            "9",
            "--positive",
            "alpha",
            "--out",
            p(&out),
        ];
        if index == "proj" {
            args.extend_from_slice(&["--c", "100"]);
        }
        ok(&args);
        sets.push(neighbor_sets(&out.join("neighbors.csv")));
        let scores = fs::read_to_string(out.join("scores.csv")).unwrap();
        assert!(scores.starts_with("query_id,predicted,score\n"));
        assert_eq!(scores.lines().count(), 21);
        let metrics: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("knn_metrics.json")).unwrap())
                .unwrap();
        assert_eq!(metrics["balanced_accuracy"], 1.0);
        assert_eq!(metrics["auc"], 1.0);
    }
    assert_eq!(sets[0], sets[1]);
    assert_eq!(sets[0], sets[2]);
    assert!(sets[0].iter().all(|(q, n)| n.len() == 9 && !n.contains(q)));

    let lz_brute = tmp.path().join("lz-b");
    let lz_vp = tmp.path().join("lz-v");
    ok(&[
        "knn",
        p(&dir),
        "--metric",
        "lzjd",
        "--index",
        "brute",
        "--k",
        "3",
        "--out",
        p(&lz_brute),
    ]);
    ok(&[
        "knn",
        p(&dir),
        "--metric",
        "lzjd",
        "--index",
        "vp",
        "--k",
        "3",
        "--out",
        p(&lz_vp),
    ]);
    let (a, b) = (
        fs::read_to_string(lz_brute.join("neighbors.csv")).unwrap(),
        fs::read_to_string(lz_vp.join("neighbors.csv")).unwrap(),
    );
    let distances = |t: &str| {
        t.lines()
            .map(|l| l.rsplit(',').next().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(distances(&a), distances(&b));
    let bad = bwmd(&[
        "knn",
        p(&dir),
        "--metric",
        "ebwt",
        "--index",
        "vp",
        "--out",
        p(&lz_vp),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn knn_with_separate_queries() {
    let tmp = TempDir::new().unwrap();
    let corpus = write_dir(
        tmp.path(),
        "c",
        &[
            ("a", b"aaaaabbbbb"),
            ("b", b"xyxyxyxyxy"),
            ("c", b"abababab"),
        ],
    );
    let queries = write_dir(tmp.path(), "q", &[("q1", b"xyxyxyx")]);
    let out = tmp.path().join("o");
    ok(&[
        "knn",
        p(&corpus),
        "--queries",
        p(&queries),
        "--k",
        "1",
        "--out",
        p(&out),
    ]);
    let text = fs::read_to_string(out.join("neighbors.csv")).unwrap();
    assert_eq!(
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .take(3)
            .collect::<Vec<_>>(),
        ["q1", "1", "b"]
    );
}

#[test]
fn experiments_write_expected_schemas() {
    let tmp = TempDir::new().unwrap();
    let sweep = tmp.path().join("sweep.csv");
    ok(&[
        "experiment",
        "entropy-sweep",
        "--length",
        "2000",
        "--targets",
        "0.2,0.6,1.0",
        "--trials",
        "2",
        "--out",
        p(&sweep),
    ]);
    let text = fs::read_to_string(&sweep).unwrap();
    assert!(text.starts_with("Entropy,EBWT,BWMD,LZJD\n"));
    assert_eq!(text.lines().count(), 4);

    let grid = tmp.path().join("grid.csv");
    ok(&[
        "experiment",
        "random-grid",
        "--lengths",
        "100,300",
        "--trials",
        "2",
        "--out",
        p(&grid),
    ]);
    let text = fs::read_to_string(&grid).unwrap();
    assert!(text.starts_with("len_x,len_y,EBWT,BWMD,LZJD\n"));
    assert_eq!(text.lines().count(), 5);

    let report = tmp.path().join("theorems.json");
    let out = ok(&[
        "experiment",
        "theorems",
        "--cases",
        "30",
        "--max-len",
        "60",
        "--out",
        p(&report),
    ]);
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o.csv");
    assert_eq!(
        bwmd(&["dist", "/nonexistent/input.fa", "--out", p(&out)])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        bwmd(&["dist", "x", "--metric", "cosine", "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
    let fasta = tmp.path().join("bad.fa");
    fs::write(&fasta, "ACGT\n").unwrap();
    assert_eq!(
        bwmd(&["dist", p(&fasta), "--out", p(&out)]).status.code(),
        Some(3)
    );
    let dir = write_dir(tmp.path(), "d", &[("a", b"abc")]);
    assert_eq!(
        bwmd(&["dist", p(&dir), "--alphabet", "dna", "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bwmd(&["--threads", "0", "dist", p(&dir), "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
}
