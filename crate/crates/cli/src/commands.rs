use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use bwmd_core::cache::{read_cache, write_cache};
use bwmd_core::cluster::{
    assignment_csv, average_link, cut_dendrogram, dendrogram_dot, dendrogram_newick, kmeans, slink,
    ClusterAssignment, KMeansConfig,
};
use bwmd_core::corpus::{
    load_bytes_dir, load_fasta, load_labels, read_manifest, write_manifest, AmbiguityPolicy, Corpus,
};
use bwmd_core::eval::{auc, balanced_accuracy, homogeneity_completeness_v};
use bwmd_core::experiments::{
    entropy_sweep_experiment, grid_csv, random_grid_experiment, sweep_csv, theorem_suite,
    GridConfig, Implementations, SweepConfig, TheoremConfig,
};
use bwmd_core::fmt::sig12;
use bwmd_core::knn::{
    knn_brute, knn_vote, BwmdMetric, LzjdMetric, Metric, NeighborResult, ProjectionIndex, VpTree,
};
use bwmd_core::metric::{distance_matrix, embed_all, embedding_matrix, lz_sets, MetricKind};
use bwmd_core::{
    ebwt_distance, ebwt_distance_normalized, BwmdEmbedding, Error, Execution, Sequence,
};
use serde::Serialize;

use crate::cli::*;

type Result<T> = std::result::Result<T, Error>;

const CACHE_FILE: &str = "embeddings.bin";
const CACHE_MANIFEST: &str = "embeddings.json";
const CORPUS_MANIFEST: &str = "corpus.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn config(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)
            .map_err(|e| config(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// A loaded corpus, or embeddings read back from a cache directory.
struct Dataset {
    ids: Vec<String>,
    labels: Vec<Option<String>>,
    corpus: Option<Corpus>,
    cached: Option<Vec<BwmdEmbedding>>,
}

impl Dataset {
    fn len(&self) -> usize {
        self.ids.len()
    }

    fn sequences(&self) -> Result<Vec<&Sequence>> {
        self.corpus
            .as_ref()
            .map(Corpus::sequences)
            .ok_or_else(|| config("an embedding cache only supports the bwmd metric"))
    }

    fn embeddings(&self, exec: Execution) -> Result<Vec<BwmdEmbedding>> {
        match &self.cached {
            Some(e) => Ok(e.clone()),
            None => embed_all(&self.sequences()?, exec),
        }
    }

    /// Labels for every item, or an error naming the first unlabeled one.
    fn full_labels(&self) -> Result<Vec<String>> {
        self.ids
            .iter()
            .zip(&self.labels)
            .map(|(id, l)| l.clone().ok_or_else(|| Error::MissingLabel(id.clone())))
            .collect()
    }

    fn has_labels(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }
}

fn is_cache_dir(path: &Path) -> bool {
    path.is_dir() && path.join(CACHE_MANIFEST).is_file() && path.join(CACHE_FILE).is_file()
}

fn load_corpus(path: &Path, input: &InputArgs, exec: Execution) -> Result<Corpus> {
    let alphabet = input.alphabet.unwrap_or(if path.is_dir() {
        AlphabetArg::Bytes
    } else {
        AlphabetArg::Dna
    });
    match alphabet {
        AlphabetArg::Dna if path.is_dir() => Err(config(format!(
            "{} is a directory; the dna alphabet reads a FASTA file",
            path.display()
        ))),
        AlphabetArg::Dna => {
            let policy = match input.ambiguous {
                AmbiguityArg::Drop => AmbiguityPolicy::Drop,
                AmbiguityArg::MapToA => AmbiguityPolicy::MapToA,
                AmbiguityArg::Error => AmbiguityPolicy::Error,
            };
            load_fasta(path, policy)
        }
        AlphabetArg::Bytes if !path.is_dir() => Err(config(format!(
            "{} is not a directory; the bytes alphabet reads a directory of files",
            path.display()
        ))),
        AlphabetArg::Bytes => load_bytes_dir(path, None, exec),
    }
}

fn load_dataset(path: &Path, input: &InputArgs, exec: Execution) -> Result<Dataset> {
    let label_map = match &input.labels {
        Some(p) => Some(load_labels(p)?),
        None => None,
    };
    let mut data = if is_cache_dir(path) {
        let (_, items) = read_cache(&path.join(CACHE_FILE), &path.join(CACHE_MANIFEST))?;
        let stored: HashMap<String, String> = if path.join(CORPUS_MANIFEST).is_file() {
            read_manifest(&path.join(CORPUS_MANIFEST))?
                .items
                .into_iter()
                .filter_map(|e| e.label.map(|l| (e.id, l)))
                .collect()
        } else {
            HashMap::new()
        };
        let (ids, embeddings): (Vec<String>, Vec<BwmdEmbedding>) = items.into_iter().unzip();
        let labels = ids.iter().map(|id| stored.get(id).cloned()).collect();
        Dataset {
            ids,
            labels,
            corpus: None,
            cached: Some(embeddings),
        }
    } else {
        let corpus = load_corpus(path, input, exec)?;
        Dataset {
            ids: corpus.ids(),
            labels: vec![None; corpus.len()],
            corpus: Some(corpus),
            cached: None,
        }
    };
    if let Some(map) = label_map {
        for (id, label) in data.ids.iter().zip(data.labels.iter_mut()) {
            if let Some(l) = map.get(id) {
                *label = Some(l.clone());
            }
        }
        if let Some(corpus) = data.corpus.take() {
            data.corpus = Some(corpus.with_labels(&map, false)?);
        }
    }
    Ok(data)
}

fn metric_kind(args: &MetricArgs) -> Result<MetricKind> {
    if args.normalize && args.metric != MetricArg::Ebwt {
        return Err(config("--normalize applies to the ebwt metric only"));
    }
    if args.sketch.is_some() && args.metric != MetricArg::Lzjd {
        return Err(config("--sketch applies to the lzjd metric only"));
    }
    if args.sketch == Some(0) {
        return Err(config("--sketch must be positive"));
    }
    Ok(match args.metric {
        MetricArg::Bwmd => MetricKind::Bwmd,
        MetricArg::Ebwt if args.normalize => MetricKind::EbwtNormalized,
        MetricArg::Ebwt => MetricKind::Ebwt,
        MetricArg::Lzjd => MetricKind::Lzjd {
            sketch: args.sketch,
        },
    })
}

fn matrix(
    data: &Dataset,
    kind: MetricKind,
    exec: Execution,
) -> Result<bwmd_core::cluster::DistanceMatrix> {
    match kind {
        MetricKind::Bwmd => embedding_matrix(data.ids.clone(), &data.embeddings(exec)?, exec),
        _ => distance_matrix(data.ids.clone(), &data.sequences()?, kind, exec),
    }
}

pub fn embed(args: &EmbedArgs, exec: Execution) -> Result<()> {
    let data = load_dataset(&args.input.input, &args.input, exec)?;
    let corpus = data
        .corpus
        .as_ref()
        .ok_or_else(|| config("input is already an embedding cache"))?;
    let seqs = corpus.sequences();
    let results = exec.map(&seqs, |s| bwmd_core::embed(s));
    let mut items = Vec::with_capacity(seqs.len());
    let mut degenerate = Vec::new();
    for (s, r) in seqs.iter().zip(results) {
        match r {
            Ok(e) => items.push((s.id().to_string(), e)),
            Err(Error::Degenerate(_)) => degenerate.push(s.id().to_string()),
            Err(e) => return Err(e),
        }
    }
    if !degenerate.is_empty() {
        if !args.skip_degenerate {
            return Err(Error::Degenerate(format!(
                "{} sequence(s) cannot be embedded: {}",
                degenerate.len(),
                degenerate.join(", ")
            )));
        }
        eprintln!(
            "skipped {} degenerate sequence(s): {}",
            degenerate.len(),
            degenerate.join(", ")
        );
    }
    create_dir(&args.out)?;
    let sigma = corpus.alphabet().size();
    let manifest = write_cache(
        &items,
        sigma,
        &args.out.join(CACHE_FILE),
        &args.out.join(CACHE_MANIFEST),
    )?;
    let kept: BTreeSet<&str> = items.iter().map(|(id, _)| id.as_str()).collect();
    let mut corpus_manifest = corpus.manifest();
    corpus_manifest
        .items
        .retain(|e| kept.contains(e.id.as_str()));
    write_manifest(&corpus_manifest, &args.out.join(CORPUS_MANIFEST))?;
    println!(
        "embedded {} sequence(s), alphabet {}, dimension {}",
        manifest.records.len(),
        sigma,
        manifest.dimension
    );
    Ok(())
}

pub fn dist(args: &DistArgs, exec: Execution) -> Result<()> {
    let data = load_dataset(&args.input.input, &args.input, exec)?;
    let kind = metric_kind(&args.metric)?;
    let m = matrix(&data, kind, exec)?;
    let header = std::iter::once("id".to_string())
        .chain(data.ids.iter().cloned())
        .collect();
    let rows = (0..m.len()).map(|i| {
        std::iter::once(data.ids[i].clone())
            .chain((0..m.len()).map(|j| sig12(m.get(i, j))))
            .collect()
    });
    write_file(&args.out, csv_string(std::iter::once(header).chain(rows))?)
}

#[derive(Serialize)]
struct ClusterMetrics {
    dataset: String,
    metric: &'static str,
    method: &'static str,
    linkage: Option<&'static str>,
    k_regime: Option<String>,
    k: Option<usize>,
    items: usize,
    classes: Option<usize>,
    clusters: Option<usize>,
    homogeneity: Option<f64>,
    completeness: Option<f64>,
    v_measure: Option<f64>,
    kmeans_iterations: Option<usize>,
    kmeans_inertia: Option<f64>,
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

pub fn cluster(args: &ClusterArgs, exec: Execution) -> Result<()> {
    let data = load_dataset(&args.input.input, &args.input, exec)?;
    let kind = metric_kind(&args.metric)?;
    if args.method == MethodArg::Kmeans && !kind.is_euclidean() {
        return Err(config("k-means needs the bwmd metric"));
    }
    let classes = if data.has_labels() {
        Some(data.full_labels()?.iter().collect::<BTreeSet<_>>().len())
    } else {
        None
    };
    let (k, k_regime) = match (args.k, args.k_per_class) {
        (Some(k), _) => (Some(k), Some(format!("k={k}"))),
        (None, Some(m)) => {
            let c = classes.ok_or_else(|| config("--k-per-class needs labels for every item"))?;
            let regime = if m == 1 {
                "k=C".to_string()
            } else {
                format!("k={m}C")
            };
            (Some(m * c), Some(regime))
        }
        (None, None) => (None, None),
    };
    if let Some(k) = k {
        if k == 0 || k > data.len() {
            return Err(config(format!("k={k} must lie in 1..={}", data.len())));
        }
    }
    create_dir(&args.out)?;

    let mut kmeans_iterations = None;
    let mut kmeans_inertia = None;
    let assignment: Option<ClusterAssignment> = match args.method {
        MethodArg::Hierarchical => {
            let m = matrix(&data, kind, exec)?;
            let dend = match args.linkage {
                LinkageArg::Single => slink(&m)?,
                LinkageArg::Average => average_link(&m)?,
            };
            write_file(
                &args.out.join("dendrogram.nwk"),
                dendrogram_newick(&dend) + "\n",
            )?;
            write_file(&args.out.join("dendrogram.dot"), dendrogram_dot(&dend))?;
            k.map(|k| cut_dendrogram(&dend, k)).transpose()?
        }
        MethodArg::Kmeans => {
            let k = k.ok_or_else(|| config("k-means needs --k or --k-per-class"))?;
            let points = data.embeddings(exec)?;
            let result = kmeans(&points, &KMeansConfig::new(k, args.seed).exec(exec))?;
            kmeans_iterations = Some(result.iterations);
            kmeans_inertia = Some(result.inertia);
            Some(result.assignment)
        }
    };

    let scores = match (&assignment, data.has_labels()) {
        (Some(a), true) => Some(homogeneity_completeness_v(
            &data.full_labels()?,
            a.labels(),
        )?),
        _ => None,
    };
    if let Some(a) = &assignment {
        write_file(
            &args.out.join("assignment.csv"),
            assignment_csv(&data.ids, a)?,
        )?;
    }
    let dataset = args.dataset.clone().unwrap_or_else(|| {
        args.input
            .input
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let metrics = ClusterMetrics {
        dataset,
        metric: kind.name(),
        method: match args.method {
            MethodArg::Hierarchical => "hierarchical",
            MethodArg::Kmeans => "kmeans",
        },
        linkage: (args.method == MethodArg::Hierarchical).then_some(match args.linkage {
            LinkageArg::Single => "single",
            LinkageArg::Average => "average",
        }),
        k_regime,
        k,
        items: data.len(),
        classes,
        clusters: assignment.as_ref().map(ClusterAssignment::non_empty),
        homogeneity: scores.map(|s| s.homogeneity),
        completeness: scores.map(|s| s.completeness),
        v_measure: scores.map(|s| s.v_measure),
        kmeans_iterations,
        kmeans_inertia,
    };
    let json = serde_json::to_string_pretty(&metrics)?;
    write_file(&args.out.join("metrics.json"), json + "\n")?;
    let rows = [
        [
            "dataset",
            "metric",
            "method",
            "k_regime",
            "k",
            "homogeneity",
            "completeness",
            "v_measure",
        ]
        .map(String::from)
        .to_vec(),
        vec![
            metrics.dataset.clone(),
            metrics.metric.to_string(),
            metrics.method.to_string(),
            metrics.k_regime.clone().unwrap_or_default(),
            metrics.k.map(|k| k.to_string()).unwrap_or_default(),
            opt(metrics.homogeneity),
            opt(metrics.completeness),
            opt(metrics.v_measure),
        ],
    ];
    write_file(&args.out.join("metrics.csv"), csv_string(rows)?)?;
    if let Some(s) = scores {
        println!(
            "homogeneity {} completeness {} v-measure {}",
            sig12(s.homogeneity),
            sig12(s.completeness),
            sig12(s.v_measure)
        );
    }
    Ok(())
}

/// Runs `search(query, k)` for every query. Without a separate query set,
/// each corpus item is its own query and is removed from its neighbor list.
fn search_all<Q, F>(
    queries: &[Q],
    leave_one_out: bool,
    k: usize,
    exec: Execution,
    search: F,
) -> Result<Vec<NeighborResult>>
where
    Q: Sync,
    F: Fn(&Q, usize) -> Result<NeighborResult> + Sync,
{
    let want = if leave_one_out { k + 1 } else { k };
    let indexed: Vec<(usize, &Q)> = queries.iter().enumerate().collect();
    exec.map(&indexed, |&(qi, q)| {
        let mut res = search(q, want)?;
        if leave_one_out {
            let drop = res
                .ids
                .iter()
                .position(|&id| id == qi)
                .unwrap_or(res.ids.len().saturating_sub(1));
            if res.ids.len() > k {
                res.ids.remove(drop);
                res.distances.remove(drop);
            }
        }
        Ok(res)
    })
    .into_iter()
    .collect()
}

fn run_index<T, M>(
    corpus: Vec<T>,
    queries: &[T],
    metric: M,
    args: &KnnArgs,
    leave_one_out: bool,
    exec: Execution,
) -> Result<Vec<NeighborResult>>
where
    T: Sync + Clone,
    M: Metric<T> + Clone,
{
    let k = args.k;
    match args.index {
        IndexArg::Brute => search_all(queries, leave_one_out, k, exec, |q, kk| {
            knn_brute(&corpus, q, kk, &metric)
        }),
        IndexArg::Vp => {
            let tree = VpTree::build(corpus, metric, args.seed)?;
            search_all(queries, leave_one_out, k, exec, |q, kk| tree.query(q, kk))
        }
        IndexArg::Proj => Err(config("the projection index needs the bwmd metric")),
    }
}

#[derive(Serialize)]
struct KnnMetrics {
    queries: usize,
    k: usize,
    index: &'static str,
    metric: &'static str,
    distance_evaluations: usize,
    balanced_accuracy: Option<f64>,
    auc: Option<f64>,
}

pub fn knn(args: &KnnArgs, exec: Execution) -> Result<()> {
    if args.k == 0 {
        return Err(config("--k must be at least 1"));
    }
    let kind = metric_kind(&args.metric)?;
    let data = load_dataset(&args.input.input, &args.input, exec)?;
    let query_data = match &args.queries {
        Some(p) => Some(load_dataset(p, &args.input, exec)?),
        None => None,
    };
    let leave_one_out = query_data.is_none();
    if leave_one_out && data.len() < 2 {
        return Err(config("leave-one-out search needs at least two items"));
    }
    let qdata = query_data.as_ref().unwrap_or(&data);
    let results = match (kind, args.index) {
        (MetricKind::Bwmd, IndexArg::Proj) => {
            let index = ProjectionIndex::build(data.embeddings(exec)?, args.m, args.seed)?;
            let queries = qdata.embeddings(exec)?;
            search_all(&queries, leave_one_out, args.k, exec, |q, kk| {
                index.query(q, kk, args.c)
            })?
        }
        (MetricKind::Bwmd, _) => {
            let queries = qdata.embeddings(exec)?;
            run_index(
                data.embeddings(exec)?,
                &queries,
                BwmdMetric,
                args,
                leave_one_out,
                exec,
            )?
        }
        (MetricKind::Lzjd { sketch }, _) => {
            let corpus = lz_sets(&data.sequences()?, sketch, exec);
            let queries = lz_sets(&qdata.sequences()?, sketch, exec);
            run_index(corpus, &queries, LzjdMetric, args, leave_one_out, exec)?
        }
        (_, IndexArg::Brute) => {
            let corpus = data.sequences()?;
            let queries = qdata.sequences()?;
            if let Some(s) = corpus.iter().chain(&queries).find(|s| s.is_empty()) {
                return Err(Error::Degenerate(format!("sequence '{}' is empty", s.id())));
            }
            let normalized = kind == MetricKind::EbwtNormalized;
            let metric = move |a: &&Sequence, b: &&Sequence| {
                let d = if normalized {
                    ebwt_distance_normalized(a, b)
                } else {
                    ebwt_distance(a, b).map(|d| d as f64)
                };
                d.unwrap_or(f64::INFINITY)
            };
            search_all(&queries, leave_one_out, args.k, exec, |q, kk| {
                knn_brute(&corpus, q, kk, &metric)
            })?
        }
        (_, _) => {
            return Err(config(
                "ebwt is not a metric; only the brute-force index supports it",
            ))
        }
    };

    create_dir(&args.out)?;
    let mut rows = vec![["query_id", "rank", "neighbor_id", "distance"]
        .map(String::from)
        .to_vec()];
    for (qi, res) in results.iter().enumerate() {
        for (rank, (&id, &d)) in res.ids.iter().zip(&res.distances).enumerate() {
            rows.push(vec![
                qdata.ids[qi].clone(),
                (rank + 1).to_string(),
                data.ids[id].clone(),
                sig12(d),
            ]);
        }
    }
    write_file(&args.out.join("neighbors.csv"), csv_string(rows)?)?;

    let mut metrics = KnnMetrics {
        queries: results.len(),
        k: args.k,
        index: match args.index {
            IndexArg::Brute => "brute",
            IndexArg::Vp => "vp",
            IndexArg::Proj => "proj",
        },
        metric: kind.name(),
        distance_evaluations: results.iter().map(|r| r.evaluations).sum(),
        balanced_accuracy: None,
        auc: None,
    };
    if data.has_labels() {
        let labels = data.full_labels()?;
        let positive = args.positive.as_deref().unwrap_or("");
        let votes: Vec<_> = results
            .iter()
            .map(|r| knn_vote(r, &labels, positive))
            .collect();
        let mut header = vec!["query_id".to_string(), "predicted".to_string()];
        if args.positive.is_some() {
            header.push("score".to_string());
        }
        let mut rows = vec![header];
        for (qi, v) in votes.iter().enumerate() {
            let mut row = vec![qdata.ids[qi].clone(), v.predicted.clone()];
            if args.positive.is_some() {
                row.push(sig12(v.score));
            }
            rows.push(row);
        }
        write_file(&args.out.join("scores.csv"), csv_string(rows)?)?;
        if qdata.has_labels() {
            let truth = qdata.full_labels()?;
            let predicted: Vec<String> = votes.iter().map(|v| v.predicted.clone()).collect();
            metrics.balanced_accuracy = Some(balanced_accuracy(&truth, &predicted)?);
            if let Some(p) = &args.positive {
                let is_pos: Vec<bool> = truth.iter().map(|t| t == p).collect();
                if is_pos.iter().any(|&x| x) && is_pos.iter().any(|&x| !x) {
                    let scores: Vec<f64> = votes.iter().map(|v| v.score).collect();
                    metrics.auc = Some(auc(&scores, &is_pos)?);
                }
            }
        }
    } else if args.positive.is_some() {
        return Err(config("--positive needs --labels"));
    }
    let json = serde_json::to_string_pretty(&metrics)?;
    write_file(&args.out.join("knn_metrics.json"), json + "\n")?;
    if let Some(b) = metrics.balanced_accuracy {
        println!("balanced accuracy {}", sig12(b));
    }
    if let Some(a) = metrics.auc {
        println!("auc {}", sig12(a));
    }
    Ok(())
}

fn parent_dir(path: &Path) -> Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => create_dir(p),
        _ => Ok(()),
    }
}

/// Returns whether every theorem check passed; other experiments always do.
pub fn experiment(args: &ExperimentArgs, exec: Execution) -> Result<bool> {
    match &args.kind {
        ExperimentKind::EntropySweep {
            length,
            targets,
            trials,
            alphabet_size,
            sketch,
            seed,
            out,
        } => {
            let mut config = SweepConfig::new(*length, targets.clone(), *trials, *seed);
            config.alphabet_size = *alphabet_size;
            config.lzjd_sketch = *sketch;
            config.exec = exec;
            let rows = entropy_sweep_experiment(&config)?;
            parent_dir(out)?;
            write_file(out, sweep_csv(&rows))?;
        }
        ExperimentKind::RandomGrid {
            lengths,
            trials,
            alphabet_size,
            sketch,
            seed,
            out,
        } => {
            let mut config = GridConfig::new(lengths.clone(), *trials, *seed);
            config.alphabet_size = *alphabet_size;
            config.lzjd_sketch = *sketch;
            config.exec = exec;
            let rows = random_grid_experiment(&config)?;
            parent_dir(out)?;
            write_file(out, grid_csv(&rows))?;
        }
        ExperimentKind::Theorems {
            cases,
            max_len,
            seed,
            out,
        } => {
            let config = TheoremConfig {
                cases: *cases,
                max_len: *max_len,
            };
            let report = theorem_suite(*seed, &config, &Implementations::default());
            print!("{}", report.render());
            parent_dir(out)?;
            write_file(out, serde_json::to_string_pretty(&report)? + "\n")?;
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}
