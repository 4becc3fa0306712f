use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dsscomm::benchgen::{gen_lfr_like, Benchmark, LfrParams, RNG_ALGORITHM};
use dsscomm::io::{self as formats, CoverFormat};
use dsscomm::metrics::{nmi_sqrt, omega_adjusted, onmi, LabeledCover, LabeledPartition};
use dsscomm::overlap::ALPHA_SWEEP;
use dsscomm::{
    alpha_cut, build_fuzzy_cover, detect_disjoint, CrispCover, Graph, Partition, SimilarityMap,
};

use crate::{Command, DetectArgs, EvalMode, LfrArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values that clap cannot check by itself.
    Usage(String),
    /// Unreadable, malformed or inconsistent data.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

fn data<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Data(format!("{context}: {e}"))
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Detect {
            input,
            output,
            detect,
        } => run_detect(&input, &output, &detect),
        Command::DetectOverlap {
            input,
            fuzzy,
            crisp,
            alpha,
            alpha_sweep,
            partition,
            detect,
        } => {
            let alphas = if alpha_sweep {
                ALPHA_SWEEP.to_vec()
            } else {
                vec![alpha]
            };
            run_detect_overlap(
                &input,
                &fuzzy,
                &crisp,
                alpha_sweep,
                &alphas,
                partition.as_deref(),
                &detect,
            )
        }
        Command::Eval {
            detected,
            truth,
            mode,
            gt_format,
        } => run_eval(&detected, &truth, mode, gt_format.into()),
        Command::Gen { lfr, output } => run_gen(&lfr, &output),
        Command::Bench {
            lfr,
            detect,
            header,
        } => run_bench(&lfr, &detect, header),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(data(format!("cannot open {}", path.display())))
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let context = || format!("cannot write {}", path.display());
    let mut out = BufWriter::new(File::create(path).map_err(data(context()))?);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(data(context()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    Graph::load_edge_list(open(path)?).map_err(data(path.display()))
}

fn similarity(g: &Graph, args: &DetectArgs) -> Result<SimilarityMap, CliError> {
    let sim = dsscomm::with_threads(args.threads, || {
        dsscomm::dss::compute(g, args.kind(), args.iterations)
    })
    .map_err(data("cannot start worker threads"))?;
    if let Some(path) = &args.dump_similarity {
        write_file(path, |w| sim.dump(g, w))?;
    }
    Ok(sim)
}

fn labeled_partition(g: &Graph, p: &Partition) -> LabeledPartition {
    LabeledPartition::from_pairs((0..g.node_count()).map(|u| (g.label(u), p.community_of(u))))
}

fn labeled_cover(g: &Graph, cover: &CrispCover) -> LabeledCover {
    LabeledCover::new(
        cover
            .member_sets()
            .into_iter()
            .map(|set| set.into_iter().map(|u| g.label(u)).collect::<Vec<_>>()),
    )
}

fn run_detect(input: &Path, output: &Path, args: &DetectArgs) -> Result<(), CliError> {
    let params = args.params()?;
    let g = load_graph(input)?;
    let sim = similarity(&g, args)?;
    let p = detect_disjoint(&g, &sim, &params);
    write_file(output, |w| formats::write_partition(&g, &p, w))?;
    println!(
        "nodes={} edges={} communities={} cores={}",
        g.node_count(),
        g.edge_count(),
        p.community_count(),
        p.core_flags().len()
    );
    Ok(())
}

fn run_detect_overlap(
    input: &Path,
    fuzzy_path: &Path,
    crisp_path: &Path,
    sweep: bool,
    alphas: &[f64],
    partition_path: Option<&Path>,
    args: &DetectArgs,
) -> Result<(), CliError> {
    let params = args.params()?;
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(CliError::Usage(format!(
            "--alpha must lie in [0, 1], got {a}"
        )));
    }
    let g = load_graph(input)?;
    let sim = similarity(&g, args)?;
    let p = detect_disjoint(&g, &sim, &params);
    if let Some(path) = partition_path {
        write_file(path, |w| formats::write_partition(&g, &p, w))?;
    }
    let fuzzy = build_fuzzy_cover(&g, &sim, &p);
    write_file(fuzzy_path, |w| formats::write_fuzzy_cover(&g, &fuzzy, w))?;
    for &alpha in alphas {
        let crisp = alpha_cut(&fuzzy, alpha).map_err(|e| CliError::Usage(e.to_string()))?;
        let path = if sweep {
            with_suffix(crisp_path, &format!(".alpha{alpha}"))
        } else {
            crisp_path.to_path_buf()
        };
        write_file(&path, |w| formats::write_crisp_cover(&g, &crisp, w))?;
        println!("alpha={alpha} communities={}", crisp.communities.len());
    }
    println!(
        "nodes={} edges={} cores={} fuzzy_communities={}",
        g.node_count(),
        g.edge_count(),
        p.core_flags().len(),
        fuzzy.communities.len()
    );
    Ok(())
}

fn run_eval(
    detected: &Path,
    truth: &Path,
    mode: EvalMode,
    gt_format: CoverFormat,
) -> Result<(), CliError> {
    match mode {
        EvalMode::Partition => {
            let a = formats::read_partition(open(detected)?).map_err(data(detected.display()))?;
            let b = formats::read_partition(open(truth)?).map_err(data(truth.display()))?;
            let nmi = nmi_sqrt(&a, &b).map_err(data("cannot compare partitions"))?;
            println!("nmi={nmi:.6}");
        }
        EvalMode::Cover => {
            let a = formats::read_cover(open(detected)?, CoverFormat::Cover)
                .map_err(data(detected.display()))?;
            let b = formats::read_cover(open(truth)?, gt_format).map_err(data(truth.display()))?;
            let o = onmi(&a, &b).map_err(data("cannot compare covers"))?;
            let w = omega_adjusted(&a, &b).map_err(data("cannot compare covers"))?;
            println!("onmi={o:.6} omega={w:.6}");
        }
    }
    Ok(())
}

fn generate(lfr: &LfrArgs) -> Result<(LfrParams, Benchmark), CliError> {
    let params = LfrParams::from(lfr);
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let bench = gen_lfr_like(&params).map_err(|e| CliError::Data(e.to_string()))?;
    Ok((params, bench))
}

fn run_gen(lfr: &LfrArgs, prefix: &Path) -> Result<(), CliError> {
    let (params, b) = generate(lfr)?;
    let g = &b.graph;
    write_file(&with_suffix(prefix, ".edges"), |w| {
        formats::write_edge_list(g, w)
    })?;
    write_file(&with_suffix(prefix, ".cover"), |w| {
        formats::write_truth_cover(g, &b.truth, w)
    })?;
    write_file(&with_suffix(prefix, ".nodewise"), |w| {
        formats::write_truth_nodewise(g, &b.truth, w)
    })?;
    let meta = serde_json::json!({
        "params": params,
        "rng": RNG_ALGORITHM,
        "empirical_mu": b.empirical_mu,
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "communities": b.truth.communities.len(),
    });
    write_file(&with_suffix(prefix, ".json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &meta)?;
        writeln!(w)
    })?;
    println!(
        "nodes={} edges={} communities={} empirical_mu={:.6}",
        g.node_count(),
        g.edge_count(),
        b.truth.communities.len(),
        b.empirical_mu
    );
    Ok(())
}

pub const BENCH_HEADER: &str =
    "n,avgk,maxk,tau1,tau2,minc,maxc,mu,on,om,seed,similarity,cd,k,t,eps,nmi,onmi,omega,wall_ms,nodes,edges";

fn run_bench(lfr: &LfrArgs, args: &DetectArgs, header: bool) -> Result<(), CliError> {
    let detect_params = args.params()?;
    let (params, b) = generate(lfr)?;
    let g = &b.graph;

    let start = Instant::now();
    let sim = similarity(g, args)?;
    let p = detect_disjoint(g, &sim, &detect_params);
    let fuzzy = build_fuzzy_cover(g, &sim, &p);
    let cuts: Vec<CrispCover> = ALPHA_SWEEP
        .iter()
        .map(|&a| alpha_cut(&fuzzy, a).expect("sweep thresholds lie in [0, 1]"))
        .collect();
    let wall_ms = start.elapsed().as_millis();

    let nmi = match b.truth.to_partition(g) {
        Some(truth) => {
            let score = nmi_sqrt(&labeled_partition(g, &p), &truth).map_err(data("nmi"))?;
            format!("{score:.6}")
        }
        None => String::new(),
    };
    let truth = b.truth.to_cover(g);
    let (mut best_onmi, mut best_omega) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for cut in &cuts {
        let cover = labeled_cover(g, cut);
        best_onmi = best_onmi.max(onmi(&cover, &truth).map_err(data("onmi"))?);
        best_omega = best_omega.max(omega_adjusted(&cover, &truth).map_err(data("omega"))?);
    }

    if header {
        println!("{BENCH_HEADER}");
    }
    let eps = detect_params.eps.map(|e| e.to_string()).unwrap_or_default();
    println!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{},{},{}",
        params.n,
        params.avgk,
        params.maxk,
        params.tau1,
        params.tau2,
        params.minc,
        params.maxc,
        params.mu,
        params.on,
        params.om,
        params.seed,
        args.kind_name(),
        detect_params.definition,
        detect_params.min_size,
        args.iterations,
        eps,
        nmi,
        best_onmi,
        best_omega,
        wall_ms,
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}
