use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use subclust::data::{
    group_into_subspaces, load_dataset, load_idx_images, load_matrix_dataset, save_dataset,
    synth_generate, Grouped, LabeledMatrix, SynthSpec,
};
use subclust::lbg::{assign, lbg_cluster, LbgConfig};
use subclust::metrics::{purity, sweep_partial, write_records_csv, SweepReport};
use subclust::{PrototypeMethod, SubspaceDataset};

use crate::args::{ClusterArgs, CsvArgs, GenerateArgs, MnistArgs, SweepArgs};
use crate::manifest::{beside, RunManifest};

/// How a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Pipeline(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Pipeline(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Pipeline(m) => m,
        }
    }
}

impl From<subclust::Error> for Failure {
    fn from(e: subclust::Error) -> Self {
        Failure::Pipeline(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Pipeline(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Pipeline(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SubspaceDataset, Failure> {
    load_dataset(path).map_err(|e| Failure::Pipeline(format!("{}: {e}", path.display())))
}

fn prefixed(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

pub fn generate(args: &GenerateArgs) -> Outcome {
    let spec = SynthSpec {
        num_prototypes: args.prototypes as usize,
        samples_per_prototype: args.per_group as usize,
        ambient_dim: args.ambient as usize,
        sample_dim: args.dim as usize,
        noise_level: args.noise,
        seed: args.seed,
    };
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let ds = synth_generate(&spec)?;
    save_dataset(&ds, &args.out)?;
    info!("wrote {} samples to {}", ds.len(), args.out.display());

    let mut manifest = RunManifest::new("generate", args.seed, &spec);
    manifest.output(&args.out);
    manifest.write(&beside(&args.out))?;
    Ok(())
}

#[derive(Serialize)]
struct IngestConfig<'a> {
    source: &'a str,
    inputs: Vec<String>,
    classes: &'a [u32],
    group_size: usize,
}

fn ingest(
    source: &'static str,
    inputs: Vec<&Path>,
    matrix: LabeledMatrix,
    classes: &[u32],
    group_size: usize,
    seed: u64,
    out: &Path,
) -> Outcome {
    info!(
        "{} vectors of dimension {}",
        matrix.features.nrows(),
        matrix.features.ncols()
    );
    let Grouped { dataset, per_class } =
        group_into_subspaces(&matrix.features, &matrix.classes, group_size, classes, seed)?;
    for c in &per_class {
        info!(
            "class {}: {} vectors, {} groups kept, {} dropped as rank deficient, {} left over",
            c.class, c.members, c.groups_kept, c.groups_dropped, c.remainder
        );
    }
    let name = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    save_dataset(&dataset.with_name(name), out)?;

    let config = IngestConfig {
        source,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        classes,
        group_size,
    };
    let mut manifest = RunManifest::new("ingest", seed, config);
    manifest.output(out);
    manifest.write(&beside(out))?;
    Ok(())
}

pub fn ingest_mnist(args: &MnistArgs) -> Outcome {
    let matrix = load_idx_images(&args.images, &args.labels).map_err(|e| {
        Failure::Pipeline(format!(
            "{} / {}: {e}",
            args.images.display(),
            args.labels.display()
        ))
    })?;
    ingest(
        "idx",
        vec![&args.images, &args.labels],
        matrix,
        &args.classes,
        args.group as usize,
        args.seed,
        &args.out,
    )
}

pub fn ingest_csv(args: &CsvArgs) -> Outcome {
    let matrix = load_matrix_dataset(&args.input)
        .map_err(|e| Failure::Pipeline(format!("{}: {e}", args.input.display())))?;
    let classes = match &args.classes {
        Some(c) => c.clone(),
        None => {
            let mut all = matrix.classes.clone();
            all.sort_unstable();
            all.dedup();
            all
        }
    };
    ingest(
        "csv",
        vec![&args.input],
        matrix,
        &classes,
        args.group as usize,
        args.seed,
        &args.out,
    )
}

fn base_config(
    method: PrototypeMethod,
    centers: usize,
    proto_dim: usize,
    iters: usize,
    init: subclust::InitStrategy,
    seed: u64,
) -> LbgConfig {
    let mut cfg = LbgConfig::new(method, centers, proto_dim);
    cfg.max_outer_iters = iters;
    cfg.init_strategy = init;
    cfg.seed = seed;
    cfg.svbf.seed = seed;
    cfg
}

#[derive(Serialize)]
struct ClusterConfig<'a> {
    data: String,
    lbg: &'a LbgConfig,
}

pub fn cluster(args: &ClusterArgs) -> Outcome {
    let ds = load(&args.data)?;
    let cfg = base_config(
        args.method.into(),
        args.centers as usize,
        args.proto_dim as usize,
        args.iters,
        args.init.into(),
        args.seed,
    );
    let model = lbg_cluster(&ds, &cfg)?;
    let distances = assign(&ds, &model.prototypes)?.distances;

    let labels_path = prefixed(&args.out_prefix, "_labels.csv");
    let mut w = create(&labels_path)?;
    writeln!(w, "sample_index,label,class,distance")?;
    for (j, (&label, d)) in model.labels.iter().zip(&distances).enumerate() {
        let class = ds
            .class_labels()
            .map(|c| c[j].to_string())
            .unwrap_or_default();
        writeln!(w, "{j},{label},{class},{d}")?;
    }
    w.flush()?;

    let prototypes_path = prefixed(&args.out_prefix, "_prototypes.subds");
    let protos = SubspaceDataset::new(model.prototypes.clone(), None, "prototypes")?;
    save_dataset(&protos, &prototypes_path)?;

    let distortion_path = prefixed(&args.out_prefix, "_distortion.csv");
    let mut w = create(&distortion_path)?;
    writeln!(w, "iteration,distortion")?;
    for (i, d) in model.distortion_history.iter().enumerate() {
        writeln!(w, "{i},{d}")?;
    }
    w.flush()?;

    let config = ClusterConfig {
        data: args.data.display().to_string(),
        lbg: &cfg,
    };
    let mut manifest = RunManifest::new("cluster", args.seed, config);
    for p in [&labels_path, &prototypes_path, &distortion_path] {
        manifest.output(p);
    }
    manifest.write(&prefixed(&args.out_prefix, ".manifest.json"))?;

    println!("final distortion: {}", model.final_distortion());
    if let Some(classes) = ds.class_labels() {
        println!("purity: {}", purity(&model.labels, classes)?);
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepConfig<'a> {
    data: String,
    methods: Vec<PrototypeMethod>,
    centers: &'a [usize],
    trials: usize,
    record_timing: bool,
    lbg: &'a LbgConfig,
}

pub fn sweep(args: &SweepArgs) -> Outcome {
    let ds = load(&args.data)?;
    let methods: Vec<PrototypeMethod> = args.methods.iter().map(|&m| m.into()).collect();
    let centers = &args.centers.0;
    let base = base_config(
        methods[0],
        centers[0],
        args.proto_dim as usize,
        args.iters,
        args.init.into(),
        args.seed,
    );
    let outcome = sweep_partial(&ds, &methods, centers, args.trials as usize, &base)?;
    let mut report = SweepReport::from_records(outcome.records);
    if !args.record_timing {
        report = report.without_timing();
    }

    let suffix = if outcome.failure.is_some() {
        ".partial"
    } else {
        ""
    };
    let runs_path = prefixed(&args.out_prefix, &format!("_runs.csv{suffix}"));
    let medians_path = prefixed(&args.out_prefix, &format!("_medians.csv{suffix}"));
    let mut w = create(&runs_path)?;
    write_records_csv(&report.records, &mut w)?;
    w.flush()?;
    let mut w = create(&medians_path)?;
    report.write_medians_csv(&mut w)?;
    w.flush()?;

    let config = SweepConfig {
        data: args.data.display().to_string(),
        methods: methods.clone(),
        centers,
        trials: args.trials as usize,
        record_timing: args.record_timing,
        lbg: &base,
    };
    let mut manifest = RunManifest::new("sweep", args.seed, config);
    manifest.output(&runs_path);
    manifest.output(&medians_path);
    manifest.write(&prefixed(&args.out_prefix, ".manifest.json"))?;

    if let Some(e) = outcome.failure {
        return Err(Failure::Pipeline(format!(
            "sweep stopped after {} runs: {e}",
            report.records.len()
        )));
    }
    for m in &report.medians {
        println!(
            "{} centers={} median_purity={} median_distortion={}",
            m.method, m.num_centers, m.median_purity, m.median_distortion
        );
    }
    Ok(())
}
