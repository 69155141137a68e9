mod data;
mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use photon_core::classical::{self, NEVER_LIT};
use photon_core::dataset::{to_amplitudes, ClassStyleLayout};
use photon_core::eval::{self, EvalReport};
use photon_core::linalg::{self, build_generator, expm, ExpmConfig, UnitaryTransform};
use photon_core::model::{self, Checkpoint, Optimizer, Schedule, TrainingConfig};
use photon_core::reck::{self, OpticalBlueprint};
use photon_core::{formats, toy, Error, Result};
use serde_json::json;

use data::{DatasetName, Split};
use manifest::RunManifest;

const EXIT_IO: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "photon", version, about = "Single-photon image classification")]
struct Cli {
    /// Threads for matrix products (default: available cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal accuracy of interference-free classification
    Classical(ClassicalArgs),
    /// Closed-form accuracies of the 2x4 two-shape example
    Toy(ToyArgs),
    /// Train a unitary classifier
    Train(TrainArgs),
    /// Evaluate a unitary, checkpoint or blueprint on a dataset
    Eval(EvalArgs),
    /// Turn a unitary into a beam-splitter mesh blueprint
    Decompose(DecomposeArgs),
    /// Split one example into per-class components
    Project(ProjectArgs),
    /// Verify installed dataset files against known digests
    Checksums(ChecksumArgs),
}

#[derive(Args, Debug, Clone, serde::Serialize)]
struct DataArgs {
    #[arg(long, value_enum)]
    dataset: DatasetName,
    #[arg(long, value_enum, default_value = "test")]
    split: Split,
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
}

#[derive(Args, Debug, serde::Serialize)]
struct ClassicalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct ToyArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum OptimizerName {
    Adam,
    Sgd,
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum ScheduleName {
    Constant,
    Cosine,
}

#[derive(Args, Debug, serde::Serialize)]
struct TrainArgs {
    #[arg(long, value_enum)]
    dataset: DatasetName,
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    /// Styles per class (default: smallest count that holds every pixel)
    #[arg(long)]
    styles: Option<usize>,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    /// Examples per step; 0 means the whole set
    #[arg(long, default_value_t = 128)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    init_scale: f64,
    #[arg(long, default_value_t = 1e-12)]
    log_eps: f64,
    #[arg(long, value_enum, default_value = "adam")]
    optimizer: OptimizerName,
    #[arg(long, value_enum, default_value = "constant")]
    schedule: ScheduleName,
    #[arg(long, default_value_t = 8)]
    squarings: u32,
    #[arg(long, default_value_t = 10)]
    taylor_order: u32,
    /// Skip the per-epoch test-set evaluation
    #[arg(long)]
    no_eval: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Photons {
    /// Expected accuracy of one detection event
    Single,
    /// Also the argmax accuracy reached with many photons per example
    Many,
}

#[derive(Args, Debug, serde::Serialize)]
#[group(id = "source", required = true, multiple = false)]
struct ModelSource {
    /// `.uphc` binary or `.json` unitary
    #[arg(long, group = "source")]
    unitary: Option<PathBuf>,
    #[arg(long, group = "source")]
    blueprint: Option<PathBuf>,
    /// Training output directory (weights.bin + checkpoint.json)
    #[arg(long, group = "source")]
    checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct EvalArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long)]
    styles: Option<usize>,
    #[arg(long, value_enum, default_value = "single")]
    photons: Photons,
    #[arg(long, default_value_t = 8)]
    squarings: u32,
    #[arg(long, default_value_t = 10)]
    taylor_order: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct DecomposeArgs {
    /// `unitary.uphc` (or a JSON unitary)
    unitary: PathBuf,
    /// Blueprint path (default: blueprint.json next to the input)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct ProjectArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    data: DataArgs,
    /// Position of the example in the (dark-filtered) split
    #[arg(long)]
    index: usize,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long)]
    styles: Option<usize>,
    /// Two classes for the interference audit, e.g. `1,3`
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pair: Option<Vec<usize>>,
    #[arg(long, default_value_t = 8)]
    squarings: u32,
    #[arg(long, default_value_t = 10)]
    taylor_order: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
struct ChecksumArgs {
    #[arg(long, default_value = "data")]
    data_dir: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } | Error::Format(_) => EXIT_IO,
        Error::Numerical(_) | Error::Diverged { .. } => EXIT_NUMERICAL,
        Error::Consistency(_) | Error::Argument(_) | Error::DegenerateInput(_) | Error::Usage(_) | Error::Json(_) => {
            EXIT_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    linalg::set_threads(threads);
    match run(cli.command, threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cmd: Command, threads: usize) -> Result<()> {
    match cmd {
        Command::Classical(a) => cmd_classical(a, threads),
        Command::Toy(a) => cmd_toy(a, threads),
        Command::Train(a) => cmd_train(a, threads),
        Command::Eval(a) => cmd_eval(a, threads),
        Command::Decompose(a) => cmd_decompose(a, threads),
        Command::Project(a) => cmd_project(a, threads),
        Command::Checksums(a) => cmd_checksums(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

fn default_out(name: &str, dataset: Option<DatasetName>) -> PathBuf {
    let mut s = name.to_string();
    if let Some(d) = dataset {
        s.push('-');
        s.push_str(serde_json::to_value(d).unwrap().as_str().unwrap());
    }
    Path::new("runs").join(s)
}

fn layout_for(classes: usize, styles: Option<usize>, pixels: usize) -> Result<ClassStyleLayout> {
    match styles {
        Some(s) => ClassStyleLayout::new(classes, s, pixels),
        None => ClassStyleLayout::minimal(classes, pixels),
    }
}

/// Layout for a model of dimension `dim`; a mismatch is a configuration error.
fn layout_for_model(classes: usize, styles: Option<usize>, pixels: usize, dim: usize) -> Result<ClassStyleLayout> {
    let styles = styles.unwrap_or_else(|| dim / classes.max(1));
    let layout = ClassStyleLayout::new(classes, styles, pixels).map_err(|e| Error::Consistency(e.to_string()))?;
    if layout.dim() != dim {
        return Err(Error::Consistency(format!(
            "model dimension {dim} does not match layout {classes}x{styles} = {}",
            layout.dim()
        )));
    }
    Ok(layout)
}

fn cmd_classical(a: ClassicalArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let loaded = data::load(&a.data.data_dir, a.data.dataset, a.data.split)?;
    let table = classical::posterior_table(&loaded.images, a.classes)?;
    let report = classical::report(&table, loaded.images.len());
    let map = classical::class_map(&table);

    let out = a.out.clone().unwrap_or_else(|| default_out("classical", Some(a.data.dataset)));
    create_dir(&out)?;
    let mut value = serde_json::to_value(&report)?;
    value["dropped_dark_images"] = json!(loaded.dropped_dark);
    write_json(&out.join("report.json"), &value)?;

    let mut csv = String::new();
    for y in 0..loaded.rows {
        let row: Vec<String> = (0..loaded.cols)
            .map(|x| match map.argmax_class[y * loaded.cols + x] {
                NEVER_LIT => "-1".to_string(),
                c => c.to_string(),
            })
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write(&out.join("class_map.csv"), csv)?;
    // indexed gray levels: class index, 255 for never-lit cells
    let mut pgm = format!("P5\n{} {}\n255\n", loaded.cols, loaded.rows).into_bytes();
    pgm.extend(map.argmax_class.iter().map(|&c| if c == NEVER_LIT { 255 } else { c as u8 }));
    write(&out.join("class_map.pgm"), pgm)?;

    println!("accuracy_bound {:.7}", report.accuracy_bound);
    println!("mutual_information_bits {:.4}", report.mutual_information_bits);
    println!("accuracy_information_bits {:.4}", report.accuracy_information_bits);
    println!("entropy_bits {:.4}", report.entropy_bits);
    RunManifest::new("classical", &a, threads, &loaded.files, None).finish(&out, start)
}

fn cmd_toy(a: ToyArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let shapes = toy::standard_shapes();
    let baseline = toy::baseline_accuracy(shapes);
    let column = toy::column_transform_accuracy(shapes);
    let optimal = toy::optimal_two_state_accuracy(shapes);
    println!("baseline_accuracy {baseline:.10}");
    println!("column_transform_accuracy {column:.10}");
    println!("optimal_accuracy {optimal:.10}");

    let out = a.out.clone().unwrap_or_else(|| default_out("toy", None));
    create_dir(&out)?;
    write_json(
        &out.join("report.json"),
        &json!({
            "baseline_accuracy": baseline,
            "column_transform_accuracy": column,
            "optimal_accuracy": optimal,
        }),
    )?;
    let mut csv = String::from("shape,stage,row,c0,c1,c2,c3\n");
    for (i, shape) in [shapes.0, shapes.1].iter().enumerate() {
        let stages = [
            ("input", shape.amplitudes().map(|v| v * v)),
            ("column_transform", toy::column_transform_probabilities(shape)),
        ];
        for (stage, p) in stages {
            for y in 0..toy::ROWS {
                let cells: Vec<String> = p[y * toy::COLS..(y + 1) * toy::COLS].iter().map(|v| v.to_string()).collect();
                csv.push_str(&format!("{},{stage},{y},{}\n", i + 1, cells.join(",")));
            }
        }
    }
    write(&out.join("probabilities.csv"), csv)?;
    RunManifest::new("toy", &a, threads, &[], None).finish(&out, start)
}

fn cmd_train(a: TrainArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let train = data::load(&a.data_dir, a.dataset, Split::Train)?;
    let test = if a.no_eval || a.dataset == DatasetName::Toy {
        None
    } else {
        Some(data::load(&a.data_dir, a.dataset, Split::Test)?)
    };
    let layout = layout_for(a.classes, a.styles, train.rows * train.cols)?;
    let cfg = TrainingConfig {
        learning_rate: a.lr,
        batch_size: if a.batch_size == 0 { train.images.len() } else { a.batch_size },
        epochs: a.epochs,
        seed: a.seed,
        init_scale: a.init_scale,
        log_eps: a.log_eps,
        expm: ExpmConfig::new(a.squarings, a.taylor_order)?,
        optimizer: match a.optimizer {
            OptimizerName::Adam => Optimizer::adam(),
            OptimizerName::Sgd => Optimizer::Sgd,
        },
        schedule: match a.schedule {
            ScheduleName::Constant => Schedule::Constant,
            ScheduleName::Cosine => Schedule::Cosine,
        },
    };
    let out = a.out.clone().unwrap_or_else(|| default_out("train", Some(a.dataset)));
    create_dir(&out)?;
    let test_states = match &test {
        Some(t) => Some(model::encode_all(&t.images, &layout)?),
        None => None,
    };

    let metrics_path = out.join("metrics.jsonl");
    let mut metrics_file = fs::File::create(&metrics_path).map_err(|e| Error::Io {
        path: metrics_path.clone(),
        source: e,
    })?;
    let result = model::train_with(&train.images, &cfg, &layout, |m, w| {
        let mut line = serde_json::to_value(m)?;
        if let Some(states) = &test_states {
            let u = expm(&build_generator(w)?, &cfg.expm)?;
            let r = eval::evaluate_states(&u, states, &layout)?;
            line["test_expected_accuracy"] = json!(r.expected_accuracy);
            line["test_argmax_accuracy"] = json!(r.argmax_accuracy);
        }
        writeln!(metrics_file, "{line}").map_err(|e| Error::Io {
            path: metrics_path.clone(),
            source: e,
        })?;
        eprintln!("{line}");
        Checkpoint::new(w.clone(), layout, m.step, Some(m.clone()))?.save(&out)
    });
    let run = match result {
        Ok(r) => r,
        Err(Error::Diverged { step, loss, checkpoint }) => {
            let dir = out.join("diverged");
            create_dir(&dir)?;
            checkpoint.save(&dir)?;
            eprintln!("diagnostic checkpoint written to {}", dir.display());
            return Err(Error::Diverged { step, loss, checkpoint });
        }
        Err(e) => return Err(e),
    };
    run.checkpoint.save(&out)?;
    let u = run.checkpoint.unitary(&cfg.expm)?;
    formats::write_unitary(out.join("unitary.uphc"), &u)?;
    if let Some(states) = &test_states {
        let r = eval::evaluate_states(&u, states, &layout)?;
        write_json(&out.join("report.json"), &r)?;
        println!("test_expected_accuracy {:.6}", r.expected_accuracy);
        println!("test_argmax_accuracy {:.6}", r.argmax_accuracy);
    }
    let mut files = train.files.clone();
    if let Some(t) = &test {
        files.extend(t.files.iter().cloned());
    }
    RunManifest::new("train", &a, threads, &files, Some(a.seed))
        .with("training_config", serde_json::to_value(&cfg)?)
        .with("layout", serde_json::to_value(layout)?)
        .finish(&out, start)
}

enum Model {
    Matrix(UnitaryTransform),
    Mesh(OpticalBlueprint),
}

impl Model {
    fn dim(&self) -> usize {
        match self {
            Model::Matrix(u) => u.dim(),
            Model::Mesh(b) => b.dim,
        }
    }

    fn unitary(&self) -> Result<UnitaryTransform> {
        match self {
            Model::Matrix(u) => Ok(u.clone()),
            Model::Mesh(b) => reck::reconstruct(b),
        }
    }
}

fn read_unitary_any(path: &Path) -> Result<UnitaryTransform> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        formats::unitary_from_json(&text)
    } else {
        formats::read_unitary(path)
    }
}

/// Returns the model and the checkpoint layout when one is recorded.
fn load_model(src: &ModelSource, cfg: &ExpmConfig) -> Result<(Model, Option<ClassStyleLayout>, Vec<PathBuf>)> {
    if let Some(p) = &src.unitary {
        Ok((Model::Matrix(read_unitary_any(p)?), None, vec![p.clone()]))
    } else if let Some(p) = &src.blueprint {
        Ok((Model::Mesh(OpticalBlueprint::read(p)?), None, vec![p.clone()]))
    } else if let Some(dir) = &src.checkpoint {
        let ck = Checkpoint::load(dir)?;
        let files = vec![dir.join(model::CHECKPOINT_FILE), dir.join(model::WEIGHTS_FILE)];
        Ok((Model::Matrix(ck.unitary(cfg)?), Some(ck.layout), files))
    } else {
        Err(Error::Usage("one of --unitary, --blueprint, --checkpoint is required".into()))
    }
}

fn model_layout(
    recorded: Option<ClassStyleLayout>,
    classes: usize,
    styles: Option<usize>,
    pixels: usize,
    dim: usize,
) -> Result<ClassStyleLayout> {
    match recorded {
        Some(l) if l.pixel_dim() != pixels => Err(Error::Consistency(format!(
            "checkpoint was trained on {} pixels, dataset has {pixels}",
            l.pixel_dim()
        ))),
        Some(l) => Ok(l),
        None => layout_for_model(classes, styles, pixels, dim),
    }
}

fn hashed(paths: &[PathBuf]) -> Result<Vec<(PathBuf, String)>> {
    paths.iter().map(|p| Ok((p.clone(), data::file_sha256(p)?))).collect()
}

fn confusion_csv(r: &EvalReport) -> String {
    let c = r.confusion.len();
    let mut s = String::from("true\\predicted");
    for k in 0..c {
        s.push_str(&format!(",{k}"));
    }
    s.push('\n');
    for (k, row) in r.confusion.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{k},{}\n", cells.join(",")));
    }
    s
}

fn cmd_eval(a: EvalArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let cfg = ExpmConfig::new(a.squarings, a.taylor_order)?;
    let (model, recorded, model_files) = load_model(&a.source, &cfg)?;
    let loaded = data::load(&a.data.data_dir, a.data.dataset, a.data.split)?;
    let layout = model_layout(recorded, a.classes, a.styles, loaded.rows * loaded.cols, model.dim())?;
    let report = match &model {
        Model::Matrix(u) => eval::evaluate(u, &loaded.images, &layout)?,
        Model::Mesh(b) => eval::evaluate_blueprint(b, &loaded.images, &layout)?,
    };
    let out = a.out.clone().unwrap_or_else(|| default_out("eval", Some(a.data.dataset)));
    create_dir(&out)?;
    let mut value = serde_json::to_value(&report)?;
    if a.photons == Photons::Single {
        value.as_object_mut().unwrap().remove("argmax_accuracy");
    }
    value["photons"] = json!(a.photons);
    value["dropped_dark_images"] = json!(loaded.dropped_dark);
    write_json(&out.join("report.json"), &value)?;
    write(&out.join("confusion.csv"), confusion_csv(&report))?;

    println!("expected_accuracy {:.10}", report.expected_accuracy);
    if a.photons == Photons::Many {
        println!("argmax_accuracy {:.6}", report.argmax_accuracy);
    }
    println!("mutual_information_bits {:.4}", report.mutual_information_bits);
    println!("mutual_information_full_bits {:.4}", report.mutual_information_full_bits);
    println!("accuracy_information_bits {:.4}", report.accuracy_information_bits);
    let mut files = hashed(&model_files)?;
    files.extend(loaded.files.iter().cloned());
    RunManifest::new("eval", &a, threads, &files, None).finish(&out, start)
}

fn cmd_decompose(a: DecomposeArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let u = read_unitary_any(&a.unitary)?;
    let bp = reck::decompose(&u)?;
    let back = reck::reconstruct(&bp)?;
    let err = linalg::max_abs_diff(back.matrix().as_ref(), u.matrix().as_ref());
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| a.unitary.parent().unwrap_or(Path::new(".")).join("blueprint.json"));
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    bp.write(&out)?;
    println!("elements {}", bp.elements.len());
    println!("round_trip_max_error {err:.3e}");
    let manifest_dir = out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    RunManifest::new("decompose", &a, threads, &hashed(std::slice::from_ref(&a.unitary))?, None)
        .with("round_trip_max_error", json!(err))
        .with("blueprint", json!(out))
        .finish_named(manifest_dir, "decompose_manifest.json", start)
}

fn cmd_project(a: ProjectArgs, threads: usize) -> Result<()> {
    let start = Instant::now();
    let cfg = ExpmConfig::new(a.squarings, a.taylor_order)?;
    let (model, recorded, model_files) = load_model(&a.source, &cfg)?;
    let loaded = data::load(&a.data.data_dir, a.data.dataset, a.data.split)?;
    let (rows, cols) = (loaded.rows, loaded.cols);
    let layout = model_layout(recorded, a.classes, a.styles, rows * cols, model.dim())?;
    let image = loaded.images.get(a.index).ok_or_else(|| {
        Error::Argument(format!("index {} out of range for {} examples", a.index, loaded.images.len()))
    })?;
    let u = model.unitary()?;
    let state = to_amplitudes(image, &layout)?;
    let parts = eval::project_all(&u, &state, &layout)?;

    let out = a.out.clone().unwrap_or_else(|| default_out("project", Some(a.data.dataset)));
    create_dir(&out)?;
    write(&out.join("example_magnitude.pgm"), eval::magnitude_pgm(state.amplitudes(), rows, cols))?;
    for p in &parts {
        write(&out.join(format!("class{}_magnitude.pgm", p.class_index)), eval::magnitude_pgm(&p.amplitudes, rows, cols))?;
        write(&out.join(format!("class{}_phase.ppm", p.class_index)), eval::phase_ppm(&p.amplitudes, rows, cols))?;
    }
    let masses: Vec<f64> = parts.iter().map(|p| p.mass).collect();
    let mut ranking: Vec<usize> = (0..masses.len()).collect();
    ranking.sort_by(|&x, &y| masses[y].total_cmp(&masses[x]));
    let mut summary = json!({
        "index": a.index,
        "label": image.label(),
        "masses": masses,
        "ranking": ranking,
    });
    if let Some(pair) = &a.pair {
        let audit = eval::interference_audit(&u, &state, &layout, (pair[0], pair[1]))?;
        let mut csv = String::from("row,col,combined,separate,interference\n");
        for (k, p) in audit.iter().take(rows * cols).enumerate() {
            csv.push_str(&format!("{},{},{},{},{}\n", k / cols, k % cols, p.combined, p.separate, p.interference));
        }
        write(&out.join("interference.csv"), csv)?;
        let total: f64 = audit.iter().map(|p| p.interference).sum();
        let most_negative = audit.iter().map(|p| p.interference).fold(0.0, f64::min);
        summary["interference_total"] = json!(total);
        summary["interference_min"] = json!(most_negative);
    }
    write_json(&out.join("projections.json"), &summary)?;
    println!("label {}", image.label());
    for (c, m) in masses.iter().enumerate() {
        println!("class {c} mass {m:.6}");
    }
    let mut files = hashed(&model_files)?;
    files.extend(loaded.files.iter().cloned());
    RunManifest::new("project", &a, threads, &files, None).finish(&out, start)
}

fn cmd_checksums(a: ChecksumArgs) -> Result<()> {
    let mut missing = 0;
    let mut bad = 0;
    for (name, want) in data::EXPECTED {
        let path = data::resolve(&a.data_dir, name);
        if !path.exists() {
            println!("{want}  {name}  MISSING");
            missing += 1;
            continue;
        }
        let got = data::payload_sha256(&path)?;
        let status = if got == *want { "OK" } else { "MISMATCH" };
        bad += usize::from(got != *want);
        println!("{want}  {name}  {status}");
    }
    for name in data::FASHION_FILES {
        let path = data::resolve(&a.data_dir, name);
        if path.exists() {
            println!("{}  {name}  (no pinned digest)", data::payload_sha256(&path)?);
        } else {
            println!("{:64}  {name}  MISSING", "");
        }
    }
    if bad > 0 {
        return Err(Error::Consistency(format!("{bad} file(s) do not match the expected digest")));
    }
    if missing > 0 {
        eprintln!("{missing} MNIST file(s) missing under {}", a.data_dir.display());
    }
    Ok(())
}
