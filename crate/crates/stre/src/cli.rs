//! Batch command-line front end. Every command that writes an artifact also
//! drops a `<artifact>.manifest.json` beside it recording the command,
//! resolved config, inputs, seed, and wall-clock, so runs can be reproduced.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::corpus::{
    parse_jsonl_history, parse_mediawiki_export, read_histories_jsonl, write_histories_jsonl,
    RevisionHistory,
};
use crate::model::{Example, Stre, StreConfig};
use crate::quality::{
    label_history, quality_revert_report, write_report_csv, DistanceMode, LabeledEdit,
};
use crate::synth::build_vocab;
use crate::train::{
    default_sweep_fractions, evaluate, finetune, retrain_sweep, split_dataset, train, TrainConfig,
    write_history_csv, write_sweep_csv,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed inputs. Exit code 2.
    Input(String),
    /// Everything else. Exit code 1.
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Internal(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn internal_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "stre", version, about = "Edit-quality pipeline over revision histories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InputFormat {
    Xml,
    Jsonl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Distance {
    Char,
    Word,
}

impl From<Distance> for DistanceMode {
    fn from(d: Distance) -> DistanceMode {
        match d {
            Distance::Char => DistanceMode::Char,
            Distance::Word => DistanceMode::Word,
        }
    }
}

/// Shared config plumbing: optional key=value file, then --set overrides,
/// then an optional --seed override on top.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Plain-text config file, one key = value per line.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inline override, repeatable: --set epochs=20
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a revision dump into the histories JSONL format.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: InputFormat,
        #[arg(long)]
        out: PathBuf,
        /// Keep only pages with at least this many edits.
        #[arg(long, default_value_t = 0)]
        min_edits: usize,
    },
    /// Score, label, and revert-flag every edit in a histories file.
    Label {
        #[arg(long)]
        histories: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional quality/revert histogram CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Distance::Char)]
        distance: Distance,
    },
    /// Train a model from scratch on labeled examples.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Fine-tune the dense head of a pretrained checkpoint on new data.
    Finetune {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        fraction: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Report AUPRC of a checkpoint on a labeled dataset.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Classify a single edit and show the attention diagnostics.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        before: String,
        #[arg(long)]
        after: String,
    },
    /// Fine-tune at a range of data fractions and tabulate test AUPRC.
    Sweep {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Fractions to sweep; defaults to 0.05 through 0.50.
        #[arg(long, value_delimiter = ',')]
        fractions: Vec<f64>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub wall_clock_seconds: f64,
}

pub fn manifest_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    artifact.with_file_name(name)
}

fn write_manifest(artifact: &Path, manifest: &RunManifest) -> Result<()> {
    let path = manifest_path(artifact);
    let json = serde_json::to_string_pretty(manifest).map_err(internal_err)?;
    std::fs::write(&path, json).map_err(internal_err)
}

fn manifest(
    command: &str,
    config: serde_json::Value,
    inputs: &[&Path],
    outputs: &[&Path],
    seed: u64,
    started: Instant,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        config,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    }
}

/// Full resolved configuration for the training commands.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub model: StreConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { train: TrainConfig::default(), model: StreConfig::default() }
    }
}

pub fn resolve_config(args: &ConfigArgs, base_model: StreConfig) -> Result<RunConfig> {
    let mut cfg = RunConfig { train: TrainConfig::default(), model: base_model };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("{} line {}: expected key = value", path.display(), lineno + 1))
            })?;
            apply_setting(&mut cfg, key.trim(), value.trim())?;
        }
    }
    for setting in &args.set {
        let (key, value) = setting
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--set {setting}: expected KEY=VALUE")))?;
        apply_setting(&mut cfg, key.trim(), value.trim())?;
    }
    if let Some(seed) = args.seed {
        cfg.train.seed = seed;
    }
    cfg.train.validate().map_err(input_err)?;
    cfg.model.validate().map_err(CliError::Input)?;
    Ok(cfg)
}

fn apply_setting(cfg: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        value.parse().map_err(|e| CliError::Input(format!("config key {key}: {e}")))
    }
    match key {
        "epochs" => cfg.train.epochs = parse(key, value)?,
        "batch_size" => cfg.train.batch_size = parse(key, value)?,
        "lr" => cfg.train.lr = parse(key, value)?,
        "weight_decay" => cfg.train.weight_decay = parse(key, value)?,
        "seed" => cfg.train.seed = parse(key, value)?,
        "finetune_fraction" => cfg.train.finetune_fraction = parse(key, value)?,
        "decoupled_decay" => cfg.train.decoupled_decay = parse(key, value)?,
        "damaging_weight" => cfg.train.damaging_weight = parse(key, value)?,
        "split" => {
            let parts: Vec<&str> = value.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::Input(format!(
                    "config key split: expected three comma-separated fractions, got {value:?}"
                )));
            }
            for (slot, part) in cfg.train.split.iter_mut().zip(parts) {
                *slot = parse("split", part.trim())?;
            }
        }
        "word_embed_dim" => cfg.model.word_embed_dim = parse(key, value)?,
        "char_embed_dim" => cfg.model.char_embed_dim = parse(key, value)?,
        "hidden" => cfg.model.hidden = parse(key, value)?,
        "attn_context_dim" => cfg.model.attn_context_dim = parse(key, value)?,
        "dense_dims" => {
            cfg.model.dense_dims = value
                .split(',')
                .map(|p| parse("dense_dims", p.trim()))
                .collect::<Result<Vec<usize>>>()?;
        }
        "dropout" => cfg.model.dropout = parse(key, value)?,
        "max_words" => cfg.model.max_words = parse(key, value)?,
        "max_chars" => cfg.model.max_chars = parse(key, value)?,
        "attn_activation" => {
            cfg.model.attn_activation = match value {
                "tanh" => crate::model::Activation::Tanh,
                "sigmoid" => crate::model::Activation::Sigmoid,
                other => {
                    return Err(CliError::Input(format!(
                        "config key attn_activation: unknown value {other:?} (tanh|sigmoid)"
                    )))
                }
            }
        }
        other => return Err(CliError::Input(format!("unknown config key {other:?}"))),
    }
    Ok(())
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn create_output(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Examples JSONL: one JSON object per line with at least s_initial,
/// s_final, and label fields. The labeled-edit output of `label` loads
/// directly.
pub fn read_examples(path: &Path) -> Result<Vec<Example>> {
    let reader = open_input(path)?;
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(input_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let ex: Example = serde_json::from_str(&line)
            .map_err(|e| CliError::Input(format!("{} line {}: {e}", path.display(), lineno + 1)))?;
        out.push(ex);
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("{}: no examples", path.display())));
    }
    Ok(out)
}

pub fn write_examples(path: &Path, examples: &[Example]) -> Result<()> {
    let mut writer = create_output(path)?;
    for ex in examples {
        let json = serde_json::to_string(ex).map_err(internal_err)?;
        writeln!(writer, "{json}").map_err(internal_err)?;
    }
    writer.flush().map_err(internal_err)
}

fn read_histories(path: &Path, format: InputFormat) -> Result<Vec<RevisionHistory>> {
    let reader = open_input(path)?;
    match format {
        InputFormat::Xml => parse_mediawiki_export(reader).map_err(input_err),
        InputFormat::Jsonl => parse_jsonl_history(reader).map_err(input_err),
    }
}

fn load_model(path: &Path) -> Result<Stre> {
    Stre::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { input, format, out, min_edits } => {
            cmd_ingest(&input, format, &out, min_edits)
        }
        Command::Label { histories, out, report, distance } => {
            cmd_label(&histories, &out, report.as_deref(), distance.into())
        }
        Command::Train { data, out, config } => cmd_train(&data, &out, &config),
        Command::Finetune { checkpoint, data, fraction, out, config } => {
            cmd_finetune(&checkpoint, &data, fraction, &out, &config)
        }
        Command::Eval { checkpoint, data } => cmd_eval(&checkpoint, &data),
        Command::Predict { checkpoint, before, after } => cmd_predict(&checkpoint, &before, &after),
        Command::Sweep { checkpoint, data, out, fractions, config } => {
            cmd_sweep(&checkpoint, &data, &out, &fractions, &config)
        }
    }
}

pub fn cmd_ingest(input: &Path, format: InputFormat, out: &Path, min_edits: usize) -> Result<()> {
    let started = Instant::now();
    let histories = read_histories(input, format)?;
    let total = histories.len();
    let kept: Vec<RevisionHistory> = histories
        .into_iter()
        .filter(|h| h.revisions.len().saturating_sub(1) >= min_edits)
        .collect();
    for h in &kept {
        println!("page {} ({}): {} revisions", h.page_id, h.title, h.revisions.len());
    }
    let mut writer = create_output(out)?;
    write_histories_jsonl(&mut writer, &kept).map_err(internal_err)?;
    writer.flush().map_err(internal_err)?;
    println!("wrote {} of {} pages to {}", kept.len(), total, out.display());
    let m = manifest(
        "ingest",
        serde_json::json!({ "format": format!("{format:?}"), "min_edits": min_edits }),
        &[input],
        &[out],
        0,
        started,
    );
    write_manifest(out, &m)
}

pub fn cmd_label(
    histories_path: &Path,
    out: &Path,
    report: Option<&Path>,
    mode: DistanceMode,
) -> Result<()> {
    let started = Instant::now();
    let histories = read_histories_jsonl(open_input(histories_path)?).map_err(input_err)?;
    let mut labeled: Vec<LabeledEdit> = Vec::new();
    let mut unscorable = 0;
    for h in &histories {
        let (edits, skipped) = label_history(h, mode);
        labeled.extend(edits);
        unscorable += skipped;
    }
    let mut writer = create_output(out)?;
    for edit in &labeled {
        let json = serde_json::to_string(edit).map_err(internal_err)?;
        writeln!(writer, "{json}").map_err(internal_err)?;
    }
    writer.flush().map_err(internal_err)?;
    println!("{} labeled sentence edits, {} unscorable revisions", labeled.len(), unscorable);
    let mut outputs: Vec<&Path> = vec![out];
    if let Some(report_path) = report {
        let bins = quality_revert_report(&labeled);
        let mut w = create_output(report_path)?;
        write_report_csv(&mut w, &bins).map_err(internal_err)?;
        w.flush().map_err(internal_err)?;
        outputs.push(report_path);
    }
    let m = manifest(
        "label",
        serde_json::json!({ "distance": format!("{mode:?}") }),
        &[histories_path],
        &outputs,
        0,
        started,
    );
    write_manifest(out, &m)
}

pub fn cmd_train(data: &Path, out: &Path, config_args: &ConfigArgs) -> Result<()> {
    let started = Instant::now();
    let cfg = resolve_config(config_args, StreConfig::default())?;
    let examples = read_examples(data)?;
    let (train_set, val_set, test_set) =
        split_dataset(&examples, cfg.train.split, cfg.train.seed).map_err(internal_err)?;
    let vocab = build_vocab(&train_set);
    let mut model =
        Stre::new(cfg.model.clone(), vocab, cfg.train.seed).map_err(internal_err)?;
    let val = if val_set.is_empty() { None } else { Some(val_set.as_slice()) };
    let outcome = train(&mut model, &train_set, val, &cfg.train).map_err(internal_err)?;
    model.save(out).map_err(internal_err)?;
    let history_path = out.with_extension("history.csv");
    let mut w = create_output(&history_path)?;
    write_history_csv(&mut w, &outcome.history).map_err(internal_err)?;
    w.flush().map_err(internal_err)?;
    println!(
        "trained {} epochs on {} examples, kept epoch {}",
        outcome.history.len(),
        train_set.len(),
        outcome.best_epoch
    );
    if !test_set.is_empty() {
        match evaluate(&model, &test_set) {
            Ok(report) => println!("test AUPRC {:.4} on {} examples", report.auprc, test_set.len()),
            Err(e) => println!("test split not scored: {e}"),
        }
    }
    let m = manifest(
        "train",
        serde_json::to_value(&cfg).map_err(internal_err)?,
        &[data],
        &[out, &history_path],
        cfg.train.seed,
        started,
    );
    write_manifest(out, &m)
}

pub fn cmd_finetune(
    checkpoint: &Path,
    data: &Path,
    fraction: f64,
    out: &Path,
    config_args: &ConfigArgs,
) -> Result<()> {
    let started = Instant::now();
    let mut model = load_model(checkpoint)?;
    let cfg = resolve_config(config_args, model.config.clone())?;
    let examples = read_examples(data)?;
    let outcome = finetune(&mut model, &examples, fraction, &cfg.train).map_err(internal_err)?;
    model.save(out).map_err(internal_err)?;
    let history_path = out.with_extension("history.csv");
    let mut w = create_output(&history_path)?;
    write_history_csv(&mut w, &outcome.history).map_err(internal_err)?;
    w.flush().map_err(internal_err)?;
    println!(
        "finetuned on {} examples, test AUPRC {:.4} on {}",
        outcome.train_size, outcome.report.auprc, outcome.test_size
    );
    let m = manifest(
        "finetune",
        serde_json::json!({ "train": cfg.train, "fraction": fraction }),
        &[checkpoint, data],
        &[out, &history_path],
        cfg.train.seed,
        started,
    );
    write_manifest(out, &m)
}

pub fn cmd_eval(checkpoint: &Path, data: &Path) -> Result<()> {
    let model = load_model(checkpoint)?;
    let examples = read_examples(data)?;
    let report = evaluate(&model, &examples).map_err(internal_err)?;
    println!(
        "AUPRC {:.4} ({} damaging, {} good-faith)",
        report.auprc, report.positives, report.negatives
    );
    Ok(())
}

pub fn cmd_predict(checkpoint: &Path, before: &str, after: &str) -> Result<()> {
    let model = load_model(checkpoint)?;
    let prediction = model.predict(before, after).map_err(internal_err)?;
    println!("p_damaging {:.4}", prediction.p_damaging);
    println!("p_good {:.4}", prediction.p_good);
    let mut words = prediction.word_attention.clone();
    words.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    println!("top words:");
    for (word, weight) in words.iter().take(5) {
        println!("  {word:>16}  {weight:.4}");
    }
    let mut chars = prediction.char_attention.clone();
    chars.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    println!("top chars:");
    for (c, weight) in chars.iter().take(5) {
        println!("  {:>16}  {weight:.4}", format!("{c:?}"));
    }
    Ok(())
}

pub fn cmd_sweep(
    checkpoint: &Path,
    data: &Path,
    out: &Path,
    fractions: &[f64],
    config_args: &ConfigArgs,
) -> Result<()> {
    let started = Instant::now();
    let mut model = load_model(checkpoint)?;
    let cfg = resolve_config(config_args, model.config.clone())?;
    let examples = read_examples(data)?;
    let fractions: Vec<f64> =
        if fractions.is_empty() { default_sweep_fractions() } else { fractions.to_vec() };
    let rows = retrain_sweep(&mut model, &examples, &fractions, &cfg.train).map_err(internal_err)?;
    let mut w = create_output(out)?;
    write_sweep_csv(&mut w, &rows).map_err(internal_err)?;
    w.flush().map_err(internal_err)?;
    for (fraction, score) in &rows {
        println!("fraction {fraction:.2}: AUPRC {score:.4}");
    }
    let m = manifest(
        "sweep",
        serde_json::json!({ "train": cfg.train, "fractions": fractions }),
        &[checkpoint, data],
        &[out],
        cfg.train.seed,
        started,
    );
    write_manifest(out, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(set: &[&str]) -> ConfigArgs {
        ConfigArgs { config: None, set: set.iter().map(|s| s.to_string()).collect(), seed: None }
    }

    #[test]
    fn set_overrides_apply() {
        let cfg = resolve_config(&args(&["epochs=7", "hidden=3", "dense_dims=6,3"]), StreConfig::micro())
            .unwrap();
        assert_eq!(cfg.train.epochs, 7);
        assert_eq!(cfg.model.hidden, 3);
        assert_eq!(cfg.model.dense_dims, vec![6, 3]);
    }

    #[test]
    fn unknown_key_names_the_key() {
        let err = resolve_config(&args(&["no_such_key=1"]), StreConfig::micro()).unwrap_err();
        match err {
            CliError::Input(m) => assert!(m.contains("no_such_key")),
            other => panic!("expected input error, got {other:?}"),
        }
    }

    #[test]
    fn config_file_is_parsed_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\nepochs = 3\nlr = 0.5 # inline\n\nsplit = 0.6,0.2,0.2\n")
            .unwrap();
        let cfg_args =
            ConfigArgs { config: Some(path), set: vec!["lr=0.25".into()], seed: Some(99) };
        let cfg = resolve_config(&cfg_args, StreConfig::micro()).unwrap();
        assert_eq!(cfg.train.epochs, 3);
        assert_eq!(cfg.train.lr, 0.25, "--set outranks the file");
        assert_eq!(cfg.train.split, [0.6, 0.2, 0.2]);
        assert_eq!(cfg.train.seed, 99);
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("/tmp/model.ckpt")),
            PathBuf::from("/tmp/model.ckpt.manifest.json")
        );
    }

    #[test]
    fn examples_round_trip_and_blank_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.jsonl");
        let data = vec![
            Example { s_initial: "a.".into(), s_final: "b.".into(), label: 1 },
            Example { s_initial: "c.".into(), s_final: "d.".into(), label: -1 },
        ];
        write_examples(&path, &data).unwrap();
        assert_eq!(read_examples(&path).unwrap(), data);
    }

    #[test]
    fn missing_input_is_an_input_error() {
        let err = read_examples(Path::new("/nonexistent/nope.jsonl")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
