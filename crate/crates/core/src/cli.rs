//! The `flors` command line.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::adaptation::{LogPolicy, Mode, TaggerSession};
use crate::classifier::{LinearModel, TrainConfig};
use crate::config::Config;
use crate::corpus::{read_labeled, read_unlabeled, Corpus, Sentence};
use crate::error::{Error, Result};
use crate::eval::{write_metrics_csv, write_sample_stats_csv, write_time_course_csv, Category};
use crate::features::{
    build_representations, read_representations, write_representations, RepresentationConfig,
    DEFAULT_INDICATORS, DEFAULT_SUFFIX_MIN_COUNT,
};
use crate::pipeline::{
    run_experiment, train_model, write_comparisons_csv, ExperimentSettings, LabeledSize,
    UnlabeledSize,
};
use crate::synth::{generate, SyntheticShiftConfig};

#[derive(Debug, Parser)]
#[command(name = "flors", version, about = "POS tagging with static, batch and online adaptation of distributional counts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build lexicons and count store from representation corpora.
    BuildReps(BuildRepsArgs),
    /// Train a model with features from a frozen store.
    Train(TrainArgs),
    /// Tag a stream of sentences.
    Tag(TagArgs),
    /// Run the static/online/batch comparison and write CSV reports.
    Experiment(ExperimentArgs),
    /// Generate synthetic source and target corpora with a vocabulary shift.
    Synth(SynthArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct Shared {
    /// Flat `key = value` file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long = "n-indicators")]
    pub n_indicators: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub fraction: Option<f64>,
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default, Clone)]
pub struct Hyper {
    #[arg(long)]
    pub regularization: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long = "max-epochs")]
    pub max_epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BuildRepsArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Labeled corpus (vertical format); repeatable.
    #[arg(long)]
    pub train: Vec<PathBuf>,
    /// Unlabeled corpus (one sentence per line); repeatable.
    #[arg(long)]
    pub unlabeled: Vec<PathBuf>,
    #[arg(long = "suffix-min-count")]
    pub suffix_min_count: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[command(flatten)]
    pub hyper: Hyper,
    #[arg(long)]
    pub train: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// One sentence per line.
    Plain,
    /// `surface<TAB>tag` lines, blank line between sentences.
    Labeled,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Input path, `-` for standard input.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "input-format", value_enum)]
    pub input_format: Option<InputFormat>,
    /// Write the adapted store here at end of stream (batch/online only).
    #[arg(long = "store-out")]
    pub store_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[command(flatten)]
    pub hyper: Hyper,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub unlabeled: Vec<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Labeled conditions: small, big.
    #[arg(long, value_delimiter = ',')]
    pub labeled: Vec<LabeledSize>,
    /// Representation conditions: 0, big.
    #[arg(long = "unlabeled-sizes", value_delimiter = ',')]
    pub unlabeled_sizes: Vec<UnlabeledSize>,
    #[arg(long = "small-fraction")]
    pub small_fraction: Option<f64>,
    #[arg(long = "bin-width")]
    pub bin_width: Option<usize>,
    #[arg(long = "suffix-min-count")]
    pub suffix_min_count: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub shared: Shared,
    #[arg(long)]
    pub tags: Option<usize>,
    #[arg(long = "source-vocab")]
    pub source_vocab: Option<usize>,
    #[arg(long = "target-vocab")]
    pub target_vocab: Option<usize>,
    #[arg(long)]
    pub overlap: Option<f64>,
    #[arg(long = "source-sentences")]
    pub source_sentences: Option<usize>,
    #[arg(long = "target-sentences")]
    pub target_sentences: Option<usize>,
    #[arg(long = "unlabeled-sentences")]
    pub unlabeled_sentences: Option<usize>,
    #[arg(long = "min-len")]
    pub min_len: Option<usize>,
    #[arg(long = "max-len")]
    pub max_len: Option<usize>,
}

const SHARED_KEYS: &[&str] = &[
    "mode", "n-indicators", "seed", "trials", "fraction", "store", "model", "out",
];

fn load_config(shared: &Shared, extra: &[&str]) -> Result<Config> {
    let config = match &shared.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let known: Vec<&str> = SHARED_KEYS.iter().chain(extra).copied().collect();
    config.check_keys(&known)?;
    Ok(config)
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("missing required setting `{name}`")))
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin()));
    }
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    Ok(Box::new(file))
}

fn create_output(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdout()));
    }
    let file = File::create(path).map_err(|e| Error::file(path, e))?;
    Ok(Box::new(BufWriter::new(file)))
}

fn read_labeled_file(path: &Path) -> Result<Corpus> {
    read_labeled(open_input(path)?).map_err(|e| with_path(e, path))
}

fn read_unlabeled_file(path: &Path) -> Result<Corpus> {
    read_unlabeled(open_input(path)?).map_err(|e| with_path(e, path))
}

fn with_path(error: Error, path: &Path) -> Error {
    match error {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        Error::NoSentences => Error::InvalidArgument(format!("{}: no sentences", path.display())),
        other => other,
    }
}

fn train_config(config: &Config, hyper: &Hyper, seed: Option<u64>) -> Result<TrainConfig> {
    let defaults = TrainConfig::default();
    Ok(TrainConfig {
        regularization: config
            .resolve(hyper.regularization, "regularization")?
            .unwrap_or(defaults.regularization),
        tolerance: config.resolve(hyper.tolerance, "tolerance")?.unwrap_or(defaults.tolerance),
        max_epochs: config.resolve(hyper.max_epochs, "max-epochs")?.unwrap_or(defaults.max_epochs),
        seed: config.resolve(seed, "seed")?.unwrap_or(defaults.seed),
    })
}

pub fn cmd_build_reps(args: &BuildRepsArgs) -> Result<()> {
    let config = load_config(&args.shared, &["train", "unlabeled", "suffix-min-count"])?;
    let train: Vec<PathBuf> = config.resolve_list(args.train.clone(), "train")?;
    let unlabeled: Vec<PathBuf> = config.resolve_list(args.unlabeled.clone(), "unlabeled")?;
    if train.is_empty() && unlabeled.is_empty() {
        return Err(Error::InvalidArgument(
            "build-reps needs at least one --train or --unlabeled corpus".into(),
        ));
    }
    let out = required(
        config
            .resolve(args.shared.out.clone(), "out")?
            .or(config.resolve(args.shared.store.clone(), "store")?),
        "out",
    )?;
    let rep = RepresentationConfig {
        n: config
            .resolve(args.shared.n_indicators, "n-indicators")?
            .unwrap_or(DEFAULT_INDICATORS),
        suffix_min_count: config
            .resolve(args.suffix_min_count, "suffix-min-count")?
            .unwrap_or(DEFAULT_SUFFIX_MIN_COUNT),
    };
    let mut corpora = Vec::new();
    for path in &train {
        corpora.push(read_labeled_file(path)?);
    }
    for path in &unlabeled {
        corpora.push(read_unlabeled_file(path)?);
    }
    let refs: Vec<&Corpus> = corpora.iter().collect();
    let (lexicons, store) = build_representations(&refs, rep)?;
    let mut w = create_output(&out)?;
    write_representations(&mut w, &lexicons, &store)?;
    w.flush()?;
    eprintln!(
        "indicators {}  suffixes {}  shapes {}  words {}  tokens {}",
        lexicons.n(),
        lexicons.suffixes.len(),
        lexicons.shapes.len(),
        store.word_count(),
        store.total_tokens_seen()
    );
    Ok(())
}

fn load_store(path: &Path) -> Result<(crate::features::Lexicons, crate::features::CountStore)> {
    read_representations(open_input(path)?).map_err(|e| with_path(e, path))
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = load_config(
        &args.shared,
        &["train", "regularization", "tolerance", "max-epochs"],
    )?;
    let train_path = required(config.resolve(args.train.clone(), "train")?, "train")?;
    let store_path = required(config.resolve(args.shared.store.clone(), "store")?, "store")?;
    let out = required(
        config
            .resolve(args.shared.out.clone(), "out")?
            .or(config.resolve(args.shared.model.clone(), "model")?),
        "out",
    )?;
    let train_cfg = train_config(&config, &args.hyper, args.shared.seed)?;
    let (lexicons, store) = load_store(&store_path)?;
    let corpus = read_labeled_file(&train_path)?;
    let (model, report) = train_model(&corpus, &lexicons, &store, &train_cfg)?;
    let mut w = create_output(&out)?;
    model.write(&mut w)?;
    w.flush()?;
    if report.single_tag {
        eprintln!("warning: training data has a single tag; the model always predicts it");
    }
    eprintln!(
        "tags {}  features {}  examples {}  epochs {}",
        model.tags().len(),
        model.feature_dim(),
        report.examples,
        report.max_epochs()
    );
    Ok(())
}

fn open_session(shared: &Shared, config: &Config, mode: Mode) -> Result<TaggerSession> {
    let store_path = required(config.resolve(shared.store.clone(), "store")?, "store")?;
    let model_path = required(config.resolve(shared.model.clone(), "model")?, "model")?;
    let (lexicons, store) = load_store(&store_path)?;
    let model = LinearModel::read(open_input(&model_path)?).map_err(|e| with_path(e, &model_path))?;
    TaggerSession::new(Arc::new(model), Arc::new(lexicons), Arc::new(store), mode)
}

fn write_tagged<W: Write>(out: &mut W, sentence: &Sentence, tags: &[String]) -> Result<()> {
    for (surface, tag) in sentence.surfaces().zip(tags) {
        writeln!(out, "{surface}\t{tag}")?;
    }
    writeln!(out)?;
    Ok(())
}

fn read_tag_input(reader: Box<dyn Read>, format: InputFormat) -> Result<Vec<Sentence>> {
    let corpus = match format {
        InputFormat::Plain => read_unlabeled(reader),
        InputFormat::Labeled => read_labeled(reader),
    };
    match corpus {
        Ok(c) => Ok(c.into_sentences()),
        Err(Error::NoSentences) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

pub fn cmd_tag(args: &TagArgs) -> Result<()> {
    let config = load_config(&args.shared, &["input", "input-format", "store-out"])?;
    let mode = config.resolve(args.shared.mode, "mode")?.unwrap_or(Mode::Static);
    let input = config
        .resolve(args.input.clone(), "input")?
        .unwrap_or_else(|| PathBuf::from("-"));
    let format = match args.input_format {
        Some(f) => f,
        None => match config.get("input-format") {
            Some(v) => InputFormat::from_str(v, true)
                .map_err(|_| Error::InvalidArgument(format!("invalid input format {v:?}")))?,
            None => InputFormat::Plain,
        },
    };
    let store_out = config.resolve(args.store_out.clone(), "store-out")?;
    if store_out.is_some() && mode == Mode::Static {
        return Err(Error::InvalidArgument(
            "--store-out has no effect in static mode".into(),
        ));
    }
    let out_path = config
        .resolve(args.shared.out.clone(), "out")?
        .unwrap_or_else(|| PathBuf::from("-"));

    let mut session = open_session(&args.shared, &config, mode)?.with_log_policy(LogPolicy::Disabled);
    let reader = open_input(&input)?;
    let mut out = create_output(&out_path)?;

    if mode == Mode::Batch || format == InputFormat::Labeled {
        let sentences = read_tag_input(reader, format)?;
        if mode == Mode::Batch {
            let corpus = Corpus::new(sentences.iter().map(Sentence::without_tags).collect(), false)?;
            session.prepare_batch(&corpus)?;
        }
        for sentence in &sentences {
            let tags = session.tag_sentence(sentence)?;
            write_tagged(&mut out, sentence, &tags)?;
        }
    } else {
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let sentence = Sentence::from_text(&line).map_err(|e| Error::parse(i + 1, e.to_string()))?;
            let tags = session.tag_sentence(&sentence)?;
            write_tagged(&mut out, &sentence, &tags)?;
            out.flush()?;
        }
    }
    out.flush()?;

    if let Some(path) = store_out {
        let mut w = create_output(&path)?;
        write_representations(&mut w, session.lexicons(), session.store())?;
        w.flush()?;
    }
    Ok(())
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let config = load_config(
        &args.shared,
        &[
            "train",
            "unlabeled",
            "test",
            "labeled",
            "unlabeled-sizes",
            "small-fraction",
            "bin-width",
            "suffix-min-count",
            "regularization",
            "tolerance",
            "max-epochs",
        ],
    )?;
    let train = read_labeled_file(&required(config.resolve(args.train.clone(), "train")?, "train")?)?;
    let test = read_labeled_file(&required(config.resolve(args.test.clone(), "test")?, "test")?)?;
    let out_dir = required(config.resolve(args.shared.out.clone(), "out")?, "out")?;
    let mut settings = ExperimentSettings::new(train, test);
    for path in config.resolve_list::<PathBuf>(args.unlabeled.clone(), "unlabeled")? {
        settings.unlabeled.push(read_unlabeled_file(&path)?);
    }
    let labeled = config.resolve_list(args.labeled.clone(), "labeled")?;
    if !labeled.is_empty() {
        settings.labeled_sizes = labeled;
    }
    let unlabeled_sizes = config.resolve_list(args.unlabeled_sizes.clone(), "unlabeled-sizes")?;
    if !unlabeled_sizes.is_empty() {
        settings.unlabeled_sizes = unlabeled_sizes;
    } else if !settings.unlabeled.is_empty() {
        settings.unlabeled_sizes = vec![UnlabeledSize::None, UnlabeledSize::Big];
    }
    if let Some(mode) = config.resolve(args.shared.mode, "mode")? {
        settings.modes = vec![mode];
    }
    if let Some(f) = config.resolve(args.small_fraction, "small-fraction")? {
        settings.small_fraction = f;
    }
    if let Some(w) = config.resolve(args.bin_width, "bin-width")? {
        settings.bin_width = w;
    }
    settings.representation = RepresentationConfig {
        n: config
            .resolve(args.shared.n_indicators, "n-indicators")?
            .unwrap_or(DEFAULT_INDICATORS),
        suffix_min_count: config
            .resolve(args.suffix_min_count, "suffix-min-count")?
            .unwrap_or(DEFAULT_SUFFIX_MIN_COUNT),
    };
    settings.training = train_config(&config, &args.hyper, args.shared.seed)?;
    settings.seed = settings.training.seed;
    if let Some(t) = config.resolve(args.shared.trials, "trials")? {
        settings.trials = t;
    }
    if let Some(f) = config.resolve(args.shared.fraction, "fraction")? {
        settings.fraction = f;
    }

    let results = run_experiment(&settings)?;
    fs::create_dir_all(&out_dir).map_err(|e| Error::file(&out_dir, e))?;
    let file = |name: &str| -> Result<BufWriter<File>> {
        let path = out_dir.join(name);
        Ok(BufWriter::new(File::create(&path).map_err(|e| Error::file(&path, e))?))
    };
    write_metrics_csv(file("metrics.csv")?, &results.reports)?;
    write_time_course_csv(file("timecourse.csv")?, &results.time_courses)?;
    write_sample_stats_csv(file("sample_stats.csv")?, &results.sample_stats)?;
    write_comparisons_csv(file("significance.csv")?, &results.comparisons)?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{:<22} {:>8} {:>8} {:>8} {:>8}", "condition", "ALL", "KN", "SHFT", "OOV")?;
    for report in &results.reports {
        let cell = |c| {
            report
                .accuracy(c)
                .map_or_else(|| "-".to_string(), |a| format!("{:.2}", 100.0 * a))
        };
        writeln!(
            out,
            "{:<22} {:>8} {:>8} {:>8} {:>8}",
            report.condition.to_string(),
            cell(Category::All),
            cell(Category::Kn),
            cell(Category::Shft),
            cell(Category::Oov)
        )?;
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let config = load_config(
        &args.shared,
        &[
            "tags",
            "source-vocab",
            "target-vocab",
            "overlap",
            "source-sentences",
            "target-sentences",
            "unlabeled-sentences",
            "min-len",
            "max-len",
        ],
    )?;
    let d = SyntheticShiftConfig::default();
    let synth = SyntheticShiftConfig {
        tags: config.resolve(args.tags, "tags")?.unwrap_or(d.tags),
        source_vocab: config.resolve(args.source_vocab, "source-vocab")?.unwrap_or(d.source_vocab),
        target_vocab: config.resolve(args.target_vocab, "target-vocab")?.unwrap_or(d.target_vocab),
        overlap: config.resolve(args.overlap, "overlap")?.unwrap_or(d.overlap),
        source_sentences: config
            .resolve(args.source_sentences, "source-sentences")?
            .unwrap_or(d.source_sentences),
        target_sentences: config
            .resolve(args.target_sentences, "target-sentences")?
            .unwrap_or(d.target_sentences),
        unlabeled_sentences: config
            .resolve(args.unlabeled_sentences, "unlabeled-sentences")?
            .unwrap_or(d.unlabeled_sentences),
        min_len: config.resolve(args.min_len, "min-len")?.unwrap_or(d.min_len),
        max_len: config.resolve(args.max_len, "max-len")?.unwrap_or(d.max_len),
        seed: config.resolve(args.shared.seed, "seed")?.unwrap_or(d.seed),
    };
    let out_dir = required(config.resolve(args.shared.out.clone(), "out")?, "out")?;
    let corpora = generate(&synth)?;
    fs::create_dir_all(&out_dir).map_err(|e| Error::file(&out_dir, e))?;
    let write = |name: &str, corpus: &Corpus, labeled: bool| -> Result<()> {
        let path = out_dir.join(name);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| Error::file(&path, e))?);
        if labeled {
            corpus.write_labeled(&mut w)?;
        } else {
            corpus.write_unlabeled(&mut w)?;
        }
        w.flush()?;
        Ok(())
    };
    write("source.tsv", &corpora.source, true)?;
    write("target.tsv", &corpora.target, true)?;
    if let Some(unlabeled) = &corpora.unlabeled {
        write("unlabeled.txt", unlabeled, false)?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::BuildReps(a) => cmd_build_reps(a),
        Command::Train(a) => cmd_train(a),
        Command::Tag(a) => cmd_tag(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Synth(a) => cmd_synth(a),
    }
}
