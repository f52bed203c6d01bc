use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hangulpiece::analysis::{
    compare_tokenizers, comparison_table, composition_record, composition_report,
    composition_table, unk_ratio_par, Variant,
};
use hangulpiece::corpus::{count_files, CorpusReader};
use hangulpiece::tokenizer::{compat_display, detokenize, detokenize_display, Tokenization};
use hangulpiece::vocab::{
    full_jamo_alphabet, import_bert_vocab, load_vocab, parse_symbol_list, save_merges, save_vocab,
    strip_marker, train_bpe, CONTINUATION, DEFAULT_SYMBOLS,
};
use hangulpiece::{
    GranularityLevel, MatchMode, ScoreStrategy, Tokenizer, TokenizerConfig, TrainerConfig,
    Vocabulary,
};

/// Lines handed to the parallel tokenizer at a time; output order is preserved.
const BATCH_LINES: usize = 2048;

#[derive(Parser)]
#[command(
    name = "hangulpiece",
    version,
    about = "Korean subword tokenization at character and sub-character level"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a vocabulary and merge list from corpus files.
    Train(TrainArgs),
    /// Tokenize text line by line.
    Tokenize(TokenizeArgs),
    /// Show how several vocabularies or modes segment the same words.
    Compare(CompareArgs),
    /// Report vocabulary composition and [UNK] statistics.
    Analyze(AnalyzeArgs),
    /// Turn token lines back into text.
    Detok(DetokArgs),
}

/// Values read from `--config`; every key is optional and flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    train: TrainFile,
    #[serde(default)]
    tokenize: TokenizeFile,
    #[serde(default)]
    compare: CompareFile,
    #[serde(default)]
    analyze: AnalyzeFile,
    #[serde(default)]
    detok: DetokFile,
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

#[derive(Args)]
struct TrainArgs {
    /// Corpus files (plain or gzip); repeatable.
    #[arg(long, short)]
    input: Vec<PathBuf>,
    /// Output vocabulary file.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Output merge list [default: <vocab>.merges].
    #[arg(long)]
    merges: Option<PathBuf>,
    /// character or subcharacter [default: subcharacter].
    #[arg(long)]
    level: Option<GranularityLevel>,
    /// Final vocabulary size, special tokens included [default: 10000].
    #[arg(long)]
    target_size: Option<usize>,
    /// Pairs seen fewer times are never merged [default: 2].
    #[arg(long)]
    min_pair_freq: Option<u64>,
    /// Seed the alphabet with every modern jamo (sub-character level only).
    #[arg(long)]
    full_jamo_alphabet: bool,
    /// Append the bundled symbol list after training.
    #[arg(long)]
    default_symbols: bool,
    /// Append symbols from this file (one per line) after training.
    #[arg(long)]
    symbols: Option<PathBuf>,
    /// Treat every input line as one sentence.
    #[arg(long)]
    no_sentence_split: bool,
    /// Also write the full training report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Emit line-delimited JSON records.
    #[arg(long)]
    machine: bool,
    /// TOML file with defaults for this subcommand; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainFile {
    input: Option<Vec<PathBuf>>,
    vocab: Option<PathBuf>,
    merges: Option<PathBuf>,
    level: Option<GranularityLevel>,
    target_size: Option<usize>,
    min_pair_freq: Option<u64>,
    full_jamo_alphabet: Option<bool>,
    default_symbols: Option<bool>,
    symbols: Option<PathBuf>,
    sentence_split: Option<bool>,
    report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TrainConfig {
    command: &'static str,
    input: Vec<PathBuf>,
    vocab: PathBuf,
    merges: PathBuf,
    level: GranularityLevel,
    target_size: usize,
    min_pair_freq: u64,
    full_jamo_alphabet: bool,
    default_symbols: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    symbols: Option<PathBuf>,
    sentence_split: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<PathBuf>,
    /// Training has no random component.
    seed: &'static str,
}

#[derive(Args)]
struct TokenizerArgs {
    /// Vocabulary file (native format or plain vocab.txt).
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Expected level; required to read a plain vocab.txt at sub-character level.
    #[arg(long)]
    level: Option<GranularityLevel>,
    /// forward, backward or bidirectional [default: forward].
    #[arg(long)]
    mode: Option<MatchMode>,
    /// Bidirectional scorer: mean-log, mean-log1p, sum or min [default: mean-log].
    #[arg(long)]
    scorer: Option<ScoreStrategy>,
    /// Words longer than this many units become [UNK] [default: 100].
    #[arg(long)]
    max_word_units: Option<usize>,
    /// Lowercase Latin letters before matching.
    #[arg(long)]
    lowercase_latin: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenizerFile {
    vocab: Option<PathBuf>,
    level: Option<GranularityLevel>,
    mode: Option<MatchMode>,
    scorer: Option<ScoreStrategy>,
    max_word_units: Option<usize>,
    lowercase_latin: Option<bool>,
}

#[derive(Debug, Serialize)]
struct TokenizerSettings {
    vocab: PathBuf,
    level: GranularityLevel,
    mode: MatchMode,
    scorer: ScoreStrategy,
    max_word_units: usize,
    lowercase_latin: bool,
}

impl TokenizerArgs {
    fn resolve(&self, file: &TokenizerFile) -> Result<(TokenizerSettings, Vocabulary)> {
        let vocab_path = self
            .vocab
            .clone()
            .or_else(|| file.vocab.clone())
            .context("--vocab is required")?;
        let requested = self.level.or(file.level);
        let vocab = open_vocab(&vocab_path, requested)?;
        let settings = TokenizerSettings {
            vocab: vocab_path,
            level: requested.unwrap_or(vocab.level()),
            mode: self.mode.or(file.mode).unwrap_or_default(),
            scorer: self.scorer.or(file.scorer).unwrap_or_default(),
            max_word_units: self.max_word_units.or(file.max_word_units).unwrap_or(100),
            lowercase_latin: self.lowercase_latin || file.lowercase_latin.unwrap_or(false),
        };
        Ok((settings, vocab))
    }
}

impl TokenizerSettings {
    fn build(&self, vocab: Vocabulary) -> Result<Tokenizer> {
        let mut config = TokenizerConfig::new(self.level).with_mode(self.mode);
        config.scorer = self.scorer;
        config.max_word_units = self.max_word_units;
        config.lowercase_latin = self.lowercase_latin;
        Tokenizer::new(vocab, config)
            .with_context(|| format!("vocabulary {}", self.vocab.display()))
    }
}

#[derive(Args)]
struct TokenizeArgs {
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    /// Read from this file instead of standard input.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Print leftover jamo as conjoining jamo (lossless) instead of compatibility jamo.
    #[arg(long)]
    raw_jamo: bool,
    /// Emit one JSON record per input line.
    #[arg(long)]
    machine: bool,
    /// TOML file with defaults for this subcommand; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenizeFile {
    #[serde(flatten)]
    tokenizer: TokenizerFile,
    raw_jamo: Option<bool>,
}

#[derive(Debug, Serialize)]
struct TokenizeConfig {
    command: &'static str,
    #[serde(flatten)]
    tokenizer: TokenizerSettings,
    raw_jamo: bool,
    machine: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// PATH[:MODE]; repeatable, at least one.
    #[arg(long = "variant")]
    variants: Vec<String>,
    /// File of whitespace-separated words; standard input when omitted.
    #[arg(long)]
    words: Option<PathBuf>,
    /// Level used to read plain vocab.txt files [default: character].
    #[arg(long)]
    level: Option<GranularityLevel>,
    /// Mode for variants given without one [default: forward].
    #[arg(long)]
    mode: Option<MatchMode>,
    /// Bidirectional scorer: mean-log, mean-log1p, sum or min [default: mean-log].
    #[arg(long)]
    scorer: Option<ScoreStrategy>,
    /// Emit one JSON record per word and variant.
    #[arg(long)]
    machine: bool,
    /// TOML file with defaults for this subcommand; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareFile {
    variants: Option<Vec<String>>,
    words: Option<PathBuf>,
    level: Option<GranularityLevel>,
    mode: Option<MatchMode>,
    scorer: Option<ScoreStrategy>,
}

#[derive(Debug, Serialize)]
struct CompareConfig {
    command: &'static str,
    variants: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    words: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<GranularityLevel>,
    mode: MatchMode,
    scorer: ScoreStrategy,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    tokenizer: TokenizerArgs,
    /// Corpus files for [UNK] statistics; repeatable. Without any, only the
    /// composition is reported.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    /// Treat every input line as one sentence.
    #[arg(long)]
    no_sentence_split: bool,
    /// Emit line-delimited JSON records.
    #[arg(long)]
    machine: bool,
    /// TOML file with defaults for this subcommand; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeFile {
    #[serde(flatten)]
    tokenizer: TokenizerFile,
    corpus: Option<Vec<PathBuf>>,
    sentence_split: Option<bool>,
}

#[derive(Debug, Serialize)]
struct AnalyzeConfig {
    command: &'static str,
    #[serde(flatten)]
    tokenizer: TokenizerSettings,
    corpus: Vec<PathBuf>,
    sentence_split: bool,
}

#[derive(Args)]
struct DetokArgs {
    /// character or subcharacter; taken from --vocab when omitted [default: character].
    #[arg(long)]
    level: Option<GranularityLevel>,
    /// Read the level from this vocabulary.
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Input uses conjoining jamo; skip compatibility-jamo restoration.
    #[arg(long)]
    raw_jamo: bool,
    /// Input is JSON records from `tokenize --machine`.
    #[arg(long)]
    machine: bool,
    /// Read from this file instead of standard input.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// TOML file with defaults for this subcommand; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetokFile {
    level: Option<GranularityLevel>,
    vocab: Option<PathBuf>,
    raw_jamo: Option<bool>,
}

#[derive(Debug, Serialize)]
struct DetokConfig {
    command: &'static str,
    level: GranularityLevel,
    raw_jamo: bool,
    machine: bool,
}

/// Reads a native vocabulary, or a plain vocab.txt at `level` (default character).
fn open_vocab(path: &Path, level: Option<GranularityLevel>) -> Result<Vocabulary> {
    let mut head = [0u8; 5];
    let native = File::open(path)
        .and_then(|mut f| f.read_exact(&mut head))
        .map(|()| &head == b"#hpv1")
        .unwrap_or(false);
    let vocab = if native {
        load_vocab(path)
    } else {
        import_bert_vocab(path, level.unwrap_or(GranularityLevel::Character))
    };
    vocab.with_context(|| format!("loading vocabulary {}", path.display()))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(path) => Box::new(BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        )),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

/// `#config` header: the effective settings as TOML, one comment line each.
fn config_comment<T: Serialize>(config: &T) -> Result<String> {
    let body = toml::to_string(config).context("serializing effective config")?;
    let mut out = String::from("#config\n");
    for line in body.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}

fn config_record<T: Serialize>(config: &T) -> Result<String> {
    let mut value = serde_json::to_value(config)?;
    if let Some(map) = value.as_object_mut() {
        map.insert("record".into(), "config".into());
    }
    Ok(serde_json::to_string(&value)?)
}

fn echo_config<T: Serialize>(out: &mut impl Write, config: &T, machine: bool) -> Result<()> {
    if machine {
        writeln!(out, "{}", config_record(config)?)?;
    } else {
        write!(out, "{}", config_comment(config)?)?;
    }
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<()> {
    let file = read_config(args.config.as_deref())?.train;
    let input = if args.input.is_empty() {
        file.input.unwrap_or_default()
    } else {
        args.input
    };
    if input.is_empty() {
        bail!("at least one --input corpus is required");
    }
    for path in &input {
        if !path.is_file() {
            bail!("corpus file {} does not exist", path.display());
        }
    }
    let vocab_path = args.vocab.or(file.vocab).context("--vocab is required")?;
    let config = TrainConfig {
        command: "train",
        merges: args
            .merges
            .or(file.merges)
            .unwrap_or_else(|| vocab_path.with_extension("merges")),
        vocab: vocab_path,
        input,
        level: args
            .level
            .or(file.level)
            .unwrap_or(GranularityLevel::SubCharacter),
        target_size: args.target_size.or(file.target_size).unwrap_or(10_000),
        min_pair_freq: args.min_pair_freq.or(file.min_pair_freq).unwrap_or(2),
        full_jamo_alphabet: args.full_jamo_alphabet || file.full_jamo_alphabet.unwrap_or(false),
        default_symbols: args.default_symbols || file.default_symbols.unwrap_or(false),
        symbols: args.symbols.or(file.symbols),
        sentence_split: !args.no_sentence_split && file.sentence_split.unwrap_or(true),
        report: args.report.or(file.report),
        seed: "none",
    };
    if config.full_jamo_alphabet && config.level != GranularityLevel::SubCharacter {
        bail!("--full-jamo-alphabet requires --level subcharacter");
    }

    let counts = count_files(&config.input, config.level, config.sentence_split)?;
    let mut trainer =
        TrainerConfig::new(config.level, config.target_size).min_pair_freq(config.min_pair_freq);
    if config.full_jamo_alphabet {
        trainer = trainer.initial_alphabet(full_jamo_alphabet());
    }
    let output = train_bpe(&counts, &trainer)?;
    let mut vocab = output.vocab;

    let mut symbols = Vec::new();
    if config.default_symbols {
        symbols.extend(parse_symbol_list(DEFAULT_SYMBOLS));
    }
    if let Some(path) = &config.symbols {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading symbols {}", path.display()))?;
        symbols.extend(parse_symbol_list(&text));
    }
    let symbols: Vec<String> = symbols
        .iter()
        .map(|s| prepare_symbol(s, config.level))
        .collect();
    let augment = vocab.augment(&symbols);

    save_vocab(&vocab, &config.vocab)?;
    save_merges(&output.merges, &config.merges)?;

    let summary = TrainSummary {
        record: "train_report",
        total_words: output.report.total_words,
        distinct_words: output.report.distinct_words,
        alphabet_size: output.report.alphabet_size,
        merges_executed: output.report.merges_executed,
        trained_size: output.report.final_size,
        symbols_added: augment.added,
        symbols_skipped: augment.skipped,
        final_size: vocab.len(),
    };
    if let Some(path) = &config.report {
        let full = serde_json::json!({
            "summary": summary,
            "merge_frequencies": output.report.merge_frequencies,
        });
        fs::write(path, serde_json::to_string_pretty(&full)? + "\n")
            .with_context(|| format!("writing report {}", path.display()))?;
    }

    let mut out = BufWriter::new(io::stdout().lock());
    echo_config(&mut out, &config, args.machine)?;
    if args.machine {
        writeln!(out, "{}", serde_json::to_string(&summary)?)?;
    } else {
        let rows = [
            ("corpus words", summary.total_words.to_string()),
            ("distinct words", summary.distinct_words.to_string()),
            ("alphabet size", summary.alphabet_size.to_string()),
            ("merges executed", summary.merges_executed.to_string()),
            ("trained size", summary.trained_size.to_string()),
            ("symbols added", summary.symbols_added.to_string()),
            ("final size", summary.final_size.to_string()),
        ];
        for (label, value) in rows {
            writeln!(out, "{label:<16} {value:>10}")?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TrainSummary {
    record: &'static str,
    total_words: u64,
    distinct_words: usize,
    alphabet_size: usize,
    merges_executed: usize,
    trained_size: usize,
    symbols_added: usize,
    symbols_skipped: usize,
    final_size: usize,
}

fn prepare_symbol(symbol: &str, level: GranularityLevel) -> String {
    let (continuation, body) = strip_marker(symbol);
    let body = level.prepare(body);
    if continuation {
        format!("{CONTINUATION}{body}")
    } else {
        body
    }
}

#[derive(Serialize)]
struct TokenRecord {
    line: usize,
    tokens: Vec<String>,
    ids: Vec<u32>,
    spans: Vec<[usize; 2]>,
    unk: usize,
}

fn human_tokens(tokenization: &Tokenization, level: GranularityLevel, raw_jamo: bool) -> String {
    let shown: Vec<String> = tokenization
        .tokens
        .iter()
        .map(|t| {
            if raw_jamo || level == GranularityLevel::Character {
                t.display()
            } else {
                compat_display(&t.text)
            }
        })
        .collect();
    shown.join(" ")
}

fn run_tokenize(args: TokenizeArgs) -> Result<()> {
    let file = read_config(args.config.as_deref())?.tokenize;
    let (settings, vocab) = args.tokenizer.resolve(&file.tokenizer)?;
    let config = TokenizeConfig {
        command: "tokenize",
        raw_jamo: args.raw_jamo || file.raw_jamo.unwrap_or(false),
        machine: args.machine,
        tokenizer: settings,
    };
    let tokenizer = config.tokenizer.build(vocab)?;
    eprint!("{}", config_comment(&config)?);

    let input = open_input(args.input.as_deref())?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut batch: Vec<String> = Vec::with_capacity(BATCH_LINES);
    let mut line_no = 0usize;
    let mut flush = |batch: &mut Vec<String>, out: &mut BufWriter<io::StdoutLock>| -> Result<()> {
        for tokenization in tokenizer.tokenize_batch(batch) {
            line_no += 1;
            if config.machine {
                let record = TokenRecord {
                    line: line_no,
                    tokens: tokenization.tokens.iter().map(|t| t.display()).collect(),
                    ids: tokenization.ids(),
                    spans: tokenization
                        .tokens
                        .iter()
                        .map(|t| [t.start, t.end])
                        .collect(),
                    unk: tokenization.unknown_count(),
                };
                writeln!(out, "{}", serde_json::to_string(&record)?)?;
            } else {
                writeln!(
                    out,
                    "{}",
                    human_tokens(&tokenization, config.tokenizer.level, config.raw_jamo)
                )?;
            }
        }
        batch.clear();
        Ok(())
    };
    for line in input.lines() {
        batch.push(line.context("reading input")?);
        if batch.len() == BATCH_LINES {
            flush(&mut batch, &mut out)?;
        }
    }
    flush(&mut batch, &mut out)?;
    out.flush()?;
    Ok(())
}

fn parse_variant(arg: &str, default_mode: MatchMode) -> (PathBuf, MatchMode) {
    if let Some((path, mode)) = arg.rsplit_once(':') {
        if let Ok(mode) = mode.parse::<MatchMode>() {
            return (PathBuf::from(path), mode);
        }
    }
    (PathBuf::from(arg), default_mode)
}

fn run_compare(args: CompareArgs) -> Result<()> {
    let file = read_config(args.config.as_deref())?.compare;
    let config = CompareConfig {
        command: "compare",
        variants: if args.variants.is_empty() {
            file.variants.unwrap_or_default()
        } else {
            args.variants
        },
        words: args.words.or(file.words),
        level: args.level.or(file.level),
        mode: args.mode.or(file.mode).unwrap_or_default(),
        scorer: args.scorer.or(file.scorer).unwrap_or_default(),
    };
    if config.variants.is_empty() {
        bail!("at least one --variant PATH[:MODE] is required");
    }
    let mut variants = Vec::with_capacity(config.variants.len());
    for variant_arg in &config.variants {
        let (path, mode) = parse_variant(variant_arg, config.mode);
        let vocab = open_vocab(&path, config.level)?;
        let mut tokenizer_config = TokenizerConfig::new(vocab.level()).with_mode(mode);
        tokenizer_config.scorer = config.scorer;
        let tokenizer = Tokenizer::new(vocab, tokenizer_config)
            .with_context(|| format!("variant {variant_arg}"))?;
        variants.push(Variant::new(variant_arg.clone(), tokenizer));
    }

    let mut text = String::new();
    open_input(config.words.as_deref())?
        .read_to_string(&mut text)
        .context("reading words")?;
    let words: Vec<&str> = text.split_whitespace().collect();
    let rows = compare_tokenizers(&words, &variants);

    let mut out = BufWriter::new(io::stdout().lock());
    echo_config(&mut out, &config, args.machine)?;
    if args.machine {
        for row in &rows {
            for record in row.records() {
                let mut value = serde_json::to_value(record)?;
                value["record"] = "comparison".into();
                writeln!(out, "{}", serde_json::to_string(&value)?)?;
            }
        }
    } else {
        write!(out, "{}", comparison_table(&rows, &variants))?;
    }
    out.flush()?;
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let file = read_config(args.config.as_deref())?.analyze;
    let (settings, vocab) = args.tokenizer.resolve(&file.tokenizer)?;
    let config = AnalyzeConfig {
        command: "analyze",
        tokenizer: settings,
        corpus: if args.corpus.is_empty() {
            file.corpus.unwrap_or_default()
        } else {
            args.corpus
        },
        sentence_split: !args.no_sentence_split && file.sentence_split.unwrap_or(true),
    };
    let composition = composition_report(&vocab);
    let tokenizer = config.tokenizer.build(vocab)?;
    let stats = if config.corpus.is_empty() {
        None
    } else {
        let sentences = CorpusReader::from_paths(&config.corpus)
            .sentence_split(config.sentence_split)
            .sentences()
            .collect::<Result<Vec<String>, _>>()?;
        Some(unk_ratio_par(&sentences, &tokenizer))
    };

    let mut out = BufWriter::new(io::stdout().lock());
    echo_config(&mut out, &config, args.machine)?;
    if args.machine {
        let mut value = serde_json::to_value(composition_record(&composition))?;
        value["record"] = "composition".into();
        writeln!(out, "{}", serde_json::to_string(&value)?)?;
        if let Some(stats) = &stats {
            let mut value = serde_json::to_value(stats.record())?;
            value["record"] = "corpus_stats".into();
            writeln!(out, "{}", serde_json::to_string(&value)?)?;
        }
    } else {
        writeln!(out, "vocabulary composition")?;
        write!(out, "{}", composition_table(&composition))?;
        if let Some(stats) = &stats {
            writeln!(out)?;
            writeln!(out, "corpus statistics")?;
            write!(out, "{}", stats.table())?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct TokenLine {
    tokens: Vec<String>,
}

fn check_tokens(tokens: &[String], line_no: usize) -> Result<()> {
    for (i, token) in tokens.iter().enumerate() {
        let (continuation, body) = strip_marker(token);
        if continuation && body.is_empty() {
            bail!("line {line_no}: bare `{CONTINUATION}` is not a token");
        }
        if continuation && i == 0 {
            bail!("line {line_no}: continuation token `{token}` does not follow a word");
        }
    }
    Ok(())
}

fn run_detok(args: DetokArgs) -> Result<()> {
    let file = read_config(args.config.as_deref())?.detok;
    let level = match (args.level.or(file.level), args.vocab.or(file.vocab)) {
        (Some(level), _) => level,
        (None, Some(path)) => open_vocab(&path, None)?.level(),
        (None, None) => GranularityLevel::Character,
    };
    let config = DetokConfig {
        command: "detok",
        level,
        raw_jamo: args.raw_jamo || file.raw_jamo.unwrap_or(false) || args.machine,
        machine: args.machine,
    };
    eprint!("{}", config_comment(&config)?);

    let input = open_input(args.input.as_deref())?;
    let mut out = BufWriter::new(io::stdout().lock());
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.context("reading input")?;
        let tokens: Vec<String> = if config.machine {
            serde_json::from_str::<TokenLine>(&line)
                .with_context(|| format!("line {line_no}: malformed token record"))?
                .tokens
        } else {
            line.split_whitespace().map(str::to_owned).collect()
        };
        check_tokens(&tokens, line_no)?;
        let text = if config.raw_jamo {
            detokenize(&tokens, config.level)
        } else {
            detokenize_display(&tokens, config.level)
        };
        writeln!(out, "{text}")?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => run_train(args),
        Command::Tokenize(args) => run_tokenize(args),
        Command::Compare(args) => run_compare(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Detok(args) => run_detok(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|e| e.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}
