use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tamex_core::knn::classify_excluding;
use tamex_core::*;

#[derive(Parser, Debug)]
#[command(name = "tamex", version, about = "Example-based tense/aspect/modality classifier")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Bilingual example corpus (.tsv or .jsonl).
    #[arg(long, global = true, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Corpus format; inferred from the extension when omitted.
    #[arg(long, global = true, value_enum)]
    corpus_format: Option<FormatArg>,
    /// Morpheme lexicon; required for method 2.
    #[arg(long, global = true, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    /// 1 (or "string") for characters, 2 (or "analysis") for annotated morphemes.
    #[arg(long, global = true, default_value = "1", value_parser = parse_method)]
    method: Method,
    #[arg(long, global = true, default_value_t = 5)]
    k: usize,
    /// Upper bound on neighbors after tie extension.
    #[arg(long, global = true, default_value_t = MAX_NEIGHBORS)]
    cap: usize,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    format: Output,
    /// Append the vote trace to each classification.
    #[arg(long, global = true)]
    explain: bool,
    /// Hide an input's own corpus entry from retrieval.
    #[arg(long, global = true)]
    exclude_self: bool,
    /// Directory of labeler rule files replacing the built-in ones.
    #[arg(long, global = true, value_name = "DIR")]
    rules: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predict a category for each Japanese sentence.
    Classify {
        /// Read sentences from a file instead of standard input.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
        /// Use a saved index instead of building one from --corpus.
        #[arg(long, value_name = "PATH")]
        index: Option<PathBuf>,
    },
    /// Measure accuracy by leave-one-out or a random held-out split.
    Evaluate {
        #[arg(long, conflicts_with = "split")]
        loo: bool,
        /// Hold out this many randomly chosen pairs.
        #[arg(long, value_name = "N")]
        split: Option<usize>,
    },
    /// Label English sentences from standard input.
    Label,
    /// Build and save a retrieval index.
    Index {
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Report corpus issues and statistics.
    Validate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Tsv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: TamError| e.to_string())
}

enum Failure {
    Usage(String),
    Data(TamError),
}

impl From<TamError> for Failure {
    fn from(e: TamError) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(TamError::io("<stdio>", e))
    }
}

type Run<T = ()> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            eprintln!("error: {msg}\n\n{}", cmd.render_usage());
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Run {
    let c = &cli.common;
    let config = KnnConfig { k: c.k, cap: c.cap };
    if let Err(e) = config.validate() {
        return Err(Failure::Usage(e.to_string()));
    }
    match &cli.command {
        Command::Classify { input, index } => classify_cmd(c, config, input.as_deref(), index.as_deref(), out),
        Command::Evaluate { loo, split } => evaluate_cmd(c, config, *loo, *split, out),
        Command::Label => label_cmd(c, out),
        Command::Index { out: path } => index_cmd(c, path, out),
        Command::Validate => validate_cmd(c, out),
    }
}

fn rules(c: &Common) -> Run<RuleSet> {
    match &c.rules {
        Some(dir) => Ok(RuleSet::load_dir(dir)?),
        None => Ok(RuleSet::default()),
    }
}

fn corpus(c: &Common) -> Run<Corpus> {
    let Some(path) = &c.corpus else {
        return Err(Failure::Usage("--corpus is required".into()));
    };
    let format = match c.corpus_format {
        Some(FormatArg::Tsv) => CorpusFormat::Tsv,
        Some(FormatArg::Jsonl) => CorpusFormat::Jsonl,
        None => CorpusFormat::from_path(path),
    };
    let rules = rules(c)?;
    Ok(load_corpus(path, format, Some(&rules))?)
}

fn lexicon(c: &Common) -> Run<Option<Lexicon>> {
    match (c.method, &c.lexicon) {
        (Method::Raw, _) => Ok(None),
        (Method::Annotated, Some(path)) => Ok(Some(Lexicon::load(path)?)),
        (Method::Annotated, None) => Err(Failure::Usage("method 2 requires --lexicon".into())),
    }
}

fn encoder<'a>(method: Method, lex: &'a Option<Lexicon>) -> Encoder<'a> {
    match lex {
        Some(l) if method == Method::Annotated => Encoder::Annotated(l),
        _ => Encoder::Raw,
    }
}

fn read_lines(input: Option<&Path>) -> Run<Vec<String>> {
    let mut text = String::new();
    match input {
        Some(p) => text = fs::read_to_string(p).map_err(|e| TamError::io(p, e))?,
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn classify_cmd(
    c: &Common,
    config: KnnConfig,
    input: Option<&Path>,
    index_path: Option<&Path>,
    out: &mut impl Write,
) -> Run {
    let lex = lexicon(c)?;
    let enc = encoder(c.method, &lex);
    let corpus = match (index_path, &c.corpus) {
        (Some(_), None) if !c.exclude_self => None,
        _ => Some(corpus(c)?),
    };
    let index = match index_path {
        Some(p) => {
            let index = SuffixIndex::load(p)?;
            if index.method() != c.method {
                return Err(Failure::Data(TamError::MethodMismatch {
                    expected: c.method,
                    found: index.method(),
                }));
            }
            index
        }
        None => build_index(corpus.as_ref().expect("corpus loaded"), &enc)?,
    };

    let sentences = read_lines(input)?;
    let mut records = Vec::new();
    for sentence in &sentences {
        let exclude = match (&corpus, c.exclude_self) {
            (Some(corpus), true) => {
                let key = tamex_core::corpus::strip_terminal_punctuation(sentence);
                corpus.iter().find(|p| p.japanese == key).map(|p| p.ordinal)
            }
            _ => None,
        };
        let trace = classify_excluding(&index, &enc, sentence, config, exclude)?;
        match c.format {
            Output::Text if c.explain => writeln!(
                out,
                "{}\t{}",
                trace.winner,
                serde_json::to_string(&trace).map_err(TamError::from)?
            )?,
            Output::Text => writeln!(out, "{}", trace.winner)?,
            Output::Json => {
                let mut rec = json!({ "sentence": sentence, "label": trace.winner });
                if c.explain {
                    rec["trace"] = serde_json::to_value(&trace).map_err(TamError::from)?;
                }
                records.push(rec);
            }
        }
    }
    if c.format == Output::Json {
        write_json(out, &serde_json::Value::Array(records))?;
    }
    Ok(())
}

fn evaluate_cmd(c: &Common, config: KnnConfig, loo: bool, split: Option<usize>, out: &mut impl Write) -> Run {
    let corpus = corpus(c)?;
    let lex = lexicon(c)?;
    let enc = encoder(c.method, &lex);
    let report = match (loo, split) {
        (_, Some(n)) => {
            let seed = c.seed.unwrap_or(0);
            let test = random_split(corpus.len(), n, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            evaluate_split(&corpus, &test, &enc, config, Execution::Parallel, Some(seed))?
        }
        (true, None) => evaluate_loo(&corpus, &enc, config, Execution::Parallel)?,
        (false, None) => return Err(Failure::Usage("evaluate needs --loo or --split N".into())),
    };
    match c.format {
        Output::Text => write!(out, "{}", report.render_table())?,
        Output::Json => writeln!(out, "{}", report.to_json()?)?,
    }
    Ok(())
}

fn label_cmd(c: &Common, out: &mut impl Write) -> Run {
    let rules = rules(c)?;
    let mut records = Vec::new();
    for line in BufReader::new(io::stdin().lock()).lines() {
        let line = line?;
        let sentence = line.trim();
        if sentence.is_empty() {
            continue;
        }
        let label = match rules.label(sentence) {
            Ok(l) => Some(l),
            Err(e @ TamError::Unlabelable(_)) => {
                eprintln!("warning: {e}");
                None
            }
            Err(e) => return Err(e.into()),
        };
        match c.format {
            Output::Text => {
                let shown = label.map(|l| l.to_string()).unwrap_or_default();
                writeln!(out, "{sentence}\t{shown}")?
            }
            Output::Json => records.push(json!({ "sentence": sentence, "label": label })),
        }
    }
    if c.format == Output::Json {
        write_json(out, &serde_json::Value::Array(records))?;
    }
    Ok(())
}

fn index_cmd(c: &Common, path: &Path, out: &mut impl Write) -> Run {
    let corpus = corpus(c)?;
    let lex = lexicon(c)?;
    let index = build_index(&corpus, &encoder(c.method, &lex))?;
    index.save(path)?;
    match c.format {
        Output::Text => writeln!(
            out,
            "wrote {} entries ({}) to {}",
            index.len(),
            index.method(),
            path.display()
        )?,
        Output::Json => write_json(
            out,
            &json!({ "path": path.display().to_string(), "entries": index.len(), "method": index.method() }),
        )?,
    }
    Ok(())
}

fn validate_cmd(c: &Common, out: &mut impl Write) -> Run {
    let corpus = corpus(c)?;
    let report = validate_corpus(&corpus);
    match c.format {
        Output::Text => {
            for issue in &report.issues {
                writeln!(out, "{issue}")?;
            }
            writeln!(out, "pairs\t{}", report.stats.pair_count)?;
            for (label, n) in &report.stats.histogram {
                writeln!(out, "{label}\t{n}")?;
            }
        }
        Output::Json => write_json(out, &serde_json::to_value(&report).map_err(TamError::from)?)?,
    }
    if report.has_errors() {
        return Err(Failure::Data(TamError::InvalidArgument(
            "corpus has validation errors".into(),
        )));
    }
    Ok(())
}

fn write_json(out: &mut impl Write, value: &serde_json::Value) -> Run {
    let text = serde_json::to_string_pretty(value).map_err(TamError::from)?;
    writeln!(out, "{text}")?;
    Ok(())
}
