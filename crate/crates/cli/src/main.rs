//! simplicity-lab: MDL analysis of probabilistic grammars from the shell.
//!
//! Every subcommand is deterministic: identical flags and inputs produce
//! byte-identical reports. Exit codes: 0 success, 1 domain error (single-line
//! diagnostic on stderr), 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use simplicity_core::coding::{
    crossover_point, grammar_code_length, two_part_length, CodingConfig,
};
use simplicity_core::corpus::{self, TokenPattern};
use simplicity_core::formmeaning::{
    induced_rows, parse_pairs, Inventory, JointHypothesis, JointMixture,
};
use simplicity_core::learnability::{learnability_report, ContextSpec, DEFAULT_WORDS_PER_YEAR};
use simplicity_core::learner::{
    parse_manifest, ConvergenceProfile, MixturePredictor, ProfileMode, DEFAULT_NODE_BUDGET,
};
use simplicity_core::report::{fmt_sig, profile_csv, profile_json, Json};
use simplicity_core::svg::render_profile_svg;
use simplicity_core::token::TokenSequence;
use simplicity_core::{Grammar, Pfsg};

const TOOL: &str = "simplicity-lab";
const VERSION: &str = env!("CARGO_PKG_VERSION");
const SEED_ENV: &str = "SIMPLICITY_LAB_SEED";

#[derive(Parser)]
#[command(name = TOOL, version, about = "MDL toolkit for probabilistic grammars")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Grammar file utilities
    Grammar {
        #[command(subcommand)]
        cmd: GrammarCmd,
    },
    /// Sample a sentence stream from a grammar
    Generate(GenerateArgs),
    /// Two-part code length of a corpus under a grammar
    Encode(EncodeArgs),
    /// Compare two grammars on a stream and locate the crossover
    Compare(CompareArgs),
    /// Convergence profiles of a mixture learner against a true grammar
    Simulate(SimulateArgs),
    /// Learn sentence-interpretation mappings from pairs
    Formmeaning(FormMeaningArgs),
    /// Estimate input needed to learn a grammatical restriction
    Learnability(LearnabilityArgs),
    /// Corpus utilities
    Corpus {
        #[command(subcommand)]
        cmd: CorpusCmd,
    },
}

#[derive(Subcommand)]
enum GrammarCmd {
    /// Parse and validate a grammar; report its encoding length
    Check(GrammarCheckArgs),
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Word/sentence counts, pattern rates, and content digest
    Stats(CorpusStatsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Args)]
struct GrammarCheckArgs {
    /// Grammar file
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// RNG seed; falls back to $SIMPLICITY_LAB_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Symbol budget including end-of-sentence markers
    #[arg(long, default_value_t = 100)]
    max_tokens: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Incumbent grammar
    #[arg(long)]
    g0: PathBuf,
    /// Challenger grammar
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// True generator (PFSG)
    #[arg(long)]
    truth: PathBuf,
    /// Hypothesis class manifest
    #[arg(long)]
    class: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Monte-Carlo trials
    #[arg(long, default_value_t = 10_000)]
    trials: u32,
    #[arg(long, default_value_t = 30)]
    horizon: usize,
    /// Underestimation factor for the undergeneralization series (must exceed e)
    #[arg(long, default_value_t = 8.0)]
    f: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference symbol for the squared-error series (default: first of the
    /// sorted alphabet)
    #[arg(long)]
    ref_symbol: Option<String>,
    /// Node budget for exact enumeration
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = ProfileFormat::Csv)]
    format: ProfileFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the profile as an SVG chart
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct FormMeaningArgs {
    /// Interpretation inventory (one label per line)
    #[arg(long)]
    inventory: PathBuf,
    /// Joint-table class manifest
    #[arg(long)]
    class: PathBuf,
    /// Pair corpus (sentence<TAB>interpretation per line)
    #[arg(long)]
    pairs: PathBuf,
    /// Base grammar inducing the sentence rows
    #[arg(long)]
    base_grammar: PathBuf,
    /// Length bound on induced sentences (in words)
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    /// Truth table: also compute the pair-prediction error profile
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    trials: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the error profile as CSV (same schema as `simulate`)
    #[arg(long)]
    profile_out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct LearnabilityArgs {
    /// Overgeneral grammar
    #[arg(long)]
    g0: PathBuf,
    /// Restricted grammar
    #[arg(long)]
    g1: PathBuf,
    /// Context as a token prefix, e.g. "he s" (repeatable)
    #[arg(long)]
    context: Vec<String>,
    /// Context as a state name shared by both grammars (repeatable)
    #[arg(long)]
    state: Vec<String>,
    /// Corpus supplying the occurrence rate
    #[arg(long)]
    corpus: PathBuf,
    /// Occurrence pattern counted in the corpus, e.g. "he s"
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value_t = DEFAULT_WORDS_PER_YEAR)]
    words_per_year: f64,
    #[arg(long, default_value_t = 8)]
    param_bits: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusStatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Token pattern to count (repeatable); `*` is a single-token wildcard
    #[arg(long)]
    pattern: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{TOOL}: error: {e}");
            ExitCode::FAILURE
        }
    }
}

type DynError = Box<dyn std::error::Error>;

fn run(cli: Cli) -> Result<(), DynError> {
    match cli.cmd {
        Cmd::Grammar {
            cmd: GrammarCmd::Check(args),
        } => grammar_check(args),
        Cmd::Generate(args) => generate(args),
        Cmd::Encode(args) => encode(args),
        Cmd::Compare(args) => compare(args),
        Cmd::Simulate(args) => simulate(args),
        Cmd::Formmeaning(args) => formmeaning(args),
        Cmd::Learnability(args) => learnability(args),
        Cmd::Corpus {
            cmd: CorpusCmd::Stats(args),
        } => corpus_stats(args),
    }
}

/// An input file with its digest, echoed into every report.
struct Input {
    role: &'static str,
    path: PathBuf,
    sha256: String,
    content: String,
}

fn read_input(role: &'static str, path: &Path) -> Result<Input, DynError> {
    let bytes =
        fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let sha256 = corpus::sha256_hex(&bytes);
    let content = String::from_utf8(bytes)
        .map_err(|e| format!("{}: invalid UTF-8 at byte {}", path.display(), e.utf8_error().valid_up_to()))?;
    Ok(Input {
        role,
        path: path.to_path_buf(),
        sha256,
        content,
    })
}

fn inputs_json(inputs: &[&Input]) -> Json {
    Json::Arr(
        inputs
            .iter()
            .map(|i| {
                Json::obj(vec![
                    ("role", Json::Str(i.role.to_string())),
                    ("path", Json::Str(i.path.display().to_string())),
                    ("sha256", Json::Str(i.sha256.clone())),
                ])
            })
            .collect(),
    )
}

fn envelope(subcommand: &str, config: Vec<(&str, Json)>, inputs: &[&Input], payload: Vec<(&str, Json)>) -> Json {
    let mut fields = vec![
        ("tool", Json::Str(TOOL.to_string())),
        ("version", Json::Str(VERSION.to_string())),
        (
            "config",
            Json::obj(
                std::iter::once(("subcommand", Json::Str(subcommand.to_string())))
                    .chain(config)
                    .collect(),
            ),
        ),
        ("inputs", inputs_json(inputs)),
    ];
    fields.extend(payload);
    Json::obj(fields)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), DynError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn load_grammar_input(input: &Input) -> Result<Grammar, DynError> {
    simplicity_core::parse_grammar(&input.content)
        .map_err(|e| format!("{}: {e}", input.path.display()).into())
}

fn load_pfsg_input(input: &Input) -> Result<Pfsg, DynError> {
    match load_grammar_input(input)? {
        Grammar::Pfsg(g) => Ok(g),
        Grammar::Pcfg(_) => {
            Err(format!("{}: this operation needs a PFSG", input.path.display()).into())
        }
    }
}

fn grammar_check(args: GrammarCheckArgs) -> Result<(), DynError> {
    let input = read_input("grammar", &args.grammar)?;
    let g = load_grammar_input(&input)?;
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };
    let bits = grammar_code_length(&g, &cfg);
    let text = match args.format {
        Format::Text => format!(
            "ok: {} | sources {} | terminals {} | rules {} | encoding {} bits\n",
            g.formalism(),
            g.num_sources(),
            g.num_terminals(),
            g.rule_count(),
            fmt_sig(bits)
        ),
        Format::Json => {
            let json = envelope(
                "grammar check",
                vec![("param_bits", Json::UInt(u64::from(args.param_bits)))],
                &[&input],
                vec![
                    ("formalism", Json::Str(g.formalism().to_string())),
                    ("sources", Json::UInt(g.num_sources() as u64)),
                    ("terminals", Json::UInt(g.num_terminals() as u64)),
                    ("rules", Json::UInt(g.rule_count() as u64)),
                    ("grammar_bits", Json::Num(bits)),
                ],
            );
            json.render() + "\n"
        }
    };
    emit(args.out.as_deref(), &text)
}

fn generate(args: GenerateArgs) -> Result<(), DynError> {
    let input = read_input("grammar", &args.grammar)?;
    let g = load_grammar_input(&input)?;
    let seed = resolve_seed(args.seed);
    let (stream, truncated) = g.generate(seed, args.max_tokens);
    let text = match args.format {
        Format::Text => {
            if truncated {
                log::warn!("generation truncated mid-sentence by the token budget");
            }
            stream.to_corpus_text()
        }
        Format::Json => {
            let tokens: Vec<Json> = stream
                .tokens()
                .iter()
                .map(|t| Json::Str(t.as_str().to_string()))
                .collect();
            envelope(
                "generate",
                vec![
                    ("seed", Json::UInt(seed)),
                    ("max_tokens", Json::UInt(args.max_tokens as u64)),
                ],
                &[&input],
                vec![
                    ("tokens", Json::Arr(tokens)),
                    ("truncated", Json::Bool(truncated)),
                ],
            )
            .render()
                + "\n"
        }
    };
    emit(args.out.as_deref(), &text)
}

fn report_json(report: &simplicity_core::CodeLengthReport) -> Vec<(&'static str, Json)> {
    vec![
        ("grammar_bits", Json::Num(report.grammar_bits)),
        ("data_bits", Json::Num(report.data_bits)),
        ("total_bits", Json::Num(report.total_bits)),
        (
            "per_sentence_bits",
            Json::Arr(report.per_sentence_bits.iter().map(|&b| Json::Num(b)).collect()),
        ),
    ]
}

fn encode(args: EncodeArgs) -> Result<(), DynError> {
    let grammar_in = read_input("grammar", &args.grammar)?;
    let corpus_in = read_input("corpus", &args.corpus)?;
    let g = load_grammar_input(&grammar_in)?;
    let corpus = TokenSequence::from_corpus_text(&corpus_in.content);
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };
    let report = two_part_length(&g, &corpus, &cfg)?;
    let text = match args.format {
        Format::Text => format!(
            "grammar {} bits | data {} bits | total {} bits | {} sentences\n",
            fmt_sig(report.grammar_bits),
            fmt_sig(report.data_bits),
            fmt_sig(report.total_bits),
            report.per_sentence_bits.len()
        ),
        Format::Json => envelope(
            "encode",
            vec![("param_bits", Json::UInt(u64::from(args.param_bits)))],
            &[&grammar_in, &corpus_in],
            report_json(&report),
        )
        .render()
            + "\n",
    };
    emit(args.out.as_deref(), &text)
}

fn compare(args: CompareArgs) -> Result<(), DynError> {
    let g0_in = read_input("g0", &args.g0)?;
    let g1_in = read_input("g1", &args.g1)?;
    let corpus_in = read_input("corpus", &args.corpus)?;
    let g0 = load_grammar_input(&g0_in)?;
    let g1 = load_grammar_input(&g1_in)?;
    let corpus = TokenSequence::from_corpus_text(&corpus_in.content);
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };
    let r0 = two_part_length(&g0, &corpus, &cfg)?;
    let r1 = two_part_length(&g1, &corpus, &cfg)?;
    let crossover = crossover_point(&g0, &g1, &corpus, &cfg)?;
    let crossover_json = match crossover {
        Some(i) => Json::UInt(i as u64),
        None => Json::Null,
    };
    let text = match args.format {
        Format::Text => format!(
            "g0 total {} bits | g1 total {} bits | crossover {}\n",
            fmt_sig(r0.total_bits),
            fmt_sig(r1.total_bits),
            match crossover {
                Some(i) => i.to_string(),
                None => "none within stream".to_string(),
            }
        ),
        Format::Json => envelope(
            "compare",
            vec![("param_bits", Json::UInt(u64::from(args.param_bits)))],
            &[&g0_in, &g1_in, &corpus_in],
            vec![
                ("g0", Json::obj(report_json(&r0))),
                ("g1", Json::obj(report_json(&r1))),
                ("crossover_sentence_index", crossover_json),
            ],
        )
        .render()
            + "\n",
    };
    emit(args.out.as_deref(), &text)
}

/// Loads a hypothesis class manifest; member paths resolve relative to the
/// manifest's directory. Returns the member inputs for digest echoing.
fn load_class(
    manifest: &Input,
    cfg: &CodingConfig,
) -> Result<(MixturePredictor, Vec<Input>), DynError> {
    let entries = parse_manifest(&manifest.content)?;
    let dir = manifest.path.parent().unwrap_or(Path::new("."));
    let mut members = Vec::new();
    let mut member_inputs = Vec::new();
    let mut priors = Vec::new();
    for e in &entries {
        let path = dir.join(&e.path);
        let input = read_input("hypothesis", &path)?;
        let g = load_pfsg_input(&input)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| e.path.clone());
        members.push((name, g));
        member_inputs.push(input);
        if let Some(p) = e.prior {
            priors.push(p);
        }
    }
    let priors = if priors.is_empty() { None } else { Some(priors) };
    let m = MixturePredictor::new(members, priors, cfg)?;
    Ok((m, member_inputs))
}

fn profile_mode(mode: Mode, trials: u32, seed: u64, budget: u64) -> ProfileMode {
    match mode {
        Mode::Exact => ProfileMode::Exact {
            node_budget: budget,
        },
        Mode::MonteCarlo => ProfileMode::MonteCarlo { trials, seed },
    }
}

fn profile_meta(config: &[(&str, Json)], inputs: &[&Input]) -> Vec<String> {
    let mut meta = vec![format!("tool: {TOOL} {VERSION}")];
    for (k, v) in config {
        meta.push(format!("{k}: {}", v.render().replace('\n', " ")));
    }
    for i in inputs {
        meta.push(format!("input: {} {} sha256={}", i.role, i.path.display(), i.sha256));
    }
    meta
}

fn emit_profile(
    subcommand: &str,
    profile: &ConvergenceProfile,
    config: Vec<(&'static str, Json)>,
    inputs: &[&Input],
    format: ProfileFormat,
    out: Option<&Path>,
    svg: Option<&Path>,
) -> Result<(), DynError> {
    let text = match format {
        ProfileFormat::Csv => profile_csv(profile, &profile_meta(&config, inputs)),
        ProfileFormat::Json => {
            envelope(subcommand, config, inputs, vec![("profile", profile_json(profile))])
                .render()
                + "\n"
        }
    };
    emit(out, &text)?;
    if let Some(path) = svg {
        let chart = render_profile_svg(profile, subcommand)?;
        fs::write(path, chart)?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), DynError> {
    let truth_in = read_input("truth", &args.truth)?;
    let class_in = read_input("class", &args.class)?;
    let truth = load_pfsg_input(&truth_in)?;
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };
    let seed = resolve_seed(args.seed);
    let (class, member_inputs) = load_class(&class_in, &cfg)?;
    let mode = profile_mode(args.mode, args.trials, seed, args.budget);
    let profile = class.full_profile(
        &truth,
        args.horizon,
        args.f,
        mode,
        args.ref_symbol.as_deref(),
        &cfg,
    )?;
    let config = vec![
        ("mode", Json::Str(profile.mode.clone())),
        ("horizon", Json::UInt(args.horizon as u64)),
        ("f", Json::Num(args.f)),
        ("seed", Json::UInt(seed)),
        (
            "ref_symbol",
            match &args.ref_symbol {
                Some(s) => Json::Str(s.clone()),
                None => Json::Str(class.alphabet()[0].clone()),
            },
        ),
        ("budget", Json::UInt(args.budget)),
        ("param_bits", Json::UInt(u64::from(args.param_bits))),
    ];
    let mut inputs: Vec<&Input> = vec![&truth_in, &class_in];
    inputs.extend(member_inputs.iter());
    emit_profile(
        "simulate",
        &profile,
        config,
        &inputs,
        args.format,
        args.out.as_deref(),
        args.svg.as_deref(),
    )
}

fn formmeaning(args: FormMeaningArgs) -> Result<(), DynError> {
    let inventory_in = read_input("inventory", &args.inventory)?;
    let class_in = read_input("class", &args.class)?;
    let pairs_in = read_input("pairs", &args.pairs)?;
    let base_in = read_input("base-grammar", &args.base_grammar)?;
    let inventory = Inventory::parse(&inventory_in.content)?;
    let base = load_grammar_input(&base_in)?;
    let rows = induced_rows(&base, args.max_len);
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };

    let entries = parse_manifest(&class_in.content)?;
    let dir = class_in.path.parent().unwrap_or(Path::new("."));
    let mut tables = Vec::new();
    let mut member_inputs = Vec::new();
    let mut priors = Vec::new();
    for e in &entries {
        let path = dir.join(&e.path);
        let input = read_input("hypothesis", &path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| e.path.clone());
        tables.push(JointHypothesis::parse(
            name,
            &input.content,
            &rows,
            &inventory,
            &cfg,
        )?);
        member_inputs.push(input);
        if let Some(p) = e.prior {
            priors.push(p);
        }
    }
    let priors = if priors.is_empty() { None } else { Some(priors) };
    let mut mixture = JointMixture::new(tables, priors)?;

    let pairs = parse_pairs(&pairs_in.content, &inventory)?;
    mixture.update_all(&pairs)?;

    let posterior = mixture.posterior();
    let joint = mixture.predictive_joint()?;
    let n_labels = inventory.labels().len();

    let posterior_json: Vec<Json> = mixture
        .hypotheses()
        .iter()
        .zip(posterior.iter())
        .map(|(h, &w)| {
            Json::obj(vec![
                ("name", Json::Str(h.name.clone())),
                ("description_bits", Json::Num(h.description_bits)),
                ("posterior", Json::Num(w)),
            ])
        })
        .collect();
    let joint_json: Vec<Json> = mixture
        .rows()
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let cells: Vec<Json> = (0..n_labels)
                .map(|l| {
                    Json::obj(vec![
                        ("interpretation", Json::Str(inventory.labels()[l].clone())),
                        ("p", Json::Num(joint[r * n_labels + l])),
                    ])
                })
                .collect();
            Json::obj(vec![
                ("sentence", Json::Str(row.join(" "))),
                ("cells", Json::Arr(cells)),
            ])
        })
        .collect();
    let mut cond_sentence = Vec::new();
    for row in mixture.rows().to_vec() {
        if let Ok(cond) = mixture.conditional_given_sentence(&row) {
            cond_sentence.push(Json::obj(vec![
                ("sentence", Json::Str(row.join(" "))),
                (
                    "p_interpretation",
                    Json::Arr(cond.iter().map(|&p| Json::Num(p)).collect()),
                ),
            ]));
        }
    }
    let mut cond_label = Vec::new();
    for (l, label) in inventory.labels().iter().enumerate() {
        if let Ok(cond) = mixture.conditional_given_label(l) {
            cond_label.push(Json::obj(vec![
                ("interpretation", Json::Str(label.clone())),
                (
                    "p_sentence",
                    Json::Arr(cond.iter().map(|&p| Json::Num(p)).collect()),
                ),
            ]));
        }
    }

    let seed = resolve_seed(args.seed);
    let mut config = vec![
        ("max_len", Json::UInt(args.max_len as u64)),
        ("param_bits", Json::UInt(u64::from(args.param_bits))),
        ("pairs_observed", Json::UInt(pairs.len() as u64)),
    ];

    // Optional error profile against a truth table.
    let mut profile_field: Option<ConvergenceProfile> = None;
    let mut truth_input: Option<Input> = None;
    if let Some(truth_path) = &args.truth {
        let t_in = read_input("truth", truth_path)?;
        let truth = JointHypothesis::parse(
            "truth".into(),
            &t_in.content,
            &rows,
            &inventory,
            &cfg,
        )?;
        let fresh = JointMixture::new(mixture.hypotheses().to_vec(), None)?;
        let mode = profile_mode(args.mode, args.trials, seed, args.budget);
        config.push(("horizon", Json::UInt(args.horizon as u64)));
        config.push(("seed", Json::UInt(seed)));
        profile_field = Some(fresh.error_profile(&truth, args.horizon, mode)?);
        truth_input = Some(t_in);
    }

    let mut inputs: Vec<&Input> = vec![&inventory_in, &class_in, &pairs_in, &base_in];
    inputs.extend(member_inputs.iter());
    if let Some(t) = &truth_input {
        inputs.push(t);
    }

    let mut payload = vec![
        ("posterior", Json::Arr(posterior_json)),
        ("predictive_joint", Json::Arr(joint_json)),
        ("conditional_given_sentence", Json::Arr(cond_sentence)),
        ("conditional_given_interpretation", Json::Arr(cond_label)),
    ];
    if let Some(p) = &profile_field {
        payload.push(("profile", profile_json(p)));
    }

    let meta = profile_meta(&config, &inputs);
    let text = match args.format {
        Format::Json => envelope("formmeaning", config, &inputs, payload).render() + "\n",
        Format::Text => {
            let mut s = String::new();
            for (h, w) in mixture.hypotheses().iter().zip(posterior.iter()) {
                s.push_str(&format!("{}: posterior {}\n", h.name, fmt_sig(*w)));
            }
            s
        }
    };
    emit(args.out.as_deref(), &text)?;
    if let (Some(path), Some(p)) = (args.profile_out.as_deref(), &profile_field) {
        fs::write(path, profile_csv(p, &meta))?;
    }
    if let (Some(path), Some(p)) = (args.svg.as_deref(), &profile_field) {
        fs::write(path, render_profile_svg(p, "formmeaning")?)?;
    }
    Ok(())
}

fn learnability(args: LearnabilityArgs) -> Result<(), DynError> {
    let g0_in = read_input("g0", &args.g0)?;
    let g1_in = read_input("g1", &args.g1)?;
    let corpus_in = read_input("corpus", &args.corpus)?;
    let g0 = load_grammar_input(&g0_in)?;
    let g1 = load_grammar_input(&g1_in)?;
    let mut contexts: Vec<ContextSpec> = Vec::new();
    for c in &args.context {
        contexts.push(ContextSpec::Prefix(TokenSequence::new(
            c.split_whitespace()
                .map(simplicity_core::Token::word)
                .collect(),
        )));
    }
    for s in &args.state {
        contexts.push(ContextSpec::State(s.clone()));
    }
    if contexts.is_empty() {
        return Err("at least one --context or --state is required".into());
    }
    let stats = corpus::ingest_bytes(corpus_in.content.as_bytes())?;
    let pattern = TokenPattern::parse(&args.pattern)?;
    let corpus_tokens = TokenSequence::from_corpus_text(&corpus_in.content);
    let cfg = CodingConfig {
        param_bits: args.param_bits,
    };
    let estimate = learnability_report(
        &g0,
        &g1,
        &contexts,
        &stats,
        &pattern,
        Some(&corpus_tokens),
        args.words_per_year,
        &cfg,
    )?;
    let text = match args.format {
        Format::Text => format!(
            "delta {} bits | q {} | savings {} bits | occurrences {} | years {} | method {}\n",
            fmt_sig(estimate.delta_grammar_bits),
            fmt_sig(estimate.disallowed_mass_q),
            fmt_sig(estimate.savings_bits_per_occurrence),
            fmt_sig(estimate.occurrences_needed),
            fmt_sig(estimate.years_needed),
            estimate.method
        ),
        Format::Json => envelope(
            "learnability",
            vec![
                ("pattern", Json::Str(args.pattern.clone())),
                (
                    "contexts",
                    Json::Arr(
                        args.context
                            .iter()
                            .map(|c| Json::Str(c.clone()))
                            .chain(args.state.iter().map(|s| Json::Str(format!("state:{s}"))))
                            .collect(),
                    ),
                ),
                ("param_bits", Json::UInt(u64::from(args.param_bits))),
            ],
            &[&g0_in, &g1_in, &corpus_in],
            vec![
                ("delta_bits", Json::Num(estimate.delta_grammar_bits)),
                ("q", Json::Num(estimate.disallowed_mass_q)),
                ("savings_bits", Json::Num(estimate.savings_bits_per_occurrence)),
                ("occurrences_needed", Json::Num(estimate.occurrences_needed)),
                (
                    "rate_per_million",
                    Json::Num(estimate.context_rate_per_million_words),
                ),
                ("words_per_year", Json::Num(estimate.words_per_year)),
                ("years_needed", Json::Num(estimate.years_needed)),
                ("method", Json::Str(estimate.method.to_string())),
                ("delta_warning", Json::Bool(estimate.delta_warning)),
            ],
        )
        .render()
            + "\n",
    };
    emit(args.out.as_deref(), &text)
}

fn corpus_stats(args: CorpusStatsArgs) -> Result<(), DynError> {
    let corpus_in = read_input("corpus", &args.corpus)?;
    let mut stats = corpus::ingest_bytes(corpus_in.content.as_bytes())?;
    let mut patterns_json = Vec::new();
    for p in &args.pattern {
        let pat = TokenPattern::parse(p)?;
        let count = corpus::count_matches(&stats, &pat);
        stats.pattern_counts.insert(pat.text().to_string(), count);
        let rate = corpus::per_million(count, stats.word_count)?;
        patterns_json.push(Json::obj(vec![
            ("pattern", Json::Str(pat.text().to_string())),
            ("count", Json::UInt(count)),
            ("per_million", Json::Num(rate)),
        ]));
    }
    let text = match args.format {
        Format::Text => {
            let mut s = format!(
                "words {} | sentences {} | sha256 {}\n",
                stats.word_count, stats.sentence_count, stats.sha256
            );
            for (pat, count) in &stats.pattern_counts {
                s.push_str(&format!("pattern {pat}: {count}\n"));
            }
            s
        }
        Format::Json => envelope(
            "corpus stats",
            vec![(
                "patterns",
                Json::Arr(args.pattern.iter().map(|p| Json::Str(p.clone())).collect()),
            )],
            &[&corpus_in],
            vec![
                ("word_count", Json::UInt(stats.word_count)),
                ("sentence_count", Json::UInt(stats.sentence_count)),
                ("patterns", Json::Arr(patterns_json)),
                ("sha256", Json::Str(stats.sha256.clone())),
            ],
        )
        .render()
            + "\n",
    };
    emit(args.out.as_deref(), &text)
}
