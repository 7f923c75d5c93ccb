use thiserror::Error;

/// Errors produced by grammar parsing, validation, scoring, and the
/// downstream estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("line {line}: rules for `{symbol}` sum to {sum}, expected 1 within 1e-6")]
    ProbabilitySum { symbol: String, sum: f64, line: usize },

    #[error("line {line}: undeclared symbol `{name}`")]
    UndeclaredSymbol { name: String, line: usize },

    #[error("grammar does not terminate: {detail}")]
    NonTerminating { detail: String },

    #[error("token `{token}` is not in the grammar alphabet")]
    OutOfVocabulary { token: String },

    #[error("prefix has zero probability; conditional distribution is undefined")]
    ZeroProbabilityPrefix,

    #[error("operation requires a finite-state grammar, got {formalism}")]
    FormalismUnsupported { formalism: String },

    #[error("hypothesis class is empty")]
    EmptyClass,

    #[error("alphabet mismatch: expected {{{expected}}}, `{name}` declares {{{found}}}")]
    AlphabetMismatch {
        expected: String,
        found: String,
        name: String,
    },

    #[error("duplicate grammar in class: `{name}`")]
    DuplicateGrammar { name: String },

    #[error("class exhausted: every hypothesis assigns probability 0 to the observed sequence")]
    ClassExhausted,

    #[error(
        "exact mode budget exceeded: {nodes} enumeration nodes > budget {budget}; \
         use monte-carlo mode instead"
    )]
    BudgetExceeded { nodes: u64, budget: u64 },

    #[error(
        "underestimation factor f = {f} violates the bound condition f > e (2.71828...); \
         the undergeneralization bound holds only for f > e"
    )]
    UndergenFactor { f: f64 },

    #[error("continuation has zero probability under the true grammar; ratio is undefined")]
    UndefinedRatio,

    #[error("not an overgeneral/restricted pair in this context: {detail}")]
    SupportViolation { detail: String },

    #[error("corpus has zero words; rate is undefined")]
    ZeroWordCorpus,

    #[error("line {line}: {msg}")]
    MalformedLine { line: usize, msg: String },

    #[error("line {line}: undeclared interpretation `{label}`")]
    UndeclaredInterpretation { label: String, line: usize },

    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile is empty; nothing to plot")]
    EmptyProfile,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
