//! `ttm`: interactive elicitation, batch matrix processing and the HTTP
//! service launcher.
//!
//! Exit codes: 0 on success, 1 when the input is rejected by the method
//! (for example an inconsistent matrix), 2 on usage or I/O errors.

use std::fs;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ttm_core::interchange::{match_matrix_from_csv, matrix_from_csv, matrix_to_csv};
use ttm_core::{
    build_preference_matrix, check_consistency, value_scale, CardRules, ObjectId, ObjectSet, PairingPolicy,
    PreferenceMatrix, ResultsDocument, TournamentConfig, DEFAULT_CARD_CAP,
};
use ttm_session::{canonical_json, export_match_matrix, load_session, save_session, Session};

pub mod elicit;
pub mod error;
pub mod report;

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "ttm", version, about = "Tournament-tree preference elicitation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ask the pairwise questions of a tournament and print the value scale.
    Elicit(ElicitArgs),
    /// Build the preference matrix from a match-matrix CSV.
    Build(BuildArgs),
    /// Derive the ranking and value scale from a preference-matrix CSV.
    Eval(EvalArgs),
    /// Report reciprocity and consistency defects of a preference-matrix CSV.
    Check(CheckArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Policy {
    Sequential,
    Explicit,
}

impl From<Policy> for PairingPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Sequential => PairingPolicy::Sequential,
            Policy::Explicit => PairingPolicy::Explicit,
        }
    }
}

#[derive(Debug, Args)]
pub struct ElicitArgs {
    /// Comma-separated object names.
    #[arg(long, required_unless_present = "resume", conflicts_with = "resume")]
    pub objects: Option<String>,
    #[arg(long, value_enum, default_value = "sequential")]
    pub policy: Policy,
    /// Accept `tie` as an answer.
    #[arg(long)]
    pub allow_ties: bool,
    #[arg(long, default_value_t = DEFAULT_CARD_CAP)]
    pub card_cap: u32,
    /// Session file, rewritten after every answer.
    #[arg(long, default_value = "ttm-session.json")]
    pub session: PathBuf,
    /// Continue a saved session.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Results document to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Match-matrix CSV to write once the tournament is over.
    #[arg(long)]
    pub export_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub match_matrix: PathBuf,
    /// Preference-matrix CSV to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated names fixing the row order; inferred from the file
    /// in order of appearance otherwise.
    #[arg(long)]
    pub objects: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Comma-separated row names; `a1..am` when absent.
    #[arg(long)]
    pub names: Option<String>,
    /// Results document to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub names: Option<String>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Built web UI to serve at `/`.
    #[arg(long, env = "WEB_DIR")]
    pub web_dir: Option<PathBuf>,
    #[arg(long, default_value = "0.0.0.0")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value_t = ttm_server::DEFAULT_MAX_OBJECTS)]
    pub max_objects: usize,
}

/// Executes a parsed command. Prompts and reports go to `output`.
pub fn run<R: BufRead, W: Write>(cli: Cli, input: R, mut output: W) -> Result<()> {
    match cli.command {
        Command::Elicit(args) => run_elicit(args, input, output),
        Command::Build(args) => {
            let csv = build(&read(&args.match_matrix)?, args.objects.as_deref(), &args.match_matrix)?;
            emit(args.out.as_deref(), &csv, &mut output)
        }
        Command::Eval(args) => {
            let names = names_for(args.names.as_deref())?;
            let (objects, doc) = eval(&read(&args.matrix)?, names, &args.matrix)?;
            write_out(&mut output, &report::summary(objects.names(), &doc))?;
            if let Some(path) = &args.out {
                write(path, &doc.to_canonical_json())?;
            }
            Ok(())
        }
        Command::Check(args) => {
            let names = names_for(args.names.as_deref())?;
            let defects = check(&read(&args.matrix)?, names, &args.matrix)?;
            if defects.is_empty() {
                write_out(&mut output, "reciprocal and consistent\n")
            } else {
                write_out(&mut output, &(defects.join("\n") + "\n"))?;
                Err(CliError::Domain(format!("{}: {} defect(s)", args.matrix.display(), defects.len())))
            }
        }
        Command::Serve(args) => serve(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_out<W: Write>(output: &mut W, text: &str) -> Result<()> {
    output.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn emit<W: Write>(path: Option<&Path>, text: &str, output: &mut W) -> Result<()> {
    match path {
        Some(path) => write(path, text),
        None => write_out(output, text),
    }
}

pub fn parse_names(list: &str) -> Result<ObjectSet> {
    ObjectSet::new(list.split(',')).map_err(|e| CliError::core("objects", e))
}

fn names_for(list: Option<&str>) -> Result<Option<ObjectSet>> {
    list.map(parse_names).transpose()
}

/// Match-matrix CSV text to preference-matrix CSV text.
pub fn build(text: &str, objects: Option<&str>, path: &Path) -> Result<String> {
    let context = path.display().to_string();
    let objects = names_for(objects)?;
    let (_, matches) = match_matrix_from_csv(text, objects.as_ref()).map_err(|e| CliError::core(&context, e))?;
    let matrix = build_preference_matrix(&matches).map_err(|e| CliError::core(&context, e))?;
    Ok(matrix_to_csv(&matrix))
}

fn load_matrix(text: &str, names: Option<ObjectSet>, path: &Path) -> Result<(ObjectSet, PreferenceMatrix)> {
    let context = path.display().to_string();
    let matrix = matrix_from_csv(text).map_err(|e| CliError::core(&context, e))?;
    let objects = match names {
        Some(objects) if objects.len() == matrix.m() => objects,
        Some(objects) => {
            return Err(CliError::Usage(format!("{} names given for a {m}x{m} matrix", objects.len(), m = matrix.m())))
        }
        None => ObjectSet::numbered(matrix.m()).map_err(|e| CliError::core(&context, e))?,
    };
    Ok((objects, matrix))
}

/// The lowest-numbered object whose row has no negative entry.
pub fn infer_champion(matrix: &PreferenceMatrix) -> Option<ObjectId> {
    (0..matrix.m()).find(|&i| matrix.row(i).iter().all(|&x| x >= 0)).map(ObjectId)
}

pub fn eval(text: &str, names: Option<ObjectSet>, path: &Path) -> Result<(ObjectSet, ResultsDocument)> {
    let context = path.display().to_string();
    let (objects, matrix) = load_matrix(text, names, path)?;
    let champion = infer_champion(&matrix)
        .ok_or_else(|| CliError::Domain(format!("{context}: no object dominates all others")))?;
    let scale = value_scale(&matrix, champion).map_err(|e| CliError::core(&context, e))?;
    let doc = ResultsDocument::new(&objects, &scale).map_err(|e| CliError::core(&context, e))?;
    Ok((objects, doc))
}

pub fn check(text: &str, names: Option<ObjectSet>, path: &Path) -> Result<Vec<String>> {
    let (objects, matrix) = load_matrix(text, names, path)?;
    Ok(report::defects(objects.names(), &matrix, &check_consistency(&matrix)))
}

fn run_elicit<R: BufRead, W: Write>(args: ElicitArgs, input: R, output: W) -> Result<()> {
    let (mut session, session_path) = match &args.resume {
        Some(path) => {
            (load_session(&read(path)?).map_err(|e| CliError::session(&path.display().to_string(), e))?, path)
        }
        None => {
            let objects = parse_names(args.objects.as_deref().expect("clap requires objects without resume"))?;
            let rules = CardRules { allow_ties: args.allow_ties, card_cap: Some(args.card_cap) };
            let config = TournamentConfig { policy: args.policy.into(), rules };
            let mut session = Session::new(objects, config).map_err(|e| CliError::session("objects", e))?;
            session.start().map_err(|e| CliError::session("session", e))?;
            (session, &args.session)
        }
    };
    let save = |s: &Session| write(session_path, &save_session(s));
    save(&session)?;

    let mut prompter = elicit::Prompter::new(input, output);
    if !elicit::run(&mut session, &mut prompter, save)? {
        return Err(CliError::Usage(format!(
            "input ended before the tournament finished; continue with `ttm elicit --resume {}`",
            session_path.display()
        )));
    }

    let doc = session.results().map_err(|e| CliError::session("results", e))?;
    write_out(prompter.output(), &report::summary(session.objects().names(), &doc))?;
    if let Some(path) = &args.out {
        write(path, &canonical_json(&doc))?;
    }
    if let Some(path) = &args.export_matrix {
        write(path, &export_match_matrix(&session).map_err(|e| CliError::session("match matrix", e))?)?;
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    let _ = tracing_subscriber::fmt().try_init();
    let store = ttm_session::FileStore::open(&args.data_dir).map_err(|e| CliError::session("data dir", e))?;
    let config = ttm_server::ServiceConfig { max_objects: args.max_objects, web_dir: args.web_dir };
    let state = ttm_server::AppState::new(Arc::new(store), config);
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io(Path::new("<runtime>"), e))?;
    runtime.block_on(ttm_server::serve(addr, state)).map_err(|e| CliError::Usage(format!("{addr}: {e}")))
}
