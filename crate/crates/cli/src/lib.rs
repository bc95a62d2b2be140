//! The `pact` command line: count both phases, solve, explain, publish
//! receipts, verify a published count and serve the HTTP API.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification mismatch,
//! 3 infeasible (relaxation disabled, or an infeasible pool), 4 node budget
//! exceeded.

use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use pact_core::criteria_vote::{build_election_config, tally_criteria_vote, CriteriaQuestion};
use pact_core::explain::{build_report, render_report, ReportFormat};
use pact_core::io;
use pact_core::ledger::{verify_count, verify_receipt, CountCheck, Ledger, ReceiptCheck, Salt};
use pact_core::lp::to_lp;
use pact_core::model::{ElectionBase, ElectionConfig, RelaxationPolicy, TiePolicy, Votes};
use pact_core::solver::{
    check_feasibility, effective_config, find_forced_candidates, solve_with, Feasibility, SolveOutcome, SolveStatus,
    SolverOptions, DEFAULT_NODE_BUDGET,
};
use pact_core::tally::count_votes_parallel;
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_MISMATCH: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "pact", version, about = "Criteria-constrained committee elections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TieArg {
    ReportAll,
    Lex,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RelaxArg {
    FreeSeatsThenDrop,
    Fail,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count the phase-1 vote on criteria.
    CriteriaTally {
        #[arg(long)]
        questions: PathBuf,
        #[arg(long)]
        ballots: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Election without criteria; with --config-out, writes the phase-2 config.
        #[arg(long, requires = "config_out")]
        base: Option<PathBuf>,
        #[arg(long, requires = "base")]
        config_out: Option<PathBuf>,
    },
    /// Count phase-2 approval ballots.
    Tally {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        ballots: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Select the committee.
    Solve {
        #[arg(long, required_unless_present = "multi_district")]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "multi_district")]
        tally: Option<PathBuf>,
        #[arg(long, required_unless_present = "multi_district")]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        tie_policy: Option<TieArg>,
        #[arg(long, value_enum)]
        relax: Option<RelaxArg>,
        /// Also write the instance in LP format for an external solver.
        #[arg(long)]
        emit_lp: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        /// Solve every subdirectory holding config.json and tally.csv, in
        /// parallel, writing outcome.json next to them.
        #[arg(long, conflicts_with_all = ["config", "tally", "out", "emit_lp"])]
        multi_district: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Render the outcome with its price and explanations.
    Explain {
        #[arg(long)]
        outcome: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tally: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether any committee can meet the criteria.
    Feasibility {
        #[arg(long)]
        config: PathBuf,
        /// Candidate pool to check instead of the config's roster.
        #[arg(long)]
        roster: Option<PathBuf>,
    },
    /// Recount published ballots and compare with a published outcome.
    Verify {
        #[arg(long)]
        ballots: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
    },
    /// Voter receipts.
    Receipt {
        #[command(subcommand)]
        command: ReceiptCommand,
    },
    /// Serve the HTTP API for an election.
    Serve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tally: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: String,
        /// Browser origin allowed to call the API; repeatable.
        #[arg(long)]
        cors_origin: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReceiptCommand {
    /// Check receipts against published ballots.
    Verify {
        #[arg(long)]
        receipt: PathBuf,
        #[arg(long)]
        ballots: PathBuf,
    },
    /// Salt and digest raw ballots: writes the public ledger and the private
    /// receipts.
    Issue {
        #[arg(long)]
        ballots: PathBuf,
        #[arg(long)]
        out_ballots: PathBuf,
        #[arg(long)]
        out_receipts: PathBuf,
        /// Deterministic salts for reproducible test runs. Default: OS entropy.
        #[arg(long)]
        salt_seed: Option<u64>,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(error: E) -> Self {
        let error = error.into();
        let code = match error.downcast_ref::<pact_core::Error>() {
            Some(pact_core::Error::NodeBudgetExceeded { .. }) => EXIT_BUDGET,
            Some(pact_core::Error::Infeasible(_)) | Some(pact_core::Error::UnsatisfiableEvenEmpty { .. }) => {
                EXIT_INFEASIBLE
            }
            _ => EXIT_USAGE,
        };
        Failure { code, error }
    }
}

fn exit_with(code: u8, message: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        error: anyhow::anyhow!("{message}"),
    }
}

type CmdResult = Result<(), Failure>;

fn open(path: &Path) -> anyhow::Result<File> {
    File::open(path).with_context(|| format!("cannot open {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

fn read_config(path: &Path) -> anyhow::Result<ElectionConfig> {
    io::read_json(path).with_context(|| format!("cannot read config {}", path.display()))
}

fn read_tally(path: &Path) -> anyhow::Result<Votes> {
    io::read_tally_csv(open(path)?).with_context(|| format!("cannot read tally {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn print_outcome(outcome: &SolveOutcome) {
    println!(
        "status: {}",
        serde_json::to_value(outcome.status).expect("serializable")
    );
    println!("objective: {}", outcome.objective);
    println!(
        "committee ({}): {}",
        outcome.committee.len(),
        outcome.committee.iter().cloned().collect::<Vec<_>>().join(" ")
    );
    if outcome.is_tied() {
        println!("co-optimal committees: {}", outcome.co_optimal_total);
    }
    if !outcome.forced.is_empty() {
        println!(
            "forced: {}",
            outcome.forced.iter().cloned().collect::<Vec<_>>().join(" ")
        );
    }
    for r in &outcome.applied_relaxations {
        println!("relaxed: {}", serde_json::to_string(r).expect("serializable"));
    }
}

fn criteria_tally(
    questions: &Path,
    ballots: &Path,
    out: &Path,
    base: Option<&Path>,
    config_out: Option<&Path>,
) -> CmdResult {
    let questions: Vec<CriteriaQuestion> = io::read_json(questions).context("cannot read questions")?;
    let ballots = io::read_criteria_ballots_csv(open(ballots)?)?;
    let result = tally_criteria_vote(&questions, &ballots)?;
    io::write_json(out, &result)?;
    println!("{} participants", result.participants);
    for q in &result.questions {
        println!(
            "{}: yes {} no {} blank {} -> {}",
            q.question_id,
            q.yes_pct,
            q.no_pct,
            q.blank_pct,
            if q.accepted { "accepted" } else { "rejected" }
        );
    }
    if let (Some(base), Some(config_out)) = (base, config_out) {
        let base: ElectionBase = io::read_json(base).context("cannot read base election")?;
        io::write_json(config_out, &build_election_config(base, &result))?;
    }
    Ok(())
}

fn tally(config: &Path, ballots: &Path, out: &Path, workers: usize) -> CmdResult {
    let config = read_config(config)?;
    let file = io::read_ballots_csv(open(ballots)?)?;
    for w in &file.warnings {
        eprintln!("warning: ballot {}: {}", w.ballot_id, w.message);
    }
    let result = count_votes_parallel(&file.ballots, &config, workers.max(1));
    for r in &result.ballots_rejected {
        eprintln!("rejected: ballot {}: {:?}", r.ballot_id, r.reason);
    }
    io::write_tally_csv(create(out)?, &result.votes)?;
    println!(
        "{} ballots counted, {} rejected, {} votes cast",
        result.ballots_counted,
        result.ballots_rejected.len(),
        result.total_votes_cast
    );
    Ok(())
}

fn apply_policies(config: &mut ElectionConfig, tie: Option<TieArg>, relax: Option<RelaxArg>) {
    if let Some(tie) = tie {
        config.tie_policy = match tie {
            TieArg::ReportAll => TiePolicy::ReportAll,
            TieArg::Lex => TiePolicy::Lexicographic,
        };
    }
    if let Some(relax) = relax {
        config.relaxation_policy = match relax {
            RelaxArg::FreeSeatsThenDrop => RelaxationPolicy::FreeSeatsThenDrop,
            RelaxArg::Fail => RelaxationPolicy::Fail,
        };
    }
}

fn infeasible_failure(outcome: &SolveOutcome) -> Failure {
    let deficits = serde_json::to_string(&outcome.deficits).expect("serializable");
    exit_with(
        EXIT_INFEASIBLE,
        format!("infeasible with relaxation disabled: {deficits}"),
    )
}

#[allow(clippy::too_many_arguments)]
fn solve_one(
    config: &Path,
    tally: &Path,
    out: &Path,
    tie: Option<TieArg>,
    relax: Option<RelaxArg>,
    emit_lp: Option<&Path>,
    options: &SolverOptions,
) -> CmdResult {
    let mut config = read_config(config)?;
    apply_policies(&mut config, tie, relax);
    let votes = read_tally(tally)?;
    let outcome = solve_with(&votes, &config, options)?;
    io::write_json(out, &outcome)?;
    if let Some(path) = emit_lp {
        let solved = effective_config(&config, &outcome)?;
        write_text(path, &to_lp(&votes, &solved).text)?;
    }
    print_outcome(&outcome);
    if outcome.status == SolveStatus::Infeasible {
        return Err(infeasible_failure(&outcome));
    }
    Ok(())
}

fn districts(root: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in std::fs::read_dir(root).with_context(|| format!("cannot read {}", root.display()))? {
        let path = entry?.path();
        if path.join("config.json").is_file() && path.join("tally.csv").is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        bail!(
            "no district directories with config.json and tally.csv under {}",
            root.display()
        );
    }
    Ok(dirs)
}

fn solve_districts(
    root: &Path,
    tie: Option<TieArg>,
    relax: Option<RelaxArg>,
    options: &SolverOptions,
    workers: Option<usize>,
) -> CmdResult {
    let dirs = districts(root)?;
    let workers = workers
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .clamp(1, dirs.len());

    let solve_dir = |dir: &PathBuf| -> Result<SolveOutcome, Failure> {
        let mut config = read_config(&dir.join("config.json"))?;
        apply_policies(&mut config, tie, relax);
        let votes = read_tally(&dir.join("tally.csv"))?;
        let outcome = solve_with(&votes, &config, options)?;
        io::write_json(dir.join("outcome.json"), &outcome)?;
        Ok(outcome)
    };

    let chunk = dirs.len().div_ceil(workers);
    let results: Vec<Result<SolveOutcome, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = dirs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(solve_dir).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("district worker panicked"))
            .collect()
    });

    let mut worst = 0u8;
    for (dir, result) in dirs.iter().zip(results) {
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match result {
            Ok(outcome) => {
                let status = serde_json::to_value(outcome.status).expect("serializable");
                println!(
                    "{name}: {} objective {}",
                    status.as_str().unwrap_or(""),
                    outcome.objective
                );
                if outcome.status == SolveStatus::Infeasible {
                    worst = worst.max(EXIT_INFEASIBLE);
                }
            }
            Err(f) => {
                eprintln!("{name}: error: {:#}", f.error);
                worst = worst.max(f.code);
            }
        }
    }
    match worst {
        0 => Ok(()),
        code => Err(exit_with(code, "some districts did not solve")),
    }
}

fn explain(outcome: &Path, config: &Path, tally: &Path, format: FormatArg, out: Option<&Path>) -> CmdResult {
    let outcome: SolveOutcome = io::read_json(outcome).context("cannot read outcome")?;
    let config = read_config(config)?;
    let votes = read_tally(tally)?;
    let report = build_report(&outcome, &votes, &config, &SolverOptions::default())?;
    let format = match format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Markdown => ReportFormat::Markdown,
    };
    let text = render_report(&report, format)?;
    match out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn feasibility(config: &Path, roster: Option<&Path>) -> CmdResult {
    let mut config = read_config(config)?;
    if let Some(path) = roster {
        config.roster = io::read_candidates_csv(open(path)?)?;
    }
    pact_core::model::ensure_valid(&config)?;
    let result = check_feasibility(&config.roster, &config);
    println!("{}", serde_json::to_string_pretty(&result)?);
    match result {
        Feasibility::Feasible => {
            let forced = find_forced_candidates(&config)?;
            println!("forced: {}", forced.into_iter().collect::<Vec<_>>().join(" "));
            Ok(())
        }
        Feasibility::Infeasible { .. } => Err(exit_with(EXIT_INFEASIBLE, "no committee meets the criteria")),
    }
}

fn verify(ballots: &Path, config: &Path, outcome: &Path) -> CmdResult {
    let file = io::read_ballots_csv(open(ballots)?)?;
    let config = read_config(config)?;
    let outcome: SolveOutcome = io::read_json(outcome).context("cannot read outcome")?;
    match verify_count(&file.ballots, &config, &outcome, &SolverOptions::default()) {
        CountCheck::Confirmed => {
            println!("CONFIRMED");
            Ok(())
        }
        CountCheck::Mismatch { discrepancies } => {
            println!("MISMATCH");
            for d in &discrepancies {
                println!("  {}", serde_json::to_string(d)?);
            }
            Err(exit_with(
                EXIT_MISMATCH,
                format!("{} discrepancies", discrepancies.len()),
            ))
        }
    }
}

fn receipt_verify(receipt: &Path, ballots: &Path) -> CmdResult {
    let receipts = io::read_receipts_csv(open(receipt)?)?;
    let published = io::read_ballots_csv(open(ballots)?)?.ballots;
    let mut failed = 0;
    for r in &receipts {
        let check = verify_receipt(r, &published);
        if check == ReceiptCheck::NoMatch {
            failed += 1;
        }
        println!(
            "{} {}",
            r.ballot_id,
            serde_json::to_value(check)?.as_str().unwrap_or("")
        );
    }
    if failed > 0 {
        return Err(exit_with(
            EXIT_MISMATCH,
            format!("{failed} of {} receipts do not match", receipts.len()),
        ));
    }
    Ok(())
}

fn receipt_issue(ballots: &Path, out_ballots: &Path, out_receipts: &Path, salt_seed: Option<u64>) -> CmdResult {
    let raw = io::read_ballots_csv(open(ballots)?)?.ballots;
    let mut rng: Box<dyn RngCore> = match salt_seed {
        Some(seed) => Box::new(ChaCha20Rng::seed_from_u64(seed)),
        None => Box::new(OsRng),
    };
    let mut ledger = Ledger::new();
    let mut receipts = Vec::with_capacity(raw.len());
    for mut ballot in raw {
        ballot.receipt = None;
        receipts.push(ledger.append(ballot, &Salt::random(rng.as_mut()))?);
    }
    io::write_ballots_csv(create(out_ballots)?, ledger.published())?;
    io::write_receipts_csv(create(out_receipts)?, &receipts)?;
    println!("issued {} receipts", receipts.len());
    Ok(())
}

fn serve(config: &Path, tally: &Path, listen: &str, cors_origins: Vec<String>) -> CmdResult {
    let config = read_config(config)?;
    pact_core::model::ensure_valid(&config)?;
    let votes = read_tally(tally)?;
    let state = Arc::new(pact_server::ApiState::new(config, votes));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .with_context(|| format!("cannot listen on {listen}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        pact_server::serve(listener, state, pact_server::ServeOptions { cors_origins }).await?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(())
}

pub fn execute(cli: Cli) -> CmdResult {
    match cli.command {
        Command::CriteriaTally {
            questions,
            ballots,
            out,
            base,
            config_out,
        } => criteria_tally(&questions, &ballots, &out, base.as_deref(), config_out.as_deref()),
        Command::Tally {
            config,
            ballots,
            out,
            workers,
        } => tally(&config, &ballots, &out, workers),
        Command::Solve {
            config,
            tally,
            out,
            tie_policy,
            relax,
            emit_lp,
            node_budget,
            multi_district,
            workers,
        } => {
            let options = SolverOptions::with_budget(node_budget);
            match multi_district {
                Some(root) => solve_districts(&root, tie_policy, relax, &options, workers),
                None => solve_one(
                    &config.expect("required by clap"),
                    &tally.expect("required by clap"),
                    &out.expect("required by clap"),
                    tie_policy,
                    relax,
                    emit_lp.as_deref(),
                    &options,
                ),
            }
        }
        Command::Explain {
            outcome,
            config,
            tally,
            format,
            out,
        } => explain(&outcome, &config, &tally, format, out.as_deref()),
        Command::Feasibility { config, roster } => feasibility(&config, roster.as_deref()),
        Command::Verify {
            ballots,
            config,
            outcome,
        } => verify(&ballots, &config, &outcome),
        Command::Receipt { command } => match command {
            ReceiptCommand::Verify { receipt, ballots } => receipt_verify(&receipt, &ballots),
            ReceiptCommand::Issue {
                ballots,
                out_ballots,
                out_receipts,
                salt_seed,
            } => receipt_issue(&ballots, &out_ballots, &out_receipts, salt_seed),
        },
        Command::Serve {
            config,
            tally,
            listen,
            cors_origin,
        } => serve(&config, &tally, &listen, cors_origin),
    }
}

/// Parse arguments and run. Usage errors exit 1, not clap's default 2,
/// which is reserved for verification mismatches.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
