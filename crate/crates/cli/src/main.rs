use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spp_cli::{cmd_report, cmd_run, cmd_validate, CliError, RunConfig, RunOptions};
use spp_core::backend::ReplayMode;
use spp_core::evaluation::ReportOptions;
use spp_core::model::{Setting, Strategy, TaskKind};

#[derive(Parser)]
#[command(name = "spp", version, about = "Run and report Solo Performance Prompting experiments")]
struct Cli {
    /// Repeat for more detail (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file.
    Run(RunArgs),
    /// Same as `run` with replay_mode forced to record.
    Record(RunArgs),
    /// Build report tables from results files.
    Report {
        #[arg(long = "out", short = 'o')]
        out: PathBuf,
        /// Fail when a task lacks Standard results instead of omitting deltas.
        #[arg(long)]
        require_baseline: bool,
        #[arg(required = true)]
        results: Vec<PathBuf>,
    },
    /// Check a dataset file; exits nonzero if anything is wrong.
    Validate {
        #[arg(long)]
        kind: TaskKind,
        path: PathBuf,
    },
}

/// Every config field can be overridden by a flag of the same name.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    dry_run: bool,
    #[arg(long = "task")]
    task: Option<TaskKind>,
    #[arg(long = "dataset_path", visible_alias = "dataset-path")]
    dataset_path: Option<PathBuf>,
    #[arg(long = "expected_count", visible_alias = "expected-count")]
    expected_count: Option<usize>,
    /// Comma separated, e.g. `standard,cot,self_refine:1,spp`.
    #[arg(long = "methods", value_delimiter = ',')]
    methods: Option<Vec<Strategy>>,
    /// Comma separated subset of `with,without`.
    #[arg(long = "system_message_settings", visible_alias = "system-message-settings", value_delimiter = ',')]
    system_message_settings: Option<Vec<Setting>>,
    #[arg(long = "model_name", visible_alias = "model-name")]
    model_name: Option<String>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long = "top_p", visible_alias = "top-p")]
    top_p: Option<f64>,
    #[arg(long = "max_tokens", visible_alias = "max-tokens")]
    max_tokens: Option<std::num::NonZeroU32>,
    #[arg(long = "endpoint_url", visible_alias = "endpoint-url")]
    endpoint_url: Option<String>,
    #[arg(long = "api_key_env_var", visible_alias = "api-key-env-var")]
    api_key_env_var: Option<String>,
    #[arg(long = "max_parallel_requests", visible_alias = "max-parallel-requests")]
    max_parallel_requests: Option<usize>,
    #[arg(long = "replay_mode", visible_alias = "replay-mode")]
    replay_mode: Option<ReplayMode>,
    #[arg(long = "replay_store", visible_alias = "replay-store")]
    replay_store: Option<PathBuf>,
    #[arg(long = "templates_dir", visible_alias = "templates-dir")]
    templates_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "shuffle_questions", visible_alias = "shuffle-questions")]
    shuffle_questions: Option<bool>,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long = "output_dir", visible_alias = "output-dir")]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(self) -> Result<(RunConfig, RunOptions), CliError> {
        let mut c = RunConfig::load(&self.config)?;
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(
            task => c.task,
            dataset_path => c.dataset_path,
            methods => c.methods,
            system_message_settings => c.system_message_settings,
            model_name => c.params.model_name,
            temperature => c.params.temperature,
            top_p => c.params.top_p,
            endpoint_url => c.backend.endpoint_url,
            api_key_env_var => c.backend.api_key_env_var,
            max_parallel_requests => c.backend.max_parallel_requests,
            replay_mode => c.replay_mode,
            templates_dir => c.templates_dir,
            seed => c.seed,
            shuffle_questions => c.shuffle_questions,
            output_dir => c.output_dir,
        );
        if self.expected_count.is_some() {
            c.expected_count = self.expected_count;
        }
        if self.max_tokens.is_some() {
            c.params.max_tokens = self.max_tokens;
        }
        if self.replay_store.is_some() {
            c.replay_store = self.replay_store;
        }
        if self.limit.is_some() {
            c.limit = self.limit;
        }
        Ok((c, RunOptions { dry_run: self.dry_run }))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => tracing::Level::WARN,
        1 => tracing::Level::INFO,
        _ => tracing::Level::DEBUG,
    };
    tracing_subscriber::fmt().with_max_level(level).with_writer(std::io::stderr).init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Run(args) => run(args, None),
        Command::Record(args) => run(args, Some(ReplayMode::Record)),
        Command::Report { out, require_baseline, results } => {
            let bundle = cmd_report(&results, &out, ReportOptions { require_baseline })?;
            for w in &bundle.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { kind, path } => {
            let issues = cmd_validate(&path, kind)?;
            for issue in &issues {
                println!("{}: {issue}", path.display());
            }
            Ok(if issues.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
    }
}

fn run(args: RunArgs, mode: Option<ReplayMode>) -> Result<ExitCode, CliError> {
    let (mut config, opts) = args.resolve()?;
    if let Some(mode) = mode {
        config.replay_mode = mode;
    }
    let summary = cmd_run(&config, opts)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(stats) = summary.store_stats {
        eprintln!("store: {} hits, {} misses, {} backend calls", stats.hits, stats.misses, stats.inner_calls);
    }
    eprintln!("{} results, {} skipped", summary.n_results, summary.n_skipped);
    println!("{}", summary.out_dir.display());
    Ok(ExitCode::SUCCESS)
}
