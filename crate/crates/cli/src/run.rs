use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::Serialize;
use spp_core::backend::{record_replay_store, ChatBackend, HttpBackend, ReplayMode, StoreStats};
use spp_core::evaluation::{ReportBundle, ReportOptions};
use spp_core::model::{GenerationParams, Setting, Strategy, TaskInstance, TaskPayload};
use spp_core::strategies::{render_prompt, PromptTemplateSet};
use spp_core::tasks::{
    evaluate_instance, load_dataset, render_logic_task, render_spymaster_task, render_trivia_task, shuffle_questions,
    InstanceContext, InstanceResult, OutputFormat,
};
use spp_core::text::sha256_hex;
use tracing::{info, warn};

use crate::config::RunConfig;
use crate::{write_atomic, CliError};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Render prompts to `prompts.jsonl` without calling any backend.
    pub dry_run: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub run_id: String,
    pub out_dir: PathBuf,
    pub n_results: usize,
    pub n_skipped: usize,
    pub warnings: Vec<String>,
    pub store_stats: Option<StoreStats>,
}

/// Identity of a run: hash of the experimental settings plus dataset and template checksums.
///
/// Paths, the replay mode and the backend transport are left out so that recording and
/// replaying the same experiment land in the same directory.
pub fn run_id(config: &RunConfig, dataset_sha256: &str, templates: &PromptTemplateSet) -> String {
    #[derive(Serialize)]
    struct Identity<'a> {
        task: &'a spp_core::model::TaskKind,
        methods: Vec<String>,
        system_message_settings: &'a [Setting],
        params: &'a GenerationParams,
        seed: u64,
        shuffle_questions: bool,
        limit: Option<usize>,
        dataset_sha256: &'a str,
        template_checksums: &'a BTreeMap<String, String>,
    }
    let identity = Identity {
        task: &config.task,
        methods: config.methods.iter().map(|m| m.to_string()).collect(),
        system_message_settings: &config.system_message_settings,
        params: &config.params,
        seed: config.seed,
        shuffle_questions: config.shuffle_questions,
        limit: config.limit,
        dataset_sha256,
        template_checksums: templates.checksums(),
    };
    sha256_hex(&serde_json::to_vec(&identity).expect("identity serializes"))[..16].to_string()
}

/// Validates inputs, then runs the sweep against the backend the config describes.
pub fn cmd_run(config: &RunConfig, opts: RunOptions) -> Result<RunSummary, CliError> {
    run_with_backend(config, opts, None)
}

/// Like [`cmd_run`], with `inner` standing in for the HTTP client in record and passthrough modes.
pub fn run_with_backend(
    config: &RunConfig,
    opts: RunOptions,
    inner: Option<Box<dyn ChatBackend>>,
) -> Result<RunSummary, CliError> {
    config.validate()?;
    let templates = PromptTemplateSet::load(&config.templates_dir)?;
    let dataset_bytes = std::fs::read(&config.dataset_path)
        .map_err(|e| CliError::Config(format!("{}: {e}", config.dataset_path.display())))?;
    let dataset_sha = sha256_hex(&dataset_bytes);
    let mut instances = load_dataset(&config.dataset_path, config.task, config.expected_count)?;
    if let Some(limit) = config.limit {
        instances.truncate(limit);
    }
    if config.shuffle_questions {
        for (i, inst) in instances.iter_mut().enumerate() {
            if let TaskPayload::Trivia(t) = &inst.payload {
                inst.payload = TaskPayload::Trivia(shuffle_questions(t, config.seed.wrapping_add(i as u64)));
            }
        }
    }

    let id = run_id(config, &dataset_sha, &templates);
    let out_dir = config.output_dir.join(&id);
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    write_atomic(&out_dir.join("run.json"), &run_manifest(config, &id, &dataset_sha, &templates))?;

    let mut jobs: Vec<(Strategy, Setting, &TaskInstance)> = Vec::new();
    for method in &config.methods {
        for setting in &config.system_message_settings {
            jobs.extend(instances.iter().map(|inst| (*method, *setting, inst)));
        }
    }

    if opts.dry_run {
        write_prompts(&out_dir, &jobs, &templates, &config.params)?;
        return Ok(RunSummary {
            run_id: id,
            out_dir,
            n_results: 0,
            n_skipped: 0,
            warnings: Vec::new(),
            store_stats: None,
        });
    }

    let mut store = None;
    let backend: Box<dyn ChatBackend> = match config.replay_mode {
        ReplayMode::Passthrough => inner.map_or_else(http_backend(config), Ok)?,
        mode => {
            let inner = match mode {
                ReplayMode::Replay => None,
                _ => Some(inner.map_or_else(http_backend(config), Ok)?),
            };
            let path = config.replay_store.as_ref().expect("validated");
            let s = std::sync::Arc::new(record_replay_store(mode, path, inner)?);
            store = Some(s.clone());
            Box::new(s)
        }
    };

    let results = execute(&jobs, backend.as_ref(), &templates, config, &out_dir.join("results.jsonl"))?;
    let n_skipped = results.iter().filter(|r| r.skipped).count();
    let bundle = ReportBundle::from_results(&results, ReportOptions::default())?;
    for (name, contents) in bundle.files() {
        write_atomic(&out_dir.join(name), contents)?;
    }
    for w in &bundle.warnings {
        warn!("{w}");
    }
    let store_stats = store.map(|s| s.stats());
    info!(run_id = %id, results = results.len(), skipped = n_skipped, ?store_stats, "run finished");
    Ok(RunSummary { run_id: id, out_dir, n_results: results.len(), n_skipped, warnings: bundle.warnings, store_stats })
}

fn http_backend(config: &RunConfig) -> impl FnOnce() -> Result<Box<dyn ChatBackend>, CliError> + '_ {
    move || {
        let mut backend_config = config.backend.clone();
        backend_config.model_name = config.params.model_name.clone();
        Ok(Box::new(HttpBackend::from_env(backend_config)?) as Box<dyn ChatBackend>)
    }
}

/// Evaluates every job on a bounded worker pool, appending to `results_path` in job order.
fn execute(
    jobs: &[(Strategy, Setting, &TaskInstance)],
    backend: &dyn ChatBackend,
    templates: &PromptTemplateSet,
    config: &RunConfig,
    results_path: &Path,
) -> Result<Vec<InstanceResult>, CliError> {
    let params: BTreeMap<Setting, GenerationParams> =
        Setting::BOTH.into_iter().map(|s| (s, config.params.for_setting(s))).collect();
    let file = File::create(results_path).map_err(|e| CliError::Io(format!("{}: {e}", results_path.display())))?;
    let mut writer = BufWriter::new(file);
    let workers = config.backend.max_parallel_requests.min(jobs.len()).max(1);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, InstanceResult)>();

    let mut results = Vec::with_capacity(jobs.len());
    std::thread::scope(|scope| -> Result<(), CliError> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let params = &params;
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                let Some((method, setting, instance)) = jobs.get(idx) else { break };
                let ctx = InstanceContext { backend, templates, params: &params[setting], setting: *setting };
                let result = evaluate_instance(instance, *method, &ctx).unwrap_or_else(|e| {
                    warn!(instance = %instance.id, method = %method, error = %e, "instance skipped");
                    InstanceResult::failed(instance, *method, *setting, e.to_string())
                });
                if tx.send((idx, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        // Completions arrive out of order; hold them until their predecessors are written.
        let mut pending: BTreeMap<usize, InstanceResult> = BTreeMap::new();
        for (idx, result) in rx {
            pending.insert(idx, result);
            while let Some(result) = pending.remove(&results.len()) {
                let line = serde_json::to_string(&result).expect("result serializes");
                writeln!(writer, "{line}")
                    .and_then(|_| writer.flush())
                    .map_err(|e| CliError::Io(format!("{}: {e}", results_path.display())))?;
                results.push(result);
            }
        }
        Ok(())
    })?;
    Ok(results)
}

fn write_prompts(
    out_dir: &Path,
    jobs: &[(Strategy, Setting, &TaskInstance)],
    templates: &PromptTemplateSet,
    params: &GenerationParams,
) -> Result<(), CliError> {
    let mut out = String::new();
    for (method, setting, instance) in jobs {
        // The guesser prompt depends on the spymaster's hint, so only first calls are rendered.
        let (task_text, format) = match &instance.payload {
            TaskPayload::Trivia(t) => (render_trivia_task(t), OutputFormat::TriviaStory),
            TaskPayload::Codenames(c) => (render_spymaster_task(c), OutputFormat::CodenamesHint),
            TaskPayload::LogicPuzzle(l) => (render_logic_task(l), OutputFormat::HouseNumber),
        };
        let bundle = render_prompt(*method, &instance.id, &task_text, format, templates, &params.for_setting(*setting))
            .map_err(|e| CliError::Config(e.to_string()))?;
        #[derive(Serialize)]
        struct Line<'a> {
            setting: Setting,
            #[serde(flatten)]
            bundle: &'a spp_core::model::PromptBundle,
        }
        out.push_str(&serde_json::to_string(&Line { setting: *setting, bundle: &bundle }).expect("serializes"));
        out.push('\n');
    }
    write_atomic(&out_dir.join("prompts.jsonl"), &out)
}

fn run_manifest(config: &RunConfig, id: &str, dataset_sha: &str, templates: &PromptTemplateSet) -> String {
    let value = serde_json::json!({
        "run_id": id,
        "config": config,
        "dataset_sha256": dataset_sha,
        "template_checksums": templates.checksums(),
    });
    let mut s = serde_json::to_string_pretty(&value).expect("manifest serializes");
    s.push('\n');
    s
}
