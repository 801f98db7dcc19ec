//! Regenerates `fixtures/replay/store.jsonl` by recording every fixture config against
//! the simulated model.
//!
//! Run with `cargo run -p spp-cli --example build_fixtures` from the workspace root.

mod sim;

use std::path::Path;

use spp_cli::{run_with_backend, RunConfig, RunOptions};
use spp_core::backend::{MockBackend, ReplayMode};
use spp_core::tasks::load_dataset;

const CONFIGS: &[&str] = &[
    "configs/trivia_n5_fixture.json",
    "configs/trivia_n10_fixture.json",
    "configs/codenames_fixture.json",
    "configs/logic_fixture.json",
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let scratch = tempfile::tempdir()?;
    let mut store = None;
    for rel in CONFIGS {
        let mut config = RunConfig::load(&root.join(rel))?;
        let store_path = config.replay_store.clone().expect("fixture configs name a store");
        if store.as_ref() != Some(&store_path) {
            // Start from an empty store so stale entries never survive a template change.
            let _ = std::fs::remove_file(&store_path);
            store = Some(store_path);
        }
        config.replay_mode = ReplayMode::Record;
        config.output_dir = scratch.path().to_path_buf();
        let instances = load_dataset(&config.dataset_path, config.task, None)?;
        let model = sim::SimulatedModel::new(instances);
        let backend = MockBackend::new(move |b, p| model.respond(b, p));
        let summary = run_with_backend(&config, RunOptions::default(), Some(Box::new(backend)))?;
        println!("{rel}: {} results, {:?}", summary.n_results, summary.store_stats);
    }
    Ok(())
}
