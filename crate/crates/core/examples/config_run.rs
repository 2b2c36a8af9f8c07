//! Runs every TOML config in `examples/configs` and summarizes the manifests.

use std::path::Path;

use decowave::cli::{parse_config, run, UnknownKeys};

pub fn main() -> decowave::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let out = std::env::temp_dir().join("decowave-config-run");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
    paths.sort();
    for path in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")) {
        let text = std::fs::read_to_string(path)?;
        let cfg = parse_config(&text, &out, UnknownKeys::Reject)?;
        let result = run(&cfg)?;
        let failed = result.manifest.failed_invariants().len();
        println!(
            "{}: {} ({} invariant checks, {failed} failed) -> {}",
            path.file_name().unwrap().to_string_lossy(),
            cfg.kind.name(),
            result.manifest.invariants.len(),
            result.csv_path.display()
        );
    }
    Ok(())
}
