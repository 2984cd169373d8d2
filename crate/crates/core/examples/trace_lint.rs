//! Checking access logs recorded elsewhere.
//!
//! Pass a path to a JSON-lines trace to check it; with no argument the
//! bundled traces are checked.

use std::path::PathBuf;

use fwdbuild::format::TraceLog;
use fwdbuild::hazard::check_log;
use fwdbuild::RequiredMode;

fn main() -> fwdbuild::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs");
    let paths: Vec<PathBuf> = match std::env::args().nth(1) {
        Some(p) => vec![p.into()],
        None => vec![
            dir.join("stale_compile.trace.jsonl"),
            dir.join("speculative_bug.trace.jsonl"),
        ],
    };
    for path in paths {
        let log = TraceLog::parse(&std::fs::read_to_string(&path)?)?;
        println!("{}", path.display());
        for mode in [RequiredMode::Ever, RequiredMode::Prefix] {
            match check_log(&log.entries(), &log.script_order, mode) {
                Some(h) => println!("  {:<6} {h}", mode.as_str()),
                None => println!("  {:<6} clean", mode.as_str()),
            }
        }
    }
    Ok(())
}
