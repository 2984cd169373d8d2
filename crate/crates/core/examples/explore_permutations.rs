//! Every ordering of a build, run with the checked engine.

use fwdbuild::cli::explore_spec;
use fwdbuild::{scenarios, RequiredMode};

fn main() -> fwdbuild::Result<()> {
    for (name, spec) in [("gcc", scenarios::gcc()), ("foo.c", scenarios::foo_c())] {
        let (reports, summary) = explore_spec(&spec, RequiredMode::Ever)?;
        println!("== {name}: {summary:?}");
        for r in reports {
            let order: Vec<_> = r.run.iter().flatten().map(|c| c.as_str()).collect();
            let what = match &r.hazard {
                Some(h) => format!("{} on {}", h.kind, h.file),
                None => format!("ok {}", r.fs_digest.unwrap_or_default()),
            };
            println!("  {:<90} {what}", order.join(" ; "));
        }
    }
    Ok(())
}
