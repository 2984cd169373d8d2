//! Read-write and write-write hazards caught by the checked engine.

use fwdbuild::command::{Expr, Step};
use fwdbuild::{rattle, scenarios, Build, CmdId, CommandProgram, Memory, Oracle, RequiredMode};

fn main() -> fwdbuild::Result<()> {
    // compile foo.c, then overwrite it
    let spec = scenarios::foo_c();
    let out = rattle(
        &spec.oracle,
        &spec.script,
        &spec.script,
        &spec.files,
        &Memory::new(),
        RequiredMode::Ever,
    )?;
    match out.hazard() {
        Some(h) => println!("foo.c build: {} ({})", h, h.kind()),
        None => println!("foo.c build: ok"),
    }

    // two commands writing the same output
    let oracle: Oracle = ["gen-a", "gen-b"]
        .into_iter()
        .map(|c| {
            let prog = CommandProgram::new(vec![Step::write("out.h", Expr::lit(c))]);
            (CmdId::from(c), prog)
        })
        .collect();
    let b: Build = ["gen-a", "gen-b"].into_iter().collect();
    let out = rattle(
        &oracle,
        &b,
        &b,
        &Default::default(),
        &Memory::new(),
        RequiredMode::Ever,
    )?;
    if let Some(h) = out.hazard() {
        println!("double write: {} ({})", h, h.kind());
    }

    let gcc = scenarios::gcc();
    let out = rattle(
        &gcc.oracle,
        &gcc.script,
        &gcc.script,
        &gcc.files,
        &Memory::new(),
        RequiredMode::Ever,
    )?;
    println!(
        "gcc build: {}",
        if out.success().is_some() {
            "ok"
        } else {
            "hazard"
        }
    );
    Ok(())
}
