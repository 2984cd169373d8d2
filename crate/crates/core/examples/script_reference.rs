//! Command programs, their traces, and the reference semantics of a build.
//!
//! Run with `cargo run -p fwdbuild --example script_reference`.

use fwdbuild::command::{interpret, script, Expr, Step, Test};
use fwdbuild::{scenarios, CmdId, CommandProgram, FileSystem, Oracle};

fn main() -> fwdbuild::Result<()> {
    let spec = scenarios::gcc();

    for cmd in &spec.script {
        let trace = interpret(&spec.oracle, cmd, &spec.files)?;
        let reads: Vec<_> = trace.read_names().map(|n| n.as_str()).collect();
        let writes: Vec<_> = trace.writes.names().map(|n| n.as_str()).collect();
        println!("{cmd:<40} reads {reads:?} writes {writes:?}");
    }

    let out = script(&spec.oracle, &spec.script, &spec.files)?;
    println!("\nafter the script:");
    for (name, content) in out.iter() {
        println!("  {name} = {content}");
    }

    // A branching command: the file read decides what gets written.
    let configure = CommandProgram::new(vec![
        Step::read("config", "cfg"),
        Step::branch(
            "cfg",
            Test::Eq("debug".into()),
            vec![Step::write("flags", Expr::lit("-O0 -g"))],
            vec![Step::write("flags", Expr::digest(Expr::var("cfg")))],
        ),
    ]);
    let oracle: Oracle = [(CmdId::from("configure"), configure)]
        .into_iter()
        .collect();
    for cfg in ["debug", "release"] {
        let fs: FileSystem = [("config", cfg)].into_iter().collect();
        let trace = interpret(&oracle, &"configure".into(), &fs)?;
        let flags = trace.writes.get(&"flags".into()).unwrap();
        println!("config={cfg:<8} flags={flags}");
    }
    Ok(())
}
