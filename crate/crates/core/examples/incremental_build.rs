//! Rebuilding after an edit with the two memoizing engines.
//!
//! Fabricate remembers what each command read; unchecked Rattle also
//! remembers what it wrote, so it notices when an output was deleted.

use fwdbuild::{fabricate, rattle_unchecked, scenarios, script, CmdId, Memory};

fn names(cmds: &[CmdId]) -> Vec<&str> {
    cmds.iter().map(|c| c.as_str()).collect()
}

fn main() -> fwdbuild::Result<()> {
    let spec = scenarios::gcc();
    let (o, b) = (&spec.oracle, &spec.script);

    let first = rattle_unchecked(o, b, &spec.files, &Memory::new())?;
    println!("clean build ran {} commands", first.executed.len());

    let again = rattle_unchecked(o, b, &first.fs, &first.memory)?;
    println!("no-op rebuild ran {:?}", names(&again.executed));

    let edited = first.fs.with("string.c".into(), Some("char *t".into()));
    let after_edit = rattle_unchecked(o, b, &edited, &first.memory)?;
    println!(
        "after editing string.c ran {:?}",
        names(&after_edit.executed)
    );
    assert!(after_edit.fs.equivalent(&script(o, b, &edited)?));

    // delete an object file
    let deleted = first.fs.with("print.o".into(), None);
    let fab_first = fabricate(o, b, &spec.files, &Memory::new())?;
    let fab = fabricate(o, b, &deleted, &fab_first.memory)?;
    let rat = rattle_unchecked(o, b, &deleted, &first.memory)?;
    println!("after deleting print.o:");
    for (engine, r) in [("fabricate", &fab), ("rattle", &rat)] {
        let obj =
            r.fs.lookup(&"print.o".into())
                .map_or("<missing>", |c| c.as_str());
        println!(
            "  {engine:<9} ran {:?}, print.o = {obj}",
            names(&r.executed)
        );
    }
    Ok(())
}
