//! Small hand-written builds used by the examples, tests and CLI samples.

use crate::command::{Build, CmdId, CommandProgram, Expr, Oracle, Step};
use crate::format::{BuildSpec, TraceLine, TraceLog};

fn compile(src: &str, obj: &str) -> CommandProgram {
    CommandProgram::new(vec![
        Step::read(src, "src"),
        Step::write(
            obj,
            Expr::Concat(vec![Expr::lit("obj("), Expr::var("src"), Expr::lit(")")]),
        ),
    ])
}

/// Three compiles and a link.
pub fn gcc() -> BuildSpec {
    let link = "gcc -o program file.o string.o print.o";
    let oracle: Oracle = [
        (CmdId::from("gcc -c file.c"), compile("file.c", "file.o")),
        (
            CmdId::from("gcc -c string.c"),
            compile("string.c", "string.o"),
        ),
        (CmdId::from("gcc -c print.c"), compile("print.c", "print.o")),
        (
            CmdId::from(link),
            CommandProgram::new(vec![
                Step::read("file.o", "a"),
                Step::read("string.o", "b"),
                Step::read("print.o", "c"),
                Step::write(
                    "program",
                    Expr::Concat(vec![
                        Expr::lit("exe["),
                        Expr::var("a"),
                        Expr::lit(","),
                        Expr::var("b"),
                        Expr::lit(","),
                        Expr::var("c"),
                        Expr::lit("]"),
                    ]),
                ),
            ]),
        ),
    ]
    .into_iter()
    .collect();
    BuildSpec {
        files: [
            ("file.c", "int main"),
            ("string.c", "char *s"),
            ("print.c", "void p"),
        ]
        .into_iter()
        .collect(),
        oracle,
        script: ["gcc -c file.c", "gcc -c string.c", "gcc -c print.c", link]
            .into_iter()
            .collect(),
        run: None,
    }
}

/// A compile followed by a command that rewrites the compiled source.
pub fn foo_c() -> BuildSpec {
    let oracle: Oracle = [
        (CmdId::from("gcc -c foo.c"), compile("foo.c", "foo.o")),
        (
            CmdId::from("echo X >> foo.c"),
            // writes truncate, so this never reads foo.c
            CommandProgram::new(vec![Step::write("foo.c", Expr::lit("X"))]),
        ),
    ]
    .into_iter()
    .collect();
    BuildSpec {
        files: [("foo.c", "int foo")].into_iter().collect(),
        oracle,
        script: ["gcc -c foo.c", "echo X >> foo.c"].into_iter().collect(),
        run: None,
    }
}

/// Script `[a, b, c]` run as `[c, b, a]`: `c` writes `f`, which `b` reads.
/// The hazard is caught with [`RequiredMode::Ever`] but missed with
/// [`RequiredMode::Prefix`].
///
/// [`RequiredMode::Ever`]: crate::hazard::RequiredMode::Ever
/// [`RequiredMode::Prefix`]: crate::hazard::RequiredMode::Prefix
pub fn speculative_bug() -> BuildSpec {
    let oracle: Oracle = [
        (
            CmdId::from("a"),
            CommandProgram::new(vec![
                Step::read("a.in", "x"),
                Step::write("a.out", Expr::var("x")),
            ]),
        ),
        (
            CmdId::from("b"),
            CommandProgram::new(vec![
                Step::read("f", "x"),
                Step::write(
                    "b.out",
                    Expr::Concat(vec![Expr::lit("saw:"), Expr::var("x")]),
                ),
            ]),
        ),
        (
            CmdId::from("c"),
            CommandProgram::new(vec![Step::write("f", Expr::lit("from-c"))]),
        ),
    ]
    .into_iter()
    .collect();
    BuildSpec {
        files: [("a.in", "1")].into_iter().collect(),
        oracle,
        script: ["a", "b", "c"].into_iter().collect(),
        run: Some(["c", "b", "a"].into_iter().collect()),
    }
}

fn line(cmd: &str, reads: &[&str], writes: &[&str]) -> TraceLine {
    TraceLine {
        cmd: cmd.into(),
        reads: reads.iter().map(|n| (*n).into()).collect(),
        writes: writes.iter().map(|n| (*n).into()).collect(),
    }
}

/// A stale `gcc -c file.c`, no longer in the script, was speculated and
/// wrote `file.o` before the link read it.
pub fn stale_compile_trace() -> TraceLog {
    TraceLog {
        script_order: [
            "gcc -c string.c",
            "gcc -c print.c",
            "gcc -o program file.o string.o print.o",
        ]
        .into_iter()
        .collect(),
        records: vec![
            line("gcc -c file.c", &["file.c"], &["file.o"]),
            line("gcc -c string.c", &["string.c"], &["string.o"]),
            line("gcc -c print.c", &["print.c"], &["print.o"]),
            line(
                "gcc -o program file.o string.o print.o",
                &["file.o", "string.o", "print.o"],
                &["program"],
            ),
        ],
    }
}

/// The [`speculative_bug`] run as an access log.
pub fn speculative_bug_trace() -> TraceLog {
    TraceLog {
        script_order: ["a", "b", "c"].into_iter().collect(),
        records: vec![
            line("c", &[], &["f"]),
            line("b", &["f"], &["b.out"]),
            line("a", &["a.in"], &["a.out"]),
        ],
    }
}

/// Restricts a spec to the given commands, keeping their relative order in
/// both the script and the run.
pub fn restrict(spec: &BuildSpec, keep: &[&str]) -> BuildSpec {
    let keep: Vec<CmdId> = keep.iter().map(|c| CmdId::from(*c)).collect();
    let filter = |b: &Build| -> Build { b.iter().filter(|c| keep.contains(c)).cloned().collect() };
    BuildSpec {
        files: spec.files.clone(),
        oracle: spec
            .oracle
            .iter()
            .filter(|(c, _)| keep.contains(c))
            .map(|(c, p)| (c.clone(), p.clone()))
            .collect(),
        script: filter(&spec.script),
        run: spec.run.as_ref().map(filter),
    }
}
