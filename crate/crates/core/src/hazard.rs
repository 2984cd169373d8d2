//! Hazard detection and the checked Rattle engine.
//!
//! A [`FileInfo`] log records, in execution order, which names each executed
//! command read and wrote. After a command runs its writes are compared with
//! the log (read-write and write-write hazards), then the extended log is
//! searched for a speculative write-before-read: an earlier entry wrote a
//! file that a later, required entry read, although the script does not
//! order the writer first.
//!
//! Whether a command counts as required is where [`RequiredMode`] matters.
//! `Ever` asks whether the script will eventually demand the command, which
//! catches every speculative hazard as soon as both commands have run.
//! `Prefix` asks whether everything ahead of it in the script has already
//! been logged, and only re-examines pairs involving the command that just
//! ran. A command that was speculated and later becomes required is then
//! never looked at again, so some hazards slip through.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::command::{
    check_disjoint, interpret, require_distinct, run, Build, CmdId, Oracle, TraceRecord,
};
use crate::engine::{should_run, EngineResult, Memory, Recording};
use crate::error::{Error, Result, Violation};
use crate::fs::{FileName, FileSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileInfoEntry {
    pub cmd: CmdId,
    pub reads: Vec<FileName>,
    pub writes: Vec<FileName>,
}

impl FileInfoEntry {
    pub fn from_trace(trace: &TraceRecord) -> Self {
        Self {
            cmd: trace.cmd.clone(),
            reads: trace.read_names().cloned().collect(),
            writes: trace.writes.names().cloned().collect(),
        }
    }
}

/// Execution log of (command, reads, writes), oldest first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FileInfo(Vec<FileInfoEntry>);

impl FileInfo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: FileInfoEntry) {
        self.0.push(entry);
    }

    pub fn entries(&self) -> &[FileInfoEntry] {
        &self.0
    }

    pub fn contains(&self, cmd: &CmdId) -> bool {
        self.0.iter().any(|e| &e.cmd == cmd)
    }

    pub fn cmds(&self) -> Build {
        self.0.iter().map(|e| e.cmd.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<FileInfoEntry> for FileInfo {
    fn from_iter<T: IntoIterator<Item = FileInfoEntry>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Hazard {
    /// `writer` wrote `file` after `reader` had read it.
    ReadWrite {
        writer: CmdId,
        reader: CmdId,
        file: FileName,
    },
    /// `writer` wrote `file` after `earlier` had written it.
    WriteWrite {
        writer: CmdId,
        earlier: CmdId,
        file: FileName,
    },
    /// `writer` ran before `reader` and wrote `file`, which the required
    /// `reader` then read, but the script does not put `writer` first.
    Speculative {
        writer: CmdId,
        reader: CmdId,
        file: FileName,
    },
}

impl Hazard {
    pub fn kind(&self) -> &'static str {
        match self {
            Hazard::ReadWrite { .. } => "read-write",
            Hazard::WriteWrite { .. } => "write-write",
            Hazard::Speculative { .. } => "speculative",
        }
    }

    /// The two commands involved: the later writer first for read-write and
    /// write-write hazards, and (writer, reader) for speculative ones.
    pub fn commands(&self) -> [&CmdId; 2] {
        match self {
            Hazard::ReadWrite { writer, reader, .. } => [writer, reader],
            Hazard::WriteWrite {
                writer, earlier, ..
            } => [writer, earlier],
            Hazard::Speculative { writer, reader, .. } => [writer, reader],
        }
    }

    pub fn file(&self) -> &FileName {
        match self {
            Hazard::ReadWrite { file, .. }
            | Hazard::WriteWrite { file, .. }
            | Hazard::Speculative { file, .. } => file,
        }
    }

    pub fn is_speculative(&self) -> bool {
        matches!(self, Hazard::Speculative { .. })
    }
}

impl fmt::Display for Hazard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.commands();
        write!(f, "{} hazard on `{}` ({a} / {b})", self.kind(), self.file())
    }
}

/// How required-ness of a command is decided for speculative hazards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RequiredMode {
    /// Required if the script ever demands it.
    #[default]
    Ever,
    /// Required once every script predecessor has been logged. Reproduces
    /// the missed-hazard behaviour; keep for regression checks only.
    Prefix,
}

impl RequiredMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RequiredMode::Ever => "ever",
            RequiredMode::Prefix => "prefix",
        }
    }
}

impl std::str::FromStr for RequiredMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ever" => Ok(RequiredMode::Ever),
            "prefix" => Ok(RequiredMode::Prefix),
            other => Err(Error::Format(format!("unknown required mode `{other}`"))),
        }
    }
}

pub fn detect_read_write(cmd: &CmdId, writes: &[FileName], info: &FileInfo) -> Option<Hazard> {
    info.entries().iter().find_map(|e| {
        writes
            .iter()
            .find(|w| e.reads.contains(w))
            .map(|w| Hazard::ReadWrite {
                writer: cmd.clone(),
                reader: e.cmd.clone(),
                file: w.clone(),
            })
    })
}

pub fn detect_write_write(cmd: &CmdId, writes: &[FileName], info: &FileInfo) -> Option<Hazard> {
    info.entries().iter().find_map(|e| {
        writes
            .iter()
            .find(|w| e.writes.contains(w))
            .map(|w| Hazard::WriteWrite {
                writer: cmd.clone(),
                earlier: e.cmd.clone(),
                file: w.clone(),
            })
    })
}

/// Whether `cmd` is required by the script `script`.
///
/// `ran` is the full set of commands the run will execute; only `Ever`
/// consults it.
pub fn is_required(
    cmd: &CmdId,
    script: &Build,
    mode: RequiredMode,
    info: &FileInfo,
    ran: &Build,
) -> bool {
    let Some(preds) = script.predecessors(cmd) else {
        return false;
    };
    match mode {
        RequiredMode::Prefix => preds.iter().all(|p| info.contains(p)),
        RequiredMode::Ever => preds.iter().all(|p| ran.contains(p)),
    }
}

/// Full scan of `info` for a speculative write-before-read.
///
/// Scan order: reader by log order, then writer over the earlier entries,
/// then file by the reader's read order.
pub fn detect_speculative(
    info: &FileInfo,
    script: &Build,
    ran: &Build,
    mode: RequiredMode,
) -> Option<Hazard> {
    speculative_scan(info, script, ran, mode, None)
}

/// Like [`detect_speculative`] but only considers pairs in which `cmd` is
/// the writer or the reader.
pub fn detect_speculative_involving(
    cmd: &CmdId,
    info: &FileInfo,
    script: &Build,
    ran: &Build,
    mode: RequiredMode,
) -> Option<Hazard> {
    speculative_scan(info, script, ran, mode, Some(cmd))
}

fn speculative_scan(
    info: &FileInfo,
    script: &Build,
    ran: &Build,
    mode: RequiredMode,
    involving: Option<&CmdId>,
) -> Option<Hazard> {
    let entries = info.entries();
    for (j, reader) in entries.iter().enumerate() {
        if !is_required(&reader.cmd, script, mode, info, ran) {
            continue;
        }
        for writer in &entries[..j] {
            if let Some(c) = involving {
                if &writer.cmd != c && &reader.cmd != c {
                    continue;
                }
            }
            if script.before(&writer.cmd, &reader.cmd) {
                continue;
            }
            if let Some(f) = reader.reads.iter().find(|f| writer.writes.contains(f)) {
                return Some(Hazard::Speculative {
                    writer: writer.cmd.clone(),
                    reader: reader.cmd.clone(),
                    file: f.clone(),
                });
            }
        }
    }
    None
}

/// Checks one executed command against the log, in the order write-write,
/// read-write, speculative. On success returns the extended log.
pub fn check_hazard(
    entry: FileInfoEntry,
    info: &FileInfo,
    script: &Build,
    ran: &Build,
    mode: RequiredMode,
) -> std::result::Result<FileInfo, Hazard> {
    if let Some(h) = detect_write_write(&entry.cmd, &entry.writes, info) {
        return Err(h);
    }
    if let Some(h) = detect_read_write(&entry.cmd, &entry.writes, info) {
        return Err(h);
    }
    let cmd = entry.cmd.clone();
    let mut next = info.clone();
    next.push(entry);
    let spec = match mode {
        RequiredMode::Ever => detect_speculative(&next, script, ran, mode),
        RequiredMode::Prefix => detect_speculative_involving(&cmd, &next, script, ran, mode),
    };
    match spec {
        Some(h) => Err(h),
        None => Ok(next),
    }
}

/// State threaded through the checked engine.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RattleState {
    pub fs: FileSystem,
    pub memory: Memory,
    pub info: FileInfo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// No hazard. `executed` is false when the command was skipped, in
    /// which case `state` equals the input state.
    Continue { state: RattleState, executed: bool },
    /// The command raised a hazard; none of its effects were applied.
    Hazard(Hazard),
}

/// One hazard-checked memoized step.
#[allow(clippy::too_many_arguments)]
pub fn run_w_error(
    oracle: &Oracle,
    cmd: &CmdId,
    script: &Build,
    ran: &Build,
    fs: &FileSystem,
    memory: &Memory,
    info: &FileInfo,
    mode: RequiredMode,
) -> Result<StepOutcome> {
    let state = RattleState {
        fs: fs.clone(),
        memory: memory.clone(),
        info: info.clone(),
    };
    if !should_run(cmd, memory, fs) {
        return Ok(StepOutcome::Continue {
            state,
            executed: false,
        });
    }
    let trace = interpret(oracle, cmd, fs)?;
    if let Some(file) = check_disjoint(&trace) {
        return Err(Error::Disjointness {
            cmd: cmd.clone(),
            file: file.clone(),
        });
    }
    match check_hazard(FileInfoEntry::from_trace(&trace), info, script, ran, mode) {
        Err(h) => Ok(StepOutcome::Hazard(h)),
        Ok(info) => {
            let mut memory = state.memory;
            memory.record(Recording::ReadsAndWrites.entry(&trace));
            Ok(StepOutcome::Continue {
                state: RattleState {
                    fs: fs.extend(&trace.writes),
                    memory,
                    info,
                },
                executed: true,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RattleOutcome {
    Success {
        result: EngineResult,
        info: FileInfo,
    },
    /// Stopped at the first hazard. `progress` is the state just before the
    /// offending command, `stopped_at` that command (`None` when the hazard
    /// was found after the last command).
    Hazard {
        hazard: Hazard,
        progress: EngineResult,
        info: FileInfo,
        stopped_at: Option<CmdId>,
    },
}

impl RattleOutcome {
    pub fn hazard(&self) -> Option<&Hazard> {
        match self {
            RattleOutcome::Hazard { hazard, .. } => Some(hazard),
            RattleOutcome::Success { .. } => None,
        }
    }

    pub fn success(&self) -> Option<&EngineResult> {
        match self {
            RattleOutcome::Success { result, .. } => Some(result),
            RattleOutcome::Hazard { .. } => None,
        }
    }
}

fn check_run_and_script(ran: &Build, script: &Build) -> Result<()> {
    require_distinct(ran)?;
    require_distinct(script)?;
    if !ran.is_permutation_of(script) {
        return Err(Violation::NotAPermutation.into());
    }
    Ok(())
}

/// Hazard-checked Rattle: executes `ran` against the script build `script`.
pub fn rattle(
    oracle: &Oracle,
    ran: &Build,
    script: &Build,
    fs: &FileSystem,
    memory: &Memory,
    mode: RequiredMode,
) -> Result<RattleOutcome> {
    check_run_and_script(ran, script)?;
    let mut state = RattleState {
        fs: fs.clone(),
        memory: memory.clone(),
        info: FileInfo::new(),
    };
    let mut executed = Vec::new();
    for cmd in ran {
        match run_w_error(
            oracle,
            cmd,
            script,
            ran,
            &state.fs,
            &state.memory,
            &state.info,
            mode,
        )? {
            StepOutcome::Continue {
                state: next,
                executed: ran_it,
            } => {
                state = next;
                if ran_it {
                    executed.push(cmd.clone());
                }
            }
            StepOutcome::Hazard(hazard) => {
                return Ok(RattleOutcome::Hazard {
                    hazard,
                    progress: EngineResult {
                        fs: state.fs,
                        memory: state.memory,
                        executed,
                    },
                    info: state.info,
                    stopped_at: Some(cmd.clone()),
                });
            }
        }
    }
    let result = EngineResult {
        fs: state.fs,
        memory: state.memory,
        executed,
    };
    if mode == RequiredMode::Ever {
        if let Some(hazard) = detect_speculative(&state.info, script, ran, mode) {
            return Ok(RattleOutcome::Hazard {
                hazard,
                progress: result,
                info: state.info,
                stopped_at: None,
            });
        }
    }
    Ok(RattleOutcome::Success {
        result,
        info: state.info,
    })
}

/// Runs every command of `ran` without memoization, checking hazards, to
/// decide whether the run is hazard free. Returns the complete log or the
/// first hazard.
pub fn hazard_scan(
    oracle: &Oracle,
    ran: &Build,
    script: &Build,
    fs: &FileSystem,
    mode: RequiredMode,
) -> Result<std::result::Result<FileInfo, Hazard>> {
    check_run_and_script(ran, script)?;
    let mut cur = fs.clone();
    let mut info = FileInfo::new();
    for cmd in ran {
        let (next, trace) = run(oracle, cmd, &cur)?;
        match check_hazard(FileInfoEntry::from_trace(&trace), &info, script, ran, mode) {
            Ok(extended) => info = extended,
            Err(h) => return Ok(Err(h)),
        }
        cur = next;
    }
    Ok(Ok(info))
}

/// Replays an externally recorded log. Each entry is checked against the
/// entries before it; `Ever` treats the commands present anywhere in the
/// log as the ones that will run.
pub fn check_log(entries: &[FileInfoEntry], script: &Build, mode: RequiredMode) -> Option<Hazard> {
    check_log_at(entries, script, mode).map(|(_, h)| h)
}

/// Like [`check_log`], also returning the index of the entry at which the
/// hazard was found.
pub fn check_log_at(
    entries: &[FileInfoEntry],
    script: &Build,
    mode: RequiredMode,
) -> Option<(usize, Hazard)> {
    let ran: Build = entries.iter().map(|e| e.cmd.clone()).collect();
    let mut info = FileInfo::new();
    for (i, entry) in entries.iter().enumerate() {
        match check_hazard(entry.clone(), &info, script, &ran, mode) {
            Ok(next) => info = next,
            Err(h) => return Some((i, h)),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn entry(cmd: &str, reads: &[&str], writes: &[&str]) -> FileInfoEntry {
        FileInfoEntry {
            cmd: cmd.into(),
            reads: reads.iter().map(|n| (*n).into()).collect(),
            writes: writes.iter().map(|n| (*n).into()).collect(),
        }
    }

    fn build(cmds: &[&str]) -> Build {
        cmds.iter().copied().collect()
    }

    fn names(ns: &[&str]) -> Vec<FileName> {
        ns.iter().map(|n| (*n).into()).collect()
    }

    #[test]
    fn read_write_examples() {
        let info: FileInfo = [entry("gcc -c foo.c", &["foo.c"], &["foo.o"])]
            .into_iter()
            .collect();
        assert_eq!(
            detect_read_write(&"echo X >> foo.c".into(), &names(&["foo.c"]), &info),
            Some(Hazard::ReadWrite {
                writer: "echo X >> foo.c".into(),
                reader: "gcc -c foo.c".into(),
                file: "foo.c".into(),
            })
        );
        assert_eq!(detect_read_write(&"w".into(), &[], &info), None);
        assert_eq!(detect_read_write(&"w".into(), &names(&["x"]), &info), None);
    }

    #[test]
    fn write_write_examples() {
        let info: FileInfo = [entry("a", &[], &["out"])].into_iter().collect();
        assert_eq!(
            detect_write_write(&"b".into(), &names(&["out"]), &info)
                .unwrap()
                .kind(),
            "write-write"
        );
        assert_eq!(
            detect_write_write(&"b".into(), &names(&["other"]), &info),
            None
        );
        assert_eq!(
            detect_write_write(&"a".into(), &names(&["out"]), &FileInfo::new()),
            None
        );
    }

    #[test]
    fn is_required_examples() {
        let bs = build(&["a", "b", "c"]);
        let only_c: FileInfo = [entry("c", &[], &[])].into_iter().collect();
        for mode in [RequiredMode::Prefix, RequiredMode::Ever] {
            assert!(is_required(
                &"a".into(),
                &bs,
                mode,
                &only_c,
                &build(&["c", "b", "a"])
            ));
            assert!(!is_required(
                &"z".into(),
                &bs,
                mode,
                &only_c,
                &build(&["c", "b", "a"])
            ));
        }
        let cb: FileInfo = [entry("c", &[], &[]), entry("b", &[], &[])]
            .into_iter()
            .collect();
        let br = build(&["c", "b", "a"]);
        assert!(!is_required(
            &"b".into(),
            &bs,
            RequiredMode::Prefix,
            &cb,
            &br
        ));
        assert!(is_required(&"b".into(), &bs, RequiredMode::Ever, &cb, &br));
    }

    #[test]
    fn speculative_stale_command() {
        // the stale compile is not part of the script any more
        let bs = build(&["gcc -c string.c", "gcc -c print.c", "link"]);
        let info: FileInfo = [
            entry("gcc -c file.c", &["file.c"], &["file.o"]),
            entry("gcc -c string.c", &["string.c"], &["string.o"]),
            entry("gcc -c print.c", &["print.c"], &["print.o"]),
            entry("link", &["file.o", "string.o", "print.o"], &["program"]),
        ]
        .into_iter()
        .collect();
        let ran = info.cmds();
        for mode in [RequiredMode::Ever, RequiredMode::Prefix] {
            assert_eq!(
                detect_speculative(&info, &bs, &ran, mode),
                Some(Hazard::Speculative {
                    writer: "gcc -c file.c".into(),
                    reader: "link".into(),
                    file: "file.o".into(),
                })
            );
        }
    }

    #[test]
    fn speculative_absent_for_in_order_runs() {
        let bs = build(&["a", "b"]);
        let info: FileInfo = [entry("a", &[], &["f"]), entry("b", &["f"], &["g"])]
            .into_iter()
            .collect();
        assert_eq!(
            detect_speculative(&info, &bs, &bs, RequiredMode::Ever),
            None
        );
    }

    #[test]
    fn speculative_bug_per_step() {
        let bs = build(&["a", "b", "c"]);
        let br = build(&["c", "b", "a"]);
        let steps = [
            entry("c", &[], &["f"]),
            entry("b", &["f"], &["b.out"]),
            entry("a", &["a.in"], &["a.out"]),
        ];
        let mut ever = None;
        let mut info = FileInfo::new();
        for e in steps.iter().cloned() {
            match check_hazard(e.clone(), &info, &bs, &br, RequiredMode::Ever) {
                Ok(next) => info = next,
                Err(h) => {
                    ever = Some((e.cmd.clone(), h));
                    break;
                }
            }
        }
        assert_eq!(
            ever,
            Some((
                "b".into(),
                Hazard::Speculative {
                    writer: "c".into(),
                    reader: "b".into(),
                    file: "f".into()
                }
            ))
        );
        let mut info = FileInfo::new();
        for e in steps.iter().cloned() {
            info =
                check_hazard(e, &info, &bs, &br, RequiredMode::Prefix).expect("prefix misses it");
        }
        // a full-log scan once b is required does see it
        assert!(detect_speculative(&info, &bs, &br, RequiredMode::Prefix).is_some());
    }

    #[test]
    fn check_order_write_write_first() {
        let info: FileInfo = [entry("a", &["f"], &["f2"]), entry("b", &[], &["f"])]
            .into_iter()
            .collect();
        let h = check_hazard(
            entry("c", &[], &["f"]),
            &info,
            &build(&["a", "b", "c"]),
            &build(&["a", "b", "c"]),
            RequiredMode::Ever,
        )
        .unwrap_err();
        assert_eq!(h.kind(), "write-write");
    }

    #[test]
    fn run_w_error_two_command_build() {
        let s = scenarios::foo_c();
        let cmds: Vec<_> = s.script.iter().cloned().collect();
        let mut info = FileInfo::new();
        let mut fs = s.files.clone();
        let mut memory = Memory::new();
        let first = run_w_error(
            &s.oracle,
            &cmds[0],
            &s.script,
            &s.script,
            &fs,
            &memory,
            &info,
            RequiredMode::Ever,
        )
        .unwrap();
        match first {
            StepOutcome::Continue { state, executed } => {
                assert!(executed);
                assert_eq!(state.info.len(), 1);
                fs = state.fs;
                memory = state.memory;
                info = state.info;
            }
            StepOutcome::Hazard(h) => panic!("unexpected {h}"),
        }
        let second = run_w_error(
            &s.oracle,
            &cmds[1],
            &s.script,
            &s.script,
            &fs,
            &memory,
            &info,
            RequiredMode::Ever,
        )
        .unwrap();
        assert!(matches!(
            second,
            StepOutcome::Hazard(Hazard::ReadWrite { .. })
        ));
        // skip path returns the state untouched
        let skipped = run_w_error(
            &s.oracle,
            &cmds[0],
            &s.script,
            &s.script,
            &fs,
            &memory,
            &info,
            RequiredMode::Ever,
        )
        .unwrap();
        assert_eq!(
            skipped,
            StepOutcome::Continue {
                state: RattleState { fs, memory, info },
                executed: false
            }
        );
    }

    #[test]
    fn rattle_worked_examples() {
        let gcc = scenarios::gcc();
        let out = rattle(
            &gcc.oracle,
            &gcc.script,
            &gcc.script,
            &gcc.files,
            &Memory::new(),
            RequiredMode::Ever,
        )
        .unwrap();
        let result = out.success().expect("gcc build is hazard free");
        let expected = crate::command::script(&gcc.oracle, &gcc.script, &gcc.files).unwrap();
        assert!(result.fs.equivalent(&expected));

        let foo = scenarios::foo_c();
        let out = rattle(
            &foo.oracle,
            &foo.script,
            &foo.script,
            &foo.files,
            &Memory::new(),
            RequiredMode::Ever,
        )
        .unwrap();
        assert_eq!(out.hazard().map(Hazard::kind), Some("read-write"));
        let RattleOutcome::Hazard { progress, .. } = out else {
            unreachable!()
        };
        // foo.c was not modified by the failing command
        assert_eq!(
            progress.fs.lookup(&"foo.c".into()),
            foo.files.lookup(&"foo.c".into())
        );
    }

    #[test]
    fn rattle_bug_modes() {
        let bug = scenarios::speculative_bug();
        let ran = bug.run.clone().unwrap();
        let ever = rattle(
            &bug.oracle,
            &ran,
            &bug.script,
            &bug.files,
            &Memory::new(),
            RequiredMode::Ever,
        )
        .unwrap();
        assert_eq!(
            ever.hazard(),
            Some(&Hazard::Speculative {
                writer: "c".into(),
                reader: "b".into(),
                file: "f".into()
            })
        );
        let prefix = rattle(
            &bug.oracle,
            &ran,
            &bug.script,
            &bug.files,
            &Memory::new(),
            RequiredMode::Prefix,
        )
        .unwrap();
        assert!(prefix.success().is_some());
    }

    #[test]
    fn hazard_scan_examples() {
        let gcc = scenarios::gcc();
        let info = hazard_scan(
            &gcc.oracle,
            &gcc.script,
            &gcc.script,
            &gcc.files,
            RequiredMode::Ever,
        )
        .unwrap()
        .unwrap();
        assert_eq!(info.len(), 4);
        assert_eq!(
            info.entries()[3].reads,
            names(&["file.o", "string.o", "print.o"])
        );
        let empty = hazard_scan(
            &Oracle::new(),
            &Build::default(),
            &Build::default(),
            &FileSystem::new(),
            RequiredMode::Ever,
        )
        .unwrap()
        .unwrap();
        assert!(empty.is_empty());
        let foo = scenarios::foo_c();
        let h = hazard_scan(
            &foo.oracle,
            &foo.script,
            &foo.script,
            &foo.files,
            RequiredMode::Ever,
        )
        .unwrap()
        .unwrap_err();
        assert_eq!(h.kind(), "read-write");
    }

    #[test]
    fn rattle_rejects_bad_builds() {
        let gcc = scenarios::gcc();
        let short: Build = gcc.script.iter().take(2).cloned().collect();
        assert!(matches!(
            rattle(
                &gcc.oracle,
                &short,
                &gcc.script,
                &gcc.files,
                &Memory::new(),
                RequiredMode::Ever
            ),
            Err(Error::Precondition(Violation::NotAPermutation))
        ));
        let dup = build(&["a", "a"]);
        assert!(matches!(
            rattle(
                &gcc.oracle,
                &dup,
                &dup,
                &gcc.files,
                &Memory::new(),
                RequiredMode::Ever
            ),
            Err(Error::Precondition(Violation::Duplicate(_)))
        ));
    }

    #[test]
    fn check_log_replays() {
        let bs = build(&["a", "b", "c"]);
        let log = [
            entry("c", &[], &["f"]),
            entry("b", &["f"], &["b.out"]),
            entry("a", &["a.in"], &["a.out"]),
        ];
        assert!(check_log(&log, &bs, RequiredMode::Ever)
            .unwrap()
            .is_speculative());
        assert_eq!(check_log(&log, &bs, RequiredMode::Prefix), None);
        assert_eq!(check_log(&[], &bs, RequiredMode::Ever), None);
    }
}
