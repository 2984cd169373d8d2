//! The four subcommands of the `fwdbuild` binary, as plain functions.
//!
//! Each returns the text for standard output and standard error together
//! with the process exit code: 0 ok, 1 parse or internal error, 2 hazard,
//! 3 precondition violation.

use std::path::Path;

use crate::command::{script, Build, CmdId};
use crate::engine::{fabricate, rattle_unchecked, EngineResult, Memory};
use crate::error::{Error, Result};
use crate::format::{
    to_canonical_json, BuildSpec, Engine, Report, StateFile, TraceLog, EXIT_ERROR, EXIT_OK,
    EXIT_VIOLATION,
};
use crate::fs::FileSystem;
use crate::harness::{check_theorem, permutations, GenParams, Theorem, MAX_PERMUTED_LEN};
use crate::hazard::{check_log_at, hazard_scan, rattle, Hazard, RattleOutcome, RequiredMode};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn line(&mut self, text: impl AsRef<str>) {
        self.stdout.push_str(text.as_ref());
        self.stdout.push('\n');
    }

    fn report(report: &Report) -> Self {
        let mut out = Output {
            code: report.exit_code(),
            ..Output::default()
        };
        out.line(report.to_json());
        out
    }

    fn error(err: &Error) -> Self {
        Output {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code: EXIT_ERROR,
        }
    }
}

/// Converts an engine error into a violation report when it is one, and
/// into an exit-1 error otherwise.
fn failure(err: Error) -> Output {
    match err.violation() {
        Some(v) => Output::report(&Report::violation(v.kind(), v.to_string())),
        None => Output::error(&err),
    }
}

fn load_spec(path: &Path) -> std::result::Result<BuildSpec, Output> {
    let text = std::fs::read_to_string(path).map_err(|e| Output::error(&e.into()))?;
    let spec = BuildSpec::from_json(&text).map_err(|e| Output::error(&e))?;
    spec.validate()
        .map_err(|v| Output::report(&Report::violation(v.kind(), v.to_string())))?;
    Ok(spec)
}

fn load_state(path: Option<&Path>, engine: Engine) -> Result<Option<StateFile>> {
    let Some(path) = path.filter(|p| p.exists()) else {
        return Ok(None);
    };
    let state = StateFile::from_json(&std::fs::read_to_string(path)?)?;
    state.check_engine(engine)?;
    Ok(Some(state))
}

fn save_state(path: &Path, state: &StateFile) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, state.to_json()?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Commands before `stop` (or all of `ran`) that did not execute.
fn skipped_before(ran: &Build, executed: &[CmdId], stop: Option<&CmdId>) -> Vec<CmdId> {
    ran.iter()
        .take_while(|c| Some(*c) != stop)
        .filter(|c| !executed.contains(c))
        .cloned()
        .collect()
}

fn hazard_report(
    hazard: &Hazard,
    ran: &Build,
    progress: &EngineResult,
    stop: Option<&CmdId>,
) -> Report {
    Report::hazard(
        hazard,
        progress.executed.clone(),
        skipped_before(ran, &progress.executed, stop),
        Some(&progress.fs),
    )
}

/// `fwdbuild run`: runs one engine over a build spec, optionally resuming
/// from and updating a state file.
pub fn run(
    spec_path: &Path,
    engine: Engine,
    state_path: Option<&Path>,
    mode: RequiredMode,
) -> Output {
    let spec = match load_spec(spec_path) {
        Ok(s) => s,
        Err(out) => return out,
    };
    let state = match load_state(state_path, engine) {
        Ok(s) => s,
        Err(e) => return Output::error(&e),
    };
    let (fs, memory) = match state {
        // sources listed in the build spec take precedence over the saved tree
        Some(st) => (overlay(&st.fs, &spec.files), st.memory),
        None => (spec.files.clone(), Memory::new()),
    };
    let ran = spec.ran();
    let result = match engine {
        Engine::Script => script(&spec.oracle, ran, &fs).map(|fs| EngineResult {
            fs,
            memory: Memory::new(),
            executed: ran.cmds().to_vec(),
        }),
        Engine::Fabricate => fabricate(&spec.oracle, ran, &fs, &memory),
        Engine::RattleUnchecked => rattle_unchecked(&spec.oracle, ran, &fs, &memory),
        Engine::Rattle => match rattle(&spec.oracle, ran, &spec.script, &fs, &memory, mode) {
            Ok(RattleOutcome::Success { result, .. }) => Ok(result),
            Ok(RattleOutcome::Hazard {
                hazard,
                progress,
                stopped_at,
                ..
            }) => {
                return Output::report(&hazard_report(
                    &hazard,
                    ran,
                    &progress,
                    stopped_at.as_ref(),
                ));
            }
            Err(e) => Err(e),
        },
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    if let (Some(path), Some(_)) = (state_path, engine.recording()) {
        let state = StateFile {
            engine,
            fs: result.fs.clone(),
            memory: result.memory.clone(),
        };
        if let Err(e) = save_state(path, &state) {
            return Output::error(&e);
        }
    }
    let skipped = result.skipped(ran);
    Output::report(&Report::ok(result.executed, skipped, Some(&result.fs)))
}

/// `fwdbuild check-trace`: replays an access log through the hazard
/// detectors.
pub fn check_trace(trace_path: &Path, mode: RequiredMode) -> Output {
    let log = match std::fs::read_to_string(trace_path)
        .map_err(Error::from)
        .and_then(|t| TraceLog::parse(&t))
    {
        Ok(l) => l,
        Err(e) => return Output::error(&e),
    };
    let entries = log.entries();
    let report = match check_log_at(&entries, &log.script_order, mode) {
        None => Report::ok(
            entries.iter().map(|e| e.cmd.clone()).collect(),
            Vec::new(),
            None,
        ),
        Some((at, hazard)) => Report::hazard(
            &hazard,
            entries[..at].iter().map(|e| e.cmd.clone()).collect(),
            Vec::new(),
            None,
        ),
    };
    Output::report(&report)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExploreSummary {
    pub permutations: usize,
    pub ok: usize,
    pub hazard: usize,
    pub violation: usize,
    /// The script order itself has a read-write or write-write hazard.
    pub script_hazard: bool,
    /// Every permutation had a script hazard, a run hazard, or the script's
    /// result.
    pub trichotomy: bool,
}

/// `fwdbuild explore`: runs the checked engine on every ordering of the
/// script from the build spec's initial files and empty memory.
pub fn explore(spec_path: &Path, mode: RequiredMode) -> Output {
    let spec = match load_spec(spec_path) {
        Ok(s) => s,
        Err(out) => return out,
    };
    if spec.script.len() > MAX_PERMUTED_LEN {
        let err = Error::BuildTooLarge(spec.script.len());
        return Output::report(&Report::violation("build-too-large", err.to_string()));
    }
    match explore_spec(&spec, mode) {
        Ok((reports, summary)) => {
            let mut out = Output::default();
            for r in &reports {
                out.line(r.to_json());
            }
            let line = serde_json::json!({ "summary": summary });
            out.line(to_canonical_json(&line).expect("summary serializes"));
            out.code = if summary.trichotomy {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            };
            out
        }
        Err(e) => failure(e),
    }
}

/// The per-permutation reports and summary behind [`explore`].
pub fn explore_spec(spec: &BuildSpec, mode: RequiredMode) -> Result<(Vec<Report>, ExploreSummary)> {
    let bs = &spec.script;
    let o = &spec.oracle;
    let expected = script(o, bs, &spec.files)?;
    let script_hazard = matches!(
        hazard_scan(o, bs, bs, &spec.files, RequiredMode::Ever)?,
        Err(Hazard::ReadWrite { .. } | Hazard::WriteWrite { .. })
    );
    let mut summary = ExploreSummary {
        script_hazard,
        trichotomy: true,
        ..ExploreSummary::default()
    };
    let mut reports = Vec::new();
    for br in permutations(bs)? {
        summary.permutations += 1;
        let mut report = match rattle(o, &br, bs, &spec.files, &Memory::new(), mode) {
            Ok(RattleOutcome::Success { result, .. }) => {
                summary.ok += 1;
                if !script_hazard && !result.fs.equivalent(&expected) {
                    summary.trichotomy = false;
                }
                let skipped = result.skipped(&br);
                Report::ok(result.executed, skipped, Some(&result.fs))
            }
            Ok(RattleOutcome::Hazard {
                hazard,
                progress,
                stopped_at,
                ..
            }) => {
                summary.hazard += 1;
                hazard_report(&hazard, &br, &progress, stopped_at.as_ref())
            }
            Err(e) => match e.violation() {
                Some(v) => {
                    summary.violation += 1;
                    Report::violation(v.kind(), v.to_string())
                }
                None => return Err(e),
            },
        };
        report.run = Some(br);
        reports.push(report);
    }
    Ok((reports, summary))
}

/// `fwdbuild verify`: checks every named statement (or just `only`) over
/// generated builds, one verdict line each.
pub fn verify(params: &GenParams, only: Option<&str>) -> Output {
    let theorems: Vec<Theorem> = match only {
        Some(name) => match name.parse() {
            Ok(t) => vec![t],
            Err(e) => return Output::error(&e),
        },
        None => Theorem::ALL.to_vec(),
    };
    let mut out = Output::default();
    for t in theorems {
        match check_theorem(t, params) {
            Ok(v) => {
                out.line(to_canonical_json(&v).expect("verdicts serialize"));
                out.stderr.push_str(&v.summary());
                out.stderr.push('\n');
                if v.gating && !v.passed {
                    out.code = EXIT_ERROR;
                }
            }
            Err(e) => return Output::error(&e),
        }
    }
    out
}

/// `files` written over `fs`.
pub fn overlay(fs: &FileSystem, files: &FileSystem) -> FileSystem {
    files.iter().fold(fs.clone(), |acc, (n, c)| {
        acc.with(n.clone(), Some(c.clone()))
    })
}
