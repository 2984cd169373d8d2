//! On-disk formats: build specs, persisted engine state, access logs and
//! reports.
//!
//! Everything is UTF-8 JSON with object keys in sorted order, so identical
//! values always serialize to identical bytes. Access logs are JSON lines: a
//! header object carrying `scriptOrder`, then one record per line.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::command::{digest, Build, CmdId, CommandProgram, Oracle};
use crate::engine::{Memory, Recording};
use crate::error::{Error, Result, Violation};
use crate::fs::{FileName, FileSystem};
use crate::hazard::{FileInfoEntry, Hazard};

/// Serializes `value` as compact JSON with sorted object keys.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(&serde_json::to_value(value)?)?)
}

/// Pretty-printed variant of [`to_canonical_json`].
pub fn to_pretty_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&serde_json::to_value(value)?)?)
}

/// Digest of the canonical serialization of `fs`.
pub fn fs_digest(fs: &FileSystem) -> String {
    let json = to_canonical_json(fs).expect("file systems always serialize");
    digest(json.as_bytes())
}

/// A declarative build: initial files, one program per command, the script
/// order and optionally a different order to actually run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildSpec {
    pub files: FileSystem,
    pub oracle: Oracle,
    pub script: Build,
    pub run: Option<Build>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(default)]
    files: FileSystem,
    commands: Vec<RawCommand>,
    script: Build,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    run: Option<Build>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommand {
    id: CmdId,
    program: CommandProgram,
}

impl BuildSpec {
    /// Parses a spec. Structural problems (bad JSON, a command declared
    /// twice, a program using an unbound variable) are errors; build-order
    /// problems are left to [`BuildSpec::validate`].
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        let mut seen = BTreeSet::new();
        let mut oracle = Oracle::new();
        for c in raw.commands {
            if !seen.insert(c.id.clone()) {
                return Err(Error::Format(format!("command `{}` declared twice", c.id)));
            }
            if let Some(var) = c.program.unbound_variable() {
                return Err(Error::UnboundVar { cmd: c.id, var });
            }
            oracle.insert(c.id, c.program);
        }
        Ok(Self {
            files: raw.files,
            oracle,
            script: raw.script,
            run: raw.run,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawSpec {
            files: self.files.clone(),
            commands: self
                .oracle
                .iter()
                .map(|(id, program)| RawCommand {
                    id: id.clone(),
                    program: program.clone(),
                })
                .collect(),
            script: self.script.clone(),
            run: self.run.clone(),
        };
        to_pretty_json(&raw)
    }

    /// The build to execute: `run` if given, else the script.
    pub fn ran(&self) -> &Build {
        self.run.as_ref().unwrap_or(&self.script)
    }

    /// Checks the build-order preconditions that can be decided without
    /// running anything.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        if let Some(c) = self.script.first_duplicate() {
            return Err(Violation::Duplicate(c.clone()));
        }
        if let Some(run) = &self.run {
            if let Some(c) = run.first_duplicate() {
                return Err(Violation::Duplicate(c.clone()));
            }
            if !run.is_permutation_of(&self.script) {
                return Err(Violation::NotAPermutation);
            }
        }
        if let Some(c) = self.script.iter().find(|c| !self.oracle.defines(c)) {
            return Err(Violation::UnknownCommand(c.clone()));
        }
        Ok(())
    }
}

/// Which executor to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Script,
    Fabricate,
    RattleUnchecked,
    Rattle,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Script => "script",
            Engine::Fabricate => "fabricate",
            Engine::RattleUnchecked => "rattle-unchecked",
            Engine::Rattle => "rattle",
        }
    }

    /// What the engine stores per command, or `None` if it keeps no state.
    pub fn recording(self) -> Option<Recording> {
        match self {
            Engine::Script => None,
            Engine::Fabricate => Some(Recording::Reads),
            Engine::RattleUnchecked | Engine::Rattle => Some(Recording::ReadsAndWrites),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "script" => Ok(Engine::Script),
            "fabricate" => Ok(Engine::Fabricate),
            "rattle-unchecked" => Ok(Engine::RattleUnchecked),
            "rattle" => Ok(Engine::Rattle),
            other => Err(Error::Format(format!("unknown engine `{other}`"))),
        }
    }
}

/// Persisted engine state: the build directory plus memory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub engine: Engine,
    pub fs: FileSystem,
    pub memory: Memory,
}

impl StateFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        to_pretty_json(self)
    }

    /// Fabricate memory records reads only, Rattle memory reads and writes;
    /// the two cannot be mixed.
    pub fn check_engine(&self, engine: Engine) -> Result<()> {
        if self.engine.recording() != engine.recording() {
            return Err(Error::StateMismatch {
                expected: engine.to_string(),
                found: self.engine.to_string(),
            });
        }
        Ok(())
    }
}

/// One record of an access log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceLine {
    pub cmd: CmdId,
    #[serde(default)]
    pub reads: Vec<FileName>,
    #[serde(default)]
    pub writes: Vec<FileName>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct TraceHeader {
    script_order: Build,
}

/// An access log from some execution, with the intended script order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLog {
    pub script_order: Build,
    pub records: Vec<TraceLine>,
}

impl TraceLog {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let header: TraceHeader = serde_json::from_str(header)?;
        let mut records = Vec::new();
        let mut seen = BTreeSet::new();
        for (n, line) in lines {
            let rec: TraceLine = serde_json::from_str(line)
                .map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
            if !seen.insert(rec.cmd.clone()) {
                return Err(Error::Format(format!(
                    "line {}: command `{}` recorded twice",
                    n + 1,
                    rec.cmd
                )));
            }
            for names in [&rec.reads, &rec.writes] {
                let distinct: BTreeSet<_> = names.iter().collect();
                if distinct.len() != names.len() {
                    return Err(Error::Format(format!("line {}: repeated file name", n + 1)));
                }
            }
            records.push(rec);
        }
        Ok(Self {
            script_order: header.script_order,
            records,
        })
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = to_canonical_json(&TraceHeader {
            script_order: self.script_order.clone(),
        })?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&to_canonical_json(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn entries(&self) -> Vec<FileInfoEntry> {
        self.records
            .iter()
            .map(|r| FileInfoEntry {
                cmd: r.cmd.clone(),
                reads: r.reads.clone(),
                writes: r.writes.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Ok,
    Hazard,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HazardReport {
    pub kind: String,
    pub commands: Vec<CmdId>,
    pub file: FileName,
}

impl From<&Hazard> for HazardReport {
    fn from(h: &Hazard) -> Self {
        Self {
            kind: h.kind().to_owned(),
            commands: h.commands().into_iter().cloned().collect(),
            file: h.file().clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub kind: String,
    pub detail: String,
}

impl From<&Violation> for ViolationReport {
    fn from(v: &Violation) -> Self {
        Self {
            kind: v.kind().to_owned(),
            detail: v.to_string(),
        }
    }
}

/// Result of one CLI invocation, printed as a single JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub result: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hazard: Option<HazardReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationReport>,
    #[serde(default)]
    pub executed: Vec<CmdId>,
    #[serde(default)]
    pub skipped: Vec<CmdId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fs_digest: Option<String>,
    /// The order that was run, when it is not implied by the input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<Build>,
}

impl Report {
    pub fn ok(executed: Vec<CmdId>, skipped: Vec<CmdId>, fs: Option<&FileSystem>) -> Self {
        Self {
            result: Outcome::Ok,
            hazard: None,
            violation: None,
            executed,
            skipped,
            fs_digest: fs.map(fs_digest),
            run: None,
        }
    }

    pub fn hazard(
        hazard: &Hazard,
        executed: Vec<CmdId>,
        skipped: Vec<CmdId>,
        fs: Option<&FileSystem>,
    ) -> Self {
        Self {
            result: Outcome::Hazard,
            hazard: Some(hazard.into()),
            ..Self::ok(executed, skipped, fs)
        }
    }

    pub fn violation(kind: &str, detail: impl Into<String>) -> Self {
        Self {
            result: Outcome::Violation,
            hazard: None,
            violation: Some(ViolationReport {
                kind: kind.to_owned(),
                detail: detail.into(),
            }),
            executed: Vec::new(),
            skipped: Vec::new(),
            fs_digest: None,
            run: None,
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self).expect("reports always serialize")
    }

    pub fn exit_code(&self) -> i32 {
        match self.result {
            Outcome::Ok => EXIT_OK,
            Outcome::Hazard => EXIT_HAZARD,
            Outcome::Violation => EXIT_VIOLATION,
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_HAZARD: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    #[test]
    fn spec_json_shape() {
        let text = r#"{
            "files": {"file.c": "int"},
            "commands": [{"id": "cc", "program": [
                {"read": {"file": "file.c", "bind": "x"}},
                {"branch": {"var": "x", "test": {"eq": "int"},
                            "then": [{"write": {"file": "file.o", "value": {"concat": [{"lit": "obj("}, {"var": "x"}, {"lit": ")"}]}}}],
                            "else": [{"write": {"file": "file.o", "value": {"digest": {"var": "x"}}}}]}},
                {"branch": {"var": "x", "test": "present"}}
            ]}],
            "script": ["cc"]
        }"#;
        let spec = BuildSpec::from_json(text).unwrap();
        assert_eq!(spec.ran(), &spec.script);
        assert!(spec.validate().is_ok());
        let again = BuildSpec::from_json(&spec.to_json().unwrap()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn spec_rejects_malformed_programs() {
        let twice = r#"{"commands": [{"id": "a", "program": []}, {"id": "a", "program": []}], "script": ["a"]}"#;
        assert!(matches!(BuildSpec::from_json(twice), Err(Error::Format(_))));
        let unbound = r#"{"commands": [{"id": "a", "program": [{"write": {"file": "o", "value": {"var": "q"}}}]}], "script": ["a"]}"#;
        assert!(matches!(
            BuildSpec::from_json(unbound),
            Err(Error::UnboundVar { .. })
        ));
        let empty_id = r#"{"commands": [{"id": "", "program": []}], "script": []}"#;
        assert!(BuildSpec::from_json(empty_id).is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = scenarios::gcc();
        s.script = ["gcc -c file.c", "gcc -c file.c"].into_iter().collect();
        assert!(matches!(s.validate(), Err(Violation::Duplicate(_))));
        let mut s = scenarios::gcc();
        s.run = Some(["gcc -c file.c"].into_iter().collect());
        assert_eq!(s.validate(), Err(Violation::NotAPermutation));
        let mut s = scenarios::gcc();
        s.script = ["nope"].into_iter().collect();
        assert!(matches!(s.validate(), Err(Violation::UnknownCommand(_))));
    }

    #[test]
    fn trace_roundtrip_and_errors() {
        let log = scenarios::stale_compile_trace();
        let text = log.to_jsonl().unwrap();
        assert!(text.starts_with("{\"scriptOrder\":"));
        assert_eq!(TraceLog::parse(&text).unwrap(), log);
        assert!(TraceLog::parse("").is_err());
        let dup = "{\"scriptOrder\":[]}\n{\"cmd\":\"a\"}\n{\"cmd\":\"a\"}\n";
        assert!(TraceLog::parse(dup).is_err());
        let rep = "{\"scriptOrder\":[]}\n{\"cmd\":\"a\",\"reads\":[\"x\",\"x\"]}\n";
        assert!(TraceLog::parse(rep).is_err());
    }

    #[test]
    fn report_is_sorted_and_stable() {
        let fs: FileSystem = [("b", "2"), ("a", "1")].into_iter().collect();
        let r = Report::ok(vec!["x".into()], vec![], Some(&fs));
        let json = r.to_json();
        assert_eq!(
            json,
            format!(
                "{{\"executed\":[\"x\"],\"fsDigest\":\"{}\",\"result\":\"ok\",\"skipped\":[]}}",
                digest(br#"{"a":"1","b":"2"}"#)
            )
        );
        assert_eq!(serde_json::from_str::<Report>(&json).unwrap(), r);
    }

    #[test]
    fn state_engine_families() {
        let st = StateFile {
            engine: Engine::Rattle,
            fs: FileSystem::new(),
            memory: Memory::new(),
        };
        assert!(st.check_engine(Engine::RattleUnchecked).is_ok());
        assert!(st.check_engine(Engine::Fabricate).is_err());
        assert_eq!(StateFile::from_json(&st.to_json().unwrap()).unwrap(), st);
    }
}
