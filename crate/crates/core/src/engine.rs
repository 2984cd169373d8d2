//! Memoizing engines.
//!
//! Both engines walk the build in order and skip a command whose memory
//! entry still matches the current file system. Fabricate remembers only
//! what a command read; unchecked Rattle also remembers what it wrote, which
//! is what lets it stay equivalent to the script even when the build has
//! hazards.

use serde::{Deserialize, Serialize};

use crate::command::{require_distinct, run, Build, CmdId, Oracle, TraceRecord};
use crate::error::Result;
use crate::fs::{FileContent, FileName, FileSystem};

/// Recorded file values for one command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub cmd: CmdId,
    pub files: Vec<(FileName, Option<FileContent>)>,
}

/// Per-command snapshots, at most one entry per command.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Memory(Vec<MemoryEntry>);

impl Memory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, cmd: &CmdId) -> Option<&MemoryEntry> {
        self.0.iter().find(|e| &e.cmd == cmd)
    }

    /// Replaces the entry for `entry.cmd`, keeping its position, or appends.
    pub fn record(&mut self, entry: MemoryEntry) {
        match self.0.iter_mut().find(|e| e.cmd == entry.cmd) {
            Some(slot) => *slot = entry,
            None => self.0.push(entry),
        }
    }

    pub fn entries(&self) -> &[MemoryEntry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<MemoryEntry> for Memory {
    fn from_iter<T: IntoIterator<Item = MemoryEntry>>(iter: T) -> Self {
        let mut m = Memory::new();
        for e in iter {
            m.record(e);
        }
        m
    }
}

/// Which files an engine stores in a memory entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recording {
    /// Fabricate: reads only.
    Reads,
    /// Rattle: reads followed by writes.
    ReadsAndWrites,
}

impl Recording {
    pub fn entry(self, trace: &TraceRecord) -> MemoryEntry {
        let mut files = trace.reads.clone();
        if self == Recording::ReadsAndWrites {
            files.extend(
                trace
                    .writes
                    .iter()
                    .map(|(n, c)| (n.clone(), Some(c.clone()))),
            );
        }
        MemoryEntry {
            cmd: trace.cmd.clone(),
            files,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineResult {
    pub fs: FileSystem,
    pub memory: Memory,
    /// Commands actually run, in order. Everything else in the build was
    /// skipped.
    pub executed: Vec<CmdId>,
}

impl EngineResult {
    pub fn skipped(&self, build: &Build) -> Vec<CmdId> {
        build
            .iter()
            .filter(|c| !self.executed.contains(c))
            .cloned()
            .collect()
    }
}

/// Whether `cmd` has to run: there is no memory entry for it, or some
/// recorded file no longer has its recorded value.
pub fn should_run(cmd: &CmdId, memory: &Memory, fs: &FileSystem) -> bool {
    match memory.get(cmd) {
        None => true,
        Some(entry) => entry
            .files
            .iter()
            .any(|(name, value)| fs.lookup(name) != value.as_ref()),
    }
}

/// One memoized step. Returns the new state and whether the command ran.
pub fn step(
    oracle: &Oracle,
    cmd: &CmdId,
    fs: &FileSystem,
    memory: &Memory,
    recording: Recording,
) -> Result<(FileSystem, Memory, bool)> {
    if !should_run(cmd, memory, fs) {
        return Ok((fs.clone(), memory.clone(), false));
    }
    let (next, trace) = run(oracle, cmd, fs)?;
    let mut memory = memory.clone();
    memory.record(recording.entry(&trace));
    Ok((next, memory, true))
}

/// Fabricate's step: records reads only.
pub fn run_f(
    oracle: &Oracle,
    cmd: &CmdId,
    fs: &FileSystem,
    memory: &Memory,
) -> Result<(FileSystem, Memory, bool)> {
    step(oracle, cmd, fs, memory, Recording::Reads)
}

/// Rattle's step: records reads and writes.
pub fn run_r(
    oracle: &Oracle,
    cmd: &CmdId,
    fs: &FileSystem,
    memory: &Memory,
) -> Result<(FileSystem, Memory, bool)> {
    step(oracle, cmd, fs, memory, Recording::ReadsAndWrites)
}

fn fold(
    oracle: &Oracle,
    build: &Build,
    fs: &FileSystem,
    memory: &Memory,
    recording: Recording,
) -> Result<EngineResult> {
    require_distinct(build)?;
    let mut state = EngineResult {
        fs: fs.clone(),
        memory: memory.clone(),
        executed: Vec::new(),
    };
    for cmd in build {
        let (fs, memory, ran) = step(oracle, cmd, &state.fs, &state.memory, recording)?;
        state.fs = fs;
        state.memory = memory;
        if ran {
            state.executed.push(cmd.clone());
        }
    }
    Ok(state)
}

pub fn fabricate(
    oracle: &Oracle,
    build: &Build,
    fs: &FileSystem,
    memory: &Memory,
) -> Result<EngineResult> {
    fold(oracle, build, fs, memory, Recording::Reads)
}

pub fn rattle_unchecked(
    oracle: &Oracle,
    build: &Build,
    fs: &FileSystem,
    memory: &Memory,
) -> Result<EngineResult> {
    fold(oracle, build, fs, memory, Recording::ReadsAndWrites)
}
