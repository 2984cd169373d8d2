//! Deterministic command semantics.
//!
//! Every command identity maps to a small read/branch/write program. The
//! interpreter only touches the file system through `Read` steps, so a
//! command's result is a function of the values it reads: two file systems
//! that agree on the recorded reads yield identical traces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::fs::{FileContent, FileName, FileSystem, WriteSet};

/// Command identity, e.g. `gcc -c file.c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CmdId(String);

impl CmdId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyName("command id"));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CmdId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        Self::new(value)
    }
}

impl From<CmdId> for String {
    fn from(value: CmdId) -> Self {
        value.0
    }
}

impl From<&str> for CmdId {
    fn from(value: &str) -> Self {
        debug_assert!(!value.is_empty(), "command ids must be non-empty");
        Self(value.to_owned())
    }
}

impl fmt::Display for CmdId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered list of commands.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Build(Vec<CmdId>);

impl Build {
    pub fn new(cmds: Vec<CmdId>) -> Self {
        Self(cmds)
    }

    pub fn cmds(&self) -> &[CmdId] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CmdId> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, cmd: &CmdId) -> Option<usize> {
        self.0.iter().position(|c| c == cmd)
    }

    pub fn contains(&self, cmd: &CmdId) -> bool {
        self.position(cmd).is_some()
    }

    /// True iff both commands occur and `first` occurs strictly before
    /// `second`.
    pub fn before(&self, first: &CmdId, second: &CmdId) -> bool {
        match (self.position(first), self.position(second)) {
            (Some(i), Some(j)) => i < j,
            _ => false,
        }
    }

    /// Commands that precede `cmd`, or `None` if `cmd` is not in the build.
    pub fn predecessors(&self, cmd: &CmdId) -> Option<&[CmdId]> {
        self.position(cmd).map(|i| &self.0[..i])
    }

    /// First command that occurs more than once.
    pub fn first_duplicate(&self) -> Option<&CmdId> {
        let mut seen = BTreeSet::new();
        self.0.iter().find(|c| !seen.insert(*c))
    }

    pub fn is_permutation_of(&self, other: &Build) -> bool {
        let mut a: Vec<_> = self.0.iter().collect();
        let mut b: Vec<_> = other.0.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

impl FromIterator<CmdId> for Build {
    fn from_iter<T: IntoIterator<Item = CmdId>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for Build {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        Self(iter.into_iter().map(CmdId::from).collect())
    }
}

impl<'a> IntoIterator for &'a Build {
    type Item = &'a CmdId;
    type IntoIter = std::slice::Iter<'a, CmdId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// 64-bit FNV-1a over `bytes`, as 16 lowercase hex characters.
pub fn digest(bytes: &[u8]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let hash = bytes
        .iter()
        .fold(OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(PRIME));
    format!("{hash:016x}")
}

/// Value expression for `Write` steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Lit(String),
    /// Content bound by an earlier `Read`; an absent file reads as "".
    Var(String),
    Concat(Vec<Expr>),
    Digest(Box<Expr>),
}

impl Expr {
    pub fn lit(s: impl Into<String>) -> Self {
        Expr::Lit(s.into())
    }

    pub fn var(s: impl Into<String>) -> Self {
        Expr::Var(s.into())
    }

    pub fn digest(e: Expr) -> Self {
        Expr::Digest(Box::new(e))
    }
}

/// Condition tested by a `Branch`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Test {
    /// The read file exists.
    Present,
    /// The read file exists and has exactly this content.
    Eq(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Read {
        file: FileName,
        bind: String,
    },
    Branch {
        var: String,
        test: Test,
        #[serde(default)]
        then: Vec<Step>,
        #[serde(rename = "else", default)]
        otherwise: Vec<Step>,
    },
    Write {
        file: FileName,
        value: Expr,
    },
}

impl Step {
    pub fn read(file: &str, bind: &str) -> Self {
        Step::Read {
            file: file.into(),
            bind: bind.to_owned(),
        }
    }

    pub fn write(file: &str, value: Expr) -> Self {
        Step::Write {
            file: file.into(),
            value,
        }
    }

    pub fn branch(var: &str, test: Test, then: Vec<Step>, otherwise: Vec<Step>) -> Self {
        Step::Branch {
            var: var.to_owned(),
            test,
            then,
            otherwise,
        }
    }
}

/// The program a command runs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommandProgram(pub Vec<Step>);

impl CommandProgram {
    pub fn new(steps: Vec<Step>) -> Self {
        Self(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    /// Checks that every variable is bound on every path that uses it.
    /// Returns the first offending variable.
    pub fn unbound_variable(&self) -> Option<String> {
        fn walk(steps: &[Step], scope: &mut BTreeSet<String>) -> Option<String> {
            for step in steps {
                match step {
                    Step::Read { bind, .. } => {
                        scope.insert(bind.clone());
                    }
                    Step::Branch {
                        var,
                        then,
                        otherwise,
                        ..
                    } => {
                        if !scope.contains(var) {
                            return Some(var.clone());
                        }
                        let mut a = scope.clone();
                        let mut b = scope.clone();
                        if let Some(v) = walk(then, &mut a).or_else(|| walk(otherwise, &mut b)) {
                            return Some(v);
                        }
                        *scope = a.intersection(&b).cloned().collect();
                    }
                    Step::Write { value, .. } => {
                        if let Some(v) = expr_unbound(value, scope) {
                            return Some(v);
                        }
                    }
                }
            }
            None
        }
        fn expr_unbound(e: &Expr, scope: &BTreeSet<String>) -> Option<String> {
            match e {
                Expr::Lit(_) => None,
                Expr::Var(v) => (!scope.contains(v)).then(|| v.clone()),
                Expr::Concat(parts) => parts.iter().find_map(|p| expr_unbound(p, scope)),
                Expr::Digest(inner) => expr_unbound(inner, scope),
            }
        }
        walk(&self.0, &mut BTreeSet::new())
    }
}

/// Maps each command identity to its program.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Oracle(BTreeMap<CmdId, CommandProgram>);

impl Oracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, cmd: CmdId, program: CommandProgram) {
        self.0.insert(cmd, program);
    }

    pub fn program(&self, cmd: &CmdId) -> Option<&CommandProgram> {
        self.0.get(cmd)
    }

    pub fn defines(&self, cmd: &CmdId) -> bool {
        self.0.contains_key(cmd)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CmdId, &CommandProgram)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(CmdId, CommandProgram)> for Oracle {
    fn from_iter<T: IntoIterator<Item = (CmdId, CommandProgram)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// What one command observed and produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub cmd: CmdId,
    pub reads: Vec<(FileName, Option<FileContent>)>,
    pub writes: WriteSet,
}

impl TraceRecord {
    pub fn read_names(&self) -> impl Iterator<Item = &FileName> {
        self.reads.iter().map(|(n, _)| n)
    }

    pub fn reads_file(&self, name: &FileName) -> bool {
        self.reads.iter().any(|(n, _)| n == name)
    }
}

/// Runs `cmd`'s program against the snapshot `fs`.
///
/// Reads always observe `fs`, never the command's own pending writes.
pub fn interpret(oracle: &Oracle, cmd: &CmdId, fs: &FileSystem) -> Result<TraceRecord> {
    let program = oracle
        .program(cmd)
        .ok_or_else(|| Error::UnknownCmd(cmd.clone()))?;
    let mut exec = Interpreter {
        cmd,
        fs,
        env: HashMap::new(),
        trace: TraceRecord {
            cmd: cmd.clone(),
            reads: Vec::new(),
            writes: WriteSet::new(),
        },
    };
    exec.steps(program.steps())?;
    Ok(exec.trace)
}

struct Interpreter<'a> {
    cmd: &'a CmdId,
    fs: &'a FileSystem,
    env: HashMap<&'a str, Option<FileContent>>,
    trace: TraceRecord,
}

impl<'a> Interpreter<'a> {
    fn steps(&mut self, steps: &'a [Step]) -> Result<()> {
        for step in steps {
            match step {
                Step::Read { file, bind } => {
                    let value = self.fs.lookup(file).cloned();
                    if !self.trace.reads_file(file) {
                        self.trace.reads.push((file.clone(), value.clone()));
                    }
                    self.env.insert(bind.as_str(), value);
                }
                Step::Branch {
                    var,
                    test,
                    then,
                    otherwise,
                } => {
                    let value = self.lookup_var(var)?;
                    let taken = match test {
                        Test::Present => value.is_some(),
                        Test::Eq(lit) => value.is_some_and(|c| c.as_str() == lit),
                    };
                    self.steps(if taken { then } else { otherwise })?;
                }
                Step::Write { file, value } => {
                    let mut out = String::new();
                    self.eval(value, &mut out)?;
                    self.trace.writes.insert(file.clone(), out.into());
                }
            }
        }
        Ok(())
    }

    fn lookup_var(&self, var: &str) -> Result<Option<&FileContent>> {
        self.env
            .get(var)
            .map(Option::as_ref)
            .ok_or_else(|| Error::UnboundVar {
                cmd: self.cmd.clone(),
                var: var.to_owned(),
            })
    }

    fn eval(&self, expr: &Expr, out: &mut String) -> Result<()> {
        match expr {
            Expr::Lit(s) => out.push_str(s),
            Expr::Var(v) => {
                if let Some(c) = self.lookup_var(v)? {
                    out.push_str(c.as_str());
                }
            }
            Expr::Concat(parts) => {
                for p in parts {
                    self.eval(p, out)?;
                }
            }
            Expr::Digest(inner) => {
                let mut buf = String::new();
                self.eval(inner, &mut buf)?;
                out.push_str(&digest(buf.as_bytes()));
            }
        }
        Ok(())
    }
}

/// Checks that a command did not write any file it read. Returns the first
/// offending name in write order.
pub fn check_disjoint(trace: &TraceRecord) -> Option<&FileName> {
    trace.writes.names().find(|n| trace.reads_file(n))
}

/// Interprets `cmd` and applies its writes.
pub fn run(oracle: &Oracle, cmd: &CmdId, fs: &FileSystem) -> Result<(FileSystem, TraceRecord)> {
    let trace = interpret(oracle, cmd, fs)?;
    if let Some(file) = check_disjoint(&trace) {
        return Err(Error::Disjointness {
            cmd: cmd.clone(),
            file: file.clone(),
        });
    }
    Ok((fs.extend(&trace.writes), trace))
}

/// Runs every command of `build` in order, unconditionally. This is the
/// reference behaviour the engines are measured against.
pub fn script(oracle: &Oracle, build: &Build, fs: &FileSystem) -> Result<FileSystem> {
    build.iter().try_fold(fs.clone(), |acc, cmd| {
        run(oracle, cmd, &acc).map(|(next, _)| next)
    })
}

/// Like [`script`] but also returns every trace, in execution order.
pub fn script_traced(
    oracle: &Oracle,
    build: &Build,
    fs: &FileSystem,
) -> Result<(FileSystem, Vec<TraceRecord>)> {
    let mut cur = fs.clone();
    let mut traces = Vec::with_capacity(build.len());
    for cmd in build {
        let (next, trace) = run(oracle, cmd, &cur)?;
        cur = next;
        traces.push(trace);
    }
    Ok((cur, traces))
}

/// Fails with a [`Violation`] if `build` repeats a command.
pub fn require_distinct(build: &Build) -> Result<()> {
    match build.first_duplicate() {
        Some(c) => Err(Violation::Duplicate(c.clone()).into()),
        None => Ok(()),
    }
}
