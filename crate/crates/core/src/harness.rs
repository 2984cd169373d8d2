//! Property checking of the correctness statements over generated builds.
//!
//! Every instance is a random oracle, script build and initial file system,
//! reproducible from `(seed, case)`. Speculation is modelled by quantifying
//! over permutations of the script, so the statements about reordered runs
//! are checked against every permutation rather than a particular scheduler.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::command::{
    interpret, script, script_traced, Build, CmdId, CommandProgram, Expr, Oracle, Step, Test,
    TraceRecord,
};
use crate::engine::{fabricate, rattle_unchecked, Memory};
use crate::error::{Error, Result, Violation};
use crate::format::{fs_digest, BuildSpec};
use crate::fs::{FileContent, FileName, FileSystem};
use crate::hazard::{hazard_scan, rattle, Hazard, RattleOutcome, RequiredMode};

/// Upper bound on build length for permutation enumeration (6! = 720).
pub const MAX_PERMUTED_LEN: usize = 6;

/// Rejection-sampling bound for [`gen_instance`].
pub const MAX_GEN_ATTEMPTS: usize = 10_000;

/// Environment variable that forces sequential evaluation when set to `1`.
pub const NO_PARALLEL_ENV: &str = "FWDBUILD_NO_PARALLEL";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GenParams {
    pub file_universe: usize,
    pub content_alphabet: usize,
    pub max_build_len: usize,
    pub max_branch_depth: usize,
    pub seed: u64,
    pub cases: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            file_universe: 8,
            content_alphabet: 4,
            max_build_len: 5,
            max_branch_depth: 2,
            seed: 0x5eed,
            cases: 1000,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("file_universe", self.file_universe),
            ("content_alphabet", self.content_alphabet),
            ("max_build_len", self.max_build_len),
            ("max_branch_depth", self.max_branch_depth),
            ("cases", self.cases),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidParams(format!("{name} must be at least 1")));
        }
        if self.max_build_len > MAX_PERMUTED_LEN {
            return Err(Error::InvalidParams(format!(
                "max_build_len must be at most {MAX_PERMUTED_LEN}"
            )));
        }
        if self.file_universe < 2 {
            return Err(Error::InvalidParams(
                "file_universe must be at least 2 so commands can read and write".into(),
            ));
        }
        Ok(())
    }
}

/// A generated (oracle, script build, initial file system) triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub oracle: Oracle,
    pub script: Build,
    pub files: FileSystem,
}

impl From<BuildSpec> for Instance {
    fn from(spec: BuildSpec) -> Self {
        Self {
            oracle: spec.oracle,
            script: spec.script,
            files: spec.files,
        }
    }
}

/// Checks the standing preconditions for running `ran` against `script`
/// from `fs`: both duplicate-free, one a permutation of the other, every
/// command defined, and no command writing a file it reads along the
/// script run.
pub fn validate_preconditions(
    oracle: &Oracle,
    ran: &Build,
    script: &Build,
    fs: &FileSystem,
) -> std::result::Result<(), Violation> {
    for b in [ran, script] {
        if let Some(c) = b.first_duplicate() {
            return Err(Violation::Duplicate(c.clone()));
        }
    }
    if !ran.is_permutation_of(script) {
        return Err(Violation::NotAPermutation);
    }
    if let Some(c) = script.iter().find(|c| !oracle.defines(c)) {
        return Err(Violation::UnknownCommand(c.clone()));
    }
    match script_traced(oracle, script, fs) {
        Ok(_) => Ok(()),
        Err(e) => Err(e
            .violation()
            .unwrap_or_else(|| Violation::UnknownCommand(CmdId::from("?")))),
    }
}

/// All orderings of `build`, in lexicographic order of positions.
pub fn permutations(build: &Build) -> Result<Vec<Build>> {
    let n = build.len();
    if n > MAX_PERMUTED_LEN {
        return Err(Error::BuildTooLarge(n));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(idx.iter().map(|&i| build.cmds()[i].clone()).collect());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| idx[i - 1] < idx[i]) else {
            break;
        };
        let j = (i..n)
            .rev()
            .find(|&j| idx[j] > idx[i - 1])
            .expect("pivot has a successor");
        idx.swap(i - 1, j);
        idx[i..].reverse();
    }
    Ok(out)
}

const STREAM_GEN: u64 = 0;
const STREAM_EDIT: u64 = 1;
const STREAM_PERM: u64 = 2;
const STREAM_PROBE: u64 = 3;

fn case_rng(seed: u64, case: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case.wrapping_mul(4).wrapping_add(purpose));
    rng
}

fn file_name(i: usize) -> FileName {
    FileName::from(format!("f{i}").as_str())
}

fn content(i: usize) -> String {
    format!("v{i}")
}

struct Generator<'a> {
    params: &'a GenParams,
    rng: &'a mut ChaCha8Rng,
    next_var: usize,
}

impl Generator<'_> {
    fn content(&mut self) -> String {
        content(self.rng.gen_range(0..self.params.content_alphabet))
    }

    fn fs(&mut self) -> FileSystem {
        let mut fs = FileSystem::new();
        for i in 0..self.params.file_universe {
            if self.rng.gen_bool(0.5) {
                let value = self.content();
                fs = fs.with(file_name(i), Some(value.into()));
            }
        }
        fs
    }

    fn expr(&mut self, scope: &[String], depth: usize) -> Expr {
        let roll = self.rng.gen_range(0..10);
        match roll {
            0..=3 if !scope.is_empty() => Expr::Var(scope.choose(self.rng).unwrap().clone()),
            4 | 5 if depth > 0 => {
                let n = self.rng.gen_range(2..=3);
                Expr::Concat((0..n).map(|_| self.expr(scope, depth - 1)).collect())
            }
            6 if depth > 0 => Expr::digest(self.expr(scope, depth - 1)),
            _ => Expr::Lit(self.content()),
        }
    }

    fn body(
        &mut self,
        inputs: &[FileName],
        outputs: &[FileName],
        scope: &mut Vec<String>,
        depth: usize,
    ) -> Vec<Step> {
        let mut steps = Vec::new();
        for _ in 0..self.rng.gen_range(0..=2) {
            let var = format!("x{}", self.next_var);
            self.next_var += 1;
            steps.push(Step::Read {
                file: inputs.choose(self.rng).unwrap().clone(),
                bind: var.clone(),
            });
            scope.push(var);
        }
        if depth > 0 && !scope.is_empty() && self.rng.gen_bool(0.5) {
            let var = scope.choose(self.rng).unwrap().clone();
            let test = if self.rng.gen_bool(0.5) {
                Test::Present
            } else {
                Test::Eq(self.content())
            };
            let then = self.body(inputs, outputs, &mut scope.clone(), depth - 1);
            let otherwise = self.body(inputs, outputs, &mut scope.clone(), depth - 1);
            steps.push(Step::Branch {
                var,
                test,
                then,
                otherwise,
            });
        }
        for _ in 0..self.rng.gen_range(0..=1) {
            let value = self.expr(scope, 2);
            steps.push(Step::Write {
                file: outputs.choose(self.rng).unwrap().clone(),
                value,
            });
        }
        steps
    }

    fn program(&mut self) -> CommandProgram {
        let mut names: Vec<FileName> = (0..self.params.file_universe).map(file_name).collect();
        names.shuffle(self.rng);
        // files this command may read are never files it may write
        let split = self.rng.gen_range(1..names.len());
        let (inputs, outputs) = names.split_at(split);
        let mut scope = Vec::new();
        let mut steps = self.body(inputs, outputs, &mut scope, self.params.max_branch_depth);
        if !steps.iter().any(|s| matches!(s, Step::Write { .. })) {
            let value = self.expr(&scope, 1);
            steps.push(Step::Write {
                file: outputs.choose(self.rng).unwrap().clone(),
                value,
            });
        }
        CommandProgram::new(steps)
    }

    fn instance(&mut self) -> Instance {
        let len = self.rng.gen_range(1..=self.params.max_build_len);
        let script: Build = (0..len)
            .map(|i| CmdId::from(format!("c{i}").as_str()))
            .collect();
        let oracle = script.iter().map(|c| (c.clone(), self.program())).collect();
        let files = self.fs();
        Instance {
            oracle,
            script,
            files,
        }
    }
}

/// Deterministically generates instance `case` under `params`.
pub fn gen_instance(params: &GenParams, case: u64) -> Result<Instance> {
    params.validate()?;
    let mut rng = case_rng(params.seed, case, STREAM_GEN);
    let mut gen = Generator {
        params,
        rng: &mut rng,
        next_var: 0,
    };
    for _ in 0..MAX_GEN_ATTEMPTS {
        let inst = gen.instance();
        if validate_preconditions(&inst.oracle, &inst.script, &inst.script, &inst.files).is_ok() {
            return Ok(inst);
        }
    }
    Err(Error::GenerationExhausted {
        case,
        attempts: MAX_GEN_ATTEMPTS,
    })
}

/// The statements checked by [`check_theorem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Unchecked Rattle matches the script on any disjoint build.
    ScriptEqRattleUnchecked,
    /// Fabricate matches the script on hazard-free builds.
    CorrectFabricate,
    /// A successful checked run matches the unchecked one (and the script).
    Soundness,
    /// A hazard-free run never reports a hazard.
    Completeness,
    /// Sequential Rattle either reports a hazard or matches the script.
    CorrectRattle,
    /// A hazard-free permutation of the script has the script's effect.
    Reordered,
    /// Script hazard, run hazard, or equivalence, for every permutation.
    SemiCorrect,
    /// Script hazard or equivalence, for every permutation. Not expected
    /// to hold; reported only.
    TotalCorrectness,
}

impl Theorem {
    pub const ALL: [Theorem; 8] = [
        Theorem::ScriptEqRattleUnchecked,
        Theorem::CorrectFabricate,
        Theorem::Soundness,
        Theorem::Completeness,
        Theorem::CorrectRattle,
        Theorem::Reordered,
        Theorem::SemiCorrect,
        Theorem::TotalCorrectness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::ScriptEqRattleUnchecked => "script-eq-rattle-unchecked",
            Theorem::CorrectFabricate => "correct-fabricate",
            Theorem::Soundness => "soundness",
            Theorem::Completeness => "completeness",
            Theorem::CorrectRattle => "correct-rattle",
            Theorem::Reordered => "reordered-eq",
            Theorem::SemiCorrect => "semi-correct",
            Theorem::TotalCorrectness => "total-correctness",
        }
    }

    /// Whether a counterexample should fail verification.
    pub fn gating(self) -> bool {
        self != Theorem::TotalCorrectness
    }

    /// Whether the statement quantifies over every permutation.
    pub fn exhaustive(self) -> bool {
        matches!(
            self,
            Theorem::Reordered | Theorem::SemiCorrect | Theorem::TotalCorrectness
        )
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "script≡rattle-unchecked" => "script-eq-rattle-unchecked",
            "reordered≡" => "reordered-eq",
            other => other,
        };
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == alias)
            .ok_or_else(|| Error::UnknownTheorem(s.to_owned()))
    }
}

/// Result of evaluating a statement on one (instance, run order, setup).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Held,
    /// The premise did not hold, so nothing was asserted.
    Vacuous,
    Failed {
        observed: String,
        expected: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub run: Build,
    /// Which starting state was used, e.g. `fresh` or `incremental`.
    pub setup: &'static str,
    pub outcome: CheckOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub case: u64,
    pub setup: String,
    pub oracle: Oracle,
    #[serde(rename = "bs")]
    pub script: Build,
    #[serde(rename = "br")]
    pub run: Build,
    #[serde(rename = "fs")]
    pub files: FileSystem,
    pub observed: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub theorem: String,
    pub passed: bool,
    pub gating: bool,
    pub cases_run: usize,
    /// Statements evaluated, vacuous ones included.
    pub checks: usize,
    pub vacuous: usize,
    pub counterexamples: usize,
    /// The first counterexample by case index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    /// One-line human summary.
    pub fn summary(&self) -> String {
        let status = match (self.gating, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, _) => "PROBE",
        };
        format!(
            "{status} {} cases={} checks={} vacuous={} counterexamples={}",
            self.theorem, self.cases_run, self.checks, self.vacuous, self.counterexamples
        )
    }
}

fn parallel() -> bool {
    std::env::var(NO_PARALLEL_ENV).map_or(true, |v| v != "1")
}

/// Maps `f` over `0..cases`, in parallel unless disabled, returning results
/// in case order.
pub fn map_cases<T, F>(cases: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    if parallel() {
        (0..cases as u64).into_par_iter().map(f).collect()
    } else {
        (0..cases as u64).map(f).collect()
    }
}

fn describe(fs: &FileSystem) -> String {
    format!("fs {}", fs_digest(fs))
}

fn compare(observed: &FileSystem, expected: &FileSystem) -> CheckOutcome {
    if observed.equivalent(expected) {
        CheckOutcome::Held
    } else {
        CheckOutcome::Failed {
            observed: describe(observed),
            expected: describe(expected),
        }
    }
}

fn failed(observed: impl Into<String>, expected: impl Into<String>) -> CheckOutcome {
    CheckOutcome::Failed {
        observed: observed.into(),
        expected: expected.into(),
    }
}

/// Maps a disjointness failure to a vacuous outcome: the statements only
/// speak about builds where no command writes its own input.
fn premise<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Disjointness { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Randomly edits `fs`, touching only names for which `editable` holds.
fn perturb(
    rng: &mut ChaCha8Rng,
    params: &GenParams,
    fs: &FileSystem,
    editable: impl Fn(&FileName) -> bool,
) -> FileSystem {
    let mut out = fs.clone();
    for i in 0..params.file_universe {
        let name = file_name(i);
        if !editable(&name) || !rng.gen_bool(0.4) {
            continue;
        }
        let value = if rng.gen_bool(0.25) {
            None
        } else {
            Some(FileContent::from(content(
                rng.gen_range(0..params.content_alphabet),
            )))
        };
        out = out.with(name, value);
    }
    out
}

fn written_by(traces: &[TraceRecord]) -> Vec<FileName> {
    traces
        .iter()
        .flat_map(|t| t.writes.names().cloned())
        .collect()
}

/// True when no command along the script run writes a file an earlier one
/// wrote.
fn write_write_free(traces: &[TraceRecord]) -> bool {
    traces.iter().enumerate().all(|(i, t)| {
        t.writes
            .names()
            .all(|n| traces[..i].iter().all(|e| !e.writes.contains(n)))
    })
}

fn hazard_free(inst: &Instance, ran: &Build, fs: &FileSystem) -> Result<Option<bool>> {
    Ok(premise(hazard_scan(
        &inst.oracle,
        ran,
        &inst.script,
        fs,
        RequiredMode::Ever,
    ))?
    .map(|r| r.is_ok()))
}

/// Whether the script build itself has a read-write or write-write hazard.
fn script_has_rw_ww(inst: &Instance) -> Result<bool> {
    let scan = hazard_scan(
        &inst.oracle,
        &inst.script,
        &inst.script,
        &inst.files,
        RequiredMode::Ever,
    )?;
    Ok(matches!(
        scan,
        Err(Hazard::ReadWrite { .. } | Hazard::WriteWrite { .. })
    ))
}

/// Starting states for the engine statements: a fresh run, and a rerun
/// from the memory of an earlier run after random edits to the file system.
struct Setup {
    name: &'static str,
    fs: FileSystem,
    memory: Memory,
}

fn rattle_setups(inst: &Instance, params: &GenParams, case: u64) -> Result<Vec<Setup>> {
    let mut setups = vec![Setup {
        name: "fresh",
        fs: inst.files.clone(),
        memory: Memory::new(),
    }];
    let prior = rattle_unchecked(&inst.oracle, &inst.script, &inst.files, &Memory::new())?;
    let mut rng = case_rng(params.seed, case, STREAM_EDIT);
    setups.push(Setup {
        name: "incremental",
        fs: perturb(&mut rng, params, &prior.fs, |_| true),
        memory: prior.memory,
    });
    Ok(setups)
}

fn sampled_permutation(inst: &Instance, params: &GenParams, case: u64) -> Build {
    let mut rng = case_rng(params.seed, case, STREAM_PERM);
    let mut cmds = inst.script.cmds().to_vec();
    cmds.shuffle(&mut rng);
    Build::new(cmds)
}

/// Evaluates `theorem` on one instance. `params` and `case` seed the
/// auxiliary randomness (edits for incremental setups, sampled orders).
pub fn check_instance(
    theorem: Theorem,
    inst: &Instance,
    params: &GenParams,
    case: u64,
) -> Result<Vec<Check>> {
    let o = &inst.oracle;
    let bs = &inst.script;
    let mut checks = Vec::new();
    let mut push = |run: &Build, setup: &'static str, outcome: CheckOutcome| {
        checks.push(Check {
            run: run.clone(),
            setup,
            outcome,
        })
    };
    match theorem {
        Theorem::ScriptEqRattleUnchecked => {
            let other = sampled_permutation(inst, params, case);
            for setup in rattle_setups(inst, params, case)? {
                for b in [bs, &other] {
                    let outcome = match premise(script(o, b, &setup.fs))? {
                        None => CheckOutcome::Vacuous,
                        Some(expected) => {
                            let got = rattle_unchecked(o, b, &setup.fs, &setup.memory)?;
                            compare(&got.fs, &expected)
                        }
                    };
                    push(b, setup.name, outcome);
                }
            }
        }
        Theorem::CorrectFabricate => {
            let (_, first_traces) = script_traced(o, bs, &inst.files)?;
            let first_hf = hazard_free(inst, bs, &inst.files)?.unwrap_or(false);
            let first_ww = write_write_free(&first_traces);
            let expected = script(o, bs, &inst.files)?;
            let fresh = fabricate(o, bs, &inst.files, &Memory::new())?;
            for (setup, premise_ok) in [("fresh", first_hf), ("fresh-ww", first_ww)] {
                let outcome = if premise_ok {
                    compare(&fresh.fs, &expected)
                } else {
                    CheckOutcome::Vacuous
                };
                push(bs, setup, outcome);
            }
            // rerun from the first run's memory after editing source files
            let written = written_by(&first_traces);
            let mut rng = case_rng(params.seed, case, STREAM_EDIT);
            let edited = perturb(&mut rng, params, &fresh.fs, |n| !written.contains(n));
            let second = premise(script_traced(o, bs, &edited))?;
            let second_hf = hazard_free(inst, bs, &edited)?.unwrap_or(false);
            for (setup, premise_ok) in [
                ("incremental", first_hf && second_hf),
                (
                    "incremental-ww",
                    first_ww && second.as_ref().is_some_and(|(_, t)| write_write_free(t)),
                ),
            ] {
                let outcome = match (&second, premise_ok) {
                    (Some((expected, _)), true) => {
                        let got = fabricate(o, bs, &edited, &fresh.memory)?;
                        compare(&got.fs, expected)
                    }
                    _ => CheckOutcome::Vacuous,
                };
                push(bs, setup, outcome);
            }
        }
        Theorem::Soundness | Theorem::Completeness | Theorem::CorrectRattle => {
            let other = sampled_permutation(inst, params, case);
            let runs: Vec<&Build> = if theorem == Theorem::CorrectRattle {
                vec![bs]
            } else {
                vec![bs, &other]
            };
            for setup in rattle_setups(inst, params, case)? {
                for br in &runs {
                    for mode in [RequiredMode::Ever, RequiredMode::Prefix] {
                        let outcome = check_engine_statement(theorem, inst, br, &setup, mode)?;
                        push(br, setup.name, outcome);
                    }
                }
            }
        }
        Theorem::Reordered => {
            let expected = script(o, bs, &inst.files)?;
            for br in permutations(bs)? {
                let outcome = match hazard_free(inst, &br, &inst.files)? {
                    Some(true) => compare(&script(o, &br, &inst.files)?, &expected),
                    _ => CheckOutcome::Vacuous,
                };
                push(&br, "fresh", outcome);
            }
        }
        Theorem::SemiCorrect | Theorem::TotalCorrectness => {
            let expected = script(o, bs, &inst.files)?;
            let bs_hazard = script_has_rw_ww(inst)?;
            for br in permutations(bs)? {
                let outcome = if bs_hazard {
                    CheckOutcome::Vacuous
                } else {
                    match premise(rattle(
                        o,
                        &br,
                        bs,
                        &inst.files,
                        &Memory::new(),
                        RequiredMode::Ever,
                    ))? {
                        None => CheckOutcome::Vacuous,
                        Some(RattleOutcome::Success { result, .. }) => {
                            compare(&result.fs, &expected)
                        }
                        Some(RattleOutcome::Hazard { hazard, .. }) => {
                            if theorem == Theorem::SemiCorrect {
                                CheckOutcome::Held
                            } else {
                                failed(format!("hazard: {hazard}"), describe(&expected))
                            }
                        }
                    }
                };
                push(&br, "fresh", outcome);
            }
        }
    }
    Ok(checks)
}

fn check_engine_statement(
    theorem: Theorem,
    inst: &Instance,
    br: &Build,
    setup: &Setup,
    mode: RequiredMode,
) -> Result<CheckOutcome> {
    let o = &inst.oracle;
    let Some(out) = premise(rattle(o, br, &inst.script, &setup.fs, &setup.memory, mode))? else {
        return Ok(CheckOutcome::Vacuous);
    };
    Ok(match theorem {
        Theorem::Soundness => match out {
            RattleOutcome::Hazard { .. } => CheckOutcome::Vacuous,
            RattleOutcome::Success { result, .. } => {
                let unchecked = rattle_unchecked(o, br, &setup.fs, &setup.memory)?;
                let reference = script(o, br, &setup.fs)?;
                match compare(&result.fs, &unchecked.fs) {
                    CheckOutcome::Held => compare(&result.fs, &reference),
                    failure => failure,
                }
            }
        },
        Theorem::Completeness => match hazard_free(inst, br, &setup.fs)? {
            Some(true) => match out {
                RattleOutcome::Success { .. } => CheckOutcome::Held,
                RattleOutcome::Hazard { hazard, .. } => {
                    failed(format!("{} hazard: {hazard}", mode.as_str()), "success")
                }
            },
            _ => CheckOutcome::Vacuous,
        },
        Theorem::CorrectRattle => match out {
            RattleOutcome::Hazard { .. } => CheckOutcome::Held,
            RattleOutcome::Success { result, .. } => {
                compare(&result.fs, &script(o, br, &setup.fs)?)
            }
        },
        _ => unreachable!("not an engine statement"),
    })
}

/// Checks `theorem` over `params.cases` generated instances.
pub fn check_theorem(theorem: Theorem, params: &GenParams) -> Result<Verdict> {
    params.validate()?;
    let per_case = map_cases(params.cases, |case| {
        let inst = gen_instance(params, case)?;
        let checks = check_instance(theorem, &inst, params, case)?;
        Ok((case, inst, checks))
    })?;
    let mut verdict = Verdict {
        theorem: theorem.name().to_owned(),
        passed: true,
        gating: theorem.gating(),
        cases_run: per_case.len(),
        checks: 0,
        vacuous: 0,
        counterexamples: 0,
        counterexample: None,
    };
    for (case, inst, checks) in per_case {
        for check in checks {
            verdict.checks += 1;
            match check.outcome {
                CheckOutcome::Held => {}
                CheckOutcome::Vacuous => verdict.vacuous += 1,
                CheckOutcome::Failed { observed, expected } => {
                    verdict.counterexamples += 1;
                    verdict.passed = false;
                    verdict
                        .counterexample
                        .get_or_insert_with(|| Counterexample {
                            case,
                            setup: check.setup.to_owned(),
                            oracle: inst.oracle.clone(),
                            script: inst.script.clone(),
                            run: check.run,
                            files: inst.files.clone(),
                            observed,
                            expected,
                        });
                }
            }
        }
    }
    Ok(verdict)
}

/// Looks a theorem up by name and checks it.
pub fn check_theorem_by_name(name: &str, params: &GenParams) -> Result<Verdict> {
    check_theorem(name.parse()?, params)
}

/// Runs a spec's script and run orders under both required-ness modes.
pub fn both_modes(spec: &BuildSpec) -> Result<(RattleOutcome, RattleOutcome)> {
    let run = |mode| {
        rattle(
            &spec.oracle,
            spec.ran(),
            &spec.script,
            &spec.files,
            &Memory::new(),
            mode,
        )
    };
    Ok((run(RequiredMode::Ever)?, run(RequiredMode::Prefix)?))
}

/// The missed speculative hazard: passes iff `Ever` reports
/// `Speculative(c, b, f)` and `Prefix` lets the run succeed.
pub fn bug_regression() -> Verdict {
    let spec = crate::scenarios::speculative_bug();
    let expected = Hazard::Speculative {
        writer: "c".into(),
        reader: "b".into(),
        file: "f".into(),
    };
    let (passed, observed) = match both_modes(&spec) {
        Ok((ever, prefix)) => {
            let ok = ever.hazard() == Some(&expected) && prefix.success().is_some();
            let show = |o: &RattleOutcome| match o.hazard() {
                Some(h) => h.to_string(),
                None => "success".to_owned(),
            };
            (
                ok,
                format!("ever: {}; prefix: {}", show(&ever), show(&prefix)),
            )
        }
        Err(e) => (false, format!("error: {e}")),
    };
    Verdict {
        theorem: "bug-regression".to_owned(),
        passed,
        gating: true,
        cases_run: 1,
        checks: 1,
        vacuous: 0,
        counterexamples: usize::from(!passed),
        counterexample: (!passed).then(|| Counterexample {
            case: 0,
            setup: "fixed".to_owned(),
            oracle: spec.oracle.clone(),
            script: spec.script.clone(),
            run: spec.ran().clone(),
            files: spec.files.clone(),
            observed,
            expected: format!("ever: {expected}; prefix: success"),
        }),
    }
}

/// Comparison of the two required-ness modes over a corpus.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DominanceReport {
    pub runs: usize,
    pub prefix_hazards: usize,
    pub ever_hazards: usize,
    /// Runs where `Ever` found a hazard and `Prefix` did not.
    pub strict: usize,
    /// Runs where `Prefix` found a hazard and `Ever` did not. Must be zero.
    pub violations: usize,
}

impl DominanceReport {
    pub fn record(&mut self, ever: &RattleOutcome, prefix: &RattleOutcome) {
        self.runs += 1;
        let (e, p) = (ever.hazard().is_some(), prefix.hazard().is_some());
        self.ever_hazards += usize::from(e);
        self.prefix_hazards += usize::from(p);
        self.strict += usize::from(e && !p);
        self.violations += usize::from(p && !e);
    }

    pub fn merge(&mut self, other: &DominanceReport) {
        self.runs += other.runs;
        self.prefix_hazards += other.prefix_hazards;
        self.ever_hazards += other.ever_hazards;
        self.strict += other.strict;
        self.violations += other.violations;
    }
}

/// Runs every permutation of every generated script in both modes.
pub fn mode_dominance(params: &GenParams) -> Result<DominanceReport> {
    params.validate()?;
    let parts = map_cases(params.cases, |case| {
        let inst = gen_instance(params, case)?;
        let mut report = DominanceReport::default();
        for br in permutations(&inst.script)? {
            let run = |mode| {
                premise(rattle(
                    &inst.oracle,
                    &br,
                    &inst.script,
                    &inst.files,
                    &Memory::new(),
                    mode,
                ))
            };
            if let (Some(ever), Some(prefix)) =
                (run(RequiredMode::Ever)?, run(RequiredMode::Prefix)?)
            {
                report.record(&ever, &prefix);
            }
        }
        Ok(report)
    })?;
    let mut total = DominanceReport::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

/// Counts of a fixed-point sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FixedPointReport {
    pub hazard_free: usize,
    /// (engine, case) pairs whose second run executed something.
    pub failures: Vec<(String, u64)>,
}

/// For every hazard-free instance, reruns each memoizing engine from its
/// own output state and records any command that runs again.
pub fn fixed_point(params: &GenParams) -> Result<FixedPointReport> {
    params.validate()?;
    let parts = map_cases(params.cases, |case| {
        let inst = gen_instance(params, case)?;
        let mut failures = Vec::new();
        if hazard_free(&inst, &inst.script, &inst.files)? != Some(true) {
            return Ok((0, failures));
        }
        let (o, b, fs) = (&inst.oracle, &inst.script, &inst.files);
        let first = fabricate(o, b, fs, &Memory::new())?;
        if !fabricate(o, b, &first.fs, &first.memory)?
            .executed
            .is_empty()
        {
            failures.push(("fabricate".to_owned(), case));
        }
        let first = rattle_unchecked(o, b, fs, &Memory::new())?;
        if !rattle_unchecked(o, b, &first.fs, &first.memory)?
            .executed
            .is_empty()
        {
            failures.push(("rattle-unchecked".to_owned(), case));
        }
        for mode in [RequiredMode::Ever, RequiredMode::Prefix] {
            let again = match rattle(o, b, b, fs, &Memory::new(), mode)? {
                RattleOutcome::Success { result, .. } => {
                    rattle(o, b, b, &result.fs, &result.memory, mode)?
                }
                RattleOutcome::Hazard { .. } => {
                    failures.push((format!("rattle-{}", mode.as_str()), case));
                    continue;
                }
            };
            if again.success().is_none_or(|r| !r.executed.is_empty()) {
                failures.push((format!("rattle-{}", mode.as_str()), case));
            }
        }
        Ok((1, failures))
    })?;
    let mut report = FixedPointReport::default();
    for (n, f) in parts {
        report.hazard_free += n;
        report.failures.extend(f);
    }
    Ok(report)
}

/// Counts of a read-closure sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReadClosureReport {
    pub checks: usize,
    pub failures: Vec<u64>,
}

/// Perturbs every file outside a command's observed read set (including
/// names outside the generator's universe) and checks the command's trace
/// is unchanged. One check per case, cycling over commands.
pub fn read_closure(params: &GenParams, checks: usize) -> Result<ReadClosureReport> {
    params.validate()?;
    let outcomes = map_cases(checks, |i| {
        let inst = gen_instance(params, i)?;
        let cmd = &inst.script.cmds()[i as usize % inst.script.len()];
        let before = interpret(&inst.oracle, cmd, &inst.files)?;
        let mut rng = case_rng(params.seed, i, STREAM_PROBE);
        let mut probe = perturb(&mut rng, params, &inst.files, |n| !before.reads_file(n));
        probe = probe.with(FileName::from("outside-universe"), Some("noise".into()));
        let after = interpret(&inst.oracle, cmd, &probe)?;
        Ok((before == after).then_some(()).map_or(Some(i), |_| None))
    })?;
    Ok(ReadClosureReport {
        checks,
        failures: outcomes.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios;

    fn small() -> GenParams {
        GenParams {
            cases: 40,
            ..GenParams::default()
        }
    }

    #[test]
    fn permutation_examples() {
        let ab: Build = ["a", "b"].into_iter().collect();
        assert_eq!(
            permutations(&ab).unwrap(),
            vec![ab.clone(), ["b", "a"].into_iter().collect()]
        );
        assert_eq!(
            permutations(&Build::default()).unwrap(),
            vec![Build::default()]
        );
        let four: Build = ["a", "b", "c", "d"].into_iter().collect();
        let all = permutations(&four).unwrap();
        assert_eq!(all.len(), 24);
        assert!(all
            .iter()
            .all(|p| p.first_duplicate().is_none() && p.is_permutation_of(&four)));
        let mut sorted = all.clone();
        sorted.sort_by(|x, y| x.cmds().cmp(y.cmds()));
        assert_eq!(sorted, all);
        let seven: Build = ["a", "b", "c", "d", "e", "f", "g"].into_iter().collect();
        assert!(matches!(permutations(&seven), Err(Error::BuildTooLarge(7))));
    }

    #[test]
    fn precondition_examples() {
        let gcc = scenarios::gcc();
        let ok = validate_preconditions(&gcc.oracle, &gcc.script, &gcc.script, &gcc.files);
        assert_eq!(ok, Ok(()));
        let aa: Build = ["gcc -c file.c", "gcc -c file.c"].into_iter().collect();
        assert!(matches!(
            validate_preconditions(&gcc.oracle, &aa, &gcc.script, &gcc.files),
            Err(Violation::Duplicate(_))
        ));
        let short: Build = ["gcc -c file.c"].into_iter().collect();
        assert_eq!(
            validate_preconditions(&gcc.oracle, &short, &gcc.script, &gcc.files),
            Err(Violation::NotAPermutation)
        );
        let unknown: Build = ["zz"].into_iter().collect();
        assert!(matches!(
            validate_preconditions(&gcc.oracle, &unknown, &unknown, &gcc.files),
            Err(Violation::UnknownCommand(_))
        ));
    }

    #[test]
    fn generation_is_deterministic_and_valid() {
        let p = small();
        for case in 0..20 {
            let a = gen_instance(&p, case).unwrap();
            assert_eq!(a, gen_instance(&p, case).unwrap());
            assert!(validate_preconditions(&a.oracle, &a.script, &a.script, &a.files).is_ok());
            assert!(a.script.len() <= p.max_build_len);
            assert!(a
                .oracle
                .iter()
                .all(|(_, prog)| prog.unbound_variable().is_none()));
        }
        let single = GenParams {
            max_build_len: 1,
            ..small()
        };
        assert!((0..20).all(|c| gen_instance(&single, c).unwrap().script.len() == 1));
    }

    #[test]
    fn params_validation() {
        assert!(GenParams {
            cases: 0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(GenParams {
            max_build_len: 7,
            ..small()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn theorem_names_roundtrip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
        }
        assert!(matches!(
            "nope".parse::<Theorem>(),
            Err(Error::UnknownTheorem(_))
        ));
        assert_eq!(
            "script≡rattle-unchecked".parse::<Theorem>().unwrap(),
            Theorem::ScriptEqRattleUnchecked
        );
    }

    #[test]
    fn completeness_vacuous_on_hazardous_build() {
        let inst = Instance::from(scenarios::foo_c());
        let checks = check_instance(Theorem::Completeness, &inst, &small(), 0).unwrap();
        let fresh: Vec<_> = checks.iter().filter(|c| c.setup == "fresh").collect();
        assert!(!fresh.is_empty());
        assert!(fresh.iter().all(|c| c.outcome == CheckOutcome::Vacuous));
    }

    #[test]
    fn small_corpus_passes_gating_theorems() {
        for t in Theorem::ALL.into_iter().filter(|t| t.gating()) {
            let v = check_theorem(t, &small()).unwrap();
            assert!(v.passed, "{}: {:?}", v.summary(), v.counterexample);
            assert_eq!(v.cases_run, 40);
        }
    }

    #[test]
    fn fabricate_diverges_without_its_premise() {
        let p = small();
        let diverged = (0..p.cases as u64).any(|case| {
            let inst = gen_instance(&p, case).unwrap();
            let (o, b) = (&inst.oracle, &inst.script);
            let (_, traces) = script_traced(o, b, &inst.files).unwrap();
            let first = fabricate(o, b, &inst.files, &Memory::new()).unwrap();
            let wiped = written_by(&traces)
                .into_iter()
                .fold(first.fs.clone(), |fs, n| fs.with(n, None));
            let again = fabricate(o, b, &wiped, &first.memory).unwrap();
            !again.fs.equivalent(&script(o, b, &wiped).unwrap())
        });
        assert!(diverged);
    }

    #[test]
    fn bug_regression_passes() {
        let v = bug_regression();
        assert!(v.passed, "{:?}", v.counterexample);
    }

    #[test]
    fn bug_regression_variants() {
        let bug = scenarios::speculative_bug();
        let (ever, prefix) = both_modes(&scenarios::restrict(&bug, &["a", "b"])).unwrap();
        assert!(ever.success().is_some());
        assert!(prefix.success().is_some());
        // in script order b reads f before c writes it
        let in_order = BuildSpec {
            run: None,
            ..bug.clone()
        };
        let (ever, prefix) = both_modes(&in_order).unwrap();
        let rw = Hazard::ReadWrite {
            writer: "c".into(),
            reader: "b".into(),
            file: "f".into(),
        };
        assert_eq!(ever.hazard(), Some(&rw));
        assert_eq!(prefix.hazard(), Some(&rw));
    }
}
