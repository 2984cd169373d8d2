//! A model of a forward build system.
//!
//! Commands are small deterministic programs over an in-memory file system.
//! A build is the ordered list of commands a user wrote; the reference
//! meaning of a build is to run every command in order ([`script`]). The
//! engines in this crate skip work using memory of earlier runs, and the
//! hazard-checked engine ([`rattle`]) may run commands out of order while
//! detecting the cases where that could change the result.
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── script_reference.rs     # programs, traces and the reference semantics
//! ├── incremental_build.rs    # fabricate and rattle-unchecked with memory
//! ├── hazard_detection.rs     # read-write and write-write hazards
//! ├── speculation_bug.rs      # the missed speculative hazard, both modes
//! ├── explore_permutations.rs # every ordering of a build
//! ├── trace_lint.rs           # checking an external access log
//! └── verify_theorems.rs      # property checks over generated builds
//! ```
//!
//! ```bash
//! cargo run -p fwdbuild --example script_reference
//! cargo run -p fwdbuild --example verify_theorems -- 200
//! ```
//!
//! The `fwdbuild` binary exposes the same operations over JSON files; see
//! [`cli`].

pub mod cli;
pub mod command;
pub mod engine;
pub mod error;
pub mod format;
pub mod fs;
pub mod harness;
pub mod hazard;
pub mod scenarios;

pub use command::{
    check_disjoint, digest, interpret, run, script, script_traced, Build, CmdId, CommandProgram,
    Expr, Oracle, Step, Test, TraceRecord,
};
pub use engine::{fabricate, rattle_unchecked, should_run, EngineResult, Memory, MemoryEntry};
pub use error::{Error, Result, Violation};
pub use format::{BuildSpec, Engine, Report, StateFile, TraceLog};
pub use fs::{FileContent, FileName, FileSystem, WriteSet};
pub use harness::{check_theorem, gen_instance, permutations, GenParams, Theorem, Verdict};
pub use hazard::{check_log, hazard_scan, rattle, FileInfo, Hazard, RattleOutcome, RequiredMode};
