//! The speculative hazard that a prefix-based required check misses.
//!
//! The script is `[a, b, c]` but the engine runs `[c, b, a]`. When `b`
//! runs, its script predecessor `a` has not run yet, so checking against
//! the commands run so far calls `b` speculative and lets `c`'s write to
//! `f` through. Asking whether `b` is ever required catches it.

use fwdbuild::harness::{both_modes, bug_regression};
use fwdbuild::scenarios;

fn main() -> fwdbuild::Result<()> {
    let spec = scenarios::speculative_bug();
    let (ever, prefix) = both_modes(&spec)?;
    for (mode, out) in [("ever", &ever), ("prefix", &prefix)] {
        match out.hazard() {
            Some(h) => println!("{mode:<6} {h}"),
            None => println!("{mode:<6} success"),
        }
    }
    let v = bug_regression();
    println!("{}", v.summary());
    Ok(())
}
