//! Property checks over generated builds.
//!
//! `cargo run --release -p fwdbuild --example verify_theorems -- [cases] [seed]`

use fwdbuild::harness::{
    check_theorem, fixed_point, mode_dominance, read_closure, GenParams, Theorem,
};

fn main() -> fwdbuild::Result<()> {
    let mut args = std::env::args().skip(1);
    let d = GenParams::default();
    let params = GenParams {
        cases: args.next().map_or(d.cases, |a| a.parse().expect("cases")),
        seed: args.next().map_or(d.seed, |a| a.parse().expect("seed")),
        ..d
    };
    for t in Theorem::ALL {
        let v = check_theorem(t, &params)?;
        println!("{}", v.summary());
        if let (true, Some(cx)) = (v.gating, &v.counterexample) {
            println!(
                "  case {} run {:?}: {} vs {}",
                cx.case, cx.run, cx.observed, cx.expected
            );
        }
    }
    let dom = mode_dominance(&params)?;
    println!("mode dominance: {dom:?}");
    let fp = fixed_point(&params)?;
    println!(
        "fixed point: {} hazard-free cases, {} failures",
        fp.hazard_free,
        fp.failures.len()
    );
    let rc = read_closure(&params, params.cases)?;
    println!(
        "read closure: {} checks, {} failures",
        rc.checks,
        rc.failures.len()
    );
    Ok(())
}
