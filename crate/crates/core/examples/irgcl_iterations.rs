//! Follows the reweighted solver on a heavily corrupted uniform instance,
//! printing how many node estimates change per iteration.

use permsync::analysis::{instance_error, EdgeSetTag};
use permsync::models::{generate, ModelConfig};
use permsync::rng::seeded_rng;
use permsync::solvers::{irgcl_init_solve, irgcl_solve, SolverConfig, Variant};

fn main() -> permsync::Result<()> {
    let inst = generate(&ModelConfig::uniform(60, 8, 1.0, 0.8), &mut seeded_rng(4, 0))?;
    let cfg = SolverConfig::default();

    let init = irgcl_init_solve(&inst, &cfg)?;
    println!(
        "init error {:.4}",
        instance_error(&inst, &init.estimate, EdgeSetTag::AllPairs)?.error
    );
    for variant in [Variant::S, Variant::P] {
        let rep = irgcl_solve(&inst, variant, &cfg)?;
        let changed: Vec<usize> = rep.trace.iter().map(|t| t.changed).collect();
        println!(
            "{variant:?}: {} iterations, converged {}, changed per step {changed:?}, error {:.4}",
            rep.iterations,
            rep.converged,
            instance_error(&inst, &rep.estimate, EdgeSetTag::AllPairs)?.error
        );
    }
    Ok(())
}
