//! Runs every solver on one locally adversarial instance and prints the error on
//! the corrupted edges.

use permsync::analysis::{instance_error, EdgeSetTag};
use permsync::models::{generate, ModelConfig};
use permsync::rng::seeded_rng;
use permsync::solvers::SolverConfig;
use permsync::Algorithm;

fn main() -> permsync::Result<()> {
    let inst = generate(&ModelConfig::lac(50, 10, 1.0, 2, 30), &mut seeded_rng(3, 0))?;
    let cfg = SolverConfig::default();
    println!("{:<14} {:>8} {:>6} {:>9}", "algo", "error", "iters", "converged");
    for algo in Algorithm::ALL.into_iter().filter(|a| a.yields_permutations()) {
        let rep = algo.run(&inst, &cfg)?;
        let err = instance_error(&inst, &rep.estimate, EdgeSetTag::BadEdges)?;
        println!(
            "{:<14} {:>8.4} {:>6} {:>9}",
            algo.tag(),
            err.error,
            rep.iterations,
            rep.converged
        );
    }
    Ok(())
}
