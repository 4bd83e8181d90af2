//! Solves a problem given as text, the way precomputed relative permutations
//! from an external matcher would arrive, after dropping nodes with no trusted
//! edge.

use permsync::models::io::{parse_problem_str, solution_to_string};
use permsync::models::well_posedness_filter;
use permsync::solvers::SolverConfig;
use permsync::Algorithm;

const PROBLEM: &str = "PSYNC 1
5 3
EDGES
0 1 0
1 0 2
0 2 0
2 1 0
0 3 0
0 1 2
1 2 0
1 2 0
1 3 0
1 0 2
2 3 0
2 1 0
0 4 1
2 0 1
";

fn main() -> permsync::Result<()> {
    let inst = parse_problem_str(PROBLEM)?;
    let filtered = well_posedness_filter(&inst, None)?;
    println!("kept nodes {:?}", filtered.kept);

    let rep = Algorithm::IrgclP.run(&filtered.instance, &SolverConfig::default())?;
    print!("{}", solution_to_string(&rep.estimate));
    Ok(())
}
