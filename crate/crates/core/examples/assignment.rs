//! Rounds a noisy score block to the best permutation.

use permsync::perm::{hungarian_max, project_to_permutation, Permutation, SquareBlock};
use permsync::rng::seeded_rng;
use rand::Rng;

fn main() -> permsync::Result<()> {
    let m = 8;
    let mut rng = seeded_rng(4, 0);
    let truth = permsync::models::sample_haar_permutation(&mut rng, m)?;

    let mut block = SquareBlock::from_permutation(&truth);
    for r in 0..m {
        for c in 0..m {
            let noise: f64 = rng.gen_range(-0.45..0.45);
            block.add_permutation(&Permutation::from_map((0..m).map(|k| (k + c + r) % m).collect())?, noise / m as f64);
        }
    }
    let p = project_to_permutation(&block)?;
    println!("truth     {truth}");
    println!("projected {p}  agreement {}/{m}", p.agreement(&truth)?);

    // Ties resolve to the lexicographically smallest optimal map.
    let flat = nalgebra::DMatrix::from_element(4, 4, 1.0);
    println!("all-ties  {:?}", hungarian_max(&flat));
    Ok(())
}
