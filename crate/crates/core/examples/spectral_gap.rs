//! Top eigenvalues of the degree-normalized connection operator. Clean data
//! gives `m` eigenvalues at 1 followed by a gap; corruption closes it.

use permsync::eigen::{top_eigenpairs, EigenConfig, NormalizedGcw};
use permsync::models::{generate, ModelConfig};
use permsync::rng::seeded_rng;

fn main() -> permsync::Result<()> {
    let m = 5;
    for q in [0.0, 0.5, 0.9] {
        let inst = generate(&ModelConfig::uniform(80, m, 1.0, q), &mut seeded_rng(1, 0))?;
        let w = inst.graph();
        let op = NormalizedGcw::new(&w, inst.measurement())?;
        let pairs = top_eigenpairs(&op, m + 1, &EigenConfig::default())?;
        let vals: Vec<String> = pairs.values.iter().map(|v| format!("{v:.3}")).collect();
        println!("q={q:.1}: {}", vals.join(" "));
    }
    Ok(())
}
