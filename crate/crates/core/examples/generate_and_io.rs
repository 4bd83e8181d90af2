//! Generates a corrupted instance, round-trips it through the `PSYNC 1` text
//! format and prints a corruption summary.

use permsync::models::io::{parse_problem_str, problem_to_string};
use permsync::models::{generate, ModelConfig};
use permsync::rng::seeded_rng;

fn main() -> permsync::Result<()> {
    let cfg = ModelConfig::lac(20, 5, 0.8, 2, 8);
    let inst = generate(&cfg, &mut seeded_rng(7, 0))?;

    let text = problem_to_string(&inst);
    let back = parse_problem_str(&text)?;
    assert_eq!(back, inst);

    println!(
        "n={} m={} edges={} corrupted={}",
        inst.n(),
        inst.m(),
        inst.topology().num_edges(),
        inst.num_bad().unwrap_or(0)
    );
    println!("{} bytes; first lines:", text.len());
    for line in text.lines().take(6) {
        println!("  {line}");
    }

    // Corrupted edges concentrate on the two corrupting nodes.
    let bad = inst.bad_edges().expect("generated instances carry flags");
    let mut per_node = vec![0usize; inst.n()];
    for (e, &(i, j)) in inst.topology().edges().iter().enumerate() {
        if bad[e] {
            per_node[i] += 1;
            per_node[j] += 1;
        }
    }
    let mut top: Vec<(usize, usize)> = per_node.into_iter().enumerate().collect();
    top.sort_by_key(|t| std::cmp::Reverse(t.1));
    println!("most corrupted nodes: {:?}", &top[..3]);
    Ok(())
}
