//! Cycle-consistency affinities on a superspreader instance: how far good and
//! corrupted edges separate as the reweighting sharpens.

use permsync::analysis::ground_truth_affinity;
use permsync::models::{generate, DxSampler, ModelConfig};
use permsync::rng::seeded_rng;
use permsync::solvers::{cemp_trace, Schedule};

fn main() -> permsync::Result<()> {
    let inst = generate(
        &ModelConfig::superspreader(60, 6, 1.0, 0.3, DxSampler::Haar),
        &mut seeded_rng(5, 0),
    )?;
    let bad = inst.bad_edges().expect("flags");
    let truth = ground_truth_affinity(&inst)?;

    for l in [2, 3] {
        println!("walk length {l}");
        let trace = cemp_trace(inst.measurement(), &Schedule::default(), l, 0.5)?;
        for (t, a) in trace.iter().enumerate() {
            let (mut good_min, mut bad_max) = (f64::INFINITY, f64::NEG_INFINITY);
            for (e, &b) in bad.iter().enumerate() {
                if b {
                    bad_max = bad_max.max(a.value(e));
                } else {
                    good_min = good_min.min(a.value(e));
                }
            }
            println!(
                "  t={t}  min good {good_min:.4}  max bad {bad_max:.4}  |A - A*|_inf {:.2e}",
                a.max_abs_diff(&truth)?
            );
        }
    }
    Ok(())
}
