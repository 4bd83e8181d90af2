//! A small seeded sweep over the number of corrupting nodes, written as the
//! raw and aggregate CSV files. Pass a directory to keep the files.

use std::path::PathBuf;

use permsync::bench::{aggregate, run_benchmark, write_aggregate_csv, write_raw_csv, BenchmarkConfig, Sweep, SweepParam};
use permsync::models::ModelConfig;
use permsync::Algorithm;

fn main() -> permsync::Result<()> {
    let mut cfg = BenchmarkConfig::new(
        ModelConfig::lac(50, 10, 1.0, 1, 30),
        vec![Algorithm::Spectral, Algorithm::Ppm, Algorithm::IrgclP],
        5,
        2024,
    );
    cfg.sweep = Sweep {
        param: SweepParam::Nc,
        values: vec![1.0, 2.0, 3.0],
    };
    let rows = run_benchmark(&cfg)?;
    let agg = aggregate(&rows);

    match std::env::args().nth(1).map(PathBuf::from) {
        Some(dir) => {
            write_raw_csv(std::fs::File::create(dir.join("sweep.csv"))?, &rows)?;
            write_aggregate_csv(std::fs::File::create(dir.join("sweep.aggregate.csv"))?, &agg)?;
            println!("wrote {} rows to {}", rows.len(), dir.display());
        }
        None => write_aggregate_csv(std::io::stdout().lock(), &agg)?,
    }
    Ok(())
}
