//! The raw and aggregate CSV files are the interface consumed by plotting
//! scripts; their headers and the aggregate statistics are fixed here.

use std::collections::BTreeMap;

use permsync::bench::{
    aggregate, run_benchmark, write_aggregate_csv, write_raw_csv, BenchmarkConfig, Sweep, SweepParam, AGGREGATE_HEADER,
    RAW_HEADER,
};
use permsync::{Algorithm, ModelConfig};

fn records(bytes: &[u8]) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().clone();
    let rows = r.records().collect::<Result<Vec<_>, _>>().unwrap();
    (header, rows)
}

#[test]
fn headers_are_fixed() {
    assert_eq!(
        RAW_HEADER,
        "model,algo,sweep_param,sweep_value,trial,seed,error,iterations,converged,runtime_ms"
    );
    assert_eq!(
        AGGREGATE_HEADER,
        "model,algo,sweep_param,sweep_value,n_trials,mean_error,std_error,n_failed"
    );
}

#[test]
fn aggregate_file_summarizes_raw_file() {
    let mut cfg = BenchmarkConfig::new(
        ModelConfig::uniform(16, 4, 1.0, 0.5),
        vec![Algorithm::Spectral, Algorithm::Ppm, Algorithm::IrlsL1],
        5,
        21,
    );
    cfg.sweep = Sweep {
        param: SweepParam::Q,
        values: vec![0.5, 0.75],
    };
    let rows = run_benchmark(&cfg).unwrap();
    let (mut raw, mut agg) = (Vec::new(), Vec::new());
    write_raw_csv(&mut raw, &rows).unwrap();
    write_aggregate_csv(&mut agg, &aggregate(&rows)).unwrap();

    let (rh, rr) = records(&raw);
    let (ah, ar) = records(&agg);
    assert_eq!(rh.iter().collect::<Vec<_>>().join(","), RAW_HEADER);
    assert_eq!(ah.iter().collect::<Vec<_>>().join(","), AGGREGATE_HEADER);
    assert_eq!(rr.len(), 3 * 2 * 5);
    assert_eq!(ar.len(), 3 * 2);

    // Group the raw errors by (algo, sweep value) straight from the text.
    let mut groups: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for r in &rr {
        assert_eq!(&r[0], "uniform");
        assert_eq!(&r[2], "q");
        assert_eq!(&r[9], "");
        groups.entry((r[1].to_string(), r[3].to_string())).or_default().push(r[6].parse().unwrap());
    }
    for a in &ar {
        let errs = &groups[&(a[1].to_string(), a[3].to_string())];
        let n = errs.len() as f64;
        let mean = errs.iter().sum::<f64>() / n;
        let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
        assert_eq!(a[4].parse::<usize>().unwrap(), errs.len());
        assert_eq!(a[5].parse::<f64>().unwrap(), mean);
        assert!((a[6].parse::<f64>().unwrap() - var.sqrt()).abs() <= 1e-15);
        assert_eq!(&a[7], "0");
    }
}

#[test]
fn timing_fills_runtime_column() {
    let mut cfg = BenchmarkConfig::new(ModelConfig::uniform(10, 3, 1.0, 0.2), vec![Algorithm::Spectral], 2, 3);
    cfg.timing = true;
    let mut raw = Vec::new();
    write_raw_csv(&mut raw, &run_benchmark(&cfg).unwrap()).unwrap();
    let (_, rr) = records(&raw);
    assert!(rr.iter().all(|r| r[9].parse::<f64>().unwrap() >= 0.0));
}
