//! Shows the running ensemble prediction for one test plate settling as
//! replicates are added.
//!
//! cargo run --release --example ensemble_trace -- [ensemble]

use pgdnn::datagen::DataBundle;
use pgdnn::harness::{run_ensemble, ExperimentConfig};
use pgdnn::trainer::TrainConfig;

fn main() -> pgdnn::Result<()> {
    let ensemble: usize = std::env::args().nth(1).map_or(30, |s| s.parse().expect("ensemble size"));
    let data = DataBundle::generate(0);
    let config = ExperimentConfig::baseline(261, ensemble, 0)?;
    let result = run_ensemble(&config, &data, &TrainConfig::default())?;

    let t = &result.trace;
    println!("{}: actual {:.1} Hz", t.label, t.actual_hz);
    for (i, (p, m)) in t.predictions_hz.iter().zip(&t.running_mean_hz).enumerate() {
        println!("{:>3}  replicate {p:8.1}  running mean {m:8.1}", i + 1);
    }
    println!("median final val/train loss ratio {:.2}", result.median_loss_ratio());
    println!("ensemble test-1 mean error {:.2}%", result.test1.mean);
    Ok(())
}
