//! Small-ensemble comparison of injection schemes for flexural rigidity at
//! one training size, against the plain network.
//!
//! cargo run --release --example injection_comparison -- [train-size] [ensemble]

use pgdnn::datagen::DataBundle;
use pgdnn::harness::{run_ensemble, ExperimentConfig};
use pgdnn::nn::InjectionScheme;
use pgdnn::physics::PhysicsSet;
use pgdnn::trainer::TrainConfig;

fn main() -> pgdnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map_or(30, |s| s.parse().expect("train size"));
    let ensemble: usize = args.next().map_or(10, |s| s.parse().expect("ensemble size"));
    let data = DataBundle::generate(0);
    let train_config = TrainConfig::default();

    let mut configs = vec![ExperimentConfig::baseline(size, ensemble, 0)?];
    for scheme in ["L1", "L3", "L5", "L1-4", "L2-4", "L2-5"] {
        configs.push(ExperimentConfig::new(
            PhysicsSet::parse("D")?,
            InjectionScheme::parse(scheme)?,
            size,
            ensemble,
            0,
        )?);
    }
    println!("{:<16} {:>12} {:>12}", "config", "test-1 mean%", "test-2 mean%");
    for config in &configs {
        let r = run_ensemble(config, &data, &train_config)?;
        println!("{:<16} {:>12.2} {:>12.2}", config.id(), r.test1.mean, r.test2.mean);
    }
    Ok(())
}
