//! Trains one physics-guided network on the 30-plate subset and prints its
//! loss curve and test errors.
//!
//! cargo run --release --example train_single -- [loss-history.csv]

use pgdnn::datagen::{fit_standardizer, DataBundle};
use pgdnn::nn::InjectionScheme;
use pgdnn::physics::PhysicsSet;
use pgdnn::trainer::{evaluate, split_validation, train, TrainConfig};

fn main() -> pgdnn::Result<()> {
    let data = DataBundle::generate(0);
    let subset = data.training_subset(30)?;
    let physics = PhysicsSet::parse("D")?;
    let scheme = InjectionScheme::parse("2-4")?;

    let std = fit_standardizer(&subset, physics)?;
    let (fit, val) = split_validation(&subset, 1)?;
    let config = TrainConfig::default();
    println!("{} fitting / {} validation plates, {} Adam steps", fit.len(), val.len(), config.total_steps(fit.len()));

    let record = train(&std.encode(&fit), &std.encode(&val), scheme, 42, &config)?;
    for epoch in [1, 10, 50, 100, 250, 500] {
        println!(
            "epoch {epoch:>3}  train {:.3e}  val {:.3e}",
            record.train_loss[epoch - 1],
            record.val_loss[epoch - 1]
        );
    }
    for (name, set) in [("test-1", &data.test1), ("test-2", &data.test2)] {
        let e = evaluate(&record.network, set, &std)?;
        println!("{name}: mean {:.2}%  median {:.2}%  max {:.2}%", e.mean, e.median, e.max);
    }
    if let Some(path) = std::env::args().nth(1) {
        record.write_loss_history(path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
