//! Builds the seeded grid, its split, the nested scarce subsets and the
//! out-of-distribution test set, then writes them as CSV.
//!
//! cargo run --release --example generate_datasets -- [seed] [out-dir]

use pgdnn::datagen::{fit_standardizer, DataBundle, TRAIN_SIZES};
use pgdnn::physics::PhysicsSet;

fn main() -> pgdnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed must be an integer"));
    let out_dir = args.next().unwrap_or_else(|| "data".into());

    let data = DataBundle::generate(seed);
    println!("grid {}, training pool {}, test-1 {}, test-2 {}", data.grid.len(), data.train_pool.len(), data.test1.len(), data.test2.len());

    for size in TRAIN_SIZES {
        let subset = data.training_subset(size)?;
        let f: Vec<f64> = subset.samples().iter().map(|s| s.natural_frequency).collect();
        let (lo, hi) = f.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        println!("train{size:<4} frequency range {lo:8.1} .. {hi:8.1} Hz");
    }

    let subset = data.training_subset(30)?;
    let std = fit_standardizer(&subset, PhysicsSet::parse("W,D,G")?)?;
    let first = &data.test2.samples()[0];
    println!("first test-2 plate standardized: base {:?}", std.encode_base(first).map(|v| (v * 100.0).round() / 100.0));
    println!("                                 physics {:?}", std.encode_physics(first).iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>());

    for name in data.write_all(out_dir.as_ref())? {
        println!("wrote {out_dir}/{name}");
    }
    Ok(())
}
