//! Runs a slice of the experiment grid and writes the report tables.
//!
//! cargo run --release --example grid_report -- [out-dir] [ensemble]

use pgdnn::datagen::DataBundle;
use pgdnn::harness::{enumerate_grid, run_ensemble, GridFilter, Report};
use pgdnn::physics::PhysicsSet;
use pgdnn::trainer::TrainConfig;

fn main() -> pgdnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let out_dir = args.next().unwrap_or_else(|| "grid-report".into());
    let ensemble: usize = args.next().map_or(5, |s| s.parse().expect("ensemble size"));

    // every scheme with D alone at the smallest size, plus the baseline
    let filter = GridFilter { train_size: Some(30), ..Default::default() };
    let d = PhysicsSet::parse("D")?;
    let configs: Vec<_> = enumerate_grid(0, ensemble)
        .into_iter()
        .filter(|c| filter.accepts(c) && (c.is_baseline() || c.physics_set == d))
        .collect();

    let data = DataBundle::generate(0);
    let mut summaries = Vec::new();
    for config in &configs {
        let r = run_ensemble(config, &data, &TrainConfig::default())?;
        eprintln!("{} test-2 {:.2}%", config.id(), r.test2.mean);
        summaries.push(r.summary());
    }
    let report = Report::new(summaries)?;
    for name in report.write_all(out_dir.as_ref())? {
        println!("wrote {out_dir}/{name}");
    }
    Ok(())
}
