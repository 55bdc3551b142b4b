//! Closed-form plate quantities for every material in the study.
//!
//! cargo run --release --example plate_physics

use pgdnn::physics::{
    apply_uncertainty, flexural_rigidity, natural_frequency, plate_weight, shear_modulus, Material,
    PlateGeometry,
};

fn main() -> pgdnn::Result<()> {
    let plate = PlateGeometry::new(0.060, 2.0, 2.0)?;
    println!("plate {} x {} x {} in", plate.width, plate.length, plate.thickness);
    println!("{:<16} {:>10} {:>10} {:>10} {:>10}", "material", "W lb", "D lb*in", "G ksi", "f Hz");

    let mut materials = Material::training_set();
    materials.push(Material::pwb());
    for m in &materials {
        println!(
            "{:<16} {:>10.5} {:>10.2} {:>10.1} {:>10.1}",
            m.name,
            plate_weight(&plate, m),
            flexural_rigidity(&plate, m),
            shear_modulus(m),
            natural_frequency(&plate, m),
        );
    }

    // the noisy label is bounded to ±1% of the exact frequency
    let f = natural_frequency(&plate, &Material::aluminum());
    for draw in [0.0, 0.5, 1.0] {
        println!("uncertainty draw {draw}: {:.1} Hz", apply_uncertainty(f, draw)?);
    }
    Ok(())
}
