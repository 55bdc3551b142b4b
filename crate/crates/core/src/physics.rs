//! Closed-form relations for simply-supported thin rectangular plates.
//!
//! Units follow the imperial structural-dynamics convention: lengths in
//! inches, weight density in lb/in³, Young's modulus in ksi, forces in lb.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard gravity in in/s², converts weight density to mass density.
pub const GRAVITY_IN_S2: f64 = 386.4;

const PSI_PER_KSI: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// lb/in³
    pub weight_density: f64,
    /// ksi
    pub youngs_modulus: f64,
    pub poissons_ratio: f64,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        weight_density: f64,
        youngs_modulus: f64,
        poissons_ratio: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(weight_density > 0.0 && weight_density.is_finite()) {
            return Err(Error::invalid(format!(
                "{name}: weight density must be positive, got {weight_density}"
            )));
        }
        if !(youngs_modulus > 0.0 && youngs_modulus.is_finite()) {
            return Err(Error::invalid(format!(
                "{name}: Young's modulus must be positive, got {youngs_modulus}"
            )));
        }
        if !(poissons_ratio > 0.0 && poissons_ratio < 0.5) {
            return Err(Error::invalid(format!(
                "{name}: Poisson's ratio must lie in (0, 0.5), got {poissons_ratio}"
            )));
        }
        Ok(Self {
            name,
            weight_density,
            youngs_modulus,
            poissons_ratio,
        })
    }

    fn table(name: &str, rho: f64, e: f64, nu: f64) -> Self {
        Self {
            name: name.to_string(),
            weight_density: rho,
            youngs_modulus: e,
            poissons_ratio: nu,
        }
    }

    pub fn aluminum() -> Self {
        Self::table("Aluminum", 0.097, 9_900.0, 0.33)
    }

    pub fn fr4() -> Self {
        Self::table("FR-4", 0.070, 2_000.0, 0.12)
    }

    pub fn copper() -> Self {
        Self::table("Copper", 0.323, 16_000.0, 0.343)
    }

    pub fn magnesium() -> Self {
        Self::table("Magnesium", 0.065, 6_500.0, 0.35)
    }

    pub fn stainless_steel() -> Self {
        Self::table("Stainless Steel", 0.286, 29_000.0, 0.27)
    }

    /// Printed wiring board composite, used only for out-of-domain testing.
    pub fn pwb() -> Self {
        Self::table("PWB", 0.150, 3_000.0, 0.18)
    }

    /// The five materials the training grid is built from, in grid order.
    pub fn training_set() -> Vec<Self> {
        vec![
            Self::aluminum(),
            Self::fr4(),
            Self::copper(),
            Self::magnesium(),
            Self::stainless_steel(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateGeometry {
    pub thickness: f64,
    pub width: f64,
    pub length: f64,
}

impl PlateGeometry {
    /// Rejects non-positive dimensions and plates outside the thin-plate
    /// regime (thickness must stay below an eighth of the shorter side).
    pub fn new(thickness: f64, width: f64, length: f64) -> Result<Self> {
        for (label, v) in [("thickness", thickness), ("width", width), ("length", length)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{label} must be positive, got {v}")));
            }
        }
        if thickness >= width.min(length) / 8.0 {
            return Err(Error::invalid(format!(
                "thickness {thickness} is not thin relative to {width} x {length}"
            )));
        }
        Ok(Self {
            thickness,
            width,
            length,
        })
    }
}

/// Which simplified-physics quantity to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhysicsFeature {
    /// Plate weight W.
    Weight,
    /// Flexural rigidity D.
    FlexuralRigidity,
    /// Shear modulus G.
    ShearModulus,
}

impl PhysicsFeature {
    pub const ALL: [PhysicsFeature; 3] = [
        PhysicsFeature::Weight,
        PhysicsFeature::FlexuralRigidity,
        PhysicsFeature::ShearModulus,
    ];

    pub fn symbol(self) -> char {
        match self {
            PhysicsFeature::Weight => 'W',
            PhysicsFeature::FlexuralRigidity => 'D',
            PhysicsFeature::ShearModulus => 'G',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'W' => Some(PhysicsFeature::Weight),
            'D' => Some(PhysicsFeature::FlexuralRigidity),
            'G' => Some(PhysicsFeature::ShearModulus),
            _ => None,
        }
    }

    pub fn evaluate(self, geometry: &PlateGeometry, material: &Material) -> f64 {
        match self {
            PhysicsFeature::Weight => plate_weight(geometry, material),
            PhysicsFeature::FlexuralRigidity => flexural_rigidity(geometry, material),
            PhysicsFeature::ShearModulus => shear_modulus(material),
        }
    }
}

/// A combination of physics features, injected together as one vector.
///
/// Members are always ordered W, D, G regardless of how the set was built.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhysicsSet(u8);

impl PhysicsSet {
    pub const NONE: PhysicsSet = PhysicsSet(0);

    /// The seven combinations studied, in the order they are tabulated:
    /// none, {W,D}, {W}, {D}, {G}, {W,D,G}, {D,G}.
    pub fn studied() -> [PhysicsSet; 7] {
        use PhysicsFeature::*;
        [
            PhysicsSet::NONE,
            PhysicsSet::of(&[Weight, FlexuralRigidity]),
            PhysicsSet::of(&[Weight]),
            PhysicsSet::of(&[FlexuralRigidity]),
            PhysicsSet::of(&[ShearModulus]),
            PhysicsSet::of(&[Weight, FlexuralRigidity, ShearModulus]),
            PhysicsSet::of(&[FlexuralRigidity, ShearModulus]),
        ]
    }

    pub fn of(features: &[PhysicsFeature]) -> Self {
        PhysicsSet(features.iter().fold(0, |acc, f| acc | Self::bit(*f)))
    }

    fn bit(feature: PhysicsFeature) -> u8 {
        match feature {
            PhysicsFeature::Weight => 1,
            PhysicsFeature::FlexuralRigidity => 2,
            PhysicsFeature::ShearModulus => 4,
        }
    }

    pub fn contains(self, feature: PhysicsFeature) -> bool {
        self.0 & Self::bit(feature) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn features(self) -> impl Iterator<Item = PhysicsFeature> {
        PhysicsFeature::ALL.into_iter().filter(move |f| self.contains(*f))
    }

    /// "none", or the member symbols concatenated ("WD", "DG", ...).
    pub fn label(self) -> String {
        if self.is_empty() {
            "none".to_string()
        } else {
            self.features().map(PhysicsFeature::symbol).collect()
        }
    }

    /// Accepts "none", a comma list ("W,D") or concatenated symbols ("WD").
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text.eq_ignore_ascii_case("none") {
            return Ok(PhysicsSet::NONE);
        }
        let mut set = 0u8;
        for c in text.chars().filter(|c| !c.is_whitespace() && *c != ',') {
            let f = PhysicsFeature::from_symbol(c).ok_or_else(|| {
                Error::invalid(format!("unknown physics feature `{c}` in `{text}` (use W, D, G)"))
            })?;
            set |= Self::bit(f);
        }
        Ok(PhysicsSet(set))
    }
}

impl std::fmt::Display for PhysicsSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsFeatures {
    /// lb
    pub weight: f64,
    /// lb·in
    pub flexural_rigidity: f64,
    /// ksi
    pub shear_modulus: f64,
}

impl PhysicsFeatures {
    pub fn compute(geometry: &PlateGeometry, material: &Material) -> Self {
        Self {
            weight: plate_weight(geometry, material),
            flexural_rigidity: flexural_rigidity(geometry, material),
            shear_modulus: shear_modulus(material),
        }
    }

    pub fn get(&self, feature: PhysicsFeature) -> f64 {
        match feature {
            PhysicsFeature::Weight => self.weight,
            PhysicsFeature::FlexuralRigidity => self.flexural_rigidity,
            PhysicsFeature::ShearModulus => self.shear_modulus,
        }
    }
}

/// Bending stiffness E·t³ / (12(1 − ν²)) in lb·in, with E taken from ksi to psi.
pub fn flexural_rigidity(geometry: &PlateGeometry, material: &Material) -> f64 {
    let e_psi = material.youngs_modulus * PSI_PER_KSI;
    let nu = material.poissons_ratio;
    e_psi * geometry.thickness.powi(3) / (12.0 * (1.0 - nu * nu))
}

/// Plate weight in lb.
pub fn plate_weight(geometry: &PlateGeometry, material: &Material) -> f64 {
    geometry.thickness * geometry.width * geometry.length * material.weight_density
}

/// E / (1 + ν) in ksi.
///
/// This is the supplemental "shear modulus" feature exactly as the source
/// relation writes it, without the conventional factor of two. Features are
/// standardized before use, so the constant factor carries no information.
pub fn shear_modulus(material: &Material) -> f64 {
    material.youngs_modulus / (1.0 + material.poissons_ratio)
}

/// Mass density in lb·s²/in⁴.
pub fn mass_density(material: &Material) -> f64 {
    material.weight_density / GRAVITY_IN_S2
}

/// Fundamental (1,1) mode of a plate simply supported on all four edges, in Hz:
/// f = (π/2)·√(D / (ρ_m·t))·(1/w² + 1/l²).
pub fn natural_frequency(geometry: &PlateGeometry, material: &Material) -> f64 {
    let d = flexural_rigidity(geometry, material);
    let areal_mass = mass_density(material) * geometry.thickness;
    let planar = geometry.width.powi(-2) + geometry.length.powi(-2);
    std::f64::consts::FRAC_PI_2 * (d / areal_mass).sqrt() * planar
}

/// Simulated measurement scatter: f·(0.99 + 0.02·draw), draw in [0, 1].
pub fn apply_uncertainty(frequency: f64, draw: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&draw) {
        return Err(Error::invalid(format!(
            "uncertainty draw must lie in [0, 1], got {draw}"
        )));
    }
    Ok(frequency * (0.99 + 0.02 * draw))
}
