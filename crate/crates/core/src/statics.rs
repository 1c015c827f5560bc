//! Closed-form statics of a fixed-fixed tube under a uniformly distributed load.
//!
//! Sign conventions: loads and deflections are positive downward, moments are
//! reported as magnitudes. All quantities are SI.
//!
//! Two load modes exist because the rig's reference calculation substitutes the
//! total carried weight (N) directly into formulas that expect an intensity
//! (N/m). [`UdlMode::PaperCompat`] reproduces that substitution so the
//! reference numbers are usable as test vectors; [`UdlMode::Physical`] spreads
//! the weight over the span and the rods that share it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Standard gravity used throughout the toolkit, m/s².
pub const GRAVITY: f64 = 9.81;

/// Second moment of area used in the rig's reference deflection calculation, m⁴.
///
/// Not consistent with the 12/10 mm tube section; kept only to reproduce the
/// reference deflection figure.
pub const REFERENCE_SECOND_MOMENT: f64 = 2.15e-3;

/// Rod span between end blocks used in the reference hand calculation, m.
pub const REFERENCE_SPAN: f64 = 0.662;

/// Full rod length, m. The reference modal frequencies are for this span.
pub const ROD_LENGTH: f64 = 0.700;

/// Masses (kg) of the parts riding on one linear actuator.
pub const ACTUATOR_COMPONENT_MASSES: [(&str, f64); 5] = [
    ("end_block", 0.44),
    ("mounting_plate", 0.16),
    ("stepper_motor", 0.36),
    ("shuttle", 0.21),
    ("miscellaneous", 0.83),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialSpecRaw", deny_unknown_fields)]
pub struct MaterialSpec {
    density: f64,
    youngs_modulus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    yield_strength: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSpecRaw {
    density: f64,
    youngs_modulus: f64,
    #[serde(default)]
    yield_strength: Option<f64>,
}

impl TryFrom<MaterialSpecRaw> for MaterialSpec {
    type Error = Error;
    fn try_from(raw: MaterialSpecRaw) -> Result<Self> {
        MaterialSpec::new(raw.density, raw.youngs_modulus, raw.yield_strength)
    }
}

impl MaterialSpec {
    pub fn new(density: f64, youngs_modulus: f64, yield_strength: Option<f64>) -> Result<Self> {
        ensure_positive("density", density)?;
        ensure_positive("youngs_modulus", youngs_modulus)?;
        if let Some(y) = yield_strength {
            ensure_positive("yield_strength", y)?;
        }
        Ok(Self {
            density,
            youngs_modulus,
            yield_strength,
        })
    }

    /// 304 stainless as used for the rig's guide rods.
    pub fn stainless_304() -> Self {
        Self {
            density: 7700.0,
            youngs_modulus: 2.0e11,
            yield_strength: Some(215.0e6),
        }
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn youngs_modulus(&self) -> f64 {
        self.youngs_modulus
    }

    pub fn yield_strength(&self) -> Option<f64> {
        self.yield_strength
    }
}

/// Annular cross-section. A solid rod has `inner_diameter == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TubeSectionRaw", deny_unknown_fields)]
pub struct TubeSection {
    outer_diameter: f64,
    inner_diameter: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TubeSectionRaw {
    outer_diameter: f64,
    inner_diameter: f64,
}

impl TryFrom<TubeSectionRaw> for TubeSection {
    type Error = Error;
    fn try_from(raw: TubeSectionRaw) -> Result<Self> {
        TubeSection::new(raw.outer_diameter, raw.inner_diameter)
    }
}

impl TubeSection {
    pub fn new(outer_diameter: f64, inner_diameter: f64) -> Result<Self> {
        ensure_positive("outer_diameter", outer_diameter)?;
        ensure_non_negative("inner_diameter", inner_diameter)?;
        if inner_diameter >= outer_diameter {
            return Err(Error::invalid(
                "tube section",
                format!("inner diameter {inner_diameter} must be smaller than outer diameter {outer_diameter}"),
            ));
        }
        Ok(Self {
            outer_diameter,
            inner_diameter,
        })
    }

    pub fn solid(diameter: f64) -> Result<Self> {
        Self::new(diameter, 0.0)
    }

    /// The rig's guide rod: 12 mm OD, 10 mm ID.
    pub fn guide_rod() -> Self {
        Self {
            outer_diameter: 0.012,
            inner_diameter: 0.010,
        }
    }

    pub fn outer_diameter(&self) -> f64 {
        self.outer_diameter
    }

    pub fn inner_diameter(&self) -> f64 {
        self.inner_diameter
    }

    /// Extreme-fibre distance used for bending stress.
    pub fn outer_radius(&self) -> f64 {
        self.outer_diameter / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeamSpecRaw", deny_unknown_fields)]
pub struct BeamSpec {
    length: f64,
    section: TubeSection,
    material: MaterialSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BeamSpecRaw {
    length: f64,
    section: TubeSection,
    material: MaterialSpec,
}

impl TryFrom<BeamSpecRaw> for BeamSpec {
    type Error = Error;
    fn try_from(raw: BeamSpecRaw) -> Result<Self> {
        BeamSpec::new(raw.length, raw.section, raw.material)
    }
}

impl BeamSpec {
    pub fn new(length: f64, section: TubeSection, material: MaterialSpec) -> Result<Self> {
        ensure_positive("beam length", length)?;
        Ok(Self {
            length,
            section,
            material,
        })
    }

    /// Full-length stainless guide rod.
    pub fn guide_rod() -> Self {
        Self {
            length: ROD_LENGTH,
            section: TubeSection::guide_rod(),
            material: MaterialSpec::stainless_304(),
        }
    }

    pub fn with_length(self, length: f64) -> Result<Self> {
        Self::new(length, self.section, self.material)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn section(&self) -> &TubeSection {
        &self.section
    }

    pub fn material(&self) -> &MaterialSpec {
        &self.material
    }

    /// Flexural rigidity E·I from the section, N·m².
    pub fn flexural_rigidity(&self) -> f64 {
        self.material.youngs_modulus * second_moment(&self.section)
    }

    /// Mass per unit length ρ·A, kg/m.
    pub fn linear_density(&self) -> f64 {
        self.material.density * section_area(&self.section)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UdlMode {
    /// Total weight is used numerically as the intensity.
    PaperCompat,
    /// Total weight divided by span and sharing rods.
    #[default]
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UdlLoad {
    intensity: f64,
    mode: UdlMode,
}

impl UdlLoad {
    pub fn new(intensity: f64, mode: UdlMode) -> Result<Self> {
        ensure_non_negative("load intensity", intensity)?;
        Ok(Self { intensity, mode })
    }

    /// Intensity in N/m.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn mode(&self) -> UdlMode {
        self.mode
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentMass {
    pub name: String,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComponentMass>", into = "Vec<ComponentMass>")]
pub struct ComponentMassList {
    entries: Vec<ComponentMass>,
}

impl TryFrom<Vec<ComponentMass>> for ComponentMassList {
    type Error = Error;
    fn try_from(entries: Vec<ComponentMass>) -> Result<Self> {
        ComponentMassList::new(entries)
    }
}

impl From<ComponentMassList> for Vec<ComponentMass> {
    fn from(list: ComponentMassList) -> Self {
        list.entries
    }
}

impl ComponentMassList {
    /// Entries must each carry a positive mass. An empty list is representable
    /// here but rejected by [`udl_from_masses`].
    pub fn new(entries: Vec<ComponentMass>) -> Result<Self> {
        for e in &entries {
            ensure_positive("component mass", e.mass)?;
        }
        Ok(Self { entries })
    }

    pub fn actuator() -> Self {
        Self {
            entries: ACTUATOR_COMPONENT_MASSES
                .iter()
                .map(|&(name, mass)| ComponentMass {
                    name: name.to_string(),
                    mass,
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[ComponentMass] {
        &self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|e| e.mass).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mass of a part from density and volume, `ρ·v`.
pub fn mass_from_volume(density: f64, volume: f64) -> f64 {
    density * volume
}

/// Cross-sectional area `π/4·(d_o² − d_i²)`, m².
pub fn section_area(s: &TubeSection) -> f64 {
    PI / 4.0 * (s.outer_diameter.powi(2) - s.inner_diameter.powi(2))
}

/// Second moment of area about a diameter, `π/64·(d_o⁴ − d_i⁴)`, m⁴.
pub fn second_moment(s: &TubeSection) -> f64 {
    PI / 64.0 * (s.outer_diameter.powi(4) - s.inner_diameter.powi(4))
}

/// Load carried by one rod from the weight of the parts riding on it.
pub fn udl_from_masses(
    components: &ComponentMassList,
    beam: &BeamSpec,
    rods_sharing: u32,
    mode: UdlMode,
) -> Result<UdlLoad> {
    if components.is_empty() {
        return Err(Error::Empty("component mass list"));
    }
    if rods_sharing == 0 {
        return Err(Error::invalid("rods_sharing", "at least one rod must carry the load"));
    }
    let weight = components.total_mass() * GRAVITY;
    let intensity = match mode {
        UdlMode::PaperCompat => weight,
        UdlMode::Physical => weight / (f64::from(rods_sharing) * beam.length),
    };
    UdlLoad::new(intensity, mode)
}

/// Support reaction at each end, `w·l/2` (equal at both supports).
pub fn reactions(w: f64, l: f64) -> f64 {
    w * l / 2.0
}

/// Hogging moment at the clamped ends, `w·l²/12`.
pub fn end_moment(w: f64, l: f64) -> f64 {
    w * l * l / 12.0
}

/// Sagging moment at midspan, `w·l²/24`.
pub fn centre_moment(w: f64, l: f64) -> f64 {
    w * l * l / 24.0
}

/// Midspan deflection `w·l⁴/(384·E·I)`, positive downward.
pub fn max_deflection(w: f64, l: f64, youngs_modulus: f64, second_moment: f64) -> Result<f64> {
    ensure_positive("youngs_modulus", youngs_modulus)?;
    ensure_positive("second moment of area", second_moment)?;
    Ok(w * l.powi(4) / (384.0 * youngs_modulus * second_moment))
}

/// Extreme-fibre bending stress `M·c/I`.
pub fn bending_stress(moment: f64, fibre_distance: f64, second_moment: f64) -> Result<f64> {
    ensure_positive("fibre distance", fibre_distance)?;
    ensure_positive("second moment of area", second_moment)?;
    Ok(moment * fibre_distance / second_moment)
}

/// True when `stress` is strictly below the material's yield strength.
pub fn safety_check(stress: f64, material: &MaterialSpec) -> Result<bool> {
    let yield_strength = material
        .yield_strength
        .ok_or_else(|| Error::invalid("material", "yield_strength is required for a safety check"))?;
    Ok(stress.abs() < yield_strength)
}

/// Every closed-form quantity for one beam and load case.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticsReport {
    pub intensity: f64,
    pub span: f64,
    pub second_moment: f64,
    pub reaction: f64,
    pub end_moment: f64,
    pub centre_moment: f64,
    pub max_deflection: f64,
    pub max_stress: f64,
    pub safe: Option<bool>,
}

/// Evaluates the full closed-form report. `i_override` replaces the
/// section-derived second moment (e.g. with [`REFERENCE_SECOND_MOMENT`]) for deflection and stress.
pub fn analyse(beam: &BeamSpec, load: &UdlLoad, span: f64, i_override: Option<f64>) -> Result<StaticsReport> {
    ensure_positive("span", span)?;
    let w = load.intensity();
    let i = i_override.unwrap_or_else(|| second_moment(&beam.section));
    let e = beam.material.youngs_modulus;
    let m_end = end_moment(w, span);
    let stress = bending_stress(m_end, beam.section.outer_radius(), i)?;
    let safe = match beam.material.yield_strength {
        Some(_) => Some(safety_check(stress, &beam.material)?),
        None => None,
    };
    Ok(StaticsReport {
        intensity: w,
        span,
        second_moment: i,
        reaction: reactions(w, span),
        end_moment: m_end,
        centre_moment: centre_moment(w, span),
        max_deflection: max_deflection(w, span, e, i)?,
        max_stress: stress,
        safe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn guide_rod_area_and_second_moment() {
        let s = TubeSection::new(0.012, 0.010).unwrap();
        assert!(rel(section_area(&s), 3.456e-5) < 1e-3);
        assert!(rel(second_moment(&s), 5.270e-10) < 1e-3);

        let thick = TubeSection::new(0.012, 0.008).unwrap();
        assert!(rel(second_moment(&thick), 8.168e-10) < 1e-3);
    }

    #[test]
    fn solid_rod_area() {
        let s = TubeSection::solid(0.02).unwrap();
        assert_relative_eq!(section_area(&s), PI * 0.02 * 0.02 / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_sections_rejected() {
        assert!(TubeSection::new(0.012, 0.012).is_err());
        assert!(TubeSection::new(0.012, 0.013).is_err());
        assert!(TubeSection::new(0.0, 0.0).is_err());
        assert!(TubeSection::new(0.012, -0.001).is_err());
    }

    #[test]
    fn vanishing_wall_limit() {
        let d = 0.012;
        let mut prev = f64::INFINITY;
        for k in 1..8 {
            let eps = 10f64.powi(-k - 3);
            let i = second_moment(&TubeSection::new(d, d - eps).unwrap());
            assert!(i < prev);
            prev = i;
        }
        assert!(prev < 1e-16);
    }

    #[test]
    fn actuator_load_paper_compat() {
        let beam = BeamSpec::guide_rod().with_length(REFERENCE_SPAN).unwrap();
        let udl = udl_from_masses(&ComponentMassList::actuator(), &beam, 1, UdlMode::PaperCompat).unwrap();
        assert_relative_eq!(udl.intensity(), 19.62, max_relative = 1e-12);
    }

    #[test]
    fn physical_load_two_rods() {
        let beam = BeamSpec::guide_rod();
        let list = ComponentMassList::new(vec![ComponentMass {
            name: "carriage".into(),
            mass: 2.0,
        }])
        .unwrap();
        let udl = udl_from_masses(&list, &beam, 2, UdlMode::Physical).unwrap();
        assert_relative_eq!(udl.intensity(), 14.014285714285714, max_relative = 1e-12);
    }

    #[test]
    fn empty_mass_list_rejected() {
        let list = ComponentMassList::new(vec![]).unwrap();
        assert!(matches!(
            udl_from_masses(&list, &BeamSpec::guide_rod(), 1, UdlMode::Physical),
            Err(Error::Empty(_))
        ));
        assert!(ComponentMassList::new(vec![ComponentMass {
            name: "x".into(),
            mass: 0.0
        }])
        .is_err());
    }

    #[test]
    fn reference_statics_vector() {
        assert!(rel(reactions(19.62, 0.662), 6.494) < 1e-3);
        assert!(rel(end_moment(19.62, 0.662), 0.7165) < 1e-3);
        assert!(rel(centre_moment(19.62, 0.662), 0.3582) < 1e-3);
        assert!(
            rel(
                max_deflection(19.62, 0.662, 2e11, REFERENCE_SECOND_MOMENT).unwrap(),
                2.28e-11
            ) < 1e-3
        );
    }

    #[test]
    fn hand_evaluated_physical_case() {
        let w = 14.014;
        assert!(rel(reactions(w, 0.7), 4.905) < 1e-3);
        assert!(rel(end_moment(w, 0.7), 0.5722) < 1e-3);
        assert!(rel(max_deflection(19.62, 0.662, 2e11, 5.270e-10).unwrap(), 9.31e-5) < 1e-3);
    }

    #[test]
    fn zero_load_gives_zero() {
        assert_eq!(reactions(0.0, 0.7), 0.0);
        assert_eq!(end_moment(0.0, 0.7), 0.0);
        assert_eq!(centre_moment(0.0, 0.7), 0.0);
        assert_eq!(max_deflection(0.0, 0.7, 2e11, 5.27e-10).unwrap(), 0.0);
        let sigma = bending_stress(0.0, 0.006, 5.27e-10).unwrap();
        assert_eq!(sigma, 0.0);
        assert!(safety_check(sigma, &MaterialSpec::stainless_304()).unwrap());
    }

    #[test]
    fn deflection_rejects_bad_stiffness() {
        assert!(max_deflection(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(max_deflection(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn stress_and_safety() {
        let sigma = bending_stress(0.7165, 0.006, 5.270e-10).unwrap();
        assert!(rel(sigma, 8.157e6) < 1e-3);
        let steel = MaterialSpec::stainless_304();
        assert!(safety_check(sigma, &steel).unwrap());
        // boundary is unsafe
        assert!(!safety_check(215.0e6, &steel).unwrap());
        let no_yield = MaterialSpec::new(7700.0, 2e11, None).unwrap();
        assert!(safety_check(1.0, &no_yield).is_err());
    }

    #[test]
    fn analyse_paper_compat() {
        let beam = BeamSpec::guide_rod();
        let load = UdlLoad::new(19.62, UdlMode::PaperCompat).unwrap();
        let r = analyse(&beam, &load, REFERENCE_SPAN, Some(REFERENCE_SECOND_MOMENT)).unwrap();
        assert!(rel(r.reaction, 6.494) < 1e-3);
        assert!(rel(r.max_deflection, 2.28e-11) < 1e-3);
        assert_eq!(r.safe, Some(true));
    }

    proptest! {
        #[test]
        fn outputs_are_linear_in_load(w in 0.1f64..1e3, l in 0.05f64..5.0, k in 0.5f64..10.0) {
            let i = 5.27e-10;
            prop_assert!(rel(reactions(k * w, l), k * reactions(w, l)) < 1e-12);
            prop_assert!(rel(end_moment(k * w, l), k * end_moment(w, l)) < 1e-12);
            prop_assert!(rel(centre_moment(k * w, l), k * centre_moment(w, l)) < 1e-12);
            let d1 = max_deflection(w, l, 2e11, i).unwrap();
            let d2 = max_deflection(k * w, l, 2e11, i).unwrap();
            prop_assert!(rel(d2, k * d1) < 1e-12);
            let s1 = bending_stress(end_moment(w, l), 0.006, i).unwrap();
            let s2 = bending_stress(end_moment(k * w, l), 0.006, i).unwrap();
            prop_assert!(rel(s2, k * s1) < 1e-12);
        }

        #[test]
        fn centre_moment_is_half_end_moment(w in 0.0f64..1e4, l in 1e-3f64..10.0) {
            let c = centre_moment(w, l);
            let e = end_moment(w, l);
            prop_assert!((c - e / 2.0).abs() <= 1e-15 * e.max(1e-300));
        }

        #[test]
        fn section_properties_monotone(od in 0.005f64..0.05, frac in 0.0f64..0.9, bump in 1e-5f64..1e-3) {
            let id = od * frac;
            let base = TubeSection::new(od, id).unwrap();
            let wider = TubeSection::new(od + bump, id).unwrap();
            prop_assert!(section_area(&wider) > section_area(&base));
            prop_assert!(second_moment(&wider) > second_moment(&base));
            let bored_id = (id + bump).min(od * 0.99);
            if bored_id > id {
                let bored = TubeSection::new(od, bored_id).unwrap();
                prop_assert!(section_area(&bored) < section_area(&base));
                prop_assert!(second_moment(&bored) < second_moment(&base));
            }
        }

        #[test]
        fn modes_agree_on_unit_span(total in 0.1f64..10.0, rods in 1u32..4) {
            let length = 1.0 / f64::from(rods);
            let beam = BeamSpec::guide_rod().with_length(length).unwrap();
            let list = ComponentMassList::new(vec![ComponentMass { name: "m".into(), mass: total }]).unwrap();
            let a = udl_from_masses(&list, &beam, rods, UdlMode::PaperCompat).unwrap();
            let b = udl_from_masses(&list, &beam, rods, UdlMode::Physical).unwrap();
            prop_assert!(rel(a.intensity(), b.intensity()) < 1e-12);
        }

        #[test]
        fn millimetre_inputs_scale_cleanly(od_mm in 5.0f64..50.0, frac in 0.0f64..0.9, l_mm in 100.0f64..2000.0, w in 1.0f64..100.0) {
            let id_mm = od_mm * frac;
            let s_mm = TubeSection::new(od_mm / 1000.0, id_mm / 1000.0).unwrap();
            let i_native = PI / 64.0 * ((od_mm * 1e-3).powi(4) - (id_mm * 1e-3).powi(4));
            prop_assert!(rel(second_moment(&s_mm), i_native) < 1e-12);
            let l = l_mm / 1000.0;
            let d = max_deflection(w, l, 2e11, second_moment(&s_mm)).unwrap();
            let d_native = w * l.powi(4) / (384.0 * 2e11 * i_native);
            prop_assert!(rel(d, d_native) < 1e-12);
        }
    }
}
