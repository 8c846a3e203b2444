//! Simulation scenario: arm anatomy, electrode placement, interface stack and
//! terminations.
//!
//! A [`Scenario`] is built from a TOML document ([`ScenarioConfig`]) in
//! which every field is optional and falls back to the forearm defaults:
//! four-layer 60 cm arm, 1 cm discs, 4 cm intra-pair spacing, 10 cm
//! (longitudinal) or 7 cm arc (radial) Tx–Rx separation, Ag/AgCl with foam
//! and gel, 1 mA drive and 100 kΩ load/reference.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tissue::{load_tissue_table, TissueId, TissueTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub tissue: TissueId,
    /// Outer radius of this layer in metres.
    pub outer_radius: f64,
}

/// Concentric layered cylinder, layers ordered inner to outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub layers: Vec<Layer>,
    pub length: f64,
}

impl ArmModel {
    pub fn radius(&self) -> f64 {
        self.layers.last().map_or(0.0, |l| l.outer_radius)
    }

    /// Layer index containing radius `r` (clamped to the outermost layer).
    pub fn layer_at(&self, r: f64) -> usize {
        self.layers
            .iter()
            .position(|l| r <= l.outer_radius)
            .unwrap_or(self.layers.len() - 1)
    }

    /// Single-tissue cylinder.
    pub fn homogeneous(tissue: TissueId, radius: f64, length: f64) -> Self {
        Self {
            layers: vec![Layer {
                tissue,
                outer_radius: radius,
            }],
            length,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::validation("arm.layers", "at least one layer required"));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::validation("arm.length", "must be > 0"));
        }
        let mut prev = 0.0;
        for (i, l) in self.layers.iter().enumerate() {
            if !(l.outer_radius > prev && l.outer_radius.is_finite()) {
                return Err(Error::validation(
                    format!("arm.layers[{i}].outer_radius"),
                    "radii must be strictly increasing and > 0",
                ));
            }
            prev = l.outer_radius;
        }
        Ok(())
    }
}

impl Default for ArmModel {
    fn default() -> Self {
        let layer = |tissue, r| Layer {
            tissue,
            outer_radius: r,
        };
        Self {
            layers: vec![
                layer(TissueId::Bone, 0.01244),
                layer(TissueId::Muscle, 0.02794),
                layer(TissueId::Fat, 0.03374),
                layer(TissueId::Skin, 0.035),
            ],
            length: 0.60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Plus => 1.0,
            Polarity::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Polarity::Plus => Polarity::Minus,
            Polarity::Minus => Polarity::Plus,
        }
    }

    pub fn sign_char(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    Tx,
    Rx,
}

/// Circular electrode on the lateral skin surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectrodeDisc {
    /// Axial position of the centre, m.
    pub z: f64,
    /// Azimuth of the centre, rad.
    pub theta: f64,
    pub radius: f64,
    pub polarity: Polarity,
    pub port: Port,
}

impl ElectrodeDisc {
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Surface (geodesic) distance between centres on a cylinder of radius
    /// `arm_radius`.
    pub fn surface_distance(&self, other: &ElectrodeDisc, arm_radius: f64) -> f64 {
        let dz = self.z - other.z;
        let dth = wrap_angle(self.theta - other.theta);
        (dz * dz + (arm_radius * dth).powi(2)).sqrt()
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Material {
    Cu,
    Pt,
    AgAgCl,
    Carbon,
}

impl Material {
    pub const ALL: [Material; 4] = [Material::Cu, Material::Pt, Material::Carbon, Material::AgAgCl];

    /// Default `(R_c [Ω], C_dl [F])`. Calibratable placeholders ranked by
    /// polarisability: Ag/AgCl lowest, Pt/Cu highest.
    pub fn default_interface(self) -> (f64, f64) {
        match self {
            Material::AgAgCl => (500.0, 10e-6),
            Material::Pt | Material::Cu => (5e3, 1e-6),
            Material::Carbon => (2e3, 5e-6),
        }
    }

    /// Bulk conductor `(σ [S/m], εr)`.
    pub fn bulk_properties(self) -> (f64, f64) {
        match self {
            Material::Cu => (5.8e7, 1.0),
            Material::Pt => (9.4e6, 1.0),
            Material::AgAgCl => (1.5e4, 12.0),
            Material::Carbon => (1.0e4, 10.0),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Material::Cu => "Cu",
            Material::Pt => "Pt",
            Material::AgAgCl => "AgCl",
            Material::Carbon => "C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InterfaceConfig {
    Bare,
    FoamOnly,
    GelOnly,
    FoamGel,
}

impl InterfaceConfig {
    pub const ALL: [InterfaceConfig; 4] = [
        InterfaceConfig::Bare,
        InterfaceConfig::FoamOnly,
        InterfaceConfig::GelOnly,
        InterfaceConfig::FoamGel,
    ];

    pub fn has_gel(self) -> bool {
        matches!(self, InterfaceConfig::GelOnly | InterfaceConfig::FoamGel)
    }

    pub fn has_foam(self) -> bool {
        matches!(self, InterfaceConfig::FoamOnly | InterfaceConfig::FoamGel)
    }

    /// Parasitic capacitance default: 50 pF with foam backing, absent otherwise.
    pub fn default_c_par(self) -> Option<f64> {
        self.has_foam().then_some(50e-12)
    }
}

/// Conductive hydrogel slab between electrode and skin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GelLayer {
    pub thickness: f64,
    pub sigma: f64,
    /// Relative permittivity.
    pub eps_r: f64,
    pub area: f64,
}

impl Default for GelLayer {
    /// 0.2 mm hydrogel (σ = 0.5 S/m, εr = 78) over a 1.2 cm radius footprint.
    fn default() -> Self {
        Self {
            thickness: 0.2e-3,
            sigma: 0.5,
            eps_r: 78.0,
            area: PI * 0.012 * 0.012,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterfaceStack {
    pub material: Material,
    pub config: InterfaceConfig,
    pub r_c: f64,
    pub c_dl: f64,
    pub gel: Option<GelLayer>,
    pub c_par: Option<f64>,
}

impl InterfaceStack {
    /// Stack with the documented defaults for `material` and `config`.
    pub fn with_defaults(material: Material, config: InterfaceConfig) -> Self {
        let (r_c, c_dl) = material.default_interface();
        Self {
            material,
            config,
            r_c,
            c_dl,
            gel: config.has_gel().then(GelLayer::default),
            c_par: config.default_c_par(),
        }
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.r_c >= 0.0 && self.r_c.is_finite()) {
            return Err(Error::validation(format!("{path}.r_c"), "must be >= 0"));
        }
        if !(self.c_dl > 0.0 && self.c_dl.is_finite()) {
            return Err(Error::validation(format!("{path}.c_dl"), "must be > 0"));
        }
        match (self.config.has_gel(), &self.gel) {
            (true, None) => {
                return Err(Error::validation(
                    format!("{path}.gel"),
                    "gel parameters required for gel configurations",
                ))
            }
            (false, Some(_)) => {
                return Err(Error::validation(
                    format!("{path}.gel"),
                    "gel given but configuration has no gel",
                ))
            }
            (true, Some(g)) => {
                if !(g.thickness > 0.0) {
                    return Err(Error::validation(format!("{path}.gel.thickness"), "must be > 0"));
                }
                if !(g.area > 0.0) {
                    return Err(Error::validation(format!("{path}.gel.area"), "must be > 0"));
                }
                if !(g.sigma >= 0.0 && g.eps_r >= 0.0) || g.sigma + g.eps_r == 0.0 {
                    return Err(Error::validation(
                        format!("{path}.gel.sigma"),
                        "gel admittance must be nonzero and non-negative",
                    ));
                }
            }
            (false, None) => {}
        }
        if let Some(c) = self.c_par {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::validation(format!("{path}.c_par"), "must be > 0 when present"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Placement {
    Longitudinal,
    Radial,
}

impl Placement {
    /// Default Tx–Rx separation in metres (axial for longitudinal, surface
    /// arc length for radial).
    pub fn default_separation(self) -> f64 {
        match self {
            Placement::Longitudinal => 0.10,
            Placement::Radial => 0.07,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Placement::Longitudinal => "Long",
            Placement::Radial => "Rad",
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Receiver load impedance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Frequency-independent impedance `[re, im]` in Ω.
    Constant(Complex64),
    /// Resistor `r` in parallel with capacitor `c` (front-end input model).
    ParallelRc { r: f64, c: f64 },
}

impl Termination {
    pub fn at(&self, f: f64) -> Complex64 {
        match *self {
            Termination::Constant(z) => z,
            Termination::ParallelRc { r, c } => {
                let y = Complex64::new(1.0 / r, 2.0 * PI * f * c);
                1.0 / y
            }
        }
    }
}

/// Validated, simulation-ready parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub arm: ArmModel,
    pub tissues: TissueTable,
    pub placement: Placement,
    /// Intra-pair centre spacing, m.
    pub d_r: f64,
    /// Tx–Rx centroid separation: axial distance (longitudinal) or surface
    /// arc length (radial), m.
    pub separation: f64,
    pub electrode_radius: f64,
    /// Azimuth of the Tx pair, rad.
    pub azimuth: f64,
    /// Axial position of the electrode-layout centre, m.
    pub center_z: f64,
    pub interface: InterfaceStack,
    pub z_load: Termination,
    pub z_ref: Complex64,
    /// Drive current amplitude, A.
    pub i0: f64,
    electrodes: [ElectrodeDisc; 4],
}

impl Scenario {
    pub fn default_for(placement: Placement) -> Self {
        ScenarioConfig {
            placement: Some(placement),
            ..Default::default()
        }
        .build()
        .expect("default scenario is valid")
    }

    pub fn electrodes(&self) -> &[ElectrodeDisc; 4] {
        &self.electrodes
    }

    /// Normalisation distance for per-length coefficients, in cm.
    pub fn separation_cm(&self) -> f64 {
        self.separation * 100.0
    }

    pub fn with_interface(&self, interface: InterfaceStack) -> Result<Self> {
        let mut c = self.to_config();
        c.interface = Some(InterfaceSection::from_stack(&interface));
        c.build()
    }

    /// Same geometry with the roles of the Tx and Rx pairs exchanged.
    pub fn with_ports_swapped(&self) -> Self {
        let mut s = self.clone();
        for e in s.electrodes.iter_mut() {
            e.port = match e.port {
                Port::Tx => Port::Rx,
                Port::Rx => Port::Tx,
            };
        }
        s
    }

    /// Same geometry with `+`/`-` exchanged on both ports.
    pub fn with_polarity_swapped(&self) -> Self {
        let mut s = self.clone();
        for e in s.electrodes.iter_mut() {
            e.polarity = e.polarity.flipped();
        }
        s
    }

    /// Rotates the whole electrode layout about the arm axis.
    pub fn rotated(&self, dtheta: f64) -> Self {
        let mut s = self.clone();
        s.azimuth = (s.azimuth + dtheta).rem_euclid(2.0 * PI);
        for e in s.electrodes.iter_mut() {
            e.theta = (e.theta + dtheta).rem_euclid(2.0 * PI);
        }
        s
    }

    pub fn electrode(&self, port: Port, polarity: Polarity) -> &ElectrodeDisc {
        self.electrodes
            .iter()
            .find(|e| e.port == port && e.polarity == polarity)
            .expect("validated scenario has one disc per port and polarity")
    }

    /// Fully explicit configuration; `build()` on it reproduces `self`.
    pub fn to_config(&self) -> ScenarioConfig {
        let builtin = TissueTable::builtin();
        let custom: String = {
            let mut t = TissueTable::default();
            for (id, p) in self.tissues.iter() {
                if builtin.get(id).ok() != Some(p) {
                    t.insert(id.clone(), p.clone());
                }
            }
            t.to_toml()
        };
        ScenarioConfig {
            placement: Some(self.placement),
            d_r: Some(self.d_r),
            separation: Some(self.separation),
            electrode_radius: Some(self.electrode_radius),
            azimuth: Some(self.azimuth),
            center_z: Some(self.center_z),
            i0: Some(self.i0),
            z_ref: Some(self.z_ref),
            z_load: Some(self.z_load),
            arm: Some(self.arm.clone()),
            interface: Some(InterfaceSection::from_stack(&self.interface)),
            tissues: if custom.is_empty() {
                None
            } else {
                Some(custom.parse().expect("canonical tissue TOML parses"))
            },
        }
    }

    /// Canonical TOML text.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_config()).expect("scenario serialises")
    }
}

/// Interface section of the config file. Omitted values take the material
/// and configuration defaults; `c_par = 0` omits the parasitic term.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSection {
    pub material: Option<Material>,
    pub config: Option<InterfaceConfig>,
    pub r_c: Option<f64>,
    pub c_dl: Option<f64>,
    pub c_par: Option<f64>,
    pub gel: Option<GelLayer>,
}

impl InterfaceSection {
    fn from_stack(s: &InterfaceStack) -> Self {
        Self {
            material: Some(s.material),
            config: Some(s.config),
            r_c: Some(s.r_c),
            c_dl: Some(s.c_dl),
            c_par: Some(s.c_par.unwrap_or(0.0)),
            gel: s.gel,
        }
    }

    fn resolve(&self) -> InterfaceStack {
        let material = self.material.unwrap_or(Material::AgAgCl);
        let config = self.config.unwrap_or(InterfaceConfig::FoamGel);
        let mut s = InterfaceStack::with_defaults(material, config);
        if let Some(r) = self.r_c {
            s.r_c = r;
        }
        if let Some(c) = self.c_dl {
            s.c_dl = c;
        }
        match self.c_par {
            Some(c) if c == 0.0 => s.c_par = None,
            Some(c) => s.c_par = Some(c),
            None => {}
        }
        if self.gel.is_some() {
            s.gel = self.gel;
        }
        s
    }
}

/// On-disk scenario description. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub placement: Option<Placement>,
    pub d_r: Option<f64>,
    pub separation: Option<f64>,
    pub electrode_radius: Option<f64>,
    pub azimuth: Option<f64>,
    pub center_z: Option<f64>,
    pub i0: Option<f64>,
    pub z_ref: Option<Complex64>,
    pub z_load: Option<Termination>,
    pub arm: Option<ArmModel>,
    pub interface: Option<InterfaceSection>,
    /// Extra or overriding tissue rows, same layout as the tissue table file.
    pub tissues: Option<toml::Table>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            context: "scenario".into(),
            msg: e.to_string(),
        })
    }

    pub fn build(&self) -> Result<Scenario> {
        build_scenario(self)
    }
}

/// Parses and validates a scenario from TOML text.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    ScenarioConfig::from_toml(text)?.build()
}

/// Validates a configuration and derives electrode positions.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Scenario> {
    let placement = cfg.placement.unwrap_or(Placement::Longitudinal);
    let arm = cfg.arm.clone().unwrap_or_default();
    arm.validate()?;

    let mut tissues = TissueTable::builtin();
    if let Some(extra) = &cfg.tissues {
        let text = toml::to_string(extra).map_err(|e| Error::Config(e.to_string()))?;
        tissues = tissues.merged(&load_tissue_table(&text)?);
    }
    for (i, l) in arm.layers.iter().enumerate() {
        if tissues.get(&l.tissue).is_err() {
            return Err(Error::validation(
                format!("arm.layers[{i}].tissue"),
                format!("unknown tissue `{}`", l.tissue),
            ));
        }
    }

    let d_r = cfg.d_r.unwrap_or(0.04);
    let separation = cfg.separation.unwrap_or(placement.default_separation());
    let electrode_radius = cfg.electrode_radius.unwrap_or(0.01);
    let azimuth = cfg.azimuth.unwrap_or(0.0);
    let center_z = cfg.center_z.unwrap_or(arm.length / 2.0);
    let i0 = cfg.i0.unwrap_or(1e-3);
    let z_ref = cfg.z_ref.unwrap_or(Complex64::new(1e5, 0.0));
    let z_load = cfg
        .z_load
        .unwrap_or(Termination::Constant(Complex64::new(1e5, 0.0)));
    let interface = cfg.interface.clone().unwrap_or_default().resolve();

    if !(d_r > 0.0 && d_r.is_finite()) {
        return Err(Error::validation("d_r", "must be > 0"));
    }
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::validation("separation", "must be > 0"));
    }
    if !(electrode_radius > 0.0) {
        return Err(Error::validation("electrode_radius", "must be > 0"));
    }
    if !(i0 > 0.0 && i0.is_finite()) {
        return Err(Error::validation("i0", "must be > 0"));
    }
    if z_ref.norm() == 0.0 || !z_ref.is_finite() {
        return Err(Error::validation("z_ref", "must be nonzero"));
    }
    match z_load {
        Termination::Constant(z) if !z.is_finite() => {
            return Err(Error::validation("z_load", "must be finite"))
        }
        Termination::ParallelRc { r, c } if !(r > 0.0 && c >= 0.0) => {
            return Err(Error::validation("z_load.parallel_rc", "need r > 0 and c >= 0"))
        }
        _ => {}
    }
    interface.validate("interface")?;

    let electrodes = electrode_positions_for(
        placement,
        arm.radius(),
        center_z,
        azimuth,
        d_r,
        separation,
        electrode_radius,
    );
    let names = ["Tx+", "Tx-", "Rx+", "Rx-"];
    for (k, e) in electrodes.iter().enumerate() {
        if e.z - e.radius < 0.0 || e.z + e.radius > arm.length {
            return Err(Error::validation(
                format!("electrodes[{}]", names[k]),
                "disc extends beyond the arm ends",
            ));
        }
        if 2.0 * e.radius >= 2.0 * PI * arm.radius() {
            return Err(Error::validation(
                format!("electrodes[{}]", names[k]),
                "disc larger than the arm circumference",
            ));
        }
    }
    for a in 0..4 {
        for b in (a + 1)..4 {
            let (ea, eb) = (&electrodes[a], &electrodes[b]);
            if ea.surface_distance(eb, arm.radius()) < ea.radius + eb.radius {
                return Err(Error::validation(
                    format!("electrodes[{}]/electrodes[{}]", names[a], names[b]),
                    "discs overlap",
                ));
            }
        }
    }

    Ok(Scenario {
        arm,
        tissues,
        placement,
        d_r,
        separation,
        electrode_radius,
        azimuth,
        center_z,
        interface,
        z_load,
        z_ref,
        i0,
        electrodes,
    })
}

fn electrode_positions_for(
    placement: Placement,
    arm_radius: f64,
    center_z: f64,
    azimuth: f64,
    d_r: f64,
    separation: f64,
    radius: f64,
) -> [ElectrodeDisc; 4] {
    let disc = |z, theta, polarity, port| ElectrodeDisc {
        z,
        theta: f64::rem_euclid(theta, 2.0 * PI),
        radius,
        polarity,
        port,
    };
    match placement {
        Placement::Longitudinal => {
            let tx = center_z - separation / 2.0;
            let rx = center_z + separation / 2.0;
            [
                disc(tx - d_r / 2.0, azimuth, Polarity::Plus, Port::Tx),
                disc(tx + d_r / 2.0, azimuth, Polarity::Minus, Port::Tx),
                disc(rx - d_r / 2.0, azimuth, Polarity::Plus, Port::Rx),
                disc(rx + d_r / 2.0, azimuth, Polarity::Minus, Port::Rx),
            ]
        }
        Placement::Radial => {
            let rx_theta = azimuth + separation / arm_radius;
            [
                disc(center_z - d_r / 2.0, azimuth, Polarity::Plus, Port::Tx),
                disc(center_z + d_r / 2.0, azimuth, Polarity::Minus, Port::Tx),
                disc(center_z - d_r / 2.0, rx_theta, Polarity::Plus, Port::Rx),
                disc(center_z + d_r / 2.0, rx_theta, Polarity::Minus, Port::Rx),
            ]
        }
    }
}

/// The four discs in the order Tx+, Tx-, Rx+, Rx-.
pub fn electrode_positions(s: &Scenario) -> [ElectrodeDisc; 4] {
    let mut out = *s.electrodes();
    let key = |e: &ElectrodeDisc| (e.port == Port::Rx) as u8 * 2 + (e.polarity == Polarity::Minus) as u8;
    out.sort_by_key(key);
    out
}
