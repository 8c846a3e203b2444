//! Galvanic-coupling wearable channel model.
//!
//! The crate maps tissue dispersion, arm geometry and electrode–skin
//! interface parameters into complex channel transfer functions, delay and
//! dispersion metrics, simulated PN channel-sounding experiments and
//! calibration/similarity reports.

pub mod calibration;
pub mod circuit;
pub mod error;
pub mod field;
pub mod io;
pub mod metrics;
pub mod response;
pub mod scenario;
pub mod sounding;
pub mod tissue;

pub use calibration::{CalibrationBand, Comparison, EnsembleStats, FixtureModel, SimilarityReport};
pub use circuit::{LinkPoint, LinkResponse};
pub use error::{Error, Result};
pub use field::{MeshSpec, PortQuantities};
pub use metrics::{ChannelMetrics, DispersionStats, NormalizedCoefficients};
pub use num_complex::Complex64;
pub use response::{ComplexResponse, FrequencyGrid, GridSpec};
pub use scenario::{
    build_scenario, electrode_positions, parse_scenario, ArmModel, ElectrodeDisc, GelLayer,
    InterfaceConfig, InterfaceStack, Layer, Material, Placement, Polarity, Port, Scenario,
    ScenarioConfig, Termination,
};
pub use sounding::{Channel, SoundingConfig, SoundingRecord, WelchParams};
pub use tissue::{
    complex_conductivity, complex_permittivity, load_tissue_table, ColeColeParams, Dispersion,
    TissueId, TissueTable, EPS0,
};
